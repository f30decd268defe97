mod common;

use common::naive_best;
use davenport::ring::RingSpec;
use davenport::search::{compute_d, SearchConfig};

/// Every ring with at most 8 elements, every m in 1..=3, both symmetry
/// settings, against full enumeration up to length 8. The oracle settles
/// (proves the maximum) whenever its best stays below the cap; in that
/// case the pruned search must agree exactly and report exhaustiveness.
#[test]
fn pruned_search_matches_naive_enumeration() {
    let rings: &[&[u64]] = &[
        &[2],
        &[3],
        &[4],
        &[5],
        &[6],
        &[7],
        &[8],
        &[2, 2],
        &[2, 3],
        &[2, 4],
        &[2, 2, 2],
    ];
    const CAP: u64 = 8;
    for &moduli in rings {
        let ring = RingSpec::new(moduli.to_vec()).unwrap();
        for m in 1..=3u64 {
            let (naive, settled) = naive_best(moduli, m as usize, CAP as usize);
            for sym in [true, false] {
                let config = SearchConfig {
                    max_length: Some(CAP),
                    use_unit_symmetry: sym,
                    ..SearchConfig::default()
                };
                let out = compute_d(&ring, m, &config).unwrap();
                let tag = format!("ring {moduli:?}, m={m}, sym={sym}");
                assert_eq!(out.value, naive + 1, "{tag}: value vs naive");
                assert_eq!(out.witness.len(), out.value - 1, "{tag}: witness length");
                if settled {
                    assert!(out.exhaustive, "{tag}: oracle settled below cap");
                }
                if !out.exhaustive {
                    assert_eq!(naive, CAP, "{tag}: non-exhaustive only at the cap");
                }
            }
        }
    }
}
