//! Command implementations and rendering for the `davenport` binary.
//!
//! Everything here is plain functions over the library types; argument
//! parsing lives in the binary. Each command prints either a human-readable
//! report or (with `--json`) a single JSON document with a `command` field,
//! and returns the process exit code: 0 success, 1 negative verdict,
//! 2 usage/configuration error, 3 partial (capped) search result.

use std::fmt::Display;
use std::path::PathBuf;
use std::time::Duration;

use num_traits::ToPrimitive;
use serde_json::json;
use thiserror::Error;

use crate::bounds::{bounds_report, BoundKind};
use crate::ring::RingSpec;
use crate::search::cache::{cache_get, cache_put};
use crate::search::{compute_d, is_m_zero_free, SearchConfig, SearchError, SearchOutcome};
use crate::symfun::{elementary_mod, expand_e_in_p, min_dominating_set, MultisetSeq};

/// Environment variable consulted for the cache path when `--cache` is not
/// given.
pub const CACHE_ENV_VAR: &str = "DAVENPORT_CACHE";

/// Reference values of D_2 over Z_n, recomputed and compared by
/// `verify-table`. Rows with n > 10 are gated behind `--extended`.
pub const D2_TABLE: [(u64, u64); 16] = [
    (2, 4),
    (3, 5),
    (4, 8),
    (5, 6),
    (6, 7),
    (7, 10),
    (8, 16),
    (9, 9),
    (10, 9),
    (11, 13),
    (12, 12),
    (13, 14),
    (14, 13),
    (15, 12),
    (16, 32),
    (18, 13),
];

/// Largest n whose table row runs without `--extended`.
pub const TABLE_DEFAULT_MAX_N: u64 = 10;
/// Largest n in the table, the default reach of `--extended`.
pub const TABLE_EXTENDED_MAX_N: u64 = 18;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
}

fn parse_err(msg: impl Into<String>) -> CliError {
    CliError::Parse(msg.into())
}

/// Parses ring syntax: a modulus, or moduli joined by `x` ("6", "2x3x4").
pub fn parse_ring(text: &str) -> Result<RingSpec, CliError> {
    let text = text.trim();
    if text.is_empty() {
        return Err(parse_err(
            "empty ring syntax; expected e.g. \"6\" or \"2x3\"",
        ));
    }
    let mut moduli = Vec::new();
    for part in text.split('x') {
        let n: u64 = part
            .parse()
            .map_err(|_| parse_err(format!("invalid modulus {part:?} in ring {text:?}")))?;
        moduli.push(n);
    }
    RingSpec::new(moduli).map_err(|e| parse_err(format!("invalid ring {text:?}: {e}")))
}

/// Parses a sequence of ring elements: comma-separated integers for cyclic
/// rings, comma-separated bracketed tuples ("[1,0],[2,1]") for product
/// rings. Whitespace is ignored; negative residues are reduced.
pub fn parse_sequence(ring: &RingSpec, text: &str) -> Result<MultisetSeq, CliError> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let mut seq = MultisetSeq::new(ring.clone());
    if compact.is_empty() {
        return Ok(seq);
    }
    let mut push = |residues: &[i64]| -> Result<(), CliError> {
        let elem = ring
            .elem(residues)
            .map_err(|e| parse_err(format!("bad element {residues:?}: {e}")))?;
        seq.insert(elem, 1)
            .map_err(|e| parse_err(format!("sequence too long: {e}")))
    };
    if compact.starts_with('[') {
        let mut rest = compact.as_str();
        loop {
            rest = rest
                .strip_prefix('[')
                .ok_or_else(|| parse_err(format!("expected '[' at {rest:?}")))?;
            let end = rest.find(']').ok_or_else(|| parse_err("missing ']'"))?;
            let residues = parse_int_list(&rest[..end])?;
            push(&residues)?;
            rest = &rest[end + 1..];
            if rest.is_empty() {
                break;
            }
            rest = rest
                .strip_prefix(',')
                .ok_or_else(|| parse_err(format!("expected ',' between tuples at {rest:?}")))?;
        }
    } else {
        if ring.width() > 1 {
            return Err(parse_err(format!(
                "ring {ring} has {} coordinates; write elements as bracketed tuples like [a,b]",
                ring.width()
            )));
        }
        for residues in parse_int_list(&compact)? {
            push(&[residues])?;
        }
    }
    Ok(seq)
}

fn parse_int_list(text: &str) -> Result<Vec<i64>, CliError> {
    text.split(',')
        .map(|tok| {
            tok.parse()
                .map_err(|_| parse_err(format!("invalid integer {tok:?}")))
        })
        .collect()
}

/// Cache path precedence: explicit flag, then the environment, then none.
pub fn resolve_cache_path(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os(CACHE_ENV_VAR).map(PathBuf::from))
}

#[derive(Debug, Clone)]
pub struct GlobalOpts {
    pub json: bool,
    pub cache: Option<PathBuf>,
    pub threads: usize,
}

fn fail(msg: impl Display) -> i32 {
    eprintln!("error: {msg}");
    2
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn witness_json(w: &MultisetSeq) -> serde_json::Value {
    json!({
        "length": w.len(),
        "pairs": w
            .pairs()
            .iter()
            .map(|(e, c)| json!({ "element": &e.residues, "count": c }))
            .collect::<Vec<_>>(),
    })
}

fn print_outcome(out: &SearchOutcome, cached: bool, g: &GlobalOpts) {
    if g.json {
        let mut doc = json!({
            "command": "compute",
            "ring": out.ring.to_string(),
            "moduli": out.ring.moduli(),
            "m": out.m,
            "value": out.value,
            "exhaustive": out.exhaustive,
            "certified_by_cap": out.certified_by_cap,
            "depth_cap": out.depth_cap,
            "nodes": out.nodes_explored,
            "elapsed_ms": ms(out.elapsed),
            "cached": cached,
            "witness": witness_json(&out.witness),
        });
        if let Some(ws) = &out.all_witnesses {
            doc["all_witnesses"] = json!({
                "complete": ws.complete,
                "count": ws.witnesses.len(),
                "witnesses": ws.witnesses.iter().map(witness_json).collect::<Vec<_>>(),
            });
        }
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
        return;
    }
    let rel = if out.exhaustive { "=" } else { ">=" };
    println!(
        "D_{}({}) {} {}",
        out.m,
        ring_label(&out.ring),
        rel,
        out.value
    );
    println!(
        "  exhaustive   {}",
        if out.exhaustive { "yes" } else { "no (capped)" }
    );
    if out.certified_by_cap {
        println!("  certified    cap-length witness meets the theorem upper bound");
    }
    println!("  depth cap    {}", out.depth_cap);
    println!("  witness      (len {}) {}", out.witness.len(), out.witness);
    println!("  nodes        {}", out.nodes_explored);
    if cached {
        println!("  source       cache");
    } else {
        println!("  elapsed      {:.3} ms", ms(out.elapsed));
    }
    if let Some(ws) = &out.all_witnesses {
        let suffix = if ws.complete { "" } else { " (truncated)" };
        println!("  all maximum-length witnesses{suffix}:");
        for w in &ws.witnesses {
            println!("    {w}");
        }
    }
}

fn ring_label(ring: &RingSpec) -> String {
    if ring.width() == 1 {
        format!("Z_{}", ring.moduli()[0])
    } else {
        ring.moduli()
            .iter()
            .map(|n| format!("Z_{n}"))
            .collect::<Vec<_>>()
            .join(" x ")
    }
}

pub fn cmd_compute(
    ring_text: &str,
    m: u64,
    max_len: Option<u64>,
    no_symmetry: bool,
    all_witnesses: bool,
    g: &GlobalOpts,
) -> i32 {
    let ring = match parse_ring(ring_text) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let config = SearchConfig {
        max_length: max_len,
        use_unit_symmetry: !no_symmetry,
        thread_budget: g.threads,
        node_cap: None,
        collect_all_witnesses: all_witnesses,
    };
    if let Some(path) = &g.cache {
        if !all_witnesses {
            match cache_get(path, &ring, m) {
                Ok(lookup) => {
                    if lookup.corrupt_lines > 0 {
                        eprintln!(
                            "warning: ignored {} corrupt cache line(s) in {}",
                            lookup.corrupt_lines,
                            path.display()
                        );
                    }
                    if let Some(out) = lookup.outcome {
                        print_outcome(&out, true, g);
                        return 0;
                    }
                }
                Err(e) => eprintln!("warning: cache read failed: {e}"),
            }
        }
    }
    let out = match compute_d(&ring, m, &config) {
        Ok(out) => out,
        Err(SearchError::NoUpperBound) => {
            return fail("no theorem-backed cap applies to this ring and m; supply --max-len");
        }
        Err(e) => return fail(e),
    };
    if let Some(path) = &g.cache {
        // only settled values are worth remembering
        if out.exhaustive {
            if let Err(e) = cache_put(path, &out) {
                eprintln!("warning: cache write failed: {e}");
            }
        }
    }
    print_outcome(&out, false, g);
    if out.exhaustive {
        0
    } else {
        3
    }
}

pub fn cmd_bounds(ring_text: &str, m: u64, g: &GlobalOpts) -> i32 {
    let ring = match parse_ring(ring_text) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let report = match bounds_report(&ring, m) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if g.json {
        let doc = json!({
            "command": "bounds",
            "ring": ring.to_string(),
            "moduli": ring.moduli(),
            "m": m,
            "lower": report.lower,
            "upper": report.upper,
            "exact": report.exact,
            "contributions": report.contributions,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
        return 0;
    }
    println!("Bounds for D_{}({})", m, ring_label(&ring));
    for c in &report.contributions {
        let kind = match c.kind {
            BoundKind::Lower => "lower",
            BoundKind::Upper => "upper",
            BoundKind::Exact => "exact",
        };
        println!("  {kind:<5} {:>6}  {:<10} {}", c.value, c.tag, c.note);
    }
    let show = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
    println!(
        "  summary: lower {}, upper {}, exact {}",
        show(report.lower),
        show(report.upper),
        show(report.exact)
    );
    0
}

pub fn cmd_check(ring_text: &str, m: u64, seq_text: &str, g: &GlobalOpts) -> i32 {
    let ring = match parse_ring(ring_text) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let seq = match parse_sequence(&ring, seq_text) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let report = match is_m_zero_free(&seq, m) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    let violator_value = report.violator.as_ref().map(|v| elementary_mod(v, m));
    if g.json {
        let doc = json!({
            "command": "check",
            "ring": ring.to_string(),
            "moduli": ring.moduli(),
            "m": m,
            "length": seq.len(),
            "zero_free": report.zero_free,
            "violator": report.violator.as_ref().map(witness_json),
            "violator_e_m": violator_value.as_ref().map(|v| &v.residues),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
    } else {
        println!(
            "sequence of length {} over {}: {}-zero-free: {}",
            seq.len(),
            ring_label(&ring),
            m,
            if report.zero_free { "yes" } else { "no" }
        );
        if let (Some(v), Some(val)) = (&report.violator, &violator_value) {
            println!("  violating sub-multiset (len {}): {v}", v.len());
            println!("  e_{m}(violator) = {val}");
        }
    }
    if report.zero_free {
        0
    } else {
        1
    }
}

pub fn cmd_gn_expand(k: u32, g: &GlobalOpts) -> i32 {
    if k == 0 {
        return fail("k must be >= 1");
    }
    let exp = match expand_e_in_p(k) {
        Ok(e) => e,
        Err(e) => return fail(e),
    };
    let factorial: num_bigint::BigInt = (1..=u64::from(k)).map(num_bigint::BigInt::from).product();
    if g.json {
        let terms: Vec<_> = exp
            .terms
            .iter()
            .map(|(prod, coeff)| {
                let scaled = exp.scaled_terms[prod]
                    .to_i64()
                    .expect("fits i64 for k <= 20");
                json!({
                    "monomial": &prod.0,
                    "rational": coeff.to_string(),
                    "scaled": scaled,
                })
            })
            .collect();
        let doc = json!({
            "command": "gn-expand",
            "k": k,
            "k_factorial": factorial.to_string(),
            "terms": terms,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
        return 0;
    }
    println!(
        "e_{k} in power sums ({} terms, k! = {factorial}):",
        exp.terms.len()
    );
    for (prod, coeff) in &exp.terms {
        let scaled = &exp.scaled_terms[prod];
        println!("  {coeff:>12}  {prod:<20} k!-scaled {scaled}");
    }
    0
}

pub fn cmd_gn_domset(k: u32, g: &GlobalOpts) -> i32 {
    if k == 0 {
        return fail("k must be >= 1");
    }
    let ds = match min_dominating_set(k) {
        Ok(d) => d,
        Err(e) => return fail(e),
    };
    if g.json {
        let doc = json!({
            "command": "gn-domset",
            "k": k,
            "indices": &ds.indices,
            "size": ds.size(),
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
        return 0;
    }
    let indices: Vec<String> = ds.indices.iter().map(|i| format!("p{i}")).collect();
    println!(
        "minimum dominating set for e_{k}: {{{}}}, t({k}) = {}",
        indices.join(", "),
        ds.size()
    );
    0
}

pub fn cmd_verify_table(max_n: Option<u64>, extended: bool, g: &GlobalOpts) -> i32 {
    let max_n = max_n.unwrap_or(if extended {
        TABLE_EXTENDED_MAX_N
    } else {
        TABLE_DEFAULT_MAX_N
    });
    let rows: Vec<(u64, u64)> = D2_TABLE
        .iter()
        .copied()
        .filter(|&(n, _)| n <= max_n && (extended || n <= TABLE_DEFAULT_MAX_N))
        .collect();
    if rows.is_empty() {
        return fail(format!("no table rows with n <= {max_n}"));
    }
    let config = SearchConfig {
        thread_budget: g.threads,
        ..SearchConfig::default()
    };
    let mut results = Vec::new();
    let mut all_pass = true;
    for (n, expected) in rows {
        let ring = RingSpec::new(vec![n]).expect("table moduli are valid");
        match compute_d(&ring, 2, &config) {
            Ok(out) => {
                let pass = out.exhaustive && out.value == expected;
                all_pass &= pass;
                if !g.json {
                    println!(
                        "n={n:<3} D_2={:<3} expected={expected:<3} {}  ({} nodes, {:.3} ms)",
                        out.value,
                        if pass { "PASS" } else { "FAIL" },
                        out.nodes_explored,
                        ms(out.elapsed)
                    );
                }
                results.push(json!({
                    "n": n,
                    "expected": expected,
                    "computed": out.value,
                    "exhaustive": out.exhaustive,
                    "pass": pass,
                    "nodes": out.nodes_explored,
                    "elapsed_ms": ms(out.elapsed),
                }));
            }
            Err(e) => return fail(format!("search failed for n={n}: {e}")),
        }
    }
    if g.json {
        let doc = json!({
            "command": "verify-table",
            "max_n": max_n,
            "extended": extended,
            "rows": results,
            "all_pass": all_pass,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&doc).expect("serializable")
        );
    } else if all_pass {
        println!("all {} rows PASS", results.len());
    } else {
        println!("FAIL: some rows do not match");
    }
    if all_pass {
        0
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_syntax_round_trip() {
        for text in ["2", "6", "2x3", "2x2x2", "12x35", "4294967296"] {
            let ring = parse_ring(text).unwrap();
            assert_eq!(ring.to_string(), text);
        }
        // whitespace around the whole expression is tolerated, inner is not
        assert!(parse_ring(" 6 ").is_ok());
        assert!(parse_ring("2 x3").is_err());
    }

    #[test]
    fn ring_syntax_round_trip_random() {
        let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..500 {
            let parts = 1 + (next() % 4) as usize;
            let moduli: Vec<u64> = (0..parts).map(|_| 2 + next() % 49).collect();
            let text = moduli
                .iter()
                .map(u64::to_string)
                .collect::<Vec<_>>()
                .join("x");
            let ring = parse_ring(&text).unwrap();
            assert_eq!(ring.moduli(), &moduli[..]);
            assert_eq!(ring.to_string(), text);
        }
    }

    #[test]
    fn ring_syntax_rejects_garbage() {
        for text in ["", "0", "1", "4x", "x4", "axb", "2x0", "2xx3", "-3", "6.5"] {
            assert!(parse_ring(text).is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn sequence_parsing_scalars() {
        let ring = parse_ring("7").unwrap();
        let s = parse_sequence(&ring, "1, 1,1 ,1,1,1,4").unwrap();
        assert_eq!(s.len(), 7);
        assert_eq!(s.counts().get(&ring.elem(&[1]).unwrap()), Some(&6));
        assert_eq!(s.counts().get(&ring.elem(&[4]).unwrap()), Some(&1));

        let s = parse_sequence(&ring, "-1, 8").unwrap();
        assert_eq!(s.counts().get(&ring.elem(&[6]).unwrap()), Some(&1));
        assert_eq!(s.counts().get(&ring.elem(&[1]).unwrap()), Some(&1));

        assert!(parse_sequence(&ring, "1,,2").is_err());
        assert!(parse_sequence(&ring, "1,a").is_err());
        assert_eq!(parse_sequence(&ring, "").unwrap().len(), 0);
    }

    #[test]
    fn sequence_parsing_tuples() {
        let ring = parse_ring("2x3").unwrap();
        let s = parse_sequence(&ring, "[1,1],[1,1],[1,1],[0,1]").unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.counts().get(&ring.elem(&[1, 1]).unwrap()), Some(&3));

        let s = parse_sequence(&ring, " [ 1 , 2 ] , [ -1 , 0 ] ").unwrap();
        assert_eq!(s.counts().get(&ring.elem(&[1, 2]).unwrap()), Some(&1));
        assert_eq!(s.counts().get(&ring.elem(&[1, 0]).unwrap()), Some(&1));

        assert!(parse_sequence(&ring, "1,2").is_err()); // needs tuples
        assert!(parse_sequence(&ring, "[1,2").is_err());
        assert!(parse_sequence(&ring, "[1,2][0,1]").is_err());
        assert!(parse_sequence(&ring, "[1,2,3]").is_err()); // wrong width
        assert!(parse_sequence(&ring, "[1]").is_err());

        // bracketed singletons are fine for cyclic rings
        let z5 = parse_ring("5").unwrap();
        let s = parse_sequence(&z5, "[1],[4]").unwrap();
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn table_contents() {
        assert_eq!(D2_TABLE.len(), 16);
        assert_eq!(D2_TABLE[0], (2, 4));
        assert!(D2_TABLE.contains(&(16, 32)));
        assert!(D2_TABLE.contains(&(18, 13)));
        assert!(D2_TABLE.windows(2).all(|w| w[0].0 < w[1].0));
        assert_eq!(
            D2_TABLE
                .iter()
                .filter(|(n, _)| *n <= TABLE_DEFAULT_MAX_N)
                .count(),
            9
        );
    }

    #[test]
    fn cache_path_precedence() {
        let flag = Some(PathBuf::from("/tmp/explicit.jsonl"));
        assert_eq!(resolve_cache_path(flag.clone()), flag);
        // without a flag the environment decides; without either, none.
        // (environment-dependent behavior is exercised in the binary tests)
    }
}
