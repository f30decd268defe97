//! Deliberately naive reference implementation used to cross-check the
//! pruned search. It shares no code with the library: elements are raw
//! residue vectors, every count vector over every element (zero included)
//! is enumerated, m-zero-freeness is decided by expanding every
//! sub-multiset, and e_m is a literal sum over all m-element index subsets.

/// Longest m-zero-free length over the given ring among multisets of
/// length at most `cap`, plus whether that maximum is settled (i.e. it was
/// found strictly below the cap, so every longer multiset was refuted).
pub fn naive_best(moduli: &[u64], m: usize, cap: usize) -> (u64, bool) {
    let card: u64 = moduli.iter().product();
    let elems: Vec<Vec<u64>> = (0..card)
        .map(|i| {
            let mut rest = i;
            moduli
                .iter()
                .map(|&n| {
                    let r = rest % n;
                    rest /= n;
                    r
                })
                .collect()
        })
        .collect();
    let mut counts = vec![0usize; elems.len()];
    let mut best = 0usize;
    gen_counts(&mut counts, 0, cap, &mut best, m, &elems, moduli);
    (best as u64, best < cap)
}

fn gen_counts(
    counts: &mut Vec<usize>,
    slot: usize,
    budget: usize,
    best: &mut usize,
    m: usize,
    elems: &[Vec<u64>],
    moduli: &[u64],
) {
    if slot == counts.len() {
        let len: usize = counts.iter().sum();
        if len > *best && zero_free(counts, m, elems, moduli) {
            *best = len;
        }
        return;
    }
    for c in 0..=budget {
        counts[slot] = c;
        gen_counts(counts, slot + 1, budget - c, best, m, elems, moduli);
    }
    counts[slot] = 0;
}

/// True iff no sub-multiset of size >= m has e_m = 0.
fn zero_free(counts: &[usize], m: usize, elems: &[Vec<u64>], moduli: &[u64]) -> bool {
    let mut sub = vec![0usize; counts.len()];
    loop {
        let size: usize = sub.iter().sum();
        if size >= m {
            let mut list = Vec::with_capacity(size);
            for (i, &c) in sub.iter().enumerate() {
                for _ in 0..c {
                    list.push(i);
                }
            }
            if e_m_of(&list, m, elems, moduli).iter().all(|&r| r == 0) {
                return false;
            }
        }
        // odometer over sub-vectors bounded by counts
        let mut i = 0;
        loop {
            if i == sub.len() {
                return true;
            }
            if sub[i] < counts[i] {
                sub[i] += 1;
                break;
            }
            sub[i] = 0;
            i += 1;
        }
    }
}

/// e_m of the listed elements: sum over every m-element index combination
/// of the coordinatewise product.
fn e_m_of(list: &[usize], m: usize, elems: &[Vec<u64>], moduli: &[u64]) -> Vec<u64> {
    let w = moduli.len();
    let mut total = vec![0u64; w];
    debug_assert!(m >= 1 && list.len() >= m);
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let mut prod = vec![1u64; w];
        for &i in &idx {
            for (j, v) in prod.iter_mut().enumerate() {
                *v = *v * elems[list[i]][j] % moduli[j];
            }
        }
        for (j, v) in total.iter_mut().enumerate() {
            *v = (*v + prod[j]) % moduli[j];
        }
        // next combination in lexicographic order
        let mut k = m;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            if idx[k] != k + list.len() - m {
                idx[k] += 1;
                for t in k + 1..m {
                    idx[t] = idx[t - 1] + 1;
                }
                break;
            }
        }
    }
}
