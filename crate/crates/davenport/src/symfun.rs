//! Elementary symmetric functions of ring-element multisets, power sums,
//! the Girard-Newton expansion of `e_k` in power sums, and minimum
//! dominating (hitting) sets over that expansion's monomials.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use thiserror::Error;

use crate::ring::{RingElem, RingError, RingSpec};

/// Longest accepted multiset (total multiplicity).
pub const MAX_SEQ_LEN: u64 = 1 << 16;
/// Longest multiset accepted by [`elementary_bruteforce`].
pub const MAX_BRUTEFORCE_LEN: u64 = 20;
/// Largest degree accepted by [`expand_e_in_p`] and [`min_dominating_set`].
pub const MAX_EXPANSION_DEGREE: u32 = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymfunError {
    #[error(
        "multiset of length {0} is too large for brute-force evaluation (max {MAX_BRUTEFORCE_LEN})"
    )]
    TooLarge(u64),
    #[error("expansion degree {0} exceeds {MAX_EXPANSION_DEGREE}")]
    DegreeTooLarge(u32),
    #[error("multiset length would exceed {MAX_SEQ_LEN}")]
    LengthCapExceeded,
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A finite multiset of ring elements, stored as element -> multiplicity
/// with elements kept in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultisetSeq {
    ring: RingSpec,
    counts: BTreeMap<RingElem, u64>,
    len: u64,
}

impl MultisetSeq {
    pub fn new(ring: RingSpec) -> Self {
        MultisetSeq {
            ring,
            counts: BTreeMap::new(),
            len: 0,
        }
    }

    pub fn from_elems(ring: RingSpec, elems: &[RingElem]) -> Result<Self, SymfunError> {
        let mut s = MultisetSeq::new(ring);
        for e in elems {
            s.insert(e.clone(), 1)?;
        }
        Ok(s)
    }

    /// Adds `count` copies of `elem`.
    pub fn insert(&mut self, elem: RingElem, count: u64) -> Result<(), SymfunError> {
        self.ring.validate(&elem)?;
        if count == 0 {
            return Ok(());
        }
        if self.len + count > MAX_SEQ_LEN {
            return Err(SymfunError::LengthCapExceeded);
        }
        self.len += count;
        *self.counts.entry(elem).or_insert(0) += count;
        Ok(())
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    /// Total multiplicity.
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn counts(&self) -> &BTreeMap<RingElem, u64> {
        &self.counts
    }

    /// (element, multiplicity) pairs in element order.
    pub fn pairs(&self) -> Vec<(RingElem, u64)> {
        self.counts.iter().map(|(e, &c)| (e.clone(), c)).collect()
    }

    /// The multiset written out as a flat element list, in element order.
    pub fn expanded(&self) -> Vec<RingElem> {
        let mut out = Vec::with_capacity(self.len as usize);
        for (e, &c) in &self.counts {
            for _ in 0..c {
                out.push(e.clone());
            }
        }
        out
    }

    /// The multiset `u * self` (every element scaled by `u`).
    pub fn scale(&self, u: &RingElem) -> Result<Self, SymfunError> {
        let mut s = MultisetSeq::new(self.ring.clone());
        for (e, &c) in &self.counts {
            s.insert(self.ring.mul(u, e)?, c)?;
        }
        Ok(s)
    }
}

impl std::fmt::Display for MultisetSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.counts.is_empty() {
            return write!(f, "(empty)");
        }
        for (i, (e, c)) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if *c == 1 {
                write!(f, "{e}")?;
            } else {
                write!(f, "{e}*{c}")?;
            }
        }
        Ok(())
    }
}

/// Multiplies the truncated polynomial `f` (degrees 0..=m, `b` coordinates,
/// layout `f[d*b + j]`) by `1 + a*x` componentwise.
pub(crate) fn trunc_mul_linear(f: &mut [u64], b: usize, m: usize, a: &[u64], moduli: &[u64]) {
    for d in (1..=m).rev() {
        for j in 0..b {
            let n = moduli[j];
            f[d * b + j] = (f[d * b + j] + a[j] * f[(d - 1) * b + j]) % n;
        }
    }
}

/// Degree-m elementary symmetric function of the multiset, computed per
/// coordinate as the x^m coefficient of `prod (1 + a*x)^{count}` truncated
/// at degree m. Returns zero when `|S| < m`.
pub fn elementary_mod(s: &MultisetSeq, m: u64) -> RingElem {
    assert!(m >= 1, "elementary_mod requires m >= 1");
    let ring = s.ring();
    if s.len() < m {
        return ring.zero();
    }
    let b = ring.width();
    let moduli = ring.moduli();
    let m = m as usize;
    let mut f = vec![0u64; (m + 1) * b];
    for j in 0..b {
        f[j] = 1 % moduli[j];
    }
    for (e, &c) in s.counts() {
        for _ in 0..c {
            trunc_mul_linear(&mut f, b, m, &e.residues, moduli);
        }
    }
    RingElem {
        residues: f[m * b..].to_vec(),
    }
}

/// Reference evaluation of the degree-m elementary symmetric function by
/// summing products over all m-element position subsets. Quadratic-to-
/// exponential; only for cross-checking on short multisets.
pub fn elementary_bruteforce(s: &MultisetSeq, m: u64) -> Result<RingElem, SymfunError> {
    assert!(m >= 1, "elementary_bruteforce requires m >= 1");
    if s.len() > MAX_BRUTEFORCE_LEN {
        return Err(SymfunError::TooLarge(s.len()));
    }
    let ring = s.ring().clone();
    if s.len() < m {
        return Ok(ring.zero());
    }
    let items = s.expanded();
    let mut acc = ring.zero();
    fn rec(
        ring: &RingSpec,
        items: &[RingElem],
        start: usize,
        left: u64,
        partial: &RingElem,
        acc: &mut RingElem,
    ) {
        if left == 0 {
            *acc = ring.add(acc, partial).expect("same ring");
            return;
        }
        for i in start..items.len() {
            if ((items.len() - i) as u64) < left {
                break;
            }
            let next = ring.mul(partial, &items[i]).expect("same ring");
            rec(ring, items, i + 1, left - 1, &next, acc);
        }
    }
    let one = ring.one();
    rec(&ring, &items, 0, m, &one, &mut acc);
    Ok(acc)
}

/// Power sum `p_k(S) = sum over S of a^k` (with multiplicity).
pub fn power_sum(s: &MultisetSeq, k: u64) -> RingElem {
    assert!(k >= 1, "power_sum requires k >= 1");
    let ring = s.ring();
    let moduli = ring.moduli();
    let mut residues = vec![0u64; ring.width()];
    for (e, &c) in s.counts() {
        for (j, (&a, &n)) in e.residues.iter().zip(moduli).enumerate() {
            residues[j] = (residues[j] + (c % n) * pow_mod(a, k, n)) % n;
        }
    }
    RingElem { residues }
}

fn pow_mod(mut base: u64, mut exp: u64, n: u64) -> u64 {
    let mut acc = 1 % n;
    base %= n;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % n;
        }
        base = base * base % n;
        exp >>= 1;
    }
    acc
}

/// Verifies the Girard-Newton identity
/// `k*e_k = sum_{i=1}^{k} (-1)^{i-1} e_{k-i} p_i` in the ring.
pub fn newton_check(s: &MultisetSeq, k: u64) -> bool {
    assert!(k >= 1, "newton_check requires k >= 1");
    let ring = s.ring();
    let e = |j: u64| {
        if j == 0 {
            ring.one()
        } else {
            elementary_mod(s, j)
        }
    };
    let lhs = ring
        .scalar_mul(k, &elementary_mod(s, k))
        .expect("same ring");
    let mut rhs = ring.zero();
    for i in 1..=k {
        let term = ring.mul(&e(k - i), &power_sum(s, i)).expect("same ring");
        let term = if i % 2 == 1 {
            term
        } else {
            ring.neg(&term).expect("same ring")
        };
        rhs = ring.add(&rhs, &term).expect("same ring");
    }
    lhs == rhs
}

/// A monomial in power sums: sorted `(i, j_i)` pairs with `j_i >= 1`,
/// standing for `prod p_i^{j_i}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PowerProduct(pub Vec<(u32, u32)>);

impl PowerProduct {
    /// Total weight `sum i * j_i`.
    pub fn weight(&self) -> u64 {
        self.0.iter().map(|&(i, j)| i as u64 * j as u64).sum()
    }

    /// Indices i with `j_i >= 1`.
    pub fn support(&self) -> Vec<u32> {
        self.0.iter().map(|&(i, _)| i).collect()
    }
}

impl std::fmt::Display for PowerProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (idx, &(i, j)) in self.0.iter().enumerate() {
            if idx > 0 {
                write!(f, " ")?;
            }
            if j == 1 {
                write!(f, "p{i}")?;
            } else {
                write!(f, "p{i}^{j}")?;
            }
        }
        Ok(())
    }
}

/// The expansion of `e_k` as a rational polynomial in power sums:
/// `e_k = sum_terms coeff * prod p_i^{j_i}` where the sum runs over all
/// solutions of `j_1 + 2 j_2 + ... + k j_k = k` and
/// `coeff = (-1)^k * prod (-1)^{j_i} / (j_i! * i^{j_i})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerSumExpansion {
    pub k: u32,
    pub terms: BTreeMap<PowerProduct, BigRational>,
    /// The same coefficients scaled by k!, which makes them integers.
    pub scaled_terms: BTreeMap<PowerProduct, BigInt>,
}

fn factorial(n: u32) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n as u64 {
        acc *= i;
    }
    acc
}

/// Expands `e_k` in power sums with exact rational coefficients.
pub fn expand_e_in_p(k: u32) -> Result<PowerSumExpansion, SymfunError> {
    assert!(k >= 1, "expand_e_in_p requires k >= 1");
    if k > MAX_EXPANSION_DEGREE {
        return Err(SymfunError::DegreeTooLarge(k));
    }
    let mut terms = BTreeMap::new();
    let mut exps: Vec<(u32, u32)> = Vec::new();
    // choose j_i for i = k down to 1 with the remaining weight
    fn rec(
        i: u32,
        remaining: u32,
        k: u32,
        exps: &mut Vec<(u32, u32)>,
        terms: &mut BTreeMap<PowerProduct, BigRational>,
    ) {
        if remaining == 0 {
            let mut key: Vec<(u32, u32)> = exps.clone();
            key.sort_unstable();
            let mut denom = BigInt::one();
            let mut sign_flips = k;
            for &(i, j) in &key {
                denom *= factorial(j) * BigInt::from(i).pow(j);
                sign_flips += j;
            }
            let num = if sign_flips % 2 == 0 {
                BigInt::one()
            } else {
                -BigInt::one()
            };
            terms.insert(PowerProduct(key), BigRational::new(num, denom));
            return;
        }
        if i == 0 {
            return;
        }
        let max_j = remaining / i;
        for j in 0..=max_j {
            if j > 0 {
                exps.push((i, j));
            }
            rec(i - 1, remaining - i * j, k, exps, terms);
            if j > 0 {
                exps.pop();
            }
        }
    }
    rec(k, k, k, &mut exps, &mut terms);

    let kfact = factorial(k);
    let mut scaled_terms = BTreeMap::new();
    for (key, coeff) in &terms {
        let scaled = coeff * BigRational::from_integer(kfact.clone());
        assert!(scaled.is_integer(), "k! * coefficient must be an integer");
        scaled_terms.insert(key.clone(), scaled.to_integer());
    }
    Ok(PowerSumExpansion {
        k,
        terms,
        scaled_terms,
    })
}

/// A minimum hitting set over the monomials of the degree-k expansion:
/// the indices of a smallest set of power sums meeting every monomial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominatingSet {
    pub k: u32,
    pub indices: Vec<u32>,
}

impl DominatingSet {
    pub fn size(&self) -> usize {
        self.indices.len()
    }
}

/// Finds the minimum dominating set for degree k by exhaustive search over
/// index subsets, smallest size first, ties broken by lexicographic order
/// of the sorted index list.
pub fn min_dominating_set(k: u32) -> Result<DominatingSet, SymfunError> {
    let expansion = expand_e_in_p(k)?;
    let supports: Vec<Vec<u32>> = expansion.terms.keys().map(|t| t.support()).collect();
    for size in 1..=k {
        let mut chosen: Vec<u32> = Vec::with_capacity(size as usize);
        if pick(1, k, size, &mut chosen, &supports) {
            return Ok(DominatingSet { k, indices: chosen });
        }
    }
    unreachable!("the full index set always dominates");

    // lexicographically first combination that hits every support
    fn pick(from: u32, k: u32, left: u32, chosen: &mut Vec<u32>, supports: &[Vec<u32>]) -> bool {
        if left == 0 {
            return supports
                .iter()
                .all(|s| s.iter().any(|i| chosen.contains(i)));
        }
        for i in from..=(k - left + 1) {
            chosen.push(i);
            if pick(i + 1, k, left - 1, chosen, supports) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

/// Closed form for the minimum dominating set size: `(k+2)/2` for even k,
/// `(k+1)/2` for odd k.
pub fn min_dominating_size_closed(k: u64) -> u64 {
    if k % 2 == 0 {
        (k + 2) / 2
    } else {
        (k + 1) / 2
    }
}
