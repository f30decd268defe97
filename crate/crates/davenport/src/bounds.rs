//! Theorem-backed lower, upper, and exact bounds on the higher-degree
//! Davenport constant `D_m(A)`, aggregated into a report whose every line
//! carries the tag of the result it comes from.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ring::{
    crt_decompositions, gcd, is_prime, prime_power_decomposition, RingError, RingSpec,
};
use crate::symfun::min_dominating_size_closed;

/// Hard cap on binomial-threshold scans; exceeding it signals a bug or an
/// input far outside the intended range.
pub const SCAN_CAP: u64 = 10_000_000;
/// Largest degree m accepted by the bound computations.
pub const MAX_M: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("scan for {0} exceeded {SCAN_CAP} iterations")]
    CapExceeded(&'static str),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("argument out of range: {0}")]
    RangeError(&'static str),
    #[error(transparent)]
    Ring(#[from] RingError),
}

fn check_m(m: u64) -> Result<(), BoundsError> {
    if m == 0 {
        return Err(BoundsError::RangeError("m must be >= 1"));
    }
    if m > MAX_M {
        return Err(BoundsError::RangeError("m exceeds the sequence length cap"));
    }
    Ok(())
}

fn ensure_prime(p: u64) -> Result<(), BoundsError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(BoundsError::NotPrime(p))
    }
}

/// Smallest `t >= m+1` with `C(t, m) == 0 (mod n)`: one more than the longest
/// all-ones sequence over `Z_n` whose every large sub-multiset has a nonzero
/// degree-m elementary symmetric value.
pub fn l_bound(n: u64, m: u64) -> Result<u64, BoundsError> {
    if n < 2 {
        return Err(BoundsError::RangeError("modulus must be >= 2"));
    }
    check_m(m)?;
    let cols = m as usize;
    // row[i] = C(t, i) mod n, maintained incrementally in t
    let mut row = vec![0u64; cols + 1];
    row[0] = 1 % n;
    for t in 1..=SCAN_CAP {
        let hi = cols.min(t as usize);
        for i in (1..=hi).rev() {
            row[i] = (row[i] + row[i - 1]) % n;
        }
        if t >= m + 1 && row[cols] == 0 {
            return Ok(t);
        }
    }
    Err(BoundsError::CapExceeded("l_bound"))
}

/// Closed form `l_bound(p^r, p^s) = p^(r+s)` for prime p.
pub fn l_closed(p: u64, r: u32, s: u32) -> Result<u64, BoundsError> {
    ensure_prime(p)?;
    if r == 0 {
        return Err(BoundsError::RangeError("r must be >= 1 (modulus >= 2)"));
    }
    p.checked_pow(r + s)
        .ok_or(BoundsError::RangeError("p^(r+s) overflows u64"))
}

/// True iff `C(a, b) != 0 (mod p)`, i.e. every base-p digit of b is at most
/// the matching digit of a.
fn binom_nonzero_mod_p(p: u64, a: u64, b: u64) -> bool {
    if b > a {
        return false;
    }
    let (mut a, mut b) = (a, b);
    while b > 0 {
        if b % p > a % p {
            return false;
        }
        a /= p;
        b /= p;
    }
    true
}

/// Smallest `t >= m(q-1)+1` with `C(t-1, m-1) != 0 (mod p)`, for `q = p^alpha`.
/// Always lands in `[m(q-1)+1, mq]`.
pub fn u_cyclic(p: u64, alpha: u32, m: u64) -> Result<u64, BoundsError> {
    ensure_prime(p)?;
    if alpha == 0 {
        return Err(BoundsError::RangeError("alpha must be >= 1"));
    }
    check_m(m)?;
    let q = p
        .checked_pow(alpha)
        .filter(|&q| q <= crate::ring::MAX_CARDINALITY)
        .ok_or(BoundsError::RangeError(
            "p^alpha exceeds the cardinality cap",
        ))?;
    let start = m * (q - 1) + 1;
    for t in start..=m * q {
        if binom_nonzero_mod_p(p, t - 1, m - 1) {
            return Ok(t);
        }
    }
    unreachable!(
        "u_cyclic({p},{alpha},{m}) left its guaranteed window [{start}, {}]",
        m * q
    )
}

/// Product-ring analogue of [`u_cyclic`] for `Z_{p^a1} x ... x Z_{p^ar}`:
/// smallest `t >= m*sum(p^ai - 1) + 1` with `C(t-1, m-1) != 0 (mod p)`.
pub fn u_product(p: u64, alphas: &[u32], m: u64) -> Result<u64, BoundsError> {
    ensure_prime(p)?;
    if alphas.is_empty() {
        return Err(BoundsError::RangeError("alphas must be non-empty"));
    }
    check_m(m)?;
    let mut sum: u64 = 0;
    for &a in alphas {
        if a == 0 {
            return Err(BoundsError::RangeError("alpha must be >= 1"));
        }
        let q = p
            .checked_pow(a)
            .filter(|&q| q <= crate::ring::MAX_CARDINALITY)
            .ok_or(BoundsError::RangeError(
                "p^alpha exceeds the cardinality cap",
            ))?;
        sum = sum
            .checked_add(q - 1)
            .ok_or(BoundsError::RangeError("sum of (p^ai - 1) overflows"))?;
    }
    let start = m * sum + 1;
    for t in start..=m * (sum + 1) {
        if binom_nonzero_mod_p(p, t - 1, m - 1) {
            return Ok(t);
        }
    }
    unreachable!("u_product({p},{alphas:?},{m}) left its guaranteed window")
}

fn big_binom(n: u64, m: u64) -> BigInt {
    if m > n {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..m {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Exact census of the small sub-multiset sizes below m: returns
/// `(E, O, E - O)` where E sums `C(t, 2j)` and O sums `C(t, 2j+1)` over all
/// even/odd sizes `< m`. Asserts the collapse
/// `E - O = (-1)^(m-1) * C(t-1, m-1)`.
pub fn parity_census(t: u64, m: u64) -> (BigInt, BigInt, BigInt) {
    assert!(t >= 1 && m >= 1, "parity_census requires t, m >= 1");
    let mut even = BigInt::zero();
    let mut odd = BigInt::zero();
    for j in 0..m {
        if j % 2 == 0 {
            even += big_binom(t, j);
        } else {
            odd += big_binom(t, j);
        }
    }
    let diff = &even - &odd;
    let expected = if (m - 1) % 2 == 0 {
        big_binom(t - 1, m - 1)
    } else {
        -big_binom(t - 1, m - 1)
    };
    assert_eq!(
        diff, expected,
        "parity census identity failed at t={t} m={m}"
    );
    (even, odd, diff)
}

/// A finite abelian group `Z_{n1} x ... x Z_{nr}` normalized to invariant
/// factors `f_1 | f_2 | ... | f_rank`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    pub moduli: Vec<u64>,
    pub invariant_factors: Vec<u64>,
    pub rank: usize,
    pub d_star: u64,
}

impl GroupSpec {
    pub fn new(moduli: Vec<u64>) -> Result<Self, BoundsError> {
        if moduli.is_empty() {
            return Err(BoundsError::Ring(RingError::EmptyModuli));
        }
        let mut per_prime: std::collections::BTreeMap<u64, Vec<u32>> = Default::default();
        for &n in &moduli {
            if n < 2 {
                return Err(BoundsError::Ring(RingError::ModulusTooSmall(n)));
            }
            for (p, e) in prime_power_decomposition(n) {
                per_prime.entry(p).or_default().push(e);
            }
        }
        for exps in per_prime.values_mut() {
            exps.sort_unstable_by(|a, b| b.cmp(a));
        }
        let rank = per_prime.values().map(|v| v.len()).max().unwrap_or(0);
        let mut invariant_factors = Vec::with_capacity(rank);
        for slot in 0..rank {
            let mut f: u64 = 1;
            for (&p, exps) in &per_prime {
                if let Some(&e) = exps.get(slot) {
                    f = f
                        .checked_mul(p.pow(e))
                        .ok_or(BoundsError::RangeError("invariant factor overflows"))?;
                }
            }
            invariant_factors.push(f);
        }
        invariant_factors.reverse(); // ascending, each dividing the next
        let d_star = invariant_factors.iter().map(|&f| f - 1).sum();
        Ok(GroupSpec {
            moduli,
            invariant_factors,
            rank,
            d_star,
        })
    }

    pub fn is_p_group(&self) -> bool {
        let mut primes = self
            .moduli
            .iter()
            .flat_map(|&n| prime_power_decomposition(n).into_iter().map(|(p, _)| p));
        match primes.next() {
            None => false,
            Some(p0) => primes.all(|p| p == p0),
        }
    }
}

/// Exact classical Davenport constant `D(G) = 1 + d*(G)`, available for
/// p-groups and groups of rank at most 2; `None` otherwise.
pub fn olson_davenport(g: &GroupSpec) -> Option<u64> {
    if g.is_p_group() || g.rank <= 2 {
        Some(1 + g.d_star)
    } else {
        None
    }
}

/// Staircase lower bound `sum_j l_bound(n_j, m) - (b-1)*m` for the product
/// ring with the given moduli.
pub fn lower_direct_product(moduli: &[u64], m: u64) -> Result<u64, BoundsError> {
    if moduli.is_empty() {
        return Err(BoundsError::Ring(RingError::EmptyModuli));
    }
    check_m(m)?;
    let mut total: u64 = 0;
    for &n in moduli {
        total += l_bound(n, m)?;
    }
    Ok(total - (moduli.len() as u64 - 1) * m)
}

/// Upper bound for m = 2 over `Z_n`: `2n - 1` for odd n >= 3, and
/// `2n + n/2^b - 1` with `b = floor((nu_2(n)-1)/2)` for even n whose odd
/// part is at least 3. Absent for powers of two.
pub fn upper_m2(n: u64) -> Result<Option<u64>, BoundsError> {
    if n < 2 {
        return Err(BoundsError::RangeError("modulus must be >= 2"));
    }
    if n % 2 == 1 {
        return Ok(Some(2 * n - 1));
    }
    let nu = n.trailing_zeros();
    let odd_part = n >> nu;
    if odd_part == 1 {
        return Ok(None);
    }
    let b = (nu - 1) / 2;
    Ok(Some(2 * n + (n >> b) - 1))
}

/// Upper bound `D(Z_n^t(m)) + m - 1` for `Z_n` when n has no prime factor
/// <= m (so n is coprime to m!), provided the classical constant of
/// `Z_n^t(m)` is known exactly: rank `t(m) <= 2`, or n a prime power.
pub fn upper_gcd(n: u64, m: u64) -> Result<Option<u64>, BoundsError> {
    if n < 2 {
        return Err(BoundsError::RangeError("modulus must be >= 2"));
    }
    check_m(m)?;
    let spf = prime_power_decomposition(n)[0].0;
    if spf <= m {
        return Ok(None); // gcd(n, m!) > 1
    }
    let t = min_dominating_size_closed(m);
    let prime_power = prime_power_decomposition(n).len() == 1;
    if t > 2 && !prime_power {
        return Ok(None); // D(Z_n^t) not known exactly
    }
    Ok(Some(t * (n - 1) + m))
}

/// Exact value when every modulus is a power of one prime p and m is a power
/// of the same p: `m * (sum(p^ai - 1) + 1)`.
pub fn exact_known(ring: &RingSpec, m: u64) -> Option<u64> {
    single_prime_shape(ring).and_then(|(p, alphas)| {
        let mut rem = m;
        while rem % p == 0 {
            rem /= p;
        }
        if rem != 1 {
            return None;
        }
        let sum: u64 = alphas.iter().map(|&a| p.pow(a) - 1).sum();
        m.checked_mul(sum + 1)
    })
}

/// If every modulus is a power of a single prime p, returns `(p, exponents)`.
fn single_prime_shape(ring: &RingSpec) -> Option<(u64, Vec<u32>)> {
    let mut p0 = None;
    let mut alphas = Vec::with_capacity(ring.width());
    for &n in ring.moduli() {
        let decomposition = prime_power_decomposition(n);
        if decomposition.len() != 1 {
            return None;
        }
        let (p, a) = decomposition[0];
        if *p0.get_or_insert(p) != p {
            return None;
        }
        alphas.push(a);
    }
    p0.map(|p| (p, alphas))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
    Exact,
}

/// One theorem-backed bound with its identifying tag.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundContribution {
    pub tag: String,
    pub kind: BoundKind,
    pub value: u64,
    pub note: String,
}

/// Aggregated bounds for one `(ring, m)` pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundsReport {
    pub ring: RingSpec,
    pub m: u64,
    pub lower: Option<u64>,
    pub upper: Option<u64>,
    pub exact: Option<u64>,
    pub contributions: Vec<BoundContribution>,
}

impl BoundsReport {
    /// Tightest available upper limit (an exact value is also an upper bound).
    pub fn best_upper(&self) -> Option<u64> {
        match (self.upper, self.exact) {
            (Some(u), Some(e)) => Some(u.min(e)),
            (u, e) => u.or(e),
        }
    }
}

fn moduli_string(moduli: &[u64]) -> String {
    moduli
        .iter()
        .map(|n| n.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

/// Computes every applicable bound for `D_m` of the given ring and reduces
/// them to the best lower/upper/exact values.
pub fn bounds_report(ring: &RingSpec, m: u64) -> Result<BoundsReport, BoundsError> {
    check_m(m)?;
    let mut contributions = Vec::new();

    // Lower bounds: the staircase construction over the ring's own moduli,
    // and over every coprime refinement when the ring is cyclic.
    if ring.width() == 1 {
        let n = ring.moduli()[0];
        for dec in crt_decompositions(n)? {
            let value = lower_direct_product(&dec, m)?;
            let (tag, note) = if dec.len() == 1 {
                (
                    "Eq.(1)".to_string(),
                    format!("all-ones sequence over Z_{n}"),
                )
            } else {
                (
                    "Thm 3.4".to_string(),
                    format!("staircase over Z_{}", moduli_string(&dec)),
                )
            };
            contributions.push(BoundContribution {
                tag,
                kind: BoundKind::Lower,
                value,
                note,
            });
        }
    } else {
        let value = lower_direct_product(ring.moduli(), m)?;
        contributions.push(BoundContribution {
            tag: "Thm 3.4".to_string(),
            kind: BoundKind::Lower,
            value,
            note: format!("staircase over Z_{}", moduli_string(ring.moduli())),
        });
    }

    // Upper bounds for single-prime rings.
    if let Some((p, alphas)) = single_prime_shape(ring) {
        let (tag, value) = if ring.width() == 1 {
            ("Thm 2.2".to_string(), u_cyclic(p, alphas[0], m)?)
        } else {
            ("Thm 3.1".to_string(), u_product(p, &alphas, m)?)
        };
        contributions.push(BoundContribution {
            tag,
            kind: BoundKind::Upper,
            value,
            note: format!("first non-vanishing binomial window, p={p}"),
        });
        let sum: u64 = alphas.iter().map(|&a| p.pow(a) - 1).sum();
        if let Some(value) = m.checked_mul(sum + 1) {
            contributions.push(BoundContribution {
                tag: "Cor 3.2".to_string(),
                kind: BoundKind::Upper,
                value,
                note: "m times the classical constant of the additive p-group".to_string(),
            });
        }
    }

    // Cyclic-ring upper bounds, applicable whenever the moduli are pairwise
    // coprime (the ring is then isomorphic to Z_N).
    let pairwise_coprime = {
        let ms = ring.moduli();
        (0..ms.len()).all(|i| (i + 1..ms.len()).all(|j| gcd(ms[i], ms[j]) == 1))
    };
    if pairwise_coprime {
        let n = ring.cardinality();
        let via = if ring.width() == 1 {
            String::new()
        } else {
            format!(" via Z_{n} (coprime product)")
        };
        if m == 2 {
            if let Some(value) = upper_m2(n)? {
                let (tag, note) = if n % 2 == 1 {
                    ("Thm 4.3(1)".to_string(), format!("2n-1 for odd n{via}"))
                } else {
                    let b = (n.trailing_zeros() - 1) / 2;
                    (
                        "Thm 4.3(2)".to_string(),
                        format!("2n + n/2^{b} - 1 for even n{via}"),
                    )
                };
                contributions.push(BoundContribution {
                    tag,
                    kind: BoundKind::Upper,
                    value,
                    note,
                });
            }
        }
        if let Some(value) = upper_gcd(n, m)? {
            contributions.push(BoundContribution {
                tag: "Thm 4.4".to_string(),
                kind: BoundKind::Upper,
                value,
                note: format!(
                    "classical constant of a rank-{} group plus m-1{via}",
                    min_dominating_size_closed(m)
                ),
            });
        }
    }

    // Exact values.
    if let Some(value) = exact_known(ring, m) {
        let tag = if ring.width() == 1 {
            "Thm 2.5"
        } else {
            "Thm 3.6"
        };
        contributions.push(BoundContribution {
            tag: tag.to_string(),
            kind: BoundKind::Exact,
            value,
            note: "prime-power degree over a p-group ring".to_string(),
        });
    }
    if m == 1 {
        let g = GroupSpec::new(ring.moduli().to_vec())?;
        if let Some(value) = olson_davenport(&g) {
            contributions.push(BoundContribution {
                tag: "Thm 1.1".to_string(),
                kind: BoundKind::Exact,
                value,
                note: "classical Davenport constant, 1 + d*(G)".to_string(),
            });
        }
    }

    let lower = contributions
        .iter()
        .filter(|c| c.kind == BoundKind::Lower)
        .map(|c| c.value)
        .max();
    let upper = contributions
        .iter()
        .filter(|c| c.kind == BoundKind::Upper)
        .map(|c| c.value)
        .min();
    let exacts: Vec<u64> = contributions
        .iter()
        .filter(|c| c.kind == BoundKind::Exact)
        .map(|c| c.value)
        .collect();
    assert!(
        exacts.windows(2).all(|w| w[0] == w[1]),
        "conflicting exact values for {ring} m={m}: {exacts:?}"
    );
    let mut exact = exacts.first().copied();
    if exact.is_none() && lower.is_some() && lower == upper {
        exact = lower;
    }
    if let (Some(lo), Some(e)) = (lower, exact) {
        assert!(
            lo <= e,
            "lower bound {lo} exceeds exact value {e} for {ring} m={m}"
        );
    }
    if let (Some(e), Some(up)) = (exact, upper) {
        assert!(
            e <= up,
            "exact value {e} exceeds upper bound {up} for {ring} m={m}"
        );
    }
    if let (Some(lo), Some(up)) = (lower, upper) {
        assert!(
            lo <= up,
            "lower bound {lo} exceeds upper bound {up} for {ring} m={m}"
        );
    }

    Ok(BoundsReport {
        ring: ring.clone(),
        m,
        lower,
        upper,
        exact,
        contributions,
    })
}
