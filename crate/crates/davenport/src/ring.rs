//! Finite commutative rings of the form `Z_{n1} x ... x Z_{nb}` with
//! componentwise arithmetic, plus the p-adic digit toolkit (valuations,
//! carry counts, binomial coefficients modulo n) used by the bound
//! computations.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest ring cardinality accepted by [`RingSpec::new`].
pub const MAX_CARDINALITY: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RingError {
    #[error("moduli list is empty")]
    EmptyModuli,
    #[error("modulus {0} is smaller than 2")]
    ModulusTooSmall(u64),
    #[error("ring cardinality exceeds {MAX_CARDINALITY}")]
    CardinalityTooLarge,
    #[error("element does not belong to this ring")]
    RingMismatch,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("argument out of range: {0}")]
    RangeError(&'static str),
}

/// An element of a product ring, stored as one reduced residue per factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RingElem {
    pub residues: Vec<u64>,
}

impl RingElem {
    pub fn is_zero(&self) -> bool {
        self.residues.iter().all(|&r| r == 0)
    }
}

impl std::fmt::Display for RingElem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.residues.len() == 1 {
            write!(f, "{}", self.residues[0])
        } else {
            write!(f, "[")?;
            for (i, r) in self.residues.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{r}")?;
            }
            write!(f, "]")
        }
    }
}

/// The ring `Z_{n1} x ... x Z_{nb}`, fixed by its list of moduli.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingSpec {
    moduli: Vec<u64>,
    cardinality: u64,
}

impl RingSpec {
    /// Builds a ring from its moduli. Each modulus must be at least 2 and
    /// the product of all moduli must not exceed [`MAX_CARDINALITY`].
    pub fn new(moduli: Vec<u64>) -> Result<Self, RingError> {
        if moduli.is_empty() {
            return Err(RingError::EmptyModuli);
        }
        let mut cardinality: u64 = 1;
        for &n in &moduli {
            if n < 2 {
                return Err(RingError::ModulusTooSmall(n));
            }
            cardinality = cardinality
                .checked_mul(n)
                .filter(|&c| c <= MAX_CARDINALITY)
                .ok_or(RingError::CardinalityTooLarge)?;
        }
        Ok(RingSpec {
            moduli,
            cardinality,
        })
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    /// Number of factors in the product.
    pub fn width(&self) -> usize {
        self.moduli.len()
    }

    pub fn cardinality(&self) -> u64 {
        self.cardinality
    }

    pub fn zero(&self) -> RingElem {
        RingElem {
            residues: vec![0; self.moduli.len()],
        }
    }

    pub fn one(&self) -> RingElem {
        RingElem {
            residues: vec![1; self.moduli.len()],
        }
    }

    /// Builds an element by reducing each entry modulo the matching modulus.
    pub fn elem(&self, entries: &[i64]) -> Result<RingElem, RingError> {
        if entries.len() != self.moduli.len() {
            return Err(RingError::RingMismatch);
        }
        let residues = entries
            .iter()
            .zip(&self.moduli)
            .map(|(&v, &n)| v.rem_euclid(n as i64) as u64)
            .collect();
        Ok(RingElem { residues })
    }

    /// Checks that `a` is a reduced element of this ring.
    pub fn validate(&self, a: &RingElem) -> Result<(), RingError> {
        if a.residues.len() != self.moduli.len()
            || a.residues.iter().zip(&self.moduli).any(|(&r, &n)| r >= n)
        {
            return Err(RingError::RingMismatch);
        }
        Ok(())
    }

    fn check(&self, a: &RingElem) -> Result<(), RingError> {
        self.validate(a)
    }

    pub fn add(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, RingError> {
        self.check(a)?;
        self.check(b)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| (x + y) % n)
            .collect();
        Ok(RingElem { residues })
    }

    pub fn mul(&self, a: &RingElem, b: &RingElem) -> Result<RingElem, RingError> {
        self.check(a)?;
        self.check(b)?;
        let residues = a
            .residues
            .iter()
            .zip(&b.residues)
            .zip(&self.moduli)
            .map(|((&x, &y), &n)| x * y % n)
            .collect();
        Ok(RingElem { residues })
    }

    pub fn neg(&self, a: &RingElem) -> Result<RingElem, RingError> {
        self.check(a)?;
        let residues = a
            .residues
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &n)| (n - x) % n)
            .collect();
        Ok(RingElem { residues })
    }

    /// Scalar multiple `k * a` (k reduced per coordinate).
    pub fn scalar_mul(&self, k: u64, a: &RingElem) -> Result<RingElem, RingError> {
        self.check(a)?;
        let residues = a
            .residues
            .iter()
            .zip(&self.moduli)
            .map(|(&x, &n)| (k % n) * x % n)
            .collect();
        Ok(RingElem { residues })
    }

    /// A unit is an element whose every residue is coprime to its modulus.
    pub fn is_unit(&self, a: &RingElem) -> Result<bool, RingError> {
        self.check(a)?;
        Ok(a.residues
            .iter()
            .zip(&self.moduli)
            .all(|(&r, &n)| gcd(r, n) == 1))
    }

    /// The element at `index` in lexicographic order of residue tuples.
    pub fn elem_at(&self, index: u64) -> RingElem {
        assert!(index < self.cardinality, "element index out of range");
        let mut idx = index;
        let mut residues = vec![0; self.moduli.len()];
        for (slot, &n) in residues.iter_mut().zip(&self.moduli).rev() {
            *slot = idx % n;
            idx /= n;
        }
        RingElem { residues }
    }

    pub fn index_of(&self, a: &RingElem) -> Result<u64, RingError> {
        self.check(a)?;
        let mut idx = 0;
        for (&r, &n) in a.residues.iter().zip(&self.moduli) {
            idx = idx * n + r;
        }
        Ok(idx)
    }

    /// All elements in lexicographic order of residue tuples.
    pub fn elements(&self) -> impl Iterator<Item = RingElem> + '_ {
        (0..self.cardinality).map(|i| self.elem_at(i))
    }

    /// All units in lexicographic order.
    pub fn units(&self) -> Vec<RingElem> {
        self.elements()
            .filter(|e| self.is_unit(e).expect("element from own ring"))
            .collect()
    }
}

impl std::fmt::Display for RingSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, n) in self.moduli.iter().enumerate() {
            if i > 0 {
                write!(f, "x")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

/// Deterministic trial-division primality test.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    if n % 3 == 0 {
        return n == 3;
    }
    let mut d = 5u64;
    while d.checked_mul(d).is_some_and(|sq| sq <= n) {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

fn ensure_prime(p: u64) -> Result<(), RingError> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(RingError::NotPrime(p))
    }
}

/// Base-p expansion of a non-negative integer, least significant digit first,
/// together with its digit sum and p-adic valuation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PAdic {
    pub p: u64,
    pub n: u64,
    pub digits: Vec<u64>,
    pub digit_sum: u64,
    pub valuation: u32,
}

impl PAdic {
    pub fn new(p: u64, n: u64) -> Result<Self, RingError> {
        ensure_prime(p)?;
        let mut digits = Vec::new();
        let mut v = n;
        while v > 0 {
            digits.push(v % p);
            v /= p;
        }
        let digit_sum = digits.iter().sum();
        let valuation = digits.iter().take_while(|&&d| d == 0).count() as u32;
        Ok(PAdic {
            p,
            n,
            digits,
            digit_sum,
            valuation,
        })
    }
}

/// p-adic valuation of a positive integer.
pub fn nu_p(p: u64, n: u64) -> Result<u32, RingError> {
    ensure_prime(p)?;
    if n == 0 {
        return Err(RingError::RangeError("nu_p requires n >= 1"));
    }
    let mut v = 0;
    let mut n = n;
    while n % p == 0 {
        v += 1;
        n /= p;
    }
    Ok(v)
}

/// Base-p digit sum of a non-negative integer.
pub fn s_p(p: u64, n: u64) -> Result<u64, RingError> {
    ensure_prime(p)?;
    let mut sum = 0;
    let mut n = n;
    while n > 0 {
        sum += n % p;
        n /= p;
    }
    Ok(sum)
}

/// Number of carries when adding a and b in base p.
pub fn carry_count(p: u64, a: u64, b: u64) -> Result<u32, RingError> {
    ensure_prime(p)?;
    let (mut a, mut b) = (a, b);
    let mut carry = 0u64;
    let mut carries = 0u32;
    while a > 0 || b > 0 || carry > 0 {
        let s = a % p + b % p + carry;
        carry = s / p;
        if carry > 0 {
            carries += 1;
        }
        a /= p;
        b /= p;
    }
    Ok(carries)
}

/// `nu_p(n!)` via the digit-sum form `(n - s_p(n)) / (p - 1)`.
pub fn factorial_valuation(p: u64, n: u64) -> Result<u64, RingError> {
    let s = s_p(p, n)?;
    Ok((n - s) / (p - 1))
}

/// `nu_p(C(n, m))` via digit sums: `(s_p(m) + s_p(n-m) - s_p(n)) / (p - 1)`.
pub fn binom_valuation(p: u64, n: u64, m: u64) -> Result<u64, RingError> {
    if m > n {
        return Err(RingError::RangeError("binom_valuation requires m <= n"));
    }
    let v = (s_p(p, m)? + s_p(p, n - m)? - s_p(p, n)?) / (p - 1);
    debug_assert_eq!(v as u32, carry_count(p, m, n - m).unwrap());
    Ok(v)
}

/// `C(t, m) mod n` by the Pascal recurrence on a row truncated at column m.
pub fn binom_mod(t: u64, m: u64, n: u64) -> Result<u64, RingError> {
    if n < 2 {
        return Err(RingError::ModulusTooSmall(n));
    }
    if m > t {
        return Ok(0);
    }
    let m = m as usize;
    // row[i] = C(cur, i) mod n, columns 0..=m only
    let mut row = vec![0u64; m + 1];
    row[0] = 1 % n;
    for cur in 1..=t {
        let hi = m.min(cur as usize);
        for i in (1..=hi).rev() {
            row[i] = (row[i] + row[i - 1]) % n;
        }
    }
    Ok(row[m])
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Prime-power factorization `n = p1^e1 * ...` with ascending primes.
pub fn prime_power_decomposition(n: u64) -> Vec<(u64, u32)> {
    factorize(n)
}

/// All factorizations of n into pairwise coprime factors >= 2.
///
/// Each factorization lists its factors in ascending order; the list of
/// factorizations is sorted by factor count, then lexicographically.
/// Since coprime factors cannot split a prime power, these correspond to
/// set partitions of the prime-power components of n.
pub fn crt_decompositions(n: u64) -> Result<Vec<Vec<u64>>, RingError> {
    if n < 2 {
        return Err(RingError::ModulusTooSmall(n));
    }
    let parts: Vec<u64> = factorize(n).into_iter().map(|(p, e)| p.pow(e)).collect();
    let mut blocks: Vec<u64> = Vec::new();
    let mut out: Vec<Vec<u64>> = Vec::new();
    fn place(parts: &[u64], i: usize, blocks: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i == parts.len() {
            let mut factors = blocks.clone();
            factors.sort_unstable();
            out.push(factors);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] *= parts[i];
            place(parts, i + 1, blocks, out);
            blocks[b] /= parts[i];
        }
        blocks.push(parts[i]);
        place(parts, i + 1, blocks, out);
        blocks.pop();
    }
    place(&parts, 0, &mut blocks, &mut out);
    out.sort_unstable_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}
