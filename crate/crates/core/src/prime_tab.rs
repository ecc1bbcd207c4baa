//! Counting monic irreducible polynomials over `F_q`.
//!
//! The number `π_q(d)` of monic irreducibles of degree `d` is recovered from
//! Gauss's identity `Σ_{d|n} d·π_q(d) = q^n` by Möbius inversion.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::scalar::Real;
use crate::{Error, Result};

/// Largest degree accepted by [`prime_counts`].
pub const MAX_TABLE_DEGREE: usize = 20_000;

/// Möbius function `μ(m)`, by trial division. `m` must be positive.
pub fn mobius(m: u64) -> i8 {
    assert!(m >= 1, "mobius is defined on positive integers");
    let mut m = m;
    let mut sign = 1i8;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return 0;
            }
            sign = -sign;
        }
        p += 1;
    }
    if m > 1 {
        sign = -sign;
    }
    sign
}

/// Returns `(p, e)` with `q = p^e`, `p` prime, or `None`.
pub fn is_prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= q {
        if q % p == 0 {
            break;
        }
        p += 1;
    }
    if p * p > q {
        // no factor up to sqrt(q): q is prime
        return Some((q, 1));
    }
    let mut rest = q;
    let mut e = 0;
    while rest % p == 0 {
        rest /= p;
        e += 1;
    }
    (rest == 1).then_some((p, e))
}

/// Validates `q` as a prime power, returning its decomposition.
pub fn check_prime_power(q: u64) -> Result<(u64, u32)> {
    is_prime_power(q).ok_or_else(|| Error::not_prime_power(q))
}

/// Positive divisors of `m` in increasing order.
pub fn divisors(m: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d * d <= m {
        if m % d == 0 {
            small.push(d);
            if d * d != m {
                large.push(m / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Divisor lists for every `m ≤ limit`, built by a sieve. Entry 0 is empty.
pub(crate) fn divisor_table(limit: usize) -> Vec<Vec<u32>> {
    let mut table = vec![Vec::new(); limit + 1];
    for d in 1..=limit {
        for m in (d..=limit).step_by(d) {
            table[m].push(d as u32);
        }
    }
    table
}

/// Exact counts `π_q(d)` for `1 ≤ d ≤ d_max`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeCountTable {
    q: u64,
    /// `counts[d]` for `d ≥ 1`; `counts[0]` is unused and zero.
    counts: Vec<BigUint>,
}

impl PrimeCountTable {
    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d_max(&self) -> usize {
        self.counts.len() - 1
    }

    /// `π_q(d)`. Panics if `d` is 0 or beyond the table.
    pub fn count(&self, d: usize) -> &BigUint {
        assert!(d >= 1 && d <= self.d_max(), "degree {d} outside table");
        &self.counts[d]
    }

    /// Counts for degrees `1..=d_max`.
    pub fn counts(&self) -> &[BigUint] {
        &self.counts[1..]
    }

    /// `d·π_q(d) / q^d` as a float.
    pub fn density<T: Real>(&self, d: usize) -> T {
        let num = BigUint::from(d as u64) * self.count(d);
        T::c(big_ratio_f64(&num, &BigUint::from(self.q).pow(d as u32)))
    }

    /// Checks `Σ_{d|n} d·π_q(d) = q^n` for every `n` in the table.
    pub fn gauss_identity_holds(&self) -> bool {
        let q = BigUint::from(self.q);
        let mut qn = BigUint::one();
        (1..=self.d_max()).all(|n| {
            qn *= &q;
            let total: BigUint = divisors(n as u64)
                .into_iter()
                .map(|d| BigUint::from(d) * &self.counts[d as usize])
                .sum();
            total == qn
        })
    }
}

/// Builds the table of `π_q(d)`, `1 ≤ d ≤ d_max`, in exact arithmetic.
pub fn prime_counts(q: u64, d_max: usize) -> Result<PrimeCountTable> {
    check_prime_power(q)?;
    if d_max == 0 {
        return Err(Error::Validation("d_max must be at least 1".into()));
    }
    if d_max > MAX_TABLE_DEGREE {
        return Err(Error::Resource(format!(
            "d_max = {d_max} exceeds the table cap {MAX_TABLE_DEGREE}"
        )));
    }
    let base = BigInt::from(q);
    let mut counts = vec![BigUint::zero(); d_max + 1];
    for (d, slot) in counts.iter_mut().enumerate().skip(1) {
        let mut acc = BigInt::zero();
        for e in divisors(d as u64) {
            match mobius(e) {
                0 => {}
                s => {
                    let term = base.pow((d as u64 / e) as u32);
                    if s > 0 {
                        acc += term;
                    } else {
                        acc -= term;
                    }
                }
            }
        }
        let (quot, rem) = (&acc / BigInt::from(d), &acc % BigInt::from(d));
        debug_assert!(rem.is_zero());
        *slot = quot.to_biguint().expect("π_q(d) is positive");
    }
    let table = PrimeCountTable { q, counts };
    if !table.gauss_identity_holds() {
        return Err(Error::Domain(format!(
            "internal error: Gauss identity failed for q = {q}"
        )));
    }
    Ok(table)
}

/// `d·π_q(d)/q^d = Σ_{e|d} μ(e)·q^{d/e - d}`, evaluated directly in floating point.
///
/// Needs no big integers, so it serves the float-mode code at any degree.
pub fn prime_density<T: Real>(q: u64, d: usize) -> T {
    let ln_q = T::c(q as f64).ln();
    let d_f = T::from_count(d);
    let mut acc = T::zero();
    // Sum the largest terms last; e = 1 contributes exactly 1.
    for e in divisors(d as u64).into_iter().rev() {
        let mu = mobius(e);
        if mu == 0 {
            continue;
        }
        let term = ((T::from_count(d / e as usize) - d_f) * ln_q).exp();
        acc = if mu > 0 { acc + term } else { acc - term };
    }
    acc
}

/// Correctly scaled `a / b` for big unsigned integers.
pub(crate) fn big_ratio_f64(a: &BigUint, b: &BigUint) -> f64 {
    if a.is_zero() {
        return 0.0;
    }
    let shift = a.bits() as i64 - b.bits() as i64;
    // Bring the quotient into [2^63, 2^65) before converting.
    let k = 64 - shift;
    let (num, den) = if k >= 0 {
        (a << k as u64, b.clone())
    } else {
        (a.clone(), b << (-k) as u64)
    };
    let quot = (&num / &den).to_f64().unwrap_or(f64::INFINITY);
    quot * 2f64.powi(-(k as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mobius_examples() {
        assert_eq!(mobius(1), 1);
        assert_eq!(mobius(6), 1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(2), -1);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(49), 0);
    }

    #[test]
    fn prime_power_detection() {
        assert_eq!(is_prime_power(9), Some((3, 2)));
        assert_eq!(is_prime_power(16), Some((2, 4)));
        assert_eq!(is_prime_power(12), None);
        assert_eq!(is_prime_power(7), Some((7, 1)));
        assert_eq!(is_prime_power(1), None);
        assert_eq!(is_prime_power(6), None);
        assert_eq!(is_prime_power(125), Some((5, 3)));
    }

    #[test]
    fn counts_over_f2() {
        let t = prime_counts(2, 5).unwrap();
        let got: Vec<u64> = t.counts().iter().map(|c| c.to_u64().unwrap()).collect();
        assert_eq!(got, vec![2, 1, 2, 3, 6]);
        // 1·2 + 2·1 + 4·3 = 16
        let s = 2 + 2 * 1 + 4 * 3;
        assert_eq!(s, 16);
    }

    #[test]
    fn linear_count_is_q() {
        let t = prime_counts(3, 1).unwrap();
        assert_eq!(t.counts(), &[BigUint::from(3u32)]);
        for q in [2u64, 4, 5, 8, 9, 16] {
            assert_eq!(prime_counts(q, 3).unwrap().count(1), &BigUint::from(q));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(prime_counts(6, 3), Err(Error::Validation(_))));
        assert!(matches!(prime_counts(2, 0), Err(Error::Validation(_))));
        assert!(matches!(
            prime_counts(2, MAX_TABLE_DEGREE + 1),
            Err(Error::Resource(_))
        ));
    }

    #[test]
    fn explicit_ppt_bounds() {
        for q in [2u64, 3, 4, 5, 7, 9] {
            let t = prime_counts(q, 60).unwrap();
            let qb = BigInt::from(q);
            for n in 1..=60usize {
                let c = BigInt::from(t.count(n).clone());
                assert!(c >= BigInt::one());
                let qn = qb.pow(n as u32);
                let npi = BigInt::from(n) * &c;
                assert!(npi <= qn);
                let dev = (&npi - &qn) * if npi < qn { -1 } else { 1 };
                assert!(dev <= BigInt::from(2) * qb.pow((n / 2) as u32), "q={q} n={n}");
            }
        }
    }

    #[test]
    fn float_density_matches_exact() {
        for q in [2u64, 3, 5, 9] {
            let t = prime_counts(q, 80).unwrap();
            for d in 1..=80 {
                let exact: f64 = t.density(d);
                let direct: f64 = prime_density(q, d);
                assert!((exact - direct).abs() <= 4e-16, "q={q} d={d}");
            }
        }
        assert_eq!(prime_density::<f64>(2, 1), 1.0);
        assert!((prime_density::<f64>(2, 2) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn big_ratio_is_accurate() {
        let a = BigUint::from(1u32) << 3000u32;
        let b = BigUint::from(3u32) << 3000u32;
        assert!((big_ratio_f64(&a, &b) - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(big_ratio_f64(&BigUint::from(6u32), &BigUint::from(4u32)), 1.5);
    }

    #[test]
    fn divisor_helpers() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        let t = divisor_table(12);
        assert_eq!(t[12], vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(t[7], vec![1, 7]);
    }
}
