//! The distributions of `K(π_n)` (cycles of a uniform permutation) and
//! `Ω(f_n)` (prime factors of a uniform monic polynomial over `F_q`, with
//! multiplicity), exactly and in floating point.
//!
//! Exact `Ω` counts come from the Euler product
//! `Σ N_q(m,k) u^m z^k = Π_d (1 − z u^d)^{−π_q(d)}`; the brute-force
//! factorization oracle in [`oracle`] certifies them.

mod field;
mod float;
mod oracle;

pub use field::FiniteField;
pub use float::{
    certified_kcap, default_kcap, omega_dist_float, omega_dist_float_euler, omega_row_float, omega_row_float_euler,
    OmegaTailBounder, TAIL_CERTIFICATE,
};
pub use oracle::{brute_force_omega, enumerate_irreducibles, IrreduciblesList, ENUMERATION_BUDGET, BRUTE_FORCE_BUDGET};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::prime_tab::{check_prime_power, prime_counts};
use crate::scalar::{Mode, Scalar};
use crate::{Error, ExactRow, FloatRow, Result};

/// Largest `n` for exact Stirling rows.
pub const EXACT_STIRLING_CAP: usize = 1000;
/// Largest `n` for exact `Ω` count tables.
pub const EXACT_OMEGA_CAP: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    CycleCount,
    OmegaCount,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::CycleCount => "cycles",
            Label::OmegaCount => "omega",
        }
    }
}

/// A probability mass function on `k ∈ [1..n]`.
///
/// Float rows may be truncated at some `k_cap < n`; masses above the cap are
/// stored as zero and `tail_bound` bounds what was dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionRow<T> {
    n: usize,
    label: Label,
    q: Option<u64>,
    mass: Vec<T>,
    truncated_at: Option<usize>,
    tail_bound: Option<f64>,
}

impl<T: Scalar> DistributionRow<T> {
    /// `mass[i]` is the probability of `k = i + 1`.
    pub fn new(label: Label, q: Option<u64>, mass: Vec<T>) -> Result<Self> {
        if mass.is_empty() {
            return Err(Error::Validation("a distribution row needs n >= 1".into()));
        }
        if (label == Label::OmegaCount) != q.is_some() {
            return Err(Error::Validation("q is required exactly for omega rows".into()));
        }
        Ok(DistributionRow {
            n: mass.len(),
            label,
            q,
            mass,
            truncated_at: None,
            tail_bound: None,
        })
    }

    pub(crate) fn with_truncation(mut self, k_cap: usize, tail_bound: f64) -> Self {
        if k_cap < self.n {
            self.truncated_at = Some(k_cap);
            self.tail_bound = Some(tail_bound);
        }
        self
    }

    /// A point mass at `k`.
    pub fn point_mass(label: Label, q: Option<u64>, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::Validation(format!("k = {k} outside [1, {n}]")));
        }
        let mut mass = vec![T::zero(); n];
        mass[k - 1] = T::one();
        Self::new(label, q, mass)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn q(&self) -> Option<u64> {
        self.q
    }

    pub fn mode(&self) -> Mode {
        T::MODE
    }

    /// Masses for `k = 1..=n`.
    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    /// `P(k)`; zero outside `[1, n]`.
    pub fn prob(&self, k: usize) -> T {
        if k == 0 || k > self.n {
            T::zero()
        } else {
            self.mass[k - 1].clone()
        }
    }

    pub fn truncated_at(&self) -> Option<usize> {
        self.truncated_at
    }

    pub fn tail_bound(&self) -> Option<f64> {
        self.tail_bound
    }

    pub fn total(&self) -> T {
        self.mass.iter().cloned().fold(T::zero(), |a, b| a + b)
    }

    pub fn to_f64(&self) -> FloatRow {
        DistributionRow {
            n: self.n,
            label: self.label,
            q: self.q,
            mass: self.mass.iter().map(Scalar::to_f64).collect(),
            truncated_at: self.truncated_at,
            tail_bound: self.tail_bound,
        }
    }
}

/// Unsigned Stirling numbers of the first kind `|s(n,k)|` for `k = 0..=n`.
pub fn stirling_numbers(n: usize) -> Vec<BigUint> {
    StirlingRows::new().nth(n).expect("infinite iterator")
}

/// Successive rows `|s(n, ·)|`, `n = 0, 1, 2, …`.
#[derive(Debug, Clone)]
pub struct StirlingRows {
    next: Vec<BigUint>,
}

impl StirlingRows {
    pub fn new() -> Self {
        StirlingRows { next: vec![BigUint::one()] }
    }
}

impl Default for StirlingRows {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for StirlingRows {
    type Item = Vec<BigUint>;

    fn next(&mut self) -> Option<Vec<BigUint>> {
        let row = self.next.clone();
        // |s(n+1,k)| = |s(n,k-1)| + n|s(n,k)|
        let n = row.len() - 1;
        let mut succ = vec![BigUint::zero(); n + 2];
        for k in 0..=n + 1 {
            if k >= 1 {
                succ[k] += &row[k - 1];
            }
            if k <= n {
                succ[k] += &row[k] * n;
            }
        }
        self.next = succ;
        Some(row)
    }
}

/// `P(K(π_n) = k) = |s(n,k)|/n!` in exact rationals.
pub fn stirling_row(n: usize) -> Result<ExactRow> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    if n > EXACT_STIRLING_CAP {
        return Err(Error::Resource(format!(
            "n = {n} exceeds the exact-mode cap {EXACT_STIRLING_CAP} for cycle rows; use float mode"
        )));
    }
    let s = stirling_numbers(n);
    let fact: BigUint = s.iter().sum();
    let den = BigInt::from(fact);
    let mass = s[1..]
        .iter()
        .map(|c| BigRational::new(BigInt::from(c.clone()), den.clone()))
        .collect();
    DistributionRow::new(Label::CycleCount, None, mass)
}

/// Cycle-count probabilities from the normalized recurrence
/// `P_n(k) = ((n−1)·P_{n−1}(k) + P_{n−1}(k−1))/n`.
///
/// Returns entries `k = 0..=cap` (entry 0 is `P(K = 0)`, which is zero for
/// `n ≥ 1`). Truncating at `cap` does not perturb the entries kept.
pub fn cycle_probabilities<T: Scalar>(n: usize, cap: usize) -> Vec<T> {
    let cap = cap.min(n);
    let mut p = vec![T::zero(); cap + 1];
    p[0] = T::one();
    for m in 1..=n {
        let m_t = T::from_count(m);
        let prev = T::from_count(m - 1);
        for k in (1..=cap.min(m)).rev() {
            p[k] = (prev.clone() * p[k].clone() + p[k - 1].clone()) / m_t.clone();
        }
        p[0] = T::zero();
    }
    p
}

/// The cycle-count row in any scalar type.
pub fn cycle_row<T: Scalar>(n: usize) -> Result<DistributionRow<T>> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let mut p = cycle_probabilities::<T>(n, n);
    p.remove(0);
    DistributionRow::new(Label::CycleCount, None, p)
}

/// Largest `n` for float rows.
pub const FLOAT_CAP: usize = crate::prime_tab::MAX_TABLE_DEGREE;

/// `P(K(π_n) = k)` in double precision.
pub fn stirling_row_float(n: usize) -> Result<FloatRow> {
    if n > FLOAT_CAP {
        return Err(Error::Resource(format!("n = {n} exceeds the float-mode cap {FLOAT_CAP}")));
    }
    cycle_row::<f64>(n)
}

/// `N_q(m,k)`: the number of monic degree-`m` polynomials over `F_q` with
/// exactly `k` prime factors counted with multiplicity, for `0 ≤ k ≤ m ≤ n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OmegaCountTable {
    q: u64,
    n: usize,
    counts: Vec<Vec<BigUint>>,
}

impl OmegaCountTable {
    pub(crate) fn from_rows(q: u64, counts: Vec<Vec<BigUint>>) -> Self {
        let n = counts.len() - 1;
        OmegaCountTable { q, n, counts }
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N_q(m, k)` for `k = 0..=m`.
    pub fn row(&self, m: usize) -> &[BigUint] {
        &self.counts[m]
    }

    /// `P(Ω(f_m) = k) = N_q(m,k)/q^m` as an exact row.
    pub fn distribution(&self, m: usize) -> Result<ExactRow> {
        if m == 0 || m > self.n {
            return Err(Error::Validation(format!("row {m} outside [1, {}]", self.n)));
        }
        let den = BigInt::from(self.q).pow(m as u32);
        let mass = self.counts[m][1..]
            .iter()
            .map(|c| BigRational::new(BigInt::from(c.clone()), den.clone()))
            .collect();
        DistributionRow::new(Label::OmegaCount, Some(self.q), mass)
    }
}

/// Exact `N_q(m,k)` for all `m ≤ n`, by multiplying out
/// `Π_{d ≤ n} Σ_j C(π_q(d)+j−1, j) z^j u^{dj}` truncated at `u^n`.
pub fn omega_counts(q: u64, n: usize) -> Result<OmegaCountTable> {
    check_prime_power(q)?;
    if n > EXACT_OMEGA_CAP {
        return Err(Error::Resource(format!(
            "n = {n} exceeds the exact-mode cap {EXACT_OMEGA_CAP} for omega rows; use float mode"
        )));
    }
    let mut counts: Vec<Vec<BigUint>> = (0..=n).map(|m| vec![BigUint::zero(); m + 1]).collect();
    counts[0][0] = BigUint::one();
    if n == 0 {
        return Ok(OmegaCountTable::from_rows(q, counts));
    }
    let primes = prime_counts(q, n)?;
    let mut weights: Vec<BigUint> = Vec::with_capacity(n + 1);
    for d in 1..=n {
        let pi = primes.count(d);
        // multiset coefficients C(π+j−1, j)
        weights.clear();
        weights.push(BigUint::one());
        for j in 1..=n / d {
            let w = &weights[j - 1] * (pi + BigUint::from(j - 1)) / BigUint::from(j);
            weights.push(w);
        }
        for m in (d..=n).rev() {
            for k in (1..=m).rev() {
                let mut acc = BigUint::zero();
                for j in 1..=(m / d).min(k) {
                    let src = &counts[m - d * j];
                    if k - j < src.len() {
                        let c = &src[k - j];
                        if !c.is_zero() {
                            acc += &weights[j] * c;
                        }
                    }
                }
                if !acc.is_zero() {
                    counts[m][k] += acc;
                }
            }
        }
    }
    Ok(OmegaCountTable::from_rows(q, counts))
}

/// `P(Ω(f_n) = ·)` in exact rationals.
pub fn omega_dist_exact(q: u64, n: usize) -> Result<ExactRow> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    omega_counts(q, n)?.distribution(n)
}

/// `C(n, k)` as a big integer.
pub(crate) fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    /// Cycle counts of all permutations of `n` points, by enumeration.
    fn enumerate_cycle_counts(n: usize) -> Vec<u64> {
        fn cycles(p: &[usize]) -> usize {
            let mut seen = vec![false; p.len()];
            let mut c = 0;
            for s in 0..p.len() {
                if !seen[s] {
                    c += 1;
                    let mut i = s;
                    while !seen[i] {
                        seen[i] = true;
                        i = p[i];
                    }
                }
            }
            c
        }
        fn rec(p: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<u64>) {
            let n = used.len();
            if p.len() == n {
                out[cycles(p)] += 1;
                return;
            }
            for v in 0..n {
                if !used[v] {
                    used[v] = true;
                    p.push(v);
                    rec(p, used, out);
                    p.pop();
                    used[v] = false;
                }
            }
        }
        let mut out = vec![0; n + 1];
        rec(&mut Vec::new(), &mut vec![false; n], &mut out);
        out
    }

    #[test]
    fn stirling_small_rows() {
        assert_eq!(stirling_row(1).unwrap().mass(), &[ratio(1, 1)]);
        let counts = enumerate_cycle_counts(3);
        assert_eq!(counts, vec![0, 2, 3, 1]);
        assert_eq!(
            stirling_row(3).unwrap().mass(),
            &[ratio(1, 3), ratio(1, 2), ratio(1, 6)]
        );
        let counts4 = enumerate_cycle_counts(4);
        assert_eq!(counts4[2], 11);
        assert_eq!(stirling_row(4).unwrap().prob(2), ratio(11, 24));
    }

    #[test]
    fn stirling_matches_enumeration() {
        for n in 1..=7 {
            let s = stirling_numbers(n);
            let e = enumerate_cycle_counts(n);
            for k in 0..=n {
                assert_eq!(s[k].to_u64().unwrap(), e[k], "n={n} k={k}");
            }
        }
    }

    #[test]
    fn stirling_cap_is_a_resource_error() {
        assert!(matches!(stirling_row(EXACT_STIRLING_CAP + 1), Err(Error::Resource(_))));
        assert!(matches!(stirling_row(0), Err(Error::Validation(_))));
    }

    #[test]
    fn rational_recurrence_matches_integer_route() {
        for n in [1usize, 2, 5, 17, 40] {
            let a = cycle_row::<BigRational>(n).unwrap();
            let b = stirling_row(n).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn float_cycle_rows() {
        assert_eq!(stirling_row_float(2).unwrap().mass(), &[0.5, 0.5]);
        let r = stirling_row_float(100).unwrap();
        assert!((r.prob(1) - 0.01).abs() < 1e-15);
        let s = stirling_row_float(50).unwrap().total();
        assert!((s - 1.0).abs() < 1e-12);
        let r32 = cycle_row::<f32>(30).unwrap();
        assert!((r32.total() - 1.0).abs() < 1e-5);
    }

    #[test]
    fn omega_counts_small() {
        let t = omega_counts(2, 3).unwrap();
        assert_eq!(t.row(2), &[0u32.into(), 1u32.into(), 3u32.into()]);
        assert_eq!(
            t.row(3),
            &[0u32.into(), 2u32.into(), 2u32.into(), 4u32.into()]
        );
        let t3 = omega_counts(3, 2).unwrap();
        assert_eq!(t3.row(1), &[0u32.into(), 3u32.into()]);
        assert_eq!(t3.row(2), &[0u32.into(), 3u32.into(), 6u32.into()]);
        assert_eq!(t3.row(0), &[BigUint::one()]);
        let d = t.distribution(2).unwrap();
        assert_eq!(d.mass(), &[ratio(1, 4), ratio(3, 4)]);
    }

    #[test]
    fn omega_table_invariants() {
        for q in [2u64, 3, 4, 5, 9] {
            let n = 30;
            let t = omega_counts(q, n).unwrap();
            let primes = prime_counts(q, n).unwrap();
            for m in 1..=n {
                let row = t.row(m);
                let total: BigUint = row.iter().sum();
                assert_eq!(total, BigUint::from(q).pow(m as u32));
                assert_eq!(&row[1], primes.count(m));
                assert_eq!(row[m], binomial(q + m as u64 - 1, m as u64));
                assert!(row[0].is_zero());
                assert!(row[1..].iter().all(|c| !c.is_zero()));
            }
        }
    }

    #[test]
    fn omega_cap() {
        assert!(matches!(omega_counts(2, EXACT_OMEGA_CAP + 1), Err(Error::Resource(_))));
        assert!(matches!(omega_counts(10, 3), Err(Error::Validation(_))));
    }

    #[test]
    fn row_constructor_validation() {
        assert!(DistributionRow::<f64>::new(Label::OmegaCount, None, vec![1.0]).is_err());
        assert!(DistributionRow::<f64>::new(Label::CycleCount, None, vec![]).is_err());
        let p = DistributionRow::<f64>::point_mass(Label::CycleCount, None, 3, 2).unwrap();
        assert_eq!(p.mass(), &[0.0, 1.0, 0.0]);
    }
}
