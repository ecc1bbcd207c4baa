//! `h_q(x) = Π_P (1 − x/|P|)^{−1} (1 − 1/|P|)^x` on `0 ≤ x < q`.
//!
//! Grouping primes by degree and expanding both logarithms gives
//!
//! `log h_q(x) = Σ_{m≥2} c_m(x)`,
//! `c_m(x) = q^{−m} m^{−1} Σ_{d|m, d<m} d π_q(d) (x^{m/d} − x)`.
//!
//! Each coefficient is stored as a list of `(j, ln c)` pairs standing for
//! `c·(x^j − x)` with `j = m/d ≥ 2`, so `c_m(1) = c_m(0) = 0` exactly.

use num_bigint::BigUint;

use crate::prime_tab::{big_ratio_f64, check_prime_power, divisor_table, prime_counts, prime_density};
use crate::scalar::Real;
use crate::{Error, Result};

/// Largest truncation order [`hq`] will try before giving up.
const MAX_TRUNCATION: usize = 1 << 16;

/// Truncated log-series of `h_q`.
#[derive(Debug, Clone)]
pub struct HqSeries<T> {
    q: u64,
    n_trunc: usize,
    /// `coeffs[m]` for `2 ≤ m ≤ n_trunc`: pairs `(j, ln c)`.
    coeffs: Vec<Vec<(u32, T)>>,
}

impl<T: Real> HqSeries<T> {
    pub fn new(q: u64, n_trunc: usize) -> Result<Self> {
        check_prime_power(q)?;
        if n_trunc < 2 {
            return Err(Error::Validation("the h_q series needs N_trunc >= 2".into()));
        }
        let ln_q = T::c(q as f64).ln();
        let ln_dens: Vec<T> = (0..=n_trunc / 2)
            .map(|d| if d == 0 { T::zero() } else { prime_density::<T>(q, d).ln() })
            .collect();
        let divs = divisor_table(n_trunc);
        let mut coeffs = vec![Vec::new(); n_trunc + 1];
        for m in 2..=n_trunc {
            let ln_m = T::from_count(m).ln();
            coeffs[m] = divs[m]
                .iter()
                .rev()
                .filter(|&&d| d as usize != m)
                .map(|&d| {
                    let d = d as usize;
                    let ln_c = ln_dens[d] + (T::from_count(d) - T::from_count(m)) * ln_q - ln_m;
                    ((m / d) as u32, ln_c)
                })
                .collect();
        }
        Ok(HqSeries { q, n_trunc, coeffs })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    /// `(j, c)` pairs of `c_m(x) = Σ c (x^j − x)`.
    pub fn terms(&self, m: usize) -> impl Iterator<Item = (u32, T)> + '_ {
        self.coeffs[m].iter().map(|&(j, ln_c)| (j, ln_c.exp()))
    }

    /// Polynomial degree of `c_m` (always `m`: the `d = 1` summand).
    pub fn degree(&self, m: usize) -> u32 {
        self.coeffs[m].iter().map(|&(j, _)| j).max().unwrap_or(0)
    }

    /// `c_m(x)`.
    pub fn coeff_at(&self, m: usize, x: T) -> T {
        self.coeffs[m].iter().fold(T::zero(), |acc, &(j, ln_c)| {
            let c = ln_c.exp();
            let xj = x.powi(j as i32);
            let term = if xj.is_finite() && c > T::zero() {
                c * (xj - x)
            } else {
                // c underflows or x^j overflows: combine in log-space
                let ln_x = x.ln();
                (ln_c + T::c(j as f64) * ln_x).exp() - (ln_c + ln_x).exp()
            };
            acc + term
        })
    }

    /// `c_m'(x)`.
    pub fn coeff_derivative_at(&self, m: usize, x: T) -> T {
        self.coeffs[m].iter().fold(T::zero(), |acc, &(j, ln_c)| {
            let c = ln_c.exp();
            let jt = T::c(j as f64);
            let xj1 = x.powi(j as i32 - 1);
            let term = if xj1.is_finite() && c > T::zero() {
                c * (jt * xj1 - T::one())
            } else {
                (ln_c + jt.ln() + (jt - T::one()) * x.ln()).exp() - c
            };
            acc + term
        })
    }

    /// `Σ_{m=2}^{upto} c_m(x)`, smallest terms first.
    pub fn log_sum(&self, x: T, upto: usize) -> T {
        (2..=upto.min(self.n_trunc)).rev().fold(T::zero(), |acc, m| acc + self.coeff_at(m, x))
    }

    /// `Σ_{m=2}^{upto} c_m'(x)`.
    pub fn log_derivative_sum(&self, x: T, upto: usize) -> T {
        (2..=upto.min(self.n_trunc))
            .rev()
            .fold(T::zero(), |acc, m| acc + self.coeff_derivative_at(m, x))
    }

    /// Certified bound on `Σ_{m>N} |c_m(x)|` at `N = n_trunc`.
    pub fn tail_bound(&self, x: T) -> T {
        log_series_tail(self.q, x, self.n_trunc)
    }
}

fn geometric_tail<T: Real>(rho: T, from: usize) -> T {
    // Σ_{m ≥ from} ρ^m
    if rho <= T::zero() {
        return T::zero();
    }
    (T::from_count(from) * rho.ln()).exp() / (T::one() - rho)
}

fn weighted_geometric_tail<T: Real>(rho: T, from: usize) -> T {
    // Σ_{m ≥ from} m ρ^m = ρ^a (a − (a−1)ρ)/(1−ρ)²
    if rho <= T::zero() {
        return T::zero();
    }
    let a = T::from_count(from);
    let one = T::one();
    (a * rho.ln()).exp() * (a - (a - one) * rho) / ((one - rho) * (one - rho))
}

/// Bound on `Σ_{m>N} |c_m(x)|`.
///
/// Per coefficient, `|c_m(x)| ≤ q(x/q)^m + (q²/2)(√x̄/q)^m + (x̄²/2 + x) q^{−m/2}`
/// with `x̄ = max(1, x)`: the `d = 1` summand gives the first term, and for
/// `2 ≤ d ≤ m/2` the quantity `q^d x̄^{m/d}` is largest at an endpoint.
pub fn log_series_tail<T: Real>(q: u64, x: T, n: usize) -> T {
    let qt = T::c(q as f64);
    let xb = x.max(T::one());
    let half = T::c(0.5);
    let from = n + 1;
    qt * geometric_tail(x / qt, from)
        + half * qt * qt * geometric_tail(xb.sqrt() / qt, from)
        + (half * xb * xb + x) * geometric_tail(qt.sqrt().recip(), from)
}

/// Bound on `Σ_{m>N} |c_m'(x)|`, using
/// `|c_m'(x)| ≤ (x/q)^{m−1} + (m/4)(q²(√x̄/q)^m + x̄² q^{−m/2}) + q^{−m/2}`.
pub fn log_derivative_tail<T: Real>(q: u64, x: T, n: usize) -> T {
    let qt = T::c(q as f64);
    let xb = x.max(T::one());
    let quarter = T::c(0.25);
    let from = n + 1;
    let rho3 = qt.sqrt().recip();
    geometric_tail(x / qt, n)
        + quarter * qt * qt * weighted_geometric_tail(xb.sqrt() / qt, from)
        + quarter * xb * xb * weighted_geometric_tail(rho3, from)
        + geometric_tail(rho3, from)
}

fn check_domain<T: Real>(q: u64, x: T, tol: T) -> Result<()> {
    check_prime_power(q)?;
    let xf = x.to_f64().unwrap_or(f64::NAN);
    if !(x >= T::zero() && x < T::c(q as f64)) {
        return Err(Error::Domain(format!(
            "h_q(x) needs 0 <= x < q (got x = {xf}, q = {q}); the product diverges as x -> q"
        )));
    }
    if !(tol > T::zero()) {
        return Err(Error::Validation("tol must be positive".into()));
    }
    Ok(())
}

/// `N = max(40, ⌈2 ln(1/tol) / ln(q/x)⌉)`, doubled until `tail(N) < tol/2`.
fn choose_truncation<T: Real>(q: u64, x: T, tol: T, tail: impl Fn(usize) -> T) -> Result<usize> {
    let ratio = (T::c(q as f64) / x).ln();
    let guess = (T::c(2.0) * tol.recip().ln() / ratio).ceil().max(T::zero());
    let mut n = guess.to_usize().unwrap_or(MAX_TRUNCATION).clamp(40, MAX_TRUNCATION);
    while !(tail(n) < tol * T::c(0.5)) {
        if n >= MAX_TRUNCATION {
            return Err(Error::Resource(format!(
                "h_q series would need more than {MAX_TRUNCATION} terms at this x and tol"
            )));
        }
        n = (2 * n).min(MAX_TRUNCATION);
    }
    Ok(n)
}

/// `h_q(x)` from the log-series, truncated where the certified tail of
/// `log h_q` drops below `tol/2`. Doubling the truncation must move the
/// result by less than `tol`.
pub fn hq<T: Real>(q: u64, x: T, tol: T) -> Result<T> {
    check_domain(q, x, tol)?;
    if x == T::one() || x == T::zero() {
        return Ok(T::one());
    }
    let n = choose_truncation(q, x, tol, |n| log_series_tail(q, x, n))?;
    let series = HqSeries::<T>::new(q, 2 * n)?;
    let value = series.log_sum(x, n).exp();
    let check = series.log_sum(x, 2 * n).exp();
    if !((value - check).abs() < tol) {
        return Err(Error::Domain(format!(
            "h_q self-check failed at x = {}: truncations {} and {} differ by {:e}",
            x.to_f64().unwrap_or(f64::NAN),
            n,
            2 * n,
            (value - check).abs().to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(value)
}

/// `d/dx log h_q(x)` by termwise differentiation of the log-series.
pub fn hq_log_derivative<T: Real>(q: u64, x: T, tol: T) -> Result<T> {
    check_domain(q, x, tol)?;
    let n = choose_truncation(q, x, tol, |n| log_derivative_tail(q, x, n))?;
    let series = HqSeries::<T>::new(q, 2 * n)?;
    let value = series.log_derivative_sum(x, n);
    let check = series.log_derivative_sum(x, 2 * n);
    if !((value - check).abs() < tol) {
        return Err(Error::Domain(format!(
            "h_q derivative self-check failed at x = {}",
            x.to_f64().unwrap_or(f64::NAN)
        )));
    }
    Ok(value)
}

/// `g(t)/t` with `g(t) = −ln(1 − xt) + x ln(1 − t)`, the log of one Euler
/// factor at `t = 1/|P|`, divided by `t`.
fn log_factor_over_t(x: f64, t: f64) -> f64 {
    if t > 1e-3 {
        return (-(-x * t).ln_1p() + x * (-t).ln_1p()) / t;
    }
    // Σ_{i≥2} t^{i−1} (x^i − x)/i
    let mut acc = 0.0;
    let mut tp = 1.0;
    let mut xp = x;
    for i in 2..200 {
        tp *= t;
        xp *= x;
        let term = tp * (xp - x) / i as f64;
        acc += term;
        if tp * xp.max(x) < 1e-30 * acc.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    acc
}

/// The literal Euler product over all monic irreducibles of degree
/// `≤ d_max`, one factor per prime, grouped by degree with exact counts.
pub fn hq_direct_product(q: u64, x: f64, d_max: usize) -> Result<f64> {
    check_domain(q, x, 1.0)?;
    if d_max == 0 {
        return Err(Error::Validation("d_max must be at least 1".into()));
    }
    let table = prime_counts(q, d_max)?;
    let big_q = BigUint::from(q);
    let mut log = 0.0;
    for d in (1..=d_max).rev() {
        // π_q(d)·g(q^{−d}) = (π_q(d)/q^d)·g(t)/t
        let pi_over_qd = big_ratio_f64(table.count(d), &big_q.pow(d as u32));
        let t = (-(d as f64) * (q as f64).ln()).exp();
        log += pi_over_qd * log_factor_over_t(x, t);
    }
    Ok(log.exp())
}

/// Bound on `|log h_q(x) − log(direct product up to d_max)|`:
/// `(1/(2(D+1)))·[x²/(1 − x q^{−(D+1)}) + x/(1 − q^{−(D+1)})]·q^{−(D+1)}/(1 − 1/q)`.
pub fn direct_product_tail(q: u64, x: f64, d_max: usize) -> f64 {
    let qf = q as f64;
    let t = qf.powf(-((d_max + 1) as f64));
    let bracket = x * x / (1.0 - x * t) + x / (1.0 - t);
    bracket * t / (2.0 * (d_max + 1) as f64 * (1.0 - 1.0 / qf))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coefficients_vanish_at_zero_and_one() {
        for q in [2u64, 3, 4, 9] {
            let s = HqSeries::<f64>::new(q, 60).unwrap();
            for m in 2..=60 {
                assert_eq!(s.coeff_at(m, 1.0), 0.0);
                assert_eq!(s.coeff_at(m, 0.0), 0.0);
            }
        }
    }

    #[test]
    fn coefficient_degree_and_leading_term() {
        let q = 3u64;
        let s = HqSeries::<f64>::new(q, 30).unwrap();
        for m in 2..=30 {
            assert_eq!(s.degree(m), m as u32);
            let lead = s.terms(m).find(|&(j, _)| j == m as u32).unwrap().1;
            let want = (q as f64).powi(1 - m as i32) / m as f64;
            assert!(((lead - want) / want).abs() < 1e-14);
        }
        // c_2(x) = q^{-1}(x² − x)/2
        let c2 = s.coeff_at(2, 2.0);
        assert!((c2 - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn tail_bound_covers_the_dropped_terms() {
        for (q, x) in [(2u64, 1.5f64), (2, 0.5), (3, 2.5), (5, 4.2), (9, 7.0), (4, 0.0)] {
            let s = HqSeries::<f64>::new(q, 400).unwrap();
            for n in [10usize, 25, 60] {
                let dropped: f64 = (n + 1..=400).map(|m| s.coeff_at(m, x).abs()).sum();
                let rest = log_series_tail(q, x, 400);
                assert!(log_series_tail(q, x, n) >= dropped + rest, "q={q} x={x} n={n}");
                let dropped_d: f64 = (n + 1..=400).map(|m| s.coeff_derivative_at(m, x).abs()).sum();
                assert!(log_derivative_tail(q, x, n) >= dropped_d, "q={q} x={x} n={n}");
            }
        }
    }

    #[test]
    fn fixed_points() {
        for q in [2u64, 3, 7, 16] {
            assert_eq!(hq(q, 1.0, 1e-12).unwrap(), 1.0);
            assert_eq!(hq(q, 0.0, 1e-12).unwrap(), 1.0);
        }
        assert_eq!(hq_direct_product(2, 1.0, 10).unwrap(), 1.0);
        assert_eq!(hq_direct_product(3, 0.0, 10).unwrap(), 1.0);
    }

    #[test]
    fn series_matches_direct_product() {
        for q in [2u64, 3, 5] {
            for x in [0.25, 0.5, 1.0, 1.5, 2.0] {
                if x >= q as f64 {
                    continue;
                }
                let a = hq(q, x, 1e-13).unwrap();
                let b = hq_direct_product(q, x, 30).unwrap();
                let tail = b * direct_product_tail(q, x, 30).exp_m1();
                assert!((a - b).abs() <= 1e-9 + tail, "q={q} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn direct_product_is_monotone_above_one() {
        let mut prev = 0.0;
        for d in 1..=25 {
            let v = hq_direct_product(2, 1.5, d).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        let full = hq(2, 1.5, 1e-13).unwrap();
        assert!(full >= prev - 1e-12);
        assert!(full - prev <= prev * direct_product_tail(2, 1.5, 25).exp_m1() + 1e-12);
    }

    #[test]
    fn log_derivative_matches_finite_differences() {
        for (q, x) in [(2u64, 0.0f64), (2, 1.0), (3, 1.7), (16, 1.0), (5, 0.3)] {
            let h = 1e-5;
            let d = hq_log_derivative(q, x, 1e-13).unwrap();
            let fd = if x == 0.0 {
                hq::<f64>(q, h, 1e-14).unwrap().ln() / h
            } else {
                (hq(q, x + h, 1e-14).unwrap().ln() - hq(q, x - h, 1e-14).unwrap().ln()) / (2.0 * h)
            };
            let slack = if x == 0.0 { 1e-4 } else { 1e-6 };
            assert!((d - fd).abs() < slack, "q={q} x={x}: {d} vs {fd}");
        }
        for q in [16u64, 25, 49] {
            let d: f64 = hq_log_derivative(q, 1.0, 1e-12).unwrap();
            assert!(d.abs() <= 10.0 / q as f64);
        }
        // first-order consistency
        let (q, x, h) = (3u64, 1.2f64, 1e-6);
        let lhs = hq(q, x + h, 1e-14).unwrap() - hq(q, x, 1e-14).unwrap();
        let rhs = h * hq(q, x, 1e-14).unwrap() * hq_log_derivative(q, x, 1e-13).unwrap();
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn lower_bounds() {
        for q in [2u64, 3, 5, 9] {
            let qf = q as f64;
            for i in 0..=40 {
                let x = 1.0 + (0.9 * qf - 1.0) * i as f64 / 40.0;
                assert!(hq(q, x, 1e-12).unwrap() >= 1.0 + (x - 1.0) / (2.0 * qf));
            }
            for i in 0..=20 {
                assert!(hq(q, i as f64 / 20.0, 1e-12).unwrap() > 0.25);
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(hq(2, 2.0, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(hq(2, -0.1, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(hq(6, 1.0, 1e-10), Err(Error::Validation(_))));
        assert!(matches!(hq_log_derivative(3, 3.5, 1e-10), Err(Error::Domain(_))));
        assert!(matches!(hq_direct_product(2, 2.5, 5), Err(Error::Domain(_))));
    }

    #[test]
    fn single_precision_series() {
        let v = hq(3u64, 1.5f32, 1e-6).unwrap();
        let w = hq(3u64, 1.5f64, 1e-12).unwrap();
        assert!((v as f64 - w).abs() < 1e-5);
    }
}
