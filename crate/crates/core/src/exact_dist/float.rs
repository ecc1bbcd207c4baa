//! Floating-point `Ω` rows for large `n`.
//!
//! The default route factors the Euler product as `F_q = (1−u)^{−z}·H_q(u,z)`.
//! The coefficients `H_m(z)` of `H_q` decay like `q^{−m/2}`, so
//!
//! `P(Ω(f_n)=k) = Σ_{m ≤ M} Σ_j [z^j]H_m · P(K(π_{n−m}) = k−j)`
//!
//! with a short sum over `m` and cycle rows from the stable recurrence. The
//! literal Euler-product DP is kept as [`omega_row_float_euler`].
//!
//! Truncation in `k` is certified by [`OmegaTailBounder`].

use super::{DistributionRow, Label};
use crate::prime_tab::{check_prime_power, divisor_table, prime_density};
use crate::scalar::{Real, Scalar};
use crate::{Error, FloatRow, Result};

/// Largest tail mass a truncated row may drop.
pub const TAIL_CERTIFICATE: f64 = 1e-15;

/// Error budget for cutting the `u`-series of `H_q` (per entry of the row).
const U_TRUNCATION: f64 = 1e-18;

/// `⌈8 ln n⌉ + 16`, the cap used by the command line when none is given.
pub fn default_kcap(n: usize) -> usize {
    (8.0 * (n.max(1) as f64).ln()).ceil() as usize + 16
}

/// The cap used in float mode: [`default_kcap`] when that is certified,
/// otherwise the smallest certified cap (never above `n`).
pub fn certified_kcap(q: u64, n: usize) -> usize {
    let cap = default_kcap(n);
    if cap >= n {
        return n;
    }
    let bounder = OmegaTailBounder::new(q, n);
    if bounder.bound(cap + 1) < TAIL_CERTIFICATE {
        cap
    } else {
        bounder.minimal_safe_cap()
    }
}

fn cnt<T: Real>(v: usize) -> T {
    <T as Real>::from_count(v)
}

/// Smallest `M ≤ n` with `Σ_{m>M} C(m+3,3) q^{−m/2} < U_TRUNCATION`.
///
/// `|log H_q|` is dominated coefficientwise by `4 Σ_i (u/√q)^i / i`, so the
/// `z`-coefficients of `H_m` have absolute sum at most `C(m+3,3) q^{−m/2}`.
fn u_truncation(q: u64, n: usize) -> usize {
    let s = (q as f64).sqrt().recip();
    let mut terms = Vec::new();
    let mut m = 0usize;
    loop {
        let binom = ((m + 1) * (m + 2) * (m + 3)) as f64 / 6.0;
        let t = binom * s.powi(m as i32);
        terms.push(t);
        if m > 16 && t < 1e-40 {
            break;
        }
        m += 1;
    }
    let mut tail = 0.0;
    let mut cut = terms.len() - 1;
    for big_m in (0..terms.len()).rev() {
        // tail currently holds Σ_{m > big_m}
        if tail >= U_TRUNCATION {
            break;
        }
        cut = big_m;
        tail += terms[big_m];
    }
    cut.min(n)
}

fn validate(q: u64, n: usize, k_cap: Option<usize>) -> Result<usize> {
    check_prime_power(q)?;
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    match k_cap {
        Some(0) => Err(Error::Validation("k_cap must be at least 1".into())),
        Some(k) => Ok(k.min(n)),
        None => Ok(n),
    }
}

fn certify(q: u64, n: usize, cap: usize) -> Result<Option<f64>> {
    if cap >= n {
        return Ok(None);
    }
    let bounder = OmegaTailBounder::new(q, n);
    let tail = bounder.bound(cap + 1);
    if tail < TAIL_CERTIFICATE {
        return Ok(Some(tail));
    }
    Err(Error::Validation(format!(
        "k_cap = {cap} cannot certify the dropped tail below {TAIL_CERTIFICATE:e} for q = {q}, n = {n}; \
         the smallest certified cap is {}",
        bounder.minimal_safe_cap()
    )))
}

fn finish<T: Real + Scalar>(
    q: u64,
    n: usize,
    cap: usize,
    tail: Option<f64>,
    mut mass: Vec<T>,
) -> Result<DistributionRow<T>> {
    for m in mass.iter_mut() {
        // rounding can leave masses of order 1e-17 below zero
        if *m < T::zero() {
            *m = T::zero();
        }
    }
    mass.resize(n, T::zero());
    let row = DistributionRow::new(Label::OmegaCount, Some(q), mass)?;
    Ok(match tail {
        Some(t) => row.with_truncation(cap, t),
        None => row,
    })
}

/// Coefficients `[z^j] log H_q` at `u^i`, `2 ≤ i ≤ m_max`, truncated at `z^cap`.
fn log_h_coeffs<T: Real>(q: u64, m_max: usize, cap: usize) -> Vec<Vec<T>> {
    let divs = divisor_table(m_max);
    let ln_q = T::c(q as f64).ln();
    let dens: Vec<T> = (0..=m_max)
        .map(|d| if d == 0 { T::zero() } else { prime_density::<T>(q, d) })
        .collect();
    let mut out = vec![Vec::new(); m_max + 1];
    for i in 2..=m_max {
        let mut c = vec![T::zero(); i.min(cap) + 1];
        let inv_i = cnt::<T>(i).recip();
        for &d in &divs[i] {
            let d = d as usize;
            if d == i {
                continue;
            }
            let w = dens[d] * ((cnt::<T>(d) - cnt::<T>(i)) * ln_q).exp() * inv_i;
            let j = i / d;
            if j <= cap {
                c[j] = c[j] + w;
            }
            c[1] = c[1] - w;
        }
        out[i] = c;
    }
    out
}

/// `H_m(z)` for `m ≤ m_max` from `m H_m = Σ_i i L_i H_{m−i}`.
fn h_coeffs<T: Real>(q: u64, m_max: usize, cap: usize) -> Vec<Vec<T>> {
    let l = log_h_coeffs::<T>(q, m_max, cap);
    let mut h: Vec<Vec<T>> = Vec::with_capacity(m_max + 1);
    h.push(vec![T::one()]);
    for m in 1..=m_max {
        let mut acc = vec![T::zero(); m.min(cap) + 1];
        for i in 2..=m {
            let li = &l[i];
            let prev = &h[m - i];
            let w = cnt::<T>(i);
            for (a, &la) in li.iter().enumerate().skip(1) {
                if la == T::zero() {
                    continue;
                }
                for (b, &pb) in prev.iter().enumerate() {
                    if a + b > cap {
                        break;
                    }
                    acc[a + b] = acc[a + b] + w * la * pb;
                }
            }
        }
        let inv = cnt::<T>(m).recip();
        h.push(acc.into_iter().map(|v| v * inv).collect());
    }
    h
}

/// `P(Ω(f_n)=k)` for `k ≤ k_cap` via the `(1−u)^{−z} H_q` factorization.
///
/// With `k_cap = None` the whole row is computed. A cap below `n` must be
/// certified: the dropped mass `P(Ω ≥ k_cap+1)` is bounded by
/// [`OmegaTailBounder`] and an error naming the smallest certified cap is
/// returned when the bound is not below [`TAIL_CERTIFICATE`].
pub fn omega_row_float<T: Real + Scalar>(
    q: u64,
    n: usize,
    k_cap: Option<usize>,
) -> Result<DistributionRow<T>> {
    let cap = validate(q, n, k_cap)?;
    let tail = certify(q, n, cap)?;
    let m_max = u_truncation(q, n);
    let h = h_coeffs::<T>(q, m_max, cap);

    // cycle rows P(K(π_j) = ·) for j ∈ [n − m_max, n], truncated at cap
    let mut rows: Vec<Vec<T>> = Vec::with_capacity(m_max + 1);
    let mut p = vec![T::zero(); cap + 1];
    p[0] = T::one();
    if n <= m_max {
        rows.push(p.clone());
    }
    for j in 1..=n {
        let jt = cnt::<T>(j);
        let prev = cnt::<T>(j - 1);
        for k in (1..=cap.min(j)).rev() {
            p[k] = (prev * p[k] + p[k - 1]) / jt;
        }
        p[0] = T::zero();
        if j + m_max >= n {
            rows.push(p.clone());
        }
    }
    // rows[i] holds j = n − m_max + i

    let mut mass = vec![T::zero(); cap];
    for (m, hm) in h.iter().enumerate() {
        let row = &rows[m_max - m];
        for k in 1..=cap {
            let mut acc = T::zero();
            for (j, &c) in hm.iter().enumerate().take(k + 1) {
                acc = acc + c * row[k - j];
            }
            mass[k - 1] = mass[k - 1] + acc;
        }
    }
    finish(q, n, cap, tail, mass)
}

/// The same row by multiplying out `Π_d Σ_j C(π_q(d)+j−1, j) q^{−dj} z^j u^{dj}`
/// in probability scale. Costs `O(n² log n · k_cap)`.
pub fn omega_row_float_euler<T: Real + Scalar>(
    q: u64,
    n: usize,
    k_cap: Option<usize>,
) -> Result<DistributionRow<T>> {
    let cap = validate(q, n, k_cap)?;
    let tail = certify(q, n, cap)?;
    let width = cap + 1;
    // g[m·width + k] = [u^m z^k] of the partial product
    let mut g = vec![T::zero(); (n + 1) * width];
    g[0] = T::one();
    let ln_q = T::c(q as f64).ln();
    let mut w: Vec<T> = Vec::with_capacity(n + 1);
    for d in 1..=n {
        let t = (-cnt::<T>(d) * ln_q).exp();
        let rho = prime_density::<T>(q, d) / cnt::<T>(d);
        w.clear();
        w.push(T::one());
        for j in 1..=n / d {
            let next = w[j - 1] * (rho + cnt::<T>(j - 1) * t) / cnt::<T>(j);
            w.push(next);
        }
        for m in (d..=n).rev() {
            for k in (1..=cap.min(m)).rev() {
                let mut acc = T::zero();
                for j in 1..=(m / d).min(k) {
                    acc = acc + w[j] * g[(m - d * j) * width + k - j];
                }
                g[m * width + k] = g[m * width + k] + acc;
            }
        }
    }
    let mass = g[n * width + 1..n * width + width].to_vec();
    finish(q, n, cap, tail, mass)
}

/// [`omega_row_float`] in double precision.
pub fn omega_dist_float(q: u64, n: usize, k_cap: Option<usize>) -> Result<FloatRow> {
    omega_row_float::<f64>(q, n, k_cap)
}

/// [`omega_row_float_euler`] in double precision.
pub fn omega_dist_float_euler(q: u64, n: usize, k_cap: Option<usize>) -> Result<FloatRow> {
    omega_row_float_euler::<f64>(q, n, k_cap)
}

/// Rigorous upper bounds for `P(Ω(f_n) ≥ k)`.
///
/// Split `f = g·h` with `g` the product of the linear prime factors (degree
/// `a`) and `h` free of linear factors. Then
///
/// `P(Ω ≥ k) = Σ_a C(q+a−1, a) q^{−a} · P'_{n−a}(k − a)`
///
/// where `P'_m(c) = q^{−m}·#{h : deg h = m, no linear factor, Ω(h) ≥ c}`.
/// Each `P'` is bounded by `min(b_m(1), min_z b_m(z) z^{−c})` with
/// `b_m(z) = q^{−m} Σ_h z^{Ω(h)}`, a power series with non-negative
/// coefficients computed from `m b_m = Σ_i a_i(z) b_{m−i}`.
#[derive(Debug, Clone)]
pub struct OmegaTailBounder {
    n: usize,
    lin: Vec<f64>,
    at_one: Vec<f64>,
    grid: Vec<(f64, Vec<f64>)>,
}

const Z_GRID: [f64; 11] = [1.2, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 8.0, 11.0, 16.0];

impl OmegaTailBounder {
    pub fn new(q: u64, n: usize) -> Self {
        let qf = q as f64;
        let mut lin = Vec::with_capacity(n + 1);
        lin.push(1.0);
        for a in 1..=n {
            let prev: f64 = lin[a - 1];
            lin.push(prev * (qf + a as f64 - 1.0) / (a as f64 * qf));
        }
        let divs = divisor_table(n);
        let ln_dens: Vec<f64> = (0..=n)
            .map(|d| if d == 0 { 0.0 } else { prime_density::<f64>(q, d).ln() })
            .collect();
        let series = |z: f64| -> Option<Vec<f64>> {
            let ln_z = z.ln();
            let a: Vec<f64> = (0..=n)
                .map(|i| {
                    if i < 2 {
                        return 0.0;
                    }
                    divs[i]
                        .iter()
                        .map(|&d| d as usize)
                        .filter(|&d| d >= 2)
                        .map(|d| {
                            (ln_dens[d] + (d as f64 - i as f64) * qf.ln() + (i / d) as f64 * ln_z)
                                .exp()
                        })
                        .sum()
                })
                .collect();
            let mut b = vec![0.0; n + 1];
            b[0] = 1.0;
            for m in 1..=n {
                let s: f64 = (2..=m).map(|i| a[i] * b[m - i]).sum();
                b[m] = s / m as f64;
                if !b[m].is_finite() {
                    return None;
                }
            }
            Some(b)
        };
        let at_one = series(1.0).expect("b_m(1) <= 1");
        let grid = Z_GRID
            .iter()
            .filter(|&&z| z <= 0.95 * qf * qf)
            .filter_map(|&z| series(z).map(|b| (z, b)))
            .collect();
        OmegaTailBounder { n, lin, at_one, grid }
    }

    /// Upper bound for `P(Ω(f_n) ≥ k)`.
    pub fn bound(&self, k: usize) -> f64 {
        if k <= 1 {
            return 1.0;
        }
        if k > self.n {
            return 0.0;
        }
        let mut total = 0.0;
        for a in 0..=self.n {
            let m = self.n - a;
            let c = k as i64 - a as i64;
            let p = if m == 0 {
                if c <= 0 { 1.0 } else { 0.0 }
            } else if c <= 0 {
                self.at_one[m]
            } else {
                self.grid
                    .iter()
                    .map(|(z, b)| (b[m].ln() - c as f64 * z.ln()).exp())
                    .fold(self.at_one[m], f64::min)
            };
            total += self.lin[a] * p;
        }
        (total * (1.0 + 1e-9)).min(1.0)
    }

    /// Smallest `k_cap` whose dropped tail `P(Ω ≥ k_cap+1)` is certified below
    /// [`TAIL_CERTIFICATE`] (`n` if none is).
    pub fn minimal_safe_cap(&self) -> usize {
        let (mut lo, mut hi) = (1usize, self.n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if self.bound(mid + 1) < TAIL_CERTIFICATE {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }
}
