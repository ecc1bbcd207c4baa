//! Main terms for `P(Ω(f_n) = k)` and the Gamma-function estimates behind
//! them, all in log-space.

use serde::{Deserialize, Serialize};

use super::gamma::{ln_factorial, ln_gamma};
use super::hq::hq;
use super::poisson::ln_poisson_pmf;
use crate::prime_tab::check_prime_power;
use crate::{Error, Result};

/// Tolerance used for `h_q(r)` inside the main terms.
pub const MAIN_TERM_TOL: f64 = 1e-13;

/// `(n, k, q)` together with `L = ln n` and `r = (k−1)/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MainTermInputs {
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub r: f64,
    pub log_n: f64,
}

impl MainTermInputs {
    pub fn new(n: usize, k: usize, q: u64) -> Result<Self> {
        check_prime_power(q)?;
        check_nk(n, k)?;
        let log_n = (n as f64).ln();
        Ok(MainTermInputs { n, k, q, r: (k - 1) as f64 / log_n, log_n })
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Validation(format!("main terms need n >= 2 (got {n})")));
    }
    if k == 0 || k > n {
        return Err(Error::Validation(format!("k = {k} outside [1, {n}]")));
    }
    Ok(())
}

/// `r = (k−1)/ln n`.
pub fn r_of(n: usize, k: usize) -> f64 {
    (k - 1) as f64 / (n as f64).ln()
}

fn ln_hwang(n: usize, k: usize) -> f64 {
    let log_n = (n as f64).ln();
    let r = (k - 1) as f64 / log_n;
    ln_poisson_pmf(log_n, k - 1) - ln_gamma(r + 1.0).expect("r + 1 >= 1")
}

/// `(1/n)·(ln n)^{k−1}/(k−1)!·1/Γ(r+1)`.
pub fn hwang_main_term(n: usize, k: usize) -> Result<f64> {
    check_nk(n, k)?;
    Ok(ln_hwang(n, k).exp())
}

/// Hwang's term times `h_q(r)`; needs `r < q`.
pub fn warlimont_main_term(n: usize, k: usize, q: u64) -> Result<f64> {
    let inputs = MainTermInputs::new(n, k, q)?;
    Ok(ln_hwang(n, k).exp() * hq(q, inputs.r, MAIN_TERM_TOL)?)
}

/// `P(K(π_n) = k)·h_q(r)`; needs `r < q`.
pub fn new_main_term(p_k: f64, r: f64, q: u64) -> Result<f64> {
    Ok(p_k * hq(q, r, MAIN_TERM_TOL)?)
}

/// `C(n+z−1, n) = Π_{j=1}^n (z+j−1)/j`, as a sum of logs with sign tracking.
pub fn binom_real(n: usize, z: f64) -> f64 {
    let mut log = 0.0;
    let mut negative = false;
    for j in 1..=n {
        let f = (z + j as f64 - 1.0) / j as f64;
        if f == 0.0 {
            return 0.0;
        }
        negative ^= f < 0.0;
        log += f.abs().ln();
    }
    if negative {
        -log.exp()
    } else {
        log.exp()
    }
}

/// `|C(n+z−1, n) − n^{z−1}/Γ(z)|` for real `z > 0`.
pub fn binom_gamma_residual(n: usize, z: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let approx = ((z - 1.0) * (n as f64).ln() - ln_gamma(z)?).exp();
    Ok((binom_real(n, z) - approx).abs())
}

/// Relative gap between `(ln n)^{k−2}/(k−2)!` and `r (ln n)^{k−1}/(k−1)!` at
/// `r = (k−1)/ln n`, which agree identically. Needs `k ≥ 2`.
pub fn int2_identity_residual(n: usize, k: usize) -> Result<f64> {
    if k < 2 || n < 2 {
        return Err(Error::Validation("the identity needs n >= 2 and k >= 2".into()));
    }
    let log_n = (n as f64).ln();
    let r = (k - 1) as f64 / log_n;
    let a = (k - 2) as f64 * log_n.ln() - ln_factorial(k - 2);
    let b = r.ln() + (k - 1) as f64 * log_n.ln() - ln_factorial(k - 1);
    Ok((a - b).exp_m1().abs())
}
