//! Poisson probabilities and the Chernoff-type tail bound
//! `P(X ≥ x) ≤ (eλ/x)^x e^{−λ}` for `x > λ`.

use super::gamma::ln_factorial;
use crate::{Error, Result};

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("Poisson mean must be positive (got {lambda})")))
    }
}

/// `e^{−λ} λ^k / k!`, evaluated in log-space.
pub fn poisson_pmf(lambda: f64, k: usize) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(ln_poisson_pmf(lambda, k).exp())
}

pub(crate) fn ln_poisson_pmf(lambda: f64, k: usize) -> f64 {
    -lambda + k as f64 * lambda.ln() - ln_factorial(k)
}

/// `P(X ≥ x)`.
///
/// Above the mean the pmf is summed forward from `⌈x⌉`; at or below it the
/// complement `P(X < ⌈x⌉)` is summed backward, where the result is at least
/// about one half and the subtraction loses nothing.
pub fn poisson_tail(lambda: f64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if x.is_nan() {
        return Err(Error::Domain("tail threshold is NaN".into()));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    let k0 = x.ceil() as usize;
    if k0 as f64 > lambda {
        let mut term = ln_poisson_pmf(lambda, k0).exp();
        let mut sum = 0.0;
        let mut k = k0;
        while term > sum * 1e-18 {
            sum += term;
            k += 1;
            term *= lambda / k as f64;
        }
        return Ok(sum.min(1.0));
    }
    let mut k = k0 - 1;
    let mut term = ln_poisson_pmf(lambda, k).exp();
    let mut lower = 0.0;
    loop {
        lower += term;
        if k == 0 || term <= lower * 1e-18 {
            break;
        }
        term *= k as f64 / lambda;
        k -= 1;
    }
    Ok((1.0 - lower).max(0.0))
}

/// `(eλ/x)^x e^{−λ}`, valid as a tail bound for `x > λ`.
pub fn poisson_tail_bound(lambda: f64, x: f64) -> Result<f64> {
    check_lambda(lambda)?;
    if !(x > lambda) {
        return Err(Error::Domain(format!(
            "the Poisson tail bound needs x > lambda (got x = {x}, lambda = {lambda})"
        )));
    }
    Ok((x * (1.0 + lambda.ln() - x.ln()) - lambda).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_values() {
        for n in [10.0f64, 1000.0] {
            assert!((poisson_pmf(n.ln(), 0).unwrap() * n - 1.0).abs() < 1e-14);
        }
        let p = poisson_pmf(3.0, 4).unwrap();
        let want = (-3.0f64).exp() * 81.0 / 24.0;
        assert!((p - want).abs() < 1e-16);
        // large k stays finite and tiny
        assert!(poisson_pmf(2.0, 5000).unwrap() >= 0.0);
    }

    #[test]
    fn tail_values() {
        let t = poisson_tail(1.0, 2.0).unwrap();
        let want = 1.0 - 2.0 * (-1.0f64).exp();
        assert!(((t - want) / want).abs() < 1e-12);
        assert!((t - 0.2642411).abs() < 1e-7);
        assert_eq!(poisson_tail(4.0, 0.0).unwrap(), 1.0);
        // non-integer threshold rounds up
        assert_eq!(poisson_tail(1.0, 1.5).unwrap(), t);
        // the tail sums the pmf
        let s: f64 = (0..60).map(|k| poisson_pmf(7.5, k).unwrap()).sum();
        assert!((poisson_tail(7.5, 1.0).unwrap() - (s - poisson_pmf(7.5, 0).unwrap())).abs() < 1e-15);
        assert!((poisson_tail(1e4, 1.0).unwrap() - 1.0).abs() < 1e-15);
        let upper = poisson_tail(30.0, 31.0).unwrap();
        let lower = 1.0 - poisson_tail(30.0, 30.0).unwrap() + poisson_pmf(30.0, 30).unwrap();
        assert!((upper + lower - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bound_values() {
        let b = poisson_tail_bound(1.0, 2.0).unwrap();
        assert!((b - 0.6796).abs() < 1e-4);
        assert!(b >= poisson_tail(1.0, 2.0).unwrap());
        assert!(matches!(poisson_tail_bound(2.0, 2.0), Err(Error::Domain(_))));
        assert!(matches!(poisson_pmf(0.0, 1), Err(Error::Domain(_))));
    }

    #[test]
    fn bound_dominates_on_grid() {
        for lambda in [0.5, 1.0, 5.0, 20.0] {
            for i in 1..=60 {
                let x = lambda + 3.0 * lambda * i as f64 / 60.0;
                let tail = poisson_tail(lambda, x).unwrap();
                assert!(poisson_tail_bound(lambda, x).unwrap() >= tail, "λ={lambda} x={x}");
            }
        }
    }
}
