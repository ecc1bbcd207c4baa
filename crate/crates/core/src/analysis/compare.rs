use serde::{Deserialize, Serialize};

use super::{row_pair, RowPair};
use crate::asymptotics::{hq, poisson_pmf, MAIN_TERM_TOL};
use crate::prime_tab::check_prime_power;
use crate::{DistributionRow, Error, Mode, Result, Scalar};

/// One `k` of the pointwise comparison. The `h_q` columns are `None` when
/// `r ≥ q`, outside the domain of `h_q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub n: usize,
    pub q: u64,
    pub k: usize,
    pub r: f64,
    pub p_omega: f64,
    pub p_cycles: f64,
    pub ratio: f64,
    pub hq_r: Option<f64>,
    /// `|ratio − h_q(r)|`
    pub residual: Option<f64>,
    /// `residual · q (ln n)² / k`
    pub normalized: Option<f64>,
    /// `|p_omega − p_cycles h_q(r)| / (P(Poisson(ln n) = k−1) · k / (q (ln n)²))`
    pub envelope: Option<f64>,
}

struct Point {
    p_omega: f64,
    p_cycles: f64,
    ratio: f64,
}

fn point<T: Scalar>(omega: &DistributionRow<T>, cycles: &DistributionRow<T>, k: usize) -> Point {
    let (po, pc) = (omega.prob(k), cycles.prob(k));
    let ratio = (po.clone() / pc.clone()).to_f64();
    Point { p_omega: po.to_f64(), p_cycles: pc.to_f64(), ratio }
}

fn points(pair: &RowPair, k: usize) -> Point {
    match pair {
        RowPair::Exact { omega, cycles } => point(omega, cycles, k),
        RowPair::Float { omega, cycles } => point(omega, cycles, k),
    }
}

fn comparison_row(pair: &RowPair, q: u64, n: usize, k: usize) -> Result<ComparisonRow> {
    let log_n = (n as f64).ln();
    let r = (k - 1) as f64 / log_n;
    let p = points(pair, k);
    let hq_r = if r < q as f64 { Some(hq(q, r, MAIN_TERM_TOL)?) } else { None };
    let residual = hq_r.map(|h| (p.ratio - h).abs());
    let normalized = residual.map(|e| e * q as f64 * log_n * log_n / k as f64);
    let scale = poisson_pmf(log_n, k - 1)? * k as f64 / (q as f64 * log_n * log_n);
    let envelope = hq_r.map(|h| (p.p_omega - p.p_cycles * h).abs() / scale);
    Ok(ComparisonRow {
        n,
        q,
        k,
        r,
        p_omega: p.p_omega,
        p_cycles: p.p_cycles,
        ratio: p.ratio,
        hq_r,
        residual,
        normalized,
        envelope,
    })
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Validation(format!("the comparison needs n >= 2 (got {n})")));
    }
    Ok(())
}

/// `min(n, ⌈3 ln n⌉)`
pub fn default_kmax(n: usize) -> usize {
    ((3.0 * (n as f64).ln()).ceil() as usize).clamp(1, n)
}

/// One [`ComparisonRow`] per `k ∈ [1, k_max]`; `k_max` defaults to
/// `min(n, ⌈3 ln n⌉)`.
pub fn ratio_report(q: u64, n: usize, k_max: Option<usize>, mode: Option<Mode>) -> Result<Vec<ComparisonRow>> {
    check_prime_power(q)?;
    check_n(n)?;
    let k_max = k_max.unwrap_or_else(|| default_kmax(n));
    if k_max == 0 || k_max > n {
        return Err(Error::Validation(format!("kmax = {k_max} outside [1, {n}]")));
    }
    let pair = row_pair(q, n, mode, k_max)?;
    (1..=k_max).map(|k| comparison_row(&pair, q, n, k)).collect()
}

/// The `envelope` statistic at one `k`, after checking `0 < δ < 1`,
/// `n ≥ 4(1−δ)/δ²`, `q ≥ (1−δ)^{−2}` and `r < q(1−δ)`.
pub fn theorem_residual(q: u64, n: usize, k: usize, delta: f64) -> Result<f64> {
    check_prime_power(q)?;
    check_n(n)?;
    if k == 0 || k > n {
        return Err(Error::Validation(format!("k = {k} outside [1, {n}]")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1) (got {delta})")));
    }
    let n_min = 4.0 * (1.0 - delta) / (delta * delta);
    if (n as f64) < n_min {
        return Err(Error::Domain(format!("n >= 4(1-delta)/delta^2 fails: {n} < {n_min}")));
    }
    let q_min = (1.0 - delta).powi(-2);
    if (q as f64) < q_min {
        return Err(Error::Domain(format!("q >= (1-delta)^-2 fails: {q} < {q_min}")));
    }
    let r = (k - 1) as f64 / (n as f64).ln();
    let r_max = q as f64 * (1.0 - delta);
    if r >= r_max {
        return Err(Error::Domain(format!("r < q(1-delta) fails: r = {r} >= {r_max}")));
    }
    let pair = row_pair(q, n, None, k)?;
    let row = comparison_row(&pair, q, n, k)?;
    Ok(row.envelope.expect("r < q"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbtRow {
    pub k: usize,
    pub ratio: f64,
    /// `|ratio − 1| · q (ln n − k) / k`
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbtReport {
    pub q: u64,
    pub n: usize,
    pub mode: Mode,
    pub rows: Vec<AbtRow>,
    /// Largest `value`, 0 for an empty report.
    pub supremum: f64,
}

/// `|ratio − 1| · q (ln n − k) / k` for every `k < ln n`.
pub fn abt_bound_check(q: u64, n: usize, mode: Option<Mode>) -> Result<AbtReport> {
    check_prime_power(q)?;
    if n < 3 {
        return Err(Error::Validation(format!("the check needs n >= 3 (got {n})")));
    }
    let log_n = (n as f64).ln();
    let ks: Vec<usize> = (1..n).take_while(|&k| (k as f64) < log_n).collect();
    let pair = row_pair(q, n, mode, ks.len().max(1))?;
    let rows: Vec<AbtRow> = ks
        .iter()
        .map(|&k| {
            let ratio = points(&pair, k).ratio;
            let value = (ratio - 1.0).abs() * q as f64 * (log_n - k as f64) / k as f64;
            AbtRow { k, ratio, value }
        })
        .collect();
    let supremum = rows.iter().map(|r| r.value).fold(0.0, f64::max);
    Ok(AbtReport { q, n, mode: pair.mode(), rows, supremum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_dist::{omega_dist_exact, stirling_row};
    use crate::prime_tab::prime_counts;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    #[test]
    fn first_row_is_n_pi_over_q_to_n() {
        for (q, n) in [(2u64, 100usize), (3, 60), (5, 40)] {
            let rows = ratio_report(q, n, Some(3), None).unwrap();
            let pi = prime_counts(q, n).unwrap().count(n).clone();
            let want = BigRational::new(BigInt::from(pi) * BigInt::from(n), BigInt::from(q).pow(n as u32));
            assert_eq!(rows[0].ratio, want.to_f64());
            assert_eq!(rows[0].hq_r, Some(1.0));
            let bound = 2.0 * (q as f64).powi(n as i32 / 2 - n as i32);
            assert!((rows[0].ratio - 1.0).abs() <= bound);
        }
    }

    #[test]
    fn residual_recomputed_from_exact_rows() {
        let rows = ratio_report(2, 100, Some(5), None).unwrap();
        let row = &rows[2];
        let po = omega_dist_exact(2, 100).unwrap().prob(3);
        let pc = stirling_row(100).unwrap().prob(3);
        let ratio = (po / pc).to_f64();
        let h = hq(2, 2.0 / 100f64.ln(), 1e-13).unwrap();
        assert_eq!(row.k, 3);
        assert!((row.residual.unwrap() - (ratio - h).abs()).abs() < 1e-14);
        assert!(row.residual.unwrap() >= 0.0);
    }

    #[test]
    fn near_r_equal_one() {
        let n = 1000;
        let k = (n as f64).ln().floor() as usize + 1;
        let rows = ratio_report(3, n, None, None).unwrap();
        assert_eq!(rows.len(), 21);
        let row = &rows[k - 1];
        assert!((row.hq_r.unwrap() - 1.0).abs() < 0.05);
        assert!(row.normalized.unwrap() < 50.0);
    }

    #[test]
    fn hq_columns_absent_beyond_q() {
        let rows = ratio_report(2, 50, Some(20), None).unwrap();
        for row in rows {
            assert_eq!(row.hq_r.is_none(), row.r >= 2.0);
            assert!(row.ratio > 0.0);
        }
    }

    #[test]
    fn kmax_validation() {
        assert!(ratio_report(2, 10, Some(11), None).is_err());
        assert!(ratio_report(2, 1, None, None).is_err());
        assert!(ratio_report(6, 10, None, None).is_err());
        assert_eq!(default_kmax(2), 2);
    }

    #[test]
    fn theorem_hypotheses() {
        let k1 = theorem_residual(2, 400, 1, 0.2).unwrap();
        assert!(k1.is_finite());
        let v = theorem_residual(2, 400, 5, 0.2).unwrap();
        assert!(v.is_finite() && v > 0.0);
        let msg = |e: Error| e.to_string();
        let e = theorem_residual(2, 400, 12, 0.2).unwrap_err();
        assert!(matches!(e, Error::Domain(_)) && msg(e).contains("r < q(1-delta)"));
        let e = theorem_residual(2, 50, 2, 0.2).unwrap_err();
        assert!(msg(e).contains("n >= 4(1-delta)/delta^2"));
        let e = theorem_residual(2, 400, 2, 0.5).unwrap_err();
        assert!(msg(e).contains("q >= (1-delta)^-2"));
        assert!(theorem_residual(2, 400, 2, 1.0).is_err());
    }

    #[test]
    fn abt_report() {
        let rep = abt_bound_check(5, 1000, None).unwrap();
        assert_eq!(rep.rows.len(), 6);
        assert!(rep.rows[0].value < 1e-100);
        assert!(rep.supremum < 10.0, "{}", rep.supremum);
        assert_eq!(abt_bound_check(2, 3, None).unwrap().rows.len(), 1);
        assert!(abt_bound_check(2, 2, None).is_err());
    }
}
