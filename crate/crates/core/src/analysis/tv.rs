use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{row_pair, RowPair};
use crate::exact_dist::{omega_counts, stirling_numbers};
use crate::prime_tab::check_prime_power;
use crate::{DistributionRow, Error, Mode, Result, Scalar};

/// `(1/2) Σ_k |a(k) − b(k)|`.
pub fn total_variation<T: Scalar>(a: &DistributionRow<T>, b: &DistributionRow<T>) -> Result<T> {
    if a.n() != b.n() {
        return Err(Error::Validation(format!(
            "total variation needs rows of equal length (got {} and {})",
            a.n(),
            b.n()
        )));
    }
    let sum = a
        .mass()
        .iter()
        .zip(b.mass())
        .fold(T::zero(), |acc, (x, y)| acc + (x.clone() - y.clone()).abs());
    Ok(sum / T::from_count(2))
}

/// Last index of each of `I_1 = [1, 1.5 L]`, `I_2 = (1.5 L, √q L]` and
/// `I_3 = (√q L, n]`, `L = ln n`, clipped to `[1, n]`. When `√q ≤ 3/2` the
/// middle range is empty and `I_3` starts right after `I_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Intervals {
    pub i1_end: usize,
    pub i2_end: usize,
    pub n: usize,
}

pub fn interval_bounds(q: u64, n: usize) -> Intervals {
    let log_n = (n.max(1) as f64).ln();
    let i1_end = ((1.5 * log_n).floor() as usize).min(n);
    let sq = (q as f64).sqrt();
    let i2_end = if sq > 1.5 {
        ((sq * log_n).floor() as usize).clamp(i1_end, n)
    } else {
        i1_end
    };
    Intervals { i1_end, i2_end, n }
}

/// `S_i = Σ_{k ∈ I_i} |a(k) − b(k)|`; the three sums add to `2·d_TV`.
pub fn split_sums<T: Scalar>(a: &DistributionRow<T>, b: &DistributionRow<T>, iv: Intervals) -> [T; 3] {
    let mut s = [T::zero(), T::zero(), T::zero()];
    for k in 1..=a.n().min(b.n()) {
        let slot = if k <= iv.i1_end {
            0
        } else if k <= iv.i2_end {
            1
        } else {
            2
        };
        s[slot] = s[slot].clone() + (a.prob(k) - b.prob(k)).abs();
    }
    s
}

/// Total variation between `P(Ω(f_n) = ·)` and `P(K(π_n) = ·)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TVReport {
    pub n: usize,
    pub q: u64,
    pub mode: Mode,
    pub d_tv: f64,
    /// `p/q` in exact mode.
    pub d_tv_exact: Option<String>,
    /// `d_tv · q · √(ln n)`
    pub scaled: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
}

fn report_from<T: Scalar>(
    q: u64,
    n: usize,
    omega: &DistributionRow<T>,
    cycles: &DistributionRow<T>,
) -> Result<(T, [T; 3])> {
    let d = total_variation(omega, cycles)?;
    let s = split_sums(omega, cycles, interval_bounds(q, n));
    Ok((d, s))
}

/// d_TV with its decomposition, exact for `n ≤ 400` unless a mode is forced.
pub fn tv_report(q: u64, n: usize, mode: Option<Mode>) -> Result<TVReport> {
    check_prime_power(q)?;
    let pair = row_pair(q, n, mode, 1)?;
    let (d_tv, d_tv_exact, s) = match &pair {
        RowPair::Exact { omega, cycles } => {
            let (d, s) = report_from(q, n, omega, cycles)?;
            (d.to_f64(), Some(d.to_string()), s.map(|v| v.to_f64()))
        }
        RowPair::Float { omega, cycles } => {
            let (d, s) = report_from(q, n, omega, cycles)?;
            (d, None, s)
        }
    };
    let scaled = d_tv * q as f64 * (n as f64).ln().sqrt();
    Ok(TVReport {
        n,
        q,
        mode: pair.mode(),
        d_tv,
        d_tv_exact,
        scaled,
        s1: s[0],
        s2: s[1],
        s3: s[2],
    })
}

/// `(S_1, S_2, S_3)` for `n ≥ 2`.
pub fn tv_decomposition(q: u64, n: usize, mode: Option<Mode>) -> Result<(f64, f64, f64)> {
    if n < 2 {
        return Err(Error::Validation("the decomposition needs n >= 2".into()));
    }
    let r = tv_report(q, n, mode)?;
    Ok((r.s1, r.s2, r.s3))
}

/// One [`TVReport`] per `(q, n)`, computed in parallel and sorted by `(q, n)`.
pub fn tv_scaling_study(q_list: &[u64], n_list: &[usize], mode: Option<Mode>) -> Result<Vec<TVReport>> {
    for &q in q_list {
        check_prime_power(q)?;
    }
    let cells: Vec<(u64, usize)> = q_list
        .iter()
        .flat_map(|&q| n_list.iter().map(move |&n| (q, n)))
        .collect();
    let mut out = cells
        .par_iter()
        .map(|&(q, n)| tv_report(q, n, mode))
        .collect::<Result<Vec<_>>>()?;
    out.sort_by(|a, b| (a.q, a.n).cmp(&(b.q, b.n)));
    out.dedup_by(|a, b| (a.q, a.n) == (b.q, b.n));
    Ok(out)
}

/// `|P(Ω(f_n) = n) − P(K(π_n) = n)|` from the count tables, and the closed
/// form `(1/n!)(Π_{i=1}^{n−1}(1 + i/q) − 1)`.
pub fn top_mass_gap(q: u64, n: usize) -> Result<(BigRational, BigRational)> {
    check_prime_power(q)?;
    if n == 0 {
        return Err(Error::Validation("n must be at least 1".into()));
    }
    let table = omega_counts(q, n)?;
    let qn = BigInt::from(q).pow(n as u32);
    let p_omega = BigRational::new(BigInt::from(table.row(n)[n].clone()), qn);
    let s = stirling_numbers(n);
    let fact: BigUint = s.iter().sum();
    let inv_fact = BigRational::new(BigInt::one(), BigInt::from(fact));
    let p_cycles = BigRational::new(BigInt::from(s[n].clone()), BigInt::one()) * &inv_fact;
    let lhs = (p_omega - p_cycles).abs();
    let qr = BigRational::from_integer(BigInt::from(q));
    let mut prod = BigRational::one();
    for i in 1..n {
        prod *= BigRational::one() + BigRational::from_integer(BigInt::from(i)) / &qr;
    }
    let rhs = (prod - BigRational::one()) * inv_fact;
    debug_assert!(!rhs.is_negative() || rhs.is_zero());
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact_dist::{omega_dist_exact, stirling_row};
    use crate::{ExactRow, Label};

    fn ratio(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn small_cases() {
        let a = stirling_row(2).unwrap();
        let b = omega_dist_exact(2, 2).unwrap();
        assert_eq!(total_variation(&a, &b).unwrap(), ratio(1, 4));
        assert!(total_variation(&a, &a).unwrap().is_zero());
        let p1 = ExactRow::point_mass(Label::CycleCount, None, 4, 1).unwrap();
        let p2 = ExactRow::point_mass(Label::CycleCount, None, 4, 2).unwrap();
        assert_eq!(total_variation(&p1, &p2).unwrap(), ratio(1, 1));
        assert!(total_variation(&p1, &stirling_row(3).unwrap()).is_err());
    }

    #[test]
    fn report_for_n2() {
        let r = tv_report(2, 2, None).unwrap();
        assert_eq!(r.mode, Mode::Exact);
        assert_eq!(r.d_tv_exact.as_deref(), Some("1/4"));
        assert_eq!(r.d_tv, 0.25);
        assert!((r.scaled - 0.5 * 2f64.ln().sqrt()).abs() < 1e-15);
        assert!((r.scaled - 0.416).abs() < 1e-3);
        let one = tv_report(3, 1, None).unwrap();
        assert_eq!(one.d_tv, 0.0);
    }

    #[test]
    fn intervals_partition() {
        let iv = interval_bounds(2, 1000);
        assert_eq!(iv.i1_end, iv.i2_end);
        let iv9 = interval_bounds(9, 10_000);
        assert_eq!(iv9.i1_end, 13);
        assert_eq!(iv9.i2_end, 27);
        let r = tv_report(2, 50, None).unwrap();
        assert_eq!(r.s2, 0.0);
    }

    #[test]
    fn decomposition_sums_to_twice_tv_exactly() {
        for (q, n) in [(2u64, 30usize), (5, 40), (9, 25)] {
            let a = omega_dist_exact(q, n).unwrap();
            let b = stirling_row(n).unwrap();
            let [s1, s2, s3] = split_sums(&a, &b, interval_bounds(q, n));
            let d = total_variation(&a, &b).unwrap();
            assert_eq!(s1 + s2 + s3, d * BigRational::from_integer(2.into()));
        }
    }

    #[test]
    fn study_is_sorted_and_deduplicated() {
        let rows = tv_scaling_study(&[5, 2], &[20, 10, 10], None).unwrap();
        let keys: Vec<(u64, usize)> = rows.iter().map(|r| (r.q, r.n)).collect();
        assert_eq!(keys, vec![(2, 10), (2, 20), (5, 10), (5, 20)]);
        assert!(tv_scaling_study(&[6], &[10], None).is_err());
    }

    #[test]
    fn top_mass_identity() {
        for q in [2u64, 3, 5] {
            for n in [1usize, 2, 7, 20] {
                let (lhs, rhs) = top_mass_gap(q, n).unwrap();
                assert_eq!(lhs, rhs, "q={q} n={n}");
            }
        }
    }

    #[test]
    fn float_and_exact_reports_agree() {
        let e = tv_report(3, 200, Some(Mode::Exact)).unwrap();
        let f = tv_report(3, 200, Some(Mode::Float)).unwrap();
        assert_eq!(f.mode, Mode::Float);
        assert!((e.d_tv - f.d_tv).abs() < 1e-12);
        assert!((e.s1 - f.s1).abs() < 1e-12);
    }
}
