//! Invariant suites: the acceptance criteria plus the per-module
//! properties, each reported as a [`CheckResult`].
//!
//! `Suite::All` runs the full grids; `Suite::Fast` shrinks them to stay well
//! under a minute.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    interval_bounds, moments, ratio_report, row_pair, split_sums, top_mass_gap, total_variation, tv_report,
    tv_scaling_study,
};
use crate::asymptotics::{
    binom_gamma_residual, direct_product_tail, hq, hq_direct_product, int2_identity_residual, poisson_tail,
    poisson_tail_bound,
};
use crate::exact_dist::{
    binomial, brute_force_omega, omega_counts, omega_dist_float, stirling_row, stirling_row_float, StirlingRows,
};
use crate::prime_tab::prime_counts;
use crate::{Error, Mode, Result};

/// Frozen bound on `sup_{k ≤ 1.5 ln n} |ratio − h_q(r)|·q(ln n)²/k` over
/// q ∈ {2,3,5}, n ∈ {100, 300, 1000, 3000}. Largest observed: 3.81 (q=2, n=3000).
pub const K0: f64 = 5.0;
/// Required relative drop of the residual at `k = round(ln n)+1`, q=2, n=100 → 3000.
/// Observed: 0.49.
pub const RESIDUAL_DROP: f64 = 0.25;
/// Band for `d_tv·q·√(ln n)`. Observed range on the grid: [0.25, 0.53].
pub const SCALED_BAND: (f64, f64) = (0.05, 5.0);
/// `S_2, S_3 ≤ DOMINANCE·S_1` at (q, n) = (9, 10⁴).
pub const DOMINANCE: f64 = 0.2;
/// `|mean − ln n|`, `|variance − ln n|`. Observed maxima: 1.27 and 1.80.
pub const MEAN_BAND: f64 = 2.0;
pub const VARIANCE_BAND: f64 = 3.0;
/// `d_tv ≤ TV_Q_FACTOR/q`.
pub const TV_Q_FACTOR: f64 = 2.0;
/// Empirical floor of `h_q` on `[0, 1]`.
pub const HQ_FLOOR: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Suite {
    #[default]
    Fast,
    All,
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(Suite::Fast),
            "all" => Ok(Suite::All),
            _ => Err(Error::Validation(format!("unknown suite '{s}' (expected fast or all)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

type Outcome = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check(id: &str, name: &str, f: impl FnOnce() -> Outcome) -> CheckResult {
    let (passed, detail) = match f() {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckResult { id: id.into(), name: name.into(), passed, detail }
}

/// Exact Euler-product counts equal brute-force factorization counts.
pub fn criterion_1(suite: Suite) -> CheckResult {
    let budget = if suite == Suite::All { 2_000_000u64 } else { 100_000 };
    check("c1", "omega counts match brute-force factorization", || {
        let qs = [2u64, 3, 4, 5, 7, 8, 9];
        let cells: Vec<String> = qs
            .par_iter()
            .map(|&q| {
                let mut n = 1usize;
                while q.pow(n as u32 + 1) <= budget {
                    n += 1;
                }
                let brute = lib(brute_force_omega(q, n))?;
                let dp = lib(omega_counts(q, n))?;
                for m in 0..=n {
                    ensure(brute.row(m) == dp.row(m), || format!("q={q} m={m}: rows differ"))?;
                }
                Ok(format!("q={q} n<={n}"))
            })
            .collect::<std::result::Result<_, String>>()?;
        Ok(cells.join(" "))
    })
}

/// Row sums, first and last entries of the count tables; Stirling sums.
pub fn criterion_2(suite: Suite) -> CheckResult {
    let n_max = if suite == Suite::All { 300 } else { 60 };
    check("c2", "structural identities", || {
        for q in [2u64, 3, 5] {
            let table = lib(omega_counts(q, n_max))?;
            let primes = lib(prime_counts(q, n_max))?;
            let mut qn = BigUint::one();
            for n in 1..=n_max {
                qn *= q;
                let row = table.row(n);
                ensure(row.iter().sum::<BigUint>() == qn, || format!("q={q} n={n}: sum != q^n"))?;
                ensure(&row[1] == primes.count(n), || format!("q={q} n={n}: N(n,1) != pi_q(n)"))?;
                ensure(row[n] == binomial(q + n as u64 - 1, n as u64), || {
                    format!("q={q} n={n}: N(n,n) != C(q+n-1,n)")
                })?;
            }
        }
        let mut fact = BigUint::one();
        for (n, row) in StirlingRows::new().enumerate().skip(1).take(n_max) {
            fact *= n;
            ensure(row.iter().sum::<BigUint>() == fact, || format!("n={n}: sum |s(n,k)| != n!"))?;
            let weighted: BigUint = row.iter().enumerate().map(|(k, s)| s << k).sum();
            ensure(weighted == &fact * (n + 1), || format!("n={n}: sum |s(n,k)| 2^k != (n+1)!"))?;
        }
        Ok(format!("n <= {n_max}, q in {{2,3,5}}"))
    })
}

/// Float rows agree with exact rows to 1e-12.
pub fn criterion_3(suite: Suite) -> CheckResult {
    let step = if suite == Suite::All { 1 } else { 13 };
    check("c3", "exact and float rows agree", || {
        let ns: Vec<usize> = (1..=200).step_by(step).collect();
        let mut worst = 0.0f64;
        for q in [2u64, 3, 5] {
            let table = lib(omega_counts(q, 200))?;
            let w = ns
                .par_iter()
                .map(|&n| {
                    let exact = lib(table.distribution(n))?.to_f64();
                    let float = lib(omega_dist_float(q, n, None))?;
                    let mut d = max_abs_diff(exact.mass(), float.mass());
                    if q == 2 {
                        let ce = lib(stirling_row(n))?.to_f64();
                        let cf = lib(stirling_row_float(n))?;
                        d = d.max(max_abs_diff(ce.mass(), cf.mass()));
                    }
                    Ok(d)
                })
                .collect::<std::result::Result<Vec<f64>, String>>()?
                .into_iter()
                .fold(0.0, f64::max);
            worst = worst.max(w);
        }
        ensure(worst <= 1e-12, || format!("max difference {worst:e}"))?;
        Ok(format!("max difference {worst:e} over {} values of n", ns.len()))
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    (0..a.len().max(b.len()))
        .map(|i| (a.get(i).copied().unwrap_or(0.0) - b.get(i).copied().unwrap_or(0.0)).abs())
        .fold(0.0, f64::max)
}

/// `h_q` against the direct product, at 1, and above its lower bound.
pub fn criterion_4(_suite: Suite) -> CheckResult {
    check("c4", "h_q certification", || {
        let mut worst = 0.0f64;
        for q in [2u64, 3, 5] {
            for x in [0.25, 0.5, 1.0, 1.5] {
                let series: f64 = lib(hq(q, x, 1e-12))?;
                let direct = lib(hq_direct_product(q, x, 30))?;
                let allowed = 1e-9 + direct * direct_product_tail(q, x, 30).exp_m1();
                let gap = (series - direct).abs();
                ensure(gap <= allowed, || format!("q={q} x={x}: |hq - direct| = {gap:e} > {allowed:e}"))?;
                worst = worst.max(gap);
            }
            let one: f64 = lib(hq(q, 1.0, 1e-12))?;
            ensure((one - 1.0).abs() <= 1e-12, || format!("q={q}: hq(1) = {one}"))?;
        }
        for q in [2u64, 3, 5, 9] {
            let hi = 0.9 * q as f64;
            for i in 0..50 {
                let x = 1.0 + (hi - 1.0) * i as f64 / 49.0;
                let h: f64 = lib(hq(q, x, 1e-12))?;
                let lower = 1.0 + (x - 1.0) / (2.0 * q as f64);
                ensure(h >= lower, || format!("q={q} x={x}: hq = {h} < {lower}"))?;
            }
        }
        Ok(format!("max |hq - direct| = {worst:e}"))
    })
}

/// Normalized residual bounded by [`K0`]; residual at `k*` drops.
pub fn criterion_5(suite: Suite) -> CheckResult {
    let ns: &[usize] = if suite == Suite::All { &[100, 300, 1000, 3000] } else { &[100, 300] };
    check("c5", "pointwise ratio residuals", || {
        let cells: Vec<(u64, usize)> = [2u64, 3, 5].iter().flat_map(|&q| ns.iter().map(move |&n| (q, n))).collect();
        let sups = cells
            .par_iter()
            .map(|&(q, n)| {
                let k_max = (1.5 * (n as f64).ln()).floor() as usize;
                let rows = lib(ratio_report(q, n, Some(k_max), None))?;
                let sup = rows.iter().filter_map(|r| r.normalized).fold(0.0, f64::max);
                Ok(sup)
            })
            .collect::<std::result::Result<Vec<f64>, String>>()?;
        let mut detail = Vec::new();
        for (&(q, n), &sup) in cells.iter().zip(&sups) {
            ensure(sup <= K0, || format!("q={q} n={n}: normalized sup {sup} > {K0}"))?;
        }
        let sup = sups.iter().cloned().fold(0.0, f64::max);
        detail.push(format!("sup normalized {sup:.4} <= {K0}"));
        let (first, last) = (ns[0], ns[ns.len() - 1]);
        let r0 = residual_at_k_star(2, first)?;
        let r1 = residual_at_k_star(2, last)?;
        let drop = 1.0 - r1 / r0;
        if suite == Suite::All {
            ensure(drop >= RESIDUAL_DROP, || format!("residual drop {drop:.3} < {RESIDUAL_DROP}"))?;
        }
        detail.push(format!("residual at k* drops {:.1}% from n={first} to n={last}", 100.0 * drop));
        Ok(detail.join("; "))
    })
}

fn residual_at_k_star(q: u64, n: usize) -> std::result::Result<f64, String> {
    let k = (n as f64).ln().round() as usize + 1;
    let rows = lib(ratio_report(q, n, Some(k), None))?;
    rows[k - 1].residual.ok_or_else(|| format!("r >= q at n={n}"))
}

/// `d_tv·q·√(ln n)` inside [`SCALED_BAND`]; exact identity at `k = n`.
pub fn criterion_6(suite: Suite) -> CheckResult {
    let ns: &[usize] = if suite == Suite::All { &[100, 1000, 10_000] } else { &[100, 1000] };
    let n_top = if suite == Suite::All { 50 } else { 20 };
    check("c6", "total variation scaling", || {
        let reports = lib(tv_scaling_study(&[2, 3, 5, 7, 9], ns, Some(Mode::Float)))?;
        let (lo, hi) = SCALED_BAND;
        let mut range = (f64::INFINITY, 0.0f64);
        for r in &reports {
            ensure(r.scaled >= lo && r.scaled <= hi, || {
                format!("q={} n={}: scaled {} outside [{lo}, {hi}]", r.q, r.n, r.scaled)
            })?;
            range = (range.0.min(r.scaled), range.1.max(r.scaled));
        }
        for q in [2u64, 3, 5] {
            for n in 1..=n_top {
                let (lhs, rhs) = lib(top_mass_gap(q, n))?;
                ensure(lhs == rhs, || format!("q={q} n={n}: k=n identity fails"))?;
                let floor = BigRational::new(
                    BigInt::from(binomial(n as u64, 2)),
                    BigInt::from(q) * BigInt::from(factorial(n)),
                );
                ensure(rhs >= floor, || format!("q={q} n={n}: k=n gap below C(n,2)/(q n!)"))?;
            }
        }
        Ok(format!("scaled in [{:.4}, {:.4}]; k=n identity exact for n <= {n_top}", range.0, range.1))
    })
}

fn factorial(n: usize) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, i| acc * i)
}

/// Exact and float partition identities; `S_1` dominates at (9, 10⁴).
pub fn criterion_7(suite: Suite) -> CheckResult {
    let (q_big, n_big) = if suite == Suite::All { (9u64, 10_000usize) } else { (9, 1000) };
    check("c7", "interval decomposition", || {
        for (q, n) in [(2u64, 50usize), (3, 200), (5, 120), (9, 200)] {
            let (a, b) = match lib(row_pair(q, n, Some(Mode::Exact), 1))? {
                crate::analysis::RowPair::Exact { omega, cycles } => (omega, cycles),
                _ => unreachable!("exact mode requested"),
            };
            let [s1, s2, s3] = split_sums(&a, &b, interval_bounds(q, n));
            let d = lib(total_variation(&a, &b))?;
            ensure(s1 + s2 + s3 == d * BigRational::from_integer(2.into()), || {
                format!("q={q} n={n}: exact S1+S2+S3 != 2 d_tv")
            })?;
        }
        let mut float_gap = 0.0f64;
        for (q, n) in [(2u64, 1000usize), (9, n_big)] {
            let r = lib(tv_report(q, n, Some(Mode::Float)))?;
            float_gap = float_gap.max((r.s1 + r.s2 + r.s3 - 2.0 * r.d_tv).abs());
        }
        ensure(float_gap <= 1e-10, || format!("float |S1+S2+S3 - 2 d_tv| = {float_gap:e}"))?;
        let r = lib(tv_report(q_big, n_big, Some(Mode::Float)))?;
        let (f2, f3) = (r.s2 / r.s1, r.s3 / r.s1);
        let detail = format!("q={q_big} n={n_big}: S2/S1 = {f2:.4}, S3/S1 = {f3:.4}, bound {DOMINANCE}");
        ensure(f2 <= DOMINANCE && f3 <= DOMINANCE, || detail.clone())?;
        Ok(detail)
    })
}

/// Poisson tail bound, Gamma approximation of binomials, vanishing-coefficient identity.
pub fn criterion_8(_suite: Suite) -> CheckResult {
    check("c8", "auxiliary estimates", || {
        for lambda in [0.5, 1.0, 5.0, 20.0] {
            for i in 1..=60 {
                let x = lambda + 3.0 * lambda * i as f64 / 60.0;
                let tail = lib(poisson_tail(lambda, x))?;
                let bound = lib(poisson_tail_bound(lambda, x))?;
                ensure(tail <= bound, || format!("lambda={lambda} x={x}: tail {tail:e} > bound {bound:e}"))?;
            }
        }
        let mut ratios = Vec::new();
        for z in [0.5, 1.0, 2.0, 3.0] {
            let scaled: Vec<f64> = [10usize, 100, 1000]
                .iter()
                .map(|&n| lib(binom_gamma_residual(n, z)).map(|e| e * (n as f64).powf(2.0 - z)))
                .collect::<std::result::Result<_, _>>()?;
            if z == 1.0 {
                ensure(scaled.iter().all(|&v| v < 1e-12), || format!("z=1 residuals {scaled:?}"))?;
                continue;
            }
            for w in scaled.windows(2) {
                let ratio = w[1] / w[0];
                ensure((1.0 / 3.0..=3.0).contains(&ratio), || format!("z={z}: consecutive ratio {ratio}"))?;
                ratios.push(ratio);
            }
        }
        let mut worst = 0.0f64;
        for n in [10usize, 100, 1000, 10_000] {
            for k in 2..=20.min(n) {
                let e = lib(int2_identity_residual(n, k))?;
                ensure(e <= 1e-14, || format!("n={n} k={k}: identity residual {e:e}"))?;
                worst = worst.max(e);
            }
        }
        Ok(format!("binomial ratios in [{:.3}, {:.3}]; identity residual <= {worst:e}",
            ratios.iter().cloned().fold(f64::INFINITY, f64::min),
            ratios.iter().cloned().fold(0.0, f64::max)))
    })
}

/// Mean and variance within `O(1)` of `ln n`.
pub fn criterion_9(suite: Suite) -> CheckResult {
    let ns: &[usize] = if suite == Suite::All { &[1000, 10_000] } else { &[1000] };
    check("c9", "moments", || {
        let mut worst = (0.0f64, 0.0f64);
        for q in [2u64, 5] {
            for &n in ns {
                let (omega, cycles) = lib(row_pair(q, n, Some(Mode::Float), 1))?.to_f64();
                let l = (n as f64).ln();
                for (name, row) in [("omega", &omega), ("cycles", &cycles)] {
                    let m = moments(row);
                    let (dm, dv) = ((m.mean - l).abs(), (m.variance - l).abs());
                    ensure(dm <= MEAN_BAND && dv <= VARIANCE_BAND, || {
                        format!("{name} q={q} n={n}: |mean-ln n| = {dm}, |var-ln n| = {dv}")
                    })?;
                    worst = (worst.0.max(dm), worst.1.max(dv));
                }
            }
        }
        Ok(format!("|mean - ln n| <= {:.3}, |var - ln n| <= {:.3}", worst.0, worst.1))
    })
}

/// Criteria 1–9 in order.
pub fn acceptance(suite: Suite) -> Vec<CheckResult> {
    let checks: [fn(Suite) -> CheckResult; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    checks.iter().map(|c| c(suite)).collect()
}

/// `d_tv ≤ 2/q` on the scaling grid.
pub fn tv_bounded_by_two_over_q(suite: Suite) -> CheckResult {
    let ns: &[usize] = if suite == Suite::All { &[100, 1000, 10_000] } else { &[100, 400] };
    check("tv-q", "d_tv <= 2/q", || {
        for r in lib(tv_scaling_study(&[2, 3, 4, 5, 7, 8, 9], ns, None))? {
            ensure(r.d_tv <= TV_Q_FACTOR / r.q as f64, || format!("q={} n={}: d_tv = {}", r.q, r.n, r.d_tv))?;
        }
        Ok("all cells".into())
    })
}

/// Residual at `k*` nonincreasing in `n` within 10% slack, q=2.
pub fn residual_nonincreasing(suite: Suite) -> CheckResult {
    let ns: &[usize] = if suite == Suite::All { &[100, 300, 1000, 3000] } else { &[100, 300] };
    check("res-mono", "residual at k* nonincreasing in n", || {
        let rs = ns.iter().map(|&n| residual_at_k_star(2, n)).collect::<std::result::Result<Vec<_>, _>>()?;
        for (w, n) in rs.windows(2).zip(&ns[1..]) {
            ensure(w[1] <= 1.1 * w[0], || format!("n={n}: {} > 1.1 x {}", w[1], w[0]))?;
        }
        Ok(format!("{rs:.4?}"))
    })
}

/// Symmetry and triangle inequality on exact rows.
pub fn tv_is_metric(_suite: Suite) -> CheckResult {
    check("tv-metric", "total variation is a metric", || {
        let n = 40;
        let mut rows = vec![lib(stirling_row(n))?];
        for q in [2u64, 3, 5, 9] {
            rows.push(lib(omega_counts(q, n))?.distribution(n).map_err(|e| e.to_string())?);
        }
        for a in &rows {
            for b in &rows {
                let ab = lib(total_variation(a, b))?;
                ensure(ab == lib(total_variation(b, a))?, || "asymmetric".into())?;
                ensure(ab.is_zero() == (a == b), || "d(a,b) = 0 iff a = b fails".into())?;
                for c in &rows {
                    let via = lib(total_variation(a, c))? + lib(total_variation(c, b))?;
                    ensure(ab <= via, || "triangle inequality fails".into())?;
                }
            }
        }
        Ok(format!("{} rows at n={n}", rows.len()))
    })
}

/// `h_q − 1` has the sign of `x − 1`; `h_q > 0.25` on `[0, 1]`; the direct
/// product is nondecreasing in the degree for `x > 1`.
pub fn hq_shape(suite: Suite) -> CheckResult {
    let points = if suite == Suite::All { 200 } else { 40 };
    check("hq-shape", "h_q sign, floor and direct-product monotonicity", || {
        let mut min_unit = f64::INFINITY;
        for q in [2u64, 3, 4, 5, 7, 9] {
            let hi = 0.9 * q as f64;
            for i in 1..=points {
                let x = hi * i as f64 / points as f64;
                let h: f64 = lib(hq(q, x, 1e-12))?;
                if x != 1.0 {
                    ensure((h - 1.0).signum() == (x - 1.0).signum(), || format!("q={q} x={x}: h = {h}"))?;
                }
                if x <= 1.0 {
                    min_unit = min_unit.min(h);
                }
            }
            for x in [1.25, 0.5 * (1.0 + hi), hi] {
                let mut prev = 0.0;
                for d in 1..=30 {
                    let v = lib(hq_direct_product(q, x, d))?;
                    ensure(v >= prev, || format!("q={q} x={x}: direct product drops at d={d}"))?;
                    prev = v;
                }
            }
        }
        ensure(min_unit > HQ_FLOOR, || format!("min h_q on [0,1] = {min_unit}"))?;
        Ok(format!("min h_q on [0,1] = {min_unit:.4}"))
    })
}

/// Every check of the suite: acceptance criteria first, then invariants.
pub fn run_suite(suite: Suite) -> Vec<CheckResult> {
    let mut out = acceptance(suite);
    let extra: [fn(Suite) -> CheckResult; 4] =
        [tv_bounded_by_two_over_q, residual_nonincreasing, tv_is_metric, hq_shape];
    out.extend(extra.iter().map(|c| c(suite)));
    out
}
