//! Comparison of `Ω(f_n)` with `K(π_n)`: pointwise ratio residuals, total
//! variation, its split over three ranges of `k`, and moments.
//!
//! Rows are exact for `n ≤ 400` and float otherwise unless a mode is forced;
//! every report records the mode it was computed in.

mod compare;
mod moments;
mod tv;

pub use compare::{abt_bound_check, default_kmax, ratio_report, theorem_residual, AbtReport, AbtRow, ComparisonRow};
pub use moments::{moments, Moments};
pub use tv::{
    interval_bounds, split_sums, top_mass_gap, total_variation, tv_decomposition, tv_report,
    tv_scaling_study, Intervals, TVReport,
};

use crate::exact_dist::{
    certified_kcap, omega_dist_exact, omega_dist_float, stirling_row, stirling_row_float,
    EXACT_OMEGA_CAP,
};
use crate::{ExactRow, FloatRow, Mode, Result};

/// Exact when `n` is within the exact-mode cap, float otherwise.
pub fn resolve_mode(n: usize, requested: Option<Mode>) -> Mode {
    requested.unwrap_or(if n <= EXACT_OMEGA_CAP { Mode::Exact } else { Mode::Float })
}

/// The two rows being compared, in one mode.
#[derive(Debug, Clone)]
pub enum RowPair {
    Exact { omega: ExactRow, cycles: ExactRow },
    Float { omega: FloatRow, cycles: FloatRow },
}

impl RowPair {
    pub fn mode(&self) -> Mode {
        match self {
            RowPair::Exact { .. } => Mode::Exact,
            RowPair::Float { .. } => Mode::Float,
        }
    }

    /// Both rows as doubles: `(omega, cycles)`.
    pub fn to_f64(&self) -> (FloatRow, FloatRow) {
        match self {
            RowPair::Exact { omega, cycles } => (omega.to_f64(), cycles.to_f64()),
            RowPair::Float { omega, cycles } => (omega.clone(), cycles.clone()),
        }
    }
}

/// `P(Ω(f_n) = ·)` and `P(K(π_n) = ·)`. In float mode the `Ω` row is cut at
/// the larger of [`certified_kcap`] and `min_cap`.
pub fn row_pair(q: u64, n: usize, mode: Option<Mode>, min_cap: usize) -> Result<RowPair> {
    crate::prime_tab::check_prime_power(q)?;
    match resolve_mode(n, mode) {
        Mode::Exact => Ok(RowPair::Exact { omega: omega_dist_exact(q, n)?, cycles: stirling_row(n)? }),
        Mode::Float => {
            let cap = certified_kcap(q, n).max(min_cap).min(n.max(1));
            Ok(RowPair::Float {
                omega: omega_dist_float(q, n, Some(cap))?,
                cycles: stirling_row_float(n)?,
            })
        }
    }
}
