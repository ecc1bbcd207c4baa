//! Exact and asymptotic distributions of the number of prime factors of a
//! random monic polynomial over `F_q`, compared with the number of cycles of a
//! uniformly random permutation.
//!
//! Modules:
//!
//! * [`prime_tab`]: counts of monic irreducibles per degree.
//! * [`exact_dist`]: the two distributions, exactly and in floating point,
//!   plus a brute-force factorization oracle.
//! * [`asymptotics`]: `h_q(x)`, Gamma/Poisson helpers and the main terms.
//! * [`analysis`]: ratio residuals, total variation and its decomposition.
//! * [`cli`], [`report`], [`verify`]: command line, serialization and the
//!   invariant suites.
//!
//! All logarithms are natural.

pub mod analysis;
pub mod asymptotics;
pub mod cli;
pub mod error;
pub mod exact_dist;
pub mod prime_tab;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};
pub use exact_dist::{DistributionRow, Label};
pub use scalar::{Mode, Real, Scalar};

/// Probability rows in exact rational arithmetic.
pub type ExactRow = DistributionRow<num_rational::BigRational>;
/// Probability rows in double precision.
pub type FloatRow = DistributionRow<f64>;
/// `h_q` log-series in double precision.
pub type HqSeries64 = asymptotics::HqSeries<f64>;
