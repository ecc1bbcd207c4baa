//! Scalar abstractions.
//!
//! Two families of numbers flow through the crate:
//!
//! * [`Real`]: binary floating point (`f32`, `f64`) for special functions,
//!   `h_q` evaluation and the float-mode dynamic programs.
//! * [`Scalar`]: anything a probability mass can be stored in. This covers the
//!   floats and exact [`BigRational`] values, so total variation, moments and
//!   the cycle-count recurrence are written once for both modes.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Exact rational arithmetic or binary floating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        }
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Floating point type used by the numerical routines.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`, used for literal constants.
    fn c(v: f64) -> Self {
        Self::from_f64(v).expect("float conversion")
    }

    fn from_count(v: usize) -> Self {
        Self::from_usize(v).expect("float conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Value type of a probability mass function.
pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync {
    const MODE: Mode;

    fn from_count(v: usize) -> Self;

    /// Nearest `f64` (correctly rounded for rationals).
    fn to_f64(&self) -> f64;

    /// `Σ_k 2^k · mass[k-1]` for a mass vector indexed from `k = 1`.
    fn sum_pow2_weighted(mass: &[Self]) -> Self;
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const MODE: Mode = Mode::Float;

            fn from_count(v: usize) -> Self {
                v as $t
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn sum_pow2_weighted(mass: &[Self]) -> Self {
                // log-sum-exp over k·ln 2 + ln mass[k]; 2^k alone overflows past k = 1023.
                let terms: Vec<f64> = mass
                    .iter()
                    .enumerate()
                    .filter(|(_, &m)| m > 0.0)
                    .map(|(i, &m)| (i + 1) as f64 * std::f64::consts::LN_2 + (m as f64).ln())
                    .collect();
                let Some(top) = terms.iter().cloned().reduce(f64::max) else {
                    return 0.0;
                };
                let s: f64 = terms.iter().map(|t| (t - top).exp()).sum();
                (top + s.ln()).exp() as $t
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

impl Scalar for BigRational {
    const MODE: Mode = Mode::Exact;

    fn from_count(v: usize) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn sum_pow2_weighted(mass: &[Self]) -> Self {
        let mut pow = BigInt::one();
        let mut acc = BigRational::zero();
        for m in mass {
            pow <<= 1;
            acc += m * BigRational::from_integer(pow.clone());
        }
        acc
    }
}
