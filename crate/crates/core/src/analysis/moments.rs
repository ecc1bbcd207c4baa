use serde::{Deserialize, Serialize};

use crate::{DistributionRow, Scalar};

/// Mean, variance and `E[2^k]` of a row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Moments<T> {
    pub mean: T,
    pub variance: T,
    pub e_two_to_k: T,
}

/// Exact for rational rows; `E[2^k]` is accumulated in log-space for floats.
pub fn moments<T: Scalar>(d: &DistributionRow<T>) -> Moments<T> {
    let mut m1 = T::zero();
    let mut m2 = T::zero();
    for (i, p) in d.mass().iter().enumerate() {
        let k = T::from_count(i + 1);
        let kp = k.clone() * p.clone();
        m2 = m2 + k * kp.clone();
        m1 = m1 + kp;
    }
    let variance = m2 - m1.clone() * m1.clone();
    Moments { mean: m1, variance, e_two_to_k: T::sum_pow2_weighted(d.mass()) }
}
