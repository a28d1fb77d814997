//! Standard normal distribution function.

use libm::erfc;
use std::f64::consts::FRAC_1_SQRT_2;

/// `Φ(z)`, evaluated through `erfc` so that both tails keep full relative accuracy.
pub fn normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}
