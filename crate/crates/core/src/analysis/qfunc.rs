use libm::erfc;

use crate::error::{Error, Result};

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Two-exponential approximation `Q(x) ~ exp(-x^2/2)/12 + exp(-2x^2/3)/4`.
///
/// It exceeds `Q` only for `x` above roughly 0.6655; below that it
/// underestimates (at 0 it gives 1/3 against `Q(0) = 1/2`).
pub fn chiani_q(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain {
            function: "chiani_q",
            value: x,
        });
    }
    let x2 = x * x;
    Ok((-x2 / 2.0).exp() / 12.0 + (-2.0 * x2 / 3.0).exp() / 4.0)
}
