use std::f64::consts::PI;

use super::check_alpha;
use crate::{Error, Result};

/// Laplace-exponent scale of the Poisson-field interference and the
/// threshold-scaled constant used by the joint CCDFs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedConstants {
    /// `2π²λp / (α sin(2π/α))`.
    pub c: f64,
    /// `c · d² · T^{2/α}`.
    pub b: f64,
}

impl DerivedConstants {
    pub fn new(lambda_p: f64, d: f64, t_linear: f64, alpha: f64) -> Result<Self> {
        Ok(Self {
            c: constant_c(lambda_p, alpha)?,
            b: constant_b(lambda_p, d, t_linear, alpha)?,
        })
    }
}

/// `C = 2π²λp / (α sin(2π/α))`, the scale in `E[exp(-sI)] = exp(-C s^{2/α})`.
pub fn constant_c(lambda_p: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !(lambda_p >= 0.0) || !lambda_p.is_finite() {
        return Err(Error::domain(format!(
            "interferer intensity must be finite and nonnegative, got {lambda_p}"
        )));
    }
    Ok(2.0 * PI * PI * lambda_p / (alpha * (2.0 * PI / alpha).sin()))
}

/// `B = C d² T^{2/α}` for a linear threshold `T`.
pub fn constant_b(lambda_p: f64, d: f64, t_linear: f64, alpha: f64) -> Result<f64> {
    let c = constant_c(lambda_p, alpha)?;
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::domain(format!(
            "link distance must be positive, got {d}"
        )));
    }
    if !(t_linear >= 0.0) || !t_linear.is_finite() {
        return Err(Error::domain(format!(
            "linear threshold must be finite and nonnegative, got {t_linear}"
        )));
    }
    Ok(c * d * d * t_linear.powf(2.0 / alpha))
}
