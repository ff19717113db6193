//! Special-function and distributional primitives shared by the analytic
//! evaluator and the simulators.

mod bell;
mod combinatorics;
mod constants;
mod derivatives;
mod distributions;

pub use bell::{partial_bell, partial_bell_table};
pub use combinatorics::{binomial, binomial_weights, factorial, ln_factorial};
pub use constants::{constant_b, constant_c, DerivedConstants};
pub use derivatives::{exp_term_derivative, power_derivatives, DerivativeSequence};
pub use distributions::{cdf_u, cdf_v, pdf_v, sample_v, UCdf};

/// Amount by which a computed probability may leave [0, 1] before a warning is logged.
pub const CLAMP_WARN_THRESHOLD: f64 = 1e-9;

/// Clamps a computed probability to [0, 1], logging when the excursion is
/// larger than round-off.
pub fn clamp_probability(p: f64, context: &str) -> f64 {
    if p.is_nan() {
        log::warn!("{context}: probability evaluated to NaN");
        return p;
    }
    let clamped = p.clamp(0.0, 1.0);
    if (clamped - p).abs() > CLAMP_WARN_THRESHOLD {
        log::warn!("{context}: clamped probability {p:e} to {clamped}");
    }
    clamped
}

pub(crate) fn check_alpha(alpha: f64) -> crate::Result<()> {
    if alpha.is_finite() && alpha > 2.0 {
        Ok(())
    } else {
        Err(crate::Error::domain(format!(
            "path-loss exponent must exceed 2, got {alpha}"
        )))
    }
}
