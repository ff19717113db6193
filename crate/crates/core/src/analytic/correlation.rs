use crate::{Error, Result};

/// `Corr[SIR_i, SIR_j] = ζ^inv · sqrt(Var[I_i^{-1}] Var[I_j^{-1}] / (Var[h_i I_i^{-1}] Var[h_j I_j^{-1}]))`.
///
/// Holds whenever the serving gains are unit-mean and independent of the
/// interference.
pub fn sir_correlation_identity(
    var_inv_i: f64,
    var_inv_j: f64,
    var_h_inv_i: f64,
    var_h_inv_j: f64,
    zeta_inv: f64,
) -> Result<f64> {
    for (name, v) in [
        ("Var[1/I_i]", var_inv_i),
        ("Var[1/I_j]", var_inv_j),
        ("Var[h_i/I_i]", var_h_inv_i),
        ("Var[h_j/I_j]", var_h_inv_j),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(format!(
                "{name} must be positive and finite, got {v}"
            )));
        }
    }
    Ok(zeta_inv * (var_inv_i * var_inv_j / (var_h_inv_i * var_h_inv_j)).sqrt())
}
