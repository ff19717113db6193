use super::SystemParams;
use crate::math::{binomial_weights, check_alpha, constant_b};
use crate::roots::brent;
use crate::{Error, Result};

/// Grid spacing of the sign-change scan that guards against multiple roots.
const SCAN_STEP: f64 = 1e-3;

/// `Γ(N + 2/α) / ((N-1)! Γ(1 + 2/α)) = Π_{k=1}^{N-1} (1 + (2/α)/k)`.
pub fn ppp_ccdf_exponent(antennas: usize, alpha: f64) -> f64 {
    let delta = 2.0 / alpha;
    (1..antennas).map(|k| 1.0 + delta / k as f64).product()
}

fn check_inputs(antennas: usize, b: f64, alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if antennas == 0 {
        return Err(Error::domain("antenna count must be at least 1"));
    }
    if !(b >= 0.0) || !b.is_finite() {
        return Err(Error::domain(format!(
            "B must be finite and nonnegative, got {b}"
        )));
    }
    Ok(())
}

/// Joint CCDF `P(SIR_1 > T, …, SIR_N > T)` of the Poisson model.
pub fn joint_ccdf_ppp(antennas: usize, b: f64, alpha: f64) -> Result<f64> {
    check_inputs(antennas, b, alpha)?;
    Ok((-b * ppp_ccdf_exponent(antennas, alpha)).exp())
}

/// Joint CCDF of the mixture model:
/// `Σ_n C(N,n) q^n (1-q)^{N-n} exp(-B (n^{2/α} + N - n))`.
pub fn joint_ccdf_mixture(antennas: usize, q: f64, b: f64, alpha: f64) -> Result<f64> {
    check_inputs(antennas, b, alpha)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!(
            "mixture weight must lie in [0, 1], got {q}"
        )));
    }
    let delta = 2.0 / alpha;
    let weights = binomial_weights(antennas as u32, q);
    Ok(weights
        .iter()
        .enumerate()
        .map(|(n, w)| w * (-b * ((n as f64).powf(delta) + (antennas - n) as f64)).exp())
        .sum())
}

/// `f(q) = joint_ccdf_ppp − joint_ccdf_mixture(q)`.
pub fn ccdf_difference(antennas: usize, q: f64, b: f64, alpha: f64) -> Result<f64> {
    Ok(joint_ccdf_ppp(antennas, b, alpha)? - joint_ccdf_mixture(antennas, q, b, alpha)?)
}

/// Mixture weight that equates the two joint CCDFs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TunedQ {
    pub q: f64,
    pub q_squared: f64,
    /// `f(q)` at the returned root.
    pub residual: f64,
    pub b: f64,
    /// Sign changes of `f` seen on the scan grid; more than one means the
    /// largest root was returned.
    pub sign_changes: usize,
}

/// Tunes `q` from `B` directly.
pub fn tune_q_for_b(antennas: usize, b: f64, alpha: f64) -> Result<TunedQ> {
    check_inputs(antennas, b, alpha)?;
    if b == 0.0 {
        return Err(Error::Degenerate(
            "B = 0 makes both joint CCDFs equal to one for every q".into(),
        ));
    }
    let f = |q: f64| ccdf_difference(antennas, q, b, alpha).expect("inputs validated");
    let (f0, f1) = (f(0.0), f(1.0));
    if f0 == 0.0 && f1 == 0.0 {
        return Err(Error::Degenerate(format!(
            "f(q) vanishes at both ends (N = {antennas}, B = {b:e}); q is not identifiable"
        )));
    }
    if f0 * f1 > 0.0 {
        return Err(Error::NoBracket { f0, f1 });
    }
    let steps = (1.0 / SCAN_STEP).round() as usize;
    let grid: Vec<(f64, f64)> = (0..=steps)
        .map(|i| {
            let q = i as f64 / steps as f64;
            (q, f(q))
        })
        .collect();
    let changes: Vec<usize> = grid
        .windows(2)
        .enumerate()
        .filter(|(_, w)| w[0].1 * w[1].1 < 0.0 || (w[1].1 == 0.0 && w[0].1 != 0.0))
        .map(|(i, _)| i)
        .collect();
    if changes.len() > 1 {
        log::warn!(
            "f(q) changes sign {} times on [0, 1] (N = {antennas}, B = {b:e}); returning the largest root",
            changes.len()
        );
    }
    let cell = *changes.last().ok_or(Error::NoBracket { f0, f1 })?;
    let (lo, hi) = (grid[cell].0, grid[cell + 1].0);
    let root = brent(f, lo, hi, 0.0, 0.0, 200)?;
    Ok(TunedQ {
        q: root.x,
        q_squared: root.x * root.x,
        residual: root.fx,
        b,
        sign_changes: changes.len(),
    })
}

/// Tunes `q` so that the joint SIR CCDFs of the two models agree at `T`.
pub fn tune_q(params: &SystemParams, antennas: usize, t_linear: f64) -> Result<TunedQ> {
    params.validate()?;
    let b = constant_b(params.lambda_p(), params.d, t_linear, params.alpha)?;
    tune_q_for_b(antennas, b, params.alpha)
}
