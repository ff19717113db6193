//! Marginal laws of `U_n = (h_1 + … + h_n) / J` and `V = h / J`, where `J`
//! is the Poisson-field interference with Laplace transform `exp(-C s^{2/α})`.

use rand::Rng;

use super::{check_alpha, clamp_probability, exp_term_derivative, factorial, partial_bell_table};
use crate::{Error, Result};

fn check_scale(c: f64) -> Result<()> {
    if c >= 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "interference scale C must be nonnegative, got {c}"
        )))
    }
}

/// CDF of `U_n`: `1 - Σ_{m=0}^{n-1} (-1)^m u^m/m! · d^m/du^m exp(-C u^{2/α})`.
pub fn cdf_u(u: f64, n: usize, c: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_scale(c)?;
    if n == 0 {
        return Err(Error::argument("U_n needs at least one fading term"));
    }
    if !(u >= 0.0) {
        return Err(Error::domain(format!(
            "cdf_u argument must be nonnegative, got {u}"
        )));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    if u.is_infinite() {
        return Ok(1.0);
    }
    let mut tail = 0.0;
    for m in 0..n {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        tail +=
            sign * u.powi(m as i32) / factorial(m as u32) * exp_term_derivative(m, c, alpha, u)?;
    }
    Ok(clamp_probability(1.0 - tail, "cdf_u"))
}

/// CDF of `V`: `1 - exp(-C v^{2/α})`.
pub fn cdf_v(v: f64, c: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_scale(c)?;
    if !(v >= 0.0) {
        return Err(Error::domain(format!(
            "cdf_v argument must be nonnegative, got {v}"
        )));
    }
    Ok(-(-c * v.powf(2.0 / alpha)).exp_m1())
}

/// Density of `V`: `(2C/α) v^{2/α-1} exp(-C v^{2/α})`, singular (but
/// integrable) at the origin.
pub fn pdf_v(v: f64, c: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_scale(c)?;
    if !(v > 0.0) {
        return Err(Error::domain(format!(
            "pdf_v argument must be positive, got {v}"
        )));
    }
    let delta = 2.0 / alpha;
    Ok(delta * c * v.powf(delta - 1.0) * (-c * v.powf(delta)).exp())
}

/// Inverse-transform draw `V = (-ln U / C)^{α/2}`.
pub fn sample_v<R: Rng + ?Sized>(rng: &mut R, c: f64, alpha: f64) -> f64 {
    // 1 - [0, 1) keeps the logarithm finite
    let u = 1.0 - rng.random::<f64>();
    (-u.ln() / c).powf(alpha / 2.0)
}

/// Precomputed evaluator for the CDF of `U_n`.
///
/// Since `u^k d^k/du^k (C u^δ) = C u^δ (δ)_k`, every term of the series is
/// a polynomial in `x = C u^δ`:
/// `F(u) = 1 - e^{-x} Σ_{j=0}^{n-1} a_j x^j`. The coefficients depend only
/// on `(n, α)`, which makes this the fast path inside integrals and samplers.
#[derive(Debug, Clone)]
pub struct UCdf {
    c: f64,
    delta: f64,
    coeffs: Vec<f64>,
}

impl UCdf {
    pub fn new(n: usize, c: f64, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        check_scale(c)?;
        if n == 0 {
            return Err(Error::argument("U_n needs at least one fading term"));
        }
        let delta = 2.0 / alpha;
        let order = n - 1;
        let falling: Vec<f64> = (1..=order.max(1))
            .scan(1.0, |acc, k| {
                *acc *= delta - (k - 1) as f64;
                Some(*acc)
            })
            .collect();
        let bell = partial_bell_table(order, &falling)?;
        let mut coeffs = vec![0.0; n];
        coeffs[0] = 1.0;
        for (m, row) in bell.iter().enumerate().skip(1) {
            let inv_fact = 1.0 / factorial(m as u32);
            for (j, b) in row.iter().enumerate().take(m + 1).skip(1) {
                let sign = if (m + j) % 2 == 0 { 1.0 } else { -1.0 };
                coeffs[j] += sign * b * inv_fact;
            }
        }
        Ok(Self { c, delta, coeffs })
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    /// Polynomial coefficients `a_0 … a_{n-1}`.
    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// Evaluates the CDF; zero for `u <= 0`.
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        if !(u > 0.0) {
            return 0.0;
        }
        self.eval_at_exponent(self.c * u.powf(self.delta))
    }

    /// Evaluates the CDF at `x = C u^δ` directly.
    #[inline]
    pub fn eval_at_exponent(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        let poly = self.coeffs.iter().rev().fold(0.0, |acc, &a| acc * x + a);
        let tail = (-x).exp() * poly;
        // 1 - e^{-x} loses nothing for n = 1 when written as -expm1
        let value = if self.coeffs.len() == 1 {
            -(-x).exp_m1()
        } else {
            1.0 - tail
        };
        value.clamp(0.0, 1.0)
    }
}
