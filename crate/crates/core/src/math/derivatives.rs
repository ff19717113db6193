use super::{check_alpha, partial_bell_table};
use crate::{Error, Result};

/// Derivatives `d^k/ds^k (C s^{2/α})` for `k = 1..=K` at a fixed point `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeSequence(Vec<f64>);

impl DerivativeSequence {
    /// Entry `k - 1` holds the `k`-th derivative.
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The `k`-th derivative, `k >= 1`.
    pub fn order(&self, k: usize) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.0.get(i).copied())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

fn check_point(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "derivative point must be positive, got {s}"
        )))
    }
}

/// `C (2/α)(2/α - 1)…(2/α - k + 1) s^{2/α - k}` for `k = 1..=order`.
pub fn power_derivatives(c: f64, alpha: f64, s: f64, order: usize) -> Result<DerivativeSequence> {
    check_alpha(alpha)?;
    check_point(s)?;
    let delta = 2.0 / alpha;
    let mut values = Vec::with_capacity(order);
    // running value C·(δ)_k·s^{δ-k}, advanced by (δ - k)/s
    let mut current = c * s.powf(delta);
    for k in 0..order {
        current *= (delta - k as f64) / s;
        values.push(current);
    }
    Ok(DerivativeSequence(values))
}

/// `d^m/ds^m exp(-C s^{2/α})` via Faà di Bruno:
/// `exp(-C s^{2/α}) Σ_{j=1}^{m} (-1)^j B_{m,j}(g', g'', …)` with `g = C s^{2/α}`.
/// The zeroth derivative is the function itself.
pub fn exp_term_derivative(m: usize, c: f64, alpha: f64, s: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_point(s)?;
    let base = (-c * s.powf(2.0 / alpha)).exp();
    if m == 0 {
        return Ok(base);
    }
    let inner = power_derivatives(c, alpha, s, m)?;
    let bell = partial_bell_table(m, inner.as_slice())?;
    let sum: f64 = (1..=m)
        .map(|j| if j % 2 == 0 { bell[m][j] } else { -bell[m][j] })
        .sum();
    Ok(base * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn power_derivative_values() {
        assert_eq!(
            power_derivatives(1.0, 4.0, 1.0, 1).unwrap().as_slice(),
            &[0.5]
        );
        assert_eq!(
            power_derivatives(1.0, 4.0, 1.0, 2).unwrap().as_slice(),
            &[0.5, -0.25]
        );
        let d = power_derivatives(2.0, 4.0, 4.0, 1).unwrap();
        assert_relative_eq!(d.as_slice()[0], 0.5, max_relative = 1e-15);
        assert_eq!(d.order(1), Some(d.as_slice()[0]));
        assert_eq!(d.order(0), None);
        let third = power_derivatives(1.5, 3.0, 2.0, 3)
            .unwrap()
            .order(3)
            .unwrap();
        let delta = 2.0 / 3.0;
        assert_relative_eq!(
            third,
            1.5 * delta * (delta - 1.0) * (delta - 2.0) * 2f64.powf(delta - 3.0),
            max_relative = 1e-14
        );
    }

    #[test]
    fn exp_derivative_values() {
        let e1 = (-1.0f64).exp();
        assert_relative_eq!(
            exp_term_derivative(0, 1.0, 4.0, 1.0).unwrap(),
            e1,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            exp_term_derivative(1, 1.0, 4.0, 1.0).unwrap(),
            -0.5 * e1,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            exp_term_derivative(2, 1.0, 4.0, 1.0).unwrap(),
            0.5 * e1,
            max_relative = 1e-15
        );
    }

    #[test]
    fn rejects_nonpositive_points() {
        assert!(matches!(
            power_derivatives(1.0, 4.0, 0.0, 2),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            exp_term_derivative(1, 1.0, 4.0, -1.0),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            exp_term_derivative(1, 1.0, 2.0, 1.0),
            Err(Error::Domain(_))
        ));
    }

    /// Ridders-style extrapolation of the central m-th difference
    /// Σ (-1)^k C(m,k) f(s + (m/2 - k)h) / h^m, whose error is even in h.
    /// Returns the tableau entry with the smallest estimated error.
    fn finite_difference(m: usize, f: impl Fn(f64) -> f64, s: f64) -> f64 {
        let stencil = |h: f64| {
            (0..=m)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * super::super::binomial(m as u32, k as u32)
                        * f(s + (m as f64 / 2.0 - k as f64) * h)
                })
                .sum::<f64>()
                / h.powi(m as i32)
        };
        const SHRINK: f64 = 1.4;
        const LEVELS: usize = 12;
        // widest stencil reaches s ± 0.35 s, clear of the branch point at 0
        let mut h = 0.7 * s / m as f64;
        let mut tableau = vec![vec![0.0; LEVELS]; LEVELS];
        tableau[0][0] = stencil(h);
        let mut best = tableau[0][0];
        let mut best_err = f64::INFINITY;
        for i in 1..LEVELS {
            h /= SHRINK;
            tableau[0][i] = stencil(h);
            let mut factor = SHRINK * SHRINK;
            for j in 1..=i {
                tableau[j][i] =
                    (tableau[j - 1][i] * factor - tableau[j - 1][i - 1]) / (factor - 1.0);
                factor *= SHRINK * SHRINK;
                let err = (tableau[j][i] - tableau[j - 1][i])
                    .abs()
                    .max((tableau[j][i] - tableau[j - 1][i - 1]).abs());
                if err <= best_err {
                    best_err = err;
                    best = tableau[j][i];
                }
            }
            if (tableau[i][i] - tableau[i - 1][i - 1]).abs() >= 2.0 * best_err {
                break;
            }
        }
        best
    }

    #[test]
    fn matches_finite_differences() {
        for &alpha in &[3.0, 4.0, 6.0] {
            for &s in &[0.1, 0.5, 1.0, 3.0, 10.0, 40.0, 100.0] {
                // C chosen so that C s^{2/α} stays O(1) across the grid
                for &c in &[0.3, 1.0] {
                    let f = |x: f64| (-c * x.powf(2.0 / alpha)).exp();
                    for m in 1..=5 {
                        let exact = exp_term_derivative(m, c, alpha, s).unwrap();
                        let fd = finite_difference(m, f, s);
                        let rel = ((exact - fd) / exact).abs();
                        assert!(
                            rel <= 1e-5,
                            "alpha={alpha} s={s} c={c} m={m}: {exact} vs {fd} (rel {rel:e})"
                        );
                    }
                }
            }
        }
    }
}
