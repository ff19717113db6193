use serde::{Deserialize, Serialize};

use crate::math::check_alpha;
use crate::{Error, Result};

/// Geometry and channel parameters of the Poisson dipole network.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Transmitter density per m².
    pub lambda: f64,
    /// ALOHA transmit probability.
    pub p: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Serving-link distance in m.
    pub d: f64,
    /// Path-loss regularizer in `1/(ε + r^α)`. The analytic formulas take ε = 0.
    pub epsilon: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            p: 1.0,
            alpha: 4.0,
            d: 10.0,
            epsilon: 0.0,
        }
    }
}

impl SystemParams {
    pub fn new(lambda: f64, p: f64, alpha: f64, d: f64) -> Result<Self> {
        let params = Self {
            lambda,
            p,
            alpha,
            d,
            epsilon: 0.0,
        };
        params.validate()?;
        Ok(params)
    }

    /// Parameters from the active-interferer intensity `λp` alone (p = 1).
    pub fn with_intensity(lambda_p: f64, alpha: f64, d: f64) -> Result<Self> {
        Self::new(lambda_p, 1.0, alpha, d)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        self.epsilon = epsilon;
        self.validate()?;
        Ok(self)
    }

    /// Intensity of the thinned (active) interferer process.
    pub fn lambda_p(&self) -> f64 {
        self.lambda * self.p
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::domain(format!(
                "density must be nonnegative, got {}",
                self.lambda
            )));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::domain(format!(
                "ALOHA probability must lie in [0, 1], got {}",
                self.p
            )));
        }
        if !(self.d > 0.0) || !self.d.is_finite() {
            return Err(Error::domain(format!(
                "link distance must be positive, got {}",
                self.d
            )));
        }
        if !(self.epsilon >= 0.0) || !self.epsilon.is_finite() {
            return Err(Error::domain(format!(
                "regularizer must be nonnegative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    /// Outage boundary on `U + ΣV`: `T d^α`.
    pub fn s_max(&self, t_linear: f64) -> f64 {
        t_linear * self.d.powf(self.alpha)
    }
}

/// Antenna count and mixture weight `q` (probability of the shared interference term).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub antennas: usize,
    pub q: f64,
}

impl MixtureConfig {
    pub fn new(antennas: usize, q: f64) -> Result<Self> {
        let cfg = Self { antennas, q };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_q_squared(antennas: usize, q_squared: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q_squared) {
            return Err(Error::domain(format!(
                "q² must lie in [0, 1], got {q_squared}"
            )));
        }
        Self::new(antennas, q_squared.sqrt())
    }

    pub fn validate(&self) -> Result<()> {
        if self.antennas == 0 {
            return Err(Error::domain("antenna count must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.q) {
            return Err(Error::domain(format!(
                "mixture weight must lie in [0, 1], got {}",
                self.q
            )));
        }
        Ok(())
    }

    /// Pairwise interference correlation implied by the mixture, `q²`.
    pub fn interference_correlation(&self) -> f64 {
        self.q * self.q
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IntegrationMethod {
    /// Quadrature up to dimension [`IntegrationPolicy::MAX_QUADRATURE_DIM`], sampling above.
    Auto,
    Quadrature,
    Sampling,
}

/// How the simplex integrals of the outage formula are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationPolicy {
    pub method: IntegrationMethod,
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Subinterval budget per one-dimensional quadrature.
    pub max_subdivisions: usize,
    pub sample_count: u64,
    pub seed: u64,
}

impl Default for IntegrationPolicy {
    fn default() -> Self {
        Self {
            method: IntegrationMethod::Auto,
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            max_subdivisions: 200,
            sample_count: 1_000_000,
            seed: 0x0005_eed0_fa11_u64,
        }
    }
}

impl IntegrationPolicy {
    /// Largest number of nested quadrature levels used by [`IntegrationMethod::Auto`].
    pub const MAX_QUADRATURE_DIM: usize = 3;

    pub fn quadrature() -> Self {
        Self {
            method: IntegrationMethod::Quadrature,
            ..Self::default()
        }
    }

    pub fn sampling(sample_count: u64, seed: u64) -> Self {
        Self {
            method: IntegrationMethod::Sampling,
            sample_count,
            seed,
            ..Self::default()
        }
    }

    /// Concrete method for an integral with `dim` nested levels.
    pub fn resolve(&self, dim: usize) -> IntegrationMethod {
        match self.method {
            IntegrationMethod::Auto if dim <= Self::MAX_QUADRATURE_DIM => {
                IntegrationMethod::Quadrature
            }
            IntegrationMethod::Auto => IntegrationMethod::Sampling,
            other => other,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(SystemParams::new(1e-4, 1.0, 4.0, 10.0).is_ok());
        assert!(SystemParams::new(1e-4, 1.5, 4.0, 10.0).is_err());
        assert!(SystemParams::new(1e-4, 1.0, 2.0, 10.0).is_err());
        assert!(SystemParams::new(1e-4, 1.0, 4.0, 0.0).is_err());
        assert!(SystemParams::default().with_epsilon(-1.0).is_err());
        assert!(MixtureConfig::new(0, 0.5).is_err());
        assert!(MixtureConfig::new(2, 1.2).is_err());
        let cfg = MixtureConfig::from_q_squared(3, 0.5).unwrap();
        assert!((cfg.interference_correlation() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn intensity_is_the_product() {
        let p = SystemParams::new(2e-4, 0.5, 4.0, 10.0).unwrap();
        assert_eq!(p.lambda_p(), 1e-4);
        assert_eq!(p.s_max(1.0), 1e4);
    }

    #[test]
    fn auto_switches_on_dimension() {
        let p = IntegrationPolicy::default();
        assert_eq!(p.resolve(3), IntegrationMethod::Quadrature);
        assert_eq!(p.resolve(4), IntegrationMethod::Sampling);
        assert_eq!(
            IntegrationPolicy::quadrature().resolve(6),
            IntegrationMethod::Quadrature
        );
    }
}
