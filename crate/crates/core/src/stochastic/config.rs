use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Mean number of active interferers in an automatically sized window.
pub const AUTO_MEAN_INTERFERERS: f64 = 1e3;

/// Half-width `L` of the square simulation window `[-L, L]²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Window {
    /// `(2L)² λp = 1000`.
    Auto,
    HalfWidth(f64),
}

impl Window {
    pub fn resolve(&self, lambda_p: f64) -> Result<f64> {
        match *self {
            Window::Auto if lambda_p > 0.0 => Ok(0.5 * (AUTO_MEAN_INTERFERERS / lambda_p).sqrt()),
            // an empty process needs no particular window
            Window::Auto => Ok(1.0),
            Window::HalfWidth(l) if l > 0.0 && l.is_finite() => Ok(l),
            Window::HalfWidth(l) => Err(Error::domain(format!(
                "window half-width must be positive, got {l}"
            ))),
        }
    }
}

/// Monte Carlo run settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub master_seed: u64,
    pub window: Window,
    /// Worker threads; 1 runs on the calling thread, 0 uses the ambient pool.
    pub workers: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            trials: 1_000_000,
            master_seed: 1,
            window: Window::Auto,
            workers: std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1),
        }
    }
}

impl SimConfig {
    pub fn new(trials: u64, master_seed: u64) -> Self {
        Self {
            trials,
            master_seed,
            ..Self::default()
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_window(mut self, window: Window) -> Self {
        self.window = window;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::domain("trial count must be positive"));
        }
        Ok(())
    }
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateCI {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
}

impl EstimateCI {
    /// Bernoulli proportion `hits / trials`.
    pub fn from_counts(hits: u64, trials: u64) -> Self {
        let n = trials as f64;
        let p = hits as f64 / n;
        let stderr = if trials > 1 {
            (p * (1.0 - p) / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            mean: p,
            stderr,
            trials,
        }
    }

    /// Mean of batch statistics with the standard error of that mean.
    pub fn from_batches(pooled: f64, batch_values: &[f64], trials: u64) -> Self {
        let k = batch_values.len() as f64;
        let stderr = if batch_values.len() > 1 {
            let m = batch_values.iter().sum::<f64>() / k;
            let var = batch_values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (k - 1.0);
            (var / k).sqrt()
        } else {
            0.0
        };
        Self {
            mean: pooled,
            stderr,
            trials,
        }
    }

    /// `|self - other| <= k · sqrt(se₁² + se₂²)`.
    pub fn agrees_with(&self, other: &EstimateCI, k: f64) -> bool {
        (self.mean - other.mean).abs() <= k * self.stderr.hypot(other.stderr)
    }
}
