use std::cell::Cell;

use rand_chacha::ChaCha8Rng;

use super::{IntegrationMethod, IntegrationPolicy, MixtureConfig, SystemParams};
use crate::exec::{run_chunks, trial_rng, MeanAccumulator, CHUNK_TRIALS};
use crate::math::{
    binomial_weights, cdf_u, cdf_v, check_alpha, clamp_probability, constant_c, sample_v, UCdf,
};
use crate::quadrature::{integrate, QuadratureOptions};
use crate::{Error, Result};

/// Remaining budgets below this are treated as an empty region.
const MIN_REMAINDER: f64 = 1e-300;

/// One term `W_n = P(U_n + V_1 + … + V_{N-n} < s_max)` of the outage sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WnEstimate {
    pub n: usize,
    pub value: f64,
    /// Quadrature error estimate, or the standard error in sampling mode.
    pub error: f64,
    /// `None` when the term has a closed form.
    pub method: Option<IntegrationMethod>,
}

/// Conditional probability left after integrating out all but the last
/// variable: `P(U_n < r)` for `n >= 1`, or `P(V < r)` when `n = 0` (the
/// last `V` integrates in closed form because `U_0 = 0`).
enum Innermost {
    U(UCdf),
    V { c: f64, delta: f64 },
}

impl Innermost {
    #[inline]
    fn eval(&self, rem: f64) -> f64 {
        if rem <= MIN_REMAINDER {
            return 0.0;
        }
        match self {
            Innermost::U(f) => f.eval(rem),
            Innermost::V { c, delta } => -(-c * rem.powf(*delta)).exp_m1(),
        }
    }
}

struct Simplex {
    c: f64,
    alpha: f64,
    delta: f64,
    inner: Innermost,
    opts: QuadratureOptions,
}

impl Simplex {
    /// `∫ P(rest < rem - v) f_V(v) dv` over `levels` nested coordinates.
    ///
    /// Each coordinate is integrated in `t = v^{2/α}`, where the density is
    /// `C e^{-Ct}`, and then mapped by `t = t_max (1 - w^α)` so that the
    /// `(t_max - t)^{2/α}` behaviour of the integrand at the simplex face
    /// becomes polynomial in `w`.
    fn level(
        &self,
        levels: usize,
        rem: f64,
        inner_error: &Cell<f64>,
        failure: &Cell<Option<Error>>,
    ) -> f64 {
        if levels == 0 {
            return self.inner.eval(rem);
        }
        if rem <= MIN_REMAINDER {
            return 0.0;
        }
        let t_max = rem.powf(self.delta);
        let half_alpha = 0.5 * self.alpha;
        let integrand = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let wa = w.powf(self.alpha);
            let t = t_max * (1.0 - wa);
            // rem - t^{α/2} = rem (1 - (1 - w^α)^{α/2}) without cancellation
            let next = rem * -(half_alpha * (-wa).ln_1p()).exp_m1();
            let jacobian = self.alpha * t_max * wa / w;
            self.c
                * (-self.c * t).exp()
                * jacobian
                * self.level(levels - 1, next, inner_error, failure)
        };
        match integrate(integrand, 0.0, 1.0, &self.opts) {
            Ok(r) => {
                if levels > 1 {
                    inner_error.set(inner_error.get().max(r.error));
                } else {
                    inner_error.set(inner_error.get().max(0.0));
                }
                r.value
            }
            Err(e) => {
                let first = failure.take();
                failure.set(Some(first.unwrap_or(e)));
                f64::NAN
            }
        }
    }

    fn quadrature(&self, levels: usize, s_max: f64) -> Result<(f64, f64)> {
        let failure = Cell::new(None);
        let inner_error = Cell::new(0.0);
        let top_opts = self.opts;
        let integrand = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let t_max = s_max.powf(self.delta);
            let wa = w.powf(self.alpha);
            let t = t_max * (1.0 - wa);
            let next = s_max * -(0.5 * self.alpha * (-wa).ln_1p()).exp_m1();
            let jacobian = self.alpha * t_max * wa / w;
            self.c
                * (-self.c * t).exp()
                * jacobian
                * self.level(levels - 1, next, &inner_error, &failure)
        };
        let outer = integrate(integrand, 0.0, 1.0, &top_opts);
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let outer = outer?;
        // inner errors are weighted by a density of total mass at most one
        Ok((outer.value, outer.error + inner_error.get()))
    }

    fn sampling(&self, levels: usize, s_max: f64, count: u64, seed: u64) -> Result<(f64, f64)> {
        if count < 2 {
            return Err(Error::argument(
                "sampling integration needs at least two samples",
            ));
        }
        let acc = run_chunks(count, CHUNK_TRIALS, 0, |range| {
            let mut rng: ChaCha8Rng = trial_rng(seed, range.start);
            let mut acc = MeanAccumulator::default();
            for _ in range {
                let mut rem = s_max;
                for _ in 0..levels {
                    rem -= sample_v(&mut rng, self.c, self.alpha);
                }
                acc.push(self.inner.eval(rem));
            }
            acc
        })
        .expect("count >= 2");
        Ok((acc.mean(), acc.stderr()))
    }
}

/// `W_n` with its error estimate and the method actually used.
pub fn w_n_estimate(
    n: usize,
    antennas: usize,
    s_max: f64,
    c: f64,
    alpha: f64,
    policy: &IntegrationPolicy,
) -> Result<WnEstimate> {
    check_alpha(alpha)?;
    if antennas == 0 || n > antennas {
        return Err(Error::argument(format!(
            "need 0 <= n <= N with N >= 1, got n = {n}, N = {antennas}"
        )));
    }
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Err(Error::domain(format!(
            "outage boundary must be positive, got {s_max}"
        )));
    }
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::domain(format!(
            "interference scale C must be nonnegative, got {c}"
        )));
    }
    let closed = |value: f64| WnEstimate {
        n,
        value,
        error: 0.0,
        method: None,
    };
    let private = antennas - n;
    if private == 0 {
        return Ok(closed(cdf_u(s_max, antennas, c, alpha)?));
    }
    if n == 0 && private == 1 {
        return Ok(closed(cdf_v(s_max, c, alpha)?));
    }
    let delta = 2.0 / alpha;
    let (inner, levels) = if n == 0 {
        (Innermost::V { c, delta }, private - 1)
    } else {
        (Innermost::U(UCdf::new(n, c, alpha)?), private)
    };
    let simplex = Simplex {
        c,
        alpha,
        delta,
        inner,
        opts: QuadratureOptions {
            abs_tol: policy.abs_tol,
            rel_tol: policy.rel_tol,
            max_subdivisions: policy.max_subdivisions,
        },
    };
    let method = policy.resolve(levels);
    let (value, error) = match method {
        IntegrationMethod::Sampling => simplex.sampling(
            levels,
            s_max,
            policy.sample_count,
            policy.seed.wrapping_add(n as u64),
        )?,
        _ => simplex.quadrature(levels, s_max)?,
    };
    Ok(WnEstimate {
        n,
        value: clamp_probability(value, "w_n"),
        error,
        method: Some(method),
    })
}

/// `W_n = P(U_n + V_1 + … + V_{N-n} < s_max)`, with `U_0 = 0`.
pub fn w_n(
    n: usize,
    antennas: usize,
    s_max: f64,
    c: f64,
    alpha: f64,
    policy: &IntegrationPolicy,
) -> Result<f64> {
    Ok(w_n_estimate(n, antennas, s_max, c, alpha, policy)?.value)
}

/// All `W_0 … W_N` for one threshold; the outage for any `q` is then a
/// binomial mixture of these terms.
#[derive(Debug, Clone, PartialEq)]
pub struct OutageComponents {
    pub antennas: usize,
    pub terms: Vec<WnEstimate>,
}

impl OutageComponents {
    pub fn outage(&self, q: f64) -> f64 {
        let weights = binomial_weights(self.antennas as u32, q);
        let total: f64 = weights
            .iter()
            .zip(&self.terms)
            .map(|(w, t)| w * t.value)
            .sum();
        clamp_probability(total, "outage_mixture")
    }

    /// Weighted sum of the per-term error estimates.
    pub fn error(&self, q: f64) -> f64 {
        let weights = binomial_weights(self.antennas as u32, q);
        weights
            .iter()
            .zip(&self.terms)
            .map(|(w, t)| w * t.error)
            .sum()
    }
}

fn check_threshold(t_linear: f64) -> Result<()> {
    if t_linear > 0.0 && t_linear.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!(
            "linear SIR threshold must be positive, got {t_linear}"
        )))
    }
}

pub fn outage_mixture_components(
    params: &SystemParams,
    antennas: usize,
    t_linear: f64,
    policy: &IntegrationPolicy,
) -> Result<OutageComponents> {
    params.validate()?;
    check_threshold(t_linear)?;
    let c = constant_c(params.lambda_p(), params.alpha)?;
    let s_max = params.s_max(t_linear);
    let terms = (0..=antennas)
        .map(|n| w_n_estimate(n, antennas, s_max, c, params.alpha, policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(OutageComponents { antennas, terms })
}

/// Mixture-model outage probability
/// `Σ_n C(N,n) q^n (1-q)^{N-n} W_n(T d^α)`. Terms with zero weight are not evaluated.
pub fn outage_mixture(
    params: &SystemParams,
    cfg: &MixtureConfig,
    t_linear: f64,
    policy: &IntegrationPolicy,
) -> Result<f64> {
    params.validate()?;
    cfg.validate()?;
    check_threshold(t_linear)?;
    let c = constant_c(params.lambda_p(), params.alpha)?;
    let s_max = params.s_max(t_linear);
    let weights = binomial_weights(cfg.antennas as u32, cfg.q);
    debug_assert!((weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    let mut total = 0.0;
    for (n, &weight) in weights.iter().enumerate() {
        if weight == 0.0 {
            continue;
        }
        total += weight * w_n(n, cfg.antennas, s_max, c, params.alpha, policy)?;
    }
    Ok(clamp_probability(total, "outage_mixture"))
}
