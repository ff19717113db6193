use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::analytic::SystemParams;
use crate::Result;

/// Active-interferer field on the window `[-L, L]²`.
///
/// Every draw consumes the random stream in a fixed order: the point count,
/// then both coordinates of each point, then the fading of each antenna in
/// turn. A draw for `N` antennas is therefore a prefix of the draw for any
/// larger antenna count under the same stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PppField {
    pub lambda_p: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub half_width: f64,
    /// `α/2` when it is a small integer, so `r^α` is a product of `r²`.
    int_half_alpha: Option<i32>,
}

impl PppField {
    pub fn new(params: &SystemParams, half_width: f64) -> Result<Self> {
        params.validate()?;
        let half_alpha = 0.5 * params.alpha;
        let int_half_alpha =
            (half_alpha.fract() == 0.0 && half_alpha <= 16.0).then_some(half_alpha as i32);
        Ok(Self {
            lambda_p: params.lambda_p(),
            alpha: params.alpha,
            epsilon: params.epsilon,
            half_width,
            int_half_alpha,
        })
    }

    pub fn mean_points(&self) -> f64 {
        self.lambda_p * 4.0 * self.half_width * self.half_width
    }

    /// Path gain `1 / (ε + r^α)` from squared distance.
    #[inline]
    pub fn path_gain(&self, r2: f64) -> f64 {
        let r_alpha = match self.int_half_alpha {
            Some(k) => r2.powi(k),
            None => r2.powf(0.5 * self.alpha),
        };
        1.0 / (self.epsilon + r_alpha)
    }

    fn point_count<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mean = self.mean_points();
        if mean <= 0.0 {
            return 0;
        }
        let count: f64 = Poisson::new(mean)
            .expect("positive finite mean")
            .sample(rng);
        count as usize
    }

    fn point<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let l = self.half_width;
        let x = (2.0 * rng.random::<f64>() - 1.0) * l;
        let y = (2.0 * rng.random::<f64>() - 1.0) * l;
        [x, y]
    }

    /// Draws one point set and writes the path gains of its points into `gains`.
    pub fn sample_gains<R: Rng + ?Sized>(&self, rng: &mut R, gains: &mut Vec<f64>) {
        gains.clear();
        let count = self.point_count(rng);
        gains.extend((0..count).map(|_| {
            let [x, y] = self.point(rng);
            self.path_gain(x * x + y * y)
        }));
    }

    /// Interference `Σ_x h_x ℓ(x)` at one antenna with fresh unit-mean fading.
    #[inline]
    pub fn shot_noise<R: Rng + ?Sized>(&self, rng: &mut R, gains: &[f64]) -> f64 {
        gains
            .iter()
            .map(|g| {
                let h: f64 = Exp1.sample(rng);
                g * h
            })
            .sum()
    }
}

/// One network snapshot seen by collocated antennas at the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub points: Vec<[f64; 2]>,
    /// `fading[i][k]`: gain from point `k` to antenna `i`.
    pub fading: Vec<Vec<f64>>,
    /// Serving-link gain per antenna.
    pub serving_fading: Vec<f64>,
}

impl NetworkRealization {
    /// Draws a realization in the same stream order as the simulators.
    pub fn sample<R: Rng + ?Sized>(field: &PppField, antennas: usize, rng: &mut R) -> Self {
        let count = field.point_count(rng);
        let points: Vec<[f64; 2]> = (0..count).map(|_| field.point(rng)).collect();
        let mut fading = Vec::with_capacity(antennas);
        let mut serving_fading = Vec::with_capacity(antennas);
        for _ in 0..antennas {
            fading.push((0..count).map(|_| Exp1.sample(rng)).collect());
            serving_fading.push(Exp1.sample(rng));
        }
        Self {
            points,
            fading,
            serving_fading,
        }
    }

    /// Per-antenna interference powers.
    pub fn interference(&self, field: &PppField) -> Vec<f64> {
        let gains: Vec<f64> = self
            .points
            .iter()
            .map(|[x, y]| field.path_gain(x * x + y * y))
            .collect();
        self.fading
            .iter()
            .map(|h| h.iter().zip(&gains).map(|(h, g)| g * h).sum())
            .collect()
    }
}

/// Per-antenna interference powers from a single draw of the Poisson field
/// (shared points, independent fading per antenna).
pub fn sample_ppp_interference<R: Rng + ?Sized>(
    field: &PppField,
    antennas: usize,
    rng: &mut R,
) -> Vec<f64> {
    let mut gains = Vec::new();
    field.sample_gains(rng, &mut gains);
    (0..antennas)
        .map(|_| field.shot_noise(rng, &gains))
        .collect()
}

/// Which interference construction a trial draws from.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub enum InterferenceModel {
    /// Collocated antennas observing one Poisson field.
    Ppp,
    /// Antenna `i` sees the shared `J_0` with probability `q`, its own `J_i` otherwise.
    Mixture { q: f64 },
}

/// Interference and serving gains of one trial.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialDraw {
    pub interference: Vec<f64>,
    pub serving: Vec<f64>,
    /// Mixture model only: the independent field powers `J_0 … J_N`.
    pub fields: Vec<f64>,
    /// Mixture model only: uniform selector variates, antenna `i` picks `J_0` when below `q`.
    pub selectors: Vec<f64>,
}

impl TrialDraw {
    /// Redraws this trial. Stream order per antenna keeps antenna-count prefixes consistent.
    pub fn draw<R: Rng + ?Sized>(
        &mut self,
        field: &PppField,
        model: InterferenceModel,
        antennas: usize,
        rng: &mut R,
        scratch: &mut Vec<f64>,
    ) {
        self.interference.clear();
        self.serving.clear();
        self.fields.clear();
        self.selectors.clear();
        match model {
            InterferenceModel::Ppp => {
                field.sample_gains(rng, scratch);
                for _ in 0..antennas {
                    self.interference.push(field.shot_noise(rng, scratch));
                    self.serving.push(Exp1.sample(rng));
                }
            }
            InterferenceModel::Mixture { q } => {
                field.sample_gains(rng, scratch);
                self.fields.push(field.shot_noise(rng, scratch));
                for _ in 0..antennas {
                    field.sample_gains(rng, scratch);
                    self.fields.push(field.shot_noise(rng, scratch));
                    self.selectors.push(rng.random::<f64>());
                    self.serving.push(Exp1.sample(rng));
                }
                self.select(q);
            }
        }
    }

    /// Re-applies the mixture selection for another weight `q` on the same draws.
    pub fn select(&mut self, q: f64) {
        self.interference.clear();
        for (i, &u) in self.selectors.iter().enumerate() {
            self.interference.push(if u < q {
                self.fields[0]
            } else {
                self.fields[i + 1]
            });
        }
    }

    /// `Σ_i h_i / I_i` over the first `antennas` branches; infinite when a
    /// branch sees no interference. The post-MRC SIR is this times `d^{-α}`.
    #[inline]
    pub fn combined_ratio(&self, antennas: usize) -> f64 {
        self.serving[..antennas]
            .iter()
            .zip(&self.interference[..antennas])
            .map(|(h, i)| if *i > 0.0 { h / i } else { f64::INFINITY })
            .sum()
    }
}
