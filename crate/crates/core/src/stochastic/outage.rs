use super::{EstimateCI, InterferenceModel, PppField, SimConfig, TrialDraw};
use crate::analytic::{MixtureConfig, SystemParams};
use crate::exec::{run_chunks, trial_rng, Merge, CHUNK_TRIALS};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
struct Counts(Vec<u64>);

impl Merge for Counts {
    fn merge(&mut self, later: Self) {
        for (a, b) in self.0.iter_mut().zip(later.0) {
            *a += b;
        }
    }
}

fn check_thresholds(thresholds: &[f64]) -> Result<()> {
    match thresholds.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        Some(t) => Err(Error::domain(format!(
            "linear SIR threshold must be positive, got {t}"
        ))),
        None => Ok(()),
    }
}

fn check_antennas(antennas: &[usize]) -> Result<usize> {
    match antennas.iter().copied().max() {
        Some(max) if antennas.iter().all(|&n| n >= 1) => Ok(max),
        _ => Err(Error::domain(
            "antenna counts must be nonempty and at least 1",
        )),
    }
}

/// Counts `combined_ratio < T d^α` for every (antenna prefix, q, threshold)
/// on shared trial draws. Returns estimates indexed `[antenna][q][threshold]`.
fn outage_grid(
    params: &SystemParams,
    model_of: impl Fn(f64) -> InterferenceModel + Sync + Send,
    qs: &[f64],
    antennas: &[usize],
    thresholds: &[f64],
    sim: &SimConfig,
) -> Result<Vec<Vec<Vec<EstimateCI>>>> {
    sim.validate()?;
    check_thresholds(thresholds)?;
    let max_antennas = check_antennas(antennas)?;
    let field = PppField::new(params, sim.window.resolve(params.lambda_p())?)?;
    let bounds: Vec<f64> = thresholds.iter().map(|&t| params.s_max(t)).collect();
    let (na, nq, nt) = (antennas.len(), qs.len(), thresholds.len());
    let counts = run_chunks(sim.trials, CHUNK_TRIALS, sim.workers, |range| {
        let mut counts = Counts(vec![0; na * nq * nt]);
        let mut draw = TrialDraw::default();
        let mut scratch = Vec::new();
        for trial in range {
            let mut rng = trial_rng(sim.master_seed, trial);
            draw.draw(
                &field,
                model_of(qs[0]),
                max_antennas,
                &mut rng,
                &mut scratch,
            );
            for (iq, &q) in qs.iter().enumerate() {
                if iq > 0 {
                    draw.select(q);
                }
                for (ia, &n) in antennas.iter().enumerate() {
                    let ratio = draw.combined_ratio(n);
                    for (it, &bound) in bounds.iter().enumerate() {
                        if ratio < bound {
                            counts.0[(ia * nq + iq) * nt + it] += 1;
                        }
                    }
                }
            }
        }
        counts
    })
    .expect("trials > 0");
    Ok((0..na)
        .map(|ia| {
            (0..nq)
                .map(|iq| {
                    (0..nt)
                        .map(|it| {
                            EstimateCI::from_counts(counts.0[(ia * nq + iq) * nt + it], sim.trials)
                        })
                        .collect()
                })
                .collect()
        })
        .collect())
}

/// PPP-model outage for several antenna counts and thresholds from one set
/// of trials, indexed `[antenna][threshold]`. Each entry is bit-identical to
/// a single-point [`simulate_mrc_outage_ppp`] run with the same config.
pub fn simulate_mrc_outage_ppp_grid(
    params: &SystemParams,
    antennas: &[usize],
    thresholds: &[f64],
    sim: &SimConfig,
) -> Result<Vec<Vec<EstimateCI>>> {
    let grid = outage_grid(
        params,
        |_| InterferenceModel::Ppp,
        &[1.0],
        antennas,
        thresholds,
        sim,
    )?;
    Ok(grid
        .into_iter()
        .map(|mut per_q| per_q.swap_remove(0))
        .collect())
}

/// `P(SIR_MRC < T)` in the Poisson dipole network. Trials without any
/// interferer count as non-outage.
pub fn simulate_mrc_outage_ppp(
    params: &SystemParams,
    antennas: usize,
    t_linear: f64,
    sim: &SimConfig,
) -> Result<EstimateCI> {
    Ok(simulate_mrc_outage_ppp_grid(params, &[antennas], &[t_linear], sim)?[0][0])
}

/// Mixture-model outage indexed `[antenna][q][threshold]`, all weights and
/// thresholds evaluated on common draws.
pub fn simulate_mrc_outage_mixture_grid(
    params: &SystemParams,
    antennas: &[usize],
    qs: &[f64],
    thresholds: &[f64],
    sim: &SimConfig,
) -> Result<Vec<Vec<Vec<EstimateCI>>>> {
    if qs.is_empty() || qs.iter().any(|q| !(0.0..=1.0).contains(q)) {
        return Err(Error::domain(
            "mixture weights must be nonempty and lie in [0, 1]",
        ));
    }
    outage_grid(
        params,
        |q| InterferenceModel::Mixture { q },
        qs,
        antennas,
        thresholds,
        sim,
    )
}

/// `P(SIR_MRC < T)` when antenna interference follows the mixture construction.
pub fn simulate_mrc_outage_mixture(
    params: &SystemParams,
    cfg: &MixtureConfig,
    t_linear: f64,
    sim: &SimConfig,
) -> Result<EstimateCI> {
    cfg.validate()?;
    Ok(
        simulate_mrc_outage_mixture_grid(params, &[cfg.antennas], &[cfg.q], &[t_linear], sim)?[0]
            [0][0],
    )
}

/// `P(SIR_1 > T, …, SIR_N > T)`.
pub fn estimate_joint_ccdf(
    params: &SystemParams,
    antennas: usize,
    t_linear: f64,
    sim: &SimConfig,
    model: InterferenceModel,
) -> Result<EstimateCI> {
    sim.validate()?;
    check_thresholds(&[t_linear])?;
    check_antennas(&[antennas])?;
    if let InterferenceModel::Mixture { q } = model {
        MixtureConfig::new(antennas, q)?;
    }
    let field = PppField::new(params, sim.window.resolve(params.lambda_p())?)?;
    let bound = params.s_max(t_linear);
    let hits = run_chunks(sim.trials, CHUNK_TRIALS, sim.workers, |range| {
        let mut hits = Counts(vec![0]);
        let mut draw = TrialDraw::default();
        let mut scratch = Vec::new();
        for trial in range {
            draw.draw(
                &field,
                model,
                antennas,
                &mut trial_rng(sim.master_seed, trial),
                &mut scratch,
            );
            let all_above = draw
                .serving
                .iter()
                .zip(&draw.interference)
                .all(|(h, i)| *i == 0.0 || h / i > bound);
            hits.0[0] += all_above as u64;
        }
        hits
    })
    .expect("trials > 0");
    Ok(EstimateCI::from_counts(hits.0[0], sim.trials))
}
