//! Subcommand implementations. Each returns a [`Table`] plus header metadata;
//! writing is left to the caller.

use std::time::Instant;

use super::args::{Model, QPolicy, SweepVariable};
use super::settings::{policy_name, threshold_linear, Settings};
use super::table::{Cell, Table};
use super::CliError;
use crate::analytic::{
    joint_ccdf_mixture, joint_ccdf_ppp, outage_mixture, outage_mixture_components, tune_q,
    MixtureConfig, SystemParams, TunedQ,
};
use crate::exec::map_ordered;
use crate::stochastic::{
    estimate_correlations, simulate_mrc_outage_mixture, simulate_mrc_outage_ppp,
    simulate_mrc_outage_ppp_grid, EstimateCI, InterferenceModel,
};
use crate::Error;

/// Result of one subcommand.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub header: Vec<(String, String)>,
    pub table: Table,
    /// Rows whose status is an error; the rest of the table is still valid.
    pub failed_rows: usize,
}

/// Mixture weight from the configured policy. `None` when the tuned weight is
/// not identifiable (one antenna, or no interferers), in which case the
/// outage does not depend on `q`.
pub fn policy_q(
    s: &Settings,
    params: &SystemParams,
    antennas: usize,
    t_linear: f64,
) -> Result<Option<f64>, Error> {
    match s.q_policy {
        QPolicy::Tuned => match tune_q(params, antennas, t_linear) {
            Ok(tuned) => Ok(Some(tuned.q)),
            Err(Error::Degenerate(_)) => Ok(None),
            Err(e) => Err(e),
        },
        QPolicy::CorrMatch => Ok(Some(0.5f64.sqrt())),
        QPolicy::Fixed => Ok(s.q_fixed),
    }
}

fn q2_tag(q2: f64) -> String {
    format!("{q2}").replace('.', "p")
}

/// Extra `q²` values reported as analytic columns by the sweeps.
fn extra_q_squared(s: &Settings) -> Vec<f64> {
    let mut values: Vec<f64> = s.q_squared.clone();
    if s.q_policy == QPolicy::Fixed {
        values.extend(s.q_fixed.map(|q| q * q));
    }
    let mut seen: Vec<String> = vec![q2_tag(0.5)];
    values.retain(|v| {
        let tag = q2_tag(*v);
        let fresh = !seen.contains(&tag);
        seen.push(tag);
        fresh
    });
    values
}

struct AnalyticRow {
    tuned: Option<TunedQ>,
    pout_tuned: f64,
    pout_half: f64,
    extras: Vec<f64>,
    error: f64,
    seconds: f64,
}

fn analytic_row(
    s: &Settings,
    antennas: usize,
    t_linear: f64,
    extras: &[f64],
) -> Result<AnalyticRow, Error> {
    let start = Instant::now();
    let components = outage_mixture_components(&s.params, antennas, t_linear, &s.integration)?;
    let tuned = match tune_q(&s.params, antennas, t_linear) {
        Ok(t) => Some(t),
        Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e),
    };
    let q = tuned.map_or(1.0, |t| t.q);
    Ok(AnalyticRow {
        tuned,
        pout_tuned: components.outage(q),
        pout_half: components.outage(0.5f64.sqrt()),
        extras: extras
            .iter()
            .map(|q2| components.outage(q2.sqrt()))
            .collect(),
        error: components.error(q),
        seconds: start.elapsed().as_secs_f64(),
    })
}

fn sorted_unique<T: PartialOrd + Copy>(values: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut v: Vec<T> = values.into_iter().collect();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    v.dedup_by(|a, b| a == b);
    v
}

fn run_header(command: &str, s: &Settings) -> Vec<(String, String)> {
    let mut header = vec![
        (
            "mrc-outage".to_string(),
            env!("CARGO_PKG_VERSION").to_string(),
        ),
        ("command".to_string(), command.to_string()),
    ];
    header.extend(s.describe());
    header
}

fn window_half_width(s: &Settings, params: &SystemParams) -> Result<f64, CliError> {
    s.sim
        .window
        .resolve(params.lambda_p())
        .map_err(|e| CliError::Usage(e.to_string()))
}

/// Analytic and Monte Carlo outage at each `(antennas, threshold dB)` point,
/// in the given order. All Monte Carlo values come from one shared set of trials.
fn outage_rows(
    command: &str,
    s: &Settings,
    points: &[(usize, f64)],
    with_mc: bool,
) -> Result<Output, CliError> {
    let t_linear = points
        .iter()
        .map(|&(_, db)| threshold_linear(db))
        .collect::<Result<Vec<_>, _>>()?;
    let half_width = window_half_width(s, &s.params)?;
    let extras = extra_q_squared(s);

    let mut header = run_header(command, s);
    let mc = if with_mc {
        let antennas = sorted_unique(points.iter().map(|p| p.0));
        let thresholds = sorted_unique(t_linear.iter().copied());
        let start = Instant::now();
        let grid = simulate_mrc_outage_ppp_grid(&s.params, &antennas, &thresholds, &s.sim)?;
        let seconds = start.elapsed().as_secs_f64();
        header.push(("mc_wall_time_s".to_string(), format!("{seconds:.3}")));
        Some((antennas, thresholds, grid, seconds))
    } else {
        None
    };
    header.push(("window_half_width".to_string(), half_width.to_string()));

    let jobs: Vec<(usize, f64)> = points
        .iter()
        .zip(&t_linear)
        .map(|(&(n, _), &t)| (n, t))
        .collect();
    let analytic = map_ordered(&jobs, s.sim.workers, |&(n, t)| {
        analytic_row(s, n, t, &extras)
    });

    let mut columns: Vec<String> = [
        "T_dB",
        "T_linear",
        "N",
        "alpha",
        "intensity",
        "d",
        "q_tuned",
        "q2_tuned",
        "f_residual",
        "pout_analytic_tuned",
        "pout_analytic_q2_0p5",
        "pout_mc",
        "pout_mc_stderr",
        "trials",
        "seed",
    ]
    .iter()
    .map(|c| c.to_string())
    .collect();
    columns.extend(
        extras
            .iter()
            .map(|q2| format!("pout_analytic_q2_{}", q2_tag(*q2))),
    );
    columns.extend(
        [
            "pout_analytic_error",
            "epsilon",
            "window_half_width",
            "status",
            "wall_time_s",
        ]
        .map(String::from),
    );
    let mut table = Table::new(columns);
    let mut failed_rows = 0;
    let mc_share = mc
        .as_ref()
        .map_or(0.0, |m| m.3 / points.len().max(1) as f64);

    for ((&(n, db), &t), row) in points.iter().zip(&t_linear).zip(analytic) {
        let mut cells: Vec<Cell> = vec![
            db.into(),
            t.into(),
            n.into(),
            s.params.alpha.into(),
            s.params.lambda_p().into(),
            s.params.d.into(),
        ];
        let estimate: Option<EstimateCI> = mc.as_ref().map(|(ns, ts, grid, _)| {
            let i = ns
                .iter()
                .position(|&x| x == n)
                .expect("antenna count in grid");
            let j = ts.iter().position(|&x| x == t).expect("threshold in grid");
            grid[i][j]
        });
        let (status, seconds) = match &row {
            Ok(r) => {
                cells.extend([
                    Cell::opt(r.tuned.map(|x| x.q)),
                    Cell::opt(r.tuned.map(|x| x.q_squared)),
                    Cell::opt(r.tuned.map(|x| x.residual)),
                    r.pout_tuned.into(),
                    r.pout_half.into(),
                ]);
                let status = if r.tuned.is_some() {
                    "ok"
                } else {
                    "ok: q not identifiable"
                };
                (status.to_string(), r.seconds)
            }
            Err(e) => {
                failed_rows += 1;
                cells.extend(std::iter::repeat_n(Cell::Empty, 5));
                (format!("error: {e}"), 0.0)
            }
        };
        cells.extend([
            Cell::opt(estimate.map(|e| e.mean)),
            Cell::opt(estimate.map(|e| e.stderr)),
            estimate.map_or(Cell::Empty, |e| e.trials.into()),
            if with_mc {
                s.sim.master_seed.into()
            } else {
                Cell::Empty
            },
        ]);
        match &row {
            Ok(r) => {
                cells.extend(r.extras.iter().map(|&v| Cell::Float(v)));
                cells.push(r.error.into());
            }
            Err(_) => cells.extend(std::iter::repeat_n(Cell::Empty, extras.len() + 1)),
        }
        cells.extend([
            s.params.epsilon.into(),
            half_width.into(),
            status.into(),
            (seconds + mc_share).into(),
        ]);
        table.push(cells);
    }
    Ok(Output {
        header,
        table,
        failed_rows,
    })
}

/// Outage versus threshold (dB) at the configured antenna count.
pub fn outage_sweep(s: &Settings, grid_db: &[f64], with_mc: bool) -> Result<Output, CliError> {
    let points: Vec<(usize, f64)> = sorted_unique(grid_db.iter().copied())
        .into_iter()
        .map(|db| (s.antennas, db))
        .collect();
    outage_rows("outage-sweep", s, &points, with_mc)
}

/// Outage versus antenna count at the configured threshold.
pub fn antenna_sweep(s: &Settings, grid: &[usize], with_mc: bool) -> Result<Output, CliError> {
    let points: Vec<(usize, f64)> = sorted_unique(grid.iter().copied())
        .into_iter()
        .map(|n| (n, s.threshold_db))
        .collect();
    outage_rows("antenna-sweep", s, &points, with_mc)
}

/// Tuned mixture weight at one point, or along a sweep of `variable`.
pub fn tune_q_table(
    s: &Settings,
    sweep: Option<(SweepVariable, &[f64])>,
) -> Result<Output, CliError> {
    let base = (s.antennas, s.threshold_db, s.params.lambda_p());
    let mut points: Vec<(usize, f64, f64)> = match sweep {
        None => vec![base],
        Some((SweepVariable::Antennas, values)) => super::settings::antenna_grid(values)?
            .into_iter()
            .map(|n| (n, base.1, base.2))
            .collect(),
        Some((SweepVariable::ThresholdDb, values)) => {
            values.iter().map(|&db| (base.0, db, base.2)).collect()
        }
        Some((SweepVariable::Intensity, values)) => {
            if let Some(bad) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
                return Err(CliError::Usage(format!(
                    "intensity must be positive, got {bad}"
                )));
            }
            values.iter().map(|&lp| (base.0, base.1, lp)).collect()
        }
    };
    points.sort_by(|a, b| {
        (a.0, a.1, a.2)
            .partial_cmp(&(b.0, b.1, b.2))
            .expect("finite grid")
    });
    points.dedup();

    let mut table = Table::new([
        "N",
        "T_dB",
        "T_linear",
        "alpha",
        "intensity",
        "d",
        "B",
        "q_tuned",
        "q2_tuned",
        "f_residual",
        "sign_changes",
        "ccdf_ppp",
        "ccdf_mixture_tuned",
        "status",
    ]);
    let mut failed_rows = 0;
    for &(n, db, lp) in &points {
        let t = threshold_linear(db)?;
        let params = SystemParams {
            lambda: lp,
            p: 1.0,
            ..s.params
        };
        let mut cells: Vec<Cell> = vec![
            n.into(),
            db.into(),
            t.into(),
            params.alpha.into(),
            lp.into(),
            params.d.into(),
        ];
        match tune_q(&params, n, t) {
            Ok(tq) => {
                let ppp = joint_ccdf_ppp(n, tq.b, params.alpha)?;
                let mix = joint_ccdf_mixture(n, tq.q, tq.b, params.alpha)?;
                cells.extend([
                    tq.b.into(),
                    tq.q.into(),
                    tq.q_squared.into(),
                    tq.residual.into(),
                    tq.sign_changes.into(),
                    ppp.into(),
                    mix.into(),
                    "ok".into(),
                ]);
            }
            Err(e) => {
                if !matches!(e, Error::Degenerate(_)) {
                    failed_rows += 1;
                }
                let status = match e {
                    Error::Degenerate(msg) => format!("not identifiable: {msg}"),
                    other => format!("error: {other}"),
                };
                cells.extend(std::iter::repeat_n(Cell::Empty, 7));
                cells.push(status.into());
            }
        }
        table.push(cells);
    }
    Ok(Output {
        header: run_header("tune-q", s),
        table,
        failed_rows,
    })
}

fn model_and_q(
    s: &Settings,
    params: &SystemParams,
    antennas: usize,
    t_linear: f64,
) -> Result<(InterferenceModel, Option<f64>), CliError> {
    // the analytic comparison uses the policy weight under either model
    let q = policy_q(s, params, antennas, t_linear)?;
    let model = match s.model {
        Model::Ppp => InterferenceModel::Ppp,
        Model::Mixture => InterferenceModel::Mixture {
            q: q.unwrap_or(1.0),
        },
    };
    Ok((model, q))
}

fn model_name(model: Model) -> &'static str {
    match model {
        Model::Ppp => "ppp",
        Model::Mixture => "mixture",
    }
}

/// Pairwise correlations at two antennas.
pub fn correlations(s: &Settings) -> Result<Output, CliError> {
    let t = threshold_linear(s.threshold_db)?;
    let (model, _) = model_and_q(s, &s.params, 2, t)?;
    let half_width = window_half_width(s, &s.params)?;
    if s.params.epsilon == 0.0 {
        log::warn!("with epsilon = 0 the interference variance is infinite and zeta does not settle; use --epsilon > 0");
    }
    let start = Instant::now();
    let report = estimate_correlations(&s.params, &s.sim, model)?;
    let seconds = start.elapsed().as_secs_f64();

    let mut table = Table::new([
        "model",
        "q",
        "alpha",
        "intensity",
        "d",
        "epsilon",
        "zeta",
        "zeta_stderr",
        "zeta_inv",
        "zeta_inv_stderr",
        "sir_corr",
        "sir_corr_stderr",
        "sir_corr_recomposed",
        "sir_corr_recomposed_stderr",
        "var_inv_1",
        "var_inv_2",
        "var_h_inv_1",
        "var_h_inv_2",
        "zero_interference_trials",
        "valid_trials",
        "trials",
        "seed",
        "window_half_width",
        "wall_time_s",
    ]);
    let q_cell = match model {
        InterferenceModel::Ppp => Cell::Empty,
        InterferenceModel::Mixture { q } => q.into(),
    };
    table.push(vec![
        model_name(s.model).into(),
        q_cell,
        s.params.alpha.into(),
        s.params.lambda_p().into(),
        s.params.d.into(),
        s.params.epsilon.into(),
        report.zeta.mean.into(),
        report.zeta.stderr.into(),
        report.zeta_inv.mean.into(),
        report.zeta_inv.stderr.into(),
        report.sir_corr.mean.into(),
        report.sir_corr.stderr.into(),
        report.sir_corr_recomposed.mean.into(),
        report.sir_corr_recomposed.stderr.into(),
        report.var_inv.0.mean.into(),
        report.var_inv.1.mean.into(),
        report.var_h_inv.0.mean.into(),
        report.var_h_inv.1.mean.into(),
        report.zero_interference_trials.into(),
        report.valid_trials.into(),
        s.sim.trials.into(),
        s.sim.master_seed.into(),
        half_width.into(),
        seconds.into(),
    ]);
    Ok(Output {
        header: run_header("correlations", s),
        table,
        failed_rows: 0,
    })
}

/// Monte Carlo outage at the configured point, next to the analytic value
/// for the policy weight.
pub fn simulate(s: &Settings) -> Result<Output, CliError> {
    let t = threshold_linear(s.threshold_db)?;
    let n = s.antennas;
    let (model, q) = model_and_q(s, &s.params, n, t)?;
    let half_width = window_half_width(s, &s.params)?;
    let start = Instant::now();
    let estimate = match model {
        InterferenceModel::Ppp => simulate_mrc_outage_ppp(&s.params, n, t, &s.sim)?,
        InterferenceModel::Mixture { q } => {
            simulate_mrc_outage_mixture(&s.params, &MixtureConfig::new(n, q)?, t, &s.sim)?
        }
    };
    let seconds = start.elapsed().as_secs_f64();
    let q_used = q.unwrap_or(1.0);
    let analytic = outage_mixture(
        &s.params,
        &MixtureConfig::new(n, q_used)?,
        t,
        &s.integration,
    )?;

    let mut table = Table::new([
        "T_dB",
        "T_linear",
        "N",
        "alpha",
        "intensity",
        "d",
        "epsilon",
        "model",
        "q_policy",
        "q",
        "q2",
        "pout_mc",
        "pout_mc_stderr",
        "pout_analytic",
        "trials",
        "seed",
        "window_half_width",
        "wall_time_s",
    ]);
    table.push(vec![
        s.threshold_db.into(),
        t.into(),
        n.into(),
        s.params.alpha.into(),
        s.params.lambda_p().into(),
        s.params.d.into(),
        s.params.epsilon.into(),
        model_name(s.model).into(),
        policy_name(s.q_policy).into(),
        Cell::opt(q),
        Cell::opt(q.map(|q| q * q)),
        estimate.mean.into(),
        estimate.stderr.into(),
        analytic.into(),
        estimate.trials.into(),
        s.sim.master_seed.into(),
        half_width.into(),
        seconds.into(),
    ]);
    Ok(Output {
        header: run_header("simulate", s),
        table,
        failed_rows: 0,
    })
}
