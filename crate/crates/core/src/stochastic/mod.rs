//! Monte Carlo ground truth: the Poisson dipole network and the auxiliary
//! mixture construction, sampled trial by trial on a finite window.

mod config;
mod correlations;
mod network;
mod outage;

pub use config::{EstimateCI, SimConfig, Window, AUTO_MEAN_INTERFERERS};
pub use correlations::{
    estimate_correlations, CorrelationReport, PairMoments, BATCHES, MIN_VALID_TRIALS,
};
pub use network::{
    sample_ppp_interference, InterferenceModel, NetworkRealization, PppField, TrialDraw,
};
pub use outage::{
    estimate_joint_ccdf, simulate_mrc_outage_mixture, simulate_mrc_outage_mixture_grid,
    simulate_mrc_outage_ppp, simulate_mrc_outage_ppp_grid,
};
