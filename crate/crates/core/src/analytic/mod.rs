//! Mixture-model evaluation of the MRC outage probability, the joint SIR
//! CCDFs of the Poisson and mixture models, and tuning of the mixture weight.

mod correlation;
mod outage;
mod params;
mod tuning;

pub use correlation::sir_correlation_identity;
pub use outage::{
    outage_mixture, outage_mixture_components, w_n, w_n_estimate, OutageComponents, WnEstimate,
};
pub use params::{IntegrationMethod, IntegrationPolicy, MixtureConfig, SystemParams};
pub use tuning::{
    ccdf_difference, joint_ccdf_mixture, joint_ccdf_ppp, ppp_ccdf_exponent, tune_q, tune_q_for_b,
    TunedQ,
};
