use serde::Serialize;

use super::config::{EstimateConfig, HarnessConfig, Scheme};
use super::sweep::evaluate_scheme;
use crate::error::{IsacError, Result};
use crate::estimators::{mle_gaussian, mle_super, simulate_trial, EstimateResult, GridSpec, SignalMode};

/// Estimate plus the truth it should be compared with.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub scheme: String,
    pub trial: u64,
    pub theta_true: f64,
    pub alpha_mag_true: f64,
    pub crb_rad2: f64,
    #[serde(flatten)]
    pub result: EstimateResult,
}

/// Synthesize, receive and estimate once for the `[estimate]` section.
pub fn run_estimate(cfg: &HarnessConfig, seed: u64) -> Result<EstimateReport> {
    let est = cfg.estimate.clone().unwrap_or_default();
    let scheme: Scheme = est.scheme.parse()?;
    if !scheme.has_estimator() {
        return Err(IsacError::InvalidConfig(format!("scheme {:?} has no estimator", est.scheme)));
    }
    let sc = cfg.scenario.build(&cfg.path_loss)?;
    let eval = evaluate_scheme(scheme, &sc)?;
    let covs = eval.covs.expect("estimator schemes carry covariances");
    let EstimateConfig { trial, keep_curve, phase_reference, .. } = est;
    let grid = GridSpec { keep_curve, ..GridSpec::default() };
    let (tx, rx) = simulate_trial(&sc, &covs.r_c, &covs.r_s, seed, trial)?;
    let result = match rx.mode {
        SignalMode::GaussianOnly => mle_gaussian(&rx, &sc, &covs.r_c, &grid)?,
        SignalMode::Superposed => mle_super(&rx, &sc, &covs.r_c, &covs.r_s, &tx, &grid, phase_reference)?,
    };
    Ok(EstimateReport {
        scheme: est.scheme,
        trial,
        theta_true: sc.theta,
        alpha_mag_true: sc.alpha.norm(),
        crb_rad2: eval.crb,
        result,
    })
}
