//! Parameter sweeps over bounds, estimator MSE and the bound-rate tradeoff.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{HarnessConfig, Scheme, SweepConfig};
use crate::beamform::{mrt_cov, power_splitting, solve_p2, solve_p4_multistart, CovPair, ScaOptions};
use crate::channel::Scenario;
use crate::error::{IsacError, Result};
use crate::estimators::{mle_gaussian, mle_super, simulate_trial, GridSpec, PhaseReference, SignalMode};
use crate::fim::{crb_deterministic, crb_gaussian, crb_min_closed_forms, crb_super, SensingGeometry};
use crate::linalg::{linear_to_db, HermitianCov};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    Infeasible,
    Unobservable,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Infeasible => "infeasible",
            RowStatus::Unobservable => "unobservable",
        }
    }
}

/// One `(axis value, scheme)` result. Absent quantities are `None`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub scheme: String,
    pub status: RowStatus,
    pub crb_rad2: Option<f64>,
    pub crb_db: Option<f64>,
    pub mse_rad2: Option<f64>,
    pub mse_db: Option<f64>,
    pub rate_bps: Option<f64>,
    /// Radar SNR of the scheme's total covariance, in dB.
    pub radar_snr_db: Option<f64>,
    pub iterations: Option<usize>,
}

impl SweepRow {
    fn empty(axis_value: f64, scheme: &str, status: RowStatus) -> Self {
        Self {
            axis_value,
            scheme: scheme.to_string(),
            status,
            crb_rad2: None,
            crb_db: None,
            mse_rad2: None,
            mse_db: None,
            rate_bps: None,
            radar_snr_db: None,
            iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: &'static str,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows of one scheme in axis order.
    pub fn scheme_rows<'a>(&'a self, scheme: &'a str) -> impl Iterator<Item = &'a SweepRow> + 'a {
        self.rows.iter().filter(move |r| r.scheme == scheme)
    }
}

/// Covariances and bound of one scheme at one scenario.
#[derive(Debug, Clone)]
pub struct SchemeEval {
    pub covs: Option<CovPair>,
    pub crb: f64,
    pub rate: f64,
    pub iterations: Option<usize>,
}

fn rate_of(pair: &CovPair, sc: &Scenario) -> f64 {
    (1.0 + pair.sinr(&sc.h, sc.sigma_c2)).log2()
}

/// Evaluates `scheme` at `sc`. Infeasible SINR targets and zero target power
/// come back as the matching error so callers can mark the row.
pub fn evaluate_scheme(scheme: Scheme, sc: &Scenario) -> Result<SchemeEval> {
    let m = sc.ula.m_tx();
    let zero = HermitianCov::zeros(m);
    let single = |pair: CovPair, crb: f64| {
        let rate = rate_of(&pair, sc);
        Ok(SchemeEval { covs: Some(pair), crb, rate, iterations: None })
    };
    match scheme {
        Scheme::Gaussian => {
            let r_c = solve_p2(sc)?;
            let crb = crb_gaussian(sc, &r_c)?;
            single(CovPair { r_c, r_s: zero }, crb)
        }
        Scheme::Known => {
            let r_c = solve_p2(sc)?;
            let crb = crb_deterministic(sc, &r_c)?;
            single(CovPair { r_c, r_s: zero }, crb)
        }
        Scheme::Deterministic => {
            let r_s = mrt_cov(sc.p_max, &sc.a());
            let crb = crb_deterministic(sc, &r_s)?;
            Ok(SchemeEval { covs: Some(CovPair { r_c: zero, r_s }), crb, rate: 0.0, iterations: None })
        }
        Scheme::Superposed(Some(f)) => {
            let r_c = mrt_cov((1.0 - f) * sc.p_max, &sc.a());
            let r_s = mrt_cov(f * sc.p_max, &sc.a());
            let crb = crb_super(sc, &r_c, &r_s)?;
            single(CovPair { r_c, r_s }, crb)
        }
        Scheme::Superposed(None) => {
            let (pair, trace) = solve_p4_multistart(sc, &ScaOptions::default())?;
            let crb = crb_super(sc, &pair.r_c, &pair.r_s)?;
            let rate = rate_of(&pair, sc);
            Ok(SchemeEval { covs: Some(pair), crb, rate, iterations: Some(trace.iterations) })
        }
        Scheme::PowerSplitting => {
            let pair = power_splitting(sc)?;
            let crb = crb_super(sc, &pair.r_c, &pair.r_s)?;
            single(pair, crb)
        }
        Scheme::TimeSwitching => {
            // sensing slot: deterministic target MRT; user slot: user MRT at the largest rate
            let r_max = (1.0 + sc.sinr_bound()).log2();
            let rate = (1.0 + sc.gamma0).log2();
            let tau = 1.0 - rate / r_max;
            if !(tau > 0.0) {
                return Err(IsacError::Infeasible { gamma0: sc.gamma0, bound: sc.sinr_bound() });
            }
            let crb = crb_min_closed_forms(sc).deterministic / tau;
            Ok(SchemeEval { covs: None, crb, rate, iterations: None })
        }
    }
}

fn radar_snr_db(sc: &Scenario, covs: &Option<CovPair>) -> Option<f64> {
    covs.as_ref().map(|p| {
        let g = SensingGeometry::new(sc);
        linear_to_db(g.radar_snr(g.q(&p.total())))
    })
}

fn bound_row(v: f64, name: &str, scheme: Scheme, sc: &Scenario) -> Result<(SweepRow, Option<CovPair>)> {
    match evaluate_scheme(scheme, sc) {
        Ok(e) => {
            let mut row = SweepRow::empty(v, name, RowStatus::Ok);
            row.crb_rad2 = Some(e.crb);
            row.crb_db = Some(linear_to_db(e.crb));
            row.rate_bps = Some(e.rate);
            row.radar_snr_db = radar_snr_db(sc, &e.covs);
            row.iterations = e.iterations;
            Ok((row, e.covs))
        }
        Err(IsacError::Infeasible { .. }) => Ok((SweepRow::empty(v, name, RowStatus::Infeasible), None)),
        Err(IsacError::Unobservable) => Ok((SweepRow::empty(v, name, RowStatus::Unobservable), None)),
        Err(e) => Err(e),
    }
}

fn points(cfg: &HarnessConfig, sweep: &SweepConfig) -> Result<Vec<(f64, Scenario)>> {
    let base = cfg.scenario.build(&cfg.path_loss)?;
    sweep
        .values
        .iter()
        .map(|&v| Ok((v, sweep.axis.apply(&base, &cfg.scenario, &cfg.path_loss, v)?)))
        .collect()
}

fn require_axis(sweep: &SweepConfig, tradeoff: bool, cmd: &str) -> Result<()> {
    if sweep.axis.is_tradeoff() != tradeoff {
        return Err(IsacError::InvalidConfig(format!("axis {} is not valid for {cmd}", sweep.axis.name())));
    }
    Ok(())
}

fn run_bounds(cfg: &HarnessConfig, sweep: &SweepConfig) -> Result<SweepResult> {
    let schemes = sweep.parsed_schemes()?;
    let pts = points(cfg, sweep)?;
    let rows: Vec<Vec<SweepRow>> = pts
        .par_iter()
        .map(|(v, sc)| {
            schemes
                .iter()
                .zip(&sweep.schemes)
                .map(|(&s, name)| bound_row(*v, name, s, sc).map(|r| r.0))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult { axis: sweep.axis.name(), rows: rows.into_iter().flatten().collect() })
}

/// Bounds of every scheme along a power, SNR or distance axis.
pub fn run_crb_sweep(cfg: &HarnessConfig) -> Result<SweepResult> {
    let sweep = cfg.sweep()?;
    require_axis(sweep, false, "crb-sweep")?;
    run_bounds(cfg, sweep)
}

/// Bounds of every scheme along a rate or SINR-threshold axis.
pub fn run_tradeoff(cfg: &HarnessConfig) -> Result<SweepResult> {
    let sweep = cfg.sweep()?;
    require_axis(sweep, true, "tradeoff")?;
    run_bounds(cfg, sweep)
}

/// Squared DoA error of one Monte Carlo trial.
pub fn trial_sq_error(sc: &Scenario, covs: &CovPair, master: u64, trial: u64, grid: &GridSpec) -> Result<f64> {
    let (tx, rx) = simulate_trial(sc, &covs.r_c, &covs.r_s, master, trial)?;
    let est = match rx.mode {
        SignalMode::GaussianOnly => mle_gaussian(&rx, sc, &covs.r_c, grid)?,
        SignalMode::Superposed => {
            mle_super(&rx, sc, &covs.r_c, &covs.r_s, &tx, grid, PhaseReference::Deterministic)?
        }
    };
    Ok((est.theta_hat - sc.theta).powi(2))
}

/// Bounds plus estimator MSE over `sweep.trials` trials per point. Trial `k`
/// at point `i` uses index `i * trials + k`, shared by all schemes.
pub fn run_mse_sweep(cfg: &HarnessConfig) -> Result<SweepResult> {
    let sweep = cfg.sweep()?;
    require_axis(sweep, false, "mse-sweep")?;
    let schemes = sweep.parsed_schemes()?;
    if let Some((_, name)) = schemes.iter().zip(&sweep.schemes).find(|(s, _)| !s.has_estimator()) {
        return Err(IsacError::InvalidConfig(format!("scheme {name:?} has no estimator")));
    }
    let pts = points(cfg, sweep)?;
    let grid = GridSpec::default();
    let trials = sweep.trials as u64;
    let mut rows = Vec::with_capacity(pts.len() * schemes.len());
    for (i, (v, sc)) in pts.iter().enumerate() {
        for (&s, name) in schemes.iter().zip(&sweep.schemes) {
            let (mut row, covs) = bound_row(*v, name, s, sc)?;
            if let Some(covs) = covs {
                let errs: Vec<f64> = (0..trials)
                    .into_par_iter()
                    .map(|k| trial_sq_error(sc, &covs, sweep.seed, i as u64 * trials + k, &grid))
                    .collect::<Result<_>>()?;
                let mse = errs.iter().sum::<f64>() / trials as f64;
                row.mse_rad2 = Some(mse);
                row.mse_db = Some(linear_to_db(mse));
            }
            rows.push(row);
        }
    }
    Ok(SweepResult { axis: sweep.axis.name(), rows })
}
