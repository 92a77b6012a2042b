//! Transmit signal synthesis, the echo model, and grid-search DoA estimators.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::array::steering_rx;
use crate::channel::Scenario;
use crate::error::{IsacError, Result};
use crate::linalg::{complex_normal, complex_normal_matrix, CMat, CVec, HermitianCov};
use crate::rng::{derive_seed, rng_from_seed, Stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SignalMode {
    GaussianOnly,
    Superposed,
}

/// Transmitted block: Gaussian symbols `S` and deterministic sequences `X0`, both `m_tx x T`.
#[derive(Debug, Clone)]
pub struct TxRealization {
    pub gaussian: CMat,
    pub deterministic: CMat,
    pub mode: SignalMode,
}

impl TxRealization {
    /// Sum of both parts, `S + X0`.
    pub fn total(&self) -> CMat {
        &self.gaussian + &self.deterministic
    }

    pub fn superpose(gaussian: TxRealization, deterministic: TxRealization) -> Self {
        Self {
            gaussian: gaussian.gaussian,
            deterministic: deterministic.deterministic,
            mode: SignalMode::Superposed,
        }
    }
}

/// Received echo `Y`, `m_rx x T`.
#[derive(Debug, Clone)]
pub struct RxBlock {
    pub samples: CMat,
    pub mode: SignalMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub theta_hat: f64,
    pub alpha_mag_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha_phase_hat: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub objective_curve: Option<Vec<(f64, f64)>>,
}

/// Coarse-to-fine search grid over `[-pi/2, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub coarse_step: f64,
    pub refine_rounds: usize,
    pub refine_factor: usize,
    pub keep_curve: bool,
}

impl Default for GridSpec {
    /// 0.005 rad coarse pass and three 10x refinements (final step 5e-6 rad).
    fn default() -> Self {
        Self { coarse_step: 0.005, refine_rounds: 3, refine_factor: 10, keep_curve: false }
    }
}

impl GridSpec {
    pub fn final_step(&self) -> f64 {
        self.coarse_step / (self.refine_factor as f64).powi(self.refine_rounds as i32)
    }
}

/// Which symbols feed the phase estimate of `alpha` in superposed mode.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseReference {
    /// Correlate against the known deterministic sequences.
    #[default]
    Deterministic,
    /// Correlate against the Gaussian symbols themselves. Needs the realization,
    /// which a bistatic receiver does not have; kept for comparison runs.
    GaussianSymbols,
}

fn check_cov(sc: &Scenario, r: &HermitianCov) -> Result<()> {
    if r.dim() != sc.ula.m_tx() {
        return Err(IsacError::Dimension { expected: sc.ula.m_tx(), got: r.dim() });
    }
    Ok(())
}

/// Columns i.i.d. `CN(0, R_c)`; eigenvalues below `1e-12 * trace` are dropped.
pub fn synth_gaussian(sc: &Scenario, r_c: &HermitianCov, seed: u64) -> Result<TxRealization> {
    check_cov(sc, r_c)?;
    let (m, t) = (sc.ula.m_tx(), sc.t_symbols);
    let mut gaussian = CMat::zeros(m, t);
    let tr = r_c.trace();
    if tr > 0.0 {
        let (vals, vecs) = r_c.eigen();
        let mut factor = CMat::zeros(m, m);
        for (k, &l) in vals.iter().enumerate() {
            if l > 1e-12 * tr {
                factor.set_column(k, &(vecs.column(k) * Complex64::from(l.sqrt())));
            }
        }
        let mut rng = rng_from_seed(seed);
        gaussian = factor * complex_normal_matrix(&mut rng, m, t);
    }
    Ok(TxRealization { gaussian, deterministic: CMat::zeros(m, t), mode: SignalMode::GaussianOnly })
}

/// Deterministic sequences whose sample covariance `(1/T) X0 X0^H` equals `R_s`.
///
/// `X0 = V L^{1/2} Q` where `Q` has rank-many rows drawn from distinct DFT
/// frequencies, each with a seeded phase offset, multiplied by a seeded
/// per-symbol phase. Every entry of `Q` is unit-modulus and `(1/T) Q Q^H = I`.
pub fn synth_deterministic(sc: &Scenario, r_s: &HermitianCov, seed: u64) -> Result<TxRealization> {
    check_cov(sc, r_s)?;
    let (m, t) = (sc.ula.m_tx(), sc.t_symbols);
    let rank = r_s.rank();
    if rank > t {
        return Err(IsacError::RankTooHigh { rank, symbols: t });
    }
    let mut deterministic = CMat::zeros(m, t);
    if rank > 0 {
        let (vals, vecs) = r_s.eigen();
        let mut rng = rng_from_seed(seed);
        let mut freqs: Vec<usize> = (0..t).collect();
        freqs.shuffle(&mut rng);
        let row_phase: Vec<f64> = (0..rank).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        let sym_phase: Vec<f64> = (0..t).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        let q = CMat::from_fn(rank, t, |k, s| {
            let ang = 2.0 * PI * (freqs[k] * s % t) as f64 / t as f64 + row_phase[k] + sym_phase[s];
            Complex64::from_polar(1.0, ang)
        });
        let mut factor = CMat::zeros(m, rank);
        for (k, v) in vals.iter().take(rank).enumerate() {
            factor.set_column(k, &(vecs.column(k) * Complex64::from(v.max(0.0).sqrt())));
        }
        deterministic = factor * q;
    }
    Ok(TxRealization { gaussian: CMat::zeros(m, t), deterministic, mode: SignalMode::Superposed })
}

/// Both parts of a superposed transmission for one trial, on independent streams.
pub fn synth_superposed(
    sc: &Scenario,
    r_c: &HermitianCov,
    r_s: &HermitianCov,
    master: u64,
    trial: u64,
) -> Result<TxRealization> {
    let g = synth_gaussian(sc, r_c, derive_seed(master, Stream::Gaussian, trial))?;
    let d = synth_deterministic(sc, r_s, derive_seed(master, Stream::Deterministic, trial))?;
    Ok(TxRealization::superpose(g, d))
}

/// Echo `Y = alpha b(theta) a(phi)^T (S + X0) + N` with `N` columns i.i.d. `CN(0, sigma_s^2 I)`.
pub fn receive(sc: &Scenario, tx: &TxRealization, seed: u64) -> Result<RxBlock> {
    let (m_tx, t) = (sc.ula.m_tx(), sc.t_symbols);
    if tx.gaussian.shape() != (m_tx, t) || tx.deterministic.shape() != (m_tx, t) {
        return Err(IsacError::Dimension { expected: m_tx * t, got: tx.gaussian.len() });
    }
    let b = sc.b();
    let a_t = sc.a().transpose();
    let beam = &a_t * tx.total();
    let mut y = &b * beam * sc.alpha;
    let mut rng = rng_from_seed(seed);
    let sigma = sc.sigma_s2.sqrt();
    for c in 0..t {
        for r in 0..sc.ula.m_rx() {
            y[(r, c)] += complex_normal(&mut rng) * sigma;
        }
    }
    Ok(RxBlock { samples: y, mode: tx.mode })
}

/// Receive with the noise drawn from the trial's noise stream.
pub fn receive_trial(sc: &Scenario, tx: &TxRealization, master: u64, trial: u64) -> Result<RxBlock> {
    receive(sc, tx, derive_seed(master, Stream::Noise, trial))
}

/// Maximizes `f` over the grid; ties go to the smaller angle.
fn grid_search(grid: &GridSpec, mut f: impl FnMut(f64) -> f64) -> (f64, Option<Vec<(f64, f64)>>) {
    let n = (PI / grid.coarse_step).ceil() as usize;
    let mut best = (f64::NEG_INFINITY, -FRAC_PI_2);
    let mut curve = grid.keep_curve.then(|| Vec::with_capacity(n + 1));
    for k in 0..=n {
        let th = (-FRAC_PI_2 + k as f64 * grid.coarse_step).min(FRAC_PI_2);
        let v = f(th);
        if let Some(c) = curve.as_mut() {
            c.push((th, v));
        }
        if v > best.0 {
            best = (v, th);
        }
    }
    let mut step = grid.coarse_step;
    let half = grid.refine_factor as i64;
    for _ in 0..grid.refine_rounds {
        step /= grid.refine_factor as f64;
        let center = best.1;
        let mut local = (f64::NEG_INFINITY, center);
        for i in -half..=half {
            let th = center + i as f64 * step;
            if !(-FRAC_PI_2..=FRAC_PI_2).contains(&th) {
                continue;
            }
            let v = f(th);
            if v > local.0 {
                local = (v, th);
            }
        }
        best = local;
    }
    (best.1, curve)
}

/// Per-symbol beamformer outputs `b(theta)^H y(t)`.
fn beam_outputs(y: &CMat, b: &CVec) -> Vec<Complex64> {
    (0..y.ncols()).map(|t| b.dotc(&y.column(t))).collect()
}

fn check_energy(rx: &RxBlock) -> Result<()> {
    if rx.samples.iter().all(|z| z.norm_sqr() == 0.0) {
        return Err(IsacError::DegenerateSamples);
    }
    Ok(())
}

/// Concentrated Gaussian-only log-likelihood (constants dropped) for beam energy `s = sum_t |b^H y(t)|^2`.
///
/// With `u = sigma^2 + |alpha|^2 q ||b||^2` profiled out at `u = max(s / (T ||b||^2), sigma^2)`,
/// the log-likelihood is `s / (sigma^2 ||b||^2) - s / (u ||b||^2) - T ln u`.
fn gaussian_profile(s: f64, b_norm2: f64, t: f64, sigma2: f64) -> f64 {
    let u = (s / (t * b_norm2)).max(sigma2);
    s / (sigma2 * b_norm2) - s / (u * b_norm2) - t * u.ln()
}

/// `|alpha|` from the beam energy: `sqrt(s/(T ||b||^4 q) - sigma^2/(||b||^2 q))`, clamped at zero.
fn alpha_magnitude(s: f64, b_norm2: f64, t: f64, sigma2: f64, q: f64) -> f64 {
    (s / (t * b_norm2 * b_norm2 * q) - sigma2 / (b_norm2 * q)).max(0.0).sqrt()
}

/// Maximum-likelihood DoA and `|alpha|` from Gaussian-only echoes, using only `R_c`.
pub fn mle_gaussian(rx: &RxBlock, sc: &Scenario, r_c: &HermitianCov, grid: &GridSpec) -> Result<EstimateResult> {
    if rx.mode != SignalMode::GaussianOnly {
        return Err(IsacError::InvalidConfig("mle_gaussian expects a Gaussian-only block".into()));
    }
    check_cov(sc, r_c)?;
    check_energy(rx)?;
    let q = r_c.quad(&sc.a_conj());
    if !(q > 0.0) {
        return Err(IsacError::Unobservable);
    }
    let t = sc.t_symbols as f64;
    let sigma2 = sc.sigma_s2;
    let energy = |theta: f64| -> (f64, f64) {
        let b = steering_rx(&sc.ula, theta);
        let s = beam_outputs(&rx.samples, &b).iter().map(|z| z.norm_sqr()).sum();
        (s, b.norm_squared())
    };
    let (theta_hat, curve) = grid_search(grid, |th| {
        let (s, bn) = energy(th);
        gaussian_profile(s, bn, t, sigma2)
    });
    let (s, bn) = energy(theta_hat);
    Ok(EstimateResult {
        theta_hat,
        alpha_mag_hat: alpha_magnitude(s, bn, t, sigma2, q),
        alpha_phase_hat: None,
        objective_curve: curve,
    })
}

/// Estimator for superposed echoes.
///
/// For each candidate angle the phase of `alpha` comes from correlating the beam
/// outputs with the known sequences `a^T x0(t)`, the magnitude from the beam
/// energy against `a^T (R_c + R_s) a*`, and the angle maximizes the full
/// log-likelihood with that `alpha` plugged in. The DoD `phi` is taken as known.
pub fn mle_super(
    rx: &RxBlock,
    sc: &Scenario,
    r_c: &HermitianCov,
    r_s: &HermitianCov,
    tx: &TxRealization,
    grid: &GridSpec,
    phase_ref: PhaseReference,
) -> Result<EstimateResult> {
    check_cov(sc, r_c)?;
    check_cov(sc, r_s)?;
    check_energy(rx)?;
    let a_conj = sc.a_conj();
    let q_c = r_c.quad(&a_conj).max(0.0);
    let q_tot = q_c + r_s.quad(&a_conj).max(0.0);
    if !(q_tot > 0.0) {
        return Err(IsacError::Unobservable);
    }
    let a_t = sc.a().transpose();
    let known: Vec<Complex64> = (&a_t * &tx.deterministic).iter().copied().collect();
    let phase_seq: Vec<Complex64> = match phase_ref {
        PhaseReference::Deterministic => known.clone(),
        PhaseReference::GaussianSymbols => (&a_t * &tx.gaussian).iter().copied().collect(),
    };
    let t = sc.t_symbols as f64;
    let sigma2 = sc.sigma_s2;

    let alpha_at = |z: &[Complex64], bn: f64| -> Complex64 {
        let s: f64 = z.iter().map(|v| v.norm_sqr()).sum();
        let mag = alpha_magnitude(s, bn, t, sigma2, q_tot);
        let corr: Complex64 = z.iter().zip(&phase_seq).map(|(zt, st)| st.conj() * zt).sum();
        Complex64::from_polar(mag, corr.arg())
    };

    let loglik = |theta: f64| -> f64 {
        let b = steering_rx(&sc.ula, theta);
        let bn = b.norm_squared();
        let z = beam_outputs(&rx.samples, &b);
        let alpha = alpha_at(&z, bn);
        let c = alpha.norm_sqr() * q_c;
        let u = sigma2 + c * bn;
        let mut acc = 0.0;
        for (zt, st) in z.iter().zip(&known) {
            let mean = alpha * st;
            let resid = zt - mean * bn;
            acc += -2.0 * (mean.conj() * zt).re + mean.norm_sqr() * bn - c * resid.norm_sqr() / u;
        }
        -acc / sigma2 - t * u.ln()
    };

    let (theta_hat, curve) = grid_search(grid, loglik);
    let b = steering_rx(&sc.ula, theta_hat);
    let alpha = alpha_at(&beam_outputs(&rx.samples, &b), b.norm_squared());
    Ok(EstimateResult {
        theta_hat,
        alpha_mag_hat: alpha.norm(),
        alpha_phase_hat: Some(alpha.arg()),
        objective_curve: curve,
    })
}

/// Draw one trial's receive block for the given split; Gaussian-only when `r_s` is zero.
pub fn simulate_trial(
    sc: &Scenario,
    r_c: &HermitianCov,
    r_s: &HermitianCov,
    master: u64,
    trial: u64,
) -> Result<(TxRealization, RxBlock)> {
    let mut tx = synth_superposed(sc, r_c, r_s, master, trial)?;
    if r_s.trace() == 0.0 {
        tx.mode = SignalMode::GaussianOnly;
    }
    let rx = receive_trial(sc, &tx, master, trial)?;
    Ok((tx, rx))
}
