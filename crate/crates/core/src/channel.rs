//! Path loss, the Rician BS-to-user channel and the scene description.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{steering_rx, steering_rx_deriv, steering_tx, UlaConfig};
use crate::error::{IsacError, Result};
use crate::linalg::{complex_normal, conj_vec, db_to_linear, CVec};
use crate::rng::rng_from_seed;

/// Log-distance path loss `K0 * (d / d0)^(-exponent)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub k0_db: f64,
    pub d0: f64,
    pub exponent: f64,
}

impl PathLossModel {
    pub fn new(k0_db: f64, d0: f64, exponent: f64) -> Result<Self> {
        if !(d0 > 0.0) || !(exponent > 0.0) || !k0_db.is_finite() {
            return Err(IsacError::InvalidConfig(format!(
                "path loss needs d0 > 0 and exponent > 0 (d0 = {d0}, exponent = {exponent})"
            )));
        }
        Ok(Self { k0_db, d0, exponent })
    }
}

impl Default for PathLossModel {
    /// -30 dB at 1 m with exponent 2.5.
    fn default() -> Self {
        Self { k0_db: -30.0, d0: 1.0, exponent: 2.5 }
    }
}

/// Linear power gain at distance `d` meters.
pub fn path_loss(model: &PathLossModel, d: f64) -> Result<f64> {
    if !(d > 0.0) || !d.is_finite() {
        return Err(IsacError::InvalidConfig(format!("distance must be positive, got {d}")));
    }
    Ok(db_to_linear(model.k0_db) * (d / model.d0).powf(-model.exponent))
}

/// Target-path amplitude `beta * sqrt(L(d_bt) * L(d_tr))`.
pub fn target_gain(model: &PathLossModel, d_bt: f64, d_tr: f64, beta: Complex64) -> Result<Complex64> {
    let l1 = path_loss(model, d_bt)? * path_loss(model, d_tr)?;
    Ok(beta * l1.sqrt())
}

/// K-factor at or above which the NLoS part is dropped entirely.
pub const PURE_LOS_K: f64 = 1e12;

/// Rician channel `sqrt(gain) * (sqrt(K/(K+1)) a(los_angle) + sqrt(1/(K+1)) w)` with
/// `w ~ CN(0, I)`; deterministic in `seed`.
pub fn rician_cu_channel(cfg: &UlaConfig, k_factor: f64, los_angle: f64, gain: f64, seed: u64) -> CVec {
    assert!(k_factor >= 0.0 && gain > 0.0);
    let los = steering_tx(cfg, los_angle);
    let amp = gain.sqrt();
    if k_factor >= PURE_LOS_K {
        return los * Complex64::from(amp);
    }
    let mut rng = rng_from_seed(seed);
    let w_los = (k_factor / (k_factor + 1.0)).sqrt();
    let w_nlos = (1.0 / (k_factor + 1.0)).sqrt();
    CVec::from_iterator(
        cfg.m_tx(),
        los.iter()
            .map(|z| Complex64::from(amp) * (z * w_los + complex_normal(&mut rng) * w_nlos)),
    )
}

/// Full physical scene. Powers in watts, angles in radians.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub ula: UlaConfig,
    /// Target DoA at the sensing receiver.
    pub theta: f64,
    /// Target DoD at the base station.
    pub phi: f64,
    pub alpha: Complex64,
    /// BS-to-user channel, length `m_tx`.
    pub h: CVec,
    pub p_max: f64,
    pub sigma_c2: f64,
    pub sigma_s2: f64,
    pub t_symbols: usize,
    /// Linear SINR threshold, used only by the constrained optimizers.
    pub gamma0: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(IsacError::InvalidConfig(msg));
        if self.h.len() != self.ula.m_tx() {
            return Err(IsacError::Dimension { expected: self.ula.m_tx(), got: self.h.len() });
        }
        if !(self.p_max > 0.0) {
            return bad(format!("p_max must be positive, got {}", self.p_max));
        }
        if !(self.sigma_c2 > 0.0) || !(self.sigma_s2 > 0.0) {
            return bad("noise powers must be positive".into());
        }
        if self.t_symbols == 0 {
            return bad("t_symbols must be >= 1".into());
        }
        if !(self.gamma0 >= 0.0) {
            return bad(format!("gamma0 must be nonnegative, got {}", self.gamma0));
        }
        let half_pi = std::f64::consts::FRAC_PI_2 + 1e-12;
        if self.theta.abs() > half_pi || self.phi.abs() > half_pi {
            return bad("angles must lie in [-pi/2, pi/2]".into());
        }
        Ok(())
    }

    pub fn a(&self) -> CVec {
        steering_tx(&self.ula, self.phi)
    }

    /// `a*`, the direction whose quadratic form `a^T R a*` drives every CRB.
    pub fn a_conj(&self) -> CVec {
        conj_vec(&self.a())
    }

    pub fn b(&self) -> CVec {
        steering_rx(&self.ula, self.theta)
    }

    pub fn b_dot(&self) -> CVec {
        steering_rx_deriv(&self.ula, self.theta)
    }

    pub fn alpha_sqr(&self) -> f64 {
        self.alpha.norm_sqr()
    }

    /// `P ||h||^2 / sigma_c^2`, the largest attainable SINR.
    pub fn sinr_bound(&self) -> f64 {
        self.p_max * self.h.norm_squared() / self.sigma_c2
    }

    pub fn with_gamma0(&self, gamma0: f64) -> Self {
        Self { gamma0, ..self.clone() }
    }

    pub fn with_power(&self, p_max: f64) -> Self {
        Self { p_max, ..self.clone() }
    }

    /// Replace `|alpha|^2` keeping the phase of `alpha` (zero phase if `alpha = 0`).
    pub fn with_alpha_sqr(&self, alpha_sqr: f64) -> Self {
        let phase = if self.alpha == Complex64::new(0.0, 0.0) { 0.0 } else { self.alpha.arg() };
        Self { alpha: Complex64::from_polar(alpha_sqr.sqrt(), phase), ..self.clone() }
    }

    /// Radar SNR `|alpha|^2 q ||b||^2 / sigma_s^2` for a given `q = a^T R a*`.
    pub fn radar_snr(&self, q: f64) -> f64 {
        self.alpha_sqr() * q * self.ula.m_rx() as f64 / self.sigma_s2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn reference_distance_gives_k0() {
        let m = PathLossModel::default();
        assert!(rel(path_loss(&m, 1.0).unwrap(), 1e-3) < 1e-14);
        assert!(rel(path_loss(&m, 100.0).unwrap(), 1e-8) < 1e-12);
    }

    #[test]
    fn two_hundred_meters() {
        let m = PathLossModel::default();
        let db = 10.0 * path_loss(&m, 200.0).unwrap().log10();
        assert!((db - (-87.52574989159953)).abs() < 1e-9);
        let a = target_gain(&m, 200.0, 200.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!((10.0 * a.norm_sqr().log10() - (-175.05149978319906)).abs() < 1e-9);
    }

    #[test]
    fn target_gain_edge_cases() {
        let m = PathLossModel::default();
        let a = target_gain(&m, 1.0, 1.0, Complex64::new(1.0, 0.0)).unwrap();
        assert!(rel(a.re, 1e-3) < 1e-14 && a.im == 0.0);
        assert_eq!(target_gain(&m, 5.0, 7.0, Complex64::new(0.0, 0.0)).unwrap().norm(), 0.0);
        let beta = Complex64::new(0.3, -0.4);
        let g = target_gain(&m, 50.0, 80.0, beta).unwrap();
        let want = beta.norm_sqr() * path_loss(&m, 50.0).unwrap() * path_loss(&m, 80.0).unwrap();
        assert!(rel(g.norm_sqr(), want) < 1e-13);
    }

    #[test]
    fn nonpositive_distance_rejected() {
        let m = PathLossModel::default();
        assert!(path_loss(&m, 0.0).is_err());
        assert!(path_loss(&m, -3.0).is_err());
        assert!(PathLossModel::new(-30.0, 0.0, 2.0).is_err());
    }

    #[test]
    fn log_log_slope_is_minus_exponent() {
        let m = PathLossModel::new(-20.0, 2.0, 3.1).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let d = 1.0 + 10.0 * i as f64;
            let l = path_loss(&m, d).unwrap();
            assert!(l < prev);
            prev = l;
            let slope = (path_loss(&m, 2.0 * d).unwrap().ln() - l.ln()) / 2f64.ln();
            assert!((slope + 3.1).abs() < 1e-10);
        }
    }

    #[test]
    fn rician_deterministic_and_los_limit() {
        let cfg = UlaConfig::half_wavelength(8, 4).unwrap();
        let h1 = rician_cu_channel(&cfg, 1.0, 0.5, 2.0, 11);
        let h2 = rician_cu_channel(&cfg, 1.0, 0.5, 2.0, 11);
        assert_eq!(h1, h2);
        assert_ne!(h1, rician_cu_channel(&cfg, 1.0, 0.5, 2.0, 12));
        let los = rician_cu_channel(&cfg, PURE_LOS_K, 0.5, 2.0, 11);
        let a = steering_tx(&cfg, 0.5) * Complex64::from(2f64.sqrt());
        assert!((los - a).norm() < 1e-14);
    }

    #[test]
    fn rayleigh_mean_power() {
        let cfg = UlaConfig::half_wavelength(8, 4).unwrap();
        let gain = 3.0;
        let n = 10_000;
        let mean: f64 = (0..n)
            .map(|s| rician_cu_channel(&cfg, 0.0, 0.2, gain, s).norm_squared())
            .sum::<f64>()
            / n as f64;
        assert!(rel(mean, gain * 8.0) < 0.02, "mean {mean}");
    }
}
