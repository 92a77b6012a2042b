//! Fisher information and Cramér-Rao bounds for the target DoA.
//!
//! Three signaling modes are covered:
//!
//! * Gaussian-only: the receiver knows the information covariance `R_c` but not
//!   the symbols, so the target return enters only through the echo covariance
//!   `I_T ⊗ (|alpha|^2 q_c b b^H + sigma_s^2 I)` with `q_c = a^T R_c a*`.
//!   Parameters are `(theta, |alpha|)`.
//! * Deterministic-only: the classical bound for a known waveform with sample
//!   covariance `R_s`.
//! * Superposed: a known deterministic part adds a mean term to the Gaussian
//!   model. Parameters are `(theta, Re alpha, Im alpha)`.
//!
//! All closed forms exploit `b^H b' = 0` and the rank-one structure of the echo
//! covariance, so nothing larger than `m_rx` is ever formed here.

use std::f64::consts::PI;

use nalgebra::{Matrix2, Vector2};
use serde::Serialize;

use crate::channel::Scenario;
use crate::error::{IsacError, Result};
use crate::linalg::{CVec, HermitianCov};

/// Per-scene quantities shared by every bound.
#[derive(Debug, Clone)]
pub struct SensingGeometry {
    pub a_conj: CVec,
    pub b_norm2: f64,
    pub b_dot_norm2: f64,
    pub alpha_sqr: f64,
    pub sigma_s2: f64,
    pub t_symbols: f64,
}

impl SensingGeometry {
    pub fn new(sc: &Scenario) -> Self {
        Self {
            a_conj: sc.a_conj(),
            b_norm2: sc.b().norm_squared(),
            b_dot_norm2: sc.b_dot().norm_squared(),
            alpha_sqr: sc.alpha_sqr(),
            sigma_s2: sc.sigma_s2,
            t_symbols: sc.t_symbols as f64,
        }
    }

    /// `a^T R a*`, nonnegative for PSD `R`.
    pub fn q(&self, r: &HermitianCov) -> f64 {
        r.quad(&self.a_conj).max(0.0)
    }

    /// `|alpha|^2 ||b||^2 / sigma_s^2`; the radar SNR is `kappa * q_c`.
    pub fn kappa(&self) -> f64 {
        self.alpha_sqr * self.b_norm2 / self.sigma_s2
    }

    pub fn radar_snr(&self, q_c: f64) -> f64 {
        self.kappa() * q_c
    }

    /// Sensing objective `q_s ||b'||^2 + gamma/(1+gamma) q_c ||b'||^2` written in
    /// terms of the two quadratic forms.
    pub fn objective_from_q(&self, q_c: f64, q_s: f64) -> f64 {
        let g = self.radar_snr(q_c);
        (q_s + g / (1.0 + g) * q_c) * self.b_dot_norm2
    }

    fn crb_from_objective(&self, f: f64) -> Result<f64> {
        if !(f > 0.0) || self.alpha_sqr == 0.0 {
            return Err(IsacError::Unobservable);
        }
        Ok(self.sigma_s2 / (2.0 * self.t_symbols * self.alpha_sqr * f))
    }
}

/// Fisher information for `(theta, |alpha|)` under Gaussian-only signaling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FimGaussian {
    pub f_tt: f64,
    pub f_ta: f64,
    pub f_aa: f64,
    pub gamma_ran: f64,
}

impl FimGaussian {
    pub fn as_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.f_tt, self.f_ta, self.f_ta, self.f_aa)
    }
}

/// Fisher information for `(theta, Re alpha, Im alpha)` under superposed signaling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FimSuper {
    pub f_tt: f64,
    pub f_ta: Vector2<f64>,
    pub f_aa: Matrix2<f64>,
    pub gamma_ran: f64,
}

impl FimSuper {
    pub fn as_matrix(&self) -> nalgebra::Matrix3<f64> {
        let mut m = nalgebra::Matrix3::zeros();
        m[(0, 0)] = self.f_tt;
        for i in 0..2 {
            m[(0, i + 1)] = self.f_ta[i];
            m[(i + 1, 0)] = self.f_ta[i];
            for j in 0..2 {
                m[(i + 1, j + 1)] = self.f_aa[(i, j)];
            }
        }
        m
    }
}

/// Bounds for the three modes evaluated on one transmit split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrbReport {
    /// Gaussian-only bound with covariance `R_c + R_s`.
    pub crb_gaussian: f64,
    /// Deterministic-only bound with covariance `R_c + R_s`.
    pub crb_deterministic: f64,
    /// Superposed bound for the split `(R_c, R_s)`.
    pub crb_super: f64,
    /// Radar SNR of the Gaussian part `R_c`.
    pub gamma_ran: f64,
}

fn check_dim(sc: &Scenario, r: &HermitianCov) -> Result<()> {
    if r.dim() != sc.ula.m_tx() {
        return Err(IsacError::Dimension { expected: sc.ula.m_tx(), got: r.dim() });
    }
    Ok(())
}

pub fn fim_gaussian(sc: &Scenario, r_c: &HermitianCov) -> Result<FimGaussian> {
    check_dim(sc, r_c)?;
    let g = SensingGeometry::new(sc);
    let q = g.q(r_c);
    let gamma = g.radar_snr(q);
    let s4 = g.sigma_s2 * g.sigma_s2;
    let t = g.t_symbols;
    let f_tt = 2.0 * t * g.alpha_sqr.powi(2) * q * q * g.b_dot_norm2 * g.b_norm2 / (s4 * (1.0 + gamma));
    let f_aa = 4.0 * t * g.alpha_sqr * q * q * g.b_norm2.powi(2) / (s4 * (1.0 + gamma).powi(2));
    Ok(FimGaussian { f_tt, f_ta: 0.0, f_aa, gamma_ran: gamma })
}

/// DoA bound with Gaussian-only signaling. Fails with [`IsacError::Unobservable`]
/// when `a^T R_c a* = 0`.
pub fn crb_gaussian(sc: &Scenario, r_c: &HermitianCov) -> Result<f64> {
    check_dim(sc, r_c)?;
    let g = SensingGeometry::new(sc);
    g.crb_from_objective(g.objective_from_q(g.q(r_c), 0.0))
}

pub fn crb_deterministic(sc: &Scenario, r_s: &HermitianCov) -> Result<f64> {
    check_dim(sc, r_s)?;
    let g = SensingGeometry::new(sc);
    g.crb_from_objective(g.q(r_s) * g.b_dot_norm2)
}

pub fn fim_super(sc: &Scenario, r_c: &HermitianCov, r_s: &HermitianCov) -> Result<FimSuper> {
    check_dim(sc, r_c)?;
    check_dim(sc, r_s)?;
    let g = SensingGeometry::new(sc);
    let (q_c, q_s) = (g.q(r_c), g.q(r_s));
    let gamma = g.radar_snr(q_c);
    let s2 = g.sigma_s2;
    let t = g.t_symbols;
    let f_tt = 2.0 * t * g.alpha_sqr.powi(2) * q_c * q_c * g.b_dot_norm2 * g.b_norm2 / (s2 * s2 * (1.0 + gamma))
        + 2.0 * t * g.alpha_sqr * q_s * g.b_dot_norm2 / s2;
    let alpha = Vector2::new(sc.alpha.re, sc.alpha.im);
    let outer = 4.0 * t * q_c * q_c * g.b_norm2.powi(2) / (s2 * s2 * (1.0 + gamma).powi(2));
    let diag = 2.0 * t * q_s * g.b_norm2 / (s2 * (1.0 + gamma));
    let f_aa = alpha * alpha.transpose() * outer + Matrix2::identity() * diag;
    Ok(FimSuper { f_tt, f_ta: Vector2::zeros(), f_aa, gamma_ran: gamma })
}

/// Sensing objective `f(R_c, R_s)`; the superposed bound is `sigma_s^2 / (2 T |alpha|^2 f)`.
pub fn sensing_objective(sc: &Scenario, r_c: &HermitianCov, r_s: &HermitianCov) -> f64 {
    let g = SensingGeometry::new(sc);
    g.objective_from_q(g.q(r_c), g.q(r_s))
}

pub fn crb_super(sc: &Scenario, r_c: &HermitianCov, r_s: &HermitianCov) -> Result<f64> {
    check_dim(sc, r_c)?;
    check_dim(sc, r_s)?;
    let g = SensingGeometry::new(sc);
    g.crb_from_objective(g.objective_from_q(g.q(r_c), g.q(r_s)))
}

pub fn crb_report(sc: &Scenario, r_c: &HermitianCov, r_s: &HermitianCov) -> Result<CrbReport> {
    let total = r_c.add(r_s);
    let g = SensingGeometry::new(sc);
    Ok(CrbReport {
        crb_gaussian: crb_gaussian(sc, &total)?,
        crb_deterministic: crb_deterministic(sc, &total)?,
        crb_super: crb_super(sc, r_c, r_s)?,
        gamma_ran: g.radar_snr(g.q(r_c)),
    })
}

/// Minimum bounds over all covariances with trace `P` (no SINR constraint).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinCrbs {
    pub gaussian: f64,
    pub deterministic: f64,
    pub superposed: f64,
}

/// `3 sigma_s^2 lambda^2 / (2 T pi^2 d^2 cos^2(theta) |alpha|^2 (M_r-1) M_r (M_r+1))`,
/// the common factor of every closed-form minimum (before dividing by transmit gain).
fn geometry_factor(sc: &Scenario) -> f64 {
    let ula = &sc.ula;
    let mr = ula.m_rx() as f64;
    let c = PI * ula.spacing() * sc.theta.cos() / ula.wavelength();
    3.0 * sc.sigma_s2 / (2.0 * sc.t_symbols as f64 * c * c * sc.alpha_sqr() * (mr - 1.0) * mr * (mr + 1.0))
}

/// Closed-form minima: Gaussian-only with MRT, deterministic with MRT, and the
/// superposed optimum (which puts all power into the deterministic part).
/// The superposed minimum uses `cos^2(theta)`, matching `||b'||^2`.
pub fn crb_min_closed_forms(sc: &Scenario) -> MinCrbs {
    let mt = sc.ula.m_tx() as f64;
    let mr = sc.ula.m_rx() as f64;
    let det = geometry_factor(sc) / (sc.p_max * mt);
    let gauss = det * (1.0 + sc.sigma_s2 / (sc.p_max * sc.alpha_sqr() * mt * mr));
    MinCrbs { gaussian: gauss, deterministic: det, superposed: det }
}

/// Largest `a^T R a*` over PSD `R` with trace `P` meeting `h^H R h / sigma_c^2 >= gamma0`.
///
/// Equals `P M_t` when MRT already meets the SINR target, otherwise
/// `(sqrt(l1) |u1^H a*| + sqrt(l2 (M_t - |u1^H a*|^2)))^2` with `l1 = gamma0 sigma_c^2 / ||h||^2`,
/// `l2 = P - l1`, `u1 = h / ||h||`.
pub fn sinr_constrained_gain(sc: &Scenario) -> Result<f64> {
    let bound = sc.sinr_bound();
    if sc.gamma0 > bound * (1.0 + 1e-12) {
        return Err(IsacError::Infeasible { gamma0: sc.gamma0, bound });
    }
    let mt = sc.ula.m_tx() as f64;
    let h2 = sc.h.norm_squared();
    let ha2 = sc.h.dotc(&sc.a_conj()).norm_sqr();
    if sc.p_max * ha2 >= mt * sc.gamma0 * sc.sigma_c2 {
        return Ok(sc.p_max * mt);
    }
    let l1 = sc.gamma0 * sc.sigma_c2 / h2;
    let l2 = (sc.p_max - l1).max(0.0);
    let proj = ha2 / h2;
    Ok(((l1 * proj).sqrt() + (l2 * (mt - proj).max(0.0)).sqrt()).powi(2))
}

/// Minimum Gaussian-only bound under the SINR constraint, in closed form.
pub fn crb_sinr_gaussian_closed(sc: &Scenario) -> Result<f64> {
    let e = sinr_constrained_gain(sc)?;
    let mr = sc.ula.m_rx() as f64;
    Ok(geometry_factor(sc) / e * (1.0 + sc.sigma_s2 / (sc.alpha_sqr() * mr * e)))
}
