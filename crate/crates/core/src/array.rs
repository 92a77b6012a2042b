//! Uniform linear array geometry and steering vectors.
//!
//! Both arrays use the midpoint as phase reference, so element `m` of an
//! `M`-element array carries the exponent `j*pi*(2m - (M-1)) * d * sin(angle) / lambda`,
//! ordered from `-(M-1)` to `+(M-1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{IsacError, Result};
use crate::linalg::CVec;

/// Transmit and receive ULA geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UlaConfig {
    m_tx: usize,
    m_rx: usize,
    spacing: f64,
    wavelength: f64,
}

impl UlaConfig {
    /// Element counts must be even and at least 2; lengths are in meters.
    pub fn new(m_tx: usize, m_rx: usize, spacing: f64, wavelength: f64) -> Result<Self> {
        for (name, m) in [("m_tx", m_tx), ("m_rx", m_rx)] {
            if m < 2 || m % 2 != 0 {
                return Err(IsacError::InvalidConfig(format!(
                    "{name} must be an even integer >= 2, got {m}"
                )));
            }
        }
        if !(spacing > 0.0 && spacing.is_finite()) || !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(IsacError::InvalidConfig(format!(
                "spacing ({spacing}) and wavelength ({wavelength}) must be positive"
            )));
        }
        Ok(Self { m_tx, m_rx, spacing, wavelength })
    }

    /// Half-wavelength spacing with unit wavelength.
    pub fn half_wavelength(m_tx: usize, m_rx: usize) -> Result<Self> {
        Self::new(m_tx, m_rx, 0.5, 1.0)
    }

    pub fn m_tx(&self) -> usize {
        self.m_tx
    }

    pub fn m_rx(&self) -> usize {
        self.m_rx
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    fn phase_scale(&self, angle: f64) -> f64 {
        PI * self.spacing * angle.sin() / self.wavelength
    }
}

/// Offsets `2m - (M-1)` for `m = 0..M`.
pub(crate) fn element_offsets(m: usize) -> impl Iterator<Item = f64> {
    let half = (m as f64) - 1.0;
    (0..m).map(move |i| 2.0 * i as f64 - half)
}

fn steering(m: usize, scale: f64) -> CVec {
    CVec::from_iterator(m, element_offsets(m).map(|k| Complex64::from_polar(1.0, k * scale)))
}

/// Transmit steering vector `a(phi)`.
pub fn steering_tx(cfg: &UlaConfig, phi: f64) -> CVec {
    debug_assert!(phi.abs() <= PI / 2.0 + 1e-12);
    steering(cfg.m_tx, cfg.phase_scale(phi))
}

/// Receive steering vector `b(theta)`.
pub fn steering_rx(cfg: &UlaConfig, theta: f64) -> CVec {
    debug_assert!(theta.abs() <= PI / 2.0 + 1e-12);
    steering(cfg.m_rx, cfg.phase_scale(theta))
}

/// Angle derivative of the receive steering vector, `(j*pi*d*cos(theta)/lambda) * D * b(theta)`.
pub fn steering_rx_deriv(cfg: &UlaConfig, theta: f64) -> CVec {
    let b = steering_rx(cfg, theta);
    let c = PI * cfg.spacing * theta.cos() / cfg.wavelength;
    CVec::from_iterator(
        cfg.m_rx,
        element_offsets(cfg.m_rx)
            .zip(b.iter())
            .map(|(k, z)| Complex64::new(0.0, c * k) * z),
    )
}

/// Closed form of `||b'(theta)||^2 = (pi d cos(theta) / lambda)^2 * M (M^2 - 1) / 3`.
pub fn steering_rx_deriv_norm_sqr(cfg: &UlaConfig, theta: f64) -> f64 {
    let c = PI * cfg.spacing * theta.cos() / cfg.wavelength;
    let m = cfg.m_rx as f64;
    c * c * m * (m * m - 1.0) / 3.0
}
