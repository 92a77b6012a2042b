//! Declarative run configuration. Angles are in degrees and powers in dBm here
//! and nowhere else; [`ScenarioConfig::build`] converts to radians and watts.

use std::path::Path;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::UlaConfig;
use crate::channel::{path_loss, rician_cu_channel, target_gain, PathLossModel, Scenario};
use crate::error::{IsacError, Result};
use crate::estimators::PhaseReference;
use crate::linalg::{db_to_linear, dbm_to_watts};

/// Built-in preset name accepted wherever a config path is expected.
pub const REFERENCE_PRESET: &str = "reference";
const REFERENCE_PRESET_TOML: &str = include_str!("../../presets/reference.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarnessConfig {
    pub scenario: ScenarioConfig,
    #[serde(default)]
    pub path_loss: PathLossModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<EstimateConfig>,
}

impl HarnessConfig {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| IsacError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a TOML file, or the built-in preset when `path` is its name.
    pub fn load(path: &Path) -> Result<Self> {
        if path.as_os_str() == REFERENCE_PRESET {
            return Self::reference_preset();
        }
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn reference_preset() -> Result<Self> {
        Self::from_toml_str(REFERENCE_PRESET_TOML)
    }

    pub fn validate(&self) -> Result<()> {
        PathLossModel::new(self.path_loss.k0_db, self.path_loss.d0, self.path_loss.exponent)?;
        self.scenario.build(&self.path_loss)?;
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if let Some(e) = &self.estimate {
            e.scheme.parse::<Scheme>()?;
        }
        Ok(())
    }

    pub fn sweep(&self) -> Result<&SweepConfig> {
        self.sweep.as_ref().ok_or_else(|| IsacError::InvalidConfig("missing [sweep] section".into()))
    }
}

fn d_m32() -> usize {
    32
}
fn d_half() -> f64 {
    0.5
}
fn d_one() -> f64 {
    1.0
}
fn d_cu_angle() -> f64 {
    30.0
}
fn d_power() -> f64 {
    30.0
}
fn d_noise() -> f64 {
    -80.0
}
fn d_symbols() -> usize {
    1024
}
fn d_beta() -> [f64; 2] {
    [1.0, 0.0]
}
fn d_200() -> f64 {
    200.0
}
fn d_1000() -> f64 {
    1000.0
}

/// Physical scene. Every field has the simulation-section default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "d_m32")]
    pub m_tx: usize,
    #[serde(default = "d_m32")]
    pub m_rx: usize,
    /// Element spacing and wavelength in meters; only their ratio matters.
    #[serde(default = "d_half")]
    pub spacing: f64,
    #[serde(default = "d_one")]
    pub wavelength: f64,
    #[serde(default)]
    pub theta_deg: f64,
    #[serde(default)]
    pub phi_deg: f64,
    /// Direction of the line-of-sight part of the user channel.
    #[serde(default = "d_cu_angle")]
    pub cu_angle_deg: f64,
    #[serde(default = "d_one")]
    pub rician_k: f64,
    #[serde(default = "d_power")]
    pub power_dbm: f64,
    #[serde(default = "d_noise")]
    pub sigma_c2_dbm: f64,
    #[serde(default = "d_noise")]
    pub sigma_s2_dbm: f64,
    #[serde(default = "d_symbols")]
    pub t_symbols: usize,
    /// Reflection coefficient as `[re, im]`.
    #[serde(default = "d_beta")]
    pub beta: [f64; 2],
    #[serde(default = "d_200")]
    pub d_bt: f64,
    #[serde(default = "d_200")]
    pub d_tr: f64,
    #[serde(default = "d_1000")]
    pub d_bc: f64,
    /// Overrides `|alpha|^2` (dB) while keeping the phase of `beta`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_power_db: Option<f64>,
    #[serde(default)]
    pub sinr_threshold_db: Option<f64>,
    /// Seed of the user-channel draw.
    #[serde(default)]
    pub channel_seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        toml::from_str("").expect("all scenario fields have defaults")
    }
}

impl ScenarioConfig {
    pub fn build(&self, pl: &PathLossModel) -> Result<Scenario> {
        let ula = UlaConfig::new(self.m_tx, self.m_rx, self.spacing, self.wavelength)?;
        for (name, v) in [("theta_deg", self.theta_deg), ("phi_deg", self.phi_deg), ("cu_angle_deg", self.cu_angle_deg)] {
            if !(v.abs() <= 90.0) {
                return Err(IsacError::InvalidConfig(format!("{name} must lie in [-90, 90], got {v}")));
            }
        }
        if !(self.rician_k >= 0.0) {
            return Err(IsacError::InvalidConfig(format!("rician_k must be >= 0, got {}", self.rician_k)));
        }
        let beta = Complex64::new(self.beta[0], self.beta[1]);
        let mut alpha = target_gain(pl, self.d_bt, self.d_tr, beta)?;
        if let Some(db) = self.alpha_power_db {
            let phase = if beta.norm() > 0.0 { beta.arg() } else { 0.0 };
            alpha = Complex64::from_polar(db_to_linear(db).sqrt(), phase);
        }
        let gain = path_loss(pl, self.d_bc)?;
        let h = rician_cu_channel(&ula, self.rician_k, self.cu_angle_deg.to_radians(), gain, self.channel_seed);
        let sc = Scenario {
            ula,
            theta: self.theta_deg.to_radians(),
            phi: self.phi_deg.to_radians(),
            alpha,
            h,
            p_max: dbm_to_watts(self.power_dbm),
            sigma_c2: dbm_to_watts(self.sigma_c2_dbm),
            sigma_s2: dbm_to_watts(self.sigma_s2_dbm),
            t_symbols: self.t_symbols,
            gamma0: self.sinr_threshold_db.map_or(0.0, db_to_linear),
        };
        sc.validate()?;
        Ok(sc)
    }
}

/// Swept quantity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    PowerDbm,
    /// Radar SNR of full-power target MRT, set through the sensing noise power.
    SensingSnrDb,
    /// Target-to-receiver distance.
    TargetDistanceM,
    RateBps,
    SinrThresholdDb,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::PowerDbm => "power_dbm",
            Axis::SensingSnrDb => "sensing_snr_db",
            Axis::TargetDistanceM => "target_distance_m",
            Axis::RateBps => "rate_bps",
            Axis::SinrThresholdDb => "sinr_threshold_db",
        }
    }

    pub fn is_tradeoff(self) -> bool {
        matches!(self, Axis::RateBps | Axis::SinrThresholdDb)
    }

    /// Scenario at one axis value. `base` must come from `cfg` and `pl`.
    pub fn apply(self, base: &Scenario, cfg: &ScenarioConfig, pl: &PathLossModel, v: f64) -> Result<Scenario> {
        let bad = |msg: String| IsacError::InvalidConfig(msg);
        Ok(match self {
            Axis::PowerDbm => base.with_power(dbm_to_watts(v)),
            Axis::SensingSnrDb => {
                let m = (base.ula.m_tx() * base.ula.m_rx()) as f64;
                let sigma_s2 = base.alpha_sqr() * base.p_max * m / db_to_linear(v);
                if !(sigma_s2 > 0.0) {
                    return Err(bad("sensing_snr_db axis needs a nonzero target gain".into()));
                }
                Scenario { sigma_s2, ..base.clone() }
            }
            Axis::TargetDistanceM => {
                let ratio = path_loss(pl, v)? / path_loss(pl, cfg.d_tr)?;
                base.with_alpha_sqr(base.alpha_sqr() * ratio)
            }
            Axis::RateBps => {
                if !(v >= 0.0) {
                    return Err(bad(format!("rate must be >= 0, got {v}")));
                }
                base.with_gamma0(2f64.powf(v) - 1.0)
            }
            Axis::SinrThresholdDb => base.with_gamma0(db_to_linear(v)),
        })
    }
}

fn d_trials() -> usize {
    100
}
fn d_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis: Axis,
    pub values: Vec<f64>,
    #[serde(default = "d_trials")]
    pub trials: usize,
    pub schemes: Vec<String>,
    #[serde(default = "d_seed")]
    pub seed: u64,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(IsacError::InvalidConfig(msg));
        if self.values.is_empty() {
            return bad("sweep.values is empty".into());
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return bad("sweep.values must be finite".into());
        }
        let up = self.values.windows(2).all(|w| w[1] > w[0]);
        let down = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(up || down) {
            return bad("sweep.values must be strictly monotone".into());
        }
        if self.trials == 0 {
            return bad("sweep.trials must be >= 1".into());
        }
        if self.schemes.is_empty() {
            return bad("sweep.schemes is empty".into());
        }
        self.parsed_schemes().map(|_| ())
    }

    pub fn parsed_schemes(&self) -> Result<Vec<Scheme>> {
        self.schemes.iter().map(|s| s.parse()).collect()
    }
}

fn d_scheme() -> String {
    "gaussian".into()
}

/// Single end-to-end estimation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimateConfig {
    #[serde(default = "d_scheme")]
    pub scheme: String,
    #[serde(default)]
    pub trial: u64,
    #[serde(default)]
    pub keep_curve: bool,
    #[serde(default)]
    pub phase_reference: PhaseReference,
}

impl Default for EstimateConfig {
    fn default() -> Self {
        Self { scheme: d_scheme(), trial: 0, keep_curve: false, phase_reference: PhaseReference::default() }
    }
}

/// Transmit design evaluated at each sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scheme {
    /// Gaussian-only optimum under the SINR target (MRT when the target is zero).
    Gaussian,
    /// Deterministic-only target MRT.
    Deterministic,
    /// Target MRT split between the two parts; the value is the deterministic share.
    /// Without a share, the SCA design under the SINR target.
    Superposed(Option<f64>),
    /// Deterministic bound of the Gaussian-only optimum, as if every symbol were known.
    Known,
    TimeSwitching,
    PowerSplitting,
}

impl FromStr for Scheme {
    type Err = IsacError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Ok(match s {
            "gaussian" => Scheme::Gaussian,
            "deterministic" => Scheme::Deterministic,
            "superposed" => Scheme::Superposed(None),
            "known" => Scheme::Known,
            "time-switching" => Scheme::TimeSwitching,
            "power-splitting" => Scheme::PowerSplitting,
            _ => match s.strip_prefix("superposed:") {
                Some(f) => {
                    let f: f64 = f
                        .parse()
                        .map_err(|_| IsacError::InvalidConfig(format!("bad deterministic share in {s:?}")))?;
                    if !(0.0..=1.0).contains(&f) {
                        return Err(IsacError::InvalidConfig(format!("deterministic share must be in [0, 1], got {f}")));
                    }
                    Scheme::Superposed(Some(f))
                }
                None => return Err(IsacError::InvalidConfig(format!("unknown scheme {s:?}"))),
            },
        })
    }
}

impl Scheme {
    /// Whether a Monte Carlo estimator exists for this scheme.
    pub fn has_estimator(self) -> bool {
        matches!(self, Scheme::Gaussian | Scheme::Deterministic | Scheme::Superposed(Some(_)))
    }
}
