//! Channel gain of the direct ray alone (free space) and of the direct plus
//! ground-reflected ray (two-ray), and RSRP synthesis from either.
//!
//! `free_space_gain` and `two_ray_gain` return received/transmitted power
//! ratios. The dB path loss is their negated decibel value, so that
//! `rsrp = tx_power - path_loss + shadowing` holds in dB.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::antenna::{link_gains, AntennaPattern, LinkGains};
use crate::error::{Error, Result};
use crate::geo::LinkGeometry;

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CarrierConfig {
    pub freq_hz: f64,
    pub lambda_m: f64,
    pub tx_power_dbm: f64,
}

impl CarrierConfig {
    pub fn new(freq_hz: f64, tx_power_dbm: f64) -> Result<Self> {
        if !(freq_hz > 0.0 && freq_hz.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "carrier frequency must be positive, got {freq_hz}"
            )));
        }
        if !tx_power_dbm.is_finite() {
            return Err(Error::InvalidParameter("transmit power must be finite".into()));
        }
        Ok(CarrierConfig {
            freq_hz,
            lambda_m: SPEED_OF_LIGHT / freq_hz,
            tx_power_dbm,
        })
    }

    /// `(lambda / 4 pi)^2`
    pub fn friis_factor(&self) -> f64 {
        (self.lambda_m / (4.0 * PI)).powi(2)
    }
}

impl Default for CarrierConfig {
    fn default() -> Self {
        CarrierConfig::new(3.51e9, 10.0).expect("default carrier is valid")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundParams {
    /// Relative permittivity of the ground.
    pub epsilon0: f64,
}

impl GroundParams {
    pub fn new(epsilon0: f64) -> Result<Self> {
        if !(epsilon0 > 1.0 && epsilon0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "ground permittivity must exceed 1, got {epsilon0}"
            )));
        }
        Ok(GroundParams { epsilon0 })
    }
}

impl Default for GroundParams {
    fn default() -> Self {
        GroundParams { epsilon0: 15.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PropagationModel {
    FreeSpace,
    #[default]
    TwoRay,
}

impl FromStr for PropagationModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fs" | "freespace" | "free-space" => Ok(PropagationModel::FreeSpace),
            "tworay" | "two-ray" | "2ray" => Ok(PropagationModel::TwoRay),
            other => Err(Error::InvalidParameter(format!("unknown propagation model '{other}'"))),
        }
    }
}

impl fmt::Display for PropagationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PropagationModel::FreeSpace => "fs",
            PropagationModel::TwoRay => "tworay",
        })
    }
}

/// Vertical-polarization ground reflection coefficient at grazing angle
/// `theta_r_deg`.
pub fn reflection_coefficient(theta_r_deg: f64, gp: &GroundParams) -> f64 {
    let (s, c) = theta_r_deg.to_radians().sin_cos();
    let eps = gp.epsilon0;
    let root = (eps - c * c).sqrt();
    (eps * s - root) / (eps * s + root)
}

fn check_link(g: &LinkGeometry) -> Result<()> {
    if g.d3_m > 0.0 && g.d3_m.is_finite() {
        Ok(())
    } else {
        Err(Error::DegenerateLink("zero line-of-sight distance"))
    }
}

/// Free-space gain with precomputed antenna gains.
pub fn free_space_gain_with(g: &LinkGeometry, gains: &LinkGains, c: &CarrierConfig) -> Result<f64> {
    check_link(g)?;
    Ok(c.friis_factor() * gains.tx_los * gains.rx_los / (g.d3_m * g.d3_m))
}

pub fn free_space_gain(g: &LinkGeometry, tx: &AntennaPattern, rx: &AntennaPattern, c: &CarrierConfig) -> Result<f64> {
    free_space_gain_with(g, &link_gains(tx, rx, g), c)
}

/// Two-ray gain with precomputed antenna gains.
pub fn two_ray_gain_with(g: &LinkGeometry, gains: &LinkGains, c: &CarrierConfig, gp: &GroundParams) -> Result<f64> {
    check_link(g)?;
    let direct = (gains.tx_los * gains.rx_los).sqrt() / g.d3_m;
    let gamma = reflection_coefficient(g.theta_r_deg, gp);
    let phase = 2.0 * PI * g.path_diff_m / c.lambda_m;
    let reflected = Complex64::from_polar(gamma * (gains.tx_refl * gains.rx_refl).sqrt() / g.d_refl_m, -phase);
    Ok(c.friis_factor() * (reflected + direct).norm_sqr())
}

pub fn two_ray_gain(
    g: &LinkGeometry,
    tx: &AntennaPattern,
    rx: &AntennaPattern,
    c: &CarrierConfig,
    gp: &GroundParams,
) -> Result<f64> {
    two_ray_gain_with(g, &link_gains(tx, rx, g), c, gp)
}

pub fn model_gain_with(
    model: PropagationModel,
    g: &LinkGeometry,
    gains: &LinkGains,
    c: &CarrierConfig,
    gp: &GroundParams,
) -> Result<f64> {
    match model {
        PropagationModel::FreeSpace => free_space_gain_with(g, gains, c),
        PropagationModel::TwoRay => two_ray_gain_with(g, gains, c, gp),
    }
}

/// Path loss in dB of a linear channel gain.
pub fn path_loss_db(gain: f64) -> Result<f64> {
    if gain > 0.0 && gain.is_finite() {
        Ok(-10.0 * gain.log10())
    } else {
        Err(Error::DegenerateLink("channel gain must be positive"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowingModel {
    pub sigma_db: f64,
    pub seed: u64,
}

impl ShadowingModel {
    pub fn new(sigma_db: f64, seed: u64) -> Result<Self> {
        if !(sigma_db >= 0.0 && sigma_db.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "shadowing sigma must be non-negative, got {sigma_db}"
            )));
        }
        Ok(ShadowingModel { sigma_db, seed })
    }

    pub fn none() -> Self {
        ShadowingModel { sigma_db: 0.0, seed: 0 }
    }

    pub fn stream(&self) -> ShadowingStream {
        ShadowingStream {
            rng: ChaCha8Rng::seed_from_u64(self.seed),
            normal: (self.sigma_db > 0.0).then(|| Normal::new(0.0, self.sigma_db).expect("sigma validated")),
        }
    }
}

/// Seeded log-normal shadowing samples in dB. With zero sigma every sample is
/// exactly 0 and no randomness is drawn.
#[derive(Debug, Clone)]
pub struct ShadowingStream {
    rng: ChaCha8Rng,
    normal: Option<Normal<f64>>,
}

impl ShadowingStream {
    pub fn next_db(&mut self) -> f64 {
        match &self.normal {
            Some(n) => n.sample(&mut self.rng),
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsrpSample {
    pub rsrp_dbm: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn synthesize_rsrp(
    g: &LinkGeometry,
    model: PropagationModel,
    tx: &AntennaPattern,
    rx: &AntennaPattern,
    c: &CarrierConfig,
    gp: &GroundParams,
    shadowing: &mut ShadowingStream,
) -> Result<RsrpSample> {
    let gain = model_gain_with(model, g, &link_gains(tx, rx, g), c, gp)?;
    Ok(RsrpSample {
        rsrp_dbm: c.tx_power_dbm - path_loss_db(gain)? + shadowing.next_db(),
    })
}
