//! RSRP-based localization of a ground transmitter from UAV measurements.
//!
//! The received power of each sample is inverted into a 3D distance through
//! the free-space model, the squared distances are differenced against a
//! reference sample to obtain a linear system in the transmitter's longitude
//! and latitude, and the antenna gains that enter the inversion are refined
//! by fixed-point iteration on the position estimate. [`online`] wraps that
//! into a buffered, residual-weighted real-time estimator.

mod fixed_point;
mod ls;
pub mod online;

use std::fmt;
use std::str::FromStr;

pub use fixed_point::{fixed_point_localize, LocalizationModel};
pub use ls::{build_ls_system, solve_ls, LsSystem};
pub use online::{
    online_localize, residual, select_samples, weight, OnlineLocalizer, OnlineState, OnlineStep, StepEstimate,
};

use crate::error::{Error, Result};
use crate::geo::{GeoPoint, ProjectionConfig};
use crate::propagation::CarrierConfig;

/// One RSRP sample tagged with the UAV position it was taken at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub t_s: f64,
    pub uav: GeoPoint,
    pub rsrp_dbm: f64,
}

/// Estimated transmitter longitude/latitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocEstimate {
    pub lon_deg: f64,
    pub lat_deg: f64,
}

impl LocEstimate {
    pub fn at_alt(&self, alt_m: f64) -> GeoPoint {
        GeoPoint {
            lon_deg: self.lon_deg,
            lat_deg: self.lat_deg,
            alt_m,
        }
    }

    /// Horizontal distance to `truth` under `proj`.
    pub fn distance_error_m(&self, truth: &GeoPoint, proj: &ProjectionConfig) -> f64 {
        crate::geo::horizontal_distance(&self.at_alt(truth.alt_m), truth, proj)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SelectionStrategy {
    #[default]
    Random,
    EqualInterval,
    NearbyWaypoints,
}

impl SelectionStrategy {
    pub const ALL: [SelectionStrategy; 3] = [
        SelectionStrategy::Random,
        SelectionStrategy::EqualInterval,
        SelectionStrategy::NearbyWaypoints,
    ];
}

impl FromStr for SelectionStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "random" => Ok(SelectionStrategy::Random),
            "equal" | "equal-interval" => Ok(SelectionStrategy::EqualInterval),
            "waypoint" | "waypoints" | "nearby-waypoints" => Ok(SelectionStrategy::NearbyWaypoints),
            other => Err(Error::InvalidParameter(format!("unknown selection strategy '{other}'"))),
        }
    }
}

impl fmt::Display for SelectionStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelectionStrategy::Random => "random",
            SelectionStrategy::EqualInterval => "equal",
            SelectionStrategy::NearbyWaypoints => "waypoint",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizerConfig {
    /// Fixed-point iterations per solve.
    pub k_iters: usize,
    /// Offline sample count.
    pub n_samples: usize,
    /// Samples drawn from the buffer at each online step.
    pub m_samples: usize,
    /// Online buffer capacity.
    pub n_max: usize,
    pub selection: SelectionStrategy,
    /// Moving-average length applied to RSRP before localization.
    pub ma_window: usize,
    pub seed: u64,
}

impl Default for LocalizerConfig {
    fn default() -> Self {
        LocalizerConfig {
            k_iters: 50,
            n_samples: 300,
            m_samples: 10,
            n_max: 10_000,
            selection: SelectionStrategy::Random,
            ma_window: 5,
            seed: 0,
        }
    }
}

impl LocalizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_iters < 1 {
            return Err(Error::InvalidParameter("k_iters must be at least 1".into()));
        }
        if self.m_samples < 2 {
            return Err(Error::InvalidParameter("m_samples must be at least 2".into()));
        }
        if self.ma_window < 1 {
            return Err(Error::InvalidParameter("ma_window must be at least 1".into()));
        }
        if self.n_max < self.m_samples {
            return Err(Error::InvalidParameter("n_max must be at least m_samples".into()));
        }
        Ok(())
    }
}

/// Centered moving mean of RSRP; the window shrinks at the trace edges.
pub fn moving_average(trace: &[Measurement], window: usize) -> Result<Vec<Measurement>> {
    if trace.is_empty() {
        return Err(Error::EmptyInput);
    }
    if window == 0 {
        return Err(Error::InvalidParameter(
            "moving-average window must be at least 1".into(),
        ));
    }
    let before = (window - 1) / 2;
    let after = window - 1 - before;
    let mut prefix = Vec::with_capacity(trace.len() + 1);
    prefix.push(0.0);
    for m in trace {
        prefix.push(prefix.last().unwrap() + m.rsrp_dbm);
    }
    Ok(trace
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let lo = i.saturating_sub(before);
            let hi = (i + after + 1).min(trace.len());
            let mean = if window == 1 {
                m.rsrp_dbm
            } else {
                (prefix[hi] - prefix[lo]) / (hi - lo) as f64
            };
            Measurement { rsrp_dbm: mean, ..*m }
        })
        .collect())
}

/// Projection with its standard parallel at the mean latitude of `samples`,
/// for when the transmitter position is unknown.
pub fn projection_for(samples: &[Measurement]) -> Result<ProjectionConfig> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let lat = samples.iter().map(|m| m.uav.lat_deg).sum::<f64>() / samples.len() as f64;
    ProjectionConfig::new(lat, crate::geo::EARTH_RADIUS_M)
}

/// Squared 3D distance implied by a received power under free space.
pub fn rsrp_to_distance_sq(rsrp_dbm: f64, g_tx: f64, g_rx: f64, c: &CarrierConfig) -> Result<f64> {
    if !rsrp_dbm.is_finite() {
        return Err(Error::NonPositivePower(rsrp_dbm));
    }
    // P_tx / r in linear units
    let power_ratio = 10f64.powf((c.tx_power_dbm - rsrp_dbm) / 10.0);
    Ok(c.friis_factor() * g_tx * g_rx * power_ratio)
}
