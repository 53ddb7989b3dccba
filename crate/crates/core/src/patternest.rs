//! Combined Tx+Rx pattern estimation from RSRP: every sample's excess over
//! unit-gain free-space loss is attributed to the antennas and averaged per
//! (azimuth, elevation) bin.

use crate::antenna::LinkGains;
use crate::antenna::{gain, AnglePair, AntennaPattern};
use crate::error::{Error, Result};
use crate::geo::{link_geometry, GeoPoint, ProjectionConfig};
use crate::locate::Measurement;
use crate::propagation::{free_space_gain_with, path_loss_db, CarrierConfig};

/// Uniform (az, el) grid of averaged gains. Storage is row-major by azimuth.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatedPattern {
    pub bin_deg: f64,
    pub az_bins_deg: Vec<f64>,
    pub el_bins_deg: Vec<f64>,
    /// Mean extracted gain in dB; `None` for bins with no samples.
    pub gain_db: Vec<Option<f64>>,
    pub counts: Vec<usize>,
}

impl EstimatedPattern {
    fn empty(bin_deg: f64) -> Result<Self> {
        if !(bin_deg > 0.0 && bin_deg <= 180.0) {
            return Err(Error::InvalidParameter(format!(
                "bin width must be in (0, 180], got {bin_deg}"
            )));
        }
        let n_az = (360.0 / bin_deg - 1e-9).ceil() as usize;
        let n_el = (180.0 / bin_deg - 1e-9).ceil() as usize;
        Ok(EstimatedPattern {
            bin_deg,
            az_bins_deg: (0..n_az).map(|i| (i as f64 + 0.5) * bin_deg).collect(),
            el_bins_deg: (0..n_el).map(|j| -90.0 + (j as f64 + 0.5) * bin_deg).collect(),
            gain_db: vec![None; n_az * n_el],
            counts: vec![0; n_az * n_el],
        })
    }

    pub fn n_az(&self) -> usize {
        self.az_bins_deg.len()
    }

    pub fn n_el(&self) -> usize {
        self.el_bins_deg.len()
    }

    /// Flat index of the bin containing `a`.
    pub fn bin_of(&self, a: AnglePair) -> usize {
        let az = a.az_deg.rem_euclid(360.0);
        let i = ((az / self.bin_deg) as usize).min(self.n_az() - 1);
        let j = (((a.el_deg + 90.0) / self.bin_deg).max(0.0) as usize).min(self.n_el() - 1);
        i * self.n_el() + j
    }

    /// Bin-center angles of flat index `k`.
    pub fn center(&self, k: usize) -> AnglePair {
        AnglePair::new(self.az_bins_deg[k / self.n_el()], self.el_bins_deg[k % self.n_el()])
    }

    /// Visited bins as `(center, gain_db, count)`.
    pub fn visited(&self) -> impl Iterator<Item = (AnglePair, f64, usize)> + '_ {
        self.gain_db
            .iter()
            .enumerate()
            .filter_map(|(k, g)| g.map(|g| (self.center(k), g, self.counts[k])))
    }

    pub fn total_count(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Antenna contribution implied by one sample: `RSRP - P_tx + PL_FS` with
/// unit-gain free-space loss.
pub fn extracted_gain_db(
    m: &Measurement,
    bs: &GeoPoint,
    c: &CarrierConfig,
    proj: &ProjectionConfig,
) -> Result<(AnglePair, f64)> {
    let g = link_geometry(bs, &m.uav, proj)?;
    let pl = path_loss_db(free_space_gain_with(&g, &LinkGains::UNIT, c)?)?;
    Ok((AnglePair::new(g.az_deg, g.el_deg), m.rsrp_dbm - c.tx_power_dbm + pl))
}

pub fn estimate_pattern(
    meas: &[Measurement],
    bs: &GeoPoint,
    c: &CarrierConfig,
    proj: &ProjectionConfig,
    bin_deg: f64,
) -> Result<EstimatedPattern> {
    if meas.is_empty() {
        return Err(Error::EmptyInput);
    }
    let mut est = EstimatedPattern::empty(bin_deg)?;
    let mut sums = vec![0.0; est.counts.len()];
    for m in meas {
        let (angles, g_db) = extracted_gain_db(m, bs, c, proj)?;
        let k = est.bin_of(angles);
        sums[k] += g_db;
        est.counts[k] += 1;
    }
    for (k, sum) in sums.into_iter().enumerate() {
        if est.counts[k] > 0 {
            est.gain_db[k] = Some(sum / est.counts[k] as f64);
        }
    }
    Ok(est)
}

/// Per-bin `|reference - estimate|` in dB; `None` where the estimate is absent.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternError {
    pub az_bins_deg: Vec<f64>,
    pub el_bins_deg: Vec<f64>,
    pub error_db: Vec<Option<f64>>,
}

impl PatternError {
    /// Mean absolute error over present bins whose elevation center satisfies `keep`.
    pub fn mean_where(&self, keep: impl Fn(f64) -> bool) -> Option<f64> {
        let n_el = self.el_bins_deg.len();
        let (sum, n) = self
            .error_db
            .iter()
            .enumerate()
            .filter(|(k, _)| keep(self.el_bins_deg[k % n_el]))
            .filter_map(|(_, e)| *e)
            .fold((0.0, 0usize), |(s, n), e| (s + e, n + 1));
        (n > 0).then(|| sum / n as f64)
    }

    pub fn mean(&self) -> Option<f64> {
        self.mean_where(|_| true)
    }

    pub fn max(&self) -> Option<f64> {
        self.error_db.iter().flatten().copied().reduce(f64::max)
    }
}

/// Compares against a combined reference given in dB as a function of angle.
pub fn pattern_error_with(reference_db: impl Fn(AnglePair) -> f64, est: &EstimatedPattern) -> Result<PatternError> {
    if est.total_count() == 0 {
        return Err(Error::EmptyInput);
    }
    let error_db = est
        .gain_db
        .iter()
        .enumerate()
        .map(|(k, g)| g.map(|g| (reference_db(est.center(k)) - g).abs()))
        .collect();
    Ok(PatternError {
        az_bins_deg: est.az_bins_deg.clone(),
        el_bins_deg: est.el_bins_deg.clone(),
        error_db,
    })
}

/// Compares against `tx` dB + `rx` dB evaluated at each bin center.
pub fn pattern_error(tx: &AntennaPattern, rx: &AntennaPattern, est: &EstimatedPattern) -> Result<PatternError> {
    pattern_error_with(|a| 10.0 * (gain(tx, a) * gain(rx, a)).log10(), est)
}
