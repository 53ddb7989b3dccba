use nalgebra::{DMatrix, DVector};

use super::{rsrp_to_distance_sq, LocEstimate, Measurement};
use crate::error::{Error, Result};
use crate::geo::ProjectionConfig;
use crate::propagation::CarrierConfig;

/// Singular-value ratio below which the system is treated as rank deficient.
/// Stored coordinates resolve about 1e-7 degrees (~1 cm), so a sample set
/// whose cross-track extent is under ~1e-4 of its length is collinear as far
/// as the data can tell; solving it only amplifies rounding into kilometers.
pub const RANK_TOL: f64 = 1e-4;

/// Smallest RMS cross-track spread, in degrees (~0.1 m), that counts as real
/// geometry. A short straight stretch passes the ratio test on rounding
/// jitter alone; ten times the stored resolution keeps it out.
pub const MIN_SPREAD_DEG: f64 = 1e-6;

/// Linearized range-difference system `A l = B`.
///
/// Rows are expressed relative to the reference sample: the unknown is the
/// offset `l - origin`, where `origin` is the reference sample's
/// (longitude, latitude). Subtracting the reference before squaring keeps the
/// right-hand side free of the cancellation that `lon_r^2 - lon_i^2` suffers
/// at degree scale; [`LsSystem::absolute_rhs`] recovers the un-shifted `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct LsSystem {
    /// Rows `[2 (lon_i - lon_r) cos^2(psi0), 2 (lat_i - lat_r)]`.
    pub a: Vec<[f64; 2]>,
    pub b: Vec<f64>,
    pub origin: LocEstimate,
    pub ref_index: usize,
    /// Samples whose squared horizontal distance came out negative and was
    /// clamped to zero.
    pub clamped: usize,
}

impl LsSystem {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// Right-hand side of the system in absolute coordinates,
    /// `B_abs = b + A * origin`.
    pub fn absolute_rhs(&self) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| b + row[0] * self.origin.lon_deg + row[1] * self.origin.lat_deg)
            .collect()
    }

    /// `||A l - B||_2` for an absolute position `l`.
    pub fn objective(&self, l: &LocEstimate) -> f64 {
        let x = l.lon_deg - self.origin.lon_deg;
        let y = l.lat_deg - self.origin.lat_deg;
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, b)| (row[0] * x + row[1] * y - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Builds the system from per-sample linear `(g_tx, g_rx)` gains. The sample
/// with the strongest RSRP is the reference.
pub fn build_ls_system(
    samples: &[Measurement],
    gains: &[(f64, f64)],
    bs_alt_m: f64,
    c: &CarrierConfig,
    proj: &ProjectionConfig,
) -> Result<LsSystem> {
    if samples.len() < 3 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: samples.len(),
        });
    }
    if gains.len() != samples.len() {
        return Err(Error::InvalidParameter(format!(
            "{} gain pairs for {} samples",
            gains.len(),
            samples.len()
        )));
    }
    if let Some(g) = gains.iter().find(|(t, r)| !(*t > 0.0 && *r > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "antenna gains must be positive, got {g:?}"
        )));
    }

    let ref_index = samples.iter().enumerate().fold(
        0,
        |best, (i, m)| if m.rsrp_dbm > samples[best].rsrp_dbm { i } else { best },
    );

    let mut clamped = 0;
    let mut horiz_sq = Vec::with_capacity(samples.len());
    for (m, &(g_tx, g_rx)) in samples.iter().zip(gains) {
        let d3_sq = rsrp_to_distance_sq(m.rsrp_dbm, g_tx, g_rx, c)?;
        let d_v = bs_alt_m - m.uav.alt_m;
        let h_sq = d3_sq - d_v * d_v;
        if h_sq < 0.0 {
            clamped += 1;
        }
        horiz_sq.push(h_sq.max(0.0));
    }

    let cos2 = proj.cos_psi0().powi(2);
    let k2 = proj.meters_per_deg().powi(2);
    let r = &samples[ref_index].uav;
    let mut a = Vec::with_capacity(samples.len() - 1);
    let mut b = Vec::with_capacity(samples.len() - 1);
    for (i, m) in samples.iter().enumerate() {
        if i == ref_index {
            continue;
        }
        let dx = m.uav.lon_deg - r.lon_deg;
        let dy = m.uav.lat_deg - r.lat_deg;
        a.push([2.0 * dx * cos2, 2.0 * dy]);
        b.push((horiz_sq[ref_index] - horiz_sq[i]) / k2 + dx * dx * cos2 + dy * dy);
    }
    if a.iter().all(|row| row[0] == 0.0 && row[1] == 0.0) {
        return Err(Error::DegenerateGeometry);
    }

    Ok(LsSystem {
        a,
        b,
        origin: LocEstimate {
            lon_deg: r.lon_deg,
            lat_deg: r.lat_deg,
        },
        ref_index,
        clamped,
    })
}

/// Minimum-norm least-squares solution through the SVD pseudo-inverse.
pub fn solve_ls(sys: &LsSystem) -> Result<LocEstimate> {
    if sys.len() < 2 {
        return Err(Error::InsufficientSamples {
            needed: 3,
            got: sys.len() + 1,
        });
    }
    let a = DMatrix::from_fn(sys.len(), 2, |i, j| sys.a[i][j]);
    let b = DVector::from_column_slice(&sys.b);
    let svd = a.svd(true, true);
    let s = &svd.singular_values;
    let (hi, lo) = (s.max(), s.min());
    let ratio = if hi > 0.0 { lo / hi } else { 0.0 };
    // rows are 2x the offsets, so lo / (2 sqrt(rows)) is the RMS spread
    let spread = lo / (2.0 * (sys.len() as f64).sqrt());
    if !(ratio > RANK_TOL && spread > MIN_SPREAD_DEG) {
        return Err(Error::RankDeficient(ratio));
    }
    let x = svd.solve(&b, 0.0).map_err(|_| Error::RankDeficient(ratio))?;
    Ok(LocEstimate {
        lon_deg: sys.origin.lon_deg + x[0],
        lat_deg: sys.origin.lat_deg + x[1],
    })
}
