//! Geographic coordinates, the equirectangular projection used for planar
//! distances, and the direct/ground-reflected geometry of a BS-UAV link.
//!
//! Altitudes are heights above a flat local ground plane at altitude 0. The
//! reflected ray is built with the image method over that plane.

use crate::error::{Error, Result};

/// Mean equatorial earth radius in meters.
pub const EARTH_RADIUS_M: f64 = 6_378_137.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    pub lon_deg: f64,
    pub lat_deg: f64,
    pub alt_m: f64,
}

impl GeoPoint {
    pub fn new(lon_deg: f64, lat_deg: f64, alt_m: f64) -> Result<Self> {
        let p = GeoPoint {
            lon_deg,
            lat_deg,
            alt_m,
        };
        if p.is_valid() {
            Ok(p)
        } else {
            Err(Error::InvalidParameter(format!(
                "geo point out of range: lon={lon_deg} lat={lat_deg} alt={alt_m}"
            )))
        }
    }

    pub fn is_valid(&self) -> bool {
        self.lon_deg.is_finite()
            && self.lat_deg.is_finite()
            && self.alt_m.is_finite()
            && (-180.0..=180.0).contains(&self.lon_deg)
            && (-90.0..=90.0).contains(&self.lat_deg)
    }

    pub fn with_alt(self, alt_m: f64) -> Self {
        GeoPoint { alt_m, ..self }
    }
}

/// Equirectangular projection parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionConfig {
    /// Standard parallel in degrees.
    pub psi0_deg: f64,
    pub earth_radius_m: f64,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            psi0_deg: 0.0,
            earth_radius_m: EARTH_RADIUS_M,
        }
    }
}

impl ProjectionConfig {
    pub fn new(psi0_deg: f64, earth_radius_m: f64) -> Result<Self> {
        if !(earth_radius_m > 0.0 && earth_radius_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "earth radius must be positive, got {earth_radius_m}"
            )));
        }
        if !(-90.0..=90.0).contains(&psi0_deg) {
            return Err(Error::InvalidParameter(format!(
                "standard parallel out of range: {psi0_deg}"
            )));
        }
        Ok(ProjectionConfig {
            psi0_deg,
            earth_radius_m,
        })
    }

    /// Projection whose standard parallel passes through `p`.
    pub fn centered_on(p: &GeoPoint) -> Self {
        ProjectionConfig {
            psi0_deg: p.lat_deg,
            ..Default::default()
        }
    }

    /// Meters per degree of latitude, `R*pi/180`.
    pub fn meters_per_deg(&self) -> f64 {
        self.earth_radius_m * std::f64::consts::PI / 180.0
    }

    pub fn cos_psi0(&self) -> f64 {
        self.psi0_deg.to_radians().cos()
    }

    /// Planar (east, north) offset in meters of `to` relative to `from`.
    pub fn local_offset(&self, from: &GeoPoint, to: &GeoPoint) -> (f64, f64) {
        let k = self.meters_per_deg();
        (
            (to.lon_deg - from.lon_deg) * self.cos_psi0() * k,
            (to.lat_deg - from.lat_deg) * k,
        )
    }

    /// Inverse of [`ProjectionConfig::local_offset`]; altitude is copied from
    /// `origin`.
    pub fn offset_point(&self, origin: &GeoPoint, east_m: f64, north_m: f64) -> GeoPoint {
        let k = self.meters_per_deg();
        GeoPoint {
            lon_deg: origin.lon_deg + east_m / (k * self.cos_psi0()),
            lat_deg: origin.lat_deg + north_m / k,
            alt_m: origin.alt_m,
        }
    }
}

/// Horizontal distance under the equirectangular projection.
pub fn horizontal_distance(bs: &GeoPoint, uav: &GeoPoint, proj: &ProjectionConfig) -> f64 {
    let d_lon = bs.lon_deg - uav.lon_deg;
    let d_lat = bs.lat_deg - uav.lat_deg;
    let c = proj.cos_psi0();
    (d_lon * d_lon * c * c + d_lat * d_lat).sqrt() * proj.meters_per_deg()
}

/// Great-circle distance on a sphere of radius `proj.earth_radius_m`.
pub fn haversine_distance(bs: &GeoPoint, uav: &GeoPoint, proj: &ProjectionConfig) -> f64 {
    let (lat1, lat2) = (bs.lat_deg.to_radians(), uav.lat_deg.to_radians());
    let d_lat = lat2 - lat1;
    let d_lon = (uav.lon_deg - bs.lon_deg).to_radians();
    let a = (d_lat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (d_lon / 2.0).sin().powi(2);
    2.0 * proj.earth_radius_m * a.clamp(0.0, 1.0).sqrt().asin()
}

/// Distances and angles of one BS-UAV link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    pub d_h_m: f64,
    pub d_v_m: f64,
    /// Line-of-sight length.
    pub d3_m: f64,
    /// Length of the ground-reflected path, `d1 + d2`.
    pub d_refl_m: f64,
    /// `d_refl_m - d3_m`, computed without cancellation.
    pub path_diff_m: f64,
    /// Bearing from BS to UAV, clockwise from north, in [0, 360).
    pub az_deg: f64,
    /// Elevation of the UAV above the BS horizon.
    pub el_deg: f64,
    /// Grazing angle of the ground reflection.
    pub theta_r_deg: f64,
}

impl LinkGeometry {
    /// Builds the geometry from planar quantities: horizontal distance,
    /// bearing and the two heights above ground.
    pub fn from_local(d_h_m: f64, az_deg: f64, h_bs_m: f64, h_uav_m: f64) -> Result<Self> {
        let d_v_m = (h_bs_m - h_uav_m).abs();
        if d_h_m == 0.0 && d_v_m == 0.0 {
            return Err(Error::CoincidentPoints);
        }
        let h_sum = h_bs_m + h_uav_m;
        let d3_m = d_h_m.hypot(d_v_m);
        let d_refl_m = d_h_m.hypot(h_sum);
        // (h1 + h2)^2 - (h1 - h2)^2 = 4 h1 h2
        let path_diff_m = 4.0 * h_bs_m * h_uav_m / (d_refl_m + d3_m);
        Ok(LinkGeometry {
            d_h_m,
            d_v_m,
            d3_m,
            d_refl_m,
            path_diff_m,
            az_deg: az_deg.rem_euclid(360.0),
            el_deg: (h_uav_m - h_bs_m).atan2(d_h_m).to_degrees(),
            theta_r_deg: h_sum.atan2(d_h_m).to_degrees(),
        })
    }
}

/// Link geometry between a ground station and a UAV.
pub fn link_geometry(bs: &GeoPoint, uav: &GeoPoint, proj: &ProjectionConfig) -> Result<LinkGeometry> {
    let d_h = horizontal_distance(bs, uav, proj);
    let (east, north) = proj.local_offset(bs, uav);
    let az = east.atan2(north).to_degrees();
    LinkGeometry::from_local(d_h, az, bs.alt_m, uav.alt_m)
}
