//! Antenna radiation patterns: measured grids, the half-wave dipole and the
//! isotropic radiator.
//!
//! Tabulated patterns are stored in dBi on an (azimuth, elevation) grid and
//! interpolated bilinearly in dB. Azimuth wraps modulo 360 degrees; elevation
//! queries outside the grid are clamped to its edge.

use crate::error::{Error, Result};
use crate::geo::LinkGeometry;

/// Direction in a pattern's frame, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnglePair {
    pub az_deg: f64,
    pub el_deg: f64,
}

impl AnglePair {
    pub fn new(az_deg: f64, el_deg: f64) -> Self {
        AnglePair { az_deg, el_deg }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPattern {
    az_grid_deg: Vec<f64>,
    el_grid_deg: Vec<f64>,
    /// Row-major by azimuth: `gain_dbi[i_az * n_el + i_el]`.
    gain_dbi: Vec<f64>,
}

impl TabulatedPattern {
    pub fn new(az_grid_deg: Vec<f64>, el_grid_deg: Vec<f64>, gain_dbi: Vec<f64>) -> Result<Self> {
        check_axis("azimuth", &az_grid_deg)?;
        check_axis("elevation", &el_grid_deg)?;
        let span = az_grid_deg[az_grid_deg.len() - 1] - az_grid_deg[0];
        if span > 360.0 {
            return Err(Error::MalformedPattern(format!(
                "azimuth grid spans {span} degrees, more than a full turn"
            )));
        }
        if gain_dbi.len() != az_grid_deg.len() * el_grid_deg.len() {
            return Err(Error::MalformedPattern(format!(
                "expected {} gain values for a {}x{} grid, got {}",
                az_grid_deg.len() * el_grid_deg.len(),
                az_grid_deg.len(),
                el_grid_deg.len(),
                gain_dbi.len()
            )));
        }
        if let Some(g) = gain_dbi.iter().find(|g| !g.is_finite()) {
            return Err(Error::MalformedPattern(format!("non-finite gain {g}")));
        }
        Ok(TabulatedPattern {
            az_grid_deg,
            el_grid_deg,
            gain_dbi,
        })
    }

    /// Samples `f(az, el)` (dBi) on the given axes.
    pub fn from_fn(az_grid_deg: Vec<f64>, el_grid_deg: Vec<f64>, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let gain = az_grid_deg
            .iter()
            .flat_map(|&az| el_grid_deg.iter().map(move |&el| (az, el)))
            .map(|(az, el)| f(az, el))
            .collect();
        TabulatedPattern::new(az_grid_deg, el_grid_deg, gain)
    }

    pub fn az_grid(&self) -> &[f64] {
        &self.az_grid_deg
    }

    pub fn el_grid(&self) -> &[f64] {
        &self.el_grid_deg
    }

    pub fn node_dbi(&self, i_az: usize, i_el: usize) -> f64 {
        self.gain_dbi[i_az * self.el_grid_deg.len() + i_el]
    }

    /// Interpolated gain in dBi.
    pub fn gain_dbi(&self, a: AnglePair) -> f64 {
        let (i0, i1, ta) = self.az_segment(a.az_deg);
        let (j0, j1, te) = self.el_segment(a.el_deg);
        let g00 = self.node_dbi(i0, j0);
        let g01 = self.node_dbi(i0, j1);
        let g10 = self.node_dbi(i1, j0);
        let g11 = self.node_dbi(i1, j1);
        (1.0 - ta) * ((1.0 - te) * g00 + te * g01) + ta * ((1.0 - te) * g10 + te * g11)
    }

    fn az_segment(&self, az_deg: f64) -> (usize, usize, f64) {
        let grid = &self.az_grid_deg;
        let first = grid[0];
        let last = grid[grid.len() - 1];
        let q = first + (az_deg - first).rem_euclid(360.0);
        if q <= last {
            let (i, t) = segment(grid, q);
            (i, i + 1, t)
        } else {
            // seam between the last column and the first one, one turn later
            let gap = first + 360.0 - last;
            (grid.len() - 1, 0, (q - last) / gap)
        }
    }

    fn el_segment(&self, el_deg: f64) -> (usize, usize, f64) {
        let grid = &self.el_grid_deg;
        let q = el_deg.clamp(grid[0], grid[grid.len() - 1]);
        let (j, t) = segment(grid, q);
        (j, j + 1, t)
    }
}

/// Locates `q` (inside the grid range) in an ascending grid.
fn segment(grid: &[f64], q: f64) -> (usize, f64) {
    let upper = grid.partition_point(|&x| x <= q).clamp(1, grid.len() - 1);
    let i = upper - 1;
    let t = ((q - grid[i]) / (grid[i + 1] - grid[i])).clamp(0.0, 1.0);
    (i, t)
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.len() < 2 {
        return Err(Error::MalformedPattern(format!(
            "{name} axis needs at least 2 samples, got {}",
            axis.len()
        )));
    }
    if axis.iter().any(|a| !a.is_finite()) {
        return Err(Error::MalformedPattern(format!("non-finite {name} angle")));
    }
    if axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::MalformedPattern(format!(
            "{name} axis is not strictly ascending"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum AntennaPattern {
    Isotropic,
    Dipole,
    Tabulated(TabulatedPattern),
}

impl AntennaPattern {
    pub fn name(&self) -> &'static str {
        match self {
            AntennaPattern::Isotropic => "isotropic",
            AntennaPattern::Dipole => "dipole",
            AntennaPattern::Tabulated(_) => "tabulated",
        }
    }
}

/// Linear gain of a vertical half-wave dipole at elevation `el_deg`.
///
/// Evaluates `cos(pi/2 cos t) / sin t` with `t` the zenith angle, rewritten
/// in terms of the angular distance from the axis so that it stays accurate
/// near the nulls and is exactly even in elevation.
pub fn dipole_gain(el_deg: f64) -> f64 {
    let from_axis = (90.0 - el_deg.abs()).to_radians();
    if from_axis <= 0.0 {
        return 0.0;
    }
    let half = (from_axis / 2.0).sin();
    (std::f64::consts::PI * half * half).sin() / from_axis.sin()
}

/// Bilinearly interpolated linear gain of a tabulated pattern.
pub fn tabulated_gain(p: &TabulatedPattern, a: AnglePair) -> f64 {
    10f64.powf(p.gain_dbi(a) / 10.0)
}

/// Linear gain of any pattern kind.
pub fn gain(p: &AntennaPattern, a: AnglePair) -> f64 {
    match p {
        AntennaPattern::Isotropic => 1.0,
        AntennaPattern::Dipole => dipole_gain(a.el_deg),
        AntennaPattern::Tabulated(t) => tabulated_gain(t, a),
    }
}

/// Linear antenna gains along the direct and ground-reflected rays.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGains {
    pub tx_los: f64,
    pub rx_los: f64,
    pub tx_refl: f64,
    pub rx_refl: f64,
}

impl LinkGains {
    pub const UNIT: LinkGains = LinkGains {
        tx_los: 1.0,
        rx_los: 1.0,
        tx_refl: 1.0,
        rx_refl: 1.0,
    };
}

/// Both patterns are indexed by the link azimuth and elevation. The reflected
/// ray leaves the transmitter at `-theta_r` and reaches the receiver at
/// `+theta_r`.
pub fn link_gains(tx: &AntennaPattern, rx: &AntennaPattern, g: &LinkGeometry) -> LinkGains {
    let los = AnglePair::new(g.az_deg, g.el_deg);
    LinkGains {
        tx_los: gain(tx, los),
        rx_los: gain(rx, los),
        tx_refl: gain(tx, AnglePair::new(g.az_deg, -g.theta_r_deg)),
        rx_refl: gain(rx, AnglePair::new(g.az_deg, g.theta_r_deg)),
    }
}
