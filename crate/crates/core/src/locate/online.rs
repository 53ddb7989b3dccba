//! Buffered real-time localization: every arrival triggers a fixed-point
//! solve on a subset of the buffer, and the per-step estimates are fused by a
//! residual-derived weight.

use std::collections::VecDeque;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fixed_point::inferred_distance;
use super::{LocEstimate, LocalizationModel, LocalizerConfig, Measurement, SelectionStrategy};
use crate::antenna::AntennaPattern;
use crate::error::{Error, ErrorClass, Result};
use crate::geo::{horizontal_distance, link_geometry, GeoPoint, ProjectionConfig};
use crate::propagation::CarrierConfig;

/// Residuals below this are clamped before taking the logarithm in [`weight`].
pub const RESIDUAL_FLOOR_M2: f64 = 10.0;

/// Bounded FIFO of measurements plus the running weighted estimate.
#[derive(Debug, Clone)]
pub struct OnlineState {
    n_max: usize,
    t_buf: VecDeque<f64>,
    lon_buf: VecDeque<f64>,
    lat_buf: VecDeque<f64>,
    alt_buf: VecDeque<f64>,
    rsrp_buf: VecDeque<f64>,
    estimates: Vec<(LocEstimate, f64)>,
    weighted: Option<LocEstimate>,
    weight_sum: f64,
}

impl OnlineState {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 {
            return Err(Error::InvalidParameter("n_max must be at least 1".into()));
        }
        Ok(OnlineState {
            n_max,
            t_buf: VecDeque::new(),
            lon_buf: VecDeque::new(),
            lat_buf: VecDeque::new(),
            alt_buf: VecDeque::new(),
            rsrp_buf: VecDeque::new(),
            estimates: Vec::new(),
            weighted: None,
            weight_sum: 0.0,
        })
    }

    /// Appends a sample, evicting the oldest one when the buffer is full.
    pub fn push(&mut self, m: &Measurement) {
        if self.len() == self.n_max {
            self.t_buf.pop_front();
            self.lon_buf.pop_front();
            self.lat_buf.pop_front();
            self.alt_buf.pop_front();
            self.rsrp_buf.pop_front();
        }
        self.t_buf.push_back(m.t_s);
        self.lon_buf.push_back(m.uav.lon_deg);
        self.lat_buf.push_back(m.uav.lat_deg);
        self.alt_buf.push_back(m.uav.alt_m);
        self.rsrp_buf.push_back(m.rsrp_dbm);
    }

    pub fn len(&self) -> usize {
        self.rsrp_buf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rsrp_buf.is_empty()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Buffered sample `i`, oldest first.
    pub fn sample(&self, i: usize) -> Measurement {
        Measurement {
            t_s: self.t_buf[i],
            uav: GeoPoint {
                lon_deg: self.lon_buf[i],
                lat_deg: self.lat_buf[i],
                alt_m: self.alt_buf[i],
            },
            rsrp_dbm: self.rsrp_buf[i],
        }
    }

    pub fn samples(&self, idx: &[usize]) -> Vec<Measurement> {
        idx.iter().map(|&i| self.sample(i)).collect()
    }

    /// Lengths of the five parallel buffers, in field order.
    pub fn buffer_lengths(&self) -> [usize; 5] {
        [
            self.t_buf.len(),
            self.lon_buf.len(),
            self.lat_buf.len(),
            self.alt_buf.len(),
            self.rsrp_buf.len(),
        ]
    }

    pub fn estimates(&self) -> &[(LocEstimate, f64)] {
        &self.estimates
    }

    pub fn weighted(&self) -> Option<LocEstimate> {
        self.weighted
    }

    /// Folds a new estimate into the weighted mean. The running form keeps
    /// the fused estimate a convex combination of the inputs at every step.
    pub fn add_estimate(&mut self, est: LocEstimate, mu: f64) -> Result<LocEstimate> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!("weight must be positive, got {mu}")));
        }
        self.estimates.push((est, mu));
        self.weight_sum += mu;
        let fused = match self.weighted {
            None => est,
            Some(cur) => {
                let f = mu / self.weight_sum;
                LocEstimate {
                    lon_deg: cur.lon_deg + f * (est.lon_deg - cur.lon_deg),
                    lat_deg: cur.lat_deg + f * (est.lat_deg - cur.lat_deg),
                }
            }
        };
        self.weighted = Some(fused);
        Ok(fused)
    }
}

/// Chooses `m` buffer indices (0-based, ascending).
pub fn select_samples(
    state: &OnlineState,
    m: usize,
    strategy: SelectionStrategy,
    waypoints: &[GeoPoint],
    proj: &ProjectionConfig,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    let n = state.len();
    if n < 2 || m < 2 {
        return Err(Error::InsufficientSamples {
            needed: 2,
            got: n.min(m),
        });
    }
    if n <= m {
        return Ok((0..n).collect());
    }
    let mut idx = match strategy {
        SelectionStrategy::Random => index::sample(rng, n, m).into_vec(),
        SelectionStrategy::EqualInterval => equal_interval(n, m),
        SelectionStrategy::NearbyWaypoints => {
            if waypoints.is_empty() {
                return Err(Error::InvalidParameter(
                    "waypoint selection needs at least one waypoint".into(),
                ));
            }
            nearby_waypoints(state, m, waypoints, proj)
        }
    };
    idx.sort_unstable();
    Ok(idx)
}

/// 1-based positions `round(j n / m)`, j = 1..m, returned 0-based. Rounding
/// collisions move to the nearest free index toward the buffer head, or
/// toward the tail when the head side is exhausted.
fn equal_interval(n: usize, m: usize) -> Vec<usize> {
    let mut used = vec![false; n];
    let mut out = Vec::with_capacity(m);
    for j in 1..=m {
        // round half up in integers
        let pos = ((2 * j * n + m) / (2 * m)).clamp(1, n) - 1;
        let pick = (0..=pos)
            .rev()
            .find(|&i| !used[i])
            .or_else(|| (pos + 1..n).find(|&i| !used[i]));
        if let Some(i) = pick {
            used[i] = true;
            out.push(i);
        }
    }
    out
}

/// Assigns each buffered sample to its nearest waypoint, then takes the
/// samples closest to each represented waypoint with quotas split as evenly as
/// possible (earlier waypoints get the remainder).
fn nearby_waypoints(state: &OnlineState, m: usize, waypoints: &[GeoPoint], proj: &ProjectionConfig) -> Vec<usize> {
    let mut groups: Vec<Vec<(f64, usize)>> = vec![Vec::new(); waypoints.len()];
    for i in 0..state.len() {
        let p = state.sample(i).uav;
        let (w, d) = waypoints
            .iter()
            .map(|w| horizontal_distance(w, &p, proj))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |best, (w, d)| if d < best.1 { (w, d) } else { best },
            );
        groups[w].push((d, i));
    }
    let mut groups: Vec<Vec<(f64, usize)>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
    for g in &mut groups {
        g.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    }

    let k = groups.len();
    let mut quota: Vec<usize> = (0..k).map(|w| m / k + usize::from(w < m % k)).collect();
    // shortfalls flow to the next waypoints that still have samples
    let mut spare = 0;
    for w in 0..k {
        let have = groups[w].len();
        if quota[w] > have {
            spare += quota[w] - have;
            quota[w] = have;
        }
    }
    while spare > 0 {
        let mut moved = false;
        for w in 0..k {
            if spare > 0 && quota[w] < groups[w].len() {
                quota[w] += 1;
                spare -= 1;
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }

    let mut out = Vec::with_capacity(m);
    for w in 0..k {
        for &(_, i) in groups[w].iter().take(quota[w]) {
            out.push(i);
        }
    }
    out
}

/// Mean of `(d3_rsrp - d3_geom)^2` over the samples for a transmitter at
/// `est`, with `gains` used for the RSRP inversion.
pub fn residual(
    est: &LocEstimate,
    samples: &[Measurement],
    gains: &[(f64, f64)],
    bs_alt_m: f64,
    c: &CarrierConfig,
    proj: &ProjectionConfig,
) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    let bs = est.at_alt(bs_alt_m);
    let mut sum = 0.0;
    for (m, &g) in samples.iter().zip(gains) {
        let d_rsrp = inferred_distance(m, g, c)?;
        let d_geom = link_geometry(&bs, &m.uav, proj)?.d3_m;
        sum += (d_rsrp - d_geom).powi(2);
    }
    Ok(sum / samples.len() as f64)
}

/// `n_buf / log10(max(e_res, 10))`.
pub fn weight(e_res_m2: f64, n_buf: usize) -> f64 {
    let e = if e_res_m2.is_nan() {
        f64::INFINITY
    } else {
        e_res_m2.max(RESIDUAL_FLOOR_M2)
    };
    n_buf as f64 / e.log10()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepEstimate {
    pub est: LocEstimate,
    pub residual_m2: f64,
    pub weight: f64,
}

/// Outcome of one arrival.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnlineStep {
    pub t_s: f64,
    pub n_buf: usize,
    /// Per-step solve; absent while the buffer holds fewer than M samples or
    /// when the selected geometry was degenerate.
    pub step: Option<StepEstimate>,
    /// Fused estimate after this arrival.
    pub weighted: Option<LocEstimate>,
}

pub struct OnlineLocalizer<'a> {
    model: LocalizationModel<'a>,
    cfg: LocalizerConfig,
    waypoints: Vec<GeoPoint>,
    state: OnlineState,
    rng: ChaCha8Rng,
}

impl<'a> OnlineLocalizer<'a> {
    pub fn new(model: LocalizationModel<'a>, cfg: LocalizerConfig, waypoints: Vec<GeoPoint>) -> Result<Self> {
        cfg.validate()?;
        if cfg.selection == SelectionStrategy::NearbyWaypoints && waypoints.is_empty() {
            return Err(Error::InvalidParameter(
                "waypoint selection needs at least one waypoint".into(),
            ));
        }
        Ok(OnlineLocalizer {
            model,
            state: OnlineState::new(cfg.n_max)?,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            waypoints,
        })
    }

    pub fn state(&self) -> &OnlineState {
        &self.state
    }

    pub fn push(&mut self, m: &Measurement) -> Result<OnlineStep> {
        self.state.push(m);
        let n_buf = self.state.len();
        let mut step = None;
        if n_buf >= self.cfg.m_samples {
            let idx = select_samples(
                &self.state,
                self.cfg.m_samples,
                self.cfg.selection,
                &self.waypoints,
                &self.model.proj,
                &mut self.rng,
            )?;
            let chosen = self.state.samples(&idx);
            match self.solve(&chosen, n_buf) {
                Ok(s) => {
                    self.state.add_estimate(s.est, s.weight)?;
                    step = Some(s);
                }
                // an ill-conditioned subset just yields no estimate this step
                Err(e) if e.class() == ErrorClass::Numerical => {}
                Err(e) => return Err(e),
            }
        }
        Ok(OnlineStep {
            t_s: m.t_s,
            n_buf,
            step,
            weighted: self.state.weighted(),
        })
    }

    fn solve(&self, chosen: &[Measurement], n_buf: usize) -> Result<StepEstimate> {
        let trace = self.model.fixed_point(chosen, self.cfg.k_iters)?;
        let est = *trace.last().expect("k_iters >= 1");
        let residual_m2 = self.model.residual(chosen, &est)?;
        let weight = weight(residual_m2, n_buf);
        if !(weight > 0.0) {
            return Err(Error::DegenerateGeometry);
        }
        Ok(StepEstimate {
            est,
            residual_m2,
            weight,
        })
    }
}

/// Runs the online localizer over a time-ordered stream; one step per arrival.
#[allow(clippy::too_many_arguments)]
pub fn online_localize(
    stream: &[Measurement],
    tx: &AntennaPattern,
    rx: &AntennaPattern,
    bs_alt_m: f64,
    cfg: &LocalizerConfig,
    waypoints: &[GeoPoint],
    c: &CarrierConfig,
    proj: &ProjectionConfig,
) -> Result<Vec<OnlineStep>> {
    if stream.windows(2).any(|w| w[1].t_s < w[0].t_s) {
        return Err(Error::InvalidParameter("online stream must be time-ordered".into()));
    }
    let model = LocalizationModel {
        tx,
        rx,
        bs_alt_m,
        carrier: *c,
        proj: *proj,
    };
    let mut loc = OnlineLocalizer::new(model, *cfg, waypoints.to_vec())?;
    stream.iter().map(|m| loc.push(m)).collect()
}
