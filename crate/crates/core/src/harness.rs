//! Synthetic flight campaigns and the localization experiments run on them.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::antenna::{AntennaPattern, TabulatedPattern};
use crate::error::{Error, Result};
use crate::geo::{link_geometry, GeoPoint, ProjectionConfig};
use crate::locate::{
    moving_average, online_localize, projection_for, LocEstimate, LocalizationModel, LocalizerConfig, Measurement,
    SelectionStrategy,
};
use crate::propagation::{synthesize_rsrp, CarrierConfig, GroundParams, PropagationModel, ShadowingModel};

/// Flight heights of the reference campaign, meters above ground.
pub const DEFAULT_UAV_HEIGHTS_M: [f64; 5] = [30.0, 50.0, 70.0, 90.0, 110.0];

/// Constant-speed, fixed-height flight through a list of waypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Route in flight order; altitudes are ignored in favor of `height_m`.
    pub waypoints: Vec<GeoPoint>,
    pub height_m: f64,
    pub speed_mps: f64,
    pub sample_period_s: f64,
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        if self.waypoints.len() < 2 {
            return Err(Error::DegenerateTrajectory("a route needs at least two waypoints"));
        }
        if !(self.speed_mps > 0.0 && self.speed_mps.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "speed must be positive, got {}",
                self.speed_mps
            )));
        }
        if !(self.sample_period_s > 0.0 && self.sample_period_s.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sample period must be positive, got {}",
                self.sample_period_s
            )));
        }
        if !self.height_m.is_finite() {
            return Err(Error::InvalidParameter("flight height must be finite".into()));
        }
        Ok(())
    }

    /// Same route flown backwards.
    pub fn reversed(&self) -> Trajectory {
        let mut t = self.clone();
        t.waypoints.reverse();
        t
    }
}

/// Samples the flight every `sample_period_s`, always including the final
/// waypoint. Returns `(t_s, position)` pairs.
pub fn gen_trajectory(t: &Trajectory, proj: &ProjectionConfig) -> Result<Vec<(f64, GeoPoint)>> {
    t.validate()?;
    let legs: Vec<f64> = t
        .waypoints
        .windows(2)
        .map(|w| {
            let (e, n) = proj.local_offset(&w[0], &w[1]);
            e.hypot(n)
        })
        .collect();
    let length: f64 = legs.iter().sum();
    if !(length > 0.0) {
        return Err(Error::DegenerateTrajectory("route has zero length"));
    }
    let duration = length / t.speed_mps;
    let steps = (duration / t.sample_period_s - 1e-9).ceil().max(1.0) as usize;

    let at = |s: f64| -> GeoPoint {
        let mut rest = s;
        for (i, &len) in legs.iter().enumerate() {
            if rest <= len || i == legs.len() - 1 {
                let f = if len > 0.0 { (rest / len).clamp(0.0, 1.0) } else { 0.0 };
                let (a, b) = (&t.waypoints[i], &t.waypoints[i + 1]);
                return GeoPoint {
                    lon_deg: a.lon_deg + f * (b.lon_deg - a.lon_deg),
                    lat_deg: a.lat_deg + f * (b.lat_deg - a.lat_deg),
                    alt_m: t.height_m,
                };
            }
            rest -= len;
        }
        unreachable!("route has at least one leg")
    };

    let mut out: Vec<(f64, GeoPoint)> = (0..steps)
        .map(|k| {
            let time = k as f64 * t.sample_period_s;
            (time, at(time * t.speed_mps))
        })
        .collect();
    let last = t.waypoints.last().expect("validated");
    out.push((duration, last.with_alt(t.height_m)));
    Ok(out)
}

/// Reference transmitter of the synthetic site: a 10 m tower.
pub fn default_bs() -> GeoPoint {
    GeoPoint {
        lon_deg: -78.6960,
        lat_deg: 35.7270,
        alt_m: 10.0,
    }
}

/// Twelve-waypoint zig-zag from 660 m south of the tower to 660 m north of
/// it, alternating 350 m west and east: about 0.7 km by 1.3 km, so the
/// tower sits inside the flown area.
pub fn default_waypoints() -> Vec<GeoPoint> {
    let bs = default_bs();
    let proj = ProjectionConfig::centered_on(&bs);
    (0..12)
        .map(|k| {
            let east = if k % 2 == 0 { -350.0 } else { 350.0 };
            let north = -660.0 + 120.0 * k as f64;
            proj.offset_point(&bs, east, north).with_alt(0.0)
        })
        .collect()
}

/// Sector-style transmit pattern on a 5° grid: a broad main lobe at az 20°,
/// tilted 10° up, ranging from -6 dBi to +6 dBi.
pub fn directional_pattern() -> AntennaPattern {
    let az: Vec<f64> = (0..72).map(|i| i as f64 * 5.0).collect();
    let el: Vec<f64> = (0..37).map(|j| -90.0 + j as f64 * 5.0).collect();
    let pattern = TabulatedPattern::from_fn(az, el, |a, e| {
        let da = (a - 20.0 + 540.0).rem_euclid(360.0) - 180.0;
        -6.0 + 12.0 * (-(da / 60.0).powi(2) - ((e - 10.0) / 25.0).powi(2)).exp()
    })
    .expect("static grid is well formed");
    AntennaPattern::Tabulated(pattern)
}

#[derive(Debug, Clone)]
pub struct CampaignConfig {
    /// Transmitter position; `alt_m` is the antenna height above ground.
    pub bs: GeoPoint,
    pub carrier: CarrierConfig,
    pub ground: GroundParams,
    pub model: PropagationModel,
    pub tx: AntennaPattern,
    pub rx: AntennaPattern,
    pub sigma_db: f64,
    pub trajectory: Trajectory,
    pub seed: u64,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            bs: default_bs(),
            carrier: CarrierConfig::default(),
            ground: GroundParams::default(),
            model: PropagationModel::FreeSpace,
            tx: directional_pattern(),
            rx: AntennaPattern::Isotropic,
            sigma_db: 0.0,
            trajectory: Trajectory {
                waypoints: default_waypoints(),
                height_m: 110.0,
                speed_mps: 10.0,
                sample_period_s: 1.0,
            },
            seed: 0,
        }
    }
}

impl CampaignConfig {
    /// Projection used for synthesis and scoring, centered on the transmitter.
    pub fn proj(&self) -> ProjectionConfig {
        ProjectionConfig::centered_on(&self.bs)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.bs.is_valid() {
            return Err(Error::InvalidParameter(format!(
                "invalid transmitter position {:?}",
                self.bs
            )));
        }
        if !(self.sigma_db >= 0.0 && self.sigma_db.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma_db must be >= 0, got {}",
                self.sigma_db
            )));
        }
        self.trajectory.validate()
    }

    pub fn with_seed(&self, seed: u64) -> CampaignConfig {
        CampaignConfig { seed, ..self.clone() }
    }

    pub fn reversed(&self) -> CampaignConfig {
        CampaignConfig {
            trajectory: self.trajectory.reversed(),
            ..self.clone()
        }
    }
}

/// Synthesizes one RSRP sample per trajectory point.
pub fn run_campaign(cfg: &CampaignConfig) -> Result<Vec<Measurement>> {
    cfg.validate()?;
    let proj = cfg.proj();
    let mut shadow = ShadowingModel::new(cfg.sigma_db, cfg.seed)?.stream();
    gen_trajectory(&cfg.trajectory, &proj)?
        .into_iter()
        .map(|(t_s, uav)| {
            let g = link_geometry(&cfg.bs, &uav, &proj)?;
            let r = synthesize_rsrp(&g, cfg.model, &cfg.tx, &cfg.rx, &cfg.carrier, &cfg.ground, &mut shadow)?;
            Ok(Measurement {
                t_s,
                uav,
                rsrp_dbm: r.rsrp_dbm,
            })
        })
        .collect()
}

/// Root mean square horizontal error of `estimates` against `truth`.
pub fn evaluate_rmse(estimates: &[LocEstimate], truth: &GeoPoint, proj: &ProjectionConfig) -> Result<f64> {
    if estimates.is_empty() {
        return Err(Error::EmptyInput);
    }
    let sq: f64 = estimates.iter().map(|e| e.distance_error_m(truth, proj).powi(2)).sum();
    Ok((sq / estimates.len() as f64).sqrt())
}

/// Antenna knowledge assumed by the localizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternOption {
    /// The patterns the data was synthesized with.
    Matched,
    Dipole,
    Isotropic,
}

impl PatternOption {
    pub const ALL: [PatternOption; 3] = [PatternOption::Matched, PatternOption::Dipole, PatternOption::Isotropic];

    pub fn patterns<'a>(&self, cfg: &'a CampaignConfig) -> (&'a AntennaPattern, &'a AntennaPattern) {
        static DIPOLE: AntennaPattern = AntennaPattern::Dipole;
        static ISOTROPIC: AntennaPattern = AntennaPattern::Isotropic;
        match self {
            PatternOption::Matched => (&cfg.tx, &cfg.rx),
            PatternOption::Dipole => (&DIPOLE, &DIPOLE),
            PatternOption::Isotropic => (&ISOTROPIC, &ISOTROPIC),
        }
    }
}

impl fmt::Display for PatternOption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PatternOption::Matched => "matched",
            PatternOption::Dipole => "dipole",
            PatternOption::Isotropic => "isotropic",
        })
    }
}

impl FromStr for PatternOption {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "matched" | "measured" => Ok(PatternOption::Matched),
            "dipole" => Ok(PatternOption::Dipole),
            "isotropic" => Ok(PatternOption::Isotropic),
            other => Err(Error::InvalidParameter(format!("unknown pattern option '{other}'"))),
        }
    }
}

/// Campaign with the moving average applied, plus the projection the
/// localizer would derive from it.
fn prepared_trace(cfg: &CampaignConfig, loc: &LocalizerConfig) -> Result<(Vec<Measurement>, ProjectionConfig)> {
    let raw = run_campaign(cfg)?;
    let proj = projection_for(&raw)?;
    Ok((moving_average(&raw, loc.ma_window)?, proj))
}

/// Draws `n` distinct samples (time order preserved).
pub fn draw_samples(trace: &[Measurement], n: usize, rng: &mut ChaCha8Rng) -> Vec<Measurement> {
    let mut idx = index::sample(rng, trace.len(), n.min(trace.len())).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| trace[i]).collect()
}

/// Per-trial seed derived from a base seed.
fn trial_seed(base: u64, trial: usize) -> u64 {
    base.wrapping_add(trial as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OfflineRow {
    pub n_samples: usize,
    pub rmse_m: f64,
    pub pattern: PatternOption,
}

/// Offline localization error versus sample count. Trial `t` synthesizes the
/// campaign with seed `cfg.seed + t`, draws samples with seed
/// `loc.seed + t`, and every pattern option sees the same draw.
pub fn experiment_offline(
    cfg: &CampaignConfig,
    loc: &LocalizerConfig,
    trials: usize,
    n_values: &[usize],
    options: &[PatternOption],
) -> Result<Vec<OfflineRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    if n_values.iter().any(|&n| n < 3) {
        return Err(Error::InvalidParameter("every sample count must be at least 3".into()));
    }
    loc.validate()?;
    let truth_proj = cfg.proj();
    let mut sq = vec![vec![0.0; options.len()]; n_values.len()];
    for trial in 0..trials {
        let camp = cfg.with_seed(trial_seed(cfg.seed, trial));
        let (trace, proj) = prepared_trace(&camp, loc)?;
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(loc.seed, trial));
        for (ni, &n) in n_values.iter().enumerate() {
            let chosen = draw_samples(&trace, n, &mut rng);
            for (oi, opt) in options.iter().enumerate() {
                let (tx, rx) = opt.patterns(cfg);
                let model = LocalizationModel {
                    tx,
                    rx,
                    bs_alt_m: cfg.bs.alt_m,
                    carrier: cfg.carrier,
                    proj,
                };
                let est = *model.fixed_point(&chosen, loc.k_iters)?.last().expect("k >= 1");
                sq[ni][oi] += est.distance_error_m(&cfg.bs, &truth_proj).powi(2);
            }
        }
    }
    let mut rows = Vec::with_capacity(n_values.len() * options.len());
    for (oi, &opt) in options.iter().enumerate() {
        for (ni, &n) in n_values.iter().enumerate() {
            rows.push(OfflineRow {
                n_samples: n,
                rmse_m: (sq[ni][oi] / trials as f64).sqrt(),
                pattern: opt,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OnlineRow {
    pub t_s: f64,
    /// RMSE of the fused estimate across trials; NaN until some trial has one.
    pub rmse_m: f64,
    pub pattern: PatternOption,
    pub strategy: SelectionStrategy,
}

/// Online localization error versus flight time for each strategy and
/// pattern option. One row per arrival once the buffer holds M samples.
pub fn experiment_online(
    cfg: &CampaignConfig,
    loc: &LocalizerConfig,
    reverse: bool,
    trials: usize,
    options: &[PatternOption],
    strategies: &[SelectionStrategy],
) -> Result<Vec<OnlineRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    loc.validate()?;
    let base = if reverse { cfg.reversed() } else { cfg.clone() };
    let truth_proj = cfg.proj();
    let traces: Vec<(Vec<Measurement>, ProjectionConfig)> = (0..trials)
        .map(|t| prepared_trace(&base.with_seed(trial_seed(cfg.seed, t)), loc))
        .collect::<Result<_>>()?;

    let mut rows = Vec::new();
    for &opt in options {
        let (tx, rx) = opt.patterns(cfg);
        for &strategy in strategies {
            let mut times: Vec<f64> = Vec::new();
            let mut acc: Vec<(f64, usize)> = Vec::new();
            for (t, (trace, proj)) in traces.iter().enumerate() {
                let run_cfg = LocalizerConfig {
                    selection: strategy,
                    seed: trial_seed(loc.seed, t),
                    ..*loc
                };
                let steps = online_localize(
                    trace,
                    tx,
                    rx,
                    cfg.bs.alt_m,
                    &run_cfg,
                    &base.trajectory.waypoints,
                    &cfg.carrier,
                    proj,
                )?;
                let emitted: Vec<_> = steps.into_iter().filter(|s| s.n_buf >= loc.m_samples).collect();
                if acc.is_empty() {
                    acc = vec![(0.0, 0); emitted.len()];
                    times = emitted.iter().map(|s| s.t_s).collect();
                }
                for (slot, s) in acc.iter_mut().zip(&emitted) {
                    if let Some(w) = s.weighted {
                        slot.0 += w.distance_error_m(&cfg.bs, &truth_proj).powi(2);
                        slot.1 += 1;
                    }
                }
            }
            rows.extend(times.iter().zip(&acc).map(|(&t_s, &(sum, n))| OnlineRow {
                t_s,
                rmse_m: if n > 0 { (sum / n as f64).sqrt() } else { f64::NAN },
                pattern: opt,
                strategy,
            }));
        }
    }
    Ok(rows)
}
