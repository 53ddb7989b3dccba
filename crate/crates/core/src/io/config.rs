//! Run configuration from a key=value file.
//!
//! Keys live either under `[section]` headers or as dotted `section.key`
//! names; both spellings are equivalent. Anything not set keeps the built-in
//! default site and localizer settings.
//!
//! ```text
//! [site]
//! id = campus
//! bs_lon_deg = -78.696
//! bs_lat_deg = 35.727
//! channel.model = tworay
//! ```

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

use super::{load_pattern, read_to_string};
use crate::antenna::AntennaPattern;
use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::harness::{directional_pattern, CampaignConfig, PatternOption};
use crate::locate::{LocalizerConfig, SelectionStrategy};
use crate::propagation::{CarrierConfig, GroundParams};

/// Experiment-level knobs that are not part of the campaign or localizer.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub trials: usize,
    pub n_sweep: Vec<usize>,
    /// Fly the route from its last waypoint to its first.
    pub reverse: bool,
    pub bin_deg: f64,
    pub patterns: Vec<PatternOption>,
    pub strategies: Vec<SelectionStrategy>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            trials: 1,
            n_sweep: vec![10, 20, 50, 100, 200, 300],
            reverse: true,
            bin_deg: 1.0,
            patterns: PatternOption::ALL.to_vec(),
            strategies: SelectionStrategy::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub site_id: String,
    pub campaign: CampaignConfig,
    pub localizer: LocalizerConfig,
    pub run: RunConfig,
    /// How the antenna patterns were specified (a keyword or a file path).
    pub tx_source: String,
    pub rx_source: String,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            site_id: "default".into(),
            campaign: CampaignConfig::default(),
            localizer: LocalizerConfig::default(),
            run: RunConfig::default(),
            tx_source: "directional".into(),
            rx_source: "isotropic".into(),
        }
    }
}

fn bad(key: &str, value: &str, why: impl Display) -> Error {
    Error::Config(format!("{key} = '{value}': {why}"))
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: Display,
{
    value.trim().parse().map_err(|e| bad(key, value, e))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>>
where
    T::Err: Display,
{
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| num(key, s))
        .collect()
}

fn boolean(key: &str, value: &str) -> Result<bool> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

/// `lon lat; lon lat; ...`
fn waypoints(key: &str, value: &str) -> Result<Vec<GeoPoint>> {
    value
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|pair| {
            let v: Vec<f64> = pair
                .split([' ', ','])
                .filter(|s| !s.is_empty())
                .map(|s| num(key, s))
                .collect::<Result<_>>()?;
            match v[..] {
                [lon, lat] => GeoPoint::new(lon, lat, 0.0).map_err(|e| bad(key, pair, e)),
                _ => Err(bad(key, pair, "expected 'lon lat'")),
            }
        })
        .collect()
}

/// `isotropic`, `dipole`, `directional`, or a pattern CSV path relative to `base`.
pub fn resolve_pattern(spec: &str, base: &Path) -> Result<AntennaPattern> {
    match spec.trim().to_ascii_lowercase().as_str() {
        "isotropic" => Ok(AntennaPattern::Isotropic),
        "dipole" => Ok(AntennaPattern::Dipole),
        "directional" => Ok(directional_pattern()),
        _ => {
            let p = PathBuf::from(spec.trim());
            let p = if p.is_absolute() { p } else { base.join(p) };
            Ok(AntennaPattern::Tabulated(load_pattern(&p)?))
        }
    }
}

impl Settings {
    pub fn load(path: &Path) -> Result<Settings> {
        let text = read_to_string(path).map_err(|e| Error::Config(e.to_string()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Settings::parse(&text, base)
    }

    /// Parses config text; relative pattern paths resolve against `base`.
    pub fn parse(text: &str, base: &Path) -> Result<Settings> {
        let ini = Ini::load_from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let mut s = Settings::default();
        for (section, props) in ini.iter() {
            for (k, v) in props.iter() {
                let key = match section {
                    Some(sec) => format!("{sec}.{k}"),
                    None => k.to_string(),
                };
                s.set(&key, v, base)?;
            }
        }
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        self.campaign.validate()?;
        self.localizer.validate()?;
        if self.run.trials == 0 {
            return Err(Error::Config("run.trials must be at least 1".into()));
        }
        Ok(())
    }

    /// Applies one `section.key = value` setting.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> Result<()> {
        let c = &mut self.campaign;
        let l = &mut self.localizer;
        let r = &mut self.run;
        match key.trim().to_ascii_lowercase().as_str() {
            "site.id" => self.site_id = value.trim().to_string(),
            "site.bs_lon_deg" => c.bs.lon_deg = num(key, value)?,
            "site.bs_lat_deg" => c.bs.lat_deg = num(key, value)?,
            "site.bs_alt_m" => c.bs.alt_m = num(key, value)?,
            "carrier.freq_hz" => {
                c.carrier =
                    CarrierConfig::new(num(key, value)?, c.carrier.tx_power_dbm).map_err(|e| bad(key, value, e))?
            }
            "carrier.tx_power_dbm" => {
                c.carrier = CarrierConfig::new(c.carrier.freq_hz, num(key, value)?).map_err(|e| bad(key, value, e))?
            }
            "ground.epsilon0" => c.ground = GroundParams::new(num(key, value)?).map_err(|e| bad(key, value, e))?,
            "channel.model" => c.model = value.parse().map_err(|e| bad(key, value, e))?,
            "channel.sigma_db" => c.sigma_db = num(key, value)?,
            "flight.height_m" => c.trajectory.height_m = num(key, value)?,
            "flight.speed_mps" => c.trajectory.speed_mps = num(key, value)?,
            "flight.sample_period_s" => c.trajectory.sample_period_s = num(key, value)?,
            "flight.waypoints" => c.trajectory.waypoints = waypoints(key, value)?,
            "antenna.tx" => {
                c.tx = resolve_pattern(value, base)?;
                self.tx_source = value.trim().to_string();
            }
            "antenna.rx" => {
                c.rx = resolve_pattern(value, base)?;
                self.rx_source = value.trim().to_string();
            }
            "localizer.k_iters" => l.k_iters = num(key, value)?,
            "localizer.n_samples" => l.n_samples = num(key, value)?,
            "localizer.m_samples" => l.m_samples = num(key, value)?,
            "localizer.n_max" => l.n_max = num(key, value)?,
            "localizer.selection" => l.selection = value.parse().map_err(|e| bad(key, value, e))?,
            "localizer.ma_window" => l.ma_window = num(key, value)?,
            "run.seed" => {
                let seed = num(key, value)?;
                c.seed = seed;
                l.seed = seed;
            }
            "run.trials" => r.trials = num(key, value)?,
            "run.n_sweep" => r.n_sweep = list(key, value)?,
            "run.reverse" => r.reverse = boolean(key, value)?,
            "run.bin_deg" => r.bin_deg = num(key, value)?,
            "run.patterns" => r.patterns = list(key, value)?,
            "run.strategies" => r.strategies = list(key, value)?,
            other => return Err(Error::Config(format!("unknown setting '{other}'"))),
        }
        Ok(())
    }

    /// Every effective setting as `# key=value` lines, in a form
    /// [`Settings::parse`] accepts once the `# ` prefix is stripped.
    pub fn to_comments(&self) -> Vec<String> {
        let c = &self.campaign;
        let l = &self.localizer;
        let r = &self.run;
        let wps: Vec<String> = c
            .trajectory
            .waypoints
            .iter()
            .map(|w| format!("{} {}", w.lon_deg, w.lat_deg))
            .collect();
        let join = |v: Vec<String>| v.join(",");
        let pairs: Vec<(&str, String)> = vec![
            ("site.id", self.site_id.clone()),
            ("site.bs_lon_deg", c.bs.lon_deg.to_string()),
            ("site.bs_lat_deg", c.bs.lat_deg.to_string()),
            ("site.bs_alt_m", c.bs.alt_m.to_string()),
            ("carrier.freq_hz", c.carrier.freq_hz.to_string()),
            ("carrier.tx_power_dbm", c.carrier.tx_power_dbm.to_string()),
            ("ground.epsilon0", c.ground.epsilon0.to_string()),
            ("channel.model", c.model.to_string()),
            ("channel.sigma_db", c.sigma_db.to_string()),
            ("flight.height_m", c.trajectory.height_m.to_string()),
            ("flight.speed_mps", c.trajectory.speed_mps.to_string()),
            ("flight.sample_period_s", c.trajectory.sample_period_s.to_string()),
            ("flight.waypoints", wps.join("; ")),
            ("antenna.tx", self.tx_source.clone()),
            ("antenna.rx", self.rx_source.clone()),
            ("localizer.k_iters", l.k_iters.to_string()),
            ("localizer.n_samples", l.n_samples.to_string()),
            ("localizer.m_samples", l.m_samples.to_string()),
            ("localizer.n_max", l.n_max.to_string()),
            ("localizer.selection", l.selection.to_string()),
            ("localizer.ma_window", l.ma_window.to_string()),
            ("run.seed", c.seed.to_string()),
            ("run.trials", r.trials.to_string()),
            ("run.n_sweep", join(r.n_sweep.iter().map(|n| n.to_string()).collect())),
            ("run.reverse", r.reverse.to_string()),
            ("run.bin_deg", r.bin_deg.to_string()),
            ("run.patterns", join(r.patterns.iter().map(|p| p.to_string()).collect())),
            (
                "run.strategies",
                join(r.strategies.iter().map(|p| p.to_string()).collect()),
            ),
        ];
        pairs.into_iter().map(|(k, v)| format!("# {k}={v}")).collect()
    }
}
