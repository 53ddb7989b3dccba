//! Command-line front end: `simulate`, `localize-offline`, `localize-online`,
//! `estimate-pattern` and `eval`.
//!
//! Settings come from `--config` (or the built-in defaults) with flags
//! layered on top. Every output starts with `#` comment lines holding the
//! subcommand and the full effective settings, seed included, so the file
//! can be regenerated from its own header.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, ErrorClass, Result};
use crate::geo::{GeoPoint, ProjectionConfig};
use crate::harness::{draw_samples, experiment_offline, experiment_online, run_campaign};
use crate::io::config::Settings;
use crate::io::{
    estimated_pattern_csv, load_trace, offline_curve_csv, offline_trace_csv, online_curve_csv, online_trace_csv,
    write_atomic, MeasurementTrace,
};
use crate::locate::{fixed_point_localize, moving_average, online_localize, projection_for, Measurement};
use crate::patternest::estimate_pattern;

#[derive(Parser, Debug)]
#[command(
    name = "uavloc",
    version,
    about = "UAV RSRP channel simulation, antenna-pattern estimation and transmitter localization"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Synthesize a measurement campaign over the configured route.
    Simulate {
        #[command(flatten)]
        site: SiteArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fixed-point localization on N samples drawn from a trace; one row per iteration.
    LocalizeOffline {
        #[command(flatten)]
        site: SiteArgs,
        #[command(flatten)]
        loc: LocArgs,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Replay a trace through the buffered online localizer; one row per arrival.
    LocalizeOnline {
        #[command(flatten)]
        site: SiteArgs,
        #[command(flatten)]
        loc: LocArgs,
        #[arg(long)]
        trace: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Bin a trace's path-loss-corrected RSRP into a combined antenna pattern.
    EstimatePattern {
        #[command(flatten)]
        site: SiteArgs,
        #[arg(long)]
        trace: PathBuf,
        /// Angular bin width in degrees.
        #[arg(long)]
        bin_deg: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded synthetic experiment and write its RMSE curve.
    Eval {
        #[command(flatten)]
        site: SiteArgs,
        #[command(flatten)]
        loc: LocArgs,
        #[arg(long, value_parser = ["offline", "online"], default_value = "offline")]
        experiment: String,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct SiteArgs {
    /// key=value settings file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Log-normal shadowing standard deviation.
    #[arg(long)]
    sigma_db: Option<f64>,
    /// Relative ground permittivity.
    #[arg(long)]
    epsilon0: Option<f64>,
    #[arg(long, value_parser = ["fs", "tworay"])]
    model: Option<String>,
    /// Transmit pattern: isotropic, dipole, directional or a pattern CSV.
    #[arg(long)]
    pattern: Option<String>,
    /// Receive pattern, same forms as --pattern.
    #[arg(long)]
    rx_pattern: Option<String>,
}

#[derive(Args, Debug)]
struct LocArgs {
    /// Sample count.
    #[arg(long)]
    n: Option<usize>,
    /// Fixed-point iterations.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, value_parser = ["random", "equal", "waypoint"])]
    strategy: Option<String>,
}

/// Parses `args` (program name first), runs the workflow and returns the
/// process exit status. Failures print one diagnostic line to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return 0;
        }
        Err(e) => {
            let text = e.render().to_string();
            eprintln!(
                "uavloc: {}",
                text.lines()
                    .next()
                    .unwrap_or("usage error")
                    .trim_start_matches("error: ")
            );
            return 2;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("uavloc: {}", e.to_string().replace('\n', " "));
            match e.class() {
                ErrorClass::Usage => 2,
                ErrorClass::Data => 3,
                ErrorClass::Numerical => 4,
            }
        }
    }
}

/// Flag values are user input, so a rejected one is a usage error.
fn apply(s: &mut Settings, key: &str, value: Option<String>) -> Result<()> {
    let Some(v) = value else { return Ok(()) };
    s.set(key, &v, Path::new(".")).map_err(|e| match e {
        Error::Config(msg) => Error::InvalidParameter(format!("--{}: {msg}", key.rsplit('.').next().unwrap_or(key))),
        other => other,
    })
}

fn settings(site: SiteArgs, loc: Option<LocArgs>) -> Result<Settings> {
    let mut s = match &site.config {
        Some(p) => Settings::load(p)?,
        None => Settings::default(),
    };
    apply(&mut s, "run.seed", site.seed.map(|v| v.to_string()))?;
    apply(&mut s, "channel.sigma_db", site.sigma_db.map(|v| v.to_string()))?;
    apply(&mut s, "ground.epsilon0", site.epsilon0.map(|v| v.to_string()))?;
    apply(&mut s, "channel.model", site.model)?;
    apply(&mut s, "antenna.tx", site.pattern)?;
    apply(&mut s, "antenna.rx", site.rx_pattern)?;
    if let Some(l) = loc {
        apply(&mut s, "localizer.n_samples", l.n.map(|v| v.to_string()))?;
        apply(&mut s, "localizer.k_iters", l.k.map(|v| v.to_string()))?;
        if let Some(n) = l.n {
            s.run.n_sweep = vec![n];
        }
        if let Some(st) = &l.strategy {
            apply(&mut s, "run.strategies", Some(st.clone()))?;
        }
        apply(&mut s, "localizer.selection", l.strategy)?;
    }
    s.validate().map_err(|e| match e {
        Error::Config(msg) => Error::InvalidParameter(msg),
        other => other,
    })?;
    Ok(s)
}

fn header(command: &str, s: &Settings, extra: &[(&str, String)]) -> Vec<String> {
    let mut out = vec![format!("# command={command}")];
    out.extend(extra.iter().map(|(k, v)| format!("# {k}={v}")));
    out.extend(s.to_comments());
    out
}

/// Ground truth recorded in a synthesized trace's header, if any.
fn recorded_truth(trace: &MeasurementTrace) -> Option<(GeoPoint, ProjectionConfig)> {
    let lon = trace.meta("site.bs_lon_deg")?.parse().ok()?;
    let lat = trace.meta("site.bs_lat_deg")?.parse().ok()?;
    let bs = GeoPoint::new(lon, lat, 0.0).ok()?;
    Some((bs, ProjectionConfig::centered_on(&bs)))
}

fn input_trace(path: &Path) -> Result<(MeasurementTrace, Vec<Measurement>)> {
    let trace = load_trace(path)?;
    if trace.rows.is_empty() {
        return Err(Error::EmptyInput);
    }
    let rows = trace.rows.clone();
    Ok((trace, rows))
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Simulate { site, out } => {
            let s = settings(site, None)?;
            let mut trace = MeasurementTrace::new(run_campaign(&s.campaign)?);
            trace.comments = header("simulate", &s, &[]);
            trace.save(&out)
        }
        Command::LocalizeOffline { site, loc, trace, out } => {
            let s = settings(site, Some(loc))?;
            let (input, rows) = input_trace(&trace)?;
            let proj = projection_for(&rows)?;
            let smoothed = moving_average(&rows, s.localizer.ma_window)?;
            let mut rng = ChaCha8Rng::seed_from_u64(s.localizer.seed);
            let chosen = draw_samples(&smoothed, s.localizer.n_samples, &mut rng);
            let c = &s.campaign;
            let iters = fixed_point_localize(&chosen, &c.tx, &c.rx, c.bs.alt_m, &s.localizer, &c.carrier, &proj)?;
            let truth = recorded_truth(&input);
            let comments = header(
                "localize-offline",
                &s,
                &[
                    ("input.trace", trace.display().to_string()),
                    ("input.samples_used", chosen.len().to_string()),
                ],
            );
            write_atomic(
                &out,
                &offline_trace_csv(&comments, &iters, truth.as_ref().map(|(b, p)| (b, p))),
            )
        }
        Command::LocalizeOnline { site, loc, trace, out } => {
            let s = settings(site, Some(loc))?;
            let (input, rows) = input_trace(&trace)?;
            let proj = projection_for(&rows)?;
            let smoothed = moving_average(&rows, s.localizer.ma_window)?;
            let c = &s.campaign;
            let steps = online_localize(
                &smoothed,
                &c.tx,
                &c.rx,
                c.bs.alt_m,
                &s.localizer,
                &c.trajectory.waypoints,
                &c.carrier,
                &proj,
            )?;
            let truth = recorded_truth(&input);
            let comments = header("localize-online", &s, &[("input.trace", trace.display().to_string())]);
            write_atomic(
                &out,
                &online_trace_csv(&comments, &steps, truth.as_ref().map(|(b, p)| (b, p))),
            )
        }
        Command::EstimatePattern {
            site,
            trace,
            bin_deg,
            out,
        } => {
            let mut s = settings(site, None)?;
            apply(&mut s, "run.bin_deg", bin_deg.map(|v| v.to_string()))?;
            let (_, rows) = input_trace(&trace)?;
            let c = &s.campaign;
            let est = estimate_pattern(&rows, &c.bs, &c.carrier, &c.proj(), s.run.bin_deg)?;
            let comments = header("estimate-pattern", &s, &[("input.trace", trace.display().to_string())]);
            write_atomic(&out, &estimated_pattern_csv(&comments, &est))
        }
        Command::Eval {
            site,
            loc,
            experiment,
            trials,
            out,
        } => {
            let mut s = settings(site, Some(loc))?;
            apply(&mut s, "run.trials", trials.map(|v| v.to_string()))?;
            s.validate().map_err(|e| Error::InvalidParameter(e.to_string()))?;
            let comments = header("eval", &s, &[("experiment", experiment.clone())]);
            let text = if experiment == "online" {
                let rows = experiment_online(
                    &s.campaign,
                    &s.localizer,
                    s.run.reverse,
                    s.run.trials,
                    &s.run.patterns,
                    &s.run.strategies,
                )?;
                online_curve_csv(&comments, &rows)
            } else {
                let rows =
                    experiment_offline(&s.campaign, &s.localizer, s.run.trials, &s.run.n_sweep, &s.run.patterns)?;
                offline_curve_csv(&comments, &rows)
            };
            write_atomic(&out, &text)
        }
    }
}
