//! End-to-end acceptance checks. Each test writes one
//! `criterion N <name>: PASS|FAIL (...)` line straight to stderr, so the
//! verdicts show up even when libtest captures output.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uavloc::antenna::{AntennaPattern, TabulatedPattern};
use uavloc::geo::{haversine_distance, horizontal_distance, GeoPoint, LinkGeometry, ProjectionConfig};
use uavloc::harness::{draw_samples, experiment_offline, run_campaign, CampaignConfig, PatternOption};
use uavloc::locate::{
    build_ls_system, fixed_point_localize, moving_average, online_localize, projection_for, solve_ls, LocEstimate,
    LocalizerConfig, Measurement,
};
use uavloc::patternest::{estimate_pattern, pattern_error};
use uavloc::propagation::{
    free_space_gain, path_loss_db, reflection_coefficient, synthesize_rsrp, two_ray_gain, CarrierConfig, GroundParams,
    PropagationModel, ShadowingModel,
};

fn report(n: u32, name: &str, pass: bool, detail: impl AsRef<str>) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr().lock(),
        "criterion {n:>2} {name}: {verdict} ({})",
        detail.as_ref()
    );
}

const ISO: AntennaPattern = AntennaPattern::Isotropic;

/// Double-double number `hi + lo`, enough to carry the reflected-ray phase
/// (up to ~1e3 rad at short range) to well below 1e-16 rad.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd(s, (a - (s - bb)) + (b - bb))
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd(p, a.mul_add(b, -p))
}

impl Dd {
    fn of(x: f64) -> Dd {
        Dd(x, 0.0)
    }
    fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.0, o.0);
        two_sum(s.0, s.1 + self.1 + o.1)
    }
    fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.0, o.0);
        two_sum(p.0, p.1 + self.0 * o.1 + self.1 * o.0)
    }
    fn div(self, o: Dd) -> Dd {
        let q1 = self.0 / o.0;
        let r = self.add(o.mul(Dd::of(-q1)));
        let q2 = r.0 / o.0;
        let r = r.add(o.mul(Dd::of(-q2)));
        two_sum(q1, q2).add(Dd::of(r.0 / o.0))
    }
    fn sqrt(self) -> Dd {
        let x = self.0.sqrt();
        let p = two_prod(x, x);
        let r = self.add(Dd(-p.0, -p.1));
        two_sum(x, r.0 / (2.0 * x))
    }
}

/// Two-ray gain straight from its defining expression: lengths and phase in
/// double-double, the field sum in complex arithmetic.
fn two_ray_direct(d_h: f64, h_bs: f64, h_uav: f64, eps: f64, lambda: f64) -> f64 {
    let dh2 = Dd::of(d_h).mul(Dd::of(d_h));
    let diff = two_sum(h_uav, -h_bs);
    let sum = two_sum(h_uav, h_bs);
    let d3 = dh2.add(diff.mul(diff)).sqrt();
    let d_refl = dh2.add(sum.mul(sum)).sqrt();
    // d_refl - d3 = ((h_uav + h_bs)^2 - (h_uav - h_bs)^2) / (d_refl + d3)
    let delta = sum.mul(sum).add(diff.mul(diff).mul(Dd::of(-1.0))).div(d_refl.add(d3));
    let cycles = delta.div(Dd::of(lambda));
    let frac = cycles.add(Dd::of(-cycles.0.round()));
    let phase = 2.0 * PI * (frac.0 + frac.1);

    let theta = ((h_uav + h_bs) / d_h).atan();
    let root = Complex64::new(eps - theta.cos().powi(2), 0.0).sqrt();
    let gamma = (eps * theta.sin() - root) / (eps * theta.sin() + root);
    let field = Complex64::new(1.0 / d3.0, 0.0) + gamma * Complex64::new(0.0, -phase).exp() / d_refl.0;
    (lambda / (4.0 * PI)).powi(2) * field.norm_sqr()
}

#[test]
fn criterion_01_two_ray_oracle() {
    let start = Instant::now();
    let c = CarrierConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let d_h = rng.random_range(10.0..=5000.0);
        let h_uav = rng.random_range(30.0..=110.0);
        let eps = rng.random_range(3.0..=30.0);
        let az = rng.random_range(0.0..360.0);
        let g = LinkGeometry::from_local(d_h, az, 10.0, h_uav).unwrap();
        let gp = GroundParams::new(eps).unwrap();
        let got = two_ray_gain(&g, &ISO, &ISO, &c, &gp).unwrap();
        let want = two_ray_direct(d_h, 10.0, h_uav, eps, c.lambda_m);
        worst = worst.max(((got - want) / want).abs());
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && elapsed < Duration::from_secs(5);
    report(
        1,
        "two-ray oracle equivalence",
        pass,
        format!("max rel err {worst:.2e} <= 1e-12, {elapsed:.2?} < 5 s"),
    );
    assert!(pass);
}

#[test]
fn criterion_02_reflection_coefficient() {
    let mut notes = Vec::new();
    let mut pass = true;
    for eps in [3.0, 15.0, 30.0] {
        let gp = GroundParams::new(eps).unwrap();
        let g = reflection_coefficient(0.001, &gp);
        let ok = (g + 1.0).abs() <= 1e-4;
        pass &= ok;
        notes.push(format!(
            "eps {eps}: |G(0.001)+1| = {:.2e}{}",
            (g + 1.0).abs(),
            if ok { "" } else { " > 1e-4" }
        ));

        // bisection for the sign change of Γ over (0, 90) degrees
        let (mut lo, mut hi) = (1e-6, 90.0);
        assert!(reflection_coefficient(lo, &gp) < 0.0 && reflection_coefficient(hi, &gp) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if reflection_coefficient(mid, &gp) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * (lo + hi);
        let closed = (1.0 / (eps + 1.0).sqrt()).asin().to_degrees();
        let ok = (root - closed).abs() <= 0.01;
        pass &= ok;
        notes.push(format!("zero at {root:.6} vs {closed:.6} deg"));
    }
    let g90 = reflection_coefficient(90.0, &GroundParams::new(15.0).unwrap());
    let ok = (g90 - 0.58959).abs() <= 1e-5;
    pass &= ok;
    notes.push(format!(
        "G(90, 15) = {g90:.7} vs 0.58959 (|diff| {:.2e}{})",
        (g90 - 0.58959).abs(),
        if ok { "" } else { " > 1e-5" }
    ));
    report(2, "reflection coefficient", pass, notes.join("; "));
    assert!(pass);
}

#[test]
fn criterion_03_free_space() {
    let c = CarrierConfig::new(3.51e9, 10.0).unwrap();
    let g = LinkGeometry::from_local(100.0, 0.0, 10.0, 10.0).unwrap();
    let gain_db = 10.0 * free_space_gain(&g, &ISO, &ISO, &c).unwrap().log10();
    let closed = -20.0 * (4.0 * PI * 100.0 / c.lambda_m).log10();
    let pl = path_loss_db(free_space_gain(&g, &ISO, &ISO, &c).unwrap()).unwrap();
    let pass = (gain_db + 83.36).abs() <= 0.01 && (gain_db - closed).abs() < 1e-9 && (pl + gain_db).abs() < 1e-9;
    report(
        3,
        "free-space gain",
        pass,
        format!("{gain_db:.4} dB vs -83.36 +- 0.01, closed form {closed:.4} dB"),
    );
    assert!(pass);
}

#[test]
fn criterion_04_projection_accuracy() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    while pairs < 10_000 {
        let psi0 = rng.random_range(-45.0..=45.0);
        let proj = ProjectionConfig::new(psi0, 6_378_137.0).unwrap();
        let a = GeoPoint::new(
            rng.random_range(-179.0..179.0),
            psi0 + rng.random_range(-0.05..=0.05),
            0.0,
        )
        .unwrap();
        let d = rng.random_range(1.0..=3000.0);
        let bearing: f64 = rng.random_range(0.0..2.0 * PI);
        let b = proj.offset_point(&a, d * bearing.sin(), d * bearing.cos());
        if (b.lat_deg - psi0).abs() > 0.05 {
            continue;
        }
        let hav = haversine_distance(&a, &b, &proj);
        let flat = horizontal_distance(&a, &b, &proj);
        worst = worst.max(((flat - hav) / hav).abs());
        pairs += 1;
    }
    let pass = worst < 1e-3;
    report(
        4,
        "projection accuracy",
        pass,
        format!(
            "max rel err {:.4}% < 0.1% over {pairs} pairs, |lat| <= 45.05",
            worst * 100.0
        ),
    );
    assert!(pass);
}

/// Moving average over the whole trace, then N random samples: the same
/// preparation the CLI applies.
fn prepared_draw(trace: &[Measurement], loc: &LocalizerConfig, seed: u64) -> (Vec<Measurement>, ProjectionConfig) {
    let proj = projection_for(trace).unwrap();
    let smoothed = moving_average(trace, loc.ma_window).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (draw_samples(&smoothed, loc.n_samples, &mut rng), proj)
}

#[test]
fn criterion_05_exact_recovery() {
    let start = Instant::now();
    let cfg = CampaignConfig {
        model: PropagationModel::FreeSpace,
        tx: ISO,
        rx: ISO,
        ..Default::default()
    };
    let loc = LocalizerConfig {
        n_samples: 300,
        k_iters: 50,
        ..Default::default()
    };
    let trace = run_campaign(&cfg).unwrap();
    let (chosen, proj) = prepared_draw(&trace, &loc, 0);
    let iters = fixed_point_localize(&chosen, &cfg.tx, &cfg.rx, cfg.bs.alt_m, &loc, &cfg.carrier, &proj).unwrap();
    let err = iters.last().unwrap().distance_error_m(&cfg.bs, &cfg.proj());
    let identical = iters[1..].iter().all(|e| *e == iters[1]);
    let elapsed = start.elapsed();
    let pass = err < 1.0 && identical && iters.len() == 50 && elapsed < Duration::from_secs(10);
    report(
        5,
        "exact localization recovery",
        pass,
        format!("error {err:.3} m < 1 m, iterations 2..50 identical: {identical}, {elapsed:.2?} < 10 s"),
    );
    assert!(pass);
}

/// First iteration from which every later step changes the error by less
/// than 0.1 m (1-based), if any.
fn stabilized_at(errors: &[f64]) -> Option<usize> {
    let mut k = errors.len();
    while k >= 2 && (errors[k - 1] - errors[k - 2]).abs() < 0.1 {
        k -= 1;
    }
    (k < errors.len()).then_some(k)
}

#[test]
fn criterion_06_iterative_convergence() {
    let cfg = CampaignConfig {
        model: PropagationModel::TwoRay,
        ..Default::default()
    };
    assert!(matches!(cfg.tx, AntennaPattern::Tabulated(_)));
    let loc = LocalizerConfig::default();
    let trace = run_campaign(&cfg).unwrap();
    let truth = cfg.proj();
    let mut ok = 0;
    let mut latest = 0;
    for seed in 0..50 {
        let (chosen, proj) = prepared_draw(&trace, &loc, seed);
        let iters = fixed_point_localize(&chosen, &cfg.tx, &cfg.rx, cfg.bs.alt_m, &loc, &cfg.carrier, &proj).unwrap();
        let errors: Vec<f64> = iters.iter().map(|e| e.distance_error_m(&cfg.bs, &truth)).collect();
        if let Some(k) = stabilized_at(&errors).filter(|&k| k <= 20) {
            ok += 1;
            latest = latest.max(k);
        }
    }
    let pass = ok >= 45;
    report(
        6,
        "iterative convergence",
        pass,
        format!("{ok}/50 seeds stable by k <= 20 (latest k = {latest}), need >= 45"),
    );
    assert!(pass);
}

#[test]
fn criterion_07_pattern_knowledge_ordering() {
    let cfg = CampaignConfig::default();
    assert!(matches!(cfg.tx, AntennaPattern::Tabulated(_)));
    let mut ok = 0;
    for seed in 0..50 {
        let loc = LocalizerConfig {
            seed,
            ..Default::default()
        };
        let rows = experiment_offline(
            &cfg.with_seed(seed),
            &loc,
            1,
            &[300],
            &[PatternOption::Matched, PatternOption::Isotropic],
        )
        .unwrap();
        if rows[0].rmse_m < rows[1].rmse_m {
            ok += 1;
        }
    }
    let pass = ok >= 45;
    report(
        7,
        "pattern-knowledge ordering",
        pass,
        format!("matched < isotropic in {ok}/50 seeds, need >= 45"),
    );
    assert!(pass);
}

#[test]
fn criterion_08_pattern_estimation_round_trip() {
    let bs = GeoPoint::new(-78.696, 35.727, 10.0).unwrap();
    let proj = ProjectionConfig::centered_on(&bs);
    let c = CarrierConfig::default();
    let gp = GroundParams::default();
    let tx = uavloc::harness::directional_pattern();
    let az: Vec<f64> = (0..36).map(|i| i as f64 * 10.0).collect();
    let el: Vec<f64> = (0..19).map(|j| -90.0 + j as f64 * 10.0).collect();
    let rx = AntennaPattern::Tabulated(
        TabulatedPattern::from_fn(az, el, |a, e| 2.0 * (a.to_radians()).cos() - 0.05 * e.abs()).unwrap(),
    );
    // UAV positions whose line of sight passes through 1° bin centers, at
    // two ranges per direction so each bin averages two samples
    let mut meas = Vec::new();
    let mut quiet = ShadowingModel::none().stream();
    for i in 0..40 {
        let az = 0.5 + 9.0 * i as f64;
        for el in (0..14).map(|j| 2.5 + 5.0 * j as f64) {
            for d_h in [250.0, 900.0] {
                let h = bs.alt_m + d_h * el.to_radians().tan();
                let uav = proj
                    .offset_point(&bs, d_h * az.to_radians().sin(), d_h * az.to_radians().cos())
                    .with_alt(h);
                let g = uavloc::geo::link_geometry(&bs, &uav, &proj).unwrap();
                let r = synthesize_rsrp(&g, PropagationModel::FreeSpace, &tx, &rx, &c, &gp, &mut quiet).unwrap();
                meas.push(Measurement {
                    t_s: meas.len() as f64,
                    uav,
                    rsrp_dbm: r.rsrp_dbm,
                });
            }
        }
    }
    let est = estimate_pattern(&meas, &bs, &c, &proj, 1.0).unwrap();
    let worst = pattern_error(&tx, &rx, &est).unwrap().max().unwrap();
    let visited = est.visited().count();
    let total = est.total_count();
    let pass = worst < 1e-9 && total == meas.len();
    report(
        8,
        "pattern-estimation round trip",
        pass,
        format!(
            "max bin error {worst:.2e} dB < 1e-9 over {visited} bins, counts {total} == {}",
            meas.len()
        ),
    );
    assert!(pass);
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Counter-clockwise convex hull (monotone chain), collinear points dropped.
fn hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let mut h: Vec<(f64, f64)> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = h.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while h.len() >= start + 2 && cross(h[h.len() - 2], h[h.len() - 1], q) <= 0.0 {
                h.pop();
            }
            h.push(q);
        }
        h.pop();
    }
    h
}

/// Distance (degrees) by which `q` lies outside the hull; 0 when inside.
fn outside_by(h: &[(f64, f64)], q: (f64, f64)) -> f64 {
    let seg = |a: (f64, f64), b: (f64, f64)| {
        let (dx, dy) = (b.0 - a.0, b.1 - a.1);
        let len2 = dx * dx + dy * dy;
        let t = if len2 > 0.0 {
            (((q.0 - a.0) * dx + (q.1 - a.1) * dy) / len2).clamp(0.0, 1.0)
        } else {
            0.0
        };
        (q.0 - a.0 - t * dx).hypot(q.1 - a.1 - t * dy)
    };
    match h.len() {
        0 => f64::INFINITY,
        1 => seg(h[0], h[0]),
        2 => seg(h[0], h[1]),
        n => {
            let inside = (0..n).all(|i| cross(h[i], h[(i + 1) % n], q) >= 0.0);
            if inside {
                0.0
            } else {
                (0..n).map(|i| seg(h[i], h[(i + 1) % n])).fold(f64::INFINITY, f64::min)
            }
        }
    }
}

#[test]
fn criterion_09_online_behavior() {
    let cfg = CampaignConfig::default().reversed();
    let truth = cfg.proj();
    let trace = run_campaign(&cfg).unwrap();
    let proj = projection_for(&trace).unwrap();
    let mut improved = 0;
    let mut worst_outside: f64 = 0.0;
    let mut checked_steps = 0;
    for seed in 0..50 {
        let loc = LocalizerConfig {
            m_samples: 10,
            n_max: 10_000,
            seed,
            ..Default::default()
        };
        let smoothed = moving_average(&trace, loc.ma_window).unwrap();
        let steps = online_localize(
            &smoothed,
            &cfg.tx,
            &cfg.rx,
            cfg.bs.alt_m,
            &loc,
            &cfg.trajectory.waypoints,
            &cfg.carrier,
            &proj,
        )
        .unwrap();
        let mut per_step: Vec<(f64, f64)> = Vec::new();
        let mut first = None;
        let mut last = None;
        for s in &steps {
            if let Some(st) = s.step {
                per_step.push((st.est.lon_deg, st.est.lat_deg));
            }
            if let Some(w) = s.weighted {
                let err = w.distance_error_m(&cfg.bs, &truth);
                first.get_or_insert(err);
                last = Some(err);
                worst_outside = worst_outside.max(outside_by(&hull(&per_step), (w.lon_deg, w.lat_deg)));
                checked_steps += 1;
            }
        }
        if last.unwrap() <= first.unwrap() {
            improved += 1;
        }
    }
    // the fused update is a convex combination; allow only float rounding
    // (1e-12 degrees is about 0.1 micrometre)
    let in_hull = worst_outside <= 1e-12;
    let pass = improved >= 45 && in_hull;
    report(
        9,
        "online behavior",
        pass,
        format!(
            "final <= first in {improved}/50 seeds (need >= 45); max hull excursion {worst_outside:.1e} deg over {checked_steps} steps"
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_ls_vs_grid() {
    let c = CarrierConfig::default();
    let gp = GroundParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut ok = 0;
    let mut tightest = f64::INFINITY;
    for trial in 0..100 {
        let bs = GeoPoint::new(rng.random_range(-120.0..120.0), rng.random_range(-60.0..60.0), 10.0).unwrap();
        let proj = ProjectionConfig::centered_on(&bs);
        let mut noise = ShadowingModel::new(3.0, trial).unwrap().stream();
        let samples: Vec<Measurement> = (0..6)
            .map(|i| {
                let uav = proj
                    .offset_point(&bs, rng.random_range(-800.0..800.0), rng.random_range(-800.0..800.0))
                    .with_alt(rng.random_range(30.0..110.0));
                let g = uavloc::geo::link_geometry(&bs, &uav, &proj).unwrap();
                let r = synthesize_rsrp(&g, PropagationModel::FreeSpace, &ISO, &ISO, &c, &gp, &mut noise).unwrap();
                Measurement {
                    t_s: i as f64,
                    uav,
                    rsrp_dbm: r.rsrp_dbm,
                }
            })
            .collect();
        let sys = build_ls_system(&samples, &[(1.0, 1.0); 6], bs.alt_m, &c, &proj).unwrap();
        let est = solve_ls(&sys).unwrap();
        let ls = sys.objective(&est);
        // 201 x 201 lattice spanning +-1 km around the truth
        let step = 10.0 / proj.meters_per_deg();
        let mut best = f64::INFINITY;
        for i in -100..=100 {
            for j in -100..=100 {
                let cand = LocEstimate {
                    lon_deg: bs.lon_deg + i as f64 * step / proj.cos_psi0(),
                    lat_deg: bs.lat_deg + j as f64 * step,
                };
                best = best.min(sys.objective(&cand));
            }
        }
        if ls <= best {
            ok += 1;
        }
        tightest = tightest.min(best - ls);
    }
    let pass = ok == 100;
    report(
        10,
        "LS vs grid oracle",
        pass,
        format!("{ok}/100 instances with LS objective <= grid best (smallest margin {tightest:.3e})"),
    );
    assert!(pass);
}

fn cli(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_uavloc"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

#[test]
fn criterion_11_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(
        d.join("site.cfg"),
        "[channel]\nsigma_db = 2\n[run]\nseed = 5\ntrials = 2\nn_sweep = 10, 100\n",
    )
    .unwrap();
    let runs: [&[&str]; 6] = [
        &["simulate", "--config", "site.cfg", "--out", "OUT"],
        &[
            "localize-offline",
            "--config",
            "site.cfg",
            "--trace",
            "trace.csv",
            "--n",
            "300",
            "--k",
            "50",
            "--out",
            "OUT",
        ],
        &[
            "localize-online",
            "--config",
            "site.cfg",
            "--trace",
            "trace.csv",
            "--strategy",
            "random",
            "--out",
            "OUT",
        ],
        &[
            "estimate-pattern",
            "--config",
            "site.cfg",
            "--trace",
            "trace.csv",
            "--out",
            "OUT",
        ],
        &[
            "eval",
            "--config",
            "site.cfg",
            "--experiment",
            "offline",
            "--out",
            "OUT",
        ],
        &[
            "eval",
            "--config",
            "site.cfg",
            "--experiment",
            "online",
            "--strategy",
            "equal",
            "--out",
            "OUT",
        ],
    ];
    let mut identical = 0;
    let mut failures = Vec::new();
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let name = if i == 0 && rep == 0 {
                "trace.csv".to_string()
            } else {
                format!("out{i}_{rep}.csv")
            };
            let argv: Vec<&str> = args
                .iter()
                .map(|a| if *a == "OUT" { name.as_str() } else { a })
                .collect();
            let out = cli(&argv, d);
            if !out.status.success() {
                failures.push(format!("{}: {}", args[0], String::from_utf8_lossy(&out.stderr).trim()));
            }
            outputs.push(std::fs::read(d.join(&name)).unwrap_or_default());
        }
        if !outputs[0].is_empty() && outputs[0] == outputs[1] {
            identical += 1;
        }
    }
    let pass = identical == runs.len() && failures.is_empty();
    report(
        11,
        "determinism",
        pass,
        format!(
            "{identical}/{} reruns byte-identical{}",
            runs.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    );
    assert!(pass);
}
