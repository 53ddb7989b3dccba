use super::fmt_num;
use crate::geo::{GeoPoint, ProjectionConfig};
use crate::harness::{OfflineRow, OnlineRow};
use crate::locate::{LocEstimate, OnlineStep};
use crate::patternest::EstimatedPattern;

fn with_comments(comments: &[String], header: &str) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(header);
    out.push('\n');
    out
}

/// Visited bins as `az_deg,el_deg,gain_db,count`.
pub fn estimated_pattern_csv(comments: &[String], est: &EstimatedPattern) -> String {
    let mut out = with_comments(comments, "az_deg,el_deg,gain_db,count");
    for (a, g, n) in est.visited() {
        out.push_str(&format!(
            "{},{},{},{n}\n",
            fmt_num(a.az_deg),
            fmt_num(a.el_deg),
            fmt_num(g)
        ));
    }
    out
}

/// One row per fixed-point iteration; `error_m` only when the truth is known.
pub fn offline_trace_csv(
    comments: &[String],
    trace: &[LocEstimate],
    truth: Option<(&GeoPoint, &ProjectionConfig)>,
) -> String {
    let header = if truth.is_some() {
        "iter,est_lon_deg,est_lat_deg,error_m"
    } else {
        "iter,est_lon_deg,est_lat_deg"
    };
    let mut out = with_comments(comments, header);
    for (k, e) in trace.iter().enumerate() {
        out.push_str(&format!("{},{},{}", k + 1, fmt_num(e.lon_deg), fmt_num(e.lat_deg)));
        if let Some((bs, proj)) = truth {
            out.push(',');
            out.push_str(&fmt_num(e.distance_error_m(bs, proj)));
        }
        out.push('\n');
    }
    out
}

/// Fused estimate after every arrival that has one. `weight` and
/// `residual_m2` describe that arrival's own solve (NaN when it produced
/// none); `rmse_m` is present only when the truth is known.
pub fn online_trace_csv(
    comments: &[String],
    steps: &[OnlineStep],
    truth: Option<(&GeoPoint, &ProjectionConfig)>,
) -> String {
    let header = if truth.is_some() {
        "t_s,est_lon_deg,est_lat_deg,weight,residual_m2,rmse_m"
    } else {
        "t_s,est_lon_deg,est_lat_deg,weight,residual_m2"
    };
    let mut out = with_comments(comments, header);
    for s in steps {
        let Some(w) = s.weighted else { continue };
        let (mu, res) = s.step.map_or((f64::NAN, f64::NAN), |st| (st.weight, st.residual_m2));
        let mut cells = vec![
            fmt_num(s.t_s),
            fmt_num(w.lon_deg),
            fmt_num(w.lat_deg),
            fmt_num(mu),
            fmt_num(res),
        ];
        if let Some((bs, proj)) = truth {
            cells.push(fmt_num(w.distance_error_m(bs, proj)));
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn offline_curve_csv(comments: &[String], rows: &[OfflineRow]) -> String {
    let mut out = with_comments(comments, "n_samples,rmse_m,pattern");
    for r in rows {
        out.push_str(&format!("{},{},{}\n", r.n_samples, fmt_num(r.rmse_m), r.pattern));
    }
    out
}

pub fn online_curve_csv(comments: &[String], rows: &[OnlineRow]) -> String {
    let mut out = with_comments(comments, "t_s,rmse_m,pattern,strategy");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            fmt_num(r.t_s),
            fmt_num(r.rmse_m),
            r.pattern,
            r.strategy
        ));
    }
    out
}
