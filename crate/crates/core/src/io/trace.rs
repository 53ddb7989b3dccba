use std::path::Path;

use serde::Deserialize;

use super::{fmt_num, read_to_string, write_atomic};
use crate::error::{Error, Result};
use crate::geo::GeoPoint;
use crate::locate::Measurement;

pub const TRACE_HEADER: &str = "t_s,lon_deg,lat_deg,alt_m,rsrp_dbm";

/// A measurement file: leading `#` comment lines (kept verbatim) and
/// time-ordered rows.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasurementTrace {
    /// Comment lines including the leading `#`.
    pub comments: Vec<String>,
    pub rows: Vec<Measurement>,
}

#[derive(Deserialize)]
struct Row {
    t_s: f64,
    lon_deg: f64,
    lat_deg: f64,
    alt_m: f64,
    rsrp_dbm: f64,
}

impl MeasurementTrace {
    pub fn new(rows: Vec<Measurement>) -> Self {
        MeasurementTrace {
            comments: Vec::new(),
            rows,
        }
    }

    /// Appends a `# key=value` comment.
    pub fn push_meta(&mut self, key: &str, value: impl std::fmt::Display) {
        self.comments.push(format!("# {key}={value}"));
    }

    /// Value of the first `# key=value` comment with this key.
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let (k, v) = c.trim_start_matches('#').split_once('=')?;
            (k.trim() == key).then(|| v.trim())
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for m in &self.rows {
            let cells = [m.t_s, m.uav.lon_deg, m.uav.lat_deg, m.uav.alt_m, m.rsrp_dbm].map(fmt_num);
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.to_csv())
    }
}

pub fn parse_trace(text: &str) -> Result<MeasurementTrace> {
    let mut comments = Vec::new();
    let mut body_start = 0;
    for line in text.split_inclusive('\n') {
        if line.starts_with('#') {
            comments.push(line.trim_end_matches(['\n', '\r']).to_string());
            body_start += line.len();
        } else {
            break;
        }
    }

    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[body_start..]);
    let headers = rdr.headers().map_err(|e| Error::schema(None, e.to_string()))?.clone();
    for col in TRACE_HEADER.split(',') {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::schema(None, format!("missing column '{col}'")));
        }
    }

    let mut rows: Vec<Measurement> = Vec::new();
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let n = i + 1;
        let r = rec.map_err(|e| Error::schema(Some(n), e.to_string()))?;
        let values = [r.t_s, r.lon_deg, r.lat_deg, r.alt_m, r.rsrp_dbm];
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let col = TRACE_HEADER.split(',').nth(pos).unwrap_or("?");
            return Err(Error::schema(Some(n), format!("non-finite {col}")));
        }
        let uav = GeoPoint::new(r.lon_deg, r.lat_deg, r.alt_m).map_err(|e| Error::schema(Some(n), e.to_string()))?;
        if let Some(prev) = rows.last() {
            if r.t_s < prev.t_s {
                return Err(Error::schema(
                    Some(n),
                    format!("time goes backwards ({} after {})", r.t_s, prev.t_s),
                ));
            }
        }
        rows.push(Measurement {
            t_s: r.t_s,
            uav,
            rsrp_dbm: r.rsrp_dbm,
        });
    }
    Ok(MeasurementTrace { comments, rows })
}

pub fn load_trace(path: &Path) -> Result<MeasurementTrace> {
    parse_trace(&read_to_string(path)?)
}
