use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{fmt_num, read_to_string};
use crate::antenna::TabulatedPattern;
use crate::error::{Error, Result};

#[derive(Deserialize)]
struct Row {
    az_deg: f64,
    el_deg: f64,
    gain_dbi: f64,
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::MalformedPattern(msg.into())
}

/// Parses `az_deg,el_deg,gain_dbi` rows into a complete grid; the axes are
/// the distinct sorted angle values.
pub fn parse_pattern(text: &str) -> Result<TabulatedPattern> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    // keys are the exact bit patterns so that duplicates are detected exactly
    let mut cells: BTreeMap<(u64, u64), f64> = BTreeMap::new();
    let mut az = Vec::new();
    let mut el = Vec::new();
    for (i, rec) in rdr.deserialize::<Row>().enumerate() {
        let r = rec.map_err(|e| malformed(format!("row {}: {e}", i + 1)))?;
        if !(r.az_deg.is_finite() && r.el_deg.is_finite() && r.gain_dbi.is_finite()) {
            return Err(malformed(format!("row {}: non-finite value", i + 1)));
        }
        // normalize -0.0 so it does not form its own axis value
        let (a, e) = (r.az_deg + 0.0, r.el_deg + 0.0);
        if cells.insert((a.to_bits(), e.to_bits()), r.gain_dbi).is_some() {
            return Err(malformed(format!("duplicate cell az={a} el={e}")));
        }
        az.push(a);
        el.push(e);
    }
    for axis in [&mut az, &mut el] {
        axis.sort_by(f64::total_cmp);
        axis.dedup();
    }
    if cells.len() != az.len() * el.len() {
        return Err(malformed(format!(
            "incomplete grid: {} cells for {} azimuths x {} elevations",
            cells.len(),
            az.len(),
            el.len()
        )));
    }
    let mut gains = Vec::with_capacity(cells.len());
    for a in &az {
        for e in &el {
            gains.push(cells[&(a.to_bits(), e.to_bits())]);
        }
    }
    TabulatedPattern::new(az, el, gains)
}

pub fn load_pattern(path: &Path) -> Result<TabulatedPattern> {
    parse_pattern(&read_to_string(path)?)
}

pub fn pattern_csv(p: &TabulatedPattern) -> String {
    let mut out = String::from("az_deg,el_deg,gain_dbi\n");
    for (i, a) in p.az_grid().iter().enumerate() {
        for (j, e) in p.el_grid().iter().enumerate() {
            out.push_str(&format!(
                "{},{},{}\n",
                fmt_num(*a),
                fmt_num(*e),
                fmt_num(p.node_dbi(i, j))
            ));
        }
    }
    out
}
