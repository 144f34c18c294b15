//! Reading sampled graphs back from CSV.

use crate::error::{Error, Result};
use crate::series::{grid_time, GraphSource, SampledGraph};
use num_complex::Complex64;
use std::path::Path;

fn parse_err(origin: &str, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{origin}: {msg}"))
}

/// Parses `t,re[,im]` (or `t,value`) rows, skipping `#` comments. The
/// times must form a uniform grid including both endpoints.
pub fn parse_graph(text: &str, origin: &str) -> Result<SampledGraph> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| parse_err(origin, e))?.clone();
    let find = |names: &[&str]| headers.iter().position(|h| names.contains(&h));
    let t_col = find(&["t", "x"]).ok_or_else(|| parse_err(origin, "missing t column"))?;
    let re_col = find(&["re", "value", "y"]).ok_or_else(|| parse_err(origin, "missing re/value column"))?;
    let im_col = find(&["im"]);

    let mut ts = Vec::new();
    let mut values = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(origin, e))?;
        let num = |col: usize| -> Result<f64> {
            let field = rec.get(col).ok_or_else(|| parse_err(origin, format!("row {}: missing field", line + 1)))?;
            field
                .parse::<f64>()
                .map_err(|e| parse_err(origin, format!("row {}: {field:?}: {e}", line + 1)))
        };
        ts.push(num(t_col)?);
        let im = match im_col {
            Some(c) => num(c)?,
            None => 0.0,
        };
        values.push(Complex64::new(num(re_col)?, im));
    }
    if ts.len() < 2 {
        return Err(parse_err(origin, "need at least two samples"));
    }
    let (t0, t1, n) = (ts[0], ts[ts.len() - 1], ts.len());
    let tol = 1e-9 * (t1 - t0).abs().max(f64::MIN_POSITIVE);
    for (i, &t) in ts.iter().enumerate() {
        if (t - grid_time(t0, t1, n, i)).abs() > tol {
            return Err(parse_err(origin, format!("row {}: t = {t} breaks the uniform grid", i + 1)));
        }
    }
    SampledGraph::new(t0, t1, values, GraphSource::External { path: origin.to_string() })
}

pub fn read_graph(path: &Path) -> Result<SampledGraph> {
    let text = std::fs::read_to_string(path)?;
    parse_graph(&text, &path.display().to_string())
}
