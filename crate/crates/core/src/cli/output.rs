//! Output encodings shared by all subcommands.

use crate::error::Result;
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

/// The fully resolved configuration of a run.
#[derive(Debug, Clone)]
pub struct Echo {
    command: String,
    entries: Map<String, Value>,
}

impl Echo {
    /// Flattens a serializable argument struct; `None` fields are dropped.
    pub fn new<T: Serialize>(command: &str, args: &T) -> Self {
        let entries = match serde_json::to_value(args).expect("arguments serialize") {
            Value::Object(m) => m.into_iter().filter(|(_, v)| !v.is_null()).collect(),
            _ => Map::new(),
        };
        Self {
            command: command.to_string(),
            entries,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.entries.insert(key.to_string(), value.into());
    }

    pub fn entries(&self) -> &Map<String, Value> {
        &self.entries
    }

    /// Canonical argument list that reproduces the run.
    pub fn command_line(&self) -> String {
        let mut s = self.command.clone();
        for (k, v) in &self.entries {
            let flag = k.replace('_', "-");
            match v {
                Value::Bool(true) => write!(s, " --{flag}").unwrap(),
                Value::Bool(false) | Value::Null => {}
                Value::String(x) => write!(s, " --{flag} {x}").unwrap(),
                Value::Array(xs) => {
                    let joined: Vec<String> = xs.iter().map(plain).collect();
                    write!(s, " --{flag} {}", joined.join(",")).unwrap()
                }
                other => write!(s, " --{flag} {}", plain(other)).unwrap(),
            }
        }
        s
    }

    fn header(&self) -> Vec<String> {
        vec![
            format!("primewave {}", env!("CARGO_PKG_VERSION")),
            format!("command: {}", self.command_line()),
        ]
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// One CSV field.
#[derive(Debug, Clone, Copy)]
pub enum Cell {
    Float(f64),
    Int(i64),
}

impl Cell {
    fn render(self) -> String {
        match self {
            // 17 significant digits: parses back to the same double.
            Cell::Float(x) => format!("{x:.16e}"),
            Cell::Int(n) => n.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::Int(n)
    }
}

impl From<u64> for Cell {
    fn from(n: u64) -> Self {
        Cell::Int(n as i64)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as i64)
    }
}

/// `#` comment header (config echo, then notes), column names, rows.
pub fn csv_bytes<I>(echo: &Echo, notes: &[(String, String)], columns: &[&str], rows: I) -> Vec<u8>
where
    I: IntoIterator<Item = Vec<Cell>>,
{
    let mut out = Vec::new();
    for line in echo.header() {
        writeln!(out, "# {line}").unwrap();
    }
    for (k, v) in notes {
        writeln!(out, "# {k}: {v}").unwrap();
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(columns).unwrap();
    for row in rows {
        w.write_record(row.into_iter().map(Cell::render)).unwrap();
    }
    w.into_inner().expect("in-memory writer")
}

/// Flat JSON object: the resolved configuration followed by the results.
pub fn json_bytes(echo: &Echo, results: Map<String, Value>) -> Vec<u8> {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(echo.command.clone()));
    for (k, v) in echo.entries() {
        m.insert(k.clone(), v.clone());
    }
    for (k, v) in results {
        m.insert(k, v);
    }
    let mut out = serde_json::to_vec_pretty(&Value::Object(m)).unwrap();
    out.push(b'\n');
    out
}

/// Serializes a report struct into a flat map, renaming nothing.
pub fn to_map<T: Serialize>(value: &T) -> Map<String, Value> {
    match serde_json::to_value(value).expect("report serializes") {
        Value::Object(m) => m,
        _ => Map::new(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    Lines,
    Points,
    Bars,
}

#[derive(Debug, Clone)]
pub struct Curve {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub kind: PlotKind,
    pub curves: Vec<Curve>,
}

const PALETTE: [&str; 6] = ["#111111", "#8a8a8a", "#1f5fa8", "#b8322a", "#2e8b57", "#8e44ad"];
const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 44.0;
const BOTTOM: f64 = 56.0;

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Static SVG with a frame, extreme-value tick labels and one path per curve.
pub fn svg_bytes(echo: &Echo, plot: &Plot) -> Vec<u8> {
    let finite = plot
        .curves
        .iter()
        .flat_map(|c| c.points.iter())
        .filter(|(x, y)| x.is_finite() && y.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in finite {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if plot.kind == PlotKind::Bars {
        y0 = y0.min(0.0);
    }
    if !(x1 > x0) {
        x0 -= 0.5;
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y0 -= 0.5;
        y1 = y0 + 1.0;
    }
    let (pw, ph) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let sx = |x: f64| LEFT + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| TOP + (y1 - y) / (y1 - y0) * ph;

    let mut s = String::new();
    writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    for line in echo.header() {
        writeln!(s, "<!-- {} -->", escape(&line).replace("--", "- -")).unwrap();
    }
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .unwrap();
    let text = |s: &mut String, x: f64, y: f64, anchor: &str, body: &str| {
        writeln!(
            s,
            r#"<text x="{x:.1}" y="{y:.1}" font-family="sans-serif" font-size="13" text-anchor="{anchor}">{}</text>"#,
            escape(body)
        )
        .unwrap();
    };
    text(&mut s, WIDTH / 2.0, 26.0, "middle", &plot.title);
    text(&mut s, LEFT, HEIGHT - BOTTOM + 18.0, "start", &format!("{x0:.4}"));
    text(&mut s, WIDTH - RIGHT, HEIGHT - BOTTOM + 18.0, "end", &format!("{x1:.4}"));
    text(&mut s, WIDTH / 2.0, HEIGHT - 14.0, "middle", &plot.x_label);
    text(&mut s, LEFT - 6.0, TOP + 12.0, "end", &format!("{y1:.4}"));
    text(&mut s, LEFT - 6.0, HEIGHT - BOTTOM, "end", &format!("{y0:.4}"));
    text(&mut s, 16.0, TOP + ph / 2.0, "start", &plot.y_label);

    for (k, c) in plot.curves.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        match plot.kind {
            PlotKind::Lines => {
                let mut d = String::new();
                let mut pen_down = false;
                for &(x, y) in &c.points {
                    if !(x.is_finite() && y.is_finite()) {
                        pen_down = false;
                        continue;
                    }
                    let cmd = if pen_down { 'L' } else { 'M' };
                    write!(d, "{cmd}{:.2} {:.2}", sx(x), sy(y)).unwrap();
                    pen_down = true;
                }
                writeln!(s, r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="0.7"/>"#).unwrap();
            }
            PlotKind::Points => {
                for &(x, y) in c.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                    writeln!(s, r#"<circle cx="{:.2}" cy="{:.2}" r="3" fill="{color}"/>"#, sx(x), sy(y)).unwrap();
                }
            }
            PlotKind::Bars => {
                let w = if c.points.len() > 1 {
                    (sx(c.points[1].0) - sx(c.points[0].0)).abs()
                } else {
                    pw / 10.0
                };
                for &(x, y) in c.points.iter().filter(|(x, y)| x.is_finite() && y.is_finite()) {
                    let (top, base) = (sy(y), sy(0f64.max(y0)));
                    writeln!(
                        s,
                        r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{color}" stroke="white" stroke-width="0.5"/>"#,
                        sx(x) - w / 2.0,
                        top.min(base),
                        w,
                        (base - top).abs()
                    )
                    .unwrap();
                }
            }
        }
        if plot.curves.len() > 1 {
            let ly = TOP + 18.0 + 16.0 * k as f64;
            writeln!(
                s,
                r#"<line x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-width="2"/>"#,
                WIDTH - RIGHT - 190.0,
                ly - 4.0,
                WIDTH - RIGHT - 170.0,
                ly - 4.0
            )
            .unwrap();
            text(&mut s, WIDTH - RIGHT - 164.0, ly, "start", &c.name);
        }
    }
    writeln!(s, "</svg>").unwrap();
    s.into_bytes()
}

/// Writes to `path` via a temporary file in the same directory, or to stdout.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(p) => {
            let dir = match p.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(bytes)?;
            #[cfg(unix)]
            {
                use std::os::unix::fs::PermissionsExt;
                tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
            }
            tmp.as_file().sync_all()?;
            tmp.persist(p).map_err(|e| e.error)?;
        }
    }
    Ok(())
}
