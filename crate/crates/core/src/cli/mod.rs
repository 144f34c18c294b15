//! The `primewave` command line.
//!
//! Every output starts with a config echo whose `command:` line replays the
//! run. Usage errors exit with status 2, failures inside the analysis with 3;
//! both print one `error: kind=… message=…` line on stderr.

mod figures;
pub mod ingest;
pub mod output;

use crate::error::{domain, Error, Result};
use crate::fractal::{box_dimension, default_grid_sizes};
use crate::primes::{sieve, PrimeTable};
use crate::regularity::{default_scales, holder_exponent_oscillation, holder_upper_bound_check};
use crate::selfsim::{affine_similarity_residual, residue_sums, value_at_reciprocal};
use crate::series::{derivative_converges, eval_v, eval_v_derivative, sample_graph, Angular, Component, SampledGraph, SeriesParams};
use crate::stochastic::{clt_experiment, walk, CltConfig, Family, Normalization, WalkSpec};
use crate::zeta::{prime_power_sum_estimate, prime_zeta, prime_zeta_direct};
use clap::{Args, Parser, Subcommand, ValueEnum};
use output::{csv_bytes, emit, json_bytes, svg_bytes, to_map, Cell, Curve, Echo, Format, Plot, PlotKind};
use serde::Serialize;
use serde_json::{json, Map, Value};
use std::path::PathBuf;
use std::process::ExitCode;

pub use figures::Figure;

#[derive(Debug, Parser)]
#[command(name = "primewave", version, about = "Prime trigonometric series toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate V_{α,β}(n, t) at one point.
    Eval(EvalArgs),
    /// Sample V_{α,β}(n, ·) on a uniform grid.
    Graph(GraphArgs),
    /// m-th derivative of the partial sum at one point.
    Deriv(DerivArgs),
    /// Prime zeta function P(α).
    Zeta(ZetaArgs),
    /// Box-counting dimension of a graph.
    Boxdim(BoxdimArgs),
    /// Local Hölder exponent estimates.
    Holder(HolderArgs),
    /// Residue-class decomposition and affine self-similarity.
    Selfsim(SelfsimArgs),
    /// Monte-Carlo central-limit experiment.
    Clt(CltArgs),
    /// Partial sums Σ sin(ω n_k x).
    Walk(WalkArgs),
    /// Regenerate the data and plots of the reference figures.
    Figures(FiguresArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentArg {
    Complex,
    Real,
    Imag,
}

impl From<ComponentArg> for Component {
    fn from(c: ComponentArg) -> Self {
        match c {
            ComponentArg::Complex => Component::Complex,
            ComponentArg::Real => Component::RealPart,
            ComponentArg::Imag => Component::ImagPart,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularArg {
    /// exp(iπ n t)
    Pi,
    /// exp(2πi n t)
    TwoPi,
}

impl From<AngularArg> for Angular {
    fn from(a: AngularArg) -> Self {
        match a {
            AngularArg::Pi => Angular::Pi,
            AngularArg::TwoPi => Angular::TwoPi,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutputOpts {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeriesOpts {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: f64,
    /// Largest prime included.
    #[arg(long)]
    pub nmax: u64,
    #[arg(long, value_enum, default_value_t = ComponentArg::Complex)]
    pub component: ComponentArg,
    #[arg(long, value_enum, default_value_t = AngularArg::TwoPi)]
    pub angular: AngularArg,
}

impl SeriesOpts {
    fn params(&self) -> Result<SeriesParams> {
        Ok(SeriesParams::new(self.alpha, self.beta, self.nmax)?
            .with_component(self.component.into())
            .with_angular(self.angular.into()))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub series: SeriesOpts,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub series: SeriesOpts,
    #[arg(long)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t_start: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t_end: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DerivArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub series: SeriesOpts,
    #[arg(long, allow_hyphen_values = true)]
    pub t: f64,
    #[arg(long, default_value_t = 1)]
    pub order: u32,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaMethodArg {
    /// Explicit primes plus the Möbius series for the tail.
    Moebius,
    /// Explicit primes only, with a tail estimate.
    Direct,
    /// Integral approximation of Σ_{p≤N} p^-α (any α).
    Estimate,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ZetaArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: f64,
    /// Primes up to this bound are summed explicitly.
    #[arg(long, default_value_t = 1_000_000)]
    pub nmax: u64,
    #[arg(long, value_enum, default_value_t = ZetaMethodArg::Moebius)]
    pub method: ZetaMethodArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

/// A graph given either by series parameters or by a CSV file.
#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphInput {
    /// Read `t,re[,im]` samples from a CSV file.
    #[arg(long, conflicts_with_all = ["alpha", "beta", "nmax"])]
    pub input: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub nmax: Option<u64>,
    #[arg(long, default_value_t = 1 << 15)]
    pub points: usize,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub t_start: f64,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub t_end: f64,
    #[arg(long, value_enum, default_value_t = ComponentArg::Real)]
    pub component: ComponentArg,
    #[arg(long, value_enum, default_value_t = AngularArg::TwoPi)]
    pub angular: AngularArg,
}

impl GraphInput {
    fn series_params(&self) -> Result<Option<SeriesParams>> {
        match (self.alpha, self.beta, self.nmax) {
            (Some(a), Some(b), Some(n)) => Ok(Some(
                SeriesParams::new(a, b, n)?
                    .with_component(self.component.into())
                    .with_angular(self.angular.into()),
            )),
            (None, None, None) => Ok(None),
            _ => domain("give all of --alpha, --beta, --nmax or none"),
        }
    }

    fn load(&self) -> Result<SampledGraph> {
        if let Some(path) = &self.input {
            return ingest::read_graph(path);
        }
        match self.series_params()? {
            Some(p) => sample_graph(&p, &sieve(p.n_max)?, self.t_start, self.t_end, self.points),
            None => domain("give --input or the series parameters --alpha, --beta, --nmax"),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoxdimArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphInput,
    /// Grid sizes N (default 16, 32, …, 2048).
    #[arg(long, value_delimiter = ',')]
    pub grid_sizes: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HolderMethodArg {
    /// Slope of ln osc(ε) against ln ε.
    Oscillation,
    /// Gabor coefficients at isolated frequencies (series input only).
    Gabor,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HolderArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub graph: GraphInput,
    #[arg(long, allow_hyphen_values = true)]
    pub t0: f64,
    #[arg(long, value_enum, default_value_t = HolderMethodArg::Oscillation)]
    pub method: HolderMethodArg,
    /// Oscillation scales (default 2^-4 … 2^-12).
    #[arg(long, value_delimiter = ',')]
    pub scales: Option<Vec<f64>>,
    /// Zero-based prime indices for the Gabor method.
    #[arg(long, value_delimiter = ',')]
    pub m_list: Option<Vec<usize>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SelfsimArgs {
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub nmax: u64,
    /// Grid points on [0, 1) for the affine residual.
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    PowersOfTwo,
    Integers,
    Primes,
    PrimePowers,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizationArg {
    ByN,
    BySqrtN,
}

impl From<NormalizationArg> for Normalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::ByN => Normalization::ByN,
            NormalizationArg::BySqrtN => Normalization::BySqrtN,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FamilyOpts {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Exponent for the prime-powers family.
    #[arg(long, default_value_t = 1.5)]
    pub beta: f64,
    #[arg(long)]
    pub nterms: usize,
    #[arg(long, value_enum, default_value_t = AngularArg::Pi)]
    pub angular: AngularArg,
}

impl FamilyOpts {
    fn family(&self) -> Family {
        match self.family {
            FamilyArg::PowersOfTwo => Family::PowersOfTwo,
            FamilyArg::Integers => Family::Integers,
            FamilyArg::Primes => Family::Primes,
            FamilyArg::PrimePowers => Family::PrimePowers(self.beta),
        }
    }

    fn table(&self) -> Result<PrimeTable> {
        match self.family {
            FamilyArg::Primes | FamilyArg::PrimePowers => table_for_terms(self.nterms),
            _ => sieve(2),
        }
    }
}

/// A table holding at least the first `n` primes (p_n < n(ln n + ln ln n) for n ≥ 6).
pub(crate) fn table_for_terms(n: usize) -> Result<PrimeTable> {
    let nf = n.max(6) as f64;
    sieve((nf * (nf.ln() + nf.ln().ln())).ceil() as u64)
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CltArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyOpts,
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value_t = NormalizationArg::BySqrtN)]
    pub normalization: NormalizationArg,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Histogram bins (default ⌈√samples⌉).
    #[arg(long)]
    pub bins: Option<usize>,
    /// Evaluate at −x for each drawn x.
    #[arg(long)]
    pub mirrored: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct WalkArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub family: FamilyOpts,
    #[arg(long, allow_hyphen_values = true)]
    pub x: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub out: OutputOpts,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FiguresArgs {
    #[arg(long, value_enum)]
    pub target: Figure,
    /// Directory receiving figN.csv and figN.svg.
    #[arg(long, default_value = ".")]
    #[serde(skip)]
    pub outdir: PathBuf,
}

/// Usage errors (invalid parameters) exit with 2, all other failures with 3.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Domain(_) => 2,
        _ => 3,
    }
}

fn error_line(kind: &str, message: &str) -> String {
    let flat = message.split_whitespace().collect::<Vec<_>>().join(" ");
    format!("error: kind={kind} message={}", serde_json::to_string(&flat).unwrap())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("PRIMEWAVE_THREADS") else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n >= 1 => n,
        _ => return domain(format!("PRIMEWAVE_THREADS must be a positive integer, got {raw:?}")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Consistency(format!("thread pool: {e}")))
}

/// Parses the process arguments, runs the command and maps the outcome to an exit code.
pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!("{}", error_line("usage", &e.render().to_string()));
            return ExitCode::from(2);
        }
    };
    let outcome = configure_threads().and_then(|_| run(&cli.command));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_line(e.kind(), &e.to_string()));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn resolve(out: &OutputOpts, echo: &mut Echo, default: Format, allowed: &[Format]) -> Result<Format> {
    let f = out.format.unwrap_or(default);
    if !allowed.contains(&f) {
        return domain(format!("format {f:?} is not available for this command"));
    }
    echo.set(
        "format",
        match f {
            Format::Csv => "csv",
            Format::Json => "json",
            Format::Svg => "svg",
        },
    );
    Ok(f)
}

fn f(x: f64) -> Value {
    json!(x)
}

pub fn run(command: &Command) -> Result<()> {
    match command {
        Command::Eval(a) => run_eval(a),
        Command::Graph(a) => run_graph(a),
        Command::Deriv(a) => run_deriv(a),
        Command::Zeta(a) => run_zeta(a),
        Command::Boxdim(a) => run_boxdim(a),
        Command::Holder(a) => run_holder(a),
        Command::Selfsim(a) => run_selfsim(a),
        Command::Clt(a) => run_clt(a),
        Command::Walk(a) => run_walk(a),
        Command::Figures(a) => figures::run(a.target, &a.outdir),
    }
}

fn point_report(echo: &Echo, format: Format, t: f64, re: f64, im: f64, extra: Map<String, Value>) -> Vec<u8> {
    match format {
        Format::Csv => csv_bytes(echo, &[], &["t", "re", "im"], [vec![t.into(), re.into(), im.into()]]),
        _ => {
            let mut m = Map::new();
            m.insert("re".into(), f(re));
            m.insert("im".into(), f(im));
            m.insert("abs".into(), f(re.hypot(im)));
            m.extend(extra);
            json_bytes(echo, m)
        }
    }
}

fn run_eval(a: &EvalArgs) -> Result<()> {
    let mut echo = Echo::new("eval", a);
    let format = resolve(&a.out, &mut echo, Format::Json, &[Format::Json, Format::Csv])?;
    let p = a.series.params()?;
    let z = p.project(eval_v(&p, &sieve(p.n_max)?, a.t)?);
    emit(a.out.output.as_deref(), &point_report(&echo, format, a.t, z.re, z.im, Map::new()))
}

fn run_deriv(a: &DerivArgs) -> Result<()> {
    let mut echo = Echo::new("deriv", a);
    let format = resolve(&a.out, &mut echo, Format::Json, &[Format::Json, Format::Csv])?;
    let p = a.series.params()?;
    let z = p.project(eval_v_derivative(&p, &sieve(p.n_max)?, a.t, a.order)?);
    let mut extra = Map::new();
    extra.insert("series_converges".into(), Value::Bool(derivative_converges(&p, a.order)));
    emit(a.out.output.as_deref(), &point_report(&echo, format, a.t, z.re, z.im, extra))
}

pub(crate) fn graph_csv(echo: &Echo, notes: &[(String, String)], g: &SampledGraph) -> Vec<u8> {
    let rows = g
        .times()
        .zip(g.values())
        .map(|(t, z)| vec![Cell::from(t), z.re.into(), z.im.into()]);
    csv_bytes(echo, notes, &["t", "re", "im"], rows)
}

fn run_graph(a: &GraphArgs) -> Result<()> {
    let mut echo = Echo::new("graph", a);
    let format = resolve(&a.out, &mut echo, Format::Csv, &[Format::Csv, Format::Svg])?;
    let p = a.series.params()?;
    let g = sample_graph(&p, &sieve(p.n_max)?, a.t_start, a.t_end, a.points)?;
    let bytes = match format {
        Format::Csv => graph_csv(&echo, &[], &g),
        _ => {
            let curve = |name: &str, pick: fn(&num_complex::Complex64) -> f64| Curve {
                name: name.into(),
                points: g.times().zip(g.values()).map(|(t, z)| (t, pick(z))).collect(),
            };
            let mut curves = vec![curve("re", |z| z.re)];
            if p.component == Component::Complex {
                curves.push(curve("im", |z| z.im));
            }
            let plot = Plot {
                title: format!("V(α={}, β={}, n={})", p.alpha, p.beta, p.n_max),
                x_label: "t".into(),
                y_label: "V".into(),
                kind: PlotKind::Lines,
                curves,
            };
            svg_bytes(&echo, &plot)
        }
    };
    emit(a.out.output.as_deref(), &bytes)
}

fn run_zeta(a: &ZetaArgs) -> Result<()> {
    let mut echo = Echo::new("zeta", a);
    let format = resolve(&a.out, &mut echo, Format::Json, &[Format::Json, Format::Csv])?;
    let report = match a.method {
        ZetaMethodArg::Moebius => prime_zeta(a.alpha, &sieve(a.nmax)?)?,
        ZetaMethodArg::Direct => prime_zeta_direct(a.alpha, &sieve(a.nmax)?)?,
        ZetaMethodArg::Estimate => prime_power_sum_estimate(a.alpha, a.nmax)?,
    };
    let bytes = match format {
        Format::Csv => {
            let method = to_map(&report)["method"].as_str().unwrap_or_default().to_string();
            csv_bytes(
                &echo,
                &[("method".into(), method)],
                &["alpha", "value", "truncation_bound", "tail_estimate"],
                [vec![
                    a.alpha.into(),
                    report.value.into(),
                    report.truncation_bound.into(),
                    report.tail_estimate.into(),
                ]],
            )
        }
        _ => json_bytes(&echo, to_map(&report)),
    };
    emit(a.out.output.as_deref(), &bytes)
}

fn run_boxdim(a: &BoxdimArgs) -> Result<()> {
    let mut echo = Echo::new("boxdim", a);
    let format = resolve(&a.out, &mut echo, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let g = a.graph.load()?;
    let sizes = a.grid_sizes.clone().unwrap_or_else(default_grid_sizes);
    let r = box_dimension(&g, &sizes)?;
    let mut summary = Map::new();
    summary.insert("dimension".into(), f(r.dimension));
    summary.insert("dimension_stderr".into(), f(r.dimension_stderr));
    summary.insert("fit_r2".into(), f(r.fit_r2));
    summary.insert("coarse_excluded".into(), Value::Bool(r.coarse_excluded));
    summary.insert("resolution_warning".into(), Value::Bool(r.resolution_warning));
    summary.insert("out_of_band".into(), Value::Bool(r.out_of_band));
    summary.extend(to_map(&r.bounding_box));
    let bytes = match format {
        Format::Csv => {
            let notes: Vec<(String, String)> = summary.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
            let rows = r.grid_sizes.iter().zip(&r.occupied).map(|(&n, &m)| vec![Cell::from(n), m.into()]);
            csv_bytes(&echo, &notes, &["N", "M"], rows)
        }
        Format::Json => json_bytes(&echo, summary),
        Format::Svg => svg_bytes(
            &echo,
            &Plot {
                title: format!("box counting, slope {:.4}", r.dimension),
                x_label: "ln N".into(),
                y_label: "ln M".into(),
                kind: PlotKind::Points,
                curves: vec![Curve {
                    name: "M(N)".into(),
                    points: r
                        .grid_sizes
                        .iter()
                        .zip(&r.occupied)
                        .map(|(&n, &m)| ((n as f64).ln(), (m as f64).ln()))
                        .collect(),
                }],
            },
        ),
    };
    emit(a.out.output.as_deref(), &bytes)
}

fn run_holder(a: &HolderArgs) -> Result<()> {
    let mut echo = Echo::new("holder", a);
    let format = resolve(&a.out, &mut echo, Format::Json, &[Format::Json, Format::Csv])?;
    let bytes = match a.method {
        HolderMethodArg::Oscillation => {
            let g = a.graph.load()?;
            let scales = a.scales.clone().unwrap_or_else(default_scales);
            let e = holder_exponent_oscillation(&g, a.t0, &scales)?;
            let mut m = to_map(&e);
            m.remove("scales_used");
            m.insert("scales_count".into(), json!(e.scales_used.len()));
            match format {
                Format::Csv => {
                    let notes: Vec<(String, String)> = m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect();
                    csv_bytes(&echo, &notes, &["scale"], e.scales_used.iter().map(|&s| vec![Cell::from(s)]))
                }
                _ => json_bytes(&echo, m),
            }
        }
        HolderMethodArg::Gabor => {
            let Some(p) = a.graph.series_params()? else {
                return domain("the gabor method needs --alpha, --beta and --nmax");
            };
            let Some(m_list) = &a.m_list else {
                return domain("the gabor method needs --m-list");
            };
            // Bertrand: the neighbour of any prime ≤ n_max lies below 2 n_max.
            let table = sieve(2 * p.n_max + 2)?;
            let report = holder_upper_bound_check(&p, &table, m_list, a.t0)?;
            match format {
                Format::Csv => {
                    let notes = vec![
                        ("empirical_bound".to_string(), report.empirical_bound.to_string()),
                        ("alpha_over_beta".to_string(), report.alpha_over_beta.to_string()),
                    ];
                    let rows = report.rows.iter().map(|r| {
                        vec![
                            Cell::from(r.m),
                            r.p.into(),
                            r.theta.into(),
                            r.abs_g.into(),
                            r.expected.into(),
                            r.relative_error.into(),
                            r.exponent_bound.into(),
                        ]
                    });
                    csv_bytes(
                        &echo,
                        &notes,
                        &["m", "p", "theta", "abs_g", "expected", "relative_error", "exponent_bound"],
                        rows,
                    )
                }
                _ => {
                    let mut m = Map::new();
                    m.insert("empirical_bound".into(), f(report.empirical_bound));
                    m.insert("alpha_over_beta".into(), f(report.alpha_over_beta));
                    let worst = report.rows.iter().map(|r| r.relative_error).fold(0.0, f64::max);
                    m.insert("max_relative_error".into(), f(worst));
                    json_bytes(&echo, m)
                }
            }
        }
    };
    emit(a.out.output.as_deref(), &bytes)
}

fn run_selfsim(a: &SelfsimArgs) -> Result<()> {
    let mut echo = Echo::new("selfsim", a);
    let format = resolve(&a.out, &mut echo, Format::Json, &[Format::Json, Format::Csv, Format::Svg])?;
    let table = sieve(a.nmax)?;
    let bytes = match format {
        Format::Json => {
            let d = residue_sums(&table, a.q, a.nmax)?;
            let r = value_at_reciprocal(&table, a.q, a.nmax)?;
            let mut m = Map::new();
            for (l, s) in &d.sums {
                m.insert(format!("r_{l}"), f(*s));
            }
            m.insert("predicted".into(), f(d.predicted));
            m.insert("total".into(), f(d.total));
            m.insert("relative_deviation".into(), f(d.relative_deviation()));
            m.insert("value_direct".into(), f(r.direct));
            m.insert("value_residue".into(), f(r.residue));
            m.insert("value_difference".into(), f(r.difference));
            if a.q >= 3 {
                let s = affine_similarity_residual(&table, a.q, a.nmax, a.points)?;
                m.insert("value_range".into(), f(s.value_range));
                for (prefix, res) in [("residual", s.residual), ("alternate", s.alternate)] {
                    m.insert(format!("{prefix}_rms"), f(res.rms));
                    m.insert(format!("{prefix}_max_abs"), f(res.max_abs));
                    m.insert(format!("{prefix}_normalized_rms"), json!(res.normalized_rms));
                }
            }
            json_bytes(&echo, m)
        }
        _ => {
            let (ts, scaled, affine) = figures::similarity_curves(&table, a.q, a.nmax, a.points)?;
            if format == Format::Csv {
                let rows = (0..ts.len()).map(|i| vec![Cell::from(ts[i]), scaled[i].into(), affine[i].into()]);
                csv_bytes(&echo, &[], &["t", "scaled", "affine"], rows)
            } else {
                svg_bytes(&echo, &figures::similarity_plot(a.q, a.nmax, &ts, &scaled, &affine))
            }
        }
    };
    emit(a.out.output.as_deref(), &bytes)
}

pub(crate) fn histogram_csv(echo: &Echo, notes: &[(String, String)], hist: &[(f64, u64)]) -> Vec<u8> {
    csv_bytes(echo, notes, &["bin_center", "count"], hist.iter().map(|&(c, n)| vec![Cell::from(c), n.into()]))
}

pub(crate) fn histogram_plot(title: String, hist: &[(f64, u64)]) -> Plot {
    Plot {
        title,
        x_label: "normalized sum".into(),
        y_label: "count".into(),
        kind: PlotKind::Bars,
        curves: vec![Curve {
            name: "count".into(),
            points: hist.iter().map(|&(c, n)| (c, n as f64)).collect(),
        }],
    }
}

pub(crate) fn clt_notes(r: &crate::stochastic::CltReport) -> Vec<(String, String)> {
    let mut m = to_map(r);
    m.remove("histogram");
    m.into_iter().map(|(k, v)| (k, v.to_string())).collect()
}

fn run_clt(a: &CltArgs) -> Result<()> {
    let mut echo = Echo::new("clt", a);
    let format = resolve(&a.out, &mut echo, Format::Csv, &[Format::Csv, Format::Json, Format::Svg])?;
    let mut cfg = CltConfig::new(a.family.family(), a.family.nterms, a.samples, a.normalization.into(), a.seed);
    cfg.angular = a.family.angular.into();
    cfg.bins = a.bins;
    cfg.mirrored = a.mirrored;
    let r = clt_experiment(&cfg, &a.family.table()?)?;
    let bytes = match format {
        Format::Csv => histogram_csv(&echo, &clt_notes(&r), &r.histogram),
        Format::Json => json_bytes(&echo, to_map(&r)),
        Format::Svg => svg_bytes(&echo, &histogram_plot(format!("{} sums, N={}", r.family, r.n_terms), &r.histogram)),
    };
    emit(a.out.output.as_deref(), &bytes)
}

fn run_walk(a: &WalkArgs) -> Result<()> {
    let mut echo = Echo::new("walk", a);
    let format = resolve(&a.out, &mut echo, Format::Csv, &[Format::Csv, Format::Svg])?;
    let spec = WalkSpec {
        family: a.family.family(),
        n_terms: a.family.nterms,
        x: a.x,
        angular: a.family.angular.into(),
    };
    let w = walk(&spec, &a.family.table()?)?;
    let bytes = match format {
        Format::Csv => csv_bytes(
            &echo,
            &[],
            &["k", "s"],
            w.iter().enumerate().map(|(k, &s)| vec![Cell::from(k + 1), s.into()]),
        ),
        _ => svg_bytes(
            &echo,
            &Plot {
                title: format!("partial sums, {} at x={}", spec.family.name(), a.x),
                x_label: "k".into(),
                y_label: "S(x, k)".into(),
                kind: PlotKind::Lines,
                curves: vec![Curve {
                    name: "S".into(),
                    points: w.iter().enumerate().map(|(k, &s)| ((k + 1) as f64, s)).collect(),
                }],
            },
        ),
    };
    emit(a.out.output.as_deref(), &bytes)
}
