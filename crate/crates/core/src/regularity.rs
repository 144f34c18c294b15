//! Local regularity: a Gabor wavelet transform that isolates single
//! frequencies of the prime series, and an oscillation-scaling estimator of
//! the local Hölder exponent.
//!
//! The analysing window φ is defined through its Fourier transform, the
//! smooth bump `φ̂(u) = exp(1 − 1/(1 − u²))` on (−1, 1). With that choice
//!
//! ```text
//! G(a, b, λ) = (1/a) ∫ f(t) e^{−iλt} φ((t − b)/a) dt
//! ```
//!
//! maps a term `c e^{iνt}` of `f` to `c e^{i(ν−λ)b} φ̂((λ − ν) a)`, which
//! vanishes whenever `|ν − λ| a ≥ 1`.

use crate::error::{domain, Error, Result};
use crate::fit::fit_line;
use crate::primes::PrimeTable;
use crate::quad::GaussLegendre;
use crate::series::{Component, GraphSource, PrimeSeries, SampledGraph, SeriesParams};
use crate::trig::{sin_cos_turns, Frequency};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

const WINDOW_STEP: f64 = 1.0 / 64.0;
const WINDOW_SEARCH_LIMIT: f64 = 640.0;
/// Absolute mass of φ allowed outside the tabulated support.
const WINDOW_TAIL_MASS: f64 = 1e-8;

/// Tabulated analysing window φ (real and even), normalised so that
/// the tabulated φ̂(0) is exactly one.
#[derive(Debug, Clone)]
pub struct GaborWindow {
    /// φ(k · step) for k = 0..len; φ is even.
    samples: Vec<f64>,
    step: f64,
    half_width: f64,
}

impl GaborWindow {
    /// Shared instance, built on first use.
    pub fn standard() -> &'static GaborWindow {
        static W: OnceLock<GaborWindow> = OnceLock::new();
        W.get_or_init(GaborWindow::build)
    }

    fn build() -> Self {
        let rule = GaussLegendre::new(48);
        let n = (WINDOW_SEARCH_LIMIT / WINDOW_STEP) as usize + 1;
        let raw: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|k| {
                let t = k as f64 * WINDOW_STEP;
                // φ(t) = (1/π) ∫_0^1 φ̂(u) cos(ut) du.
                rule.integrate_composite(|u| Self::fourier(u) * (u * t).cos(), 0.0, 1.0, 16) / PI
            })
            .collect();

        // Smallest support [-T, T] whose complement carries |φ| mass below the limit.
        let mut tail = 0.0;
        let mut cut = n - 1;
        for k in (1..n).rev() {
            tail += 2.0 * raw[k].abs() * WINDOW_STEP;
            if tail > WINDOW_TAIL_MASS {
                cut = k + 1;
                break;
            }
        }
        let mut samples = raw[..=cut].to_vec();
        // Trapezoid on a band-limited integrand is exact up to truncation.
        let mass = WINDOW_STEP * (samples[0] + 2.0 * samples[1..].iter().sum::<f64>());
        for s in &mut samples {
            *s /= mass;
        }
        Self {
            half_width: cut as f64 * WINDOW_STEP,
            samples,
            step: WINDOW_STEP,
        }
    }

    /// φ̂(u): the C^∞ bump supported on (−1, 1), with φ̂(0) = 1.
    pub fn fourier(u: f64) -> f64 {
        if u.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - u * u)).exp()
        }
    }

    /// Half width T of the tabulated support [−T, T].
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Fourier support half width of φ̂.
    pub fn fourier_support_halfwidth(&self) -> f64 {
        1.0
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// φ(t) by four-point Lagrange interpolation of the table; zero outside [−T, T].
    pub fn eval(&self, t: f64) -> f64 {
        let x = t.abs() / self.step;
        let last = self.samples.len() - 1;
        if x > last as f64 {
            return 0.0;
        }
        let k = (x.floor() as usize).min(last.saturating_sub(1));
        let f = x - k as f64;
        let get = |j: isize| -> f64 {
            let j = j.unsigned_abs();
            if j > last {
                0.0
            } else {
                self.samples[j]
            }
        };
        let k = k as isize;
        let (y0, y1, y2, y3) = (get(k - 1), get(k), get(k + 1), get(k + 2));
        let c0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
        let c1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
        let c2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
        let c3 = (f + 1.0) * f * (f - 1.0) / 6.0;
        c0 * y0 + c1 * y1 + c2 * y2 + c3 * y3
    }

    /// Fourier transform of the tabulated window, ∫ φ(t) cos(ut) dt.
    pub fn tabulated_fourier(&self, u: f64) -> f64 {
        let mut acc = self.samples[0];
        for (k, s) in self.samples.iter().enumerate().skip(1) {
            acc += 2.0 * s * (u * k as f64 * self.step).cos();
        }
        acc * self.step
    }
}

/// Grid spacing a graph needs for [`gabor_transform`] at scale `a` and
/// angular frequency `lambda`.
pub fn required_spacing(graph_source: &GraphSource, max_frequency: Option<f64>, a: f64, lambda: f64) -> f64 {
    // Ten samples per period of the analysed frequency, and enough to resolve the window.
    let mut h = 0.5 * a;
    if lambda.abs() > 0.0 {
        h = h.min(TAU / (10.0 * lambda.abs()));
    }
    // No frequency of f may alias into the window's passband after demodulation.
    if let Some(fmax) = max_frequency {
        let span = match graph_source {
            GraphSource::Series(p) if p.component != Component::Complex => 2.0 * fmax,
            _ => fmax,
        };
        let band = 1.0 / (TAU * a);
        h = h.min(1.0 / (span + 2.0 * band));
    }
    h
}

fn check_scale(a: f64) -> Result<()> {
    if !(a > 0.0 && a <= 1.0) {
        return domain(format!("gabor scale must lie in (0, 1], got {a}"));
    }
    Ok(())
}

/// Trapezoid quadrature of `G(a, b, λ)` on the graph's own grid.
///
/// The graph must cover the window support `[b − aT, b + aT]` and be fine
/// enough (see [`required_spacing`]); otherwise a resolution error names the
/// point count that would suffice over the graph's span.
pub fn gabor_transform(graph: &SampledGraph, a: f64, b: f64, lambda: f64) -> Result<Complex64> {
    gabor_transform_turns(graph, a, b, Frequency::new(lambda / TAU), lambda)
}

fn gabor_transform_turns(graph: &SampledGraph, a: f64, b: f64, freq: Frequency, lambda: f64) -> Result<Complex64> {
    check_scale(a)?;
    let window = GaborWindow::standard();
    let reach = a * window.half_width();
    let span = graph.t_end() - graph.t_start();
    let h = graph.spacing();
    let h_req = required_spacing(graph.source(), graph.max_frequency(), a, lambda);
    if h > h_req {
        return Err(Error::Resolution {
            message: format!("grid spacing {h:e} exceeds {h_req:e} for a={a:e}, lambda={lambda:e}"),
            required_points: (span / h_req).ceil() as usize + 1,
        });
    }
    let slack = 1e-9 * span;
    if b - reach < graph.t_start() - slack || b + reach > graph.t_end() + slack {
        return Err(Error::Resolution {
            message: format!(
                "graph [{}, {}] does not cover the window support [{}, {}]",
                graph.t_start(),
                graph.t_end(),
                b - reach,
                b + reach
            ),
            required_points: (2.0 * reach / h).ceil() as usize + 1,
        });
    }
    let lo = (((b - reach - graph.t_start()) / h).ceil().max(0.0)) as usize;
    let hi = ((((b + reach - graph.t_start()) / h).floor()) as usize).min(graph.points() - 1);
    let values = graph.values();
    let mut re = crate::sum::CompensatedSum::new();
    let mut im = crate::sum::CompensatedSum::new();
    for (i, fv) in values.iter().enumerate().take(hi + 1).skip(lo) {
        let t = graph.t(i);
        let w = window.eval((t - b) / a);
        if w == 0.0 {
            continue;
        }
        let (s, c) = sin_cos_turns(-freq.phase(t));
        let z = fv * Complex64::new(c, s) * w;
        re.add(z.re);
        im.add(z.im);
    }
    Ok(Complex64::new(re.value(), im.value()) * (h / a))
}

/// Result of a self-refining Gabor evaluation on a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaborValue {
    pub value_re: f64,
    pub value_im: f64,
    pub abs: f64,
    pub points: usize,
    pub refinements: u32,
}

/// `G(a, b, λ)` of a prime series, sampling the window support directly and
/// halving the spacing until successive values differ by less than 0.5%.
pub fn gabor_transform_series(series: &PrimeSeries, a: f64, b: f64, freq: Frequency) -> Result<GaborValue> {
    check_scale(a)?;
    let lambda = TAU * freq.value();
    let reach = a * GaborWindow::standard().half_width();
    let (t0, t1) = (b - reach, b + reach);
    let source = GraphSource::Series(*series.params());
    let h0 = required_spacing(&source, source.max_frequency(), a, lambda);
    let mut points = ((t1 - t0) / h0).ceil() as usize + 1;
    let mut graph = series.sample(t0, t1, points)?;
    let mut value = gabor_transform_turns(&graph, a, b, freq, lambda)?;
    let mut refinements = 0;
    loop {
        // Nested refinement: keep the old nodes, evaluate only the midpoints.
        let fine_points = 2 * points - 1;
        let mids: Vec<Complex64> = (0..points - 1)
            .into_par_iter()
            .map(|i| {
                let t = crate::series::grid_time(t0, t1, fine_points, 2 * i + 1);
                series.params().project(series.eval(t))
            })
            .collect();
        let mut vals = Vec::with_capacity(fine_points);
        for (i, v) in graph.values().iter().enumerate() {
            vals.push(*v);
            if i < mids.len() {
                vals.push(mids[i]);
            }
        }
        graph = SampledGraph::new(t0, t1, vals, source.clone())?;
        points = fine_points;
        let refined = gabor_transform_turns(&graph, a, b, freq, lambda)?;
        refinements += 1;
        let change = (refined - value).norm() / refined.norm().max(f64::MIN_POSITIVE);
        value = refined;
        if change < 5e-3 || refinements >= 4 {
            break;
        }
    }
    Ok(GaborValue {
        value_re: value.re,
        value_im: value.im,
        abs: value.norm(),
        points,
        refinements,
    })
}

/// `θ_m = min(p_m^β − p_{m−1}^β, p_{m+1}^β − p_m^β)` for the zero-based
/// table index `m`, which needs a neighbour on each side.
pub fn theta_gap(table: &PrimeTable, beta: f64, m: usize) -> Result<f64> {
    let ps = table.primes();
    if m < 1 || m + 1 >= ps.len() {
        return domain(format!(
            "index {m} needs neighbours on both sides (table has {} primes)",
            ps.len()
        ));
    }
    let pow = |p: u64| -> f64 {
        if beta == 1.0 {
            p as f64
        } else {
            (p as f64).powf(beta)
        }
    };
    let gap = |lo: u64, hi: u64| -> f64 {
        if beta == 1.0 {
            (hi - lo) as f64
        } else if beta == 2.0 {
            ((hi as u128 * hi as u128) - (lo as u128 * lo as u128)) as f64
        } else {
            pow(hi) - pow(lo)
        }
    };
    Ok(gap(ps[m - 1], ps[m]).min(gap(ps[m], ps[m + 1])))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HolderMethod {
    Oscillation,
    Gabor,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    pub location: f64,
    /// Fitted exponent, capped at 1.5.
    pub exponent: f64,
    /// Standard error of the fitted slope.
    pub ci_halfwidth: f64,
    pub scales_used: Vec<f64>,
    pub method: HolderMethod,
    pub raw_slope: f64,
    pub fit_r2: f64,
    /// Slope above one: the graph looks differentiable at these scales.
    pub differentiable_regime: bool,
    /// The oscillation vanished at some scale (locally constant graph).
    pub degenerate: bool,
}

pub const MAX_EXPONENT: f64 = 1.5;

/// Dyadic scales 2^-4 … 2^-12.
pub fn default_scales() -> Vec<f64> {
    (4..=12).map(|k| 2f64.powi(-k)).collect()
}

/// Slope of ln osc(ε) against ln ε, where osc(ε) is the range of the graph on
/// `|t − t0| ≤ ε`. Scales finer than two grid steps are dropped; at least four
/// scales spanning 1.5 decades must remain.
pub fn holder_exponent_oscillation(graph: &SampledGraph, t0: f64, scales: &[f64]) -> Result<HolderEstimate> {
    let h = graph.spacing();
    let slack = 1e-9 * (graph.t_end() - graph.t_start());
    let mut used: Vec<f64> = Vec::new();
    for &eps in scales {
        if !(eps > 0.0) {
            return domain(format!("scales must be positive, got {eps}"));
        }
        if t0 - eps < graph.t_start() - slack || t0 + eps > graph.t_end() + slack {
            return domain(format!(
                "scale {eps} around {t0} leaves the sampled range [{}, {}]",
                graph.t_start(),
                graph.t_end()
            ));
        }
        if eps >= 2.0 * h {
            used.push(eps);
        }
    }
    used.sort_by(|a, b| a.total_cmp(b));
    used.dedup();
    let decades = match (used.first(), used.last()) {
        (Some(lo), Some(hi)) => (hi / lo).log10(),
        _ => 0.0,
    };
    if used.len() < 4 || decades < 1.5 {
        let finest = scales.iter().cloned().fold(f64::INFINITY, f64::min);
        return Err(Error::Resolution {
            message: format!(
                "{} usable scales spanning {decades:.2} decades; need 4 spanning 1.5",
                used.len()
            ),
            required_points: ((graph.t_end() - graph.t_start()) / (0.5 * finest)).ceil() as usize + 1,
        });
    }

    let y = graph.scalar_values();
    let mut ln_eps = Vec::with_capacity(used.len());
    let mut ln_osc = Vec::with_capacity(used.len());
    let mut degenerate = false;
    for &eps in &used {
        let lo = (((t0 - eps - graph.t_start()) / h) - 1e-9).ceil().max(0.0) as usize;
        let hi = ((((t0 + eps - graph.t_start()) / h) + 1e-9).floor() as usize).min(y.len() - 1);
        let (mn, mx) = y[lo..=hi]
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let osc = mx - mn;
        if !(osc > 0.0) {
            degenerate = true;
            break;
        }
        ln_eps.push(eps.ln());
        ln_osc.push(osc.ln());
    }
    if degenerate {
        return Ok(HolderEstimate {
            location: t0,
            exponent: MAX_EXPONENT,
            ci_halfwidth: 0.0,
            scales_used: used,
            method: HolderMethod::Oscillation,
            raw_slope: f64::INFINITY,
            fit_r2: 1.0,
            differentiable_regime: true,
            degenerate: true,
        });
    }
    let fit = fit_line(&ln_eps, &ln_osc).expect("distinct scales");
    Ok(HolderEstimate {
        location: t0,
        exponent: fit.slope.clamp(f64::MIN_POSITIVE, MAX_EXPONENT),
        ci_halfwidth: fit.slope_stderr,
        scales_used: used,
        method: HolderMethod::Oscillation,
        raw_slope: fit.slope,
        fit_r2: fit.r2,
        differentiable_regime: fit.slope > 1.0,
        degenerate: false,
    })
}

/// One frequency isolated by the Gabor transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaborRow {
    /// Zero-based table index.
    pub m: usize,
    pub p: u64,
    /// Frequency gap θ_m in units of p^β.
    pub theta: f64,
    /// Angular gap ω θ_m; the transform runs at scale a = 1/(ω θ_m).
    pub theta_angular: f64,
    pub abs_g: f64,
    /// Amplitude the isolation identity predicts: p^-α (halved for a real component).
    pub expected: f64,
    pub relative_error: f64,
    /// ln|G_m| / ln(1/(ω θ_m)).
    pub exponent_bound: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderBoundReport {
    pub location: f64,
    pub alpha: f64,
    pub beta: f64,
    /// The reference line α/β.
    pub alpha_over_beta: f64,
    /// Minimum of the per-frequency bounds.
    pub empirical_bound: f64,
    pub rows: Vec<GaborRow>,
}

/// Evaluates `|G_m(1/θ_m, t0, ω p_m^β)|` for each table index in `m_list` and
/// the exponent bound it implies.
pub fn holder_upper_bound_check(
    params: &SeriesParams,
    table: &PrimeTable,
    m_list: &[usize],
    t0: f64,
) -> Result<HolderBoundReport> {
    if !(params.alpha > 1.0) {
        return domain(format!("upper bound check needs alpha > 1, got {}", params.alpha));
    }
    if m_list.is_empty() {
        return domain("empty index list");
    }
    let series = PrimeSeries::new(*params, table)?;
    let omega = params.angular.radians();
    let ps = table.primes();
    let rows: Vec<GaborRow> = m_list
        .par_iter()
        .map(|&m| -> Result<GaborRow> {
            let theta = theta_gap(table, params.beta, m)?;
            let p = ps[m];
            if p > params.n_max {
                return domain(format!("prime {p} at index {m} exceeds n_max {}", params.n_max));
            }
            let theta_angular = omega * theta;
            let a = 1.0 / theta_angular;
            let freq = Frequency::prime_power(p, params.beta).scaled(params.angular.turns());
            // The mirror of the smallest frequency must stay outside the passband.
            let lowest = Frequency::prime_power(2, params.beta).value() * params.angular.turns();
            if params.component != Component::Complex && TAU * (freq.value() + lowest) * a < 1.0 {
                return domain("negative-frequency mirror term falls inside the window passband");
            }
            let g = gabor_transform_series(&series, a, t0, freq)?;
            let mut expected = (p as f64).powf(-params.alpha);
            if params.component != Component::Complex {
                expected *= 0.5;
            }
            Ok(GaborRow {
                m,
                p,
                theta,
                theta_angular,
                abs_g: g.abs,
                expected,
                relative_error: (g.abs - expected).abs() / expected,
                exponent_bound: g.abs.ln() / (1.0 / theta_angular).ln(),
                points: g.points,
            })
        })
        .collect::<Result<_>>()?;
    let empirical_bound = rows.iter().map(|r| r.exponent_bound).fold(f64::INFINITY, f64::min);
    Ok(HolderBoundReport {
        location: t0,
        alpha: params.alpha,
        beta: params.beta,
        alpha_over_beta: params.alpha / params.beta,
        empirical_bound,
        rows,
    })
}
