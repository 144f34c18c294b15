//! Partial sums of the prime trigonometric series and the classical
//! comparison families (Weierstrass and Riemann functions).

use crate::error::{domain, Error, Result};
use crate::primes::PrimeTable;
use crate::sum::{CompensatedSum, ComplexSum};
use crate::trig::{sin_cos_turns, two_prod, Frequency};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::TAU;

/// Which part of the complex series a graph carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Component {
    #[default]
    Complex,
    RealPart,
    ImagPart,
}

/// Angular factor ω in `exp(i ω p^β t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Angular {
    /// ω = π
    Pi,
    /// ω = 2π
    #[default]
    TwoPi,
}

impl Angular {
    /// Turns per unit of `p^β t`.
    pub fn turns(self) -> f64 {
        match self {
            Angular::Pi => 0.5,
            Angular::TwoPi => 1.0,
        }
    }

    pub fn radians(self) -> f64 {
        TAU * self.turns()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesParams {
    pub alpha: f64,
    pub beta: f64,
    pub n_max: u64,
    pub component: Component,
    pub angular: Angular,
}

impl SeriesParams {
    pub fn new(alpha: f64, beta: f64, n_max: u64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            n_max,
            component: Component::Complex,
            angular: Angular::TwoPi,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_component(mut self, component: Component) -> Self {
        self.component = component;
        self
    }

    pub fn with_angular(mut self, angular: Angular) -> Self {
        self.angular = angular;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0) || !self.alpha.is_finite() {
            return domain(format!("alpha must be > 0, got {}", self.alpha));
        }
        if !(self.beta > 0.0) || !self.beta.is_finite() {
            return domain(format!("beta must be > 0, got {}", self.beta));
        }
        if self.n_max < 2 {
            return domain(format!("n_max must be >= 2, got {}", self.n_max));
        }
        Ok(())
    }

    /// Applies the component selection to a complex value.
    pub fn project(&self, z: Complex64) -> Complex64 {
        project(self.component, z)
    }
}

fn project(component: Component, z: Complex64) -> Complex64 {
    match component {
        Component::Complex => z,
        Component::RealPart => Complex64::new(z.re, 0.0),
        Component::ImagPart => Complex64::new(0.0, z.im),
    }
}

/// Where a sampled graph came from; used for resolution checks and headers.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GraphSource {
    Series(SeriesParams),
    Weierstrass { a: f64, b: f64, terms: usize },
    Riemann { alpha: f64, terms: usize },
    /// A closed-form test function or other in-process data.
    Function { name: String },
    /// Samples read from a file.
    External { path: String },
}

impl GraphSource {
    /// Upper bound on |frequency| in turns per unit time, when known.
    pub fn max_frequency(&self) -> Option<f64> {
        match self {
            // Largest prime ≤ n_max is at most n_max.
            GraphSource::Series(p) => Some(p.angular.turns() * (p.n_max as f64).powf(p.beta)),
            GraphSource::Riemann { terms, .. } => Some((*terms as f64).powi(2) / TAU),
            _ => None,
        }
    }
}

/// Samples of a function on a uniform grid including both endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGraph {
    t_start: f64,
    t_end: f64,
    values: Vec<Complex64>,
    source: GraphSource,
}

/// `i`-th node of the uniform grid with `points` nodes on `[t_start, t_end]`.
pub fn grid_time(t_start: f64, t_end: f64, points: usize, i: usize) -> f64 {
    if i + 1 == points {
        t_end
    } else {
        t_start + (t_end - t_start) * (i as f64 / (points - 1) as f64)
    }
}

impl SampledGraph {
    pub fn new(t_start: f64, t_end: f64, values: Vec<Complex64>, source: GraphSource) -> Result<Self> {
        if values.len() < 2 {
            return domain(format!("a graph needs at least 2 points, got {}", values.len()));
        }
        if !(t_start < t_end) || !t_start.is_finite() || !t_end.is_finite() {
            return domain(format!("need t_start < t_end, got [{t_start}, {t_end}]"));
        }
        Ok(Self {
            t_start,
            t_end,
            values,
            source,
        })
    }

    /// Samples `f` on the grid, in parallel; the result does not depend on scheduling.
    pub fn from_fn<F>(t_start: f64, t_end: f64, points: usize, source: GraphSource, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64 + Sync,
    {
        if points < 2 {
            return domain(format!("a graph needs at least 2 points, got {points}"));
        }
        let values = (0..points)
            .into_par_iter()
            .map(|i| f(grid_time(t_start, t_end, points, i)))
            .collect();
        Self::new(t_start, t_end, values, source)
    }

    pub fn from_real_fn<F>(t_start: f64, t_end: f64, points: usize, name: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Sync,
    {
        let source = GraphSource::Function { name: name.to_string() };
        Self::from_fn(t_start, t_end, points, source, |t| Complex64::new(f(t), 0.0))
    }

    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn spacing(&self) -> f64 {
        (self.t_end - self.t_start) / (self.points() - 1) as f64
    }

    pub fn t(&self, i: usize) -> f64 {
        grid_time(self.t_start, self.t_end, self.points(), i)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.points()).map(|i| self.t(i))
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn source(&self) -> &GraphSource {
        &self.source
    }

    /// Real-valued view: the imaginary part for `ImagPart` series, the real part otherwise.
    pub fn scalar_values(&self) -> Vec<f64> {
        let imag = matches!(
            self.source,
            GraphSource::Series(SeriesParams {
                component: Component::ImagPart,
                ..
            })
        );
        self.values.iter().map(|z| if imag { z.im } else { z.re }).collect()
    }

    /// Largest |frequency| in turns per unit time, when the source is known.
    pub fn max_frequency(&self) -> Option<f64> {
        self.source.max_frequency()
    }
}

#[derive(Debug, Clone, Copy)]
struct Term {
    freq: Frequency,
    coeff: f64,
}

/// A partial sum V_{α,β}(n, ·) with its frequencies and coefficients precomputed.
#[derive(Debug, Clone)]
pub struct PrimeSeries {
    params: SeriesParams,
    terms: Vec<Term>,
}

impl PrimeSeries {
    pub fn new(params: SeriesParams, table: &PrimeTable) -> Result<Self> {
        params.validate()?;
        table.require(params.n_max)?;
        let scale = params.angular.turns();
        let terms = table
            .up_to(params.n_max)
            .iter()
            .map(|&p| Term {
                freq: Frequency::prime_power(p, params.beta).scaled(scale),
                coeff: (p as f64).powf(-params.alpha),
            })
            .collect();
        Ok(Self { params, terms })
    }

    pub fn params(&self) -> &SeriesParams {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest frequency present, in turns per unit time.
    pub fn max_frequency(&self) -> f64 {
        self.terms.last().map(|t| t.freq.value()).unwrap_or(0.0)
    }

    /// Σ p^-α exp(i ω p^β t) with compensated accumulation, ascending p.
    pub fn eval(&self, t: f64) -> Complex64 {
        let mut acc = ComplexSum::new();
        for term in &self.terms {
            let (s, c) = sin_cos_turns(term.freq.phase(t));
            acc.add(Complex64::new(term.coeff * c, term.coeff * s));
        }
        acc.value()
    }

    /// Real part only; half the work of [`PrimeSeries::eval`].
    pub fn eval_real(&self, t: f64) -> f64 {
        let mut acc = CompensatedSum::new();
        for term in &self.terms {
            let (_, c) = sin_cos_turns(term.freq.phase(t));
            acc.add(term.coeff * c);
        }
        acc.value()
    }

    /// m-th derivative Σ (i ω p^β)^m p^-α exp(i ω p^β t).
    pub fn derivative(&self, t: f64, order: u32) -> Result<Complex64> {
        if order < 1 {
            return domain("derivative order must be >= 1");
        }
        let mut acc = ComplexSum::new();
        for term in &self.terms {
            let (s, c) = sin_cos_turns(term.freq.phase(t));
            let amp = term.coeff * (TAU * term.freq.value()).powi(order as i32);
            let z = Complex64::new(amp * c, amp * s);
            acc.add(rotate_quarter_turns(z, order));
        }
        Ok(acc.value())
    }

    /// Samples the selected component on `points` nodes of `[t_start, t_end]`.
    pub fn sample(&self, t_start: f64, t_end: f64, points: usize) -> Result<SampledGraph> {
        let component = self.params.component;
        SampledGraph::from_fn(t_start, t_end, points, GraphSource::Series(self.params), |t| {
            project(component, self.eval(t))
        })
    }

    /// Weierstrass M-test bound Σ p^-α over the terms.
    pub fn coefficient_sum(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff).collect::<CompensatedSum>().value()
    }
}

/// Multiplies by i^k exactly.
fn rotate_quarter_turns(z: Complex64, k: u32) -> Complex64 {
    match k % 4 {
        0 => z,
        1 => Complex64::new(-z.im, z.re),
        2 => -z,
        _ => Complex64::new(z.im, -z.re),
    }
}

pub fn eval_v(params: &SeriesParams, table: &PrimeTable, t: f64) -> Result<Complex64> {
    Ok(PrimeSeries::new(*params, table)?.eval(t))
}

pub fn sample_graph(
    params: &SeriesParams,
    table: &PrimeTable,
    t_start: f64,
    t_end: f64,
    points: usize,
) -> Result<SampledGraph> {
    if points < 2 {
        return domain(format!("need at least 2 points, got {points}"));
    }
    PrimeSeries::new(*params, table)?.sample(t_start, t_end, points)
}

pub fn eval_v_derivative(params: &SeriesParams, table: &PrimeTable, t: f64, order: u32) -> Result<Complex64> {
    PrimeSeries::new(*params, table)?.derivative(t, order)
}

/// Whether the m-th derivative series converges uniformly (α − mβ > 1).
/// Finite partial sums are differentiable regardless.
pub fn derivative_converges(params: &SeriesParams, order: u32) -> bool {
    params.alpha - order as f64 * params.beta > 1.0
}

/// Partial sum Σ_{n<terms} a^n cos(b^n t) of the Weierstrass function.
/// Truncation error is at most a^terms / (1 − a).
pub fn weierstrass(a: f64, b: f64, terms: usize, t: f64) -> Result<f64> {
    if !(a > 0.0 && a < 1.0) {
        return domain(format!("weierstrass needs 0 < a < 1, got {a}"));
    }
    if !(b > 1.0) {
        return domain(format!("weierstrass needs b > 1, got {b}"));
    }
    if terms < 1 {
        return domain("weierstrass needs at least one term");
    }
    let mut acc = CompensatedSum::new();
    for n in 0..terms {
        let k = n as i32;
        acc.add(a.powi(k) * (b.powi(k) * t).cos());
    }
    Ok(acc.value())
}

/// Partial sum Σ_{n≤terms} n^-α cos(n² t) of Riemann's function.
pub fn riemann_series(alpha: f64, terms: usize, t: f64) -> Result<f64> {
    if terms < 1 {
        return Err(Error::Domain("riemann series needs at least one term".into()));
    }
    let mut acc = CompensatedSum::new();
    for n in 1..=terms {
        let nf = n as f64;
        // n² t split exactly; cos(hi + lo) ≈ cos hi − lo sin hi.
        let (hi, lo) = two_prod(nf * nf, t);
        let (s, c) = hi.sin_cos();
        acc.add(nf.powf(-alpha) * (c - lo * s));
    }
    Ok(acc.value())
}
