//! Recipes regenerating the data behind the reference figures.

use super::output::{csv_bytes, emit, svg_bytes, Cell, Curve, Echo, Plot, PlotKind};
use super::{clt_notes, graph_csv, histogram_plot, table_for_terms};
use crate::error::Result;
use crate::fractal::{box_dimension, default_grid_sizes};
use crate::primes::{sieve, PrimeTable};
use crate::series::{Component, PrimeSeries, SampledGraph, SeriesParams};
use crate::stochastic::{clt_experiment, walk, CltConfig, Family, Normalization, WalkSpec};
use crate::trig::sin_cos_turns;
use crate::series::{grid_time, Angular};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::Serialize;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    All,
}

const ALL: [Figure; 10] = [
    Figure::Fig1,
    Figure::Fig2,
    Figure::Fig3,
    Figure::Fig4,
    Figure::Fig5,
    Figure::Fig6,
    Figure::Fig7,
    Figure::Fig8,
    Figure::Fig9,
    Figure::Fig10,
];

#[derive(Serialize)]
struct Target {
    target: Figure,
}

impl Figure {
    fn stem(self) -> String {
        format!("{self:?}").to_lowercase()
    }
}

pub fn run(target: Figure, outdir: &Path) -> Result<()> {
    std::fs::create_dir_all(outdir)?;
    let list: Vec<Figure> = if target == Figure::All { ALL.to_vec() } else { vec![target] };
    for fig in list {
        eprintln!("{}: computing", fig.stem());
        let echo = Echo::new("figures", &Target { target: fig });
        let (csv, plot) = build(fig, &echo)?;
        let stem = fig.stem();
        emit(Some(&outdir.join(format!("{stem}.csv"))), &csv)?;
        emit(Some(&outdir.join(format!("{stem}.svg"))), &svg_bytes(&echo, &plot))?;
        eprintln!("{stem}: wrote {stem}.csv and {stem}.svg");
    }
    Ok(())
}

fn title_note(title: &str) -> Vec<(String, String)> {
    vec![("title".into(), title.into())]
}

fn build(fig: Figure, echo: &Echo) -> Result<(Vec<u8>, Plot)> {
    match fig {
        Figure::Fig1 => sine_pairs(echo),
        Figure::Fig2 => walk_graphs(echo),
        Figure::Fig3 => series_graph(echo, 1.5, 2.0),
        Figure::Fig4 => series_graph(echo, 1.5, 1.5),
        Figure::Fig5 => series_graph(echo, 1.5, 1.0),
        Figure::Fig6 => series_graph(echo, 1.0, 1.0),
        Figure::Fig7 => similarity(echo),
        Figure::Fig8 => dimension_sweep(echo),
        Figure::Fig9 => clt_histogram(echo, Family::Primes),
        Figure::Fig10 => clt_histogram(echo, Family::PrimePowers(1.5)),
        Figure::All => unreachable!("expanded by run"),
    }
}

fn lines(title: String, x_label: &str, y_label: &str, curves: Vec<Curve>) -> Plot {
    Plot {
        title,
        x_label: x_label.into(),
        y_label: y_label.into(),
        kind: PlotKind::Lines,
        curves,
    }
}

/// sin(kπx) for lacunary and consecutive frequency pairs.
fn sine_pairs(echo: &Echo) -> Result<(Vec<u8>, Plot)> {
    const POINTS: usize = 2001;
    let ks = [32u32, 64, 5, 6];
    let names = ["sin_2p5", "sin_2p6", "sin_5", "sin_6"];
    let xs: Vec<f64> = (0..POINTS).map(|i| grid_time(0.0, 1.0, POINTS, i)).collect();
    let cols: Vec<Vec<f64>> = ks
        .iter()
        .map(|&k| xs.iter().map(|&x| sin_cos_turns(0.5 * k as f64 * x).0).collect())
        .collect();
    let title = "Lacunary and consecutive sine pairs";
    let mut header = vec!["x"];
    header.extend(names);
    let rows = (0..POINTS).map(|i| {
        let mut r = vec![Cell::from(xs[i])];
        r.extend(cols.iter().map(|c| Cell::from(c[i])));
        r
    });
    let csv = csv_bytes(echo, &title_note(title), &header, rows);
    let curves = names
        .iter()
        .zip(&cols)
        .map(|(n, c)| Curve {
            name: n.to_string(),
            points: xs.iter().copied().zip(c.iter().copied()).collect(),
        })
        .collect();
    Ok((csv, lines(title.into(), "x", "y", curves)))
}

/// Σ sin(π n_k x) over x for powers of two, integers and primes ≤ 1000.
fn walk_graphs(echo: &Echo) -> Result<(Vec<u8>, Plot)> {
    const POINTS: usize = 2001;
    let table = sieve(1000)?;
    let families = [
        ("powers_of_two", Family::PowersOfTwo, 1000),
        ("integers", Family::Integers, 1000),
        ("primes", Family::Primes, table.count()),
    ];
    let xs: Vec<f64> = (0..POINTS).map(|i| grid_time(0.0, 1.0, POINTS, i)).collect();
    let mut cols = Vec::new();
    for (_, family, n_terms) in families {
        let col: Result<Vec<f64>> = xs
            .par_iter()
            .map(|&x| {
                let spec = WalkSpec {
                    family,
                    n_terms,
                    x,
                    angular: Angular::Pi,
                };
                Ok(*walk(&spec, &table)?.last().unwrap())
            })
            .collect();
        cols.push(col?);
    }
    let title = "Sine sums over three frequency families";
    let header = ["x", "powers_of_two", "integers", "primes"];
    let rows = (0..POINTS).map(|i| {
        let mut r = vec![Cell::from(xs[i])];
        r.extend(cols.iter().map(|c| Cell::from(c[i])));
        r
    });
    let csv = csv_bytes(echo, &title_note(title), &header, rows);
    let curves = families
        .iter()
        .zip(&cols)
        .map(|((n, _, _), c)| Curve {
            name: n.to_string(),
            points: xs.iter().copied().zip(c.iter().copied()).collect(),
        })
        .collect();
    Ok((csv, lines(title.into(), "x", "sum", curves)))
}

fn series_graph(echo: &Echo, alpha: f64, beta: f64) -> Result<(Vec<u8>, Plot)> {
    const N: u64 = 100_000;
    const POINTS: usize = 50_000;
    let params = SeriesParams::new(alpha, beta, N)?;
    let series = PrimeSeries::new(params, &sieve(N)?)?;
    let t_end = grid_time(0.0, 1.0, POINTS + 1, POINTS - 1);
    let graph = series.sample(0.0, t_end, POINTS)?;
    let title = format!("Prime series V(alpha={alpha}, beta={beta}, n={N}) on [0, 1)");
    let csv = graph_csv(echo, &title_note(&title), &graph);
    let curve = Curve {
        name: "(Re V, Im V)".into(),
        points: graph.values().iter().map(|z| (z.re, z.im)).collect(),
    };
    Ok((csv, lines(title, "Re V", "Im V", vec![curve])))
}

/// Re V_{1,1}(n, t/q) + 1/q and Re V_{1,1}(n, t)/(1 − q) at t = i/points.
pub(crate) fn similarity_curves(table: &PrimeTable, q: u64, n: u64, points: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    crate::selfsim::residue_sums(table, q, n)?;
    if points < 2 {
        return crate::error::domain("need at least 2 points");
    }
    let series = PrimeSeries::new(SeriesParams::new(1.0, 1.0, n)?, table)?;
    let qf = q as f64;
    let ts: Vec<f64> = (0..points).map(|i| i as f64 / points as f64).collect();
    let pairs: Vec<(f64, f64)> = ts
        .par_iter()
        .map(|&t| (series.eval_real(t / qf) + 1.0 / qf, series.eval_real(t) / (1.0 - qf)))
        .collect();
    let (scaled, affine) = pairs.into_iter().unzip();
    Ok((ts, scaled, affine))
}

pub(crate) fn similarity_plot(q: u64, n: u64, ts: &[f64], scaled: &[f64], affine: &[f64]) -> Plot {
    let curve = |name: String, ys: &[f64]| Curve {
        name,
        points: ts.iter().copied().zip(ys.iter().copied()).collect(),
    };
    lines(
        format!("Affine self-similarity at 1/{q}, n={n}"),
        "t",
        "Re V",
        vec![
            curve(format!("Re V(t)/(1-{q})"), affine),
            curve(format!("Re V(t/{q}) + 1/{q}"), scaled),
        ],
    )
}

fn similarity(echo: &Echo) -> Result<(Vec<u8>, Plot)> {
    const Q: u64 = 3;
    const N: u64 = 1_000_000;
    const POINTS: usize = 10_000;
    let (ts, scaled, affine) = similarity_curves(&sieve(N)?, Q, N, POINTS)?;
    let plot = similarity_plot(Q, N, &ts, &scaled, &affine);
    let rows = (0..ts.len()).map(|i| vec![Cell::from(ts[i]), affine[i].into(), scaled[i].into()]);
    let csv = csv_bytes(echo, &title_note(&plot.title), &["t", "affine", "scaled"], rows);
    Ok((csv, plot))
}

fn dimension_sweep(echo: &Echo) -> Result<(Vec<u8>, Plot)> {
    const N: u64 = 10_000;
    const POINTS: usize = 1 << 15;
    const STEPS: usize = 6;
    let table = sieve(N)?;
    let sizes = default_grid_sizes();
    let mut rows = Vec::new();
    for i in 0..STEPS {
        let alpha = 1.0 + 0.5 * i as f64 / (STEPS - 1) as f64;
        for j in 0..STEPS {
            let beta = 0.5 + 2.5 * j as f64 / (STEPS - 1) as f64;
            let params = SeriesParams::new(alpha, beta, N)?.with_component(Component::RealPart);
            let graph: SampledGraph = PrimeSeries::new(params, &table)?.sample(0.0, 1.0, POINTS)?;
            let d = box_dimension(&graph, &sizes)?.dimension;
            eprintln!("fig8: alpha={alpha:.2} beta={beta:.2} dimension={d:.4}");
            rows.push((alpha, beta, alpha / beta, d));
        }
    }
    let title = "Box dimension against alpha/beta";
    let csv = csv_bytes(
        echo,
        &title_note(title),
        &["alpha", "beta", "ratio", "box_dimension"],
        rows.iter().map(|&(a, b, r, d)| vec![Cell::from(a), b.into(), r.into(), d.into()]),
    );
    let plot = Plot {
        title: title.into(),
        x_label: "alpha/beta".into(),
        y_label: "box dimension".into(),
        kind: PlotKind::Points,
        curves: vec![Curve {
            name: "dim_B".into(),
            points: rows.iter().map(|&(_, _, r, d)| (r, d)).collect(),
        }],
    };
    Ok((csv, plot))
}

/// Histogram of (1/N) Σ sin(π n_k x) over N = π(10^6) terms; the
/// √N-normalized bin centres are reported alongside.
fn clt_histogram(echo: &Echo, family: Family) -> Result<(Vec<u8>, Plot)> {
    const N: usize = 78_498;
    const SAMPLES: usize = 10_000;
    let cfg = CltConfig::new(family, N, SAMPLES, Normalization::ByN, 1);
    let report = clt_experiment(&cfg, &table_for_terms(N)?)?;
    let title = format!("Distribution of {} sine averages, N={N}", report.family);
    let mut notes = title_note(&title);
    notes.extend(clt_notes(&report));
    let root = (N as f64).sqrt();
    let rows = report
        .histogram
        .iter()
        .map(|&(c, k)| vec![Cell::from(c), k.into(), (c * root).into()]);
    let csv = csv_bytes(echo, &notes, &["bin_center", "count", "bin_center_sqrt_n"], rows);
    Ok((csv, histogram_plot(title, &report.histogram)))
}
