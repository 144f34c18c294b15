//! Residue-class structure of V_{1,1} and its approximate self-similarity
//! under t ↦ t/q.
//!
//! Grouping the primes by residue mod q gives
//! `Re V_{1,1}(n, 1/q) = Σ_l cos(2πl/q) R_{l,q}` with `R_{l,q} = Σ_{p ≡ l} 1/p`.
//! Near-equal class sums make `V(n, t/q)` resemble an affine image of `V(n, t)`.

use crate::error::{domain, Error, Result};
use crate::primes::{is_prime, PrimeTable};
use crate::series::{PrimeSeries, SeriesParams};
use crate::sum::ExactSum;
use crate::trig::sin_cos_turns;
use crate::zeta::{mertens_constant, prime_power_exact_sum};
use rayon::prelude::*;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidueDecomposition {
    pub q: u64,
    pub n: u64,
    /// R_{l,q} for every residue l, correctly rounded.
    pub sums: BTreeMap<u64, f64>,
    pub counts: BTreeMap<u64, usize>,
    /// Class-free prediction (ln ln n + M)/(q − 1), M the Mertens constant.
    pub predicted: f64,
    /// Σ_{p≤n} 1/p, correctly rounded from the merged class partials.
    pub total: f64,
    /// Residue of q itself (0) and of the prime 2.
    pub outlier_classes: Vec<u64>,
}

impl ResidueDecomposition {
    /// R_{l,q} with the prime 2 left out.
    pub fn sum_without_two(&self, l: u64) -> f64 {
        let s = self.sums.get(&l).copied().unwrap_or(0.0);
        if self.n >= 2 && 2 % self.q == l {
            s - 0.5
        } else {
            s
        }
    }

    /// max_l |R_l − mean| / mean over the classes l ≠ 0, with the prime 2 removed
    /// from its class.
    pub fn relative_deviation(&self) -> f64 {
        let r: Vec<f64> = (1..self.q).map(|l| self.sum_without_two(l)).collect();
        let mean = r.iter().sum::<f64>() / r.len() as f64;
        r.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / mean
    }
}

fn check_modulus(table: &PrimeTable, q: u64, n: u64) -> Result<()> {
    if !is_prime(q) {
        return domain(format!("modulus {q} is not prime"));
    }
    if q > n {
        return domain(format!("modulus {q} exceeds the cutoff {n}"));
    }
    table.require(n)
}

fn class_partials(table: &PrimeTable, q: u64, n: u64) -> Vec<(Vec<u64>, ExactSum)> {
    let mut classes: Vec<Vec<u64>> = vec![Vec::new(); q as usize];
    for &p in table.up_to(n) {
        classes[(p % q) as usize].push(p);
    }
    classes
        .into_par_iter()
        .map(|ps| {
            let s = prime_power_exact_sum(1.0, &ps);
            (ps, s)
        })
        .collect()
}

pub fn residue_sums(table: &PrimeTable, q: u64, n: u64) -> Result<ResidueDecomposition> {
    check_modulus(table, q, n)?;
    let partials = class_partials(table, q, n);
    let mut total = ExactSum::new();
    let mut sums = BTreeMap::new();
    let mut counts = BTreeMap::new();
    for (l, (ps, s)) in partials.iter().enumerate() {
        total.merge(s);
        sums.insert(l as u64, s.value());
        counts.insert(l as u64, ps.len());
    }
    let mut outlier_classes = vec![0, 2 % q];
    outlier_classes.dedup();
    Ok(ResidueDecomposition {
        q,
        n,
        sums,
        counts,
        predicted: ((n as f64).ln().ln() + mertens_constant()) / (q - 1) as f64,
        total: total.value(),
        outlier_classes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReciprocalValue {
    pub q: u64,
    pub n: u64,
    /// Re V_{1,1}(n, 1/q) summed term by term.
    pub direct: f64,
    /// Σ_l cos(2πl/q) R_{l,q}.
    pub residue: f64,
    pub difference: f64,
}

pub const RECIPROCAL_TOLERANCE: f64 = 1e-8;

/// Re V_{1,1}(n, 1/q) by direct summation and through the residue classes.
pub fn value_at_reciprocal(table: &PrimeTable, q: u64, n: u64) -> Result<ReciprocalValue> {
    check_modulus(table, q, n)?;
    let series = PrimeSeries::new(SeriesParams::new(1.0, 1.0, n)?, table)?;
    let direct = series.eval_real(1.0 / q as f64);
    let residue: ExactSum = class_partials(table, q, n)
        .iter()
        .enumerate()
        .map(|(l, (_, s))| sin_cos_turns(l as f64 / q as f64).1 * s.value())
        .collect();
    let residue = residue.value();
    let difference = direct - residue;
    if difference.abs() > RECIPROCAL_TOLERANCE {
        return Err(Error::Consistency(format!(
            "V(n={n}, 1/{q}): direct {direct} vs residue {residue}"
        )));
    }
    Ok(ReciprocalValue {
        q,
        n,
        direct,
        residue,
        difference,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineResidual {
    pub rms: f64,
    pub max_abs: f64,
    /// rms divided by the value range of the unscaled graph; absent for a constant graph.
    pub normalized_rms: Option<f64>,
}

/// Residual of `scaled ≈ base/(1 − q) + 1/q`, sample by sample.
pub fn affine_residual(scaled: &[f64], base: &[f64], q: u64) -> AffineResidual {
    let qf = q as f64;
    residual_stats(scaled, base, |s, b| s - (b / (1.0 - qf) + 1.0 / qf))
}

/// Residual of the rearranged relation `scaled + 1/q ≈ base/(1 − q)`.
pub fn alternate_affine_residual(scaled: &[f64], base: &[f64], q: u64) -> AffineResidual {
    let qf = q as f64;
    residual_stats(scaled, base, |s, b| (s + 1.0 / qf) - b / (1.0 - qf))
}

fn residual_stats(scaled: &[f64], base: &[f64], r: impl Fn(f64, f64) -> f64) -> AffineResidual {
    assert_eq!(scaled.len(), base.len());
    let mut sq = ExactSum::new();
    let mut max_abs = 0.0f64;
    for (&s, &b) in scaled.iter().zip(base) {
        let d = r(s, b);
        sq.add(d * d);
        max_abs = max_abs.max(d.abs());
    }
    let rms = (sq.value() / scaled.len() as f64).sqrt();
    let (lo, hi) = base
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    let range = hi - lo;
    AffineResidual {
        rms,
        max_abs,
        normalized_rms: (range > 0.0).then(|| rms / range),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityReport {
    pub q: u64,
    pub n: u64,
    pub points: usize,
    /// Range of Re V_{1,1}(n, t) over the grid.
    pub value_range: f64,
    /// V(t/q) against V(t)/(1 − q) + 1/q.
    pub residual: AffineResidual,
    /// V(t/q) + 1/q against V(t)/(1 − q).
    pub alternate: AffineResidual,
}

/// Samples Re V_{1,1}(n, t/q) and Re V_{1,1}(n, t) at t = i/points, i < points.
pub fn affine_similarity_residual(table: &PrimeTable, q: u64, n: u64, points: usize) -> Result<SimilarityReport> {
    if q < 3 {
        return domain(format!("similarity check needs q >= 3, got {q}"));
    }
    check_modulus(table, q, n)?;
    if points < 2 {
        return domain("need at least 2 points");
    }
    let series = PrimeSeries::new(SeriesParams::new(1.0, 1.0, n)?, table)?;
    let qf = q as f64;
    let pairs: Vec<(f64, f64)> = (0..points)
        .into_par_iter()
        .map(|i| {
            let t = i as f64 / points as f64;
            (series.eval_real(t / qf), series.eval_real(t))
        })
        .collect();
    let (scaled, base): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (lo, hi) = base
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(SimilarityReport {
        q,
        n,
        points,
        value_range: hi - lo,
        residual: affine_residual(&scaled, &base, q),
        alternate: alternate_affine_residual(&scaled, &base, q),
    })
}
