//! Random-walk and central-limit experiments for sums `Σ sin(ω n_k x)` over
//! lacunary and arithmetic frequency families.

use crate::error::{domain, Error, Result};
use crate::primes::PrimeTable;
use crate::series::Angular;
use crate::sum::{CompensatedSum, ExactSum};
use crate::trig::{reduce_turns, sin_cos_turns, Frequency};
use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// Frequency sequence n_k, k = 1, 2, …
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// n_k = 2^k.
    PowersOfTwo,
    /// n_k = k.
    Integers,
    /// n_k = p_k, the k-th prime.
    Primes,
    /// n_k = p_k^β.
    PrimePowers(f64),
}

impl Family {
    pub fn name(&self) -> String {
        match self {
            Family::PowersOfTwo => "powers_of_two".into(),
            Family::Integers => "integers".into(),
            Family::Primes => "primes".into(),
            Family::PrimePowers(b) => format!("prime_powers({b})"),
        }
    }

    /// The first `n_terms` frequencies scaled to turns (ω n_k / 2π), for the
    /// families whose frequencies fit a double-double.
    fn frequencies(&self, n_terms: usize, angular: Angular, table: &PrimeTable) -> Result<Vec<Frequency>> {
        let scale = angular.turns();
        let primes = || -> Result<&[u64]> {
            if n_terms > table.count() {
                return Err(Error::InsufficientTable {
                    needed: n_terms as u64,
                    limit: table.limit(),
                });
            }
            Ok(&table.primes()[..n_terms])
        };
        Ok(match *self {
            Family::Integers => (1..=n_terms as u128).map(|k| Frequency::from_u128(k).scaled(scale)).collect(),
            Family::Primes => primes()?.iter().map(|&p| Frequency::prime_power(p, 1.0).scaled(scale)).collect(),
            Family::PrimePowers(beta) => {
                if !(beta > 0.0) {
                    return domain(format!("prime power exponent must be positive, got {beta}"));
                }
                primes()?.iter().map(|&p| Frequency::prime_power(p, beta).scaled(scale)).collect()
            }
            Family::PowersOfTwo => unreachable!("powers of two use doubling"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WalkSpec {
    pub family: Family,
    pub n_terms: usize,
    pub x: f64,
    pub angular: Angular,
}

/// Terms sin(ω n_k x), k = 1..n_terms.
fn terms(family: Family, n_terms: usize, x: f64, angular: Angular, freqs: &[Frequency]) -> impl Iterator<Item = f64> + '_ {
    let doubling = matches!(family, Family::PowersOfTwo);
    // Turns of ω 2^k x / 2π, reduced exactly by repeated doubling; once the
    // binary expansion of x is exhausted every later phase is exactly zero.
    let mut y = reduce_turns(angular.turns() * x);
    (0..n_terms).map(move |k| {
        let phase = if doubling {
            y = reduce_turns(2.0 * y);
            y
        } else {
            freqs[k].phase(x)
        };
        sin_cos_turns(phase).0
    })
}

/// Partial sums S(x, k) = Σ_{j≤k} sin(ω n_j x) for k = 1..n_terms.
pub fn walk(spec: &WalkSpec, table: &PrimeTable) -> Result<Vec<f64>> {
    if spec.n_terms < 1 {
        return domain("walk needs at least one term");
    }
    if !spec.x.is_finite() {
        return domain(format!("evaluation point must be finite, got {}", spec.x));
    }
    let freqs = match spec.family {
        Family::PowersOfTwo => Vec::new(),
        f => f.frequencies(spec.n_terms, spec.angular, table)?,
    };
    let mut acc = CompensatedSum::new();
    Ok(terms(spec.family, spec.n_terms, spec.x, spec.angular, &freqs)
        .map(|v| {
            acc.add(v);
            acc.value()
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    ByN,
    BySqrtN,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CltConfig {
    pub family: Family,
    pub n_terms: usize,
    pub n_samples: usize,
    pub normalization: Normalization,
    pub seed: u64,
    pub angular: Angular,
    /// Histogram bins; ⌈√M⌉ when absent.
    pub bins: Option<usize>,
    /// Evaluate at −x for every drawn x.
    pub mirrored: bool,
}

impl CltConfig {
    pub fn new(family: Family, n_terms: usize, n_samples: usize, normalization: Normalization, seed: u64) -> Self {
        Self {
            family,
            n_terms,
            n_samples,
            normalization,
            seed,
            angular: Angular::Pi,
            bins: None,
            mirrored: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CltReport {
    pub family: String,
    pub n_terms: usize,
    pub n_samples: usize,
    pub normalization: Normalization,
    pub seed: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub stddev: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// (M/6)(skew² + excess_kurtosis²/4).
    pub jarque_bera: f64,
    /// (bin_center, count) over mean ± 4·stddev; outliers clamp to the edge bins.
    pub histogram: Vec<(f64, u64)>,
    #[serde(skip)]
    pub samples: Vec<f64>,
}

pub const MIN_SAMPLES: usize = 100;

/// Draws M points uniformly from [−π/2, π/2] and reports the distribution
/// of the normalised sums.
pub fn clt_experiment(config: &CltConfig, table: &PrimeTable) -> Result<CltReport> {
    let m = config.n_samples;
    if m < MIN_SAMPLES {
        return domain(format!("need at least {MIN_SAMPLES} samples, got {m}"));
    }
    if config.n_terms < 1 {
        return domain("need at least one term");
    }
    if config.bins == Some(0) {
        return domain("histogram needs at least one bin");
    }
    let freqs = match config.family {
        Family::PowersOfTwo => Vec::new(),
        f => f.frequencies(config.n_terms, config.angular, table)?,
    };
    let mut rng = ChaCha20Rng::seed_from_u64(config.seed);
    let dist = Uniform::new_inclusive(-FRAC_PI_2, FRAC_PI_2);
    let xs: Vec<f64> = (0..m).map(|_| dist.sample(&mut rng)).collect();
    let norm = match config.normalization {
        Normalization::ByN => config.n_terms as f64,
        Normalization::BySqrtN => (config.n_terms as f64).sqrt(),
    };
    let samples: Vec<f64> = xs
        .par_iter()
        .map(|&x| {
            let x = if config.mirrored { -x } else { x };
            let s: CompensatedSum = terms(config.family, config.n_terms, x, config.angular, &freqs).collect();
            s.value() / norm
        })
        .collect();

    let mf = m as f64;
    let mean = samples.iter().copied().collect::<ExactSum>().value() / mf;
    let central = |k: i32| samples.iter().map(|v| (v - mean).powi(k)).collect::<ExactSum>().value() / mf;
    let (m2, m3, m4) = (central(2), central(3), central(4));
    let variance = m2 * mf / (mf - 1.0);
    let stddev = variance.sqrt();
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let jarque_bera = mf / 6.0 * (skewness * skewness + excess_kurtosis * excess_kurtosis / 4.0);

    let bins = config.bins.unwrap_or_else(|| (mf.sqrt().ceil()) as usize);
    let half = 4.0 * stddev;
    let width = 2.0 * half / bins as f64;
    let mut counts = vec![0u64; bins];
    for v in &samples {
        let i = if width > 0.0 {
            let k = ((v - mean + half) / width).floor();
            k.clamp(0.0, (bins - 1) as f64) as usize
        } else {
            bins / 2
        };
        counts[i] += 1;
    }
    let histogram = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| (mean - half + (i as f64 + 0.5) * width, c))
        .collect();

    Ok(CltReport {
        family: config.family.name(),
        n_terms: config.n_terms,
        n_samples: m,
        normalization: config.normalization,
        seed: config.seed,
        mean,
        variance,
        stddev,
        skewness,
        excess_kurtosis,
        jarque_bera,
        histogram,
        samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HadamardReport {
    pub rho: f64,
    /// Whether n_{k+1}/n_k ≥ 1 + ρ, for each consecutive pair.
    pub passes: Vec<bool>,
    pub all_pass: bool,
    pub first_failure: Option<usize>,
}

/// Checks the gap condition n_{k+1}/n_k ≥ 1 + ρ pair by pair.
pub fn hadamard_check(sequence: &[u64], rho: f64) -> Result<HadamardReport> {
    if sequence.len() < 2 {
        return domain("sequence needs at least two terms");
    }
    if sequence.windows(2).any(|w| w[1] <= w[0]) || sequence[0] == 0 {
        return domain("sequence must be positive and strictly increasing");
    }
    if !(rho >= 0.0) {
        return domain(format!("rho must be non-negative, got {rho}"));
    }
    let passes: Vec<bool> = sequence
        .windows(2)
        .map(|w| w[1] as f64 / w[0] as f64 >= 1.0 + rho)
        .collect();
    let first_failure = passes.iter().position(|&p| !p);
    Ok(HadamardReport {
        rho,
        all_pass: first_failure.is_none(),
        first_failure,
        passes,
    })
}
