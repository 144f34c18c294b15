//! Prime tables, gaps and residue classes.

use crate::error::{domain, Error, Result};
use std::collections::BTreeMap;

/// Odd numbers per sieve segment.
const SEGMENT_ODDS: usize = 1 << 19;

/// All primes up to `limit`, ascending. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// π(limit).
    pub fn count(&self) -> usize {
        self.primes.len()
    }

    /// Primes `p <= n` (a prefix of the table).
    pub fn up_to(&self, n: u64) -> &[u64] {
        let k = self.primes.partition_point(|&p| p <= n);
        &self.primes[..k]
    }

    /// π(n) for `n <= limit`.
    pub fn pi(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| p <= n)
    }

    /// Zero-based index of `p` in the table, if it is a tabulated prime.
    pub fn index_of(&self, p: u64) -> Option<usize> {
        self.primes.binary_search(&p).ok()
    }

    /// Fails unless the table covers every prime up to `n`.
    pub fn require(&self, n: u64) -> Result<()> {
        if n > self.limit {
            Err(Error::InsufficientTable {
                needed: n,
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }
}

/// Segmented sieve of Eratosthenes over the odd numbers.
pub fn sieve(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return domain(format!("sieve limit must be >= 2, got {limit}"));
    }
    let mut primes = Vec::with_capacity(prime_count_bound(limit));
    primes.push(2);
    if limit < 3 {
        return Ok(PrimeTable { limit, primes });
    }

    let root = isqrt(limit);
    let base = simple_odd_sieve(root);

    let mut seg = vec![true; SEGMENT_ODDS];
    // Segment covers odd numbers low, low+2, ..., low + 2*(SEGMENT_ODDS-1).
    let mut low: u64 = 3;
    while low <= limit {
        let span = (((limit - low) / 2) as usize + 1).min(SEGMENT_ODDS);
        let high = low + 2 * (span as u64 - 1);
        seg[..span].fill(true);
        for &p in &base {
            let p2 = p * p;
            if p2 > high {
                break;
            }
            // First odd multiple of p that is >= max(p^2, low).
            let mut start = if p2 >= low { p2 } else { low.div_ceil(p) * p };
            if start % 2 == 0 {
                start += p;
            }
            let mut i = ((start - low) / 2) as usize;
            let step = p as usize;
            while i < span {
                seg[i] = false;
                i += step;
            }
        }
        primes.extend(
            seg[..span]
                .iter()
                .enumerate()
                .filter(|(_, &is_p)| is_p)
                .map(|(i, _)| low + 2 * i as u64),
        );
        low = high + 2;
    }
    Ok(PrimeTable { limit, primes })
}

/// Odd primes up to `n` by a plain sieve; `n` is at most sqrt(2^63).
fn simple_odd_sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut is_p = vec![true; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if is_p[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is_p[j] = false;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Upper bound for π(n) (Rosser–Schoenfeld), used only to pre-size the table.
fn prime_count_bound(n: u64) -> usize {
    if n < 17 {
        return 7;
    }
    let x = n as f64;
    (1.25506 * x / x.ln()) as usize + 1
}

/// Deterministic trial-division primality check.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Gaps `p_{k+1} - p_k` between consecutive tabulated primes.
pub fn prime_gaps(table: &PrimeTable) -> Result<Vec<u64>> {
    if table.count() < 2 {
        return domain("prime gaps need at least two primes");
    }
    Ok(table.primes.windows(2).map(|w| w[1] - w[0]).collect())
}

/// Partitions the table by residue modulo the prime `q`.
///
/// Every residue `0..q` is present as a key, possibly with an empty list.
pub fn residue_classes(table: &PrimeTable, q: u64) -> Result<BTreeMap<u64, Vec<u64>>> {
    if !is_prime(q) {
        return domain(format!("modulus {q} is not prime"));
    }
    if q > table.limit() {
        return domain(format!("modulus {q} exceeds table limit {}", table.limit()));
    }
    let mut classes: BTreeMap<u64, Vec<u64>> = (0..q).map(|l| (l, Vec::new())).collect();
    for &p in table.primes() {
        classes.entry(p % q).or_default().push(p);
    }
    Ok(classes)
}
