//! Riemann and prime zeta functions, the logarithmic integral and related
//! prime sums.
//!
//! The prime zeta function is evaluated with the Möbius-inverted Euler product:
//!
//! ```text
//! P(α) = Σ_{p≤N} p^-α + Σ_{n≥1} μ(n)/n · ln ζ(N, αn),   ζ(N, s) = ζ(s) Π_{p≤N} (1 - p^-s)
//! ```
//!
//! `ln ζ(N, s)` is formed as `ln(1 + (ζ(s) - 1)) + Σ ln(1 - p^-s)` so that
//! both parts keep full relative precision even when `s` is large.

use crate::error::{domain, Error, Result};
use crate::primes::PrimeTable;
use crate::quad::integrate_adaptive;
use crate::sum::{CompensatedSum, ExactSum};
use serde::Serialize;

/// Explicit terms summed before the Euler–Maclaurin correction.
const EM_TERMS: u64 = 10_000;

/// li(2), from the convergent series `γ + ln ln x + Σ (ln x)^k / (k·k!)`.
pub const LI_2: f64 = 1.045_163_780_117_493;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Mertens' constant M = lim (Σ_{p≤n} 1/p − ln ln n)
/// = γ + Σ_p (ln(1 − 1/p) + 1/p), tabulated to double precision.
pub const MERTENS: f64 = 0.261_497_212_847_642_8;

/// The Möbius series is cut once `α n ln 2 > 60`, where ln ζ(αn) < 2^-αn is
/// below double precision.
const MOEBIUS_CUTOFF: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZetaMethod {
    DirectSum,
    MoebiusFormula,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ZetaEvaluation {
    pub value: f64,
    pub truncation_bound: u64,
    pub tail_estimate: f64,
    pub method: ZetaMethod,
}

pub fn mertens_constant() -> f64 {
    MERTENS
}

/// ζ(s) − 1 for real s > 1, keeping full relative accuracy for large s.
pub fn riemann_zeta_minus_one(s: f64) -> Result<f64> {
    if !(s > 1.0) {
        return domain(format!("riemann zeta needs s > 1, got {s}"));
    }
    let mut acc = CompensatedSum::new();
    // Smallest terms first.
    for n in (2..EM_TERMS).rev() {
        acc.add((n as f64).powf(-s));
    }
    let n = EM_TERMS as f64;
    let n_s = n.powf(-s);
    acc.add(n * n_s / (s - 1.0));
    acc.add(0.5 * n_s);
    // Bernoulli corrections B2/2!, B4/4!, B6/6! times rising factorials of s.
    let inv_n2 = 1.0 / (n * n);
    let r1 = s;
    let r3 = r1 * (s + 1.0) * (s + 2.0);
    let r5 = r3 * (s + 3.0) * (s + 4.0);
    acc.add(r1 * n_s / n / 12.0);
    acc.add(-r3 * n_s / n * inv_n2 / 720.0);
    acc.add(r5 * n_s / n * inv_n2 * inv_n2 / 30240.0);
    Ok(acc.value())
}

/// Riemann zeta function for real s > 1 (Euler–Maclaurin).
pub fn riemann_zeta(s: f64) -> Result<f64> {
    Ok(1.0 + riemann_zeta_minus_one(s)?)
}

/// μ(n) by trial-division factorisation; `moebius(0)` is defined as 0.
pub fn moebius(mut n: u64) -> i8 {
    if n == 0 {
        return 0;
    }
    let mut sign = 1i8;
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            sign = -sign;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        sign = -sign;
    }
    sign
}

/// ln ζ(N, s) = ln ζ(s) + Σ_{p≤N} ln(1 − p^-s) for the given primes.
pub fn log_truncated_zeta(s: f64, primes: &[u64]) -> Result<f64> {
    let z1 = riemann_zeta_minus_one(s)?;
    let mut acc = CompensatedSum::new();
    acc.add(z1.ln_1p());
    for &p in primes {
        let x = (p as f64).powf(-s);
        if x == 0.0 {
            break;
        }
        acc.add((-x).ln_1p());
    }
    Ok(acc.value())
}

/// Σ_{p≤n} p^-α, correctly rounded. Any real α is allowed.
pub fn partial_prime_power_sum(alpha: f64, table: &PrimeTable, n: u64) -> Result<f64> {
    table.require(n)?;
    Ok(prime_power_exact_sum(alpha, table.up_to(n)).value())
}

pub(crate) fn prime_power_exact_sum(alpha: f64, primes: &[u64]) -> ExactSum {
    primes.iter().map(|&p| (p as f64).powf(-alpha)).collect()
}

/// Prime zeta P(α) using every prime of the table as the explicit part.
pub fn prime_zeta(alpha: f64, table: &PrimeTable) -> Result<ZetaEvaluation> {
    prime_zeta_with_bound(alpha, table, table.limit())
}

/// Prime zeta P(α) with explicit part over primes `p <= n`.
pub fn prime_zeta_with_bound(alpha: f64, table: &PrimeTable, n: u64) -> Result<ZetaEvaluation> {
    if !(alpha > 1.0) {
        return Err(Error::Divergence(format!(
            "prime zeta diverges for alpha <= 1 (alpha = {alpha})"
        )));
    }
    table.require(n)?;
    let primes = table.up_to(n);
    let partial = prime_power_exact_sum(alpha, primes).value();

    let mut tail = CompensatedSum::new();
    let mut k = 1u64;
    while alpha * k as f64 * std::f64::consts::LN_2 <= MOEBIUS_CUTOFF {
        let mu = moebius(k);
        if mu != 0 {
            let l = log_truncated_zeta(alpha * k as f64, primes)?;
            tail.add(f64::from(mu) * l / k as f64);
        }
        k += 1;
    }
    let tail = tail.value();
    Ok(ZetaEvaluation {
        value: partial + tail,
        truncation_bound: n,
        tail_estimate: tail,
        method: ZetaMethod::MoebiusFormula,
    })
}

/// Plain partial sum over the table; the tail is estimated by the prime
/// number theorem integral ∫_N^∞ x^-α / ln x dx but not added.
pub fn prime_zeta_direct(alpha: f64, table: &PrimeTable) -> Result<ZetaEvaluation> {
    if !(alpha > 1.0) {
        return Err(Error::Divergence(format!(
            "prime zeta diverges for alpha <= 1 (alpha = {alpha})"
        )));
    }
    let n = table.limit();
    let partial = prime_power_exact_sum(alpha, table.primes()).value();
    // ∫_{ln N}^∞ e^{(1-α)u}/u du, truncated where the integrand is negligible.
    let u0 = (n as f64).ln();
    let u1 = u0 + 60.0 / (alpha - 1.0);
    let tail = integrate_adaptive(|u| ((1.0 - alpha) * u).exp() / u, u0, u1, 1e-12);
    Ok(ZetaEvaluation {
        value: partial,
        truncation_bound: n,
        tail_estimate: tail,
        method: ZetaMethod::DirectSum,
    })
}

/// Prime number theorem estimate ∫_2^N x^-α / ln x dx of Σ_{p≤N} p^-α.
pub fn prime_power_sum_estimate(alpha: f64, n: u64) -> Result<ZetaEvaluation> {
    if n < 3 {
        return domain("estimate needs N >= 3");
    }
    let value = integrate_adaptive(
        |u| ((1.0 - alpha) * u).exp() / u,
        std::f64::consts::LN_2,
        (n as f64).ln(),
        1e-12,
    );
    Ok(ZetaEvaluation {
        value,
        truncation_bound: n,
        tail_estimate: 0.0,
        method: ZetaMethod::Asymptotic,
    })
}

/// Leading-order growth N^{1-α} / ((1-α) ln N) of Σ_{p≤N} p^-α for α < 1.
pub fn prime_power_sum_leading_term(alpha: f64, n: u64) -> Result<f64> {
    if !(alpha < 1.0) {
        return domain(format!("leading term applies to alpha < 1, got {alpha}"));
    }
    let x = n as f64;
    Ok(x.powf(1.0 - alpha) / ((1.0 - alpha) * x.ln()))
}

/// Logarithmic integral li(x) = PV ∫_0^x dt / ln t for x > 1.
pub fn log_integral(x: f64) -> Result<f64> {
    if !(x > 1.0) || !x.is_finite() {
        return domain(format!("log integral needs finite x > 1, got {x}"));
    }
    if x == 2.0 {
        return Ok(LI_2);
    }
    if x < 2.0 {
        return Ok(log_integral_series(x));
    }
    // ∫_2^x dt/ln t with t = e^u.
    let rest = integrate_adaptive(|u| u.exp() / u, std::f64::consts::LN_2, x.ln(), 1e-13);
    Ok(LI_2 + rest)
}

/// Convergent power series γ + ln ln x + Σ_{k≥1} (ln x)^k / (k · k!).
fn log_integral_series(x: f64) -> f64 {
    let l = x.ln();
    let mut acc = CompensatedSum::new();
    acc.add(EULER_GAMMA);
    acc.add(l.ln());
    let mut term = 1.0;
    for k in 1..200 {
        term *= l / k as f64;
        let t = term / k as f64;
        acc.add(t);
        if t.abs() < 1e-18 * acc.value().abs() {
            break;
        }
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primes::sieve;
    use std::f64::consts::PI;

    #[test]
    fn zeta_closed_forms() {
        assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-12);
        assert!((riemann_zeta(4.0).unwrap() - PI.powi(4) / 90.0).abs() < 1e-12);
        // ζ(6) = π^6/945
        assert!((riemann_zeta(6.0).unwrap() - PI.powi(6) / 945.0).abs() < 1e-12);
    }

    #[test]
    fn zeta_minus_one_large_argument() {
        let s = 50.0;
        let expect = 2f64.powf(-s) + 3f64.powf(-s) + 4f64.powf(-s);
        let got = riemann_zeta_minus_one(s).unwrap();
        assert!((got - expect).abs() / expect < 1e-14);
    }

    #[test]
    fn zeta_at_three_halves_brute_force() {
        // Oracle: 10^7 explicit terms plus the integral tail bracket
        // [∫_{M+1}^∞, ∫_M^∞] x^-s dx, midpoint error below 1e-10.
        let m: u64 = 10_000_000;
        let s = 1.5;
        let head: CompensatedSum = (1..=m).rev().map(|n| (n as f64).powf(-s)).collect();
        let lo = 2.0 * ((m + 1) as f64).powf(-0.5);
        let hi = 2.0 * (m as f64).powf(-0.5);
        let oracle = head.value() + 0.5 * (lo + hi);
        assert!((hi - lo) < 2e-9);
        assert!((riemann_zeta(s).unwrap() - oracle).abs() < 1e-9);
    }

    #[test]
    fn zeta_domain() {
        assert!(matches!(riemann_zeta(1.0), Err(Error::Domain(_))));
        assert!(matches!(riemann_zeta(0.5), Err(Error::Domain(_))));
        assert!(riemann_zeta(f64::NAN).is_err());
    }

    #[test]
    fn moebius_values() {
        assert_eq!(moebius(1), 1);
        assert_eq!(moebius(2), -1);
        assert_eq!(moebius(4), 0);
        assert_eq!(moebius(6), 1);
        assert_eq!(moebius(30), -1);
        assert_eq!(moebius(49), 0);
        assert_eq!(moebius(97), -1);
        assert_eq!(moebius(2 * 3 * 5 * 7), 1);
    }

    #[test]
    fn moebius_reciprocal_sum_vanishes() {
        let s: CompensatedSum = (1..=100_000u64)
            .map(|n| f64::from(moebius(n)) / n as f64)
            .collect();
        assert!(s.value().abs() < 1e-2, "{}", s.value());
    }

    #[test]
    fn prime_zeta_reference_values() {
        // References from an independent 30-digit evaluation (mpmath.primezeta).
        let t6 = sieve(1_000_000).unwrap();
        let p2 = prime_zeta(2.0, &t6).unwrap();
        assert!((p2.value - 0.452_247_420_041_065_5).abs() < 1e-9);
        assert_eq!(p2.method, ZetaMethod::MoebiusFormula);
        assert_eq!(p2.truncation_bound, 1_000_000);
        let t4 = sieve(10_000).unwrap();
        let p4 = prime_zeta(4.0, &t4).unwrap();
        assert!((p4.value - 0.076_993_139_764_246_84).abs() < 1e-9);
    }

    #[test]
    fn prime_zeta_is_bound_independent() {
        let t = sieve(1_000_000).unwrap();
        let big = prime_zeta(2.0, &t).unwrap().value;
        let small = prime_zeta(2.0, &sieve(100).unwrap()).unwrap().value;
        assert!((big - small).abs() < 1e-8);
        for alpha in [1.5, 3.0] {
            let a = prime_zeta_with_bound(alpha, &t, 1000).unwrap().value;
            let b = prime_zeta(alpha, &t).unwrap().value;
            assert!((a - b).abs() < 1e-10, "alpha={alpha}: {a} vs {b}");
        }
    }

    #[test]
    fn tails_are_positive_and_nested() {
        let t = sieve(100_000).unwrap();
        for alpha in [1.5, 2.0, 3.0] {
            let mut prev_tail = f64::INFINITY;
            let mut prev_partial = 0.0;
            for n in [100u64, 1_000, 10_000, 100_000] {
                let e = prime_zeta_with_bound(alpha, &t, n).unwrap();
                assert!(e.tail_estimate >= 0.0);
                assert!(e.tail_estimate < prev_tail);
                let partial = partial_prime_power_sum(alpha, &t, n).unwrap();
                if prev_tail.is_finite() {
                    // Tail at the smaller bound covers the primes added since.
                    assert!(prev_tail >= partial - prev_partial);
                }
                prev_tail = e.tail_estimate;
                prev_partial = partial;
            }
        }
    }

    #[test]
    fn truncated_euler_product_decreases() {
        let t = sieve(10_000).unwrap();
        let mut prev = f64::INFINITY;
        for n in [10u64, 100, 1000, 10_000] {
            let l = log_truncated_zeta(2.0, t.up_to(n)).unwrap();
            assert!(l > 0.0 && l < prev);
            prev = l;
        }
    }

    #[test]
    fn prime_zeta_divergence() {
        let t = sieve(100).unwrap();
        assert!(matches!(prime_zeta(1.0, &t), Err(Error::Divergence(_))));
        assert!(matches!(prime_zeta(0.5, &t), Err(Error::Divergence(_))));
    }

    #[test]
    fn direct_tail_estimate_is_close() {
        let t = sieve(100_000).unwrap();
        let d = prime_zeta_direct(2.0, &t).unwrap();
        let m = prime_zeta(2.0, &t).unwrap();
        assert_eq!(d.method, ZetaMethod::DirectSum);
        // PNT integral vs exact tail: within 10% at N = 1e5.
        assert!((d.tail_estimate - m.tail_estimate).abs() / m.tail_estimate < 0.1);
    }

    #[test]
    fn log_integral_values() {
        assert!((log_integral(2.0).unwrap() - 1.045_163_780_1).abs() < 1e-7);
        assert!((log_integral(10.0).unwrap() - 6.165_599_504_787_298).abs() < 1e-8);
        // Quadrature route against the power series at x where both apply.
        for x in [2.5, 5.0, 30.0, 1e3] {
            let q = log_integral(x).unwrap();
            let s = log_integral_series(x);
            assert!((q - s).abs() / s.abs() < 1e-10, "x={x}: {q} vs {s}");
        }
        assert!(log_integral(1.4).unwrap() < 0.0 && log_integral(1.5).unwrap() > 0.0);
        assert!(matches!(log_integral(1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn log_integral_tracks_prime_count() {
        let li = log_integral(1e6).unwrap();
        assert!((li - 78_627.549_159_462_18).abs() < 1e-4);
        let pi = sieve(1_000_000).unwrap().count() as f64;
        assert!((li - pi).abs() / pi < 0.002);
    }

    #[test]
    fn log_integral_is_monotone() {
        let mut prev = log_integral(2.0).unwrap();
        for k in 1..50 {
            let x = 2.0 + k as f64 * 7.3;
            let v = log_integral(x).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn partial_sums() {
        let t = sieve(1_000_000).unwrap();
        let v = partial_prime_power_sum(1.0, &t, 10).unwrap();
        assert!((v - (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0)).abs() < 1e-15);
        assert!((v - 1.176_190_476_2).abs() < 1e-10);
        let mertens = partial_prime_power_sum(1.0, &t, 1_000_000).unwrap() - (1e6f64).ln().ln();
        assert!((mertens - 0.261_497_2).abs() < 0.01);
        assert!(matches!(
            partial_prime_power_sum(1.0, &t, 2_000_000),
            Err(Error::InsufficientTable { .. })
        ));
    }

    #[test]
    fn sublinear_exponent_growth() {
        let t = sieve(1_000_000).unwrap();
        let s = partial_prime_power_sum(0.5, &t, 1_000_000).unwrap();
        let est = prime_power_sum_estimate(0.5, 1_000_000).unwrap().value;
        assert!((s - est).abs() / s < 0.05, "{s} vs {est}");
        // The bare leading term undershoots by the 1/ln N correction.
        let lead = prime_power_sum_leading_term(0.5, 1_000_000).unwrap();
        assert!(lead < s && s / lead < 1.25);
    }

    #[test]
    fn mertens_value() {
        let m = mertens_constant();
        assert!(m > 0.26 && m < 0.262);
    }
}
