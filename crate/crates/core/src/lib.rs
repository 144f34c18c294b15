//! Numerical toolkit for the prime trigonometric series
//!
//! ```text
//! V_{α,β}(n, t) = Σ_{p≤n} p^-α exp(2πi p^β t)
//! ```
//!
//! Modules cover prime tables ([`primes`]), zeta-type constants ([`zeta`]),
//! series evaluation on grids ([`series`]), Hölder regularity ([`regularity`]),
//! box-counting dimension ([`fractal`]), residue-class self-similarity
//! ([`selfsim`]) and random-walk / CLT experiments ([`stochastic`]). The
//! [`cli`] module drives all of them from the `primewave` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fit;
pub mod fractal;
pub mod primes;
pub mod quad;
pub mod regularity;
pub mod selfsim;
pub mod series;
pub mod stochastic;
pub mod sum;
pub mod trig;
pub mod zeta;

pub use error::{Error, Result};
pub use primes::{sieve, PrimeTable};
pub use series::{Component, SampledGraph, SeriesParams};
