//! Phase arithmetic measured in turns (1 turn = 2π radians).
//!
//! Frequencies such as `p^β` reach 1e16 and beyond, so `p^β · t` cannot be
//! formed in plain double precision and then reduced. The product is split
//! with an FMA-based error-free transform and reduced modulo one before the
//! angle is ever multiplied by 2π.

/// Error-free product: `a * b == hi + lo` exactly.
#[inline]
pub(crate) fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let hi = a * b;
    let lo = a.mul_add(b, -hi);
    (hi, lo)
}

/// Nearest integer, ties to even. Inlined arithmetic: without SSE4.1 the
/// baseline target lowers `f64::round` to a library call.
#[inline]
pub(crate) fn round_even(x: f64) -> f64 {
    const TWO52: f64 = 4_503_599_627_370_496.0;
    if x.abs() < TWO52 {
        let c = TWO52.copysign(x);
        (x + c) - c
    } else {
        x
    }
}

/// A frequency in turns per unit time, stored as an unevaluated sum `hi + lo`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frequency {
    pub hi: f64,
    pub lo: f64,
}

impl Frequency {
    pub fn new(value: f64) -> Self {
        Self { hi: value, lo: 0.0 }
    }

    /// Exact integer frequency; values above 2^53 keep their low bits in `lo`.
    pub fn from_u128(n: u128) -> Self {
        let hi = n as f64;
        // `hi` is within one ulp of `n`, so the difference fits an i128 and is exact in f64.
        let diff = n as i128 - hi as i128;
        Self { hi, lo: diff as f64 }
    }

    /// `p^β` in turns; exact for β ∈ {1, 2}.
    pub fn prime_power(p: u64, beta: f64) -> Self {
        if beta == 1.0 {
            Self::from_u128(p as u128)
        } else if beta == 2.0 {
            Self::from_u128(p as u128 * p as u128)
        } else {
            Self::new((beta * (p as f64).ln()).exp())
        }
    }

    pub fn scaled(self, factor: f64) -> Self {
        // Only used with powers of two, which scale exactly.
        Self {
            hi: self.hi * factor,
            lo: self.lo * factor,
        }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }

    /// `(self · t) mod 1`, in [-1/2, 1/2].
    #[inline]
    pub fn phase(self, t: f64) -> f64 {
        let (ph, pl) = two_prod(self.hi, t);
        let pl = pl + self.lo * t;
        let r = ph - round_even(ph);
        let f = r + pl;
        f - round_even(f)
    }
}

/// Reduces an angle given in turns to [-1/2, 1/2].
#[inline]
pub fn reduce_turns(x: f64) -> f64 {
    x - round_even(x)
}

// Taylor coefficients (-1)^k / (2k+1)! and (-1)^k / (2k)! in powers of (2πr)^2.
const SIN_C: [f64; 8] = [
    1.0,
    -1.0 / 6.0,
    1.0 / 120.0,
    -1.0 / 5040.0,
    1.0 / 362880.0,
    -1.0 / 39916800.0,
    1.0 / 6227020800.0,
    -1.0 / 1307674368000.0,
];
const COS_C: [f64; 9] = [
    1.0,
    -0.5,
    1.0 / 24.0,
    -1.0 / 720.0,
    1.0 / 40320.0,
    -1.0 / 3628800.0,
    1.0 / 479001600.0,
    -1.0 / 87178291200.0,
    1.0 / 20922789888000.0,
];

/// `(sin 2πx, cos 2πx)` for an angle `x` in turns.
///
/// Exact at multiples of a quarter turn; relative error about one ulp elsewhere.
#[inline]
pub fn sin_cos_turns(x: f64) -> (f64, f64) {
    let x = x - round_even(x);
    let q = round_even(4.0 * x);
    let r = x - 0.25 * q;
    let th = std::f64::consts::TAU * r;
    let z = th * th;
    let mut s = SIN_C[7];
    for c in SIN_C[..7].iter().rev() {
        s = s * z + c;
    }
    let s = s * th;
    let mut c = COS_C[8];
    for k in COS_C[..8].iter().rev() {
        c = c * z + k;
    }
    // Quadrant fix-up without branches: random phases defeat prediction.
    let qi = q as i64 & 3;
    let (s, c) = if qi & 1 == 1 { (c, s) } else { (s, c) };
    let sign_s = 1.0 - 2.0 * ((qi >> 1) & 1) as f64;
    let sign_c = 1.0 - 2.0 * ((qi ^ (qi >> 1)) & 1) as f64;
    (s * sign_s, c * sign_c)
}
