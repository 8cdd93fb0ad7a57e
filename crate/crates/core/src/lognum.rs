//! Signed reals stored as `(sign, ln|x|)`.
//!
//! Quantities such as `(2N / ln N)^{2N}` overflow `f64` long before the
//! interesting range of `N`, so every bound in this crate is assembled and
//! compared in the log domain. Zero is a distinguished sign rather than
//! `ln 0 = -inf`, which keeps differences of logs free of NaN.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Relative size (in log units) below which a series term no longer
/// contributes: `e^{-46} ~ 1e-20`.
pub const SERIES_CUTOFF: f64 = 46.0;

/// Hard cap on the number of terms `log_sum_positive_series` will consume.
pub const SERIES_MAX_TERMS: usize = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LogReal {
    sign: Sign,
    loga: f64,
}

impl LogReal {
    pub const ZERO: LogReal = LogReal {
        sign: Sign::Zero,
        loga: 0.0,
    };
    pub const ONE: LogReal = LogReal {
        sign: Sign::Positive,
        loga: 0.0,
    };

    /// Builds a value from its sign and `ln|x|`.
    ///
    /// A non-finite `loga` is folded into the closest representable meaning:
    /// `-inf` becomes zero. `+inf` and NaN are programming errors.
    pub fn new(sign: Sign, loga: f64) -> Self {
        if sign == Sign::Zero || loga == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        debug_assert!(loga.is_finite(), "LogReal with loga = {loga}");
        LogReal { sign, loga }
    }

    /// Positive value `e^{loga}`.
    pub fn from_ln(loga: f64) -> Self {
        Self::new(Sign::Positive, loga)
    }

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 {
            Self::ZERO
        } else if x > 0.0 {
            LogReal::new(Sign::Positive, x.ln())
        } else {
            LogReal::new(Sign::Negative, (-x).ln())
        }
    }

    /// Nearest `f64`; overflows to `±inf` and underflows to `0`.
    pub fn to_f64(self) -> f64 {
        self.sign.as_f64() * self.loga.exp()
    }

    pub fn sign(self) -> Sign {
        self.sign
    }

    /// `ln|x|`, or `-inf` for zero.
    pub fn ln_abs(self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.loga
        }
    }

    pub fn is_zero(self) -> bool {
        self.sign == Sign::Zero
    }

    pub fn abs(self) -> Self {
        if self.is_zero() {
            self
        } else {
            LogReal::new(Sign::Positive, self.loga)
        }
    }

    pub fn recip(self) -> Self {
        assert!(!self.is_zero(), "reciprocal of zero");
        LogReal::new(self.sign, -self.loga)
    }

    /// `|x|^p` for real `p`; the sign is dropped.
    pub fn powf(self, p: f64) -> Self {
        if self.is_zero() {
            return if p == 0.0 { Self::ONE } else { Self::ZERO };
        }
        LogReal::from_ln(p * self.loga)
    }

    pub fn sqrt(self) -> Self {
        assert!(self.sign != Sign::Negative, "sqrt of a negative LogReal");
        self.powf(0.5)
    }

    /// Scales by `e^{shift}`.
    pub fn scale_ln(self, shift: f64) -> Self {
        if self.is_zero() {
            self
        } else {
            LogReal::new(self.sign, self.loga + shift)
        }
    }

    /// Total order on the represented reals.
    pub fn cmp_value(self, other: LogReal) -> Ordering {
        match (self.sign, other.sign) {
            (a, b) if a != b => a.cmp(&b),
            (Sign::Zero, _) => Ordering::Equal,
            (Sign::Positive, _) => self.loga.total_cmp(&other.loga),
            _ => other.loga.total_cmp(&self.loga),
        }
    }
}

impl PartialEq for LogReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(*other) == Ordering::Equal
    }
}

impl fmt::Display for LogReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            Sign::Positive => write!(f, "exp({})", self.loga),
            Sign::Negative => write!(f, "-exp({})", self.loga),
        }
    }
}

/// Product: signs multiply, logs add.
pub fn log_mul(a: LogReal, b: LogReal) -> LogReal {
    let sign = a.sign.times(b.sign);
    if sign == Sign::Zero {
        return LogReal::ZERO;
    }
    LogReal::new(sign, a.loga + b.loga)
}

/// Sum via `max + ln(1 ± e^{-|Δ|})`; equal magnitudes of opposite sign cancel
/// to the zero element.
pub fn log_add(a: LogReal, b: LogReal) -> LogReal {
    if a.is_zero() {
        return b;
    }
    if b.is_zero() {
        return a;
    }
    let (hi, lo) = if a.loga >= b.loga { (a, b) } else { (b, a) };
    let delta = lo.loga - hi.loga;
    if hi.sign == lo.sign {
        LogReal::new(hi.sign, hi.loga + delta.exp().ln_1p())
    } else if delta == 0.0 {
        LogReal::ZERO
    } else {
        LogReal::new(hi.sign, hi.loga + (-delta.exp_m1()).ln())
    }
}

impl Mul for LogReal {
    type Output = LogReal;
    fn mul(self, rhs: LogReal) -> LogReal {
        log_mul(self, rhs)
    }
}

impl Div for LogReal {
    type Output = LogReal;
    fn div(self, rhs: LogReal) -> LogReal {
        log_mul(self, rhs.recip())
    }
}

impl Add for LogReal {
    type Output = LogReal;
    fn add(self, rhs: LogReal) -> LogReal {
        log_add(self, rhs)
    }
}

impl Neg for LogReal {
    type Output = LogReal;
    fn neg(self) -> LogReal {
        LogReal {
            sign: self.sign.flip(),
            loga: self.loga,
        }
    }
}

impl Sub for LogReal {
    type Output = LogReal;
    fn sub(self, rhs: LogReal) -> LogReal {
        log_add(self, -rhs)
    }
}

impl std::iter::Sum for LogReal {
    fn sum<I: Iterator<Item = LogReal>>(iter: I) -> LogReal {
        iter.fold(LogReal::ZERO, log_add)
    }
}

/// `ln Σ e^{x_i}` with the maximum factored out; smallest terms are added
/// first. Returns `-inf` for an empty slice.
pub fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut scaled: Vec<f64> = logs.iter().map(|&l| (l - max).exp()).collect();
    scaled.sort_by(f64::total_cmp);
    max + scaled.iter().sum::<f64>().ln()
}

/// Finite sum of nonnegative terms.
pub fn sum_positive<I>(terms: I) -> Result<LogReal>
where
    I: IntoIterator<Item = LogReal>,
{
    let mut logs = Vec::new();
    for (index, term) in terms.into_iter().enumerate() {
        match term.sign {
            Sign::Negative => return Err(Error::NonPositiveTerm { index }),
            Sign::Zero => {}
            Sign::Positive => logs.push(term.loga),
        }
    }
    Ok(LogReal::from_ln(log_sum_exp(&logs)))
}

/// Sums `term(0) + term(1) + ...` for a series of nonnegative terms that is
/// unimodal or eventually decreasing.
///
/// Stops at the first index past `peak_hint` whose term is more than
/// [`SERIES_CUTOFF`] log units below the largest term seen so far. Zero
/// terms past the hint count as below the cutoff.
pub fn log_sum_positive_series<F>(mut term: F, peak_hint: usize) -> Result<LogReal>
where
    F: FnMut(usize) -> LogReal,
{
    let mut logs = Vec::new();
    let mut max = f64::NEG_INFINITY;
    for k in 0..SERIES_MAX_TERMS {
        let t = term(k);
        let below = match t.sign {
            Sign::Negative => return Err(Error::NonPositiveTerm { index: k }),
            Sign::Zero => true,
            Sign::Positive => {
                max = max.max(t.loga);
                logs.push(t.loga);
                t.loga < max - SERIES_CUTOFF
            }
        };
        if k > peak_hint && below {
            return Ok(LogReal::from_ln(log_sum_exp(&logs)));
        }
    }
    Err(Error::NoConvergence {
        terms: SERIES_MAX_TERMS,
    })
}

/// `ln k!` through the log-gamma function.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        libm::lgamma(k as f64 + 1.0)
    }
}

/// Smallest integer `k >= 0` past which `f(k+1) < f(k)` for a concave
/// sequence `f`. Used to place `peak_hint` for log-concave series.
pub fn concave_peak<F: Fn(u64) -> f64>(f: F) -> u64 {
    let rising = |k: u64| f(k + 1) > f(k);
    if !rising(0) {
        return 0;
    }
    let mut hi = 1u64;
    while rising(hi) {
        hi = hi.saturating_mul(2);
        if hi >= 1 << 40 {
            return hi;
        }
    }
    let mut lo = hi / 2;
    // rising(lo) holds, rising(hi) fails
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if rising(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}
