//! The convex minorant `φ` built from `ψ(t) = e^t(t/2 − ln r) + r² ln r`,
//! its Young conjugate, and the estimate linking `φ*` to `k^{k/2} r^{−k}`.

use crate::error::{invalid, Result};
use crate::lognum::LogReal;
use crate::report::{fit_envelope, Envelope, EnvelopeSample, FittedBound};

/// A convex, nondecreasing function on `[0, ∞)` given by its value and its
/// right derivative.
pub trait ConvexFn {
    fn value(&self, t: f64) -> f64;
    fn slope(&self, t: f64) -> f64;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvexPhi {
    r: f64,
    t0: f64,
}

impl ConvexPhi {
    pub fn new(r: f64) -> Result<Self> {
        if !(r > 1.0 && r.is_finite()) {
            return Err(invalid("r", format!("must exceed 1, got {r}")));
        }
        Ok(ConvexPhi {
            r,
            t0: 2.0 * r.ln(),
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn psi(&self, t: f64) -> f64 {
        let lr = self.r.ln();
        t.exp() * (0.5 * t - lr) + self.r * self.r * lr
    }

    pub fn psi_prime(&self, t: f64) -> f64 {
        t.exp() * (0.5 * (1.0 + t) - self.r.ln())
    }

    /// Slope of the linear piece, `ψ(t₀)/t₀ = r²/2`.
    pub fn linear_slope(&self) -> f64 {
        0.5 * self.r * self.r
    }
}

impl ConvexFn for ConvexPhi {
    fn value(&self, t: f64) -> f64 {
        phi_eval(self, t)
    }

    fn slope(&self, t: f64) -> f64 {
        if t < self.t0 {
            self.linear_slope()
        } else {
            self.psi_prime(t)
        }
    }
}

/// `φ(t)`: linear through the origin up to `t₀`, `ψ` afterwards.
pub fn phi_eval(p: &ConvexPhi, t: f64) -> f64 {
    if t < p.t0 {
        p.linear_slope() * t
    } else {
        p.psi(t)
    }
}

/// `sup_{t≥0}(st − f(t))` and the smallest maximiser: the first `t` whose
/// right slope reaches `s`, located by bisection.
pub fn legendre_conjugate<F: ConvexFn + ?Sized>(f: &F, s: f64) -> (f64, f64) {
    if f.slope(0.0) >= s {
        return (-f.value(0.0), 0.0);
    }
    let mut hi = 1.0;
    while f.slope(hi) < s {
        hi *= 2.0;
        assert!(hi.is_finite(), "slope never reaches {s}");
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.slope(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let candidates = [lo, hi];
    let (value, t) = candidates.iter().map(|&t| (s * t - f.value(t), t)).fold(
        (f64::NEG_INFINITY, 0.0),
        |a, b| if b.0 > a.0 { b } else { a },
    );
    (value, t)
}

/// `φ*(s)`.
pub fn young_conjugate(p: &ConvexPhi, s: f64) -> f64 {
    legendre_conjugate(p, s).0
}

/// The conjugate of a [`ConvexFn`], itself convex and nondecreasing on
/// `[0, ∞)` when `f(0) = 0`.
#[derive(Clone, Copy, Debug)]
pub struct Conjugate<F>(pub F);

impl<F: ConvexFn> ConvexFn for Conjugate<F> {
    fn value(&self, s: f64) -> f64 {
        legendre_conjugate(&self.0, s).0
    }

    fn slope(&self, s: f64) -> f64 {
        // right derivative of f* is the largest maximiser, i.e. the
        // smallest maximiser for any slightly larger s
        let bump = s.abs().max(1.0) * 1e-12;
        legendre_conjugate(&self.0, s + bump).1
    }
}

/// `(φ*)*(t)`.
pub fn double_conjugate(p: &ConvexPhi, t: f64) -> f64 {
    legendre_conjugate(&Conjugate(*p), t).0
}

/// `sup_{0 ≤ N ≤ cap} (N ln k − φ*(N))` over integers, with the maximising `N`.
pub fn phi_star_sup(p: &ConvexPhi, k: u64, cap: u64) -> (f64, u64) {
    let lk = (k as f64).ln();
    (0..=cap)
        .map(|n| (n as f64 * lk - young_conjugate(p, n as f64), n))
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

/// Fits `k^{k/2−1} r^{−k} ≤ C exp(sup_N (N ln k − φ*(N)))` over `k_grid`,
/// with `N ≤ ⌈10k⌉`.
pub fn phi_star_estimate_check(r: f64, k_grid: &[u64]) -> Result<FittedBound> {
    let p = ConvexPhi::new(r)?;
    let mut samples = Vec::with_capacity(k_grid.len());
    for &k in k_grid {
        if k < 2 {
            return Err(invalid("k", format!("must be at least 2, got {k}")));
        }
        let kf = k as f64;
        let lhs = (0.5 * kf - 1.0) * kf.ln() - kf * r.ln();
        let (sup, n_star) = phi_star_sup(&p, k, (10 * k).max(1));
        samples.push(
            EnvelopeSample::new(kf, LogReal::from_ln(lhs), LogReal::from_ln(sup))
                .with_param("r", r)
                .with_param("n_star", n_star as f64),
        );
    }
    Ok(fit_envelope(samples, Envelope::Upper))
}

/// `φ(ln k) − ((k/2) ln k − k ln r)`, which equals `r² ln r` once `ln k ≥ t₀`.
pub fn phi_log_gap(p: &ConvexPhi, k: u64) -> f64 {
    let kf = k as f64;
    phi_eval(p, kf.ln()) - (0.5 * kf * kf.ln() - kf * p.r.ln())
}
