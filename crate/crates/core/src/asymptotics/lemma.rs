//! The function `f(t) = t^{2N}(2re)^t / t^t`: where its maximum sits and how
//! large that maximum is.

use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::report::{csv_float, CheckReport};

/// `m(t) = ln f(t) = 2N ln t + t ln(2re) − t ln t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LemmaFunction {
    n: u64,
    r: f64,
}

impl LemmaFunction {
    pub fn new(n: u64, r: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::DomainError { n });
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(invalid("r", format!("must be positive, got {r}")));
        }
        Ok(LemmaFunction { n, r })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn m(&self, t: f64) -> f64 {
        m_and_derivatives(self, t).0
    }

    /// `m'(t)`, strictly decreasing.
    pub fn dm(&self, t: f64) -> f64 {
        m_and_derivatives(self, t).1
    }
}

/// `(m(t), m'(t), m''(t))` for `t > 0`.
pub fn m_and_derivatives(l: &LemmaFunction, t: f64) -> (f64, f64, f64) {
    let two_n = 2.0 * l.n as f64;
    let lt = t.ln();
    let m = two_n * lt + t * ((2.0 * l.r).ln() + 1.0) - t * lt;
    let dm = two_n / t + (2.0 * l.r).ln() - lt;
    let d2m = -two_n / (t * t) - 1.0 / t;
    (m, dm, d2m)
}

/// `t_α = (2N/ln N)(1 + α ln(r ln N)/(ln N + 1))`.
pub fn t_alpha(l: &LemmaFunction, alpha: f64) -> f64 {
    let ln_n = (l.n as f64).ln();
    2.0 * l.n as f64 / ln_n * (1.0 + alpha * (l.r * ln_n).ln() / (ln_n + 1.0))
}

const BRACKET_DOUBLINGS: usize = 60;
const BISECTION_STEPS: usize = 60;

/// The unique zero of `m'` by bisection, starting from
/// `[1, 20N(2r + e)]` and widening the bracket when needed.
pub fn argmax_m(l: &LemmaFunction) -> Result<f64> {
    let mut lo = 1.0;
    let mut hi = 20.0 * l.n as f64 * (2.0 * l.r + std::f64::consts::E);
    let mut widened = 0;
    while !(l.dm(lo) > 0.0 && l.dm(hi) < 0.0) {
        if widened == BRACKET_DOUBLINGS {
            return Err(Error::BracketFailure { lo, hi });
        }
        if l.dm(lo) <= 0.0 {
            lo /= 2.0;
        }
        if l.dm(hi) >= 0.0 {
            hi *= 2.0;
        }
        widened += 1;
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let v = l.dm(mid);
        if v == 0.0 {
            return Ok(mid);
        }
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Grid-search maximiser of `m` on `t = step, 2·step, ...`; stops at the
/// first decrease, which is the global maximum because `m` is concave.
pub fn grid_argmax_m(l: &LemmaFunction, step: f64) -> f64 {
    let mut best_t = step;
    let mut best = l.m(step);
    let mut i = 2u64;
    loop {
        let t = i as f64 * step;
        let v = l.m(t);
        if v < best {
            return best_t;
        }
        best = v;
        best_t = t;
        i += 1;
    }
}

/// One grid point of the interval lemma.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalRow {
    pub r: f64,
    pub n: u64,
    pub t1: f64,
    pub tstar: f64,
    pub t2: f64,
    pub dm_t1: f64,
    pub dm_t2: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntervalSweep {
    pub rows: Vec<IntervalRow>,
    /// Smallest grid `N` from which every later grid point passes.
    pub n0: Option<u64>,
}

impl IntervalSweep {
    /// `param,N,t1,tstar,t2,pass`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,N,t1,tstar,t2,pass\n");
        for row in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_float(row.r),
                row.n,
                csv_float(row.t1),
                csv_float(row.tstar),
                csv_float(row.t2),
                row.pass
            );
        }
        out
    }
}

/// Smallest index from which every later entry is true.
pub(crate) fn tail_start(passes: &[bool]) -> Option<usize> {
    let first_fail_from_end = passes.iter().rposition(|p| !p);
    match first_fail_from_end {
        None if passes.is_empty() => None,
        None => Some(0),
        Some(i) if i + 1 < passes.len() => Some(i + 1),
        Some(_) => None,
    }
}

/// Checks `m'(t₁) > 0`, `m'(t₂) < 0` and `t* ∈ [t₁, t₂]` on each grid `N`.
pub fn interval_check(r: f64, n_grid: &[u64]) -> Result<IntervalSweep> {
    let mut rows = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        let l = LemmaFunction::new(n, r)?;
        let (t1, t2) = (t_alpha(&l, 1.0), t_alpha(&l, 2.0));
        let tstar = argmax_m(&l)?;
        let (dm_t1, dm_t2) = (l.dm(t1), l.dm(t2));
        let pass = dm_t1 > 0.0 && dm_t2 < 0.0 && t1 <= tstar && tstar <= t2;
        rows.push(IntervalRow {
            r,
            n,
            t1,
            tstar,
            t2,
            dm_t1,
            dm_t2,
            pass,
        });
    }
    let passes: Vec<bool> = rows.iter().map(|r| r.pass).collect();
    let n0 = tail_start(&passes).map(|i| rows[i].n);
    Ok(IntervalSweep { rows, n0 })
}

/// Upper end of the default search domain for the supremum in `θ₀`.
pub const THETA_S_MAX: f64 = 1e6;

/// `θ₀(r)` and `θ(r) = 2e θ₀(r)`, with the maximiser `s*` (`None` when the
/// supremum is the `s → ∞` limit 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaConstant {
    pub theta0: f64,
    pub theta: f64,
    pub s_star: Option<f64>,
}

/// `ln` of the supremand `e^{α g₀(s) ln s}(2re)^{α g₀(s)}` at `α = 2`.
pub fn theta_supremand_ln(r: f64, s: f64) -> f64 {
    let g0 = ((r + 2.0) * s).ln() / (s + 1.0);
    2.0 * g0 * (s.ln() + (2.0 * r).ln() + 1.0)
}

pub fn theta_constant(r: f64) -> ThetaConstant {
    theta_constant_on(r, THETA_S_MAX)
}

/// Supremum over `s ∈ (1, s_max]` on a log grid refined by golden section.
pub fn theta_constant_on(r: f64, s_max: f64) -> ThetaConstant {
    const POINTS: usize = 600;
    let f = |s: f64| theta_supremand_ln(r, s);
    let span = s_max.ln();
    let grid: Vec<f64> = (0..=POINTS)
        .map(|i| (span * i as f64 / POINTS as f64).exp())
        .collect();
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for (i, &s) in grid.iter().enumerate() {
        let v = f(s);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = grid[best_i.saturating_sub(1)].ln();
    let hi = grid[(best_i + 1).min(POINTS)].ln();
    let (s_ref, v_ref) = golden_max(|u| f(u.exp()), lo, hi);
    let (mut s_star, mut ln_theta0) = (grid[best_i], best);
    if v_ref > best {
        s_star = s_ref.exp();
        ln_theta0 = v_ref;
    }
    let (theta0, s_star) = if ln_theta0 > 0.0 {
        (ln_theta0.exp(), Some(s_star))
    } else {
        (1.0, None)
    };
    ThetaConstant {
        theta0,
        theta: 2.0 * std::f64::consts::E * theta0,
        s_star,
    }
}

/// Maximiser and maximum of a unimodal `f` on `[lo, hi]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..200 {
        if (hi - lo).abs() <= 1e-12 * (lo.abs() + hi.abs()).max(1e-300) {
            break;
        }
        if fa > fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}

/// `2N(1 − 1/ln N) ln(2N/ln N) + (2N/ln N) ln(θ(r)·r)`.
pub fn maximum_bound_ln(n: u64, r: f64, theta: f64) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    2.0 * nf * (1.0 - 1.0 / ln_n) * (2.0 * nf / ln_n).ln() + 2.0 * nf / ln_n * (theta * r).ln()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaximumSweep {
    pub n0: Option<u64>,
    pub theta: ThetaConstant,
    /// One row per grid `N ≥ N₀`; key `N`, `lhs = max f`, `rhs` the bound.
    pub reports: Vec<CheckReport>,
}

impl MaximumSweep {
    pub fn pass(&self) -> bool {
        self.n0.is_some() && self.reports.iter().all(|r| r.pass)
    }
}

/// `max_t m(t)` against the closed-form bound, on the grid points at or
/// above the empirical `N₀(r)` of [`interval_check`].
pub fn maximum_bound_check(r: f64, n_grid: &[u64]) -> Result<MaximumSweep> {
    let sweep = interval_check(r, n_grid)?;
    let theta = theta_constant(r);
    let mut reports = Vec::new();
    if let Some(n0) = sweep.n0 {
        for &n in n_grid.iter().filter(|&&n| n >= n0) {
            let l = LemmaFunction::new(n, r)?;
            let tstar = argmax_m(&l)?;
            let lhs = crate::LogReal::from_ln(l.m(tstar));
            let rhs = crate::LogReal::from_ln(maximum_bound_ln(n, r, theta.theta));
            let nf = n as f64;
            let report = CheckReport::new(nf, lhs, rhs, 1.0)
                .with_param("r", r)
                .with_param("tstar", tstar)
                .with_param("theta", theta.theta);
            let scale = report.ratio_log / (2.0 * nf / nf.ln());
            reports.push(report.with_param("ratio_per_exponent", scale));
        }
    }
    Ok(MaximumSweep {
        n0: sweep.n0,
        theta,
        reports,
    })
}
