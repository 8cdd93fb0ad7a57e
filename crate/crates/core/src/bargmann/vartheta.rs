use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::lognum::{ln_factorial, LogReal};
use crate::report::{csv_float, fit_envelope, Envelope, EnvelopeSample, FittedBound};

/// Decay the window edges must reach below the peak, in log units.
const WINDOW_DEPTH: f64 = 60.0;
const MIN_NODES_PER_HALF: f64 = 200.0;
const STEP_TOLERANCE: f64 = 1e-8;
const MAX_HALVINGS: usize = 16;

/// `L(u) = ln⟨e^u⟩ = ½ ln(1 + e^{2u})`.
fn ln_bracket(u: f64) -> f64 {
    if u > 0.0 {
        u + 0.5 * (-2.0 * u).exp().ln_1p()
    } else {
        0.5 * (2.0 * u).exp().ln_1p()
    }
}

/// `L(u) − L(v)` without cancelling the common `u` for large arguments.
fn ln_bracket_diff(u: f64, v: f64) -> f64 {
    if u > 0.0 && v > 0.0 {
        (u - v) + 0.5 * ((-2.0 * u).exp().ln_1p() - (-2.0 * v).exp().ln_1p())
    } else {
        ln_bracket(u) - ln_bracket(v)
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Log-integrand `g(u) = −R L(u)^θ + (m+1)u` after `r = e^u`.
struct Integrand {
    r: f64,
    theta: f64,
    m1: f64,
}

impl Integrand {
    fn g(&self, u: f64) -> f64 {
        -self.r * ln_bracket(u).powf(self.theta) + self.m1 * u
    }

    fn dg(&self, u: f64) -> f64 {
        let l = ln_bracket(u);
        -self.r * self.theta * l.powf(self.theta - 1.0) * logistic(2.0 * u) + self.m1
    }

    /// `g(u) − g(u*)` with the large linear parts cancelled analytically.
    fn delta(&self, u: f64, u_star: f64, l_star: f64) -> f64 {
        let ratio = ln_bracket_diff(u, u_star) / l_star;
        -self.r * l_star.powf(self.theta) * (self.theta * ratio.ln_1p()).exp_m1()
            + self.m1 * (u - u_star)
    }
}

/// Quadrature result for one `ϑ_R(α)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VarthetaEval {
    pub value: LogReal,
    /// Peak of the integrand in `u = ln r`.
    pub u_star: f64,
    /// `|Δ ln ∫|` between the last two step halvings.
    pub self_check: f64,
    pub nodes: usize,
}

fn validate(r: f64, s: f64, d: usize) -> Result<()> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("R", format!("must be positive, got {r}")));
    }
    if !(s > 0.0 && s < 0.5) {
        return Err(invalid("s", format!("must lie in (0, 1/2), got {s}")));
    }
    if d == 0 {
        return Err(invalid("d", "must be at least 1"));
    }
    Ok(())
}

pub fn vartheta(r: f64, k: u64, s: f64, d: usize) -> Result<LogReal> {
    Ok(vartheta_eval(r, k, s, d)?.value)
}

/// `ϑ_R(α)` for `|α| = k`:
/// `(π^d/(2^d m!) ∫_0^∞ e^{−R(ln⟨r⟩)^θ} r^m dr)^{1/2}`, `m = k + d − 1`,
/// `θ = 1/(1 − 2s)`, by composite Simpson in `u = ln r`.
pub fn vartheta_eval(r: f64, k: u64, s: f64, d: usize) -> Result<VarthetaEval> {
    validate(r, s, d)?;
    let m = k + d as u64 - 1;
    let f = Integrand {
        r,
        theta: 1.0 / (1.0 - 2.0 * s),
        m1: m as f64 + 1.0,
    };

    let (mut lo, mut hi) = (-1.0, 1.0);
    let mut widen = 0;
    while !(f.dg(lo) > 0.0) || !(f.dg(hi) < 0.0) {
        if widen == 2000 {
            return Err(Error::WindowNotFound);
        }
        if !(f.dg(lo) > 0.0) {
            lo *= 2.0;
        }
        if !(f.dg(hi) < 0.0) {
            hi *= 2.0;
        }
        widen += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f.dg(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u_star = 0.5 * (lo + hi);
    let l_star = ln_bracket(u_star);
    let g_star = f.g(u_star);
    let delta = |u: f64| f.delta(u, u_star, l_star);

    // curvature scale, then double outwards until the integrand is negligible
    let h = 1e-4 * u_star.abs().max(1.0);
    let curvature = -(f.dg(u_star + h) - f.dg(u_star - h)) / (2.0 * h);
    let sigma = if curvature > 0.0 {
        curvature.sqrt().recip()
    } else {
        1.0
    };
    let reach = |sign: f64| {
        let mut w = sigma;
        while delta(u_star + sign * w) > -WINDOW_DEPTH {
            w *= 2.0;
        }
        w
    };
    let (left, right) = (reach(-1.0), reach(1.0));
    let (a, b) = (u_star - left, u_star + right);

    let step0 = left.min(right) / MIN_NODES_PER_HALF;
    let mut n = (((b - a) / step0).ceil() as usize).max(2);
    n += n % 2;
    let mut prev = simpson(&delta, a, b, n).ln();
    let mut self_check = f64::INFINITY;
    for _ in 0..MAX_HALVINGS {
        n *= 2;
        let next = simpson(&delta, a, b, n).ln();
        self_check = (next - prev).abs();
        prev = next;
        if self_check <= STEP_TOLERANCE {
            break;
        }
    }
    let df = d as f64;
    let ln_sq = df * PI.ln() - df * 2f64.ln() - ln_factorial(m) + g_star + prev;
    Ok(VarthetaEval {
        value: LogReal::from_ln(0.5 * ln_sq),
        u_star,
        self_check,
        nodes: n + 1,
    })
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut total = f(a).exp() + f(b).exp();
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        total += w * f(a + i as f64 * h).exp();
    }
    total * h / 3.0
}

/// Exponents and constants of the two-sided `ϑ` estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SandwichConstants {
    pub a1: f64,
    pub a2: f64,
    /// Supremum of the admissible lower constants.
    pub c1_max: f64,
    pub c2: f64,
}

/// `a₁ = a₂ = 1/(2s) − 1`, `C₁ = θ^{−1/(2s)}(θ/μ − 1)`,
/// `c₂ = 2^{1/(2s)−1} θ^{−1/(2s)}(θ − 1)`.
pub fn vartheta_sandwich_constants(s: f64, mu: f64) -> Result<SandwichConstants> {
    if !(s > 0.0 && s < 0.5) {
        return Err(invalid("s", format!("must lie in (0, 1/2), got {s}")));
    }
    let theta = 1.0 / (1.0 - 2.0 * s);
    if !(mu > 1.0 && mu < theta) {
        return Err(Error::PreconditionViolation(format!(
            "mu must lie in (1, θ) = (1, {theta}), got {mu}"
        )));
    }
    let p = 1.0 / (2.0 * s);
    let a = p - 1.0;
    Ok(SandwichConstants {
        a1: a,
        a2: a,
        c1_max: theta.powf(-p) * (theta / mu - 1.0),
        c2: 2f64.powf(p - 1.0) * theta.powf(-p) * (theta - 1.0),
    })
}

/// Share of `C₁` used as the lower constant.
pub const C1_MARGIN: f64 = 0.9;

#[derive(Clone, Debug, PartialEq)]
pub struct VarthetaSandwich {
    pub r: f64,
    pub s: f64,
    pub d: usize,
    pub mu: f64,
    pub constants: SandwichConstants,
    pub c1: f64,
    pub evals: Vec<VarthetaEval>,
    pub lower: FittedBound,
    pub upper: FittedBound,
}

impl VarthetaSandwich {
    pub fn bracketed(&self) -> bool {
        self.lower.reports.iter().all(|r| r.pass) && self.upper.reports.iter().all(|r| r.pass)
    }

    pub fn max_self_check(&self) -> f64 {
        self.evals.iter().map(|e| e.self_check).fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.lower.pass() && self.upper.pass()
    }

    /// `k,R,s,log_vartheta,lower_env,upper_env,pass`; envelopes include the
    /// fitted constants.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,R,s,log_vartheta,lower_env,upper_env,pass\n");
        let stable = self.lower.stable && self.upper.stable;
        for (lo, up) in self.lower.reports.iter().zip(&self.upper.reports) {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                lo.key,
                csv_float(self.r),
                csv_float(self.s),
                csv_float(lo.rhs.ln_abs()),
                csv_float(lo.lhs.ln_abs()),
                csv_float(up.rhs.ln_abs()),
                stable && lo.pass && up.pass
            );
        }
        out
    }
}

/// Default `μ = (1 + θ)/2`, the midpoint of its admissible range.
pub fn default_mu(s: f64) -> f64 {
    0.5 * (1.0 + 1.0 / (1.0 - 2.0 * s))
}

/// Fits `C_L e^{c₁k^{1/(2s)}/R^{a₁}} ≤ ϑ_R(k) ≤ C_U e^{c₂k^{1/(2s)}/R^{a₂}}`
/// with `c₁ = 0.9 C₁`.
pub fn vartheta_sandwich_check(
    r: f64,
    s: f64,
    d: usize,
    k_grid: &[u64],
    mu: Option<f64>,
) -> Result<VarthetaSandwich> {
    validate(r, s, d)?;
    if k_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if k_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("k_grid", "must be strictly ascending"));
    }
    let mu = mu.unwrap_or_else(|| default_mu(s));
    let constants = vartheta_sandwich_constants(s, mu)?;
    let c1 = C1_MARGIN * constants.c1_max;
    let p = 1.0 / (2.0 * s);
    let evals = k_grid
        .iter()
        .map(|&k| vartheta_eval(r, k, s, d))
        .collect::<Result<Vec<_>>>()?;
    let sample = |c: f64, a: f64| {
        k_grid
            .iter()
            .zip(&evals)
            .map(|(&k, e)| {
                let env = c * (k as f64).powf(p) / r.powf(a);
                EnvelopeSample::new(k as f64, e.value, LogReal::from_ln(env))
                    .with_param("self_check", e.self_check)
            })
            .collect::<Vec<_>>()
    };
    let lower = fit_envelope(sample(c1, constants.a1), Envelope::Lower);
    let upper = fit_envelope(sample(constants.c2, constants.a2), Envelope::Upper);
    Ok(VarthetaSandwich {
        r,
        s,
        d,
        mu,
        constants,
        c1,
        evals,
        lower,
        upper,
    })
}
