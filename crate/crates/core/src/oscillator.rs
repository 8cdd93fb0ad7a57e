//! Powers of the harmonic oscillator `H = |x|² − Δ` in the Hermite basis,
//! and both directions of the equivalence between coefficient decay
//! `|c_α| ≲ r^{|α|}/√(α!)` and the growth of `‖H^N f‖`.

use crate::asymptotics::theta_constant;
use crate::error::{invalid, Error, Result};
use crate::fit::fit_line;
use crate::hermite::{DegreeProfile, HermiteExpansion, LawFamily, MultiIndex};
use crate::lognum::{ln_factorial, LogReal};
use crate::report::{fit_envelope, Envelope, EnvelopeSample, FittedBound};
use crate::CoefficientLaw;

/// `‖H^N f‖_{L²}` on a grid of `N`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormSequence {
    pub d: usize,
    pub values: Vec<(u32, LogReal)>,
}

impl NormSequence {
    pub fn from_expansion(f: &HermiteExpansion, n_grid: &[u32]) -> Self {
        let profile = f.degree_profile();
        NormSequence {
            d: f.dimension(),
            values: n_grid.iter().map(|&n| (n, profile.power_norm(n))).collect(),
        }
    }

    /// `ln ‖H^N f‖` second differences along a grid of consecutive `N`.
    pub fn second_differences(&self) -> Vec<f64> {
        self.values
            .windows(3)
            .map(|w| w[0].1.ln_abs() - 2.0 * w[1].1.ln_abs() + w[2].1.ln_abs())
            .collect()
    }
}

/// `(Σ_α (2|α|+d)^{2N} |c_α|²)^{1/2}`, summed degree by degree.
pub fn h_power_norm(f: &HermiteExpansion, n: u32) -> LogReal {
    f.degree_profile().power_norm(n)
}

/// Exponent on `r` in the bound sequence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BoundExponent {
    /// `r^{N/ln N}`, as in the coefficient-to-norm statement.
    #[default]
    Forward,
    /// `r^{2N/ln N}`, as in the hypothesis of the norm-to-coefficient step.
    Reverse,
}

impl BoundExponent {
    fn factor(self) -> f64 {
        match self {
            BoundExponent::Forward => 1.0,
            BoundExponent::Reverse => 2.0,
        }
    }
}

/// `2^N r^{N/ln N} (2N/ln N)^{N(1 − 1/ln N)}`.
pub fn thm_bound(n: u64, r: f64) -> Result<LogReal> {
    thm_bound_with(n, r, BoundExponent::Forward)
}

pub fn thm_bound_with(n: u64, r: f64, exponent: BoundExponent) -> Result<LogReal> {
    if n < 3 {
        return Err(Error::DomainError { n });
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("must be positive, got {r}")));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    Ok(LogReal::from_ln(
        nf * std::f64::consts::LN_2
            + exponent.factor() * nf / ln_n * r.ln()
            + nf * (1.0 - 1.0 / ln_n) * (2.0 * nf / ln_n).ln(),
    ))
}

/// `ε_N = (ln N/(2N))^{N/ln N}`.
pub fn epsilon_n(n: u64) -> Result<LogReal> {
    if n < 3 {
        return Err(Error::DomainError { n });
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    Ok(LogReal::from_ln(nf / ln_n * (ln_n / (2.0 * nf)).ln()))
}

const TRUNCATION_TOLERANCE: f64 = 1e-9;
const MAX_TRUNCATION: usize = 1 << 22;

/// `‖H^N f‖²` for the geometric law, doubling the truncation degree from
/// `max(4N, 50)` until the log moves by less than `1e-9`.
pub fn geometric_power_norm_sq(c: f64, r: f64, d: usize, n: u32) -> Result<(LogReal, usize)> {
    let mut m = (4 * n as usize).max(50);
    let mut prev = DegreeProfile::geometric(c, r, d, m).power_norm(n).powf(2.0);
    loop {
        let next_m = 2 * m;
        let next = DegreeProfile::geometric(c, r, d, next_m)
            .power_norm(n)
            .powf(2.0);
        let delta = (next.ln_abs() - prev.ln_abs()).abs();
        if delta < TRUNCATION_TOLERANCE {
            return Ok((next, next_m));
        }
        if next_m >= MAX_TRUNCATION {
            return Err(Error::TruncationInsufficient {
                degree: next_m,
                delta,
            });
        }
        m = next_m;
        prev = next;
    }
}

/// `ln` of `2^{2N}(2N/ln N)^{2N(1−1/ln N)}(r₀²θ(r₀²))^{2N/ln N} r₀²/(r₀² − (dr)²)`.
pub fn forward_bound_ln(n: u64, d: usize, r: f64, r0: f64, theta_r0sq: f64) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    let r0sq = r0 * r0;
    let dr = d as f64 * r;
    2.0 * nf * std::f64::consts::LN_2
        + 2.0 * nf * (1.0 - 1.0 / ln_n) * (2.0 * nf / ln_n).ln()
        + 2.0 * nf / ln_n * (r0sq * theta_r0sq).ln()
        + (r0sq / (r0sq - dr * dr)).ln()
}

/// Fits the constant in `‖H^N f‖² ≤ C · bound(N)` for a geometric law.
pub fn forward_check(
    law: &CoefficientLaw,
    d: usize,
    n_grid: &[u64],
    r0: f64,
) -> Result<FittedBound> {
    let LawFamily::Geometric { c, r } = law.family else {
        return Err(invalid("law", "forward check needs a geometric law"));
    };
    law.validate()?;
    if d == 0 {
        return Err(invalid("d", "must be at least 1"));
    }
    if !(d as f64 * r < r0) {
        return Err(Error::PreconditionViolation(format!(
            "forward bound needs d·r < r0, got d·r = {}, r0 = {r0}",
            d as f64 * r
        )));
    }
    if n_grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let theta = theta_constant(r0 * r0).theta;
    let mut samples = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        if n < 3 {
            return Err(Error::DomainError { n });
        }
        let (lhs, degree) = geometric_power_norm_sq(c, r, d, n as u32)?;
        let rhs = LogReal::from_ln(forward_bound_ln(n, d, r, r0, theta));
        samples.push(
            EnvelopeSample::new(n as f64, lhs, rhs)
                .with_param("r", r)
                .with_param("r0", r0)
                .with_param("d", d as f64)
                .with_param("truncation", degree as f64),
        );
    }
    Ok(fit_envelope(samples, Envelope::Upper))
}

/// `min_N ‖H^N f‖ / (2|α|)^N` over the stored grid.
pub fn reverse_coeff_bound(norms: &NormSequence, alpha: &MultiIndex) -> Result<LogReal> {
    let k = alpha.degree();
    if k == 0 {
        return Err(invalid("alpha", "needs |α| ≥ 1"));
    }
    Ok(reverse_coeff_bound_at(norms, k)?.0)
}

/// Same as [`reverse_coeff_bound`] for a degree `k`, with the minimising `N`.
pub fn reverse_coeff_bound_at(norms: &NormSequence, k: u32) -> Result<(LogReal, u32)> {
    let ln_2k = (2.0 * k as f64).ln();
    norms
        .values
        .iter()
        .map(|&(n, v)| (v.scale_ln(-(n as f64) * ln_2k), n))
        .min_by(|a, b| a.0.cmp_value(b.0))
        .ok_or(Error::EmptyGrid)
}

/// Treats the bound sequence with parameter `r` as the norms themselves and
/// fits the constant in `min_N norm(N)/(2k)^N ≤ C r^k k^{−k/2+1}`.
pub fn reverse_check(
    norm_bound_r: f64,
    alpha_degrees: &[u32],
    n_max: u64,
    exponent: BoundExponent,
) -> Result<FittedBound> {
    if alpha_degrees.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let values = (3..=n_max)
        .map(|n| Ok((n as u32, thm_bound_with(n, norm_bound_r, exponent)?)))
        .collect::<Result<Vec<_>>>()?;
    let norms = NormSequence { d: 1, values };
    let mut samples = Vec::with_capacity(alpha_degrees.len());
    for &k in alpha_degrees {
        if k == 0 {
            return Err(invalid("alpha_degrees", "degrees must be at least 1"));
        }
        let (bound, n_star) = reverse_coeff_bound_at(&norms, k)?;
        let kf = k as f64;
        let envelope = LogReal::from_ln(kf * norm_bound_r.ln() + (1.0 - kf / 2.0) * kf.ln());
        samples.push(
            EnvelopeSample::new(kf, bound, envelope)
                .with_param("r", norm_bound_r)
                .with_param("n_star", n_star as f64),
        );
    }
    Ok(fit_envelope(samples, Envelope::Upper))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecayClass {
    /// `|c_α| ≲ r^{|α|}/√(α!)` for some `r`.
    JSomeR,
    /// The same for every `r`.
    J0EveryR,
    /// `|c_α| ≲ e^{−r|α|^{1/(2s)}}`.
    PilipovicS,
    Finite,
    None,
}

impl DecayClass {
    pub fn label(self) -> &'static str {
        match self {
            DecayClass::JSomeR => "J_some_r",
            DecayClass::J0EveryR => "J0_every_r",
            DecayClass::PilipovicS => "pilipovic_s",
            DecayClass::Finite => "finite",
            DecayClass::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayClassification {
    pub class: DecayClass,
    pub fitted_r: Option<f64>,
    pub fitted_s: Option<f64>,
    /// RMS residual of the factorial model `ln C + k ln r − ½ ln k!`, the
    /// smaller of the single fit and the separate fits on the two halves.
    pub residual_j: f64,
    /// RMS residual of the power model `ln C − r k^{1/(2s)}`.
    pub residual_pilipovic: f64,
    /// Factorial-model `r` on the lower and upper half of the nonzero degrees.
    pub r_bottom: Option<f64>,
    pub r_top: Option<f64>,
}

pub const J0_DRIFT_FACTOR: f64 = 0.5;
const MIN_NONZERO_DEGREES: usize = 8;
const MIN_CLASSIFY_DEGREE: usize = 20;
/// A fit whose RMS residual exceeds this share of the profile's range
/// explains nothing.
const NONE_RESIDUAL_SHARE: f64 = 0.05;

fn power_model(ks: &[f64], ys: &[f64], p: f64) -> Option<crate::fit::LineFit> {
    let xs: Vec<f64> = ks.iter().map(|k| k.powf(p)).collect();
    fit_line(&xs, ys)
}

/// Best `p ∈ [1, 20]` for `y ≈ a − b k^p`, by a log-grid scan refined with
/// golden section on the residual.
fn fit_power_model(ks: &[f64], ys: &[f64]) -> Option<(f64, crate::fit::LineFit)> {
    const SCAN: usize = 240;
    let sse = |p: f64| power_model(ks, ys, p).map_or(f64::INFINITY, |f| f.sse);
    let span = 20f64.ln();
    let ps: Vec<f64> = (0..=SCAN)
        .map(|i| (span * i as f64 / SCAN as f64).exp())
        .collect();
    let (best_i, _) = ps
        .iter()
        .enumerate()
        .map(|(i, &p)| (i, sse(p)))
        .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
    let lo = ps[best_i.saturating_sub(1)].ln();
    let hi = ps[(best_i + 1).min(SCAN)].ln();
    let (u, neg) = crate::asymptotics::lemma::golden_max(|u| -sse(u.exp()), lo, hi);
    let p = if -neg <= sse(ps[best_i]) {
        u.exp()
    } else {
        ps[best_i]
    };
    power_model(ks, ys, p).map(|f| (p, f))
}

/// Fits the degree profile `ln|c|_k = max_{|α|=k} ln|c_α|` against the
/// factorial and the stretched-exponential laws.
pub fn classify_decay(f: &HermiteExpansion) -> Result<DecayClassification> {
    let m = f.max_degree();
    if m < MIN_CLASSIFY_DEGREE {
        return Err(invalid(
            "max_degree",
            format!("need at least {MIN_CLASSIFY_DEGREE}, got {m}"),
        ));
    }
    let mut profile = vec![f64::NEG_INFINITY; m + 1];
    for (a, c) in f.iter() {
        let k = a.degree() as usize;
        profile[k] = profile[k].max(c.ln_abs());
    }
    let nonzero: Vec<usize> = (0..=m).filter(|&k| profile[k].is_finite()).collect();
    let finite = DecayClassification {
        class: DecayClass::Finite,
        fitted_r: None,
        fitted_s: None,
        residual_j: 0.0,
        residual_pilipovic: 0.0,
        r_bottom: None,
        r_top: None,
    };
    if nonzero.iter().all(|&k| k <= m / 2) {
        return Ok(finite);
    }
    if nonzero.len() < MIN_NONZERO_DEGREES {
        return Err(Error::InsufficientData {
            found: nonzero.len(),
            needed: MIN_NONZERO_DEGREES,
        });
    }
    let ks: Vec<f64> = nonzero.iter().map(|&k| k as f64).collect();
    let ys: Vec<f64> = nonzero.iter().map(|&k| profile[k]).collect();
    let j_ys: Vec<f64> = nonzero
        .iter()
        .zip(&ys)
        .map(|(&k, y)| y + 0.5 * ln_factorial(k as u64))
        .collect();
    let j_fit = fit_line(&ks, &j_ys).expect("at least 8 distinct degrees");
    let (p, p_fit) = fit_power_model(&ks, &ys).expect("at least 8 distinct degrees");
    let half = ks.len() / 2;
    let bottom = fit_line(&ks[..half], &j_ys[..half]);
    let top = fit_line(&ks[half..], &j_ys[half..]);
    let r_bottom = bottom.map(|f| f.slope.exp());
    let r_top = top.map(|f| f.slope.exp());
    // the factorial model may change r between the halves: that drift is
    // what separates every-r from some-r decay
    let j_rms = match (bottom, top) {
        (Some(b), Some(t)) => j_fit.rms.min(((b.sse + t.sse) / ks.len() as f64).sqrt()),
        _ => j_fit.rms,
    };
    let range = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        - ys.iter().copied().fold(f64::INFINITY, f64::min);
    let explained = |rms: f64| rms <= NONE_RESIDUAL_SHARE * range.max(1.0);

    let mut out = DecayClassification {
        class: DecayClass::None,
        fitted_r: None,
        fitted_s: None,
        residual_j: j_rms,
        residual_pilipovic: p_fit.rms,
        r_bottom,
        r_top,
    };
    if j_rms <= p_fit.rms {
        if explained(j_rms) {
            out.fitted_r = Some(j_fit.slope.exp());
            out.class = match (r_bottom, r_top) {
                (Some(b), Some(t)) if t < J0_DRIFT_FACTOR * b => DecayClass::J0EveryR,
                _ => DecayClass::JSomeR,
            };
        }
    } else if explained(p_fit.rms) && p_fit.slope < 0.0 {
        out.class = DecayClass::PilipovicS;
        out.fitted_r = Some(-p_fit.slope);
        out.fitted_s = Some(1.0 / (2.0 * p));
    }
    Ok(out)
}
