use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::fit::fit_line;
use crate::report::csv_float;

use super::{eval_entire, EntireSeries, Polar};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrowthModel {
    /// `ln|F| ≈ R (ln⟨z⟩)^θ`.
    LogPower,
    /// `ln|F| ≈ R|z|`.
    ExpLinear,
    /// `ln|F| ≈ R|z|²`.
    ExpSquare,
}

impl GrowthModel {
    pub fn label(self) -> &'static str {
        match self {
            GrowthModel::LogPower => "log_power",
            GrowthModel::ExpLinear => "exp_linear",
            GrowthModel::ExpSquare => "exp_square",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelFit {
    pub model: GrowthModel,
    pub r_hat: f64,
    pub theta_hat: Option<f64>,
    /// `(Σ (M − M̂)² / Σ M²)^{1/2}` over the sampled radii.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub r_hat: f64,
    /// Present for `log_power` fits.
    pub theta_hat: Option<f64>,
    pub residual: f64,
    /// `|F|` stays bounded on the sampled radii; every model is flat.
    pub degenerate: bool,
    /// `(ρ, M(ρ))` with `M(ρ) = max ln|F|` over the sampled directions.
    pub samples: Vec<(f64, f64)>,
    pub candidates: Vec<ModelFit>,
}

impl GrowthFit {
    /// `rho,logM,model,R_hat,theta_hat,residual`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rho,logM,model,R_hat,theta_hat,residual\n");
        let theta = self.theta_hat.map_or_else(|| "nan".to_string(), csv_float);
        for &(rho, m) in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                csv_float(rho),
                csv_float(m),
                self.model.label(),
                csv_float(self.r_hat),
                theta,
                csv_float(self.residual)
            );
        }
        out
    }
}

/// `ln⟨ρ⟩ = ½ ln(1 + ρ²)`.
fn ln_bracket(rho: f64) -> f64 {
    if rho > 1.0 {
        rho.ln() + 0.5 * (rho * rho).recip().ln_1p()
    } else {
        0.5 * (rho * rho).ln_1p()
    }
}

/// `count`-th element of the van der Corput sequence in `base`.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut out = 0.0;
    let mut scale = 1.0 / base as f64;
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale /= base as f64;
    }
    out
}

const PRIMES: [u64; 7] = [2, 3, 5, 7, 11, 13, 17];

/// Unit directions in `ℂ^d`. For `d = 1`, `count` equally spaced phases.
/// For `d ≥ 2`: the positive diagonal, the coordinate axes, then Halton
/// points mapped to moduli on the sphere and phases on the torus.
pub fn direction_set(d: usize, count: usize) -> Vec<Vec<Polar>> {
    assert!(d >= 1);
    if d == 1 {
        return (0..count)
            .map(|j| vec![Polar::new(1.0, 2.0 * PI * j as f64 / count as f64)])
            .collect();
    }
    assert!(2 * d <= PRIMES.len() + 1, "direction set supports d <= 4");
    let mut out = vec![vec![Polar::new((d as f64).sqrt().recip(), 0.0); d]];
    for i in 0..d {
        let mut v = vec![Polar::new(0.0, 0.0); d];
        v[i] = Polar::new(1.0, 0.0);
        out.push(v);
    }
    let mut i = 1u64;
    while out.len() < count.max(d + 1) {
        let weights: Vec<f64> = (0..d)
            .map(|j| 1e-3 + radical_inverse(i, PRIMES[j]))
            .collect();
        let norm = weights.iter().sum::<f64>();
        let v = (0..d)
            .map(|j| {
                let phase = if j == 0 {
                    0.0
                } else {
                    2.0 * PI * radical_inverse(i, PRIMES[d - 1 + j])
                };
                Polar::new((weights[j] / norm).sqrt(), phase)
            })
            .collect();
        out.push(v);
        i += 1;
    }
    out
}

/// `max ln|F(ρu)|` over the given directions.
pub fn max_modulus(f: &EntireSeries, rho: f64, directions: &[Vec<Polar>]) -> f64 {
    directions
        .iter()
        .map(|u| {
            let z: Vec<Polar> = u
                .iter()
                .map(|p| Polar::new(rho * p.modulus, p.phase))
                .collect();
            eval_entire(f, &z).0
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

fn m_space_residual(ms: &[f64], predicted: impl Iterator<Item = f64>) -> f64 {
    let num: f64 = ms.iter().zip(predicted).map(|(m, p)| (m - p).powi(2)).sum();
    let den: f64 = ms.iter().map(|m| m * m).sum();
    (num / den).sqrt()
}

/// Largest `ln M(ρ)` treated as bounded growth.
const DEGENERATE_LEVEL: f64 = 1e-9;

/// Fits `log_power`, `exp_linear` and `exp_square` to `M(ρ)` and keeps the
/// smallest relative residual.
pub fn growth_fit(f: &EntireSeries, radii: &[f64], directions: usize) -> Result<GrowthFit> {
    if radii.len() < 6 {
        return Err(Error::InsufficientRadii(format!(
            "got {} radii",
            radii.len()
        )));
    }
    if radii.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
        return Err(Error::InsufficientRadii("radii must be positive".into()));
    }
    let lo = radii.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi / lo < 100.0 {
        return Err(Error::InsufficientRadii(format!(
            "span {} is below 100",
            hi / lo
        )));
    }
    let dirs = direction_set(f.dimension(), directions);
    let samples: Vec<(f64, f64)> = radii
        .iter()
        .map(|&rho| (rho, max_modulus(f, rho, &dirs)))
        .collect();
    let ms: Vec<f64> = samples.iter().map(|s| s.1).collect();

    if ms.iter().all(|&m| m.abs() <= DEGENERATE_LEVEL) || ms.iter().any(|m| !m.is_finite()) {
        let fit = ModelFit {
            model: GrowthModel::LogPower,
            r_hat: 0.0,
            theta_hat: None,
            residual: 0.0,
        };
        return Ok(GrowthFit {
            model: fit.model,
            r_hat: 0.0,
            theta_hat: None,
            residual: 0.0,
            degenerate: true,
            samples,
            candidates: vec![fit],
        });
    }

    let mut candidates = Vec::with_capacity(3);
    let positive: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(_, m)| *m > 0.0)
        .map(|&(rho, m)| (ln_bracket(rho).ln(), m.ln()))
        .collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
    if let Some(line) = fit_line(&xs, &ys) {
        let (r_hat, theta) = (line.intercept.exp(), line.slope);
        let predicted = radii.iter().map(|&rho| r_hat * ln_bracket(rho).powf(theta));
        candidates.push(ModelFit {
            model: GrowthModel::LogPower,
            r_hat,
            theta_hat: Some(theta),
            residual: m_space_residual(&ms, predicted),
        });
    }
    for (model, power) in [(GrowthModel::ExpLinear, 1), (GrowthModel::ExpSquare, 2)] {
        let xs: Vec<f64> = radii.iter().map(|r| r.powi(power)).collect();
        if let Some(line) = fit_line(&xs, &ms) {
            candidates.push(ModelFit {
                model,
                r_hat: line.slope,
                theta_hat: None,
                residual: m_space_residual(
                    &ms,
                    xs.iter().map(|&x| line.intercept + line.slope * x),
                ),
            });
        }
    }
    let best = *candidates
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .ok_or_else(|| Error::InsufficientRadii("no model could be fitted".into()))?;
    Ok(GrowthFit {
        model: best.model,
        r_hat: best.r_hat,
        theta_hat: best.theta_hat,
        residual: best.residual,
        degenerate: false,
        samples,
        candidates,
    })
}

/// Log-spaced radii, ten per decade, from `lo` to `hi` inclusive.
pub(crate) fn log_radii(lo: f64, hi: f64) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (10.0 * decades).round().max(1.0) as usize;
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

/// Radii on which the truncated series still represents `F`: the largest
/// radius (capped at `10^12`) whose dominant term has degree at most half
/// the truncation degree, down five decades. Polynomials use `10..10^6`.
pub fn default_radii(f: &EntireSeries) -> Vec<f64> {
    let profile = f.degree_profile_ln();
    let m = f.max_degree();
    let has_tail = profile[m / 2 + 1..].iter().any(|v| v.is_finite());
    if !has_tail {
        return log_radii(10.0, 1e6);
    }
    let dominant = |rho: f64| {
        let lr = rho.ln();
        profile
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .map(|(k, v)| (k, v + k as f64 * lr))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
            .0
    };
    let mut hi = 1e12;
    while hi > 1e-6 && dominant(hi) > m / 2 {
        hi /= 10f64.powf(0.1);
    }
    let lo = (hi / 1e5).max(1.0).min(hi / 100.0);
    log_radii(lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntireClass {
    /// `|F| ≲ e^{R(ln⟨z⟩)^{1/(1−2s)}}` for some `R`.
    As,
    /// The same for every `R`.
    A0s,
    Outside,
}

impl EntireClass {
    pub fn label(self) -> &'static str {
        match self {
            EntireClass::As => "A_s",
            EntireClass::A0s => "A_0s",
            EntireClass::Outside => "outside",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntireClassification {
    pub class: EntireClass,
    pub fit: GrowthFit,
    /// `R` with `θ` fixed at `1/(1−2s)`, on the lower and upper half of the radii.
    pub r_bottom: Option<f64>,
    pub r_top: Option<f64>,
}

pub const THETA_TOLERANCE: f64 = 0.2;
pub const R_DRIFT_FACTOR: f64 = 0.5;

/// `R` in `M ≈ R (ln⟨ρ⟩)^θ` with `θ` fixed, fitted in log space.
fn fixed_theta_r(samples: &[(f64, f64)], theta: f64) -> Option<f64> {
    let logs: Vec<f64> = samples
        .iter()
        .filter(|(_, m)| *m > 0.0)
        .map(|&(rho, m)| m.ln() - theta * ln_bracket(rho).ln())
        .collect();
    if logs.is_empty() {
        return None;
    }
    Some((logs.iter().sum::<f64>() / logs.len() as f64).exp())
}

/// Places `F` relative to the classes with exponent `θ_s = 1/(1−2s)`:
/// bounded or slower-than-`θ_s` growth is in every class, a `log_power`
/// fit near `θ_s` is split by the drift of `R` across the radii, anything
/// else is outside.
pub fn classify_entire(
    f: &EntireSeries,
    s: f64,
    radii: Option<&[f64]>,
) -> Result<EntireClassification> {
    if !(s > 0.0 && s < 0.5) {
        return Err(crate::error::invalid(
            "s",
            format!("must lie in (0, 1/2), got {s}"),
        ));
    }
    let theta_s = 1.0 / (1.0 - 2.0 * s);
    let owned;
    let radii = match radii {
        Some(r) => r,
        None => {
            owned = default_radii(f);
            &owned
        }
    };
    let fit = growth_fit(f, radii, 16)?;
    let mut out = EntireClassification {
        class: EntireClass::Outside,
        fit,
        r_bottom: None,
        r_top: None,
    };
    if out.fit.degenerate {
        out.class = EntireClass::A0s;
        return Ok(out);
    }
    if out.fit.model != GrowthModel::LogPower {
        return Ok(out);
    }
    let theta_hat = out.fit.theta_hat.expect("log_power fits carry θ");
    if theta_hat > (1.0 + THETA_TOLERANCE) * theta_s {
        return Ok(out);
    }
    if theta_hat < (1.0 - THETA_TOLERANCE) * theta_s {
        out.class = EntireClass::A0s;
        return Ok(out);
    }
    let half = out.fit.samples.len() / 2;
    out.r_bottom = fixed_theta_r(&out.fit.samples[..half], theta_s);
    out.r_top = fixed_theta_r(&out.fit.samples[half..], theta_s);
    out.class = match (out.r_bottom, out.r_top) {
        (Some(b), Some(t)) if t < R_DRIFT_FACTOR * b => EntireClass::A0s,
        _ => EntireClass::As,
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bargmann::bargmann_from_expansion;
    use crate::hermite::{realize_law, CoefficientLaw};

    fn image(law: CoefficientLaw, degree: usize) -> EntireSeries {
        bargmann_from_expansion(&realize_law(&law, 1, degree).unwrap())
    }

    #[test]
    fn exponential_is_linear() {
        let f = image(CoefficientLaw::geometric(1.0, 1.0), 200);
        let fit = growth_fit(&f, &default_radii(&f), 16).unwrap();
        assert_eq!(fit.model, GrowthModel::ExpLinear);
        assert!((fit.r_hat - 1.0).abs() < 0.05);
    }

    #[test]
    fn sub_exponential_is_log_power() {
        let f = image(CoefficientLaw::sub_exponential(1.0, 0.25), 60);
        let fit = growth_fit(&f, &log_radii(10.0, 1e6), 16).unwrap();
        assert_eq!(fit.model, GrowthModel::LogPower);
        assert!((fit.theta_hat.unwrap() - 2.0).abs() < 0.3, "{fit:?}");
    }

    #[test]
    fn constant_is_degenerate() {
        let f = image(CoefficientLaw::hermite_sum(&[0]), 10);
        let fit = growth_fit(&f, &log_radii(10.0, 1e6), 16).unwrap();
        assert!(fit.degenerate);
        assert_eq!(fit.model, GrowthModel::LogPower);
        assert!(fit.r_hat <= 1e-6);
    }

    #[test]
    fn image_list_consistency() {
        for r in [0.5, 1.0, 2.0] {
            let f = image(CoefficientLaw::geometric(1.0, r), 400);
            let fit = growth_fit(&f, &default_radii(&f), 16).unwrap();
            assert_eq!(fit.model, GrowthModel::ExpLinear, "geometric r = {r}");
        }
        for r in [0.5, 1.0, 2.0] {
            let f = image(CoefficientLaw::sub_exponential(r, 0.5), 4000);
            let fit = growth_fit(&f, &default_radii(&f), 16).unwrap();
            assert_eq!(
                fit.model,
                GrowthModel::ExpSquare,
                "e^(-rk) r = {r}: {:?}",
                fit.candidates
            );
        }
        for (r, s) in [(1.0, 0.25), (0.5, 0.2), (2.0, 0.3)] {
            let f = image(CoefficientLaw::sub_exponential(r, s), 60);
            let fit = growth_fit(&f, &log_radii(10.0, 1e6), 16).unwrap();
            assert_eq!(fit.model, GrowthModel::LogPower, "r = {r}, s = {s}");
        }
    }

    #[test]
    fn classification_examples() {
        let sub = image(CoefficientLaw::sub_exponential(1.0, 0.25), 60);
        let radii = log_radii(10.0, 1e6);
        assert_eq!(
            classify_entire(&sub, 0.25, Some(&radii)).unwrap().class,
            EntireClass::As
        );

        let poly = image(CoefficientLaw::hermite_sum(&[0, 1]), 20);
        for s in [0.1, 0.25, 0.4] {
            assert_eq!(
                classify_entire(&poly, s, None).unwrap().class,
                EntireClass::A0s
            );
        }

        let geo = image(CoefficientLaw::geometric(1.0, 1.0), 200);
        assert_eq!(
            classify_entire(&geo, 0.25, None).unwrap().class,
            EntireClass::Outside
        );
    }

    #[test]
    fn radii_guards() {
        let f = image(CoefficientLaw::geometric(1.0, 1.0), 50);
        assert!(growth_fit(&f, &[1.0, 2.0, 3.0], 16).is_err());
        assert!(growth_fit(&f, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], 16).is_err());
    }

    #[test]
    fn directions_are_unit_and_fixed() {
        for d in 1..=3 {
            let dirs = direction_set(d, 24);
            assert!(dirs.len() >= 16);
            for u in &dirs {
                let n: f64 = u.iter().map(|p| p.modulus * p.modulus).sum();
                assert!((n - 1.0).abs() < 1e-12);
            }
            assert_eq!(dirs, direction_set(d, 24));
        }
    }

    #[test]
    fn two_dimensional_exponential() {
        // e^{r(z₁+z₂)} peaks on the diagonal: M(ρ) = r √2 ρ
        let g = realize_law(&CoefficientLaw::geometric(1.0, 0.5), 2, 120).unwrap();
        let f = bargmann_from_expansion(&g);
        let fit = growth_fit(&f, &log_radii(0.5, 50.0), 24).unwrap();
        assert_eq!(fit.model, GrowthModel::ExpLinear);
        assert!((fit.r_hat - 0.5 * 2f64.sqrt()).abs() < 0.05 * 0.5 * 2f64.sqrt());
    }
}
