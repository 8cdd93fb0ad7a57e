//! Browser bindings: the lemma profile `m(t)`, the `ϑ` sandwich and growth
//! fits of Bargmann images, each returned as JSON for a canvas page.

use pilipovic::asymptotics::{argmax_m, t_alpha, LemmaFunction};
use pilipovic::bargmann::{
    bargmann_from_expansion, classify_entire, default_radii, vartheta_sandwich_check,
};
use pilipovic::hermite::realize_law;
use pilipovic::CoefficientLaw;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize, Debug)]
pub struct LemmaProfile {
    pub t: Vec<f64>,
    pub m: Vec<f64>,
    pub t1: f64,
    pub tstar: f64,
    pub t2: f64,
}

/// `m(t)` on `points` samples over `[t₁/2, 2t₂]`, with the interval ends
/// and the maximiser.
pub fn lemma_profile(n: u64, r: f64, points: usize) -> pilipovic::Result<LemmaProfile> {
    let l = LemmaFunction::new(n, r)?;
    let (t1, t2) = (t_alpha(&l, 1.0), t_alpha(&l, 2.0));
    let tstar = argmax_m(&l)?;
    let (lo, hi) = (0.5 * t1.min(tstar), 2.0 * t2.max(tstar));
    let points = points.max(2);
    let t: Vec<f64> = (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect();
    let m = t.iter().map(|&x| l.m(x)).collect();
    Ok(LemmaProfile {
        t,
        m,
        t1,
        tstar,
        t2,
    })
}

#[derive(Serialize, Debug)]
pub struct SandwichCurve {
    pub k: Vec<u64>,
    pub log_vartheta: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub bracketed: bool,
    pub stable: bool,
    pub max_self_check: f64,
}

/// `ln ϑ_R(k)` for `k = step, 2·step, …, k_max` between its fitted envelopes.
pub fn sandwich_curve(
    big_r: f64,
    s: f64,
    k_max: u64,
    step: u64,
) -> pilipovic::Result<SandwichCurve> {
    let step = step.max(1);
    let ks: Vec<u64> = (1..=k_max / step).map(|i| i * step).collect();
    let w = vartheta_sandwich_check(big_r, s, 1, &ks, None)?;
    Ok(SandwichCurve {
        log_vartheta: w.evals.iter().map(|e| e.value.ln_abs()).collect(),
        lower: w.lower.reports.iter().map(|x| x.lhs.ln_abs()).collect(),
        upper: w.upper.reports.iter().map(|x| x.rhs.ln_abs()).collect(),
        bracketed: w.bracketed(),
        stable: w.lower.stable && w.upper.stable,
        max_self_check: w.max_self_check(),
        k: ks,
    })
}

#[derive(Serialize, Debug)]
pub struct GrowthCurve {
    pub rho: Vec<f64>,
    pub log_m: Vec<f64>,
    pub model: &'static str,
    pub r_hat: f64,
    pub theta_hat: Option<f64>,
    pub residual: f64,
    pub class: &'static str,
}

/// Growth of the Bargmann image of a one-variable law (`geometric` or
/// `subexp`, the latter of order `s`), classified against order `s`.
pub fn growth_curve(law: &str, r: f64, s: f64) -> pilipovic::Result<GrowthCurve> {
    let (law, degree) = match law {
        "geometric" => (CoefficientLaw::geometric(1.0, r), 400),
        "subexp" => (CoefficientLaw::sub_exponential(r, s), 60),
        other => {
            return Err(pilipovic::Error::InvalidParameter {
                name: "law",
                reason: format!("expected geometric or subexp, got {other}"),
            })
        }
    };
    let f = bargmann_from_expansion(&realize_law(&law, 1, degree)?);
    let radii = default_radii(&f);
    let c = classify_entire(&f, s, Some(&radii))?;
    Ok(GrowthCurve {
        rho: c.fit.samples.iter().map(|p| p.0).collect(),
        log_m: c.fit.samples.iter().map(|p| p.1).collect(),
        model: c.fit.model.label(),
        r_hat: c.fit.r_hat,
        theta_hat: c.fit.theta_hat,
        residual: c.fit.residual,
        class: c.class.label(),
    })
}

fn to_js<T: Serialize>(value: pilipovic::Result<T>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e.to_string()))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = lemmaProfile)]
pub fn lemma_profile_js(n: u32, r: f64, points: u32) -> Result<String, JsError> {
    to_js(lemma_profile(n as u64, r, points as usize))
}

#[wasm_bindgen(js_name = sandwichCurve)]
pub fn sandwich_curve_js(big_r: f64, s: f64, k_max: u32, step: u32) -> Result<String, JsError> {
    to_js(sandwich_curve(big_r, s, k_max as u64, step as u64))
}

#[wasm_bindgen(js_name = growthCurve)]
pub fn growth_curve_js(law: &str, r: f64, s: f64) -> Result<String, JsError> {
    to_js(growth_curve(law, r, s))
}
