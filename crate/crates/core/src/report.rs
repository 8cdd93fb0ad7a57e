//! Bound-verification records and the fitted-constant reading of `≲`.
//!
//! An inequality `A(n) ≲ B(n)` over a grid is checked by fitting the single
//! best constant `C` with `A ≤ C·B` on the whole grid and then asking whether
//! that constant is *stable*: the constant the top half of the grid needs
//! may not be more than [`STABILITY_FACTOR`] times worse than the one the
//! bottom half needs. Bounds that only hold with a constant that keeps
//! deteriorating along the grid are flagged.

use std::fmt::Write as _;

use crate::lognum::LogReal;

/// Slack on the fitted constant: each row passes iff `ratio ≤ C·(1 + 1e-6)`.
pub const FIT_TOLERANCE: f64 = 1e-6;

/// Allowed deterioration of the fitted constant from bottom to top half.
pub const STABILITY_FACTOR: f64 = 10.0;

/// One bound verification.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckReport {
    /// Grid variable the row belongs to (`N`, `k`, ...).
    pub key: f64,
    pub lhs: LogReal,
    pub rhs: LogReal,
    /// `ln lhs − ln rhs`.
    pub ratio_log: f64,
    pub params: Vec<(String, f64)>,
    pub pass: bool,
}

impl CheckReport {
    /// Row with `pass = ratio_log ≤ ln(tolerance_factor)`; the tolerance is
    /// recorded under `tolerance`.
    pub fn new(key: f64, lhs: LogReal, rhs: LogReal, tolerance_factor: f64) -> Self {
        let ratio_log = log_ratio(lhs, rhs);
        CheckReport {
            key,
            lhs,
            rhs,
            ratio_log,
            params: vec![("tolerance".into(), tolerance_factor)],
            pass: ratio_log <= tolerance_factor.ln(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn param(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

fn log_ratio(lhs: LogReal, rhs: LogReal) -> f64 {
    match (lhs.is_zero(), rhs.is_zero()) {
        (true, true) => 0.0,
        (true, false) => f64::NEG_INFINITY,
        (false, true) => f64::INFINITY,
        (false, false) => lhs.ln_abs() - rhs.ln_abs(),
    }
}

/// Which side of the inequality the fitted envelope sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Envelope {
    /// `quantity ≤ C · envelope`.
    Upper,
    /// `C · envelope ≤ quantity`.
    Lower,
}

/// Raw inputs for one grid point of an envelope fit.
#[derive(Clone, Debug)]
pub struct EnvelopeSample {
    pub key: f64,
    pub quantity: LogReal,
    pub envelope: LogReal,
    pub params: Vec<(String, f64)>,
}

impl EnvelopeSample {
    pub fn new(key: f64, quantity: LogReal, envelope: LogReal) -> Self {
        EnvelopeSample {
            key,
            quantity,
            envelope,
            params: Vec::new(),
        }
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.push((name.to_string(), value));
        self
    }
}

/// A grid of checks sharing one fitted constant.
#[derive(Clone, Debug, PartialEq)]
pub struct FittedBound {
    pub envelope: Envelope,
    /// `ln C` over the full grid.
    pub constant_log: f64,
    /// `ln C` needed by the first half of the grid alone.
    pub bottom_constant_log: f64,
    /// `ln C` needed by the second half of the grid alone.
    pub top_constant_log: f64,
    pub stable: bool,
    pub reports: Vec<CheckReport>,
}

impl FittedBound {
    pub fn pass(&self) -> bool {
        self.stable && self.reports.iter().all(|r| r.pass)
    }

    pub fn constant(&self) -> LogReal {
        LogReal::from_ln(self.constant_log)
    }

    /// Per-row `ln(quantity / envelope)` before the constant is applied.
    pub fn raw_ratios(&self) -> Vec<f64> {
        self.reports
            .iter()
            .map(|r| {
                r.param("raw_ratio_log")
                    .expect("fitted rows carry raw ratios")
            })
            .collect()
    }
}

/// Fits the best constant for `samples` (sorted by key) and builds one
/// report per sample with the constant folded into the envelope side.
pub fn fit_envelope(samples: Vec<EnvelopeSample>, envelope: Envelope) -> FittedBound {
    let raw: Vec<f64> = samples
        .iter()
        .map(|s| log_ratio(s.quantity, s.envelope))
        .collect();
    let extreme = |xs: &[f64]| match envelope {
        Envelope::Upper => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Envelope::Lower => xs.iter().copied().fold(f64::INFINITY, f64::min),
    };
    let half = raw.len() / 2;
    let constant_log = extreme(&raw);
    let bottom = extreme(&raw[..half]);
    let top = extreme(&raw[half..]);
    let limit = STABILITY_FACTOR.ln();
    let stable = half == 0
        || match envelope {
            Envelope::Upper => top - bottom <= limit,
            Envelope::Lower => bottom - top <= limit,
        };
    let tolerance = 1.0 + FIT_TOLERANCE;
    let reports = samples
        .into_iter()
        .zip(&raw)
        .map(|(s, &raw_ratio)| {
            let scaled = s.envelope.scale_ln(constant_log);
            let (lhs, rhs) = match envelope {
                Envelope::Upper => (s.quantity, scaled),
                Envelope::Lower => (scaled, s.quantity),
            };
            let mut report = CheckReport::new(s.key, lhs, rhs, tolerance)
                .with_param("raw_ratio_log", raw_ratio)
                .with_param("constant_log", constant_log);
            report.params.extend(s.params);
            report
        })
        .collect();
    FittedBound {
        envelope,
        constant_log,
        bottom_constant_log: bottom,
        top_constant_log: top,
        stable,
        reports,
    }
}

fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Plain decimal for grid keys that are integers, scientific otherwise.
pub fn fmt_key(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        format!("{}", x as i64)
    } else {
        fmt_f64(x)
    }
}

/// Rows `key,lhs_log,rhs_log,ratio_log,pass` under a header whose first
/// column is `key_name`.
pub fn reports_to_csv(key_name: &str, reports: &[CheckReport]) -> String {
    let mut out = format!("{key_name},lhs_log,rhs_log,ratio_log,pass\n");
    for r in reports {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            fmt_key(r.key),
            fmt_f64(r.lhs.ln_abs()),
            fmt_f64(r.rhs.ln_abs()),
            fmt_f64(r.ratio_log),
            r.pass
        );
    }
    out
}

/// Shared float formatting for CSV writers: 17 significant digits,
/// locale-independent.
pub fn csv_float(x: f64) -> String {
    fmt_f64(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples(raw: &[f64]) -> Vec<EnvelopeSample> {
        raw.iter()
            .enumerate()
            .map(|(i, &r)| EnvelopeSample::new(i as f64, LogReal::from_ln(r), LogReal::ONE))
            .collect()
    }

    #[test]
    fn decaying_ratio_is_stable_for_upper() {
        let fit = fit_envelope(samples(&[3.0, 2.0, 0.0, -5.0]), Envelope::Upper);
        assert_eq!(fit.constant_log, 3.0);
        assert!(fit.stable);
        assert!(fit.pass());
        assert!(fit.reports.iter().all(|r| r.ratio_log <= 1e-6));
    }

    #[test]
    fn growing_ratio_is_unstable_for_upper() {
        let fit = fit_envelope(samples(&[0.0, 0.5, 2.0, 4.0]), Envelope::Upper);
        assert!(!fit.stable);
        assert!(!fit.pass());
    }

    #[test]
    fn lower_envelope_mirrors() {
        let fit = fit_envelope(samples(&[0.0, 0.5, 2.0, 4.0]), Envelope::Lower);
        assert_eq!(fit.constant_log, 0.0);
        assert!(fit.stable);
        let fit = fit_envelope(samples(&[0.0, -1.0, -2.0, -9.0]), Envelope::Lower);
        assert!(!fit.stable);
    }

    #[test]
    fn csv_layout() {
        let r = CheckReport::new(5.0, LogReal::from_ln(1.5), LogReal::from_ln(2.0), 1.0);
        let csv = reports_to_csv("N", &[r]);
        assert_eq!(
            csv,
            "N,lhs_log,rhs_log,ratio_log,pass\n5,1.5000000000000000e0,2.0000000000000000e0,-5.0000000000000000e-1,true\n"
        );
    }
}
