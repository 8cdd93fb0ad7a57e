//! `Σ_k (a₁k + a₂)^{2N} r^{2k} / k!` and its closed-form majorant.

use crate::error::{invalid, Error, Result};
use crate::lognum::{concave_peak, ln_factorial, log_sum_positive_series, LogReal};
use crate::report::{fit_envelope, Envelope, EnvelopeSample, FittedBound};

use super::lemma::theta_constant;

/// `ln` of the `k`-th term, with `0⁰ = 1`.
fn series_term_ln(a1: f64, a2: f64, r: f64, n: u64, k: u64) -> f64 {
    let base = a1 * k as f64 + a2;
    let power = if n == 0 {
        0.0
    } else {
        2.0 * n as f64 * base.ln()
    };
    power + 2.0 * k as f64 * r.ln() - ln_factorial(k)
}

pub fn series_sum(a1: f64, a2: f64, r: f64, n: u64) -> Result<LogReal> {
    if !(a1 > 0.0 && a1.is_finite()) {
        return Err(invalid("a1", format!("must be positive, got {a1}")));
    }
    if !(a2 >= 0.0 && a2.is_finite()) {
        return Err(invalid("a2", format!("must be nonnegative, got {a2}")));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(invalid("r", format!("must be positive, got {r}")));
    }
    let peak = concave_peak(|k| series_term_ln(a1, a2, r, n, k));
    log_sum_positive_series(
        |k| LogReal::from_ln(series_term_ln(a1, a2, r, n, k as u64)),
        peak as usize,
    )
}

/// `ln` of `a₁^{2N}(2N/ln N)^{2N(1−1/ln N)}(r₀²θ(r₀²))^{2N/ln N} r₀²/(r₀² − r²)`
/// with the `θ` of the maximum lemma.
pub fn series_bound_ln(a1: f64, r: f64, r0: f64, n: u64, theta_r0sq: f64) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    let r0sq = r0 * r0;
    2.0 * nf * a1.ln()
        + 2.0 * nf * (1.0 - 1.0 / ln_n) * (2.0 * nf / ln_n).ln()
        + 2.0 * nf / ln_n * (r0sq * theta_r0sq).ln()
        + (r0sq / (r0sq - r * r)).ln()
}

/// Fits the constant in `series_sum ≤ C · bound` over `n_grid`.
pub fn series_bound_check(
    a1: f64,
    a2: f64,
    r: f64,
    r0: f64,
    n_grid: &[u64],
) -> Result<FittedBound> {
    if !(r > 0.0 && r < r0) {
        return Err(Error::PreconditionViolation(format!(
            "series bound needs 0 < r < r0, got r = {r}, r0 = {r0}"
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
        let lhs = series_sum(a1, a2, r, n)?;
        let rhs = LogReal::from_ln(series_bound_ln(a1, r, r0, n, theta));
        samples.push(
            EnvelopeSample::new(n as f64, lhs, rhs)
                .with_param("a1", a1)
                .with_param("a2", a2)
                .with_param("r", r)
                .with_param("r0", r0),
        );
    }
    Ok(fit_envelope(samples, Envelope::Upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn partial_sum(a1: f64, a2: f64, r: f64, n: i32, terms: u64) -> f64 {
        let mut total = 0.0;
        let mut fact = 1.0;
        for k in 0..terms {
            if k > 0 {
                fact *= k as f64;
            }
            total += (a1 * k as f64 + a2).powi(2 * n) * r.powi(2 * k as i32) / fact;
        }
        total
    }

    #[test]
    fn small_examples() {
        assert!((series_sum(1.0, 0.0, 1.0, 1).unwrap().to_f64() - 2.0 * E).abs() < 1e-12);
        assert!((series_sum(1.0, 0.0, 1.0, 0).unwrap().to_f64() - E).abs() < 1e-12);
        let v = series_sum(2.0, 3.0, 0.5, 2).unwrap().to_f64();
        let oracle = partial_sum(2.0, 3.0, 0.5, 2, 80);
        assert!((v - oracle).abs() < 1e-12 * oracle);
    }

    #[test]
    fn matches_partial_sums() {
        for (a1, a2, r, n) in [(1.0, 2.0, 0.8, 3), (0.5, 0.0, 1.3, 5), (3.0, 1.0, 0.2, 4)] {
            let v = series_sum(a1, a2, r, n as u64).unwrap().to_f64();
            let oracle = partial_sum(a1, a2, r, n, 150);
            assert!((v - oracle).abs() < 1e-11 * oracle, "{a1} {a2} {r} {n}");
        }
    }

    #[test]
    fn scaling_identity() {
        // s_{a1,a2} = a1^{2N} s_{1,a2/a1}
        let lhs = series_sum(2.0, 5.0, 0.3, 40).unwrap().ln_abs();
        let rhs = 80.0 * 2f64.ln() + series_sum(1.0, 2.5, 0.3, 40).unwrap().ln_abs();
        assert!((lhs - rhs).abs() < 1e-10 * lhs.abs());
    }

    #[test]
    fn bound_passes_with_stable_constant() {
        let grid = [10, 30, 100, 300, 1000, 3000, 10_000];
        let fit = series_bound_check(1.0, 0.0, 0.3, 0.5, &grid).unwrap();
        assert!(fit.pass(), "{fit:?}");
    }

    #[test]
    fn dropping_the_a1_factor_fails() {
        let grid = [10, 30, 100, 300, 1000, 3000, 10_000];
        let theta = theta_constant(0.25).theta;
        let samples: Vec<EnvelopeSample> = grid
            .iter()
            .map(|&n| {
                let lhs = series_sum(2.0, 5.0, 0.3, n).unwrap();
                let bound = series_bound_ln(2.0, 0.3, 0.5, n, theta) - 2.0 * n as f64 * 2f64.ln();
                EnvelopeSample::new(n as f64, lhs, LogReal::from_ln(bound))
            })
            .collect();
        assert!(!fit_envelope(samples, Envelope::Upper).stable);
        assert!(series_bound_check(2.0, 5.0, 0.3, 0.5, &grid)
            .unwrap()
            .pass());
    }

    #[test]
    fn guards() {
        assert!(matches!(
            series_bound_check(1.0, 0.0, 0.5, 0.5, &[10]),
            Err(Error::PreconditionViolation(_))
        ));
        assert!(series_sum(0.0, 1.0, 0.5, 3).is_err());
    }
}
