//! Bell numbers, Dobinski sums, the Berend–Tassa envelopes and the `C_N`
//! comparison sequence.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{invalid, Error, Result};
use crate::lognum::{concave_peak, ln_factorial, log_sum_positive_series, LogReal};
use crate::report::CheckReport;

pub const BELL_MAX: usize = 200;

/// `B_1, ..., B_{n_max}` from the Bell triangle.
pub fn bell_numbers(n_max: usize) -> Result<Vec<BigUint>> {
    if n_max > BELL_MAX {
        return Err(invalid("n_max", format!("at most {BELL_MAX}, got {n_max}")));
    }
    let mut out = Vec::with_capacity(n_max);
    let mut row = vec![BigUint::one()];
    for _ in 0..n_max {
        let mut next = Vec::with_capacity(row.len() + 1);
        next.push(row.last().expect("rows are nonempty").clone());
        for v in &row {
            let sum = next.last().expect("just pushed") + v;
            next.push(sum);
        }
        out.push(next[0].clone());
        row = next;
    }
    Ok(out)
}

/// Natural log of a big integer, accurate to `f64` precision.
pub fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits in f64").ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().expect("64-bit mantissa");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// `(1/e) Σ_{k≥1} k^p / k!` with `p = 2N` when doubling, else `p = N`.
pub fn dobinski(n: u64, exponent_doubling: bool) -> Result<LogReal> {
    if n == 0 {
        return Err(invalid("N", "must be at least 1"));
    }
    let p = if exponent_doubling { 2 * n } else { n } as f64;
    let term = |k: u64| {
        if k == 0 {
            f64::NEG_INFINITY
        } else {
            p * (k as f64).ln() - ln_factorial(k)
        }
    };
    let peak = concave_peak(term);
    let sum = log_sum_positive_series(|k| LogReal::from_ln(term(k as u64)), peak as usize)?;
    Ok(sum.scale_ln(-1.0))
}

/// `2N ln(0.792·2N / ln(2N+1))`.
pub fn berend_tassa_upper_ln(n: u64) -> f64 {
    let two_n = 2.0 * n as f64;
    two_n * (0.792 * two_n / (two_n + 1.0).ln()).ln()
}

/// `2N ln(2N / (e ln 2N))`.
pub fn berend_tassa_lower_ln(n: u64) -> f64 {
    let two_n = 2.0 * n as f64;
    two_n * (two_n / (std::f64::consts::E * two_n.ln())).ln()
}

/// Two rows per `N`: `lower ≤ B_{2N}` (key `N`, param `side = 0`) and
/// `B_{2N} < upper` (`side = 1`).
pub fn berend_tassa_check(n_grid: &[u64]) -> Result<Vec<CheckReport>> {
    let mut out = Vec::with_capacity(2 * n_grid.len());
    for &n in n_grid {
        let b = dobinski(n, true)?;
        let lower = LogReal::from_ln(berend_tassa_lower_ln(n));
        let upper = LogReal::from_ln(berend_tassa_upper_ln(n));
        out.push(CheckReport::new(n as f64, lower, b, 1.0).with_param("side", 0.0));
        let mut strict = CheckReport::new(n as f64, b, upper, 1.0).with_param("side", 1.0);
        strict.pass = strict.ratio_log < 0.0;
        out.push(strict);
    }
    Ok(out)
}

/// `ln C_N` for `C_N = (r/2)(ln(2N+1)/ln N)^{ln N} ln N / e^{ln N(1 + ln λ)}`.
pub fn cn_ln(n: u64, r: f64, lambda: f64) -> f64 {
    let nf = n as f64;
    let ln_n = nf.ln();
    (r / 2.0).ln() + ln_n * ((2.0 * nf + 1.0).ln() / ln_n).ln() + ln_n.ln()
        - ln_n * (1.0 + lambda.ln())
}

#[derive(Clone, Debug, PartialEq)]
pub struct CnRow {
    pub n: u64,
    /// `ln(C_N · N^a)`.
    pub ln_value: f64,
    /// Relative log error of the rewriting identity at this `N`.
    pub identity_error: f64,
}

impl CnRow {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }
}

/// `ln` of both sides of
/// `(2N/ln N)^{2N}(r ln N/(2N))^{2N/ln N} = (2λN/ln(2N+1))^{2N} C_N^{2N/ln N}`.
pub fn cn_identity_sides(n: u64, r: f64, lambda: f64) -> (f64, f64) {
    let nf = n as f64;
    let ln_n = nf.ln();
    let e = 2.0 * nf / ln_n;
    let left = 2.0 * nf * (2.0 * nf / ln_n).ln() + e * (r * ln_n / (2.0 * nf)).ln();
    let right =
        2.0 * nf * (2.0 * lambda * nf / (2.0 * nf + 1.0).ln()).ln() + e * cn_ln(n, r, lambda);
    (left, right)
}

/// `C_N · N^a` on the grid, each row carrying the identity residual.
pub fn remark_cn_limit(r: f64, lambda: f64, a: f64, n_grid: &[u64]) -> Result<Vec<CnRow>> {
    if !(r > 0.0) {
        return Err(Error::PreconditionViolation(format!(
            "r must be positive, got {r}"
        )));
    }
    if !(lambda > (-1f64).exp() && lambda < 1.0) {
        return Err(Error::PreconditionViolation(format!(
            "lambda must lie in (1/e, 1), got {lambda}"
        )));
    }
    if !(a > 0.0 && a < 1.0 + lambda.ln()) {
        return Err(Error::PreconditionViolation(format!(
            "a must lie in (0, 1 + ln lambda) = (0, {}), got {a}",
            1.0 + lambda.ln()
        )));
    }
    n_grid
        .iter()
        .map(|&n| {
            if n < 2 {
                return Err(invalid("N", format!("needs ln N > 0, got {n}")));
            }
            let (left, right) = cn_identity_sides(n, r, lambda);
            Ok(CnRow {
                n,
                ln_value: cn_ln(n, r, lambda) + a * (n as f64).ln(),
                identity_error: (left - right).abs() / left.abs().max(1.0),
            })
        })
        .collect()
}

/// Whether `C_N · N^a` is strictly decreasing along the rows.
pub fn cn_decreasing(rows: &[CnRow]) -> bool {
    rows.windows(2).all(|w| w[1].ln_value < w[0].ln_value)
}

/// `ln((2N/(e ln 2N))^{2N}) − ln f(2N/ln N)` with `f(t) = t^{2N−t}`.
pub fn lower_envelope_gap_ln(n: u64) -> f64 {
    let nf = n as f64;
    let t = 2.0 * nf / nf.ln();
    berend_tassa_lower_ln(n) - (2.0 * nf - t) * t.ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_bell_numbers() {
        let b = bell_numbers(10).unwrap();
        let small: Vec<u64> = b.iter().map(|x| x.to_u64().unwrap()).collect();
        assert_eq!(&small[..5], &[1, 2, 5, 15, 52]);
        assert_eq!(small[9], 115_975);
        assert!(bell_numbers(201).is_err());
    }

    #[test]
    fn triangle_matches_binomial_recurrence() {
        // B_{n+1} = Σ_k C(n, k) B_k
        let mut bell = vec![BigUint::one()];
        for n in 0..200usize {
            let mut binom = BigUint::one();
            let mut next = BigUint::from(0u8);
            for (k, b) in bell.iter().enumerate() {
                next += &binom * b;
                binom = binom * (n - k) / (k + 1);
            }
            bell.push(next);
        }
        assert_eq!(bell_numbers(200).unwrap(), bell[1..].to_vec());
    }

    #[test]
    fn dobinski_examples() {
        assert!((dobinski(1, true).unwrap().to_f64() - 2.0).abs() < 1e-12);
        assert!((dobinski(2, true).unwrap().to_f64() - 15.0).abs() < 1e-11);
        assert!((dobinski(3, false).unwrap().to_f64() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn dobinski_matches_exact_bell() {
        let b = bell_numbers(200).unwrap();
        for n in 1..=100u64 {
            let exact = ln_biguint(&b[2 * n as usize - 1]);
            let approx = dobinski(n, true).unwrap().ln_abs();
            assert!((approx - exact).abs() <= 1e-10 * exact.max(1.0), "N = {n}");
        }
    }

    #[test]
    fn envelopes_at_one() {
        assert!((berend_tassa_upper_ln(1).exp() - 2.0788).abs() < 1e-4);
        assert!((berend_tassa_lower_ln(1).exp() - 1.126).abs() < 1e-3);
        let rows = berend_tassa_check(&[1, 50, 500]).unwrap();
        assert!(rows.iter().all(|r| r.pass));
    }

    #[test]
    fn upper_gap_grows() {
        let gaps: Vec<f64> = [10, 100, 500]
            .iter()
            .map(|&n| berend_tassa_upper_ln(n) - dobinski(n, true).unwrap().ln_abs())
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn identity_and_decay() {
        let grid: Vec<u64> = (2..=8).map(|e| 10u64.pow(e)).collect();
        let rows = remark_cn_limit(1.0, 0.5, 0.1, &grid).unwrap();
        assert!(rows.iter().all(|r| r.identity_error < 1e-9));
        assert!(cn_decreasing(&rows[1..]));
        let row = &remark_cn_limit(1.0, 0.5, 0.1, &[10_000]).unwrap()[0];
        assert!(row.identity_error < 1e-9);
    }

    #[test]
    fn parameter_guards() {
        assert!(remark_cn_limit(1.0, 0.3, 0.1, &[100]).is_err());
        assert!(remark_cn_limit(1.0, 0.5, 0.4, &[100]).is_err());
    }

    #[test]
    fn lower_envelope_is_little_o() {
        let gaps: Vec<f64> = [100u64, 10_000, 1_000_000]
            .iter()
            .map(|&n| lower_envelope_gap_ln(n))
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
        assert!(gaps[2] < -1e5);
    }
}
