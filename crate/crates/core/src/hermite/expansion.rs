use std::fmt::Write as _;

use crate::error::{invalid, Error, Result};
use crate::lognum::{ln_factorial, log_sum_positive_series, LogReal};

use super::{enumerate_multiindices, MultiIndex};

/// Dense coefficient table `α ↦ c_α` for every `|α| ≤ max_degree`, stored in
/// graded-lex order.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteExpansion {
    dimension: usize,
    max_degree: usize,
    indices: Vec<MultiIndex>,
    coeffs: Vec<LogReal>,
}

impl HermiteExpansion {
    pub fn zeros(d: usize, max_degree: usize) -> Result<Self> {
        let indices = enumerate_multiindices(d, max_degree)?;
        let coeffs = vec![LogReal::ZERO; indices.len()];
        Ok(HermiteExpansion {
            dimension: d,
            max_degree,
            indices,
            coeffs,
        })
    }

    /// Univariate expansion from plain coefficients `c_0, c_1, ...`.
    pub fn from_univariate(coeffs: &[f64]) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(invalid("coeffs", "at least one coefficient is required"));
        }
        let max_degree = coeffs.len() - 1;
        Self::from_parts(
            1,
            max_degree,
            (0..=max_degree as u32).map(MultiIndex::single).collect(),
            coeffs.iter().map(|&c| LogReal::from_f64(c)).collect(),
        )
    }

    pub(crate) fn from_parts(
        dimension: usize,
        max_degree: usize,
        indices: Vec<MultiIndex>,
        coeffs: Vec<LogReal>,
    ) -> Result<Self> {
        debug_assert_eq!(indices.len(), coeffs.len());
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Ok(HermiteExpansion {
            dimension,
            max_degree,
            indices,
            coeffs,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn coeffs(&self) -> &[LogReal] {
        &self.coeffs
    }

    /// Coefficients as `f64`, underflowing to zero where needed.
    pub fn coeffs_f64(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, LogReal)> + '_ {
        self.indices.iter().zip(self.coeffs.iter().copied())
    }

    fn position(&self, alpha: &MultiIndex) -> Option<usize> {
        if alpha.dim() != self.dimension {
            return None;
        }
        self.indices.binary_search(alpha).ok()
    }

    /// `c_α`, zero outside the table.
    pub fn coeff(&self, alpha: &MultiIndex) -> LogReal {
        self.position(alpha)
            .map_or(LogReal::ZERO, |i| self.coeffs[i])
    }

    /// Panics if `alpha` lies outside the table.
    pub fn set(&mut self, alpha: &MultiIndex, value: LogReal) {
        let i = self
            .position(alpha)
            .unwrap_or_else(|| panic!("{:?} is outside the table", alpha.entries()));
        self.coeffs[i] = value;
    }

    /// Multiplies every `c_α` by `weight(|α|)`.
    pub fn scale_by_degree(&self, weight: impl Fn(u32) -> LogReal) -> Self {
        let coeffs = self.iter().map(|(a, c)| c * weight(a.degree())).collect();
        HermiteExpansion {
            coeffs,
            ..self.clone()
        }
    }

    /// Largest degree carrying a nonzero coefficient.
    pub fn last_nonzero_degree(&self) -> Option<u32> {
        self.iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, _)| a.degree())
            .max()
    }

    /// Per-degree squared mass `Σ_{|α|=k} |c_α|²`.
    pub fn degree_profile(&self) -> DegreeProfile {
        let mut buckets: Vec<Vec<LogReal>> = vec![Vec::new(); self.max_degree + 1];
        for (a, c) in self.iter() {
            if !c.is_zero() {
                buckets[a.degree() as usize].push(c.abs().powf(2.0));
            }
        }
        let sq_mass = buckets.into_iter().map(|b| b.into_iter().sum()).collect();
        DegreeProfile {
            dimension: self.dimension,
            sq_mass,
        }
    }

    /// `(Σ |c_α|²)^{1/2}`.
    pub fn l2_norm(&self) -> LogReal {
        self.degree_profile().l2_norm()
    }

    /// CSV with header `alpha_1,...,alpha_d,coeff`; coefficients carry 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.dimension {
            let _ = write!(out, "alpha_{i},");
        }
        out.push_str("coeff\n");
        for (a, c) in self.iter() {
            for e in a.entries() {
                let _ = write!(out, "{e},");
            }
            let _ = writeln!(out, "{:.16e}", c.to_f64());
        }
        out
    }

    /// Parses the [`to_csv`](Self::to_csv) format. Missing indices are zero;
    /// the truncation degree is the largest degree present.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Csv("empty input".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let d = cols.len().saturating_sub(1);
        let header_ok = d >= 1
            && cols.last() == Some(&"coeff")
            && cols[..d]
                .iter()
                .enumerate()
                .all(|(i, c)| *c == format!("alpha_{}", i + 1));
        if !header_ok {
            return Err(Error::Csv(format!("bad header `{header}`")));
        }
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != d + 1 {
                return Err(Error::Csv(format!(
                    "row {}: expected {} fields",
                    n + 2,
                    d + 1
                )));
            }
            let entries = fields[..d]
                .iter()
                .map(|f| f.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Error::Csv(format!("row {}: {e}", n + 2)))?;
            let value: f64 = fields[d]
                .parse()
                .map_err(|e| Error::Csv(format!("row {}: {e}", n + 2)))?;
            rows.push((MultiIndex::new(entries)?, value));
        }
        let max_degree = rows
            .iter()
            .map(|(a, _)| a.degree() as usize)
            .max()
            .unwrap_or(0);
        let mut out = Self::zeros(d, max_degree)?;
        let mut seen = std::collections::HashSet::new();
        for (a, v) in rows {
            if !seen.insert(a.clone()) {
                return Err(Error::Csv(format!("duplicate index {:?}", a.entries())));
            }
            out.set(&a, LogReal::from_f64(v));
        }
        Ok(out)
    }
}

/// `(Σ_α |c_α|²)^{1/2}`.
pub fn expansion_l2_norm(f: &HermiteExpansion) -> LogReal {
    f.l2_norm()
}

/// Squared coefficient mass grouped by total degree: `S_k = Σ_{|α|=k} |c_α|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeProfile {
    pub dimension: usize,
    pub sq_mass: Vec<LogReal>,
}

impl DegreeProfile {
    /// Profile of the geometric law `C r^{|α|}/√(α!)` up to degree `max_degree`,
    /// via `Σ_{|α|=k} 1/α! = d^k / k!`. Needs no index enumeration.
    pub fn geometric(c: f64, r: f64, d: usize, max_degree: usize) -> Self {
        let (lc, lr, ld) = (c.ln(), r.ln(), (d as f64).ln());
        let sq_mass = (0..=max_degree as u64)
            .map(|k| {
                let kf = k as f64;
                LogReal::from_ln(2.0 * lc + 2.0 * kf * lr + kf * ld - ln_factorial(k))
            })
            .collect();
        DegreeProfile {
            dimension: d,
            sq_mass,
        }
    }

    pub fn max_degree(&self) -> usize {
        self.sq_mass.len() - 1
    }

    fn weighted_sum(&self, weight_ln: impl Fn(u64) -> f64) -> LogReal {
        let last = self.max_degree();
        log_sum_positive_series(
            |k| match self.sq_mass.get(k) {
                Some(s) => s.scale_ln(weight_ln(k as u64)),
                None => LogReal::ZERO,
            },
            last,
        )
        .expect("finite profile of nonnegative terms")
    }

    pub fn l2_norm(&self) -> LogReal {
        self.weighted_sum(|_| 0.0).sqrt()
    }

    /// `‖H^N f‖_{L²} = (Σ_k (2k+d)^{2N} S_k)^{1/2}`.
    pub fn power_norm(&self, n: u32) -> LogReal {
        let d = self.dimension as f64;
        let two_n = 2.0 * n as f64;
        self.weighted_sum(|k| two_n * (2.0 * k as f64 + d).ln())
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{realize_law, CoefficientLaw};

    #[test]
    fn norms() {
        let h0 = realize_law(&CoefficientLaw::hermite_sum(&[0]), 1, 3).unwrap();
        assert!((expansion_l2_norm(&h0).to_f64() - 1.0).abs() < 1e-15);

        let g = realize_law(&CoefficientLaw::geometric(1.0, 1.0), 1, 60).unwrap();
        assert!((g.l2_norm().to_f64() - 0.5f64.exp()).abs() < 1e-14);

        let z = HermiteExpansion::zeros(2, 4).unwrap();
        assert!(z.l2_norm().is_zero());
    }

    #[test]
    fn multinomial_profile_matches_enumeration() {
        let (c, r, d, m) = (1.3, 0.6, 3, 10);
        let f = realize_law(&CoefficientLaw::geometric(c, r), d, m).unwrap();
        let from_table = f.degree_profile();
        let closed = DegreeProfile::geometric(c, r, d, m);
        for k in 0..=m {
            let (a, b) = (from_table.sq_mass[k].ln_abs(), closed.sq_mass[k].ln_abs());
            assert!((a - b).abs() < 1e-12, "degree {k}: {a} vs {b}");
        }
    }

    #[test]
    fn csv_round_trip() {
        let f = realize_law(&CoefficientLaw::geometric(0.8, 0.9), 2, 4).unwrap();
        let text = f.to_csv();
        assert!(text.starts_with("alpha_1,alpha_2,coeff\n"));
        let back = HermiteExpansion::from_csv(&text).unwrap();
        assert_eq!(back.max_degree(), 4);
        for ((a, x), (b, y)) in f.iter().zip(back.iter()) {
            assert_eq!(a, b);
            assert_eq!(x.to_f64(), y.to_f64());
        }
    }

    #[test]
    fn csv_seventeen_digits() {
        let f = HermiteExpansion::from_univariate(&[1.0 / 3.0]).unwrap();
        assert_eq!(f.to_csv(), "alpha_1,coeff\n0,3.3333333333333331e-1\n");
    }

    #[test]
    fn csv_errors() {
        assert!(HermiteExpansion::from_csv("").is_err());
        assert!(HermiteExpansion::from_csv("a,b\n").is_err());
        assert!(HermiteExpansion::from_csv("alpha_1,coeff\n1,2\n1,3\n").is_err());
        assert!(HermiteExpansion::from_csv("alpha_1,coeff\n1\n").is_err());
        let sparse = HermiteExpansion::from_csv("alpha_1,coeff\n3,2.0\n").unwrap();
        assert_eq!(sparse.coeffs_f64(), vec![0.0, 0.0, 0.0, 2.0]);
    }
}
