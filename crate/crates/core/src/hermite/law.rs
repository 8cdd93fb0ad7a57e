use crate::error::{invalid, Result};
use crate::lognum::LogReal;

use super::{enumerate_multiindices, HermiteExpansion, MultiIndex};

/// Parametric family of coefficient magnitudes `|c_α|`.
#[derive(Clone, Debug, PartialEq)]
pub enum LawFamily {
    /// `c_α = C r^{|α|} / √(α!)`.
    Geometric { c: f64, r: f64 },
    /// `c_α = e^{−r |α|^{1/(2s)}}`. `s = 1/2` gives the `e^{−r|α|}` probe.
    SubExponential { r: f64, s: f64 },
    /// Explicit table; unlisted indices are zero.
    Finite(Vec<(MultiIndex, f64)>),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SignRule {
    #[default]
    AllPositive,
    /// `(−1)^{|α|}` times the magnitude.
    Alternating,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientLaw {
    pub family: LawFamily,
    pub sign_rule: SignRule,
}

impl CoefficientLaw {
    pub fn geometric(c: f64, r: f64) -> Self {
        Self::from_family(LawFamily::Geometric { c, r })
    }

    pub fn sub_exponential(r: f64, s: f64) -> Self {
        Self::from_family(LawFamily::SubExponential { r, s })
    }

    pub fn finite(table: Vec<(MultiIndex, f64)>) -> Self {
        Self::from_family(LawFamily::Finite(table))
    }

    /// Sum of the listed univariate Hermite functions, each with weight one.
    pub fn hermite_sum(degrees: &[u32]) -> Self {
        Self::finite(
            degrees
                .iter()
                .map(|&k| (MultiIndex::single(k), 1.0))
                .collect(),
        )
    }

    pub fn from_family(family: LawFamily) -> Self {
        CoefficientLaw {
            family,
            sign_rule: SignRule::AllPositive,
        }
    }

    pub fn with_sign_rule(mut self, sign_rule: SignRule) -> Self {
        self.sign_rule = sign_rule;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match &self.family {
            LawFamily::Geometric { c, r } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(invalid("C", format!("must be positive, got {c}")));
                }
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(invalid("r", format!("must be positive, got {r}")));
                }
            }
            LawFamily::SubExponential { r, s } => {
                if !(*r > 0.0 && r.is_finite()) {
                    return Err(invalid("r", format!("must be positive, got {r}")));
                }
                if !(*s > 0.0 && *s <= 0.5) {
                    return Err(invalid("s", format!("must lie in (0, 1/2], got {s}")));
                }
            }
            LawFamily::Finite(table) => {
                if table.iter().any(|(_, v)| !v.is_finite()) {
                    return Err(invalid("table", "coefficients must be finite"));
                }
            }
        }
        Ok(())
    }

    /// `|c_α|` in the log domain (parametric families only).
    pub fn magnitude(&self, alpha: &MultiIndex) -> LogReal {
        match &self.family {
            LawFamily::Geometric { c, r } => LogReal::from_ln(
                c.ln() + alpha.degree() as f64 * r.ln() - 0.5 * alpha.ln_factorial(),
            ),
            LawFamily::SubExponential { r, s } => {
                LogReal::from_ln(-r * (alpha.degree() as f64).powf(1.0 / (2.0 * s)))
            }
            LawFamily::Finite(table) => table
                .iter()
                .find(|(a, _)| a == alpha)
                .map_or(LogReal::ZERO, |(_, v)| LogReal::from_f64(*v).abs()),
        }
    }

    fn signed(&self, alpha: &MultiIndex, magnitude: LogReal) -> LogReal {
        match self.sign_rule {
            SignRule::AllPositive => magnitude,
            SignRule::Alternating if alpha.degree() % 2 == 1 => -magnitude,
            SignRule::Alternating => magnitude,
        }
    }
}

/// Tabulates `law` on every `|α| ≤ max_degree` in dimension `d`.
///
/// Finite tables keep the signs they were given; the sign rule then
/// multiplies them.
pub fn realize_law(law: &CoefficientLaw, d: usize, max_degree: usize) -> Result<HermiteExpansion> {
    law.validate()?;
    let indices = enumerate_multiindices(d, max_degree)?;
    if let LawFamily::Finite(table) = &law.family {
        for (a, _) in table {
            if a.dim() != d {
                return Err(invalid(
                    "table",
                    format!("index {:?} is not {d}-dimensional", a.entries()),
                ));
            }
            if a.degree() as usize > max_degree {
                return Err(invalid(
                    "table",
                    format!("index {:?} exceeds max degree {max_degree}", a.entries()),
                ));
            }
        }
        let mut expansion = HermiteExpansion::zeros(d, max_degree)?;
        for (a, v) in table {
            let value = law.signed(a, LogReal::from_f64(*v));
            expansion.set(a, expansion.coeff(a) + value);
        }
        return Ok(expansion);
    }
    let coeffs = indices
        .iter()
        .map(|a| law.signed(a, law.magnitude(a)))
        .collect();
    HermiteExpansion::from_parts(d, max_degree, indices, coeffs)
}
