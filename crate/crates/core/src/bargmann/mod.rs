//! The Bargmann side: Hermite expansions as entire functions
//! `F(z) = Σ b_α z^α` with `b_α = c_α/√(α!)`, the radial weights `ϑ_R`, and
//! growth-class fitting.

mod growth;
mod vartheta;

pub use growth::{
    classify_entire, default_radii, direction_set, growth_fit, max_modulus, EntireClass,
    EntireClassification, GrowthFit, GrowthModel, ModelFit,
};
pub use vartheta::{
    vartheta, vartheta_eval, vartheta_sandwich_check, vartheta_sandwich_constants,
    SandwichConstants, VarthetaEval, VarthetaSandwich,
};

use std::f64::consts::PI;

use crate::hermite::{HermiteExpansion, MultiIndex};
use crate::lognum::{LogReal, Sign};

/// A complex number as modulus and phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Polar {
    pub modulus: f64,
    pub phase: f64,
}

impl Polar {
    pub fn new(modulus: f64, phase: f64) -> Self {
        Polar { modulus, phase }
    }

    pub fn real(x: f64) -> Self {
        if x < 0.0 {
            Polar::new(-x, PI)
        } else {
            Polar::new(x, 0.0)
        }
    }
}

/// Monomial coefficients of an entire function in `d` variables.
#[derive(Clone, Debug, PartialEq)]
pub struct EntireSeries {
    dimension: usize,
    max_degree: usize,
    indices: Vec<MultiIndex>,
    coeffs: Vec<LogReal>,
}

impl EntireSeries {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, LogReal)> + '_ {
        self.indices.iter().zip(self.coeffs.iter().copied())
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> LogReal {
        self.indices
            .binary_search(alpha)
            .map_or(LogReal::ZERO, |i| self.coeffs[i])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// `max_{|α|=k} ln|b_α|` for each degree `k`.
    pub fn degree_profile_ln(&self) -> Vec<f64> {
        let mut out = vec![f64::NEG_INFINITY; self.max_degree + 1];
        for (a, b) in self.iter() {
            let k = a.degree() as usize;
            out[k] = out[k].max(b.ln_abs());
        }
        out
    }
}

/// `b_α = c_α / √(α!)`.
pub fn bargmann_from_expansion(f: &HermiteExpansion) -> EntireSeries {
    let (indices, coeffs) = f
        .iter()
        .map(|(a, c)| (a.clone(), c.scale_ln(-0.5 * a.ln_factorial())))
        .unzip();
    EntireSeries {
        dimension: f.dimension(),
        max_degree: f.max_degree(),
        indices,
        coeffs,
    }
}

/// `(ln|F(z)|, arg F(z))`. Every term is formed in the log domain and the
/// terms are summed after shifting by the largest modulus, so `|F|` may lie
/// far outside the `f64` range. `F(z) = 0` gives `(−∞, 0)`.
pub fn eval_entire(f: &EntireSeries, z: &[Polar]) -> (f64, f64) {
    assert_eq!(z.len(), f.dimension, "point dimension mismatch");
    let ln_z: Vec<f64> = z.iter().map(|p| p.modulus.ln()).collect();
    let terms: Vec<(f64, f64)> = f
        .iter()
        .filter(|(_, b)| !b.is_zero())
        .map(|(a, b)| {
            let mut ln = b.ln_abs();
            let mut phase = if b.sign() == Sign::Negative { PI } else { 0.0 };
            for (i, &e) in a.entries().iter().enumerate() {
                if e > 0 {
                    ln += e as f64 * ln_z[i];
                    phase += e as f64 * z[i].phase;
                }
            }
            (ln, phase)
        })
        .filter(|(ln, _)| *ln > f64::NEG_INFINITY)
        .collect();
    let peak = terms.iter().map(|t| t.0).fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return (f64::NEG_INFINITY, 0.0);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (ln, phase) in terms {
        let w = (ln - peak).exp();
        re += w * phase.cos();
        im += w * phase.sin();
    }
    let modulus = re.hypot(im);
    if modulus == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    (peak + modulus.ln(), im.atan2(re))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{realize_law, CoefficientLaw};
    use crate::lognum::ln_factorial;

    #[test]
    fn single_basis_element() {
        let h2 = realize_law(&CoefficientLaw::hermite_sum(&[2]), 1, 3).unwrap();
        let f = bargmann_from_expansion(&h2);
        assert!((f.coeff(&MultiIndex::single(2)).to_f64() - 0.5f64.sqrt()).abs() < 1e-15);
        let (ln, phase) = eval_entire(&f, &[Polar::new(1.0, PI / 2.0)]);
        assert!((ln + 0.5 * 2f64.ln()).abs() < 1e-14);
        assert!((phase.abs() - PI).abs() < 1e-12);
    }

    #[test]
    fn geometric_is_exponential() {
        let g = realize_law(&CoefficientLaw::geometric(1.0, 0.7), 1, 60).unwrap();
        let f = bargmann_from_expansion(&g);
        let (ln, phase) = eval_entire(&f, &[Polar::real(1.0)]);
        assert!((ln.exp() - 0.7f64.exp()).abs() < 1e-13);
        assert_eq!(phase, 0.0);

        let g = realize_law(&CoefficientLaw::geometric(1.0, 1.0), 1, 200).unwrap();
        let (ln, _) = eval_entire(&bargmann_from_expansion(&g), &[Polar::real(10.0)]);
        assert!((ln - 10.0).abs() < 1e-8);
    }

    #[test]
    fn constant_and_zero() {
        let one = realize_law(&CoefficientLaw::hermite_sum(&[0]), 1, 5).unwrap();
        let f = bargmann_from_expansion(&one);
        assert_eq!(eval_entire(&f, &[Polar::new(3.0, 1.0)]), (0.0, 0.0));
        let zero = bargmann_from_expansion(&HermiteExpansion::zeros(2, 3).unwrap());
        assert!(zero.is_zero());
        assert_eq!(
            eval_entire(&zero, &[Polar::real(1.0), Polar::real(2.0)]).0,
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn exponential_beyond_f64_range() {
        let g = realize_law(&CoefficientLaw::geometric(1.0, 1.0), 1, 4000).unwrap();
        let (ln, _) = eval_entire(&bargmann_from_expansion(&g), &[Polar::real(1000.0)]);
        assert!((ln - 1000.0).abs() < 1e-8);
    }

    #[test]
    fn two_variables() {
        // e^{r(z₁+z₂)} for the geometric law in d = 2
        let g = realize_law(&CoefficientLaw::geometric(1.0, 0.5), 2, 60).unwrap();
        let f = bargmann_from_expansion(&g);
        let (ln, phase) = eval_entire(&f, &[Polar::new(2.0, 0.3), Polar::new(1.0, -1.1)]);
        let (re, im) = (
            2.0 * 0.3f64.cos() + (-1.1f64).cos(),
            2.0 * 0.3f64.sin() + (-1.1f64).sin(),
        );
        assert!((ln - 0.5 * re).abs() < 1e-12);
        assert!((phase - 0.5 * im).abs() < 1e-12);
    }

    #[test]
    fn real_axis_matches_partial_sums() {
        let coeffs: Vec<f64> = (0..=100)
            .map(|k| ((k * 37 % 11) as f64 - 5.0) / 7.0)
            .collect();
        let h = HermiteExpansion::from_univariate(&coeffs).unwrap();
        let f = bargmann_from_expansion(&h);
        for x in [0.3f64, 1.7, 4.0, -2.5] {
            let direct: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * x.powi(k as i32) * (-0.5 * ln_factorial(k as u64)).exp())
                .sum();
            let (ln, phase) = eval_entire(&f, &[Polar::real(x)]);
            let value = ln.exp() * phase.cos();
            assert!((value - direct).abs() <= 1e-9 * direct.abs(), "x = {x}");
        }
    }
}
