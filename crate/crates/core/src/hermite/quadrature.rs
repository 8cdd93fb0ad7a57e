//! Gauss–Hermite quadrature, used as an independent check of
//! coefficient-side norms.

use std::f64::consts::PI;

use crate::error::{invalid, Error, Result};

use super::{hermite_functions_upto, HermiteExpansion};

/// `n`-point rule for `∫ g(x) e^{−x²} dx`.
#[derive(Clone, Debug)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    ln_weights: Vec<f64>,
}

impl GaussHermite {
    /// Newton iteration on the orthonormal Hermite polynomials, seeded with
    /// the usual asymptotic guesses for the largest roots.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "quadrature order must be positive");
        let pim4 = PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut ln_weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let (mut p1, mut p2) = (pim4, 0.0);
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 3e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            let lw = 2f64.ln() - 2.0 * pp.abs().ln();
            ln_weights[i] = lw;
            ln_weights[n - 1 - i] = lw;
        }
        if n % 2 == 1 {
            // the Newton step lands on ±tiny; the middle root is exactly 0
            nodes[n / 2] = 0.0;
        }
        GaussHermite { nodes, ln_weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> Vec<f64> {
        self.ln_weights.iter().map(|l| l.exp()).collect()
    }

    /// `∫ g(x) e^{−x²} dx`.
    pub fn integrate_weighted(&self, g: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.ln_weights)
            .map(|(&x, lw)| lw.exp() * g(x))
            .sum()
    }

    /// Weights `w_i e^{x_i²}` for integrating `∫ g(x) dx` with `g` carrying
    /// its own Gaussian decay.
    pub fn unweighted(&self) -> Vec<f64> {
        self.nodes
            .iter()
            .zip(&self.ln_weights)
            .map(|(&x, lw)| (lw + x * x).exp())
            .collect()
    }
}

/// `‖Σ c_α h_α‖_{L²}` by Gauss–Hermite quadrature in physical space.
/// Supports `d ≤ 2` and `max_degree ≤ 40`.
pub fn parseval_oracle(f: &HermiteExpansion, quad_order: usize) -> Result<f64> {
    let d = f.dimension();
    let m = f.max_degree();
    if d > 2 {
        return Err(invalid("d", format!("oracle supports d <= 2, got {d}")));
    }
    if m > 40 {
        return Err(invalid(
            "max_degree",
            format!("oracle supports degree <= 40, got {m}"),
        ));
    }
    let required = 2 * m + 1;
    if quad_order < required {
        return Err(Error::QuadratureUnderresolved {
            order: quad_order,
            required,
        });
    }
    let rule = GaussHermite::new(quad_order);
    let w = rule.unweighted();
    let tables: Vec<Vec<f64>> = rule
        .nodes()
        .iter()
        .map(|&x| hermite_functions_upto(m, x))
        .collect();
    let coeffs = f.coeffs_f64();
    let mut total = 0.0;
    if d == 1 {
        for (i, h) in tables.iter().enumerate() {
            let v: f64 = coeffs.iter().zip(h).map(|(c, hk)| c * hk).sum();
            total += w[i] * v * v;
        }
    } else {
        for (i, hx) in tables.iter().enumerate() {
            for (j, hy) in tables.iter().enumerate() {
                let v: f64 = f
                    .indices()
                    .iter()
                    .zip(&coeffs)
                    .map(|(a, c)| {
                        let e = a.entries();
                        c * hx[e[0] as usize] * hy[e[1] as usize]
                    })
                    .sum();
                total += w[i] * w[j] * v * v;
            }
        }
    }
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermite::{realize_law, CoefficientLaw, MultiIndex};

    #[test]
    fn integrates_moments() {
        let rule = GaussHermite::new(12);
        let sqrt_pi = PI.sqrt();
        assert!((rule.integrate_weighted(|_| 1.0) - sqrt_pi).abs() < 1e-14);
        assert!((rule.integrate_weighted(|x| x * x) - sqrt_pi / 2.0).abs() < 1e-14);
        assert!((rule.integrate_weighted(|x| x.powi(4)) - 0.75 * sqrt_pi).abs() < 1e-13);
        assert!(rule.integrate_weighted(|x| x.powi(3)).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_sorted_roots() {
        for n in [1, 2, 5, 20, 61, 128] {
            let rule = GaussHermite::new(n);
            assert!(rule.nodes().windows(2).all(|w| w[0] > w[1]));
            let total: f64 = rule.weights().iter().sum();
            assert!((total - PI.sqrt()).abs() < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn orthonormality_up_to_degree_twenty() {
        let rule = GaussHermite::new(30);
        let w = rule.unweighted();
        let tables: Vec<Vec<f64>> = rule
            .nodes()
            .iter()
            .map(|&x| hermite_functions_upto(20, x))
            .collect();
        for a in 0..=20 {
            for b in 0..=20 {
                let ip: f64 = tables.iter().zip(&w).map(|(h, wi)| wi * h[a] * h[b]).sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((ip - expect).abs() < 1e-8, "<h{a}, h{b}> = {ip}");
            }
        }
    }

    #[test]
    fn oracle_examples() {
        let h0 = realize_law(&CoefficientLaw::hermite_sum(&[0]), 1, 0).unwrap();
        assert!((parseval_oracle(&h0, 20).unwrap() - 1.0).abs() < 1e-10);

        let h01 = realize_law(&CoefficientLaw::hermite_sum(&[0, 1]), 1, 1).unwrap();
        assert!((parseval_oracle(&h01, 20).unwrap() - 2f64.sqrt()).abs() < 1e-8);

        let g = realize_law(&CoefficientLaw::geometric(1.0, 0.5), 1, 20).unwrap();
        assert!((parseval_oracle(&g, 60).unwrap() - 0.125f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn oracle_in_two_dimensions() {
        let g = realize_law(&CoefficientLaw::geometric(1.0, 0.4), 2, 12).unwrap();
        let q = parseval_oracle(&g, 30).unwrap();
        assert!((q - g.l2_norm().to_f64()).abs() < 1e-10);
        let single = realize_law(
            &CoefficientLaw::finite(vec![(MultiIndex::new(vec![3, 2]).unwrap(), -2.0)]),
            2,
            5,
        )
        .unwrap();
        assert!((parseval_oracle(&single, 11).unwrap() - 2.0).abs() < 1e-10);
    }

    #[test]
    fn oracle_rejects_coarse_rules() {
        let g = realize_law(&CoefficientLaw::geometric(1.0, 0.5), 1, 10).unwrap();
        assert_eq!(
            parseval_oracle(&g, 20).unwrap_err(),
            Error::QuadratureUnderresolved {
                order: 20,
                required: 21
            }
        );
        let g3 = realize_law(&CoefficientLaw::geometric(1.0, 0.5), 3, 2).unwrap();
        assert!(parseval_oracle(&g3, 20).is_err());
    }
}
