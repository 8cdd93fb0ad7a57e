//! Hermite expansions `f = Σ c_α h_α` over multi-indices `α ∈ ℕ^d`.
//!
//! The basis is the L²(ℝ^d)-orthonormal family of Hermite functions, so
//! that `H h_α = (2|α| + d) h_α` for the harmonic oscillator `H = |x|² − Δ`
//! and Parseval holds with constant one.

mod basis;
mod expansion;
mod law;
mod quadrature;

pub use basis::{hermite_function_eval, hermite_functions_upto};
pub use expansion::{expansion_l2_norm, DegreeProfile, HermiteExpansion};
pub use law::{realize_law, CoefficientLaw, LawFamily, SignRule};
pub use quadrature::{parseval_oracle, GaussHermite};

use std::cmp::Ordering;

use crate::error::{invalid, Error, Result};
use crate::lognum::ln_factorial;

/// Largest table [`enumerate_multiindices`] will build.
pub const MAX_MULTIINDICES: u128 = 100_000_000;

/// `α ∈ ℕ^d` with its total degree cached.
///
/// Ordered graded-lexicographically: first by degree, then, within a degree,
/// larger leading entries come first, so `(1,0)` precedes `(0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    entries: Vec<u32>,
    degree: u32,
}

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Result<Self> {
        if entries.is_empty() {
            return Err(invalid("alpha", "dimension must be at least 1"));
        }
        let degree = entries.iter().sum();
        Ok(MultiIndex { entries, degree })
    }

    pub fn zeros(d: usize) -> Self {
        assert!(d >= 1);
        MultiIndex {
            entries: vec![0; d],
            degree: 0,
        }
    }

    /// Univariate index `(k)`.
    pub fn single(k: u32) -> Self {
        MultiIndex {
            entries: vec![k],
            degree: k,
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    /// `|α|`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// `ln α! = Σ ln αᵢ!`.
    pub fn ln_factorial(&self) -> f64 {
        self.entries.iter().map(|&a| ln_factorial(a as u64)).sum()
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree
            .cmp(&other.degree)
            .then_with(|| other.entries.cmp(&self.entries))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// `binomial(m + d, d)`, saturating.
pub fn multiindex_count(d: usize, max_degree: usize) -> u128 {
    let mut count: u128 = 1;
    for i in 1..=d as u128 {
        count = count.saturating_mul(max_degree as u128 + i) / i;
    }
    count
}

/// All `α` with `|α| ≤ max_degree`, in graded-lex order.
pub fn enumerate_multiindices(d: usize, max_degree: usize) -> Result<Vec<MultiIndex>> {
    if d == 0 {
        return Err(invalid("d", "dimension must be at least 1"));
    }
    let count = multiindex_count(d, max_degree);
    if count > MAX_MULTIINDICES {
        return Err(Error::SizeLimit {
            count,
            limit: MAX_MULTIINDICES,
        });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut scratch = vec![0u32; d];
    for k in 0..=max_degree as u32 {
        compositions(k, 0, &mut scratch, &mut |entries| {
            out.push(MultiIndex {
                entries: entries.to_vec(),
                degree: k,
            })
        });
    }
    Ok(out)
}

// Compositions of `rest` into the slots `pos..`, leading entry descending.
fn compositions(rest: u32, pos: usize, scratch: &mut [u32], emit: &mut impl FnMut(&[u32])) {
    if pos + 1 == scratch.len() {
        scratch[pos] = rest;
        emit(scratch);
        return;
    }
    for first in (0..=rest).rev() {
        scratch[pos] = first;
        compositions(rest - first, pos + 1, scratch, emit);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec()).unwrap()
    }

    #[test]
    fn univariate_enumeration() {
        let all = enumerate_multiindices(1, 3).unwrap();
        assert_eq!(all, (0..=3).map(MultiIndex::single).collect::<Vec<_>>());
    }

    #[test]
    fn bivariate_degree_one() {
        let all = enumerate_multiindices(2, 1).unwrap();
        assert_eq!(all, vec![idx(&[0, 0]), idx(&[1, 0]), idx(&[0, 1])]);
    }

    #[test]
    fn count_matches_binomial() {
        assert_eq!(enumerate_multiindices(3, 4).unwrap().len(), 35);
        for d in 1..5 {
            for m in 0..9 {
                let n = enumerate_multiindices(d, m).unwrap().len() as u128;
                assert_eq!(n, multiindex_count(d, m));
            }
        }
    }

    #[test]
    fn strictly_increasing_and_unique() {
        let all = enumerate_multiindices(3, 7).unwrap();
        for w in all.windows(2) {
            assert!(w[0] < w[1], "{:?} !< {:?}", w[0], w[1]);
        }
        for a in &all {
            assert_eq!(a.degree(), a.entries().iter().sum::<u32>());
        }
    }

    #[test]
    fn size_limit() {
        let err = enumerate_multiindices(10, 60).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { .. }));
    }

    #[test]
    fn empty_index_rejected() {
        assert!(MultiIndex::new(vec![]).is_err());
        assert!(enumerate_multiindices(0, 3).is_err());
    }
}
