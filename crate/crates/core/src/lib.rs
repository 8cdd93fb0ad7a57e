//! Executable coefficient-decay laws for Hermite expansions.
//!
//! The crate computes harmonic-oscillator power norms `‖H^N f‖` in the
//! Hermite basis, the explicit bound sequences that characterise expansions
//! with `|c_α| ≲ r^{|α|}/√(α!)`, the asymptotic lemmas behind those bounds,
//! and the Bargmann-side weights and growth classes of Pilipović spaces of
//! order `s < 1/2`. Every large magnitude is carried as a [`LogReal`].

pub mod asymptotics;
pub mod bargmann;
pub mod error;
pub(crate) mod fit;
pub mod hermite;
pub mod lognum;
pub mod oscillator;
pub mod report;

pub use error::{Error, Result};
pub use hermite::{CoefficientLaw, HermiteExpansion, MultiIndex};
pub use lognum::LogReal;
pub use report::{CheckReport, FittedBound};
