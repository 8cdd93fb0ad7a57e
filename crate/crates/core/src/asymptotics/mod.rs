//! The one-variable estimates behind the power-norm bounds, each paired with
//! a brute-force check.

pub mod bell;
pub mod convex;
pub mod lemma;
pub mod series;

pub use bell::{
    bell_numbers, berend_tassa_check, berend_tassa_lower_ln, berend_tassa_upper_ln, cn_decreasing,
    dobinski, remark_cn_limit, CnRow,
};
pub use convex::{
    double_conjugate, legendre_conjugate, phi_eval, phi_star_estimate_check, young_conjugate,
    Conjugate, ConvexFn, ConvexPhi,
};
pub use lemma::{
    argmax_m, grid_argmax_m, interval_check, m_and_derivatives, maximum_bound_check, t_alpha,
    theta_constant, IntervalRow, IntervalSweep, LemmaFunction, MaximumSweep, ThetaConstant,
};
pub use series::{series_bound_check, series_sum};
