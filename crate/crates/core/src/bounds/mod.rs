//! Upper and lower bounds for the functionals, each returned as a
//! [`BoundReport`].

pub mod beta;
mod common;
pub mod dfunc;
pub mod dispatch;
pub mod gruss;
pub mod monotone;
pub mod report;

pub use beta::{beta, beta_int};
pub use dfunc::{
    bound_d_corollaries, bound_d_kernel, bound_d_prior, check_delta_nonnegative, is_convex, positivity_check_d,
    Corollary, FClass,
};
pub use dispatch::{evaluate, BoundInputs};
pub use gruss::{
    bound_t_bv, bound_t_holder_bv, bound_t_holder_lipschitz, bound_t_holder_monotone, bound_t_lipschitz_u,
    bound_t_monotone, conjugate, weighted_bounds, WeightedItem, DEFAULT_P,
};
pub use monotone::{
    bound_d_monotone_k, bound_d_monotone_q, bound_ostrowski, ostrowski_pointwise, K_u, OstrowskiKind, Q_u,
};
pub use report::{float_or_inf, tightness, upper_holds, BoundReport, CertificateUse, Direction, TheoremId, Tier};
