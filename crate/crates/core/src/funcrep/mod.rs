//! Piecewise-polynomial functions and their regularity quantities.

mod piecewise;
mod regularity;
mod spec;

pub(crate) use piecewise::{merge_breakpoints, nearly_equal};
pub use piecewise::{PiecewiseFunction, Side, JUMP_RTOL, MAX_DEGREE};
pub(crate) use regularity::max_abs_slope;
pub use regularity::{
    extrema_on, holder_sufficient_constant, inf_sup_on, p_norm, require_certificate, sup_norm_on, total_variation,
    verify_certificate, verify_certificate_with, CertificateSpec, Extrema, RegularityCertificate, Verdict, CERT_RTOL,
    DEFAULT_HOLDER_GRID,
};
pub use spec::{FunctionSpec, PieceSpec};
