//! Certified Riemann–Stieltjes integration for piecewise polynomials,
//! Čebyšev-type functionals and Grüss-type bound verification.

pub mod bounds;
pub mod cli;
pub mod document;
pub mod enclosure;
pub mod error;
pub mod funcrep;
pub mod functionals;
pub mod numeric;
pub mod par;
pub mod poly;
pub mod quadrature;
pub mod sharpness;
pub mod stieltjes;
pub mod verify;

pub use enclosure::Enclosure;
pub use error::{Error, Result};
pub use funcrep::{PiecewiseFunction, RegularityCertificate, Side};
pub use poly::Poly;
