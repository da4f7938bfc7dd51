//! The Beta function for the `L^p` branches.

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::numeric;

/// `B(x, y) = (x-1)!(y-1)!/(x+y-1)!` for integers `x, y >= 1`.
pub fn beta_int(x: u32, y: u32) -> f64 {
    assert!(x >= 1 && y >= 1, "beta_int needs positive integers");
    let (x, y) = (x.min(y), x.max(y));
    // B(y, 1) = 1/y and B(y, k+1) = B(y, k) k/(y+k)
    let mut b = 1.0 / y as f64;
    for k in 1..x {
        b *= k as f64 / (y + k) as f64;
    }
    b
}

/// `B(x, y)` for real `x, y >= 1`: the factorial formula when both are
/// integers, otherwise `∫_0^1 t^{x-1}(1-t)^{y-1} dt` by adaptive quadrature.
pub fn beta(x: f64, y: f64) -> Result<Enclosure> {
    if !(x >= 1.0 && y >= 1.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Domain(format!("beta({x}, {y}) needs finite arguments >= 1")));
    }
    if x.fract() == 0.0 && y.fract() == 0.0 && x <= u32::MAX as f64 && y <= u32::MAX as f64 {
        let v = beta_int(x as u32, y as u32);
        return Ok(Enclosure::around(v, v * 4.0 * x.max(y) * f64::EPSILON));
    }
    let (x, y) = (x.min(y), x.max(y));
    let f = |t: f64| t.powf(x - 1.0) * (1.0 - t).powf(y - 1.0);
    let (v, e) = numeric::integrate_rel(&f, 0.0, 1.0, 1e-14);
    Ok(Enclosure::around(v, e + v * 8.0 * f64::EPSILON))
}
