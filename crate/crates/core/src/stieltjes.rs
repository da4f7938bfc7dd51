//! Riemann–Stieltjes integrals `∫_c^d f du` of piecewise polynomials.
//!
//! On every piece the integral is `∫ f u' dt`, done in closed form. Each
//! breakpoint of `u` adds `f(t_i)` times its jump: both half-jumps in the
//! interior, only `u(c^+) - u(c)` at `c` and only `u(d) - u(d^-)` at `d`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::{merge_breakpoints, PiecewiseFunction};
use crate::par::{self, Mode};

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedForm,
    Refined,
    Oracle,
}

/// A value with a certified absolute error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    pub abs_error: f64,
    pub method: Method,
}

impl IntegralResult {
    pub fn lo(&self) -> f64 {
        self.value - self.abs_error
    }

    pub fn hi(&self) -> f64 {
        self.value + self.abs_error
    }
}

fn discontinuous_at(f: &PiecewiseFunction, t: f64) -> bool {
    !f.continuous_at_point(t)
}

/// Fails with [`Error::SharedDiscontinuity`] if `f` and `u`, restricted to
/// `[c, d]`, jump at a common point. Restriction drops the outer half-jumps
/// at `c` and `d`, which do not enter the integral.
pub fn check_shared_discontinuity(f: &PiecewiseFunction, u: &PiecewiseFunction, c: f64, d: f64) -> Result<()> {
    let (fr, ur) = (f.restrict(c, d)?, u.restrict(c, d)?);
    for (i, &t) in ur.breakpoints().iter().enumerate() {
        if !ur.continuous_at(i) && discontinuous_at(&fr, t) {
            return Err(Error::SharedDiscontinuity { t });
        }
    }
    Ok(())
}

/// How the integrand is modified before integrating against `du`.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct Weighting {
    /// integrate `|h|` instead of `h`
    pub abs: bool,
    /// multiply by `|t - center|^r`
    pub power: Option<(f64, f64)>,
}

/// `∫_c^d w(t) h(t) du(t)` (or `dt` when `u` is `None`), where `w` applies
/// the [`Weighting`]. Integrals of `|h|` split each piece at the sign changes
/// of `h`.
pub(crate) fn integrate_weighted(
    h: &PiecewiseFunction,
    u: Option<&PiecewiseFunction>,
    c: f64,
    d: f64,
    how: Weighting,
) -> Result<IntegralResult> {
    let hr = h.restrict(c, d)?;
    let ur = match u {
        Some(u) => {
            check_shared_discontinuity(h, u, c, d)?;
            Some(u.restrict(c, d)?)
        }
        None => None,
    };
    let bps = match &ur {
        Some(ur) => merge_breakpoints(hr.breakpoints(), ur.breakpoints(), c, d),
        None => hr.breakpoints().to_vec(),
    };
    let hr = hr.refine(&bps);
    let ur = ur.map(|u| u.refine(&bps));

    let weight_at = |t: f64| match how.power {
        Some((center, r)) => (t - center).abs().powf(r),
        None => 1.0,
    };
    let mut value = 0.0;
    let mut err = 0.0;
    let mut magnitude = 0.0;
    for (i, (lo, hi, hp)) in hr.intervals().enumerate() {
        let du = match &ur {
            Some(ur) => ur.pieces()[i].deriv(),
            None => crate::poly::Poly::constant(1.0),
        };
        if du.is_zero() {
            continue;
        }
        let mut knots = vec![lo];
        if how.abs {
            knots.extend(hp.sign_changes(lo, hi));
        }
        knots.push(hi);
        for w in knots.windows(2) {
            let (l, r) = (w[0], w[1]);
            let sign = if how.abs && hp.eval(0.5 * (l + r)) < 0.0 { -1.0 } else { 1.0 };
            let integrand = &hp.scale(sign) * &du;
            let (v, e) = match how.power {
                Some((center, p)) => integrand.integrate_abs_power(l, r, center, p),
                None => integrand.integrate(l, r),
            };
            // coefficient products round too
            let (mag, _) = match how.power {
                Some((center, p)) => {
                    let absp = crate::poly::Poly::new(integrand.coeffs().iter().map(|c| c.abs()));
                    absp.integrate_abs_power(l, r, center, p)
                }
                None => (integrand.rounding_scale(l.abs().max(r.abs())) * (r - l), 0.0),
            };
            value += v;
            err += e + mag.abs() * EPS * (2 * integrand.coeffs().len() + 2) as f64;
            magnitude += v.abs();
        }
    }
    if let Some(ur) = &ur {
        for (i, &t) in ur.breakpoints().iter().enumerate() {
            let jump = ur.jump_left(i) + ur.jump_right(i);
            if jump == 0.0 {
                continue;
            }
            let hv = hr.values()[i];
            let hv = if how.abs { hv.abs() } else { hv };
            let term = hv * weight_at(t) * jump;
            value += term;
            err += (hv.abs() * weight_at(t) * (ur.jump_left(i).abs() + ur.jump_right(i).abs())) * EPS * 4.0;
            magnitude += term.abs();
        }
    }
    err += magnitude * EPS * 4.0;
    Ok(IntegralResult { value, abs_error: err, method: Method::ClosedForm })
}

/// `∫_c^d f du`.
pub fn rs_integral(f: &PiecewiseFunction, u: &PiecewiseFunction, c: f64, d: f64) -> Result<IntegralResult> {
    integrate_weighted(f, Some(u), c, d, Weighting::default())
}

/// `∫_c^d |f| du`.
pub fn rs_integral_abs(f: &PiecewiseFunction, u: &PiecewiseFunction, c: f64, d: f64) -> Result<IntegralResult> {
    integrate_weighted(f, Some(u), c, d, Weighting { abs: true, power: None })
}

/// `∫_c^d f dt`.
pub fn riemann_integral(f: &PiecewiseFunction, c: f64, d: f64) -> Result<IntegralResult> {
    integrate_weighted(f, None, c, d, Weighting::default())
}

/// `∫_c^d |f| dt`.
pub fn riemann_integral_abs(f: &PiecewiseFunction, c: f64, d: f64) -> Result<IntegralResult> {
    integrate_weighted(f, None, c, d, Weighting { abs: true, power: None })
}

/// The continuous part of `u`: every jump removed, `u_c(a) = u(a)`.
pub(crate) fn continuous_part(u: &PiecewiseFunction) -> PiecewiseFunction {
    let n = u.breakpoints().len();
    let mut cum = 0.0;
    let mut pieces = Vec::with_capacity(n - 1);
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        values.push(u.left_limit(i) - cum);
        cum += u.jump_left(i) + u.jump_right(i);
        if i + 1 < n {
            pieces.push(u.pieces()[i].add_constant(-cum));
        }
    }
    values[0] = u.values()[0];
    PiecewiseFunction::from_parts(u.breakpoints().to_vec(), pieces, values).expect("same shape as u")
}

/// Brute-force check value: midpoint-tagged Riemann–Stieltjes sums against
/// the continuous part of `u` on uniform partitions of `n` and `2n` cells,
/// plus the jump terms of `u` added explicitly.
pub fn rs_oracle(f: &PiecewiseFunction, u: &PiecewiseFunction, c: f64, d: f64, n: usize) -> Result<IntegralResult> {
    rs_oracle_with(Mode::default(), f, u, c, d, n)
}

pub fn rs_oracle_with(
    mode: Mode,
    f: &PiecewiseFunction,
    u: &PiecewiseFunction,
    c: f64,
    d: f64,
    n: usize,
) -> Result<IntegralResult> {
    if n == 0 {
        return Err(Error::Domain("oracle needs at least one cell".into()));
    }
    if !(c < d) {
        return Err(Error::Domain(format!("empty interval [{c}, {d}]")));
    }
    check_shared_discontinuity(f, u, c, d)?;
    let fr = f.restrict(c, d)?;
    let ur = u.restrict(c, d)?;
    let uc = continuous_part(&ur);
    let sum = |m: usize| {
        let h = (d - c) / m as f64;
        par::sum_indexed(mode, m, |k| {
            let x0 = c + h * k as f64;
            let x1 = if k + 1 == m { d } else { c + h * (k + 1) as f64 };
            fr.value_at(0.5 * (x0 + x1)) * (uc.value_at(x1) - uc.value_at(x0))
        })
    };
    let coarse = sum(n);
    let fine = sum(2 * n);

    let mut jumps = 0.0;
    for (i, &t) in ur.breakpoints().iter().enumerate() {
        let j = ur.jump_left(i) + ur.jump_right(i);
        if j != 0.0 {
            jumps += fr.value_at(t) * j;
        }
    }
    // a jump of f inside a cell is sampled on one side only
    let h = (d - c) / (2 * n) as f64;
    let mut f_jump_err = 0.0;
    for (i, &t) in fr.breakpoints().iter().enumerate() {
        if !fr.continuous_at(i) {
            let size = fr.jump_left(i).abs() + fr.jump_right(i).abs();
            let spread = (uc.value_at((t + h).min(d)) - uc.value_at((t - h).max(c))).abs();
            f_jump_err += size * spread;
        }
    }
    let value = fine + jumps;
    let scale = fine.abs() + jumps.abs() + 1.0;
    let abs_error = (fine - coarse).abs() + f_jump_err + scale * EPS * (2 * n) as f64;
    Ok(IntegralResult { value, abs_error, method: Method::Oracle })
}

/// Whether two integral results are consistent within their combined errors.
pub fn agree(x: &IntegralResult, y: &IntegralResult) -> bool {
    (x.value - y.value).abs() <= x.abs_error + y.abs_error
}
