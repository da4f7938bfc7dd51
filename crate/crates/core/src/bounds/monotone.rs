//! Bounds for `D(f;u)` with nondecreasing `u`, sharpened by the moments
//! `K(u)` and `Q(u)`, and the pointwise Ostrowski inequalities they rest on.

use super::common::*;
use super::report::{BoundReport, ReportBuilder, TheoremId};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::funcrep::{PiecewiseFunction, RegularityCertificate};
use crate::functionals::functional_D;
use crate::poly::Poly;
use crate::stieltjes::riemann_integral;

/// `K(u) = 4/(b-a)^2 ∫ u(x)(x - (a+b)/2) dx`.
#[allow(non_snake_case)]
pub fn K_u(u: &PiecewiseFunction) -> Result<Enclosure> {
    let (a, b) = (u.a(), u.b());
    let mid = 0.5 * (a + b);
    let r = riemann_integral(&u.mul_poly(&Poly::linear(-mid, 1.0)), a, b)?;
    Ok(enc(&r).scale(4.0 / ((b - a) * (b - a))))
}

/// `Q(u) = 1/(b-a) ∫ sgn(x - (a+b)/2) u(x) dx`.
#[allow(non_snake_case)]
pub fn Q_u(u: &PiecewiseFunction) -> Result<Enclosure> {
    let (a, b) = (u.a(), u.b());
    let mid = 0.5 * (a + b);
    let right = riemann_integral(u, mid, b)?;
    let left = riemann_integral(u, a, mid)?;
    Ok(enc(&right).sub(&enc(&left)).scale(1.0 / (b - a)))
}

fn d_setup(f: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<(Enclosure, Enclosure)> {
    require_monotone(u)?;
    let lhs = fenc(&functional_D(f, u)?);
    Ok((lhs, c(u.value_at(u.b()) - u.value_at(u.a()))))
}

/// `|D| <= ½L(b-a)[u(b)-u(a)-K(u)] <= ½L(b-a)[u(b)-u(a)]` for `L`-Lipschitz
/// `f` and nondecreasing `u`; also checks `K(u) >= 0`.
pub fn bound_d_monotone_k(
    f: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    let l = lipschitz_of(f, cert_f)?;
    let (lhs, du) = d_setup(f, u)?;
    let k = K_u(u)?;
    let s = 0.5 * l * (u.b() - u.a());
    Ok(ReportBuilder::upper(TheoremId::ThmB1, lhs)
        .tier("first", du.sub(&k).scale(s))
        .tier("second", du.scale(s))
        .chain("first", "second")
        .check(k.hi >= 0.0)
        .extra("K_u", k.mid())
        .cert("f", *cert_f)
        .build())
}

/// `|D| <= [u(b)-u(a)-Q(u)] V(f) <= [u(b)-u(a)] V(f)` for `f` of bounded
/// variation and nondecreasing `u`; also checks `Q(u) >= 0`.
pub fn bound_d_monotone_q(
    f: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    let v = variation_of(f, cert_f)?;
    let (lhs, du) = d_setup(f, u)?;
    let q = Q_u(u)?;
    Ok(ReportBuilder::upper(TheoremId::ThmB2, lhs)
        .tier("first", du.sub(&q).scale(v))
        .tier("second", du.scale(v))
        .chain("first", "second")
        .check(q.hi >= 0.0)
        .extra("Q_u", q.mid())
        .cert("f", *cert_f)
        .build())
}

/// Regularity assumed of `f` in the Ostrowski inequality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OstrowskiKind {
    Lipschitz { l: f64 },
    BoundedVariation { v: f64 },
}

impl OstrowskiKind {
    pub fn certificate(&self) -> RegularityCertificate {
        match *self {
            OstrowskiKind::Lipschitz { l } => RegularityCertificate::Lipschitz { l },
            OstrowskiKind::BoundedVariation { v } => RegularityCertificate::BoundedVariation { v },
        }
    }

    pub fn from_certificate(cert: &RegularityCertificate) -> Result<Self> {
        match *cert {
            RegularityCertificate::Lipschitz { l } => Ok(OstrowskiKind::Lipschitz { l }),
            RegularityCertificate::BoundedVariation { v } => Ok(OstrowskiKind::BoundedVariation { v }),
            _ => Err(mismatch("Lipschitz or bounded-variation", cert)),
        }
    }
}

fn ostrowski_value(a: f64, b: f64, x: f64, kind: OstrowskiKind) -> f64 {
    let mid = 0.5 * (a + b);
    match kind {
        OstrowskiKind::Lipschitz { l } => {
            let s = (x - mid) / (b - a);
            l * (0.25 + s * s) * (b - a)
        }
        OstrowskiKind::BoundedVariation { v } => (0.5 + (x - mid).abs() / (b - a)) * v,
    }
}

/// Bound on `|f(x) - mean f|`: `L[¼ + ((x-mid)/(b-a))²](b-a)` for Lipschitz
/// `f`, `[½ + |x-mid|/(b-a)] V(f)` for `f` of bounded variation.
pub fn ostrowski_pointwise(f: &PiecewiseFunction, x: f64, kind: OstrowskiKind) -> Result<f64> {
    let (a, b) = (f.a(), f.b());
    if !(x >= a && x <= b) {
        return Err(Error::Domain(format!("x = {x} outside [{a}, {b}]")));
    }
    match kind {
        OstrowskiKind::Lipschitz { .. } => lipschitz_of(f, &kind.certificate())?,
        OstrowskiKind::BoundedVariation { .. } => variation_of(f, &kind.certificate())?,
    };
    Ok(ostrowski_value(a, b, x, kind))
}

/// [`ostrowski_pointwise`] as a report against `|f(x) - mean f|`.
pub fn bound_ostrowski(f: &PiecewiseFunction, x: f64, kind: OstrowskiKind) -> Result<BoundReport> {
    let bound = ostrowski_pointwise(f, x, kind)?;
    let (a, b) = (f.a(), f.b());
    let mean = riemann_integral(f, a, b)?;
    let len = b - a;
    let fx = f.value_at(x);
    let lhs = c(fx).sub(&enc(&mean).scale(1.0 / len));
    let id = match kind {
        OstrowskiKind::Lipschitz { .. } => TheoremId::OstrowskiLipschitz,
        OstrowskiKind::BoundedVariation { .. } => TheoremId::OstrowskiBv,
    };
    Ok(ReportBuilder::upper(id, lhs)
        .tier("bound", Enclosure::around(bound, bound.abs() * 8.0 * f64::EPSILON))
        .extra("x", x)
        .cert("f", kind.certificate())
        .build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn poly(c: &[f64]) -> PiecewiseFunction {
        PiecewiseFunction::polynomial(0.0, 1.0, c).unwrap()
    }

    fn step_at_end() -> PiecewiseFunction {
        PiecewiseFunction::with_values(vec![0.0, 1.0], vec![Poly::zero()], &BTreeMap::from([(1, 1.0)])).unwrap()
    }

    const LIP1: RegularityCertificate = RegularityCertificate::Lipschitz { l: 1.0 };

    #[test]
    fn k_witness_is_sharp() {
        let f = poly(&[-0.5, 1.0]);
        let r = bound_d_monotone_k(&f, &step_at_end(), &LIP1).unwrap();
        assert_abs_diff_eq!(r.lhs, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.extras["K_u"], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 0.5, epsilon = 1e-15);
        assert!((r.ratio - 1.0).abs() < 1e-9 && r.sound());
    }

    #[test]
    fn moments_of_identity() {
        let t = poly(&[0.0, 1.0]);
        assert_abs_diff_eq!(K_u(&t).unwrap().mid(), 1.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(Q_u(&t).unwrap().mid(), 0.25, epsilon = 1e-15);
        let r = bound_d_monotone_k(&poly(&[0.0, 0.0, 1.0]), &t, &RegularityCertificate::Lipschitz { l: 2.0 }).unwrap();
        assert_abs_diff_eq!(r.rhs, 2.0 / 3.0, epsilon = 1e-15);
        let r = bound_d_monotone_q(&t, &t, &RegularityCertificate::BoundedVariation { v: 1.0 }).unwrap();
        assert_abs_diff_eq!(r.rhs, 0.75, epsilon = 1e-15);
        assert!(r.sound());
    }

    #[test]
    fn constant_integrator() {
        let r = bound_d_monotone_k(&poly(&[0.0, 1.0]), &poly(&[2.0]), &LIP1).unwrap();
        assert!(r.lhs < 1e-13 && r.rhs.abs() < 1e-13 && r.sound());
        assert!(matches!(
            bound_d_monotone_q(
                &poly(&[0.0, 1.0]),
                &poly(&[0.0, -1.0]),
                &RegularityCertificate::BoundedVariation { v: 1.0 }
            ),
            Err(Error::NotMonotone { .. })
        ));
    }

    #[test]
    fn q_witness_from_the_midpoint_step_is_degenerate() {
        // with u jumping at the midpoint, ∫f du = f(½) = 0, so D vanishes
        let f = poly(&[-0.5, 1.0]);
        let u = PiecewiseFunction::step(0.0, 1.0, 0.5, 0.0, 1.0).unwrap();
        let r = bound_d_monotone_q(&f, &u, &RegularityCertificate::BoundedVariation { v: 1.0 }).unwrap();
        assert!(r.lhs < 1e-13);
        assert_abs_diff_eq!(r.rhs, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn ostrowski_examples() {
        let t = poly(&[0.0, 1.0]);
        assert_abs_diff_eq!(ostrowski_pointwise(&t, 0.5, OstrowskiKind::Lipschitz { l: 1.0 }).unwrap(), 0.25);
        assert_abs_diff_eq!(ostrowski_pointwise(&t, 1.0, OstrowskiKind::BoundedVariation { v: 1.0 }).unwrap(), 1.0);
        let r = bound_ostrowski(&t, 0.0, OstrowskiKind::Lipschitz { l: 1.0 }).unwrap();
        assert_abs_diff_eq!(r.lhs, 0.5, epsilon = 1e-15);
        assert!((r.ratio - 1.0).abs() < 1e-9 && r.holds);
        assert!(ostrowski_pointwise(&t, 2.0, OstrowskiKind::Lipschitz { l: 1.0 }).is_err());
        assert!(matches!(
            ostrowski_pointwise(&t, 0.5, OstrowskiKind::Lipschitz { l: 0.5 }),
            Err(Error::CertificateInvalid { .. })
        ));
    }
}
