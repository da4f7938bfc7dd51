//! Certificate plumbing and small enclosure helpers shared by the bounds.

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::funcrep::{require_certificate, verify_certificate, PiecewiseFunction, RegularityCertificate, Verdict};
use crate::functionals::{mean_u, FunctionalValue};
use crate::stieltjes::IntegralResult;

pub(crate) fn mismatch(want: &str, got: &RegularityCertificate) -> Error {
    Error::ClassMismatch(format!("expected a {want} certificate, got `{}`", got.kind_name()))
}

/// `(m, M)` of a validated bounds certificate.
pub(crate) fn bounds_of(f: &PiecewiseFunction, cert: &RegularityCertificate) -> Result<(f64, f64)> {
    match *cert {
        RegularityCertificate::Bounds { m, big_m } => {
            require_certificate(f, cert)?;
            Ok((m, big_m))
        }
        _ => Err(mismatch("bounds", cert)),
    }
}

/// `L` of a validated Lipschitz certificate (a Hölder one with `r = 1` also
/// qualifies).
pub(crate) fn lipschitz_of(f: &PiecewiseFunction, cert: &RegularityCertificate) -> Result<f64> {
    match *cert {
        RegularityCertificate::Lipschitz { l } => {
            require_certificate(f, cert)?;
            Ok(l)
        }
        RegularityCertificate::Holder { h, r } if r == 1.0 => {
            require_certificate(f, cert)?;
            Ok(h)
        }
        _ => Err(mismatch("Lipschitz", cert)),
    }
}

/// `(H, r)` of a validated Hölder certificate; Lipschitz reads as `r = 1`.
pub(crate) fn holder_of(f: &PiecewiseFunction, cert: &RegularityCertificate) -> Result<(f64, f64)> {
    match *cert {
        RegularityCertificate::Holder { h, r } => {
            require_certificate(f, cert)?;
            Ok((h, r))
        }
        RegularityCertificate::Lipschitz { l } => {
            require_certificate(f, cert)?;
            Ok((l, 1.0))
        }
        _ => Err(mismatch("Hölder", cert)),
    }
}

pub(crate) fn variation_of(f: &PiecewiseFunction, cert: &RegularityCertificate) -> Result<f64> {
    match *cert {
        RegularityCertificate::BoundedVariation { v } => {
            require_certificate(f, cert)?;
            Ok(v)
        }
        _ => Err(mismatch("bounded-variation", cert)),
    }
}

/// Fails with [`Error::NotMonotone`] unless `u` is nondecreasing.
pub(crate) fn require_monotone(u: &PiecewiseFunction) -> Result<()> {
    match verify_certificate(u, &RegularityCertificate::MonotoneNondecreasing)? {
        Verdict::Pass => Ok(()),
        Verdict::Fail { witness, .. } => Err(Error::NotMonotone { t: witness }),
    }
}

pub(crate) fn enc(r: &IntegralResult) -> Enclosure {
    Enclosure::around(r.value, r.abs_error)
}

pub(crate) fn fenc(v: &FunctionalValue) -> Enclosure {
    Enclosure::around(v.value, v.abs_error)
}

pub(crate) fn pm(e: f64) -> Enclosure {
    Enclosure::new(-e.abs(), e.abs())
}

/// A nonnegative quantity known up to `± err` from an enclosure.
pub(crate) fn nonneg(e: Enclosure, err: f64) -> Enclosure {
    let w = e.add(&pm(err));
    Enclosure::new(w.lo.max(0.0), w.hi.max(0.0))
}

pub(crate) fn c(v: f64) -> Enclosure {
    Enclosure::point(v)
}

/// `g - mean_u g` with the error of the mean.
pub(crate) struct Centered {
    pub gc: PiecewiseFunction,
    pub mean: f64,
    pub mean_err: f64,
}

pub(crate) fn centered(g: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<Centered> {
    let (mean, mean_err) = mean_u(g, u)?;
    Ok(Centered { gc: g.add_constant(-mean), mean, mean_err })
}
