//! Regularity quantities of piecewise polynomials: extrema, sup-norms,
//! total variation, `L^p` norms, and validation of regularity certificates.

use serde::{Deserialize, Serialize};

use super::piecewise::{nearly_equal, PiecewiseFunction};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::numeric;

/// Relative slack granted when comparing a computed quantity against a
/// certificate constant.
pub const CERT_RTOL: f64 = 1e-9;

/// Default number of sample points per piece for the Hölder pair grid.
pub const DEFAULT_HOLDER_GRID: usize = 512;

/// Extremes of a function on an interval with their locations.
#[derive(Clone, Copy, Debug)]
pub struct Extrema {
    pub inf: Enclosure,
    pub arg_inf: f64,
    pub sup: Enclosure,
    pub arg_sup: f64,
}

pub fn extrema_on(f: &PiecewiseFunction, c: f64, d: f64) -> Result<Extrema> {
    let r = f.restrict(c, d)?;
    let mut out = Extrema {
        inf: Enclosure::point(f64::INFINITY),
        arg_inf: c,
        sup: Enclosure::point(f64::NEG_INFINITY),
        arg_sup: c,
    };
    let mut consider = |v: f64, err: f64, t: f64| {
        if v < out.inf.mid() {
            out.inf = Enclosure::around(v, err);
            out.arg_inf = t;
        }
        if v > out.sup.mid() {
            out.sup = Enclosure::around(v, err);
            out.arg_sup = t;
        }
    };
    for (lo, hi, p) in r.intervals() {
        let (_, amn, _, amx) = p.extrema(lo, hi);
        for t in [amn, amx] {
            let (v, e) = p.eval_with_err(t);
            consider(v, e, t);
        }
    }
    for (&t, &v) in r.breakpoints().iter().zip(r.values()) {
        consider(v, 0.0, t);
    }
    Ok(out)
}

/// Certified enclosures of `inf f` and `sup f` over `[c, d]`, point values
/// included.
pub fn inf_sup_on(f: &PiecewiseFunction, c: f64, d: f64) -> Result<(Enclosure, Enclosure)> {
    let e = extrema_on(f, c, d)?;
    Ok((e.inf, e.sup))
}

pub fn sup_norm_on(f: &PiecewiseFunction, c: f64, d: f64) -> Result<Enclosure> {
    let (inf, sup) = inf_sup_on(f, c, d)?;
    Ok(Enclosure::new(sup.lo.max(-inf.hi).max(0.0), sup.hi.max(-inf.lo)))
}

/// Total variation over `[c, d]`: variation of every piece plus both
/// half-jumps at each interior breakpoint, and the inward half-jump at the
/// two ends.
pub fn total_variation(u: &PiecewiseFunction, c: f64, d: f64) -> Result<Enclosure> {
    let r = u.restrict(c, d)?;
    let mut total = 0.0;
    let mut err = 0.0;
    for (lo, hi, p) in r.intervals() {
        let (v, e) = p.variation(lo, hi);
        total += v;
        err += e;
    }
    let n = r.breakpoints().len();
    for i in 0..n {
        let jl = r.jump_left(i).abs();
        let jr = r.jump_right(i).abs();
        total += jl + jr;
        err += (jl + jr) * f64::EPSILON * 4.0;
    }
    err += total * f64::EPSILON * (n as f64 + 4.0);
    Ok(Enclosure::new((total - err).max(0.0), total + err))
}

/// Sup of `|f'|` over the pieces in `[c, d]` with its location.
pub(crate) fn max_abs_slope(f: &PiecewiseFunction, c: f64, d: f64) -> Result<(f64, f64)> {
    let r = f.restrict(c, d)?;
    let mut best = (0.0, c);
    for (lo, hi, p) in r.intervals() {
        let dp = p.deriv();
        let (mn, amn, mx, amx) = dp.extrema(lo, hi);
        if mn.abs() > best.0 {
            best = (mn.abs(), amn);
        }
        if mx.abs() > best.0 {
            best = (mx.abs(), amx);
        }
    }
    Ok(best)
}

/// `(∫_c^d |f|^p dt)^{1/p}`; `p = f64::INFINITY` gives the sup-norm.
pub fn p_norm(f: &PiecewiseFunction, p: f64, c: f64, d: f64) -> Result<Enclosure> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::BadExponent(p));
    }
    if p.is_infinite() {
        return sup_norm_on(f, c, d);
    }
    let r = f.restrict(c, d)?;
    let mut integral = 0.0;
    let mut err = 0.0;
    for (lo, hi, piece) in r.intervals() {
        let mut knots = vec![lo];
        knots.extend(piece.sign_changes(lo, hi));
        knots.push(hi);
        for w in knots.windows(2) {
            let (l, h) = (w[0], w[1]);
            let sign = if piece.eval(0.5 * (l + h)) < 0.0 { -1.0 } else { 1.0 };
            let signed = piece.scale(sign);
            let (v, e) = if p.fract() == 0.0 && p <= 16.0 {
                let mut pow = signed.clone();
                for _ in 1..(p as usize) {
                    pow = &pow * &signed;
                }
                pow.integrate(l, h)
            } else {
                let g = |t: f64| signed.eval(t).max(0.0).powf(p);
                numeric::integrate_rel(&g, l, h, 1e-14)
            };
            integral += v;
            err += e;
        }
    }
    let integral = integral.max(0.0);
    let value = integral.powf(1.0 / p);
    let verr = if integral > 0.0 { value / p * err / integral } else { err.powf(1.0 / p) };
    let verr = verr + value * 4.0 * f64::EPSILON;
    Ok(Enclosure::new((value - verr).max(0.0), value + verr))
}

/// A checkable claim about the regularity of a function on its domain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "CertificateSpec", try_from = "CertificateSpec")]
pub enum RegularityCertificate {
    /// `m <= f(t) <= M`
    Bounds {
        m: f64,
        big_m: f64,
    },
    /// `|f(t) - f(s)| <= L |t - s|`
    Lipschitz {
        l: f64,
    },
    /// `|f(t) - f(s)| <= H |t - s|^r`, `0 < r <= 1`
    Holder {
        h: f64,
        r: f64,
    },
    /// total variation at most `V`
    BoundedVariation {
        v: f64,
    },
    MonotoneNondecreasing,
}

/// Wire form of a certificate: `{"kind": "...", "params": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertificateSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

impl From<RegularityCertificate> for CertificateSpec {
    fn from(c: RegularityCertificate) -> Self {
        let (kind, params) = match c {
            RegularityCertificate::Bounds { m, big_m } => ("bounds", vec![m, big_m]),
            RegularityCertificate::Lipschitz { l } => ("lipschitz", vec![l]),
            RegularityCertificate::Holder { h, r } => ("holder", vec![h, r]),
            RegularityCertificate::BoundedVariation { v } => ("bounded_variation", vec![v]),
            RegularityCertificate::MonotoneNondecreasing => ("monotone", vec![]),
        };
        CertificateSpec { kind: kind.to_string(), params }
    }
}

impl TryFrom<CertificateSpec> for RegularityCertificate {
    type Error = Error;

    fn try_from(s: CertificateSpec) -> Result<Self> {
        let want = |n: usize| -> Result<()> {
            if s.params.len() != n {
                return Err(Error::MalformedCertificate(format!(
                    "`{}` takes {n} parameters, got {}",
                    s.kind,
                    s.params.len()
                )));
            }
            Ok(())
        };
        let cert = match s.kind.as_str() {
            "bounds" => {
                want(2)?;
                RegularityCertificate::Bounds { m: s.params[0], big_m: s.params[1] }
            }
            "lipschitz" => {
                want(1)?;
                RegularityCertificate::Lipschitz { l: s.params[0] }
            }
            "holder" => {
                want(2)?;
                RegularityCertificate::Holder { h: s.params[0], r: s.params[1] }
            }
            "bounded_variation" | "bv" => {
                want(1)?;
                RegularityCertificate::BoundedVariation { v: s.params[0] }
            }
            "monotone" | "monotone_nondecreasing" => {
                want(0)?;
                RegularityCertificate::MonotoneNondecreasing
            }
            other => return Err(Error::MalformedCertificate(format!("unknown kind `{other}`"))),
        };
        cert.validate()?;
        Ok(cert)
    }
}

impl RegularityCertificate {
    pub fn kind_name(&self) -> &'static str {
        match self {
            RegularityCertificate::Bounds { .. } => "bounds",
            RegularityCertificate::Lipschitz { .. } => "lipschitz",
            RegularityCertificate::Holder { .. } => "holder",
            RegularityCertificate::BoundedVariation { .. } => "bounded_variation",
            RegularityCertificate::MonotoneNondecreasing => "monotone",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::MalformedCertificate(msg));
        match *self {
            RegularityCertificate::Bounds { m, big_m } => {
                if !(m.is_finite() && big_m.is_finite()) || m > big_m {
                    return bad(format!("bounds need finite m <= M, got m = {m}, M = {big_m}"));
                }
            }
            RegularityCertificate::Lipschitz { l } => {
                if !(l.is_finite() && l >= 0.0) {
                    return bad(format!("Lipschitz constant must be finite and >= 0, got {l}"));
                }
            }
            RegularityCertificate::Holder { h, r } => {
                if !(h.is_finite() && h >= 0.0) {
                    return bad(format!("Hölder constant must be finite and >= 0, got {h}"));
                }
                if !(r > 0.0 && r <= 1.0) {
                    return bad(format!("Hölder exponent must lie in (0, 1], got {r}"));
                }
            }
            RegularityCertificate::BoundedVariation { v } => {
                if !(v.is_finite() && v >= 0.0) {
                    return bad(format!("variation bound must be finite and >= 0, got {v}"));
                }
            }
            RegularityCertificate::MonotoneNondecreasing => {}
        }
        Ok(())
    }
}

/// Outcome of checking a certificate.
#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    Pass,
    Fail { witness: f64, detail: String },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass)
    }
}

fn slack(c: f64) -> f64 {
    CERT_RTOL * (1.0 + c.abs())
}

fn first_discontinuity(f: &PiecewiseFunction) -> Option<f64> {
    (0..f.breakpoints().len()).find(|&i| !f.continuous_at(i)).map(|i| f.breakpoints()[i])
}

pub fn verify_certificate(f: &PiecewiseFunction, cert: &RegularityCertificate) -> Result<Verdict> {
    verify_certificate_with(f, cert, DEFAULT_HOLDER_GRID)
}

/// Checks `cert` against `f`. Hölder certificates with `r < 1` that do not
/// follow from the Lipschitz/oscillation estimate are checked on a pair grid
/// of `holder_grid` points per piece; that path is a sampling check, not a proof.
pub fn verify_certificate_with(
    f: &PiecewiseFunction,
    cert: &RegularityCertificate,
    holder_grid: usize,
) -> Result<Verdict> {
    cert.validate()?;
    let (a, b) = (f.a(), f.b());
    let fail = |witness: f64, detail: String| Ok(Verdict::Fail { witness, detail });
    match *cert {
        RegularityCertificate::Bounds { m, big_m } => {
            let e = extrema_on(f, a, b)?;
            let tol = slack(m.abs().max(big_m.abs()));
            if e.inf.lo < m - tol {
                return fail(e.arg_inf, format!("inf = {} < m = {m}", e.inf.lo));
            }
            if e.sup.hi > big_m + tol {
                return fail(e.arg_sup, format!("sup = {} > M = {big_m}", e.sup.hi));
            }
            Ok(Verdict::Pass)
        }
        RegularityCertificate::Lipschitz { l } => {
            if let Some(t) = first_discontinuity(f) {
                return fail(t, "jump breaks the Lipschitz condition".into());
            }
            let (slope, at) = max_abs_slope(f, a, b)?;
            if slope > l + slack(l) {
                return fail(at, format!("|f'| = {slope} > L = {l}"));
            }
            Ok(Verdict::Pass)
        }
        RegularityCertificate::Holder { h, r } => {
            if r == 1.0 {
                return verify_certificate_with(f, &RegularityCertificate::Lipschitz { l: h }, holder_grid);
            }
            if let Some(t) = first_discontinuity(f) {
                return fail(t, "jump breaks the Hölder condition".into());
            }
            if h >= holder_sufficient_constant(f, r)? * (1.0 - 1e-12) {
                return Ok(Verdict::Pass);
            }
            holder_pair_grid(f, h, r, holder_grid.max(2))
        }
        RegularityCertificate::BoundedVariation { v } => {
            let tv = total_variation(f, a, b)?;
            if tv.mid() > v + slack(v) {
                return fail(b, format!("total variation {} > V = {v}", tv.mid()));
            }
            Ok(Verdict::Pass)
        }
        RegularityCertificate::MonotoneNondecreasing => {
            for (lo, hi, p) in f.intervals() {
                let dp = p.deriv();
                let (mn, at, mx, _) = dp.extrema(lo, hi);
                if mn < -slack(mx.abs().max(mn.abs())) * 1e-3 {
                    return fail(at, format!("f' = {mn} < 0"));
                }
            }
            for i in 0..f.breakpoints().len() {
                let (l, v, r) = (f.left_limit(i), f.values()[i], f.right_limit(i));
                if l > v && !nearly_equal(l, v) || v > r && !nearly_equal(v, r) {
                    return fail(f.breakpoints()[i], format!("jump chain {l} -> {v} -> {r} decreases"));
                }
            }
            Ok(Verdict::Pass)
        }
    }
}

/// A Hölder constant implied exactly by the Lipschitz constant `L` and the
/// oscillation `Ω` of a continuous `f`: `sup_d min(L d, Ω) / d^r`.
pub fn holder_sufficient_constant(f: &PiecewiseFunction, r: f64) -> Result<f64> {
    let (a, b) = (f.a(), f.b());
    let (l, _) = max_abs_slope(f, a, b)?;
    let (inf, sup) = inf_sup_on(f, a, b)?;
    let osc = (sup.hi - inf.lo).max(0.0);
    if l == 0.0 || osc == 0.0 {
        return Ok(0.0);
    }
    let d_star = osc / l;
    Ok(if d_star <= b - a { l.powf(r) * osc.powf(1.0 - r) } else { l * (b - a).powf(1.0 - r) })
}

fn holder_pair_grid(f: &PiecewiseFunction, h: f64, r: f64, per_piece: usize) -> Result<Verdict> {
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for (lo, hi, p) in f.intervals() {
        for j in 0..per_piece {
            let t = lo + (hi - lo) * j as f64 / (per_piece - 1) as f64;
            pts.push((t, p.eval(t)));
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    pts.dedup_by(|x, y| x.0 == y.0);
    let tol = slack(h);
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            let (t, ft) = pts[i];
            let (s, fs) = pts[j];
            if (ft - fs).abs() > h * (s - t).powf(r) + tol * (s - t).powf(r) + 1e-14 {
                return Ok(Verdict::Fail {
                    witness: t,
                    detail: format!("|f({t}) - f({s})| = {} exceeds H|t-s|^r", (ft - fs).abs()),
                });
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Fails with [`Error::CertificateInvalid`] unless `cert` holds for `f`.
pub fn require_certificate(f: &PiecewiseFunction, cert: &RegularityCertificate) -> Result<()> {
    match verify_certificate(f, cert)? {
        Verdict::Pass => Ok(()),
        Verdict::Fail { witness, .. } => Err(Error::CertificateInvalid { kind: cert.kind_name().into(), witness }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn endpoint_jumps() -> PiecewiseFunction {
        let vals = BTreeMap::from([(0, -1.0), (1, 1.0)]);
        PiecewiseFunction::with_values(vec![0.0, 1.0], vec![Poly::zero()], &vals).unwrap()
    }

    fn step() -> PiecewiseFunction {
        PiecewiseFunction::step(0.0, 1.0, 0.5, -1.0, 1.0).unwrap()
    }

    #[test]
    fn inf_sup_examples() {
        let t = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        let (i, s) = inf_sup_on(&t, 0.0, 1.0).unwrap();
        assert!(i.contains(0.0) && s.contains(1.0));
        let q = PiecewiseFunction::polynomial(0.0, 1.0, &[0.0, 1.0, -1.0]).unwrap();
        let (_, s) = inf_sup_on(&q, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(s.mid(), 0.25, epsilon = 1e-14);
        assert!(s.width() <= 1e-12);
        let (i, s) = inf_sup_on(&step(), 0.0, 1.0).unwrap();
        assert_eq!((i.mid(), s.mid()), (-1.0, 1.0));
    }

    #[test]
    fn sup_norm_examples() {
        let g = PiecewiseFunction::polynomial(0.0, 1.0, &[-0.5, 1.0]).unwrap();
        assert_abs_diff_eq!(sup_norm_on(&g, 0.0, 1.0).unwrap().mid(), 0.5, epsilon = 1e-15);
        let z = PiecewiseFunction::constant(0.0, 1.0, 0.0).unwrap();
        assert_eq!(sup_norm_on(&z, 0.0, 1.0).unwrap().mid(), 0.0);
        let sq = PiecewiseFunction::polynomial(0.0, 1.0, &[0.0, 0.0, 1.0]).unwrap();
        assert_abs_diff_eq!(sup_norm_on(&sq, 0.0, 1.0).unwrap().mid(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn variation_examples() {
        assert_abs_diff_eq!(total_variation(&endpoint_jumps(), 0.0, 1.0).unwrap().mid(), 2.0, epsilon = 1e-14);
        let t = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(total_variation(&t, 0.0, 1.0).unwrap().mid(), 1.0, epsilon = 1e-14);
        let q = PiecewiseFunction::polynomial(0.0, 1.0, &[0.0, 1.0, -1.0]).unwrap();
        let tv = total_variation(&q, 0.0, 1.0).unwrap();
        assert!(tv.contains(0.5) && tv.width() < 1e-12);
    }

    #[test]
    fn variation_is_additive() {
        let g = step();
        let whole = total_variation(&g, 0.0, 1.0).unwrap().mid();
        let parts = total_variation(&g, 0.0, 0.5).unwrap().mid() + total_variation(&g, 0.5, 1.0).unwrap().mid();
        assert_abs_diff_eq!(whole, parts, epsilon = 1e-14);
        assert_abs_diff_eq!(whole, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn p_norm_examples() {
        for p in [1.0, 1.5, 2.0, 3.7] {
            assert_abs_diff_eq!(p_norm(&step(), p, 0.0, 1.0).unwrap().mid(), 1.0, epsilon = 1e-12);
        }
        let z = PiecewiseFunction::constant(0.0, 1.0, 0.0).unwrap();
        assert_eq!(p_norm(&z, 2.0, 0.0, 1.0).unwrap().mid(), 0.0);
        let t = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        assert_abs_diff_eq!(p_norm(&t, 2.0, 0.0, 1.0).unwrap().mid(), 1.0 / 3f64.sqrt(), epsilon = 1e-14);
        // non-integer exponent takes the quadrature path: ∫ t^{2.5} = 1/3.5
        assert_abs_diff_eq!(p_norm(&t, 2.5, 0.0, 1.0).unwrap().mid(), (1.0f64 / 3.5).powf(1.0 / 2.5), epsilon = 1e-12);
        assert!(matches!(p_norm(&t, 0.5, 0.0, 1.0), Err(Error::BadExponent(_))));
    }

    #[test]
    fn certificate_examples() {
        let t = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        assert!(verify_certificate(&t, &RegularityCertificate::Lipschitz { l: 1.0 }).unwrap().passed());
        assert!(!verify_certificate(&t, &RegularityCertificate::Lipschitz { l: 0.9 }).unwrap().passed());
        assert!(verify_certificate(&t, &RegularityCertificate::Bounds { m: 0.0, big_m: 1.0 }).unwrap().passed());
        match verify_certificate(&step(), &RegularityCertificate::Lipschitz { l: 1e9 }).unwrap() {
            Verdict::Fail { witness, .. } => assert_eq!(witness, 0.5),
            Verdict::Pass => panic!("a jump cannot be Lipschitz"),
        }
        assert!(verify_certificate(&endpoint_jumps(), &RegularityCertificate::MonotoneNondecreasing).unwrap().passed());
        assert!(verify_certificate(&endpoint_jumps(), &RegularityCertificate::BoundedVariation { v: 2.0 })
            .unwrap()
            .passed());
        assert!(!verify_certificate(&endpoint_jumps(), &RegularityCertificate::BoundedVariation { v: 1.9 })
            .unwrap()
            .passed());
        let dec = PiecewiseFunction::polynomial(0.0, 1.0, &[0.0, -1.0]).unwrap();
        assert!(!verify_certificate(&dec, &RegularityCertificate::MonotoneNondecreasing).unwrap().passed());
    }

    #[test]
    fn holder_certificates() {
        // piecewise-linear interpolant of sqrt on a geometric grid
        let nodes: Vec<f64> = (0..=8).map(|k| if k == 0 { 0.0 } else { 0.5f64.powi(8 - k) }).collect();
        let pieces = nodes
            .windows(2)
            .map(|w| {
                let slope = (w[1].sqrt() - w[0].sqrt()) / (w[1] - w[0]);
                Poly::linear(w[0].sqrt() - slope * w[0], slope)
            })
            .collect();
        let f = PiecewiseFunction::new(nodes, pieces).unwrap();
        assert!(verify_certificate(&f, &RegularityCertificate::Holder { h: 1.0, r: 0.5 }).unwrap().passed());
        assert!(!verify_certificate(&f, &RegularityCertificate::Holder { h: 0.5, r: 0.5 }).unwrap().passed());
        let t = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        assert!(verify_certificate(&t, &RegularityCertificate::Holder { h: 1.0, r: 0.3 }).unwrap().passed());
    }

    #[test]
    fn malformed_certificates() {
        let t = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        for bad in [
            RegularityCertificate::Bounds { m: 1.0, big_m: 0.0 },
            RegularityCertificate::Lipschitz { l: -1.0 },
            RegularityCertificate::Holder { h: 1.0, r: 1.5 },
            RegularityCertificate::Holder { h: 1.0, r: 0.0 },
            RegularityCertificate::BoundedVariation { v: -0.1 },
        ] {
            assert!(matches!(verify_certificate(&t, &bad), Err(Error::MalformedCertificate(_))));
        }
    }

    #[test]
    fn certificate_wire_form() {
        let c = RegularityCertificate::Holder { h: 2.0, r: 0.5 };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"kind":"holder","params":[2.0,0.5]}"#);
        assert_eq!(serde_json::from_str::<RegularityCertificate>(&s).unwrap(), c);
        assert!(serde_json::from_str::<RegularityCertificate>(r#"{"kind":"bounds","params":[1]}"#).is_err());
    }
}
