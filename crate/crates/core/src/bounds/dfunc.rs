//! Bounds for `D(f;u) = ∫f du - [u(b)-u(a)] mean f`: direct bounds, the
//! kernel bounds through `Φ`, `Γ` and `(t-a)(b-t)Δ`, their corollaries in
//! terms of norms of `Δ`, and the lower bound under `Δ >= 0`.

use super::beta::beta;
use super::common::*;
use super::gruss::{conjugate, DEFAULT_P};
use super::report::{BoundReport, ReportBuilder, TheoremId};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::funcrep::{
    extrema_on, require_certificate, sup_norm_on, total_variation, verify_certificate, PiecewiseFunction,
    RegularityCertificate, Verdict,
};
use crate::functionals::{functional_D, gamma_kernel, integrate_fn_df, phi_kernel, DeltaKernel};
use crate::poly::Poly;
use crate::stieltjes::{riemann_integral_abs, rs_integral_abs};

/// Regularity class of `f` for the kernel bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FClass {
    BoundedVariation { v: f64 },
    Lipschitz { l: f64 },
    Monotone,
}

impl FClass {
    pub fn certificate(&self) -> RegularityCertificate {
        match *self {
            FClass::BoundedVariation { v } => RegularityCertificate::BoundedVariation { v },
            FClass::Lipschitz { l } => RegularityCertificate::Lipschitz { l },
            FClass::Monotone => RegularityCertificate::MonotoneNondecreasing,
        }
    }

    pub fn from_certificate(cert: &RegularityCertificate) -> Result<Self> {
        Ok(match *cert {
            RegularityCertificate::BoundedVariation { v } => FClass::BoundedVariation { v },
            RegularityCertificate::Lipschitz { l } => FClass::Lipschitz { l },
            RegularityCertificate::Holder { h, r } if r == 1.0 => FClass::Lipschitz { l: h },
            RegularityCertificate::MonotoneNondecreasing => FClass::Monotone,
            _ => return Err(mismatch("bounded-variation, Lipschitz or monotone", cert)),
        })
    }

    fn theorem_id(&self) -> TheoremId {
        match self {
            FClass::BoundedVariation { .. } => TheoremId::ThmA6i,
            FClass::Lipschitz { .. } => TheoremId::ThmA6ii,
            FClass::Monotone => TheoremId::ThmA6iii,
        }
    }
}

fn d_lhs(f: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<Enclosure> {
    Ok(fenc(&functional_D(f, u)?))
}

fn len(u: &PiecewiseFunction) -> f64 {
    u.b() - u.a()
}

fn require_continuous(u: &PiecewiseFunction, what: &str) -> Result<()> {
    if u.is_continuous() {
        Ok(())
    } else {
        Err(Error::ClassMismatch(format!("{what} needs a continuous integrator u")))
    }
}

fn require_monotone_f(f: &PiecewiseFunction) -> Result<()> {
    require_certificate(f, &RegularityCertificate::MonotoneNondecreasing)
}

fn min_by_mid(xs: &[Enclosure]) -> Enclosure {
    *xs.iter().min_by(|x, y| x.mid().total_cmp(&y.mid())).expect("nonempty")
}

/// `½ L (M-m)(b-a)` for `f` in `[m, M]` and `L`-Lipschitz `u`, and
/// `½ K (b-a) V(u)` for `K`-Lipschitz `f`; whichever the certificates allow,
/// with the smaller one as the primary bound.
pub fn bound_d_prior(
    f: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &[RegularityCertificate],
    cert_u: &[RegularityCertificate],
) -> Result<BoundReport> {
    let l = len(u);
    let bounds = cert_f.iter().find(|c| matches!(c, RegularityCertificate::Bounds { .. }));
    let lip_f = cert_f.iter().find(|c| matches!(c, RegularityCertificate::Lipschitz { .. }));
    let lip_u = cert_u.iter().find(|c| matches!(c, RegularityCertificate::Lipschitz { .. }));
    let bv_u = cert_u.iter().find(|c| matches!(c, RegularityCertificate::BoundedVariation { .. }));
    let mut tiers = Vec::new();
    let mut used = Vec::new();
    if let (Some(cb), Some(cl)) = (bounds, lip_u) {
        let (m, big_m) = bounds_of(f, cb)?;
        let lu = lipschitz_of(u, cl)?;
        tiers.push(("thm_a_1", c(0.5 * lu * l).mul(&c(big_m).sub(&c(m)))));
        used.push(("f", *cb));
        used.push(("u", *cl));
    }
    if let Some(ck) = lip_f {
        let k = lipschitz_of(f, ck)?;
        let v = match bv_u {
            Some(cv) => {
                used.push(("u", *cv));
                c(variation_of(u, cv)?)
            }
            None => total_variation(u, u.a(), u.b())?,
        };
        tiers.push(("thm_a_2", c(0.5 * k * l).mul(&v)));
        used.push(("f", *ck));
    }
    if tiers.is_empty() {
        return Err(Error::ClassMismatch("needs bounds on f with a Lipschitz u, or a Lipschitz f".to_string()));
    }
    let id = if tiers[0].0 == "thm_a_1" { TheoremId::ThmA1 } else { TheoremId::ThmA2 };
    let encs: Vec<Enclosure> = tiers.iter().map(|t| t.1).collect();
    let mut rb = ReportBuilder::upper(id, d_lhs(f, u)?);
    if tiers.len() > 1 {
        rb = rb.tier("bound", min_by_mid(&encs));
    }
    for (name, e) in &tiers {
        rb = rb.tier(name, *e);
    }
    for (name, cert) in used {
        rb = rb.cert(name, cert);
    }
    Ok(rb.build())
}

/// The three kernel bounds for the class of `f`; the primary bound is the
/// smallest.
///
/// * bounded variation, `u` continuous: `sup|K| V(f)`,
/// * `L`-Lipschitz: `L ∫|K| dt`,
/// * nondecreasing, `u` continuous: `∫|K| df`,
///
/// with `K` each of `Φ`, `Γ/(b-a)` and `(t-a)(b-t)Δ/(b-a)`.
pub fn bound_d_kernel(f: &PiecewiseFunction, u: &PiecewiseFunction, class: FClass) -> Result<BoundReport> {
    let (a, b) = (u.a(), u.b());
    let inv = 1.0 / len(u);
    let phi = phi_kernel(u);
    let gamma = gamma_kernel(u);
    let gd = DeltaKernel::new(u).weighted();
    let cert = class.certificate();
    let forms: [Enclosure; 3] = match class {
        FClass::BoundedVariation { .. } => {
            require_continuous(u, "the bounded-variation kernel bound")?;
            let v = c(variation_of(f, &cert)?);
            [
                sup_norm_on(&phi, a, b)?.mul(&v),
                sup_norm_on(&gamma, a, b)?.mul(&v).scale(inv),
                sup_norm_on(&gd, a, b)?.mul(&v).scale(inv),
            ]
        }
        FClass::Lipschitz { .. } => {
            let l = c(lipschitz_of(f, &cert)?);
            [
                enc(&riemann_integral_abs(&phi, a, b)?).mul(&l),
                enc(&riemann_integral_abs(&gamma, a, b)?).mul(&l).scale(inv),
                enc(&riemann_integral_abs(&gd, a, b)?).mul(&l).scale(inv),
            ]
        }
        FClass::Monotone => {
            require_continuous(u, "the monotone kernel bound")?;
            require_monotone_f(f)?;
            [
                enc(&rs_integral_abs(&phi, f, a, b)?),
                enc(&rs_integral_abs(&gamma, f, a, b)?).scale(inv),
                enc(&rs_integral_abs(&gd, f, a, b)?).scale(inv),
            ]
        }
    };
    let spread = forms.iter().map(|e| e.mid()).fold(f64::NEG_INFINITY, f64::max)
        - forms.iter().map(|e| e.mid()).fold(f64::INFINITY, f64::min);
    Ok(ReportBuilder::upper(class.theorem_id(), d_lhs(f, u)?)
        .tier("bound", min_by_mid(&forms))
        .tier("phi", forms[0])
        .tier("gamma", forms[1])
        .tier("delta", forms[2])
        .extra("kernel_spread", spread)
        .cert("f", cert)
        .build())
}

/// Which corollary chain of the kernel bounds to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Corollary {
    /// `f` of bounded variation, `u` continuous: sup norm of `Δ`
    BoundedVariation,
    /// `f` Lipschitz: `∞`, `p` and `1` norms of `Δ`
    Lipschitz,
    /// `f` nondecreasing: norms of `Δ` against `df`
    Monotone,
}

impl Corollary {
    pub fn theorem_id(&self) -> TheoremId {
        match self {
            Corollary::BoundedVariation => TheoremId::CorA7,
            Corollary::Lipschitz => TheoremId::CorA8,
            Corollary::Monotone => TheoremId::CorA9,
        }
    }

    pub fn from_theorem(id: TheoremId) -> Option<Self> {
        Some(match id {
            TheoremId::CorA7 => Corollary::BoundedVariation,
            TheoremId::CorA8 => Corollary::Lipschitz,
            TheoremId::CorA9 => Corollary::Monotone,
            _ => return None,
        })
    }
}

/// The corollary chains, each starting from the `(t-a)(b-t)Δ` kernel bound.
/// `p` (default 2) selects the Hölder branch. Norms of an unbounded `Δ`
/// (`u` jumping at an end) are infinite.
pub fn bound_d_corollaries(
    f: &PiecewiseFunction,
    u: &PiecewiseFunction,
    which: Corollary,
    cert_f: &RegularityCertificate,
    p: Option<f64>,
) -> Result<BoundReport> {
    let (a, b) = (u.a(), u.b());
    let l = len(u);
    let delta = DeltaKernel::new(u);
    let gd = delta.weighted();
    let lhs = d_lhs(f, u)?;
    let rb = ReportBuilder::upper(which.theorem_id(), lhs).cert("f", *cert_f);
    let report = match which {
        Corollary::BoundedVariation => {
            require_continuous(u, "the bounded-variation corollary")?;
            let v = c(variation_of(f, cert_f)?);
            let first = sup_norm_on(&gd, a, b)?.mul(&v).scale(1.0 / l);
            let second = delta.sup_abs().mul(&v).scale(l / 4.0);
            rb.tier("first", first).tier("second", second).chain("first", "second").build()
        }
        Corollary::Lipschitz => {
            let p = p.unwrap_or(DEFAULT_P);
            let q = conjugate(p)?;
            let lf = c(lipschitz_of(f, cert_f)?);
            let first = enc(&riemann_integral_abs(&gd, a, b)?).mul(&lf).scale(1.0 / l);
            let inf_branch = delta.sup_abs().mul(&lf).scale(l * l / 6.0);
            let bq = beta(q + 1.0, q + 1.0)?.powf(1.0 / q);
            let p_branch = delta.p_norm(p)?.mul(&bq).mul(&lf).scale(l.powf(1.0 + 1.0 / q));
            let one_branch = delta.p_norm(1.0)?.mul(&lf).scale(l / 4.0);
            rb.tier("first", first)
                .tier("inf_branch", inf_branch)
                .tier("p_branch", p_branch)
                .tier("one_branch", one_branch)
                .chain("first", "inf_branch")
                .chain("first", "p_branch")
                .chain("first", "one_branch")
                .extra("p", p)
                .extra("q", q)
                .build()
        }
        Corollary::Monotone => {
            let p = p.unwrap_or(DEFAULT_P);
            let q = conjugate(p)?;
            require_monotone_f(f)?;
            let first = enc(&rs_integral_abs(&gd, f, a, b)?).scale(1.0 / l);
            let (one, p_branch, inf_branch) = if delta.is_bounded() {
                let unit = |_: f64| 1.0;
                let int_abs = enc(&delta.integrate_abs_pow_df(f, 1.0, &unit)?);
                let int_p = enc(&delta.integrate_abs_pow_df(f, p, &unit)?);
                let bump = |t: f64| (t - a) * (b - t);
                let bump_q = |t: f64| ((t - a) * (b - t)).powf(q);
                let knots = delta.knots();
                let mass = enc(&integrate_fn_df(&bump, &knots, f)?);
                let mass_q = enc(&integrate_fn_df(&bump_q, &knots, f)?);
                let nonneg_root = |e: Enclosure, r: f64| nonneg(e, 0.0).powf(r);
                (
                    nonneg(int_abs, 0.0).scale(l / 4.0),
                    nonneg_root(mass_q, 1.0 / q).mul(&nonneg_root(int_p, 1.0 / p)).scale(1.0 / l),
                    delta.sup_abs().mul(&nonneg(mass, 0.0)).scale(1.0 / l),
                )
            } else {
                let inf = c(f64::INFINITY);
                (inf, inf, inf)
            };
            rb.tier("first", first)
                .tier("one_branch", one)
                .tier("p_branch", p_branch)
                .tier("inf_branch", inf_branch)
                .chain("first", "one_branch")
                .chain("first", "p_branch")
                .chain("first", "inf_branch")
                .extra("p", p)
                .extra("q", q)
                .build()
        }
    };
    Ok(report)
}

/// Whether `u` is convex on `[a, b]`: `p'' >= 0` on each piece, continuity
/// inside, nondecreasing one-sided slopes at interior breakpoints and no
/// downward jump at the ends.
pub fn is_convex(u: &PiecewiseFunction) -> Result<bool> {
    let bps = u.breakpoints();
    let k = u.pieces().len();
    for (i, p) in u.pieces().iter().enumerate() {
        let (lo, hi) = (bps[i], bps[i + 1]);
        let (min, _, _, _) = p.deriv().deriv().extrema(lo, hi);
        if min < -1e-12 * (1.0 + p.rounding_scale(lo).max(p.rounding_scale(hi))) {
            return Ok(false);
        }
    }
    for i in 1..k {
        let t = bps[i];
        let (sl, sr) = (u.pieces()[i - 1].deriv().eval(t), u.pieces()[i].deriv().eval(t));
        if !u.continuous_at(i) || sl > sr + 1e-12 * (1.0 + sl.abs().max(sr.abs())) {
            return Ok(false);
        }
    }
    let tol = |x: f64| 1e-12 * (1.0 + x.abs());
    Ok(u.values()[0] >= u.right_limit(0) - tol(u.values()[0]) && u.values()[k] >= u.left_limit(k) - tol(u.values()[k]))
}

/// Checks `Δ >= 0` on `(a, b)`: convexity of `u` is sufficient; otherwise
/// `Γ = (t-a)(b-t)Δ` is bounded below on every piece.
pub fn check_delta_nonnegative(u: &PiecewiseFunction) -> Result<()> {
    if is_convex(u)? {
        return Ok(());
    }
    let gamma = gamma_kernel(u);
    let e = extrema_on(&gamma, u.a(), u.b())?;
    if e.inf.hi < 0.0 {
        return Err(Error::HypothesisFailed { t: e.arg_inf, reason: format!("Δ < 0 (Γ = {:e})", e.inf.mid()) });
    }
    Ok(())
}

/// Lower bound `D(f;u) >= (1/(b-a)) |∫(t-a)|u(b)-u(t)| df - ∫(b-t)|u(t)-u(a)| df| >= 0`
/// for nondecreasing `f` and `Δ >= 0`.
pub fn positivity_check_d(f: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<BoundReport> {
    let (a, b) = (u.a(), u.b());
    if let Verdict::Fail { witness, detail } = verify_certificate(f, &RegularityCertificate::MonotoneNondecreasing)? {
        return Err(Error::HypothesisFailed { t: witness, reason: format!("f is not nondecreasing: {detail}") });
    }
    check_delta_nonnegative(u)?;
    let (ua, ub) = (u.value_at(a), u.value_at(b));
    let h1 = u.scale(-1.0).add_constant(ub).mul_poly(&Poly::linear(-a, 1.0));
    let h2 = u.add_constant(-ua).mul_poly(&Poly::linear(b, -1.0));
    let i1 = enc(&rs_integral_abs(&h1, f, a, b)?);
    let i2 = enc(&rs_integral_abs(&h2, f, a, b)?);
    let lower = i1.sub(&i2).abs().scale(1.0 / len(u));
    Ok(ReportBuilder::lower(TheoremId::ThmA11, d_lhs(f, u)?)
        .tier("lower", lower)
        .tier("zero", c(0.0))
        .check(lower.hi >= 0.0)
        .extra("convex", if is_convex(u)? { 1.0 } else { 0.0 })
        .cert("f", RegularityCertificate::MonotoneNondecreasing)
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
    fn prior_examples() {
        let t = poly(&[0.0, 1.0]);
        let step = PiecewiseFunction::step(0.0, 1.0, 0.5, -1.0, 1.0).unwrap();
        let bounds = RegularityCertificate::Bounds { m: -1.0, big_m: 1.0 };
        let r = bound_d_prior(&step, &t, &[bounds], &[LIP1]).unwrap();
        assert_eq!(r.theorem_id, TheoremId::ThmA1);
        assert!(r.lhs < 1e-13 && r.holds, "{r:?}");
        let r = bound_d_prior(&t, &t, &[RegularityCertificate::Bounds { m: 0.0, big_m: 1.0 }, LIP1], &[LIP1]).unwrap();
        assert_eq!(r.tiers.len(), 3);
        assert_abs_diff_eq!(r.tier("thm_a_1").unwrap().value, 0.5);
        let f = poly(&[-0.5, 1.0]);
        let r = bound_d_prior(&f, &step_at_end(), &[LIP1], &[]).unwrap();
        assert_eq!(r.theorem_id, TheoremId::ThmA2);
        assert_abs_diff_eq!(r.lhs, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 0.5, epsilon = 1e-15);
        assert!((r.ratio - 1.0).abs() < 1e-9);
        assert!(matches!(bound_d_prior(&f, &t, &[], &[LIP1]), Err(Error::ClassMismatch(_))));
    }

    #[test]
    fn kernel_examples() {
        let t = poly(&[0.0, 1.0]);
        let sq = poly(&[0.0, 0.0, 1.0]);
        let r = bound_d_kernel(&sq, &t, FClass::Lipschitz { l: 2.0 }).unwrap();
        assert!(r.lhs < 1e-13 && r.rhs < 1e-13 && r.ratio == 0.0, "{r:?}");
        let r = bound_d_kernel(&t, &sq, FClass::Lipschitz { l: 1.0 }).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.tier("gamma").unwrap().value, 1.0 / 6.0, epsilon = 1e-15);
        assert!((r.ratio - 1.0).abs() < 1e-9 && r.holds);
        assert!(r.extras["kernel_spread"] < 1e-14);
        let step = PiecewiseFunction::step(0.0, 1.0, 0.5, 0.0, 2.0).unwrap();
        let r = bound_d_kernel(&step, &sq, FClass::Monotone).unwrap();
        // Γ(½) · 2 = ½
        assert_abs_diff_eq!(r.tier("gamma").unwrap().value, 0.5, epsilon = 1e-15);
        assert!(r.holds);
        let r = bound_d_kernel(&step, &sq, FClass::BoundedVariation { v: 2.0 }).unwrap();
        assert!(r.holds);
        assert!(matches!(bound_d_kernel(&t, &step_at_end(), FClass::Monotone), Err(Error::ClassMismatch(_))));
    }

    #[test]
    fn corollary_examples() {
        let t = poly(&[0.0, 1.0]);
        let sq = poly(&[0.0, 0.0, 1.0]);
        let r = bound_d_corollaries(&t, &sq, Corollary::Lipschitz, &LIP1, Some(2.0)).unwrap();
        assert_abs_diff_eq!(r.tier("one_branch").unwrap().value, 0.25, epsilon = 1e-14);
        assert_abs_diff_eq!(r.tier("p_branch").unwrap().value, (1.0f64 / 30.0).sqrt(), epsilon = 1e-13);
        assert_abs_diff_eq!(r.tier("inf_branch").unwrap().value, 1.0 / 6.0, epsilon = 1e-14);
        assert!(r.sound());
        let r = bound_d_corollaries(
            &t,
            &sq,
            Corollary::BoundedVariation,
            &RegularityCertificate::BoundedVariation { v: 1.0 },
            None,
        )
        .unwrap();
        assert_abs_diff_eq!(r.tier("second").unwrap().value, 0.25, epsilon = 1e-14);
        assert!(r.sound());
        let r = bound_d_corollaries(&t, &sq, Corollary::Monotone, &RegularityCertificate::MonotoneNondecreasing, None)
            .unwrap();
        assert_abs_diff_eq!(r.tier("first").unwrap().value, 1.0 / 6.0, epsilon = 1e-14);
        assert!(r.sound(), "{r:?}");
        let lin = poly(&[1.0, 2.0]);
        let r = bound_d_corollaries(&t, &lin, Corollary::Lipschitz, &LIP1, None).unwrap();
        assert!(r.tiers.iter().all(|t| t.value.abs() < 1e-14) && r.sound());
        assert!(matches!(
            bound_d_corollaries(&t, &sq, Corollary::Lipschitz, &LIP1, Some(1.0)),
            Err(Error::BadExponent(_))
        ));
        let r = bound_d_corollaries(&t, &step_at_end(), Corollary::Lipschitz, &LIP1, None).unwrap();
        assert!(r.tier("inf_branch").unwrap().value.is_infinite() && r.sound());
    }

    #[test]
    fn positivity_examples() {
        let t = poly(&[0.0, 1.0]);
        let sq = poly(&[0.0, 0.0, 1.0]);
        let r = positivity_check_d(&t, &sq).unwrap();
        assert_abs_diff_eq!(r.lhs, 1.0 / 6.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.rhs, 1.0 / 6.0, epsilon = 1e-15);
        assert!(r.sound());
        let r = positivity_check_d(&t, &poly(&[1.0, -3.0])).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.sound());
        let step = PiecewiseFunction::step(0.0, 1.0, 0.5, 0.0, 1.0).unwrap();
        assert!(positivity_check_d(&step, &sq).unwrap().sound());
        assert!(matches!(positivity_check_d(&t, &poly(&[0.0, 0.0, -1.0])), Err(Error::HypothesisFailed { .. })));
        // not convex, but Δ >= 0
        let cubic = poly(&[0.0, -0.5, 2.5, -1.0]);
        assert!(!is_convex(&cubic).unwrap());
        assert!(positivity_check_d(&t, &cubic).unwrap().sound());
    }
}
