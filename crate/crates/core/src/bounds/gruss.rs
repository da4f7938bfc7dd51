//! Grüss-type bounds for `T(f,g;u)` and their weighted forms for `T_w`.

use super::common::*;
use super::report::{BoundReport, ReportBuilder, TheoremId};
use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::funcrep::{extrema_on, p_norm, sup_norm_on, total_variation, PiecewiseFunction, RegularityCertificate};
use crate::functionals::{cheby_T, increment, weight_integrator};
use crate::stieltjes::{integrate_weighted, riemann_integral_abs, rs_integral_abs, Weighting};

/// Default exponent for the `L^p` branch when none is given.
pub const DEFAULT_P: f64 = 2.0;

struct Setup {
    a: f64,
    b: f64,
    delta: f64,
    lhs: Enclosure,
    c: Centered,
}

fn setup(f: &PiecewiseFunction, g: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<Setup> {
    let delta = increment(u)?;
    let t = cheby_T(f, g, u)?;
    let c = centered(g, u)?;
    Ok(Setup { a: u.a(), b: u.b(), delta, lhs: fenc(&t), c })
}

impl Setup {
    fn sup_gc(&self) -> Result<Enclosure> {
        Ok(nonneg(sup_norm_on(&self.c.gc, self.a, self.b)?, self.c.mean_err))
    }

    /// `∫ |g - mean| du` for monotone `u`.
    fn abs_gc_du(&self, u: &PiecewiseFunction) -> Result<Enclosure> {
        let r = rs_integral_abs(&self.c.gc, u, self.a, self.b)?;
        Ok(nonneg(enc(&r), self.c.mean_err * self.delta.abs()))
    }

    /// `∫ |t - mid|^r |g - mean| du` for monotone `u`.
    fn power_abs_gc_du(&self, u: &PiecewiseFunction, r: f64) -> Result<Enclosure> {
        let mid = 0.5 * (self.a + self.b);
        let how = Weighting { abs: true, power: Some((mid, r)) };
        let main = integrate_weighted(&self.c.gc, Some(u), self.a, self.b, how)?;
        let one = PiecewiseFunction::constant(self.a, self.b, 1.0)?;
        let mass = integrate_weighted(&one, Some(u), self.a, self.b, how)?;
        Ok(nonneg(enc(&main), self.c.mean_err * (mass.value.abs() + mass.abs_error)))
    }

    fn abs_gc_dt(&self) -> Result<Enclosure> {
        let r = riemann_integral_abs(&self.c.gc, self.a, self.b)?;
        Ok(nonneg(enc(&r), self.c.mean_err * (self.b - self.a)))
    }

    fn power_abs_gc_dt(&self, r: f64) -> Result<Enclosure> {
        let mid = 0.5 * (self.a + self.b);
        let how = Weighting { abs: true, power: Some((mid, r)) };
        let main = integrate_weighted(&self.c.gc, None, self.a, self.b, how)?;
        let mass = (self.b - self.a).powf(r + 1.0) / (2f64.powf(r) * (r + 1.0));
        Ok(nonneg(enc(&main), self.c.mean_err * mass * (1.0 + 1e-14)))
    }

    fn p_norm_gc(&self, p: f64) -> Result<Enclosure> {
        let n = p_norm(&self.c.gc, p, self.a, self.b)?;
        Ok(nonneg(n, self.c.mean_err * (self.b - self.a).powf(1.0 / p) * (1.0 + 1e-14)))
    }

    fn abs_delta(&self) -> Enclosure {
        c(self.delta.abs())
    }
}

fn half_osc(m: f64, big_m: f64) -> Enclosure {
    c(big_m).sub(&c(m)).scale(0.5)
}

fn require_increasing(u: &PiecewiseFunction) -> Result<()> {
    require_monotone(u)?;
    let delta = increment(u)?;
    if delta <= 0.0 {
        return Err(Error::DegenerateIntegrator { delta });
    }
    Ok(())
}

fn t_bv(
    id: TheoremId,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    let (m, big_m) = bounds_of(f, cert_f)?;
    let s = setup(f, g, u)?;
    let v = total_variation(u, s.a, s.b)?;
    let rhs = half_osc(m, big_m).mul(&s.sup_gc()?).mul(&v).div_pos(&s.abs_delta());
    Ok(ReportBuilder::upper(id, s.lhs)
        .tier("bound", rhs)
        .extra("variation_u", v.mid())
        .extra("mean_u_g", s.c.mean)
        .cert("f", *cert_f)
        .build())
}

/// `|T| <= ½(M-m) / |u(b)-u(a)| · ‖g - mean_u g‖_∞ · V(u)`.
pub fn bound_t_bv(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    t_bv(TheoremId::Thm2_1a, f, g, u, cert_f)
}

fn t_monotone(
    id: TheoremId,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    let (m, big_m) = bounds_of(f, cert_f)?;
    require_increasing(u)?;
    let s = setup(f, g, u)?;
    let rhs = half_osc(m, big_m).mul(&s.abs_gc_du(u)?).div_pos(&s.abs_delta());
    Ok(ReportBuilder::upper(id, s.lhs).tier("bound", rhs).extra("mean_u_g", s.c.mean).cert("f", *cert_f).build())
}

/// `|T| <= ½(M-m) / (u(b)-u(a)) · ∫ |g - mean_u g| du` for nondecreasing `u`.
pub fn bound_t_monotone(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    t_monotone(TheoremId::Thm2_2, f, g, u, cert_f)
}

fn t_lipschitz_u(
    id: TheoremId,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
    cert_u: &RegularityCertificate,
) -> Result<BoundReport> {
    let (m, big_m) = bounds_of(f, cert_f)?;
    let l = lipschitz_of(u, cert_u)?;
    let s = setup(f, g, u)?;
    let rhs = half_osc(m, big_m).mul(&c(l)).mul(&s.abs_gc_dt()?).div_pos(&s.abs_delta());
    Ok(ReportBuilder::upper(id, s.lhs)
        .tier("bound", rhs)
        .extra("mean_u_g", s.c.mean)
        .cert("f", *cert_f)
        .cert("u", *cert_u)
        .build())
}

/// `|T| <= ½ L (M-m) / |u(b)-u(a)| · ∫ |g - mean_u g| dt` for `L`-Lipschitz `u`.
pub fn bound_t_lipschitz_u(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
    cert_u: &RegularityCertificate,
) -> Result<BoundReport> {
    t_lipschitz_u(TheoremId::Thm2_3a, f, g, u, cert_f, cert_u)
}

fn holder_id(r: f64, general: TheoremId, lipschitz: TheoremId) -> TheoremId {
    if r == 1.0 {
        lipschitz
    } else {
        general
    }
}

fn t_holder_bv(
    id: Option<TheoremId>,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    let (h, r) = holder_of(f, cert_f)?;
    let id = id.unwrap_or(holder_id(r, TheoremId::Thm2_1, TheoremId::Cor2_2));
    let s = setup(f, g, u)?;
    let v = total_variation(u, s.a, s.b)?;
    let k = h * ((s.b - s.a) / 2.0).powf(r);
    let rhs = c(k).mul(&s.sup_gc()?).mul(&v).div_pos(&s.abs_delta());
    Ok(ReportBuilder::upper(id, s.lhs)
        .tier("bound", rhs)
        .extra("variation_u", v.mid())
        .extra("mean_u_g", s.c.mean)
        .cert("f", *cert_f)
        .build())
}

/// `|T| <= H (b-a)^r / 2^r / |u(b)-u(a)| · ‖g - mean_u g‖_∞ · V(u)`;
/// reported as `cor_2_2` when `r = 1`.
pub fn bound_t_holder_bv(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    t_holder_bv(None, f, g, u, cert_f)
}

fn t_holder_monotone(
    id: Option<TheoremId>,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    let (h, r) = holder_of(f, cert_f)?;
    let id = id.unwrap_or(holder_id(r, TheoremId::Thm2_3, TheoremId::Cor2_4));
    require_increasing(u)?;
    let s = setup(f, g, u)?;
    let d = s.abs_delta();
    let first = c(h).mul(&s.power_abs_gc_du(u, r)?).div_pos(&d);
    let k = h * ((s.b - s.a) / 2.0).powf(r);
    let second = c(k).mul(&s.abs_gc_du(u)?).div_pos(&d);
    Ok(ReportBuilder::upper(id, s.lhs)
        .tier("first", first)
        .tier("second", second)
        .chain("first", "second")
        .extra("mean_u_g", s.c.mean)
        .cert("f", *cert_f)
        .build())
}

/// Two-tier bound for nondecreasing `u`:
/// `H/Δu · ∫|t-mid|^r |g - mean| du <= H (b-a)^r / (2^r Δu) · ∫|g - mean| du`.
pub fn bound_t_holder_monotone(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
) -> Result<BoundReport> {
    t_holder_monotone(None, f, g, u, cert_f)
}

/// `q` with `1/p + 1/q = 1`, for `1 < p < ∞`.
pub fn conjugate(p: f64) -> Result<f64> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::BadExponent(p));
    }
    Ok(p / (p - 1.0))
}

#[allow(clippy::too_many_arguments)]
fn t_holder_lipschitz(
    id: Option<TheoremId>,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
    cert_u: &RegularityCertificate,
    p: f64,
) -> Result<BoundReport> {
    let q = conjugate(p)?;
    let (h, r) = holder_of(f, cert_f)?;
    let k = lipschitz_of(u, cert_u)?;
    let id = id.unwrap_or(holder_id(r, TheoremId::Thm2_5, TheoremId::Cor2_6));
    let s = setup(f, g, u)?;
    let d = s.abs_delta();
    let hk = c(h * k);
    let len = s.b - s.a;
    let two_r = 2f64.powf(r);
    let first = hk.mul(&s.power_abs_gc_dt(r)?).div_pos(&d);
    let inf_branch = hk.mul(&c(len.powf(r + 1.0) / (two_r * (r + 1.0)))).mul(&s.sup_gc()?).div_pos(&d);
    let p_branch =
        hk.mul(&c(len.powf(r + 1.0 / q) / (two_r * (q * r + 1.0).powf(1.0 / q)))).mul(&s.p_norm_gc(p)?).div_pos(&d);
    let one_branch = hk.mul(&c(len.powf(r) / two_r)).mul(&s.abs_gc_dt()?).div_pos(&d);
    Ok(ReportBuilder::upper(id, s.lhs)
        .tier("first", first)
        .tier("inf_branch", inf_branch)
        .tier("p_branch", p_branch)
        .tier("one_branch", one_branch)
        .chain("first", "inf_branch")
        .chain("first", "p_branch")
        .chain("first", "one_branch")
        .extra("p", p)
        .extra("q", q)
        .extra("mean_u_g", s.c.mean)
        .cert("f", *cert_f)
        .cert("u", *cert_u)
        .build())
}

/// First-tier bound `HK/|Δu| · ∫|t-mid|^r |g - mean| dt` and its three
/// norm branches (`∞`, `p`, `1`) for Hölder `f` and `K`-Lipschitz `u`;
/// reported as `cor_2_6` when `r = 1`.
pub fn bound_t_holder_lipschitz(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
    cert_u: &RegularityCertificate,
    p: f64,
) -> Result<BoundReport> {
    t_holder_lipschitz(None, f, g, u, cert_f, cert_u, p)
}

/// Which of the six weighted bounds for `T_w` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightedItem {
    /// bounded `f`, `∫|w|` as the variation
    Item1,
    /// bounded `f`, `w >= 0`
    Item2,
    /// bounded `f`, `‖w‖_∞` as the Lipschitz constant
    Item3,
    /// Hölder `f`, `∫|w|` as the variation
    Item4,
    /// Hölder `f`, `w >= 0`, two tiers
    Item5,
    /// Hölder `f`, `‖w‖_∞`, first tier and three branches
    Item6,
}

impl WeightedItem {
    pub fn theorem_id(&self) -> TheoremId {
        match self {
            WeightedItem::Item1 => TheoremId::WeightedItem1,
            WeightedItem::Item2 => TheoremId::WeightedItem2,
            WeightedItem::Item3 => TheoremId::WeightedItem3,
            WeightedItem::Item4 => TheoremId::WeightedItem4,
            WeightedItem::Item5 => TheoremId::WeightedItem5,
            WeightedItem::Item6 => TheoremId::WeightedItem6,
        }
    }

    pub fn from_theorem(id: TheoremId) -> Option<Self> {
        Some(match id {
            TheoremId::WeightedItem1 => WeightedItem::Item1,
            TheoremId::WeightedItem2 => WeightedItem::Item2,
            TheoremId::WeightedItem3 => WeightedItem::Item3,
            TheoremId::WeightedItem4 => WeightedItem::Item4,
            TheoremId::WeightedItem5 => WeightedItem::Item5,
            TheoremId::WeightedItem6 => WeightedItem::Item6,
            _ => return None,
        })
    }
}

fn require_nonnegative_weight(w: &PiecewiseFunction) -> Result<()> {
    let e = extrema_on(w, w.a(), w.b())?;
    if e.inf.mid() < 0.0 {
        return Err(Error::NegativeWeight { t: e.arg_inf });
    }
    Ok(())
}

/// Bounds for the weighted functional `T_w(f,g)`, each obtained from the
/// corresponding bound for `T(f,g;u)` with `u(t) = ∫_a^t w`.
pub fn weighted_bounds(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    w: &PiecewiseFunction,
    cert_f: &RegularityCertificate,
    which: WeightedItem,
    p: f64,
) -> Result<BoundReport> {
    let u = weight_integrator(w)?;
    let id = Some(which.theorem_id());
    let (a, b) = (w.a(), w.b());
    let abs_w = riemann_integral_abs(w, a, b)?;
    let sup_w = sup_norm_on(w, a, b)?;
    let lip_u = RegularityCertificate::Lipschitz { l: sup_w.hi };
    let mut report = match which {
        WeightedItem::Item1 | WeightedItem::Item4 => {
            let mut rep = match which {
                WeightedItem::Item1 => t_bv(which.theorem_id(), f, g, &u, cert_f)?,
                _ => t_holder_bv(id, f, g, &u, cert_f)?,
            };
            // the variation of u = ∫w is ∫|w|
            let v = rep.extras["variation_u"];
            rep.chain_holds &= (v - abs_w.value).abs() <= 1e-9 * (1.0 + abs_w.value);
            rep
        }
        WeightedItem::Item2 => {
            require_nonnegative_weight(w)?;
            t_monotone(which.theorem_id(), f, g, &u, cert_f)?
        }
        WeightedItem::Item3 => t_lipschitz_u(which.theorem_id(), f, g, &u, cert_f, &lip_u)?,
        WeightedItem::Item5 => {
            require_nonnegative_weight(w)?;
            t_holder_monotone(id, f, g, &u, cert_f)?
        }
        WeightedItem::Item6 => t_holder_lipschitz(id, f, g, &u, cert_f, &lip_u, p)?,
    };
    report.extras.insert("int_abs_w".into(), abs_w.value);
    report.extras.insert("sup_abs_w".into(), sup_w.mid());
    Ok(report)
}
