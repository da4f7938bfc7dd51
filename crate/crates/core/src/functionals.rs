//! The Čebyšev functionals `T(f,g;u)` and `T_w(f,g)`, the functionals
//! `D(f;u)` and `E(f,g;w)`, and the kernels `Φ`, `Γ`, `Δ` that represent
//! `D` as an integral against `df`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::enclosure::Enclosure;
use crate::error::{Error, Result};
use crate::funcrep::{nearly_equal, PiecewiseFunction};
use crate::numeric;
use crate::poly::Poly;
use crate::stieltjes::{self, riemann_integral, rs_integral, IntegralResult};

const EPS: f64 = f64::EPSILON;

/// A functional value with its error and the sub-integrals it was built from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub value: f64,
    pub abs_error: f64,
    pub components: BTreeMap<String, f64>,
}

impl FunctionalValue {
    pub fn enclosure(&self) -> Enclosure {
        Enclosure::around(self.value, self.abs_error)
    }
}

/// `u(b) - u(a)`, rejecting a vanishing increment.
pub fn increment(u: &PiecewiseFunction) -> Result<f64> {
    let (ua, ub) = (u.value_at(u.a()), u.value_at(u.b()));
    let delta = ub - ua;
    if delta.abs() <= 4.0 * EPS * (ua.abs() + ub.abs()) {
        return Err(Error::DegenerateIntegrator { delta });
    }
    Ok(delta)
}

/// `mean_u g = (1/(u(b)-u(a))) ∫ g du` with its error.
pub fn mean_u(g: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<(f64, f64)> {
    let delta = increment(u)?;
    let ig = rs_integral(g, u, u.a(), u.b())?;
    let m = ig.value / delta;
    Ok((m, ig.abs_error / delta.abs() + m.abs() * 4.0 * EPS))
}

/// `T(f,g;u)`.
#[allow(non_snake_case)]
pub fn cheby_T(f: &PiecewiseFunction, g: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<FunctionalValue> {
    let delta = increment(u)?;
    let (a, b) = (u.a(), u.b());
    let fg = f.mul(g)?;
    let ifg = rs_integral(&fg, u, a, b)?;
    let if_ = rs_integral(f, u, a, b)?;
    let ig = rs_integral(g, u, a, b)?;
    let first = ifg.value / delta;
    let (mf, mg) = (if_.value / delta, ig.value / delta);
    let value = first - mf * mg;
    let ad = delta.abs();
    let abs_error = ifg.abs_error / ad
        + (mf.abs() * ig.abs_error + mg.abs() * if_.abs_error) / ad
        + (first.abs() + (mf * mg).abs()) * 4.0 * EPS;
    let components = BTreeMap::from([
        ("delta_u".to_string(), delta),
        ("int_fg_du".to_string(), ifg.value),
        ("int_f_du".to_string(), if_.value),
        ("int_g_du".to_string(), ig.value),
    ]);
    Ok(FunctionalValue { value, abs_error, components })
}

/// `u(t) = ∫_a^t w(s) ds`, rejecting `∫_a^b w = 0`.
pub fn weight_integrator(w: &PiecewiseFunction) -> Result<PiecewiseFunction> {
    let u = w.antiderivative();
    let integral = u.value_at(u.b());
    let scale = stieltjes::riemann_integral_abs(w, w.a(), w.b())?.value;
    if integral.abs() <= 16.0 * EPS * scale || integral == 0.0 {
        return Err(Error::DegenerateWeight { integral });
    }
    Ok(u)
}

/// `T_w(f,g)`, computed as `T(f,g;u)` with `u = ∫_a^t w`.
#[allow(non_snake_case)]
pub fn weighted_Tw(f: &PiecewiseFunction, g: &PiecewiseFunction, w: &PiecewiseFunction) -> Result<FunctionalValue> {
    let u = weight_integrator(w)?;
    cheby_T(f, g, &u)
}

/// `D(f;u) = ∫ f du - (u(b)-u(a)) · (1/(b-a)) ∫ f dt`.
#[allow(non_snake_case)]
pub fn functional_D(f: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<FunctionalValue> {
    let (a, b) = (u.a(), u.b());
    let delta = u.value_at(b) - u.value_at(a);
    let i = rs_integral(f, u, a, b)?;
    let r = riemann_integral(f, a, b)?;
    let mean = r.value / (b - a);
    let second = delta * mean;
    let value = i.value - second;
    let abs_error = i.abs_error + delta.abs() * r.abs_error / (b - a) + (i.value.abs() + second.abs()) * 4.0 * EPS;
    let components = BTreeMap::from([
        ("delta_u".to_string(), delta),
        ("int_f_du".to_string(), i.value),
        ("mean_f".to_string(), mean),
    ]);
    Ok(FunctionalValue { value, abs_error, components })
}

/// `E(f,g;w) = ∫wfg/∫w - (∫wg/∫w) · mean f`.
#[allow(non_snake_case)]
pub fn functional_E(f: &PiecewiseFunction, g: &PiecewiseFunction, w: &PiecewiseFunction) -> Result<FunctionalValue> {
    let (a, b) = (w.a(), w.b());
    let u = weight_integrator(w)?;
    let iw = u.value_at(b);
    let wg = w.mul(g)?;
    let iwg = riemann_integral(&wg, a, b)?;
    let iwfg = riemann_integral(&wg.mul(f)?, a, b)?;
    let rf = riemann_integral(f, a, b)?;
    let mean_f = rf.value / (b - a);
    let first = iwfg.value / iw;
    let ratio = iwg.value / iw;
    let value = first - ratio * mean_f;
    let abs_error = iwfg.abs_error / iw.abs()
        + iwg.abs_error / iw.abs() * mean_f.abs()
        + ratio.abs() * rf.abs_error / (b - a)
        + (first.abs() + (ratio * mean_f).abs()) * 8.0 * EPS;
    let components = BTreeMap::from([
        ("int_w".to_string(), iw),
        ("int_wg".to_string(), iwg.value),
        ("int_wfg".to_string(), iwfg.value),
        ("mean_f".to_string(), mean_f),
    ]);
    Ok(FunctionalValue { value, abs_error, components })
}

/// The integrator `u(t) = ∫_a^t wg / ∫_a^b w` that turns `D(f;u)` into
/// `E(f,g;w)`.
pub fn e_integrator(g: &PiecewiseFunction, w: &PiecewiseFunction) -> Result<PiecewiseFunction> {
    let iw = weight_integrator(w)?.value_at(w.b());
    Ok(w.mul(g)?.antiderivative().scale(1.0 / iw))
}

/// `Γ(t) = (t-a)[u(b)-u(t)] - (b-t)[u(t)-u(a)]` as a piecewise polynomial.
pub fn gamma_kernel(u: &PiecewiseFunction) -> PiecewiseFunction {
    let (a, b) = (u.a(), u.b());
    let (ua, ub) = (u.value_at(a), u.value_at(b));
    // (t-a) u(b) + (b-t) u(a) - (b-a) u(t)
    let line = Poly::linear(b * ua - a * ub, ub - ua);
    let pieces = u.pieces().iter().map(|p| &line - &p.scale(b - a)).collect();
    let values = u.breakpoints().iter().zip(u.values()).map(|(&t, &v)| line.eval(t) - (b - a) * v).collect();
    PiecewiseFunction::from_parts(u.breakpoints().to_vec(), pieces, values).expect("same shape as u")
}

/// `Φ(t) = [(t-a)u(b) + (b-t)u(a)]/(b-a) - u(t)`.
pub fn phi_kernel(u: &PiecewiseFunction) -> PiecewiseFunction {
    gamma_kernel(u).scale(1.0 / (u.b() - u.a()))
}

fn kernel_domain(u: &PiecewiseFunction, t: f64, open_left: bool, open_right: bool, name: &str) -> Result<()> {
    let (a, b) = (u.a(), u.b());
    let ok = (if open_left { t > a } else { t >= a }) && (if open_right { t < b } else { t <= b });
    if !ok {
        return Err(Error::Domain(format!("{name}({t}) outside its domain within [{a}, {b}]")));
    }
    Ok(())
}

/// `Φ(t)` for `t ∈ [a, b)`.
pub fn kernel_phi(u: &PiecewiseFunction, t: f64) -> Result<f64> {
    kernel_domain(u, t, false, true, "Φ")?;
    let (a, b) = (u.a(), u.b());
    Ok(((t - a) * u.value_at(b) + (b - t) * u.value_at(a)) / (b - a) - u.value_at(t))
}

/// `Γ(t)` for `t ∈ [a, b]`.
pub fn kernel_gamma(u: &PiecewiseFunction, t: f64) -> Result<f64> {
    kernel_domain(u, t, false, false, "Γ")?;
    let (a, b) = (u.a(), u.b());
    let ut = u.value_at(t);
    Ok((t - a) * (u.value_at(b) - ut) - (b - t) * (ut - u.value_at(a)))
}

/// `Δ(t) = [u;b,t] - [u;t,a]` for `t ∈ (a, b)`.
pub fn kernel_delta(u: &PiecewiseFunction, t: f64) -> Result<f64> {
    kernel_domain(u, t, true, true, "Δ")?;
    let (a, b) = (u.a(), u.b());
    let ut = u.value_at(t);
    Ok((u.value_at(b) - ut) / (b - t) - (ut - u.value_at(a)) / (t - a))
}

/// `Δ` on one piece: `poly(t) + c_b/(b-t) - c_a/(t-a)`.
#[derive(Clone, Debug)]
struct DeltaPiece {
    poly: Poly,
    c_a: f64,
    c_b: f64,
}

/// Exact representation of `Δ = [u;b,·] - [u;·,a]` for piecewise-polynomial
/// `u`. On a piece carrying the polynomial `p`,
/// `Δ(t) = ([p;b,t] - [p;t,a]) + (u(b)-p(b))/(b-t) - (p(a)-u(a))/(t-a)`,
/// so `Δ` is bounded near `a` (resp. `b`) exactly when `u` is continuous there.
#[derive(Clone, Debug)]
pub struct DeltaKernel {
    a: f64,
    b: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<DeltaPiece>,
    /// `Δ(t_i)` at interior breakpoints, limits at the ends (may be infinite)
    values: Vec<f64>,
    gamma: PiecewiseFunction,
}

impl DeltaKernel {
    pub fn new(u: &PiecewiseFunction) -> Self {
        let (a, b) = (u.a(), u.b());
        let (ua, ub) = (u.value_at(a), u.value_at(b));
        let k = u.pieces().len();
        let pieces: Vec<DeltaPiece> = u
            .pieces()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let (pa, pb) = (p.eval(a), p.eval(b));
                let mut c_a = pa - ua;
                let mut c_b = ub - pb;
                if i == 0 && nearly_equal(pa, ua) {
                    c_a = 0.0;
                }
                if i + 1 == k && nearly_equal(pb, ub) {
                    c_b = 0.0;
                }
                DeltaPiece { poly: &p.deflate(b) - &p.deflate(a), c_a, c_b }
            })
            .collect();
        let bps = u.breakpoints().to_vec();
        let mut values: Vec<f64> = bps
            .iter()
            .map(|&t| {
                if t > a && t < b {
                    let ut = u.value_at(t);
                    (ub - ut) / (b - t) - (ut - ua) / (t - a)
                } else {
                    0.0
                }
            })
            .collect();
        let first = &pieces[0];
        values[0] = if first.c_a == 0.0 { first.poly.eval(a) + first.c_b / (b - a) } else { f64::INFINITY };
        let last = &pieces[k - 1];
        values[k] = if last.c_b == 0.0 { last.poly.eval(b) - last.c_a / (b - a) } else { f64::INFINITY };
        DeltaKernel { a, b, breakpoints: bps, pieces, values, gamma: gamma_kernel(u) }
    }

    /// Whether `Δ` stays bounded near both ends.
    pub fn is_bounded(&self) -> bool {
        self.pieces[0].c_a == 0.0 && self.pieces[self.pieces.len() - 1].c_b == 0.0
    }

    fn piece_eval(&self, i: usize, t: f64) -> f64 {
        let p = &self.pieces[i];
        let mut v = p.poly.eval(t);
        if p.c_b != 0.0 {
            v += p.c_b / (self.b - t);
        }
        if p.c_a != 0.0 {
            v -= p.c_a / (t - self.a);
        }
        v
    }

    fn piece_scale(&self, i: usize, t: f64) -> f64 {
        let p = &self.pieces[i];
        let mut s = p.poly.rounding_scale(t);
        if p.c_b != 0.0 {
            s += (p.c_b / (self.b - t)).abs();
        }
        if p.c_a != 0.0 {
            s += (p.c_a / (t - self.a)).abs();
        }
        s
    }

    /// `Δ(t)`; at `a` and `b` the one-sided limits.
    pub fn eval(&self, t: f64) -> f64 {
        if let Ok(i) = self.breakpoints.binary_search_by(|x| x.total_cmp(&t)) {
            return self.values[i];
        }
        let i = self.breakpoints.partition_point(|&x| x <= t).saturating_sub(1).min(self.pieces.len() - 1);
        self.piece_eval(i, t)
    }

    /// `Γ`, whose sign changes are those of `Δ`.
    pub fn gamma(&self) -> &PiecewiseFunction {
        &self.gamma
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// `(t-a)(b-t)Δ(t)` rebuilt from the pieces of `Δ`: on each piece
    /// `(t-a)(b-t)P + c_b(t-a) - c_a(b-t)`. Equal to `Γ`, but computed
    /// independently of [`gamma_kernel`].
    pub fn weighted(&self) -> PiecewiseFunction {
        let (a, b) = (self.a, self.b);
        let ta = Poly::linear(-a, 1.0);
        let bt = Poly::linear(b, -1.0);
        let w = &ta * &bt;
        let pieces = self.pieces.iter().map(|p| &(&(&w * &p.poly) + &ta.scale(p.c_b)) - &bt.scale(p.c_a)).collect();
        let values = self
            .breakpoints
            .iter()
            .zip(&self.values)
            .map(|(&t, &v)| if t > a && t < b { (t - a) * (b - t) * v } else { 0.0 })
            .collect();
        PiecewiseFunction::from_parts(self.breakpoints.clone(), pieces, values).expect("same shape as u")
    }

    /// Breakpoints together with the interior sign changes of `Δ`.
    pub fn knots(&self) -> Vec<f64> {
        let mut out = self.breakpoints.clone();
        for (lo, hi, p) in self.gamma.intervals() {
            out.extend(p.sign_changes(lo, hi));
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// `sup_{(a,b)} |Δ|`, infinite when `u` jumps at an end.
    pub fn sup_abs(&self) -> Enclosure {
        if !self.is_bounded() {
            return Enclosure::point(f64::INFINITY);
        }
        let (a, b) = (self.a, self.b);
        let mut best = 0.0_f64;
        let mut err = 0.0_f64;
        let mut consider = |v: f64, scale: f64| {
            if v.abs() > best {
                best = v.abs();
                err = scale * 64.0 * EPS;
            }
        };
        for (i, p) in self.pieces.iter().enumerate() {
            let (lo, hi) = (self.breakpoints[i], self.breakpoints[i + 1]);
            // Δ' (b-t)^2 (t-a)^2 = P'(b-t)^2(t-a)^2 + c_b (t-a)^2 + c_a (b-t)^2
            let ta = Poly::linear(-a, 1.0);
            let bt = Poly::linear(b, -1.0);
            let ta2 = &ta * &ta;
            let bt2 = &bt * &bt;
            let num = &(&(&p.poly.deriv() * &bt2) * &ta2) + &(&ta2.scale(p.c_b) + &bt2.scale(p.c_a));
            let mut cands = vec![lo, hi];
            cands.extend(num.sign_changes(lo, hi));
            for t in cands {
                let v = if t == a || t == b {
                    // bounded end: the singular term of this piece vanishes
                    let mut v = p.poly.eval(t);
                    if t == a {
                        v += p.c_b / (b - a);
                    } else {
                        v -= p.c_a / (b - a);
                    }
                    v
                } else {
                    self.piece_eval(i, t)
                };
                let s = if t == a || t == b { p.poly.rounding_scale(t) + v.abs() } else { self.piece_scale(i, t) };
                consider(v, s);
            }
        }
        for (i, &t) in self.breakpoints.iter().enumerate() {
            if t > a && t < b {
                consider(self.values[i], self.values[i].abs() + 1.0);
            }
        }
        Enclosure::new((best - err).max(0.0), best + err)
    }

    /// `(∫_a^b |Δ|^p dt)^{1/p}` for `1 <= p < ∞`; infinite when `u` jumps at
    /// an end (the singularity `1/(t-a)` is not integrable).
    pub fn p_norm(&self, p: f64) -> Result<Enclosure> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::BadExponent(p));
        }
        if p.is_infinite() {
            return Ok(self.sup_abs());
        }
        if !self.is_bounded() {
            return Ok(Enclosure::point(f64::INFINITY));
        }
        let knots = self.knots();
        let mut total = 0.0;
        let mut err = 0.0;
        for w in knots.windows(2) {
            let (l, h) = (w[0], w[1]);
            let i =
                self.breakpoints.partition_point(|&x| x <= 0.5 * (l + h)).saturating_sub(1).min(self.pieces.len() - 1);
            let g = |t: f64| self.piece_eval(i, t).abs().powf(p);
            let (v, e) = numeric::integrate_rel(&g, l, h, 1e-14);
            total += v;
            err += e;
        }
        Ok(root_enclosure(total, err, p))
    }

    /// `∫_a^b weight(t) |Δ(t)|^p df(t)` for monotone `f`, with `Δ` at the ends
    /// replaced by its limits. Fails on a common discontinuity of `f` and `u`.
    pub fn integrate_abs_pow_df(
        &self,
        f: &PiecewiseFunction,
        p: f64,
        weight: &(dyn Fn(f64) -> f64 + Sync),
    ) -> Result<IntegralResult> {
        let integrand = |t: f64| {
            let d = self.eval(t).abs();
            let w = weight(t);
            if w == 0.0 {
                0.0
            } else {
                w * d.powf(p)
            }
        };
        self.check_df(f)?;
        integrate_fn_df(&integrand, &self.knots(), f)
    }

    fn check_df(&self, f: &PiecewiseFunction) -> Result<()> {
        stieltjes::check_shared_discontinuity(f, &self.gamma, self.a, self.b)
    }
}

fn root_enclosure(total: f64, err: f64, p: f64) -> Enclosure {
    let total = total.max(0.0);
    let v = total.powf(1.0 / p);
    let e = if total > 0.0 { v / p * err / total } else { err.powf(1.0 / p) } + v * 4.0 * EPS;
    Enclosure::new((v - e).max(0.0), v + e)
}

/// `∫ w df` for a function `w` that is smooth between `knots` and the
/// breakpoints of `f`: Gauss–Legendre on `w f'` plus `w(t_i)` times the
/// jumps of `f`.
pub(crate) fn integrate_fn_df(
    w: &(dyn Fn(f64) -> f64 + Sync),
    knots: &[f64],
    f: &PiecewiseFunction,
) -> Result<IntegralResult> {
    let (a, b) = (f.a(), f.b());
    let mut pts: Vec<f64> = f.breakpoints().to_vec();
    pts.extend(knots.iter().copied().filter(|&t| t > a && t < b));
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let fr = f.refine(&pts);
    let mut value = 0.0;
    let mut err = 0.0;
    for (lo, hi, p) in fr.intervals() {
        let dp = p.deriv();
        if dp.is_zero() {
            continue;
        }
        let g = |t: f64| {
            let wt = w(t);
            if wt == 0.0 {
                0.0
            } else {
                wt * dp.eval(t)
            }
        };
        let (v, e) = numeric::integrate_rel(&g, lo, hi, 1e-14);
        value += v;
        err += e;
    }
    for (i, &t) in fr.breakpoints().iter().enumerate() {
        let j = fr.jump_left(i) + fr.jump_right(i);
        if j != 0.0 {
            let term = w(t) * j;
            value += term;
            err += term.abs() * 4.0 * EPS;
        }
    }
    err += value.abs() * 4.0 * EPS;
    Ok(IntegralResult { value, abs_error: err, method: stieltjes::Method::Refined })
}

/// The three kernel representations of `D(f;u)`:
/// `∫Φ df`, `(1/(b-a))∫Γ df` and `(1/(b-a))∫(t-a)(b-t)Δ df`.
#[allow(non_snake_case)]
pub fn kernel_forms_D(f: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<[IntegralResult; 3]> {
    let (a, b) = (u.a(), u.b());
    let phi = rs_integral(&phi_kernel(u), f, a, b)?;
    let gamma = rs_integral(&gamma_kernel(u), f, a, b)?;
    let delta = DeltaKernel::new(u);
    delta.check_df(f)?;
    let w = |t: f64| (t - a) * (b - t) * delta.eval(t);
    let third = integrate_fn_df(&w, &delta.knots(), f)?;
    let scale = 1.0 / (b - a);
    let shrink = |r: IntegralResult| IntegralResult { value: r.value * scale, abs_error: r.abs_error * scale, ..r };
    Ok([phi, shrink(gamma), shrink(third)])
}

/// `max` over the three kernel forms of `|D(f;u) - form|`.
#[allow(non_snake_case)]
pub fn identity_residual_D(f: &PiecewiseFunction, u: &PiecewiseFunction) -> Result<f64> {
    let d = functional_D(f, u)?;
    let forms = kernel_forms_D(f, u)?;
    Ok(forms.iter().map(|r| (d.value - r.value).abs()).fold(0.0, f64::max))
}
