//! Dense real polynomials in the global variable `t`.
//!
//! Coefficients are stored in ascending order of degree. Besides the usual
//! ring operations the type carries the pieces needed by the certified
//! routines: rounding-error bounds for evaluation and integration, real root
//! isolation on an interval, and exact integrals against `|t - c|^r`.

use std::ops::{Add, Mul, Neg, Sub};

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    coeffs: Vec<f64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients. Trailing zeros are
    /// trimmed; the zero polynomial keeps a single `0.0` coefficient.
    pub fn new(coeffs: impl IntoIterator<Item = f64>) -> Self {
        let mut coeffs: Vec<f64> = coeffs.into_iter().collect();
        while coeffs.len() > 1 && coeffs[coeffs.len() - 1] == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![0.0] }
    }

    pub fn constant(c: f64) -> Self {
        Poly { coeffs: vec![c] }
    }

    /// `slope * t + intercept`
    pub fn linear(intercept: f64, slope: f64) -> Self {
        Poly::new([intercept, slope])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    /// Value together with an a-priori bound on the Horner rounding error.
    pub fn eval_with_err(&self, t: f64) -> (f64, f64) {
        let v = self.eval(t);
        (v, self.rounding_scale(t) * EPS * (2 * self.coeffs.len() + 1) as f64)
    }

    /// `sum |c_k| |t|^k`, the magnitude that rounding errors scale with.
    pub fn rounding_scale(&self, t: f64) -> f64 {
        let at = t.abs();
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * at + c.abs())
    }

    pub fn deriv(&self) -> Poly {
        if self.coeffs.len() == 1 {
            return Poly::zero();
        }
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64))
    }

    /// Antiderivative with zero constant term.
    pub fn antideriv(&self) -> Poly {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(0.0);
        out.extend(self.coeffs.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Poly::new(out)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s))
    }

    pub fn add_constant(&self, c: f64) -> Poly {
        let mut out = self.coeffs.clone();
        out[0] += c;
        Poly::new(out)
    }

    /// Re-expansion about `center`: returns `q` with `q(s) = self(center + s)`.
    pub fn taylor_shift(&self, center: f64) -> Poly {
        let mut q = self.coeffs.clone();
        let n = q.len();
        for i in 0..n {
            for j in (i..n - 1).rev() {
                q[j] += center * q[j + 1];
            }
        }
        Poly::new(q)
    }

    /// Quotient of `p` by `(t - y)`, i.e. the divided difference
    /// `t -> (p(t) - p(y)) / (t - y)` as a polynomial.
    pub fn deflate(&self, y: f64) -> Poly {
        let n = self.coeffs.len();
        if n == 1 {
            return Poly::zero();
        }
        let mut q = vec![0.0; n - 1];
        let mut acc = 0.0;
        for k in (1..n).rev() {
            acc = acc * y + self.coeffs[k];
            q[k - 1] = acc;
        }
        Poly::new(q)
    }

    /// `∫_lo^hi p(t) dt` with a rounding-error bound.
    pub fn integrate(&self, lo: f64, hi: f64) -> (f64, f64) {
        let anti = self.antideriv();
        let v = anti.eval(hi) - anti.eval(lo);
        let scale = anti.rounding_scale(hi) + anti.rounding_scale(lo);
        (v, scale * EPS * (2 * anti.coeffs.len() + 4) as f64)
    }

    /// `∫_lo^hi |t - center|^r p(t) dt` in closed form, `r >= 0`.
    ///
    /// The interval is split at `center` when it straddles it.
    pub fn integrate_abs_power(&self, lo: f64, hi: f64, center: f64, r: f64) -> (f64, f64) {
        if lo < center && center < hi {
            let (v1, e1) = self.integrate_abs_power(lo, center, center, r);
            let (v2, e2) = self.integrate_abs_power(center, hi, center, r);
            return (v1 + v2, e1 + e2);
        }
        if r == 0.0 {
            return self.integrate(lo, hi);
        }
        let q = self.taylor_shift(center);
        // s = t - center has a fixed sign on [lo, hi]; integrate sigma = |s|
        let (s_lo, s_hi, flip) =
            if lo >= center { (lo - center, hi - center, false) } else { (center - hi, center - lo, true) };
        let mut value = 0.0;
        let mut scale = 0.0;
        for (j, &c) in q.coeffs.iter().enumerate() {
            let c = if flip && j % 2 == 1 { -c } else { c };
            let e = r + j as f64 + 1.0;
            let term = c * (s_hi.powf(e) - s_lo.powf(e)) / e;
            value += term;
            scale += c.abs() * (s_hi.powf(e) + s_lo.powf(e)) / e;
        }
        let shift_err = self.rounding_scale(center.abs() + s_hi) * EPS * (self.coeffs.len() as f64).powi(2);
        (value, scale * EPS * (4 * q.coeffs.len() + 8) as f64 + shift_err * (s_hi - s_lo).abs())
    }

    /// Points in the open interval `(lo, hi)` where the polynomial changes
    /// sign, in increasing order.
    ///
    /// The polynomial is split into monotone runs at the sign changes of its
    /// derivative (found recursively) and each run holding a sign change is
    /// bisected down to adjacent floats.
    pub fn sign_changes(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut out = Vec::new();
        if lo >= hi || self.is_zero() || self.degree() == 0 {
            return out;
        }
        if self.degree() == 1 {
            let r = -self.coeffs[0] / self.coeffs[1];
            if r > lo && r < hi {
                out.push(r);
            }
            return out;
        }
        let crit = self.deriv().sign_changes(lo, hi);
        let mut knots = Vec::with_capacity(crit.len() + 2);
        knots.push(lo);
        knots.extend(crit);
        knots.push(hi);
        // a zero located exactly at a knot separates runs of opposite sign
        let mut last_sign = 0.0_f64;
        for w in knots.windows(2) {
            let (l, r) = (w[0], w[1]);
            let (vl, vr) = (self.eval(l), self.eval(r));
            if vl == 0.0 && l > lo && last_sign != 0.0 && vr.signum() == -last_sign && vr != 0.0 {
                out.push(l);
            }
            if vl != 0.0 && vr != 0.0 && vl.signum() != vr.signum() {
                out.push(self.bisect(l, r, vl));
            }
            if vr != 0.0 {
                last_sign = vr.signum();
            } else if vl != 0.0 {
                last_sign = vl.signum();
            }
        }
        out.dedup();
        out
    }

    fn bisect(&self, mut l: f64, mut r: f64, vl: f64) -> f64 {
        let sl = vl.signum();
        for _ in 0..200 {
            let m = 0.5 * (l + r);
            if m <= l || m >= r {
                break;
            }
            let vm = self.eval(m);
            if vm == 0.0 {
                return m;
            }
            if vm.signum() == sl {
                l = m;
            } else {
                r = m;
            }
        }
        0.5 * (l + r)
    }

    /// Extremal candidates on `[lo, hi]`: the endpoints plus the interior
    /// sign changes of the derivative.
    pub fn critical_knots(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut knots = vec![lo];
        knots.extend(self.deriv().sign_changes(lo, hi));
        knots.push(hi);
        knots
    }

    /// `(min, argmin, max, argmax)` over the closed interval `[lo, hi]`.
    pub fn extrema(&self, lo: f64, hi: f64) -> (f64, f64, f64, f64) {
        let mut best = (f64::INFINITY, lo, f64::NEG_INFINITY, lo);
        for t in self.critical_knots(lo, hi) {
            let v = self.eval(t);
            if v < best.0 {
                best.0 = v;
                best.1 = t;
            }
            if v > best.2 {
                best.2 = v;
                best.3 = t;
            }
        }
        best
    }

    /// Total variation on `[lo, hi]` with a rounding-error bound.
    pub fn variation(&self, lo: f64, hi: f64) -> (f64, f64) {
        let knots = self.critical_knots(lo, hi);
        let mut total = 0.0;
        let mut err = 0.0;
        let mut prev = self.eval_with_err(knots[0]);
        for &t in &knots[1..] {
            let cur = self.eval_with_err(t);
            total += (cur.0 - prev.0).abs();
            err += cur.1 + prev.1;
            prev = cur;
        }
        (total, err + total * EPS * knots.len() as f64)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&0.0) + rhs.coeffs.get(k).unwrap_or(&0.0)))
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeffs.get(k).unwrap_or(&0.0) - rhs.coeffs.get(k).unwrap_or(&0.0)))
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn eval_and_calculus() {
        let p = Poly::new([1.0, -3.0, 0.0, 2.0]);
        assert_eq!(p.eval(2.0), 1.0 - 6.0 + 16.0);
        assert_eq!(p.deriv(), Poly::new([-3.0, 0.0, 6.0]));
        let (v, e) = p.integrate(0.0, 1.0);
        assert_abs_diff_eq!(v, 1.0 - 1.5 + 0.5, epsilon = 1e-15);
        assert!(e > 0.0 && e < 1e-13);
    }

    #[test]
    fn trailing_zeros_trimmed() {
        assert_eq!(Poly::new([1.0, 0.0, 0.0]).degree(), 0);
        assert!(Poly::new(Vec::<f64>::new()).is_zero());
    }

    #[test]
    fn taylor_shift_matches_evaluation() {
        let p = Poly::new([0.3, -1.0, 2.5, 0.7, -0.2]);
        let q = p.taylor_shift(1.7);
        for s in [-2.0, -0.3, 0.0, 0.4, 3.0] {
            assert_abs_diff_eq!(q.eval(s), p.eval(1.7 + s), epsilon = 1e-11);
        }
    }

    #[test]
    fn deflation_is_divided_difference() {
        let p = Poly::new([0.3, -1.0, 2.5, 0.7]);
        let q = p.deflate(0.4);
        for t in [-1.0, 0.1, 2.0] {
            assert_abs_diff_eq!(q.eval(t), (p.eval(t) - p.eval(0.4)) / (t - 0.4), epsilon = 1e-12);
        }
        assert!(Poly::constant(3.0).deflate(1.0).is_zero());
    }

    #[test]
    fn sign_changes_of_cubic() {
        // (t - 0.2)(t - 0.5)(t - 0.9)
        let p = &(&Poly::linear(-0.2, 1.0) * &Poly::linear(-0.5, 1.0)) * &Poly::linear(-0.9, 1.0);
        let r = p.sign_changes(0.0, 1.0);
        assert_eq!(r.len(), 3);
        for (got, want) in r.iter().zip([0.2, 0.5, 0.9]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-14);
        }
        // a double root is not a sign change
        let sq = &Poly::linear(-0.5, 1.0) * &Poly::linear(-0.5, 1.0);
        assert!(sq.sign_changes(0.0, 1.0).is_empty());
    }

    #[test]
    fn quadratic_extrema_and_variation() {
        // t (1 - t)
        let p = Poly::new([0.0, 1.0, -1.0]);
        let (mn, _, mx, at) = p.extrema(0.0, 1.0);
        assert_eq!(mn, 0.0);
        assert_abs_diff_eq!(mx, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(at, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p.variation(0.0, 1.0).0, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn abs_power_integral_closed_forms() {
        // ∫_0^1 |t - 1/2| dt = 1/4
        let one = Poly::constant(1.0);
        assert_abs_diff_eq!(one.integrate_abs_power(0.0, 1.0, 0.5, 1.0).0, 0.25, epsilon = 1e-15);
        // ∫_0^1 |t - 1/2|^2 dt = 1/12
        assert_abs_diff_eq!(one.integrate_abs_power(0.0, 1.0, 0.5, 2.0).0, 1.0 / 12.0, epsilon = 1e-15);
        // ∫_0^1 |t|^{1/2} t dt = 2/5
        let t = Poly::linear(0.0, 1.0);
        assert_abs_diff_eq!(t.integrate_abs_power(0.0, 1.0, 0.0, 0.5).0, 0.4, epsilon = 1e-15);
        // left side: ∫_{-1}^{0} |t|^{1/2} t dt = -2/5
        assert_abs_diff_eq!(t.integrate_abs_power(-1.0, 0.0, 0.0, 0.5).0, -0.4, epsilon = 1e-15);
    }
}
