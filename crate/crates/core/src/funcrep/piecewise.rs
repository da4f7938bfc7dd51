use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Highest polynomial degree accepted for user-supplied pieces.
pub const MAX_DEGREE: usize = 8;

/// Relative tolerance under which two one-sided values count as equal when
/// deciding continuity.
pub const JUMP_RTOL: f64 = 1e-11;

/// Which value of a piecewise function to read at a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    At,
    Right,
}

/// A piecewise-polynomial function on `[a, b]`.
///
/// Between consecutive breakpoints the function is a polynomial in `t`. Each
/// breakpoint additionally stores its own point value, which may differ from
/// both one-sided limits; this is how jump integrators are expressed.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFunction {
    breakpoints: Vec<f64>,
    pieces: Vec<Poly>,
    values: Vec<f64>,
}

pub(crate) fn nearly_equal(x: f64, y: f64) -> bool {
    (x - y).abs() <= JUMP_RTOL * (1.0 + x.abs().max(y.abs()))
}

impl PiecewiseFunction {
    /// Builds a function from breakpoints and pieces. Point values default to
    /// the right limit at `a`, the left limit at `b` and the left limit at
    /// interior breakpoints.
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        Self::with_values(breakpoints, pieces, &BTreeMap::new())
    }

    /// Like [`PiecewiseFunction::new`] with explicit point values for some
    /// breakpoints (keyed by breakpoint index).
    pub fn with_values(breakpoints: Vec<f64>, pieces: Vec<Poly>, overrides: &BTreeMap<usize, f64>) -> Result<Self> {
        if let Some(p) = pieces.iter().position(|p| p.degree() > MAX_DEGREE) {
            return Err(Error::InvalidFunction(format!(
                "piece {p} has degree {} (max {MAX_DEGREE})",
                pieces[p].degree()
            )));
        }
        let f = Self::from_raw_defaults(breakpoints, pieces)?;
        let mut values = f.values;
        for (&i, &v) in overrides {
            if i >= values.len() {
                return Err(Error::InvalidFunction(format!("point value index {i} out of range")));
            }
            if !v.is_finite() {
                return Err(Error::InvalidFunction(format!("point value {i} is not finite")));
            }
            values[i] = v;
        }
        Ok(PiecewiseFunction { values, ..f })
    }

    fn from_raw_defaults(breakpoints: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        validate_shape(&breakpoints, &pieces)?;
        let k = pieces.len();
        let values = (0..=k)
            .map(|i| if i == 0 { pieces[0].eval(breakpoints[0]) } else { pieces[i - 1].eval(breakpoints[i]) })
            .collect();
        Ok(PiecewiseFunction { breakpoints, pieces, values })
    }

    /// Full constructor without the degree cap, used for derived functions
    /// (products, kernels) whose degree may exceed [`MAX_DEGREE`].
    pub fn from_parts(breakpoints: Vec<f64>, pieces: Vec<Poly>, values: Vec<f64>) -> Result<Self> {
        validate_shape(&breakpoints, &pieces)?;
        if values.len() != breakpoints.len() {
            return Err(Error::InvalidFunction(format!(
                "{} point values for {} breakpoints",
                values.len(),
                breakpoints.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction("point values must be finite".into()));
        }
        Ok(PiecewiseFunction { breakpoints, pieces, values })
    }

    /// A single polynomial on `[a, b]`.
    pub fn polynomial(a: f64, b: f64, coeffs: &[f64]) -> Result<Self> {
        Self::new(vec![a, b], vec![Poly::new(coeffs.iter().copied())])
    }

    pub fn constant(a: f64, b: f64, c: f64) -> Result<Self> {
        Self::polynomial(a, b, &[c])
    }

    /// `t` on `[a, b]`.
    pub fn identity(a: f64, b: f64) -> Result<Self> {
        Self::polynomial(a, b, &[0.0, 1.0])
    }

    /// `left` on `[a, at]` and `right` on `(at, b]`.
    pub fn step(a: f64, b: f64, at: f64, left: f64, right: f64) -> Result<Self> {
        if at <= a || at >= b {
            return Err(Error::Domain(format!("step location {at} not inside ({a}, {b})")));
        }
        Self::new(vec![a, at, b], vec![Poly::constant(left), Poly::constant(right)])
    }

    pub fn a(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn b(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1]
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// Index of the breakpoint equal to `t`, if any.
    pub fn breakpoint_index(&self, t: f64) -> Option<usize> {
        self.breakpoints.binary_search_by(|x| x.total_cmp(&t)).ok()
    }

    /// Index of the piece whose open interval contains `t` (or whose closure
    /// contains it from the right, for breakpoints).
    fn piece_containing(&self, t: f64) -> usize {
        let i = self.breakpoints.partition_point(|&x| x <= t);
        i.saturating_sub(1).min(self.pieces.len() - 1)
    }

    pub fn left_limit(&self, i: usize) -> f64 {
        if i == 0 {
            self.values[0]
        } else {
            self.pieces[i - 1].eval(self.breakpoints[i])
        }
    }

    pub fn right_limit(&self, i: usize) -> f64 {
        if i == self.pieces.len() {
            self.values[i]
        } else {
            self.pieces[i].eval(self.breakpoints[i])
        }
    }

    /// `f(t_i) - f(t_i^-)`, zero at `a`.
    pub fn jump_left(&self, i: usize) -> f64 {
        self.values[i] - self.left_limit(i)
    }

    /// `f(t_i^+) - f(t_i)`, zero at `b`.
    pub fn jump_right(&self, i: usize) -> f64 {
        self.right_limit(i) - self.values[i]
    }

    /// Whether the function is continuous at breakpoint `i` (one-sided at the
    /// domain ends).
    pub fn continuous_at(&self, i: usize) -> bool {
        let v = self.values[i];
        let t = self.breakpoints[i];
        // limits of ill-conditioned pieces carry their own rounding error
        let noise: f64 = [i.checked_sub(1), (i < self.pieces.len()).then_some(i)]
            .into_iter()
            .flatten()
            .map(|k| self.pieces[k].rounding_scale(t))
            .sum::<f64>()
            * 64.0
            * f64::EPSILON;
        let close = |x: f64| nearly_equal(x, v) || (x - v).abs() <= noise;
        close(self.left_limit(i)) && close(self.right_limit(i))
    }

    pub fn is_continuous(&self) -> bool {
        (0..self.breakpoints.len()).all(|i| self.continuous_at(i))
    }

    /// Whether `f` is continuous at the point `t` (any point of the domain).
    pub fn continuous_at_point(&self, t: f64) -> bool {
        match self.breakpoint_index(t) {
            Some(i) => self.continuous_at(i),
            None => true,
        }
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if !(t >= self.a() && t <= self.b()) {
            return Err(Error::Domain(format!("t = {t} outside [{}, {}]", self.a(), self.b())));
        }
        Ok(())
    }

    pub fn eval_sided(&self, t: f64, side: Side) -> Result<f64> {
        self.check_domain(t)?;
        match side {
            Side::At => Ok(self.value_at(t)),
            Side::Left => {
                if t <= self.a() {
                    return Err(Error::Domain(format!("left limit requested at the left end {t}")));
                }
                Ok(match self.breakpoint_index(t) {
                    Some(i) => self.left_limit(i),
                    None => self.pieces[self.piece_containing(t)].eval(t),
                })
            }
            Side::Right => {
                if t >= self.b() {
                    return Err(Error::Domain(format!("right limit requested at the right end {t}")));
                }
                Ok(match self.breakpoint_index(t) {
                    Some(i) => self.right_limit(i),
                    None => self.pieces[self.piece_containing(t)].eval(t),
                })
            }
        }
    }

    /// The value `f(t)`; `t` is assumed to lie in the domain.
    pub fn value_at(&self, t: f64) -> f64 {
        match self.breakpoint_index(t) {
            Some(i) => self.values[i],
            None => self.pieces[self.piece_containing(t)].eval(t),
        }
    }

    /// The restriction of `f` to `[c, d]`.
    pub fn restrict(&self, c: f64, d: f64) -> Result<Self> {
        self.check_domain(c)?;
        self.check_domain(d)?;
        if c >= d {
            return Err(Error::Domain(format!("empty interval [{c}, {d}]")));
        }
        if c == self.a() && d == self.b() {
            return Ok(self.clone());
        }
        let mut bps = vec![c];
        let mut vals = vec![self.value_at(c)];
        for (i, &t) in self.breakpoints.iter().enumerate() {
            if t > c && t < d {
                bps.push(t);
                vals.push(self.values[i]);
            }
        }
        bps.push(d);
        vals.push(self.value_at(d));
        let pieces = bps.windows(2).map(|w| self.pieces[self.piece_containing(0.5 * (w[0] + w[1]))].clone()).collect();
        Ok(PiecewiseFunction { breakpoints: bps, pieces, values: vals })
    }

    /// Same function with additional breakpoints inserted; values at new
    /// breakpoints are the (continuous) piece values.
    pub fn refine(&self, points: &[f64]) -> Self {
        let bps = merge_breakpoints(&self.breakpoints, points, self.a(), self.b());
        self.resample(&bps)
    }

    fn resample(&self, bps: &[f64]) -> Self {
        let pieces = bps.windows(2).map(|w| self.pieces[self.piece_containing(0.5 * (w[0] + w[1]))].clone()).collect();
        let values = bps.iter().map(|&t| self.value_at(t)).collect();
        PiecewiseFunction { breakpoints: bps.to_vec(), pieces, values }
    }

    /// Pointwise combination of two functions on the same domain.
    pub fn zip_with(
        &self,
        other: &PiecewiseFunction,
        piece_op: impl Fn(&Poly, &Poly) -> Poly,
        value_op: impl Fn(f64, f64) -> f64,
    ) -> Result<Self> {
        if self.a() != other.a() || self.b() != other.b() {
            return Err(Error::Domain(format!(
                "domains differ: [{}, {}] vs [{}, {}]",
                self.a(),
                self.b(),
                other.a(),
                other.b()
            )));
        }
        let bps = merge_breakpoints(&self.breakpoints, &other.breakpoints, self.a(), self.b());
        let lhs = self.resample(&bps);
        let rhs = other.resample(&bps);
        let pieces = lhs.pieces.iter().zip(&rhs.pieces).map(|(p, q)| piece_op(p, q)).collect();
        let values = lhs.values.iter().zip(&rhs.values).map(|(&x, &y)| value_op(x, y)).collect();
        Ok(PiecewiseFunction { breakpoints: bps, pieces, values })
    }

    pub fn add(&self, other: &PiecewiseFunction) -> Result<Self> {
        self.zip_with(other, |p, q| p + q, |x, y| x + y)
    }

    pub fn sub(&self, other: &PiecewiseFunction) -> Result<Self> {
        self.zip_with(other, |p, q| p - q, |x, y| x - y)
    }

    pub fn mul(&self, other: &PiecewiseFunction) -> Result<Self> {
        self.zip_with(other, |p, q| p * q, |x, y| x * y)
    }

    pub fn map(&self, piece_op: impl Fn(&Poly) -> Poly, value_op: impl Fn(f64) -> f64) -> Self {
        PiecewiseFunction {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(piece_op).collect(),
            values: self.values.iter().map(|&v| value_op(v)).collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        self.map(|p| p.scale(s), |v| v * s)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|p| p.add_constant(c), |v| v + c)
    }

    /// Multiplies every piece (and point value) by the global polynomial `p`.
    pub fn mul_poly(&self, p: &Poly) -> Self {
        PiecewiseFunction {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(|q| q * p).collect(),
            values: self.breakpoints.iter().zip(&self.values).map(|(&t, &v)| v * p.eval(t)).collect(),
        }
    }

    /// The continuous function `t -> ∫_a^t f(s) ds`.
    pub fn antiderivative(&self) -> Self {
        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut values = Vec::with_capacity(self.breakpoints.len());
        let mut acc = 0.0;
        values.push(0.0);
        for (i, p) in self.pieces.iter().enumerate() {
            let anti = p.antideriv();
            let (t0, t1) = (self.breakpoints[i], self.breakpoints[i + 1]);
            let shifted = anti.add_constant(acc - anti.eval(t0));
            acc = shifted.eval(t1);
            values.push(acc);
            pieces.push(shifted);
        }
        PiecewiseFunction { breakpoints: self.breakpoints.clone(), pieces, values }
    }

    /// Pieces as `(lo, hi, &poly)` triples.
    pub fn intervals(&self) -> impl Iterator<Item = (f64, f64, &Poly)> {
        self.breakpoints.windows(2).zip(&self.pieces).map(|(w, p)| (w[0], w[1], p))
    }
}

fn validate_shape(breakpoints: &[f64], pieces: &[Poly]) -> Result<()> {
    if breakpoints.len() < 2 {
        return Err(Error::InvalidFunction("need at least two breakpoints".into()));
    }
    if breakpoints.iter().any(|t| !t.is_finite()) {
        return Err(Error::InvalidFunction("breakpoints must be finite".into()));
    }
    if let Some(i) = breakpoints.windows(2).position(|w| w[0] >= w[1]) {
        return Err(Error::InvalidFunction(format!("breakpoints not strictly increasing at index {}", i + 1)));
    }
    if pieces.len() + 1 != breakpoints.len() {
        return Err(Error::InvalidFunction(format!("{} pieces for {} breakpoints", pieces.len(), breakpoints.len())));
    }
    if let Some(i) = pieces.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidFunction(format!("piece {i} has non-finite coefficients")));
    }
    Ok(())
}

/// Sorted union of two breakpoint lists clipped to `[a, b]`.
pub(crate) fn merge_breakpoints(x: &[f64], y: &[f64], a: f64, b: f64) -> Vec<f64> {
    let mut all: Vec<f64> = x.iter().chain(y).copied().filter(|&t| t >= a && t <= b).collect();
    all.push(a);
    all.push(b);
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    /// -1 at a, 0 inside, +1 at b.
    fn endpoint_jumps() -> PiecewiseFunction {
        let vals = BTreeMap::from([(0, -1.0), (1, 1.0)]);
        PiecewiseFunction::with_values(vec![0.0, 1.0], vec![Poly::zero()], &vals).unwrap()
    }

    #[test]
    fn three_valued_integrator() {
        let u = endpoint_jumps();
        assert_eq!(u.eval_sided(0.0, Side::At).unwrap(), -1.0);
        assert_eq!(u.eval_sided(0.5, Side::At).unwrap(), 0.0);
        assert_eq!(u.eval_sided(1.0, Side::At).unwrap(), 1.0);
        assert_eq!(u.eval_sided(0.0, Side::Right).unwrap(), 0.0);
        assert_eq!(u.jump_right(0), 1.0);
        assert_eq!(u.jump_left(1), 1.0);
        assert!(!u.is_continuous());
    }

    #[test]
    fn sides_agree_for_continuous_function() {
        let f = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        for side in [Side::Left, Side::At, Side::Right] {
            assert_eq!(f.eval_sided(0.3, side).unwrap(), 0.3);
        }
    }

    #[test]
    fn domain_violations() {
        let f = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        assert!(matches!(f.eval_sided(1.5, Side::At), Err(Error::Domain(_))));
        assert!(matches!(f.eval_sided(0.0, Side::Left), Err(Error::Domain(_))));
        assert!(matches!(f.eval_sided(1.0, Side::Right), Err(Error::Domain(_))));
    }

    #[test]
    fn rejects_malformed() {
        assert!(PiecewiseFunction::new(vec![0.0, 0.0], vec![Poly::zero()]).is_err());
        assert!(PiecewiseFunction::new(vec![0.0, 1.0], vec![]).is_err());
        assert!(
            PiecewiseFunction::new(vec![0.0, 1.0], vec![Poly::new([0.0; 10].iter().copied().chain([1.0]))]).is_err()
        );
        assert!(PiecewiseFunction::new(vec![1.0, 0.5], vec![Poly::zero()]).is_err());
    }

    #[test]
    fn step_defaults_to_left_value() {
        let g = PiecewiseFunction::step(0.0, 1.0, 0.5, -1.0, 1.0).unwrap();
        assert_eq!(g.value_at(0.5), -1.0);
        assert_eq!(g.value_at(0.75), 1.0);
        assert_eq!(g.jump_right(1), 2.0);
    }

    #[test]
    fn restrict_keeps_interior_jumps() {
        let g = PiecewiseFunction::step(0.0, 1.0, 0.5, -1.0, 1.0).unwrap();
        let r = g.restrict(0.25, 0.75).unwrap();
        assert_eq!(r.breakpoints(), &[0.25, 0.5, 0.75]);
        assert_eq!(r.values(), &[-1.0, -1.0, 1.0]);
        let left = g.restrict(0.0, 0.5).unwrap();
        assert_eq!(left.pieces().len(), 1);
    }

    #[test]
    fn algebra_merges_breakpoints() {
        let t = PiecewiseFunction::identity(0.0, 1.0).unwrap();
        let g = PiecewiseFunction::step(0.0, 1.0, 0.5, -1.0, 1.0).unwrap();
        let p = t.mul(&g).unwrap();
        assert_eq!(p.breakpoints(), &[0.0, 0.5, 1.0]);
        assert_eq!(p.value_at(0.5), -0.5);
        assert_eq!(p.value_at(0.75), 0.75);
        let s = t.add(&g).unwrap().sub(&g).unwrap();
        assert_eq!(s.value_at(0.3), 0.3);
    }

    #[test]
    fn antiderivative_is_continuous() {
        let g = PiecewiseFunction::step(0.0, 1.0, 0.5, -1.0, 1.0).unwrap();
        let u = g.antiderivative();
        assert!(u.is_continuous());
        assert_eq!(u.value_at(0.5), -0.5);
        assert_eq!(u.value_at(1.0), 0.0);
    }
}
