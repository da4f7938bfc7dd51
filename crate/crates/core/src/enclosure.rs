use serde::{Deserialize, Serialize};

/// A closed interval `[lo, hi]` certified to contain a computed quantity.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lo: f64,
    pub hi: f64,
}

impl Enclosure {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi || lo.is_nan() || hi.is_nan(), "inverted enclosure [{lo}, {hi}]");
        Enclosure { lo, hi }
    }

    pub fn point(v: f64) -> Self {
        Enclosure { lo: v, hi: v }
    }

    /// `value ± err`
    pub fn around(value: f64, err: f64) -> Self {
        let err = err.abs();
        Enclosure { lo: value - err, hi: value + err }
    }

    pub fn mid(&self) -> f64 {
        if self.lo.is_infinite() || self.hi.is_infinite() {
            if self.lo == self.hi {
                return self.lo;
            }
            return if self.lo.is_infinite() { self.hi } else { self.lo };
        }
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.width()
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn hull(&self, other: &Enclosure) -> Enclosure {
        Enclosure::new(self.lo.min(other.lo), self.hi.max(other.hi))
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    /// Enclosure of `|x|` for `x` in `self`.
    pub fn abs(&self) -> Enclosure {
        if self.lo >= 0.0 {
            *self
        } else if self.hi <= 0.0 {
            Enclosure::new(-self.hi, -self.lo)
        } else {
            Enclosure::new(0.0, self.hi.max(-self.lo))
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        widen(self.lo + other.lo, self.hi + other.hi)
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        widen(self.lo - other.hi, self.hi - other.lo)
    }

    /// Product; an infinite factor times an enclosure containing only
    /// nonnegative values stays `+inf` rather than becoming NaN.
    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        let prods = [self.lo * other.lo, self.lo * other.hi, self.hi * other.lo, self.hi * other.hi];
        if prods.iter().any(|p| p.is_nan()) {
            let nonneg = self.lo >= 0.0 && other.lo >= 0.0;
            return if nonneg {
                Enclosure::new(0.0, f64::INFINITY)
            } else {
                Enclosure::new(f64::NEG_INFINITY, f64::INFINITY)
            };
        }
        let lo = prods.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = prods.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        widen(lo, hi)
    }

    /// Quotient by an enclosure of strictly positive values.
    pub fn div_pos(&self, d: &Enclosure) -> Enclosure {
        debug_assert!(d.lo > 0.0, "divisor enclosure [{}, {}] not positive", d.lo, d.hi);
        let inv = Enclosure::new(1.0 / d.hi, 1.0 / d.lo);
        self.mul(&inv)
    }

    /// `x^e` for nonnegative `x` and `e > 0`.
    pub fn powf(&self, e: f64) -> Enclosure {
        widen(self.lo.max(0.0).powf(e), self.hi.max(0.0).powf(e))
    }

    pub fn scale(&self, s: f64) -> Enclosure {
        if s >= 0.0 {
            Enclosure::new(self.lo * s, self.hi * s)
        } else {
            Enclosure::new(self.hi * s, self.lo * s)
        }
    }
}

/// `[lo, hi]` pushed outward by a few ulps to absorb the rounding of the
/// operation that produced it.
fn widen(lo: f64, hi: f64) -> Enclosure {
    let slack = |x: f64| if x.is_finite() { x.abs() * 4.0 * f64::EPSILON } else { 0.0 };
    Enclosure::new(lo - slack(lo), hi + slack(hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let e = Enclosure::around(1.0, 0.25);
        assert_eq!(e.lo, 0.75);
        assert_eq!(e.mid(), 1.0);
        assert!(e.contains(1.2));
        assert_eq!(e.scale(-2.0), Enclosure::new(-2.5, -1.5));
        assert_eq!(e.hull(&Enclosure::point(3.0)).hi, 3.0);
        let p = Enclosure::new(1.0, 2.0).mul(&Enclosure::new(-1.0, 3.0));
        assert!(p.contains(-2.0) && p.contains(6.0) && p.lo > -2.1 && p.hi < 6.1);
        assert_eq!(Enclosure::point(f64::INFINITY).mul(&Enclosure::new(0.0, 1.0)).hi, f64::INFINITY);
        assert!(Enclosure::new(-3.0, 1.0).abs().contains(3.0));
        assert!(Enclosure::point(4.0).powf(0.5).contains(2.0));
    }
}
