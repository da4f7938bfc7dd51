//! Adaptive Gauss–Legendre integration for the few integrands that are not
//! polynomial (fractional powers, divided differences).

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| {
        (GaussLegendre::new(NonZeroUsize::new(10).unwrap()), GaussLegendre::new(NonZeroUsize::new(20).unwrap()))
    })
}

/// Most subintervals a single integral may be split into.
const MAX_CELLS: usize = 4096;

/// Relative size of rounding noise in one cell's value.
const NOISE: f64 = 64.0 * f64::EPSILON;

struct Cell {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.err.total_cmp(&other.err).is_eq()
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn cell(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> Cell {
    let (coarse, fine) = rules();
    let c = coarse.integrate(lo, hi, f);
    let v = fine.integrate(lo, hi, f);
    let err = (v - c).abs();
    Cell { lo, hi, value: v, err }
}

/// `∫_lo^hi f(t) dt`, splitting the subinterval with the largest
/// disagreement between the 10- and 20-point rules until the summed
/// disagreement is below `tol` or the cell budget is spent. Returns
/// `(value, error estimate)`.
pub fn integrate(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    if hi <= lo {
        return (0.0, 0.0);
    }
    let mut heap = std::collections::BinaryHeap::new();
    let first = cell(f, lo, hi);
    let mut total_err = first.err;
    let mut total_abs = first.value.abs();
    heap.push(first);
    while total_err > tol.max(NOISE * total_abs) && heap.len() < MAX_CELLS {
        let worst = heap.pop().expect("nonempty");
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            heap.push(worst);
            break;
        }
        let (l, r) = (cell(f, worst.lo, mid), cell(f, mid, worst.hi));
        total_err += l.err + r.err - worst.err;
        total_abs += l.value.abs() + r.value.abs() - worst.value.abs();
        heap.push(l);
        heap.push(r);
    }
    // summed in position order so the result does not depend on heap layout
    let mut cells = heap.into_vec();
    cells.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let value = cells.iter().map(|c| c.value).sum();
    let err: f64 = cells.iter().map(|c| c.err + NOISE * c.value.abs()).sum();
    (value, err)
}

/// [`integrate`] with the tolerance taken relative to a first estimate of
/// `∫ |f|`.
pub fn integrate_rel(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, rtol: f64) -> (f64, f64) {
    if hi <= lo {
        return (0.0, 0.0);
    }
    let scale = rules().1.integrate(lo, hi, |t| f(t).abs());
    integrate(f, lo, hi, rtol * scale + f64::MIN_POSITIVE)
}
