//! The composite rule
//! `S_n = Σ_i [u(x_{i+1})-u(x_i)]^{-1} ∫_{x_i}^{x_{i+1}} f du ∫_{x_i}^{x_{i+1}} g du`
//! for `∫ f g du`, certified remainder bounds, and an adaptive partitioner.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcrep::{inf_sup_on, nearly_equal, require_certificate, sup_norm_on, total_variation};
use crate::funcrep::{PiecewiseFunction, RegularityCertificate};
use crate::par::{self, Mode};
use crate::stieltjes::rs_integral;

/// Points `a = x_0 < … < x_n = b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    points: Vec<f64>,
}

impl Partition {
    pub fn new(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Domain("a partition needs at least two points".into()));
        }
        if points.iter().any(|x| !x.is_finite()) || points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("partition points must be finite and strictly increasing".into()));
        }
        Ok(Partition { points })
    }

    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("a partition needs n >= 1".into()));
        }
        let mut pts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        pts[n] = b;
        Self::new(pts)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    /// Number of cells.
    pub fn n(&self) -> usize {
        self.points.len() - 1
    }

    pub fn cell(&self, i: usize) -> (f64, f64) {
        (self.points[i], self.points[i + 1])
    }

    pub fn h(&self, i: usize) -> f64 {
        self.points[i + 1] - self.points[i]
    }

    /// `max h_i`.
    pub fn mesh(&self) -> f64 {
        (0..self.n()).map(|i| self.h(i)).fold(0.0, f64::max)
    }

    fn check_domain(&self, f: &PiecewiseFunction) -> Result<()> {
        if self.points[0] != f.a() || self.points[self.n()] != f.b() {
            return Err(Error::Domain(format!(
                "partition of [{}, {}] used on [{}, {}]",
                self.points[0],
                self.points[self.n()],
                f.a(),
                f.b()
            )));
        }
        Ok(())
    }
}

/// Per-cell ingredients of the remainder bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellTerm {
    /// `M_i - m_i` of `f`
    pub oscillation: f64,
    /// `‖g - cell mean of g‖_∞` on the cell
    pub sup_factor: f64,
    /// variation of `u` on the cell
    pub variation: f64,
    /// the cell's contribution to the tight bound
    pub term: f64,
    /// `u` constant on the cell: both integrals vanish
    pub frozen: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureResult {
    /// `S_n`
    pub value: f64,
    /// rounding and integration error of `value`
    pub value_error: f64,
    /// the stated (max-form) bound on `|∫fg du - S_n|`
    pub remainder_bound: f64,
    /// the per-cell sum, never larger than `remainder_bound`
    pub tight_bound: f64,
    pub partition: Partition,
    pub per_cell: Vec<CellTerm>,
}

/// Cell data shared by the rule and both bounds.
#[derive(Clone, Debug)]
struct Cell {
    lo: f64,
    hi: f64,
    s_term: f64,
    s_err: f64,
    osc: f64,
    sup_factor: f64,
    variation: f64,
    frozen: bool,
}

fn degenerate(du: f64, uscale: f64) -> bool {
    du.abs() <= 4.0 * f64::EPSILON * uscale
}

fn cell_data(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    lo: f64,
    hi: f64,
    index: usize,
) -> Result<Cell> {
    let variation = total_variation(u, lo, hi)?.hi;
    let (ulo, uhi) = (u.value_at(lo), u.value_at(hi));
    let du = uhi - ulo;
    let uscale = ulo.abs().max(uhi.abs()).max(variation);
    if variation == 0.0 || (variation <= 4.0 * f64::EPSILON * uscale && nearly_equal(ulo, uhi)) {
        return Ok(Cell { lo, hi, s_term: 0.0, s_err: 0.0, osc: 0.0, sup_factor: 0.0, variation: 0.0, frozen: true });
    }
    if degenerate(du, uscale) {
        return Err(Error::DegenerateCell { index });
    }
    let fi = rs_integral(f, u, lo, hi)?;
    let gi = rs_integral(g, u, lo, hi)?;
    let s_term = fi.value * gi.value / du;
    let s_err = (fi.abs_error * gi.value.abs() + gi.abs_error * fi.value.abs() + fi.abs_error * gi.abs_error)
        / du.abs()
        + s_term.abs() * 4.0 * f64::EPSILON;
    let mean = gi.value / du;
    let mean_err = gi.abs_error / du.abs();
    let (inf, sup) = inf_sup_on(f, lo, hi)?;
    let osc = (sup.hi - inf.lo).max(0.0);
    let (ginf, gsup) = inf_sup_on(g, lo, hi)?;
    let sup_factor =
        if gsup.mid() == ginf.mid() { 0.0 } else { sup_norm_on(&g.add_constant(-mean), lo, hi)?.hi + mean_err };
    Ok(Cell { lo, hi, s_term, s_err, osc, sup_factor, variation, frozen: false })
}

fn cells_for(
    mode: Mode,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    part: &Partition,
) -> Result<Vec<Cell>> {
    part.check_domain(f)?;
    part.check_domain(g)?;
    part.check_domain(u)?;
    par::map_indexed(mode, part.n(), |i| {
        let (lo, hi) = part.cell(i);
        cell_data(f, g, u, lo, hi, i)
    })
    .into_iter()
    .collect()
}

/// `max_i (M_i - m_i)` of `f` over the cells.
pub fn oscillation_v(f: &PiecewiseFunction, part: &Partition) -> Result<f64> {
    part.check_domain(f)?;
    let mut v = 0.0_f64;
    for i in 0..part.n() {
        let (lo, hi) = part.cell(i);
        let (inf, sup) = inf_sup_on(f, lo, hi)?;
        v = v.max(sup.mid() - inf.mid());
    }
    Ok(v)
}

/// `S_n(f, g; u, I_n)` with its error. Cells on which `u` is constant
/// contribute zero; any other cell with `u(x_{i+1}) = u(x_i)` is rejected.
pub fn composite_s(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    part: &Partition,
) -> Result<(f64, f64)> {
    let cells = cells_for(Mode::default(), f, g, u, part)?;
    Ok(sum_s(&cells))
}

fn sum_s(cells: &[Cell]) -> (f64, f64) {
    let value: f64 = cells.iter().map(|c| c.s_term).sum();
    let err: f64 = cells.iter().map(|c| c.s_err).sum::<f64>() + value.abs() * cells.len() as f64 * f64::EPSILON;
    (value, err)
}

fn assemble(part: Partition, cells: &[Cell], term: impl Fn(&Cell) -> f64, stated: f64) -> QuadratureResult {
    let (value, value_error) = sum_s(cells);
    let per_cell: Vec<CellTerm> = cells
        .iter()
        .map(|c| CellTerm {
            oscillation: c.osc,
            sup_factor: c.sup_factor,
            variation: c.variation,
            term: if c.frozen { 0.0 } else { term(c) },
            frozen: c.frozen,
        })
        .collect();
    let tight_bound = per_cell.iter().map(|c| c.term).sum::<f64>() * (1.0 + 4.0 * f64::EPSILON * cells.len() as f64);
    QuadratureResult {
        value,
        value_error,
        remainder_bound: stated.max(tight_bound),
        tight_bound,
        partition: part,
        per_cell,
    }
}

fn max_sup_factor(cells: &[Cell]) -> f64 {
    cells.iter().filter(|c| !c.frozen).map(|c| c.sup_factor).fold(0.0, f64::max)
}

fn osc_term(c: &Cell) -> f64 {
    0.5 * c.osc * c.sup_factor * c.variation
}

/// `S_n` with the remainder bound `½ v(f, I_n) max_i ‖g - mean_i g‖_∞ V(u)`
/// and the per-cell `Σ ½ (M_i - m_i) ‖g - mean_i g‖_∞ V_i(u)`.
pub fn remainder_bound_osc(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    part: &Partition,
) -> Result<QuadratureResult> {
    let cells = cells_for(Mode::default(), f, g, u, part)?;
    let v = cells.iter().filter(|c| !c.frozen).map(|c| c.osc).fold(0.0, f64::max);
    let var_u = total_variation(u, u.a(), u.b())?.hi;
    let stated = 0.5 * v * max_sup_factor(&cells) * var_u;
    Ok(assemble(part.clone(), &cells, osc_term, stated))
}

/// `S_n` with the remainder bound `H/2^r v(I_n)^r max_i ‖g - mean_i g‖_∞ V(u)`
/// for `f` Hölder of order `r`, and the per-cell form with `h_i^r`.
pub fn remainder_bound_holder(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    part: &Partition,
    cert_f: &RegularityCertificate,
) -> Result<QuadratureResult> {
    let (h, r) = match *cert_f {
        RegularityCertificate::Holder { h, r } => (h, r),
        RegularityCertificate::Lipschitz { l } => (l, 1.0),
        _ => return Err(Error::ClassMismatch(format!("expected a Hölder certificate, got `{}`", cert_f.kind_name()))),
    };
    require_certificate(f, cert_f)?;
    let cells = cells_for(Mode::default(), f, g, u, part)?;
    let var_u = total_variation(u, u.a(), u.b())?.hi;
    let k = h / 2f64.powf(r);
    let stated = k * part.mesh().powf(r) * max_sup_factor(&cells) * var_u;
    Ok(assemble(part.clone(), &cells, |c| k * (c.hi - c.lo).powf(r) * c.sup_factor * c.variation, stated))
}

/// Splits `[lo, hi]` at the midpoint, or a quarter-cell away from it when a
/// half would have `u(x_{i+1}) = u(x_i)` without `u` being constant there.
fn split_point(u: &PiecewiseFunction, lo: f64, hi: f64) -> Result<f64> {
    let h = hi - lo;
    let ok = |x: f64| -> Result<bool> {
        for (c, d) in [(lo, x), (x, hi)] {
            let var = total_variation(u, c, d)?.hi;
            let (uc, ud) = (u.value_at(c), u.value_at(d));
            if var > 0.0 && degenerate(ud - uc, uc.abs().max(ud.abs()).max(var)) {
                return Ok(false);
            }
        }
        Ok(true)
    };
    for x in [lo + 0.5 * h, lo + 0.25 * h, lo + 0.75 * h, lo + 0.375 * h, lo + 0.625 * h] {
        if x > lo && x < hi && ok(x)? {
            return Ok(x);
        }
    }
    Ok(lo + 0.25 * h)
}

/// Bisects the cell with the largest term of the per-cell bound until the
/// tight bound is at most `tol` or `max_cells` cells are in use.
///
/// Fails with [`Error::ToleranceUnreachable`] when the worst cell cannot be
/// split any further.
pub fn adaptive_quadrature(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    tol: f64,
    max_cells: usize,
) -> Result<QuadratureResult> {
    adaptive_quadrature_with(Mode::default(), f, g, u, tol, max_cells)
}

pub fn adaptive_quadrature_with(
    mode: Mode,
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    tol: f64,
    max_cells: usize,
) -> Result<QuadratureResult> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let (a, b) = (u.a(), u.b());
    Partition::new(vec![a, b])?.check_domain(f)?;
    Partition::new(vec![a, b])?.check_domain(g)?;
    let max_cells = max_cells.max(1);
    let mut cells: Vec<Cell> = Vec::new();
    let mut pending = vec![(a, b)];
    // cells whose endpoints give u(x_{i+1}) = u(x_i) are split before use
    while let Some((lo, hi)) = pending.pop() {
        match cell_data(f, g, u, lo, hi, cells.len()) {
            Ok(c) => cells.push(c),
            Err(Error::DegenerateCell { .. }) if hi - lo > (b - a) * 1e-9 => {
                let x = split_point(u, lo, hi)?;
                pending.push((x, hi));
                pending.push((lo, x));
            }
            Err(e) => return Err(e),
        }
    }
    cells.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let total = |cells: &[Cell]| cells.iter().map(osc_term).sum::<f64>();
    while total(&cells) > tol && cells.len() < max_cells {
        let (worst, term) = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.frozen)
            .map(|(i, c)| (i, osc_term(c)))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("a positive bound has a live cell");
        let (lo, hi) = (cells[worst].lo, cells[worst].hi);
        if hi - lo <= (b - a) * 1e-13 {
            return Err(Error::ToleranceUnreachable { lo, hi, term });
        }
        let x = split_point(u, lo, hi)?;
        let halves = par::map_indexed(mode, 2, |k| {
            let (c, d) = if k == 0 { (lo, x) } else { (x, hi) };
            cell_data(f, g, u, c, d, worst + k)
        });
        let mut halves = halves.into_iter().collect::<Result<Vec<_>>>()?;
        let right = halves.pop().expect("two halves");
        cells[worst] = halves.pop().expect("two halves");
        cells.insert(worst + 1, right);
    }
    let mut pts: Vec<f64> = cells.iter().map(|c| c.lo).collect();
    pts.push(b);
    let part = Partition::new(pts)?;
    let v = cells.iter().filter(|c| !c.frozen).map(|c| c.osc).fold(0.0, f64::max);
    let var_u = total_variation(u, a, b)?.hi;
    let stated = 0.5 * v * max_sup_factor(&cells) * var_u;
    Ok(assemble(part, &cells, osc_term, stated))
}

/// One row of a convergence study on uniform partitions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub mesh: f64,
    pub bound: f64,
    pub tight_bound: f64,
    pub true_error: f64,
}

/// `|∫fg du - S_n|` against the bounds for each uniform `n`.
pub fn convergence_table(
    f: &PiecewiseFunction,
    g: &PiecewiseFunction,
    u: &PiecewiseFunction,
    ns: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    let exact = rs_integral(&f.mul(g)?, u, u.a(), u.b())?.value;
    ns.iter()
        .map(|&n| {
            let part = Partition::uniform(u.a(), u.b(), n)?;
            let q = remainder_bound_osc(f, g, u, &part)?;
            Ok(ConvergenceRow {
                n,
                mesh: part.mesh(),
                bound: q.remainder_bound,
                tight_bound: q.tight_bound,
                true_error: (exact - q.value).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functionals::cheby_T;
    use crate::poly::Poly;
    use approx::assert_abs_diff_eq;
    use std::collections::BTreeMap;

    fn poly(c: &[f64]) -> PiecewiseFunction {
        PiecewiseFunction::polynomial(0.0, 1.0, c).unwrap()
    }

    fn endpoint_jumps() -> PiecewiseFunction {
        let vals = BTreeMap::from([(0, -1.0), (1, 1.0)]);
        PiecewiseFunction::with_values(vec![0.0, 1.0], vec![Poly::zero()], &vals).unwrap()
    }

    #[test]
    fn oscillation_examples() {
        let t = poly(&[0.0, 1.0]);
        assert_abs_diff_eq!(oscillation_v(&t, &Partition::uniform(0.0, 1.0, 4).unwrap()).unwrap(), 0.25);
        assert_eq!(oscillation_v(&poly(&[2.0]), &Partition::uniform(0.0, 1.0, 3).unwrap()).unwrap(), 0.0);
        let sq = poly(&[0.0, 0.0, 1.0]);
        assert_abs_diff_eq!(oscillation_v(&sq, &Partition::uniform(0.0, 1.0, 2).unwrap()).unwrap(), 0.75);
    }

    #[test]
    fn composite_examples() {
        let t = poly(&[0.0, 1.0]);
        let (s, _) = composite_s(&t, &t, &t, &Partition::uniform(0.0, 1.0, 2).unwrap()).unwrap();
        assert_abs_diff_eq!(s, 5.0 / 16.0, epsilon = 1e-15);
        let one = poly(&[1.0]);
        let sq = poly(&[0.0, 0.0, 1.0]);
        let q = remainder_bound_osc(&sq, &one, &t, &Partition::uniform(0.0, 1.0, 3).unwrap()).unwrap();
        assert_abs_diff_eq!(q.value, 1.0 / 3.0, epsilon = 1e-15);
        assert!(q.remainder_bound < 1e-14);
        // n = 1 reproduces the functional
        let (s1, _) = composite_s(&sq, &t, &t, &Partition::uniform(0.0, 1.0, 1).unwrap()).unwrap();
        let exact = 0.25;
        let tv = cheby_T(&sq, &t, &t).unwrap().value;
        assert_abs_diff_eq!(exact - s1, tv, epsilon = 1e-15);
    }

    #[test]
    fn degenerate_cells() {
        let hat =
            PiecewiseFunction::new(vec![0.0, 0.5, 1.0], vec![Poly::linear(0.0, 1.0), Poly::linear(1.0, -1.0)]).unwrap();
        let t = poly(&[0.0, 1.0]);
        assert!(matches!(
            composite_s(&t, &t, &hat, &Partition::uniform(0.0, 1.0, 1).unwrap()),
            Err(Error::DegenerateCell { index: 0 })
        ));
        let q = adaptive_quadrature(&t, &t, &hat, 1e-3, 1000).unwrap();
        let exact = rs_integral(&t.mul(&t).unwrap(), &hat, 0.0, 1.0).unwrap().value;
        assert!((q.value - exact).abs() <= q.tight_bound + q.value_error);
        let flat = PiecewiseFunction::new(vec![0.0, 0.5, 1.0], vec![Poly::zero(), Poly::linear(-0.5, 1.0)]).unwrap();
        let q = remainder_bound_osc(&t, &t, &flat, &Partition::uniform(0.0, 1.0, 2).unwrap()).unwrap();
        assert!(q.per_cell[0].frozen);
    }

    #[test]
    fn witness_is_sharp_at_one_cell() {
        let t = poly(&[0.0, 1.0]);
        let q = remainder_bound_osc(&t, &t, &endpoint_jumps(), &Partition::uniform(0.0, 1.0, 1).unwrap()).unwrap();
        let exact = rs_integral(&t.mul(&t).unwrap(), &endpoint_jumps(), 0.0, 1.0).unwrap().value;
        let r = (exact - q.value).abs();
        assert_abs_diff_eq!(q.remainder_bound, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(r / q.remainder_bound, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn bounds_hold_and_order() {
        let t = poly(&[0.0, 1.0]);
        let exact = 1.0 / 3.0;
        for n in [1, 2, 4, 7, 16] {
            let part = Partition::uniform(0.0, 1.0, n).unwrap();
            let q = remainder_bound_osc(&t, &t, &t, &part).unwrap();
            assert!((exact - q.value).abs() <= q.tight_bound + q.value_error);
            assert!(q.tight_bound <= q.remainder_bound);
            let qh = remainder_bound_holder(&t, &t, &t, &part, &RegularityCertificate::Lipschitz { l: 1.0 }).unwrap();
            assert_abs_diff_eq!(qh.remainder_bound, q.remainder_bound, epsilon = 1e-14);
        }
        let q = remainder_bound_holder(
            &poly(&[3.0]),
            &t,
            &t,
            &Partition::uniform(0.0, 1.0, 4).unwrap(),
            &RegularityCertificate::Holder { h: 0.0, r: 0.5 },
        )
        .unwrap();
        assert_eq!(q.remainder_bound, 0.0);
    }

    #[test]
    fn adaptive_examples() {
        let t = poly(&[0.0, 1.0]);
        let q = adaptive_quadrature(&t, &poly(&[1.0]), &t, 1e-8, 100).unwrap();
        assert_eq!(q.partition.n(), 1);
        assert_eq!(q.tight_bound, 0.0);
        let q = adaptive_quadrature(&t, &t, &t, 1e-4, 10_000).unwrap();
        assert!(q.tight_bound <= 1e-4);
        assert!((q.value - 1.0 / 3.0).abs() <= 1e-4);
        let ustep = t.add(&PiecewiseFunction::step(0.0, 1.0, 0.5, 0.0, 1.0).unwrap()).unwrap();
        let q = adaptive_quadrature(&t, &t, &ustep, 1e-6, 100_000).unwrap();
        assert!((q.value - (1.0 / 3.0 + 0.25)).abs() <= 1e-6, "{}", q.value);
    }
}
