//! Randomized soundness checks: seeded inputs drawn from each bound's
//! hypothesis class, evaluated and tallied.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{evaluate, float_or_inf, BoundInputs, BoundReport, TheoremId};
use crate::document::InputDocument;
use crate::error::{Error, Result};
use crate::funcrep::{extrema_on, holder_sufficient_constant, max_abs_slope, total_variation};
use crate::funcrep::{PiecewiseFunction, RegularityCertificate};
use crate::par::{self, Mode};
use crate::poly::Poly;

/// Draws per trial before giving up with [`Error::GeneratorExhausted`].
pub const MAX_ATTEMPTS: usize = 50;

/// The generator for trial `trial` of the bound with index `stream`.
pub fn trial_rng(seed: u64, stream: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((stream << 32) | (trial & 0xffff_ffff));
    rng
}

/// A random interval `[a, b]` with `a ∈ [-2, 2]` and length in `[0.5, 3]`.
pub fn interval(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let a = rng.random_range(-2.0..2.0);
    (a, a + rng.random_range(0.5..3.0))
}

/// One to four pieces with jittered, well separated breakpoints.
pub fn breakpoints(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Vec<f64> {
    let k = rng.random_range(1..=4usize);
    let len = b - a;
    let mut bps = vec![a];
    for i in 1..k {
        bps.push(a + len * (i as f64 + rng.random_range(-0.3..0.3)) / k as f64);
    }
    bps.push(b);
    bps
}

/// Degree `<= deg` with coefficients scaled to the piece length `h`, in the
/// local variable `s = t - lo`.
fn local_poly(rng: &mut ChaCha8Rng, h: f64, deg: usize) -> Poly {
    let d = rng.random_range(0..=deg);
    Poly::new((0..=d).map(|j| rng.random_range(-1.0..1.0) / h.powi(j as i32)))
}

fn globalize(p: &Poly, lo: f64) -> Poly {
    p.taylor_shift(-lo)
}

/// A piecewise polynomial of degree `<= deg`; with `jumps`, interior
/// breakpoints may carry jumps and arbitrary point values, otherwise it is
/// continuous. End values are always the one-sided limits.
pub fn piecewise(rng: &mut ChaCha8Rng, a: f64, b: f64, deg: usize, jumps: bool) -> Result<PiecewiseFunction> {
    let bps = breakpoints(rng, a, b);
    let mut pieces: Vec<Poly> = Vec::new();
    let mut overrides = std::collections::BTreeMap::new();
    for i in 0..bps.len() - 1 {
        let (lo, hi) = (bps[i], bps[i + 1]);
        let mut p = globalize(&local_poly(rng, hi - lo, deg), lo);
        if let Some(prev) = pieces.last() {
            let left = prev.eval(lo);
            if !(jumps && rng.random_bool(0.5)) {
                p = p.add_constant(left - p.eval(lo));
            }
            if jumps && rng.random_bool(0.3) {
                let right = p.eval(lo);
                overrides.insert(i, rng.random_range(left.min(right) - 0.5..left.max(right) + 0.5));
            }
        }
        pieces.push(p);
    }
    PiecewiseFunction::with_values(bps, pieces, &overrides)
}

/// `w = c0 + (c1 + c2 s)^2` on each piece, sometimes zero, possibly
/// discontinuous.
pub fn nonnegative(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Result<PiecewiseFunction> {
    let bps = breakpoints(rng, a, b);
    let pieces = bps
        .windows(2)
        .map(|w| {
            if rng.random_bool(0.15) {
                return Poly::zero();
            }
            let h = w[1] - w[0];
            let c0: f64 = rng.random_range(0.0..1.0);
            let c1: f64 = rng.random_range(-1.0..1.0);
            let c2: f64 = rng.random_range(-1.0..1.0) / h;
            globalize(&Poly::new([c0 + c1 * c1, 2.0 * c1 * c2, c2 * c2]), w[0])
        })
        .collect();
    PiecewiseFunction::new(bps, pieces)
}

/// Adds nonnegative jumps at interior breakpoints and, with
/// `endpoint_jumps`, at the ends; keeps `u` nondecreasing if it was.
fn add_upward_jumps(rng: &mut ChaCha8Rng, u: &PiecewiseFunction, endpoint_jumps: bool) -> Result<PiecewiseFunction> {
    let bps = u.breakpoints().to_vec();
    let n = bps.len();
    let mut shift = 0.0;
    let mut pieces = Vec::with_capacity(n - 1);
    let mut values = vec![0.0; n];
    values[0] = u.values()[0];
    if endpoint_jumps && rng.random_bool(0.3) {
        values[0] -= rng.random_range(0.0..1.0);
    }
    for i in 0..n - 1 {
        if i > 0 {
            let jump = if rng.random_bool(0.4) { rng.random_range(0.0..1.0) } else { 0.0 };
            let theta: f64 = rng.random_range(0.0..=1.0);
            values[i] = u.values()[i] + shift + theta * jump;
            shift += jump;
        }
        pieces.push(u.pieces()[i].add_constant(shift));
    }
    values[n - 1] = u.values()[n - 1] + shift;
    if endpoint_jumps && rng.random_bool(0.3) {
        values[n - 1] += rng.random_range(0.0..1.0);
    }
    PiecewiseFunction::from_parts(bps, pieces, values)
}

/// Nondecreasing: the integral of a nonnegative piecewise quadratic plus
/// nonnegative jumps.
pub fn monotone(
    rng: &mut ChaCha8Rng,
    a: f64,
    b: f64,
    interior_jumps: bool,
    endpoint_jumps: bool,
) -> Result<PiecewiseFunction> {
    let base = nonnegative(rng, a, b)?.antiderivative().add_constant(rng.random_range(-1.0..1.0));
    if interior_jumps {
        return add_upward_jumps(rng, &base, endpoint_jumps);
    }
    let mut values = base.values().to_vec();
    let n = values.len();
    if endpoint_jumps && rng.random_bool(0.3) {
        values[0] -= rng.random_range(0.0..1.0);
    }
    if endpoint_jumps && rng.random_bool(0.3) {
        values[n - 1] += rng.random_range(0.0..1.0);
    }
    PiecewiseFunction::from_parts(base.breakpoints().to_vec(), base.pieces().to_vec(), values)
}

/// Lipschitz and continuous: the integral of a bounded piecewise quadratic.
pub fn lipschitz(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Result<PiecewiseFunction> {
    Ok(piecewise(rng, a, b, 2, true)?.antiderivative().add_constant(rng.random_range(-1.0..1.0)))
}

/// Of bounded variation with jumps anywhere, including the ends.
pub fn bounded_variation(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Result<PiecewiseFunction> {
    let f = piecewise(rng, a, b, 3, true)?;
    let mut values = f.values().to_vec();
    let n = values.len();
    for i in [0, n - 1] {
        if rng.random_bool(0.3) {
            values[i] += rng.random_range(-1.0..1.0);
        }
    }
    PiecewiseFunction::from_parts(f.breakpoints().to_vec(), f.pieces().to_vec(), values)
}

/// Convex piecewise quadratic: integral of a nondecreasing piecewise linear
/// slope, sometimes raised at the ends.
pub fn convex(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Result<PiecewiseFunction> {
    let bps = breakpoints(rng, a, b);
    let mut slope: f64 = rng.random_range(-2.0..2.0);
    let mut pieces = Vec::new();
    for (i, w) in bps.windows(2).enumerate() {
        if i > 0 && rng.random_bool(0.5) {
            slope += rng.random_range(0.0..1.0);
        }
        let m = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..2.0) / (w[1] - w[0]) };
        pieces.push(globalize(&Poly::linear(slope, m), w[0]));
        slope += m * (w[1] - w[0]);
    }
    let u = PiecewiseFunction::new(bps, pieces)?.antiderivative().add_constant(rng.random_range(-1.0..1.0));
    let mut values = u.values().to_vec();
    let n = values.len();
    for i in [0, n - 1] {
        if rng.random_bool(0.2) {
            values[i] += rng.random_range(0.0..1.0);
        }
    }
    PiecewiseFunction::from_parts(u.breakpoints().to_vec(), u.pieces().to_vec(), values)
}

const SLACK: f64 = 1e-12;

pub fn bounds_cert(f: &PiecewiseFunction) -> Result<RegularityCertificate> {
    let e = extrema_on(f, f.a(), f.b())?;
    let pad = SLACK * (e.inf.lo.abs().max(e.sup.hi.abs()));
    Ok(RegularityCertificate::Bounds { m: e.inf.lo - pad, big_m: e.sup.hi + pad })
}

pub fn lipschitz_cert(f: &PiecewiseFunction) -> Result<RegularityCertificate> {
    let (l, _) = max_abs_slope(f, f.a(), f.b())?;
    Ok(RegularityCertificate::Lipschitz { l: l * (1.0 + SLACK) })
}

pub fn holder_cert(f: &PiecewiseFunction, r: f64) -> Result<RegularityCertificate> {
    Ok(RegularityCertificate::Holder { h: holder_sufficient_constant(f, r)? * (1.0 + SLACK), r })
}

pub fn variation_cert(f: &PiecewiseFunction) -> Result<RegularityCertificate> {
    Ok(RegularityCertificate::BoundedVariation { v: total_variation(f, f.a(), f.b())?.hi * (1.0 + SLACK) })
}

fn exponent(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(1.05..6.0)
}

/// Hölder certificate with a random exponent, or Lipschitz for `r = 1`.
fn holder_or_lipschitz(rng: &mut ChaCha8Rng, f: &PiecewiseFunction, lipschitz: bool) -> Result<RegularityCertificate> {
    if lipschitz {
        lipschitz_cert(f)
    } else {
        holder_cert(f, rng.random_range(0.2..0.95))
    }
}

/// Random inputs within the hypotheses of `id`.
pub fn draw(rng: &mut ChaCha8Rng, id: TheoremId) -> Result<BoundInputs> {
    use TheoremId::*;
    let (a, b) = interval(rng);
    let any = |rng: &mut ChaCha8Rng| piecewise(rng, a, b, 3, true);
    let cont = |rng: &mut ChaCha8Rng| piecewise(rng, a, b, 3, false);
    let mut inp;
    match id {
        Thm2_1a | Thm2_2 | Thm2_3a => {
            inp = BoundInputs::new(any(rng)?);
            inp.g = Some(any(rng)?);
            inp.cert_f = vec![bounds_cert(&inp.f)?];
            inp.u = Some(match id {
                Thm2_1a => bounded_variation(rng, a, b)?,
                Thm2_2 => monotone(rng, a, b, true, true)?,
                _ => lipschitz(rng, a, b)?,
            });
            if id == Thm2_3a {
                inp.cert_u = vec![lipschitz_cert(inp.u.as_ref().unwrap())?];
            }
        }
        Thm2_1 | Cor2_2 | Thm2_3 | Cor2_4 | Thm2_5 | Cor2_6 => {
            inp = BoundInputs::new(cont(rng)?);
            inp.g = Some(any(rng)?);
            inp.cert_f = vec![holder_or_lipschitz(rng, &inp.f, matches!(id, Cor2_2 | Cor2_4 | Cor2_6))?];
            let u = match id {
                Thm2_1 | Cor2_2 => bounded_variation(rng, a, b)?,
                Thm2_3 | Cor2_4 => monotone(rng, a, b, true, true)?,
                _ => lipschitz(rng, a, b)?,
            };
            if matches!(id, Thm2_5 | Cor2_6) {
                inp.cert_u = vec![lipschitz_cert(&u)?];
                inp.p = Some(exponent(rng));
            }
            inp.u = Some(u);
        }
        WeightedItem1 | WeightedItem2 | WeightedItem3 | WeightedItem4 | WeightedItem5 | WeightedItem6 => {
            let holder = matches!(id, WeightedItem4 | WeightedItem5 | WeightedItem6);
            inp = BoundInputs::new(if holder { cont(rng)? } else { any(rng)? });
            inp.g = Some(any(rng)?);
            inp.cert_f = vec![if holder {
                let lip = rng.random_bool(0.5);
                holder_or_lipschitz(rng, &inp.f, lip)?
            } else {
                bounds_cert(&inp.f)?
            }];
            inp.w = Some(if matches!(id, WeightedItem2 | WeightedItem5) { nonnegative(rng, a, b)? } else { any(rng)? });
            inp.p = Some(exponent(rng));
        }
        ThmA1 => {
            inp = BoundInputs::new(any(rng)?);
            inp.cert_f = vec![bounds_cert(&inp.f)?];
            let u = lipschitz(rng, a, b)?;
            inp.cert_u = vec![lipschitz_cert(&u)?];
            inp.u = Some(u);
        }
        ThmA2 | ThmA6ii | CorA8 | ThmB1 => {
            inp = BoundInputs::new(lipschitz_or_cont(rng, a, b)?);
            inp.cert_f = vec![lipschitz_cert(&inp.f)?];
            let u = if id == ThmB1 { monotone(rng, a, b, true, true)? } else { bounded_variation(rng, a, b)? };
            if id == ThmA2 {
                inp.cert_u = vec![variation_cert(&u)?];
            }
            if id == CorA8 {
                inp.p = Some(exponent(rng));
            }
            inp.u = Some(u);
        }
        ThmA6i | CorA7 => {
            inp = BoundInputs::new(any(rng)?);
            inp.cert_f = vec![variation_cert(&inp.f)?];
            inp.u = Some(cont(rng)?);
        }
        ThmA6iii | CorA9 => {
            inp = BoundInputs::new(monotone(rng, a, b, true, false)?);
            inp.cert_f = vec![RegularityCertificate::MonotoneNondecreasing];
            inp.u = Some(cont(rng)?);
            if id == CorA9 {
                inp.p = Some(exponent(rng));
            }
        }
        ThmA11 => {
            inp = BoundInputs::new(monotone(rng, a, b, true, false)?);
            inp.cert_f = vec![RegularityCertificate::MonotoneNondecreasing];
            inp.u = Some(convex(rng, a, b)?);
        }
        ThmB2 => {
            inp = BoundInputs::new(any(rng)?);
            inp.cert_f = vec![variation_cert(&inp.f)?];
            inp.u = Some(monotone(rng, a, b, true, true)?);
        }
        OstrowskiLipschitz | OstrowskiBv => {
            if id == OstrowskiLipschitz {
                inp = BoundInputs::new(lipschitz_or_cont(rng, a, b)?);
                inp.cert_f = vec![lipschitz_cert(&inp.f)?];
            } else {
                inp = BoundInputs::new(any(rng)?);
                inp.cert_f = vec![variation_cert(&inp.f)?];
            }
            inp.x = Some(if rng.random_bool(0.2) {
                if rng.random_bool(0.5) {
                    a
                } else {
                    b
                }
            } else {
                rng.random_range(a..=b)
            });
        }
    }
    Ok(inp)
}

fn lipschitz_or_cont(rng: &mut ChaCha8Rng, a: f64, b: f64) -> Result<PiecewiseFunction> {
    if rng.random_bool(0.5) {
        lipschitz(rng, a, b)
    } else {
        piecewise(rng, a, b, 3, false)
    }
}

fn resample(e: &Error) -> bool {
    matches!(e, Error::DegenerateIntegrator { .. } | Error::DegenerateWeight { .. } | Error::SharedDiscontinuity { .. })
}

/// Draws and evaluates one trial, redrawing inputs the bound rejects as
/// degenerate.
pub fn run_trial(id: TheoremId, seed: u64, trial: usize) -> Result<(BoundInputs, BoundReport)> {
    let stream = TheoremId::ALL.iter().position(|&t| t == id).unwrap_or(0) as u64;
    let mut rng = trial_rng(seed, stream, trial as u64);
    for _ in 0..MAX_ATTEMPTS {
        let inp = draw(&mut rng, id)?;
        match evaluate(id, &inp) {
            Ok(r) => return Ok((inp, r)),
            Err(e) if resample(&e) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::GeneratorExhausted(format!("{id}: no admissible input after {MAX_ATTEMPTS} draws")))
}

/// Everything needed to replay a failing trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reproducer {
    pub theorem_id: TheoremId,
    pub seed: u64,
    pub trial: usize,
    pub input: InputDocument,
    pub report: BoundReport,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifySummary {
    pub theorem_id: TheoremId,
    pub seed: u64,
    pub trials: usize,
    pub holds: usize,
    pub violations: usize,
    #[serde(with = "float_or_inf")]
    pub min_ratio: f64,
    #[serde(with = "float_or_inf")]
    pub mean_ratio: f64,
    #[serde(with = "float_or_inf")]
    pub max_ratio: f64,
    /// the lowest-indexed violating trial
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reproducer: Option<Reproducer>,
}

#[derive(Clone, Debug)]
pub struct VerifyRun {
    pub summary: VerifySummary,
    /// in trial order
    pub reports: Vec<BoundReport>,
}

/// Runs `trials` seeded trials of `id` in the default mode.
pub fn verify(id: TheoremId, trials: usize, seed: u64) -> Result<VerifySummary> {
    Ok(verify_with(Mode::default(), id, trials, seed)?.summary)
}

pub fn verify_with(mode: Mode, id: TheoremId, trials: usize, seed: u64) -> Result<VerifyRun> {
    let outcomes = par::map_indexed(mode, trials, |i| run_trial(id, seed, i));
    let mut reports = Vec::with_capacity(trials);
    let mut reproducer = None;
    let (mut holds, mut violations) = (0, 0);
    let (mut lo, mut hi, mut sum, mut finite) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
    for (trial, outcome) in outcomes.into_iter().enumerate() {
        let (inp, r) = outcome?;
        if r.sound() {
            holds += 1;
        } else {
            violations += 1;
            if reproducer.is_none() {
                reproducer = Some(Reproducer {
                    theorem_id: id,
                    seed,
                    trial,
                    input: InputDocument::from_bound_inputs(&inp),
                    report: r.clone(),
                });
            }
        }
        lo = lo.min(r.ratio);
        hi = hi.max(r.ratio);
        if r.ratio.is_finite() {
            sum += r.ratio;
            finite += 1;
        }
        reports.push(r);
    }
    let summary = VerifySummary {
        theorem_id: id,
        seed,
        trials,
        holds,
        violations,
        min_ratio: if trials == 0 { 0.0 } else { lo },
        mean_ratio: if finite == 0 { 0.0 } else { sum / finite as f64 },
        max_ratio: if trials == 0 { 0.0 } else { hi },
        reproducer,
    };
    Ok(VerifyRun { summary, reports })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcrep::{verify_certificate, Verdict};

    #[test]
    fn generators_meet_their_classes() {
        for trial in 0..200 {
            let mut rng = trial_rng(11, 0, trial);
            let (a, b) = interval(&mut rng);
            let m = monotone(&mut rng, a, b, true, true).unwrap();
            assert!(matches!(
                verify_certificate(&m, &RegularityCertificate::MonotoneNondecreasing).unwrap(),
                Verdict::Pass
            ));
            let l = lipschitz(&mut rng, a, b).unwrap();
            assert!(l.is_continuous());
            assert!(matches!(verify_certificate(&l, &lipschitz_cert(&l).unwrap()).unwrap(), Verdict::Pass));
            let c = piecewise(&mut rng, a, b, 3, false).unwrap();
            assert!(c.is_continuous() && c.max_degree() <= 3);
            assert!(matches!(verify_certificate(&c, &holder_cert(&c, 0.5).unwrap()).unwrap(), Verdict::Pass));
            let v = bounded_variation(&mut rng, a, b).unwrap();
            assert!(matches!(verify_certificate(&v, &variation_cert(&v).unwrap()).unwrap(), Verdict::Pass));
            assert!(matches!(verify_certificate(&v, &bounds_cert(&v).unwrap()).unwrap(), Verdict::Pass));
            let u = convex(&mut rng, a, b).unwrap();
            assert!(crate::bounds::is_convex(&u).unwrap() || crate::bounds::check_delta_nonnegative(&u).is_ok());
        }
    }

    #[test]
    fn trials_are_reproducible_and_mode_independent() {
        let s = verify_with(Mode::Sequential, TheoremId::Thm2_1a, 20, 7).unwrap();
        let p = verify_with(Mode::Parallel, TheoremId::Thm2_1a, 20, 7).unwrap();
        assert_eq!(s.reports, p.reports);
        assert_eq!(s.summary, p.summary);
        assert_eq!(s.summary.violations, 0);
        assert!(s.summary.max_ratio <= 1.0);
        let (inp, r) = run_trial(TheoremId::ThmB2, 3, 5).unwrap();
        let (inp2, r2) = run_trial(TheoremId::ThmB2, 3, 5).unwrap();
        assert_eq!((inp.f, r), (inp2.f, r2));
    }

    #[test]
    fn every_bound_survives_a_short_run() {
        for &id in TheoremId::ALL {
            let s = verify(id, 25, 1).unwrap();
            assert_eq!(s.violations, 0, "{id}: {:?}", s.reproducer);
        }
    }
}
