//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines are always printed; exits non-zero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use serde_json::Value;
use stieltjes_core::bounds::{bound_d_monotone_k, bound_t_bv, bound_t_holder_bv, bound_t_monotone, TheoremId};
use stieltjes_core::cli::run_with_seed_env;
use stieltjes_core::functionals::{cheby_T, identity_residual_D, kernel_delta, kernel_gamma, kernel_phi};
use stieltjes_core::quadrature::{
    adaptive_quadrature, composite_s, remainder_bound_holder, remainder_bound_osc, Partition,
};
use stieltjes_core::sharpness::{p_branch_constant, sharpness_row, witness, witness_report};
use stieltjes_core::stieltjes::{rs_integral, rs_oracle};
use stieltjes_core::verify::{self, trial_rng};
use stieltjes_core::{Error, PiecewiseFunction, Poly, RegularityCertificate};

const RATIO_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn poly(c: &[f64]) -> PiecewiseFunction {
    PiecewiseFunction::polynomial(0.0, 1.0, c).unwrap()
}

fn endpoint_jump() -> PiecewiseFunction {
    stieltjes_core::sharpness::endpoint_jump_integrator(0.0, 1.0).unwrap()
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let t = Instant::now();
    let mut o = f();
    let took = t.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            o.pass = false;
        }
        o.detail = format!("{}; {:.2?} (limit {:?})", o.detail, took, limit);
    }
    o
}

fn c1_endpoint_witness() -> Outcome {
    let t = poly(&[0.0, 1.0]);
    let u = endpoint_jump();
    let cheb = cheby_T(&t, &t, &u).unwrap().value;
    let b = RegularityCertificate::Bounds { m: 0.0, big_m: 1.0 };
    let lip = RegularityCertificate::Lipschitz { l: 1.0 };
    let ratios = [
        bound_t_bv(&t, &t, &u, &b).unwrap().ratio,
        bound_t_monotone(&t, &t, &u, &b).unwrap().ratio,
        bound_t_holder_bv(&t, &t, &u, &lip).unwrap().ratio,
    ];
    let pass = within(cheb, 0.25, 1e-12) && ratios.iter().all(|&r| within(r, 1.0, RATIO_TOL));
    outcome(pass, format!("T = {cheb}, ratios (bv, monotone, holder r=1) = {ratios:?}"))
}

fn c2_step_and_centered_witnesses() -> Outcome {
    let r23 = witness_report(&witness("thm_2_3a").unwrap()).unwrap();
    let r26 = witness_report(&witness("cor_2_6").unwrap()).unwrap();
    let inf = r26.tier("inf_branch").unwrap();
    let e = p_branch_constant(1.001).unwrap();
    let pass = within(r23.lhs, 1.0, 1e-12)
        && within(r23.rhs, 1.0, 1e-12)
        && within(r23.ratio, 1.0, RATIO_TOL)
        && within(r26.lhs, 0.25, 1e-12)
        && within(inf.value, 0.25, 1e-12)
        && within(inf.ratio, 1.0, RATIO_TOL)
        && within(e, 0.5, 1e-3);
    outcome(
        pass,
        format!(
            "step: lhs {} rhs {} ratio {}; centered: lhs {} inf-branch {} ratio {}; p-branch constant at q=1.001: {e}",
            r23.lhs, r23.rhs, r23.ratio, r26.lhs, inf.value, inf.ratio
        ),
    )
}

fn c3_moment_witnesses() -> Outcome {
    let f = poly(&[-0.5, 1.0]);
    let u = PiecewiseFunction::with_values(vec![0.0, 1.0], vec![Poly::zero()], &BTreeMap::from([(1, 1.0)])).unwrap();
    let k = bound_d_monotone_k(&f, &u, &RegularityCertificate::Lipschitz { l: 1.0 }).unwrap();
    let k_u = k.extras["K_u"];
    let b1 = within(k.lhs, 0.5, 1e-12) && within(k_u, 0.0, 1e-12) && within(k.ratio, 1.0, RATIO_TOL);
    let row = sharpness_row(&witness("thm_b_2").unwrap()).unwrap();
    let b2 = within(row.ratio, 1.0, RATIO_TOL);
    outcome(
        b1 && b2,
        format!(
            "K-witness: D {} K(u) {k_u} ratio {} [{}]; Q-witness (midpoint step): D {:.3e} rhs {} ratio {} [{}]",
            k.lhs,
            k.ratio,
            if b1 { "ok" } else { "FAIL" },
            row.lhs,
            row.rhs,
            row.ratio,
            if b2 { "ok" } else { "FAIL: D vanishes for this integrator" }
        ),
    )
}

fn kernel_fixtures() -> Vec<PiecewiseFunction> {
    let mut v = vec![
        poly(&[0.0, 0.0, 1.0]),
        poly(&[0.0, 0.0, 0.0, 1.0]),
        poly(&[0.0, 0.0, 3.0, -2.0]),
        poly(&[1.0, 1.0, 0.5, 1.0 / 6.0]),
        poly(&[0.0, -0.5, 2.5, -1.0]),
        endpoint_jump(),
        PiecewiseFunction::step(0.0, 1.0, 0.5, 0.0, 1.0).unwrap(),
        PiecewiseFunction::new(
            vec![0.0, 0.4, 1.0],
            vec![Poly::new([0.0, -1.0, 1.0]), Poly::new([-0.3, 0.0, 0.0, 1.0])],
        )
        .unwrap(),
    ];
    for trial in 0..2 {
        let mut rng = trial_rng(4, 0, trial);
        v.push(verify::monotone(&mut rng, 0.0, 1.0, true, true).unwrap());
    }
    v
}

fn c4_identities() -> Outcome {
    let mut worst_residual = 0.0_f64;
    let mut n = 0;
    let mut trial = 0;
    while n < 50 {
        let mut rng = trial_rng(2026, 1, trial);
        trial += 1;
        let (a, b) = verify::interval(&mut rng);
        let f = single_piece(&mut rng, a, b);
        let u = single_piece(&mut rng, a, b);
        match identity_residual_D(&f, &u) {
            Ok(r) => {
                worst_residual = worst_residual.max(r);
                n += 1;
            }
            Err(Error::DegenerateIntegrator { .. }) => continue,
            Err(e) => return outcome(false, format!("identity residual failed: {e}")),
        }
    }
    let mut worst_kernel = 0.0_f64;
    for u in kernel_fixtures() {
        let (a, b) = (u.a(), u.b());
        for k in 0..1000 {
            let t = a + (b - a) * (k as f64 + 0.5) / 1000.0;
            let g = kernel_gamma(&u, t).unwrap();
            let phi = kernel_phi(&u, t).unwrap();
            let d = kernel_delta(&u, t).unwrap();
            worst_kernel = worst_kernel.max((g - (b - a) * phi).abs()).max((g - (t - a) * (b - t) * d).abs());
        }
    }
    outcome(
        worst_residual <= 1e-8 && worst_kernel <= 1e-12,
        format!("max identity residual {worst_residual:.3e} over 50 pairs; max kernel mismatch {worst_kernel:.3e} over 10 x 1000 points"),
    )
}

fn single_piece(rng: &mut rand_chacha::ChaCha8Rng, a: f64, b: f64) -> PiecewiseFunction {
    loop {
        let f = verify::piecewise(rng, a, b, 3, false).unwrap();
        if f.pieces().len() == 1 {
            return f;
        }
    }
}

fn c5_soundness_battery() -> Outcome {
    let mut total = 0;
    let mut failures = Vec::new();
    for &id in TheoremId::ALL {
        match verify::verify(id, 1000, 20261015) {
            Ok(s) => {
                total += s.trials;
                if s.violations > 0 {
                    failures.push(format!("{id}: {} violations", s.violations));
                }
            }
            Err(e) => failures.push(format!("{id}: {e}")),
        }
    }
    outcome(
        failures.is_empty(),
        format!(
            "{} bounds, {total} trials, {}",
            TheoremId::ALL.len(),
            if failures.is_empty() { "no violations".into() } else { failures.join("; ") }
        ),
    )
}

fn c6_positivity() -> Outcome {
    let run = verify::verify_with(Default::default(), TheoremId::ThmA11, 100, 6).unwrap();
    let lowest = run
        .reports
        .iter()
        .map(|r| r.tier("lower").map(|t| t.value + t.error).unwrap_or(f64::NEG_INFINITY))
        .fold(f64::INFINITY, f64::min);
    let sound = run.reports.iter().all(|r| r.sound());
    outcome(
        sound && lowest >= 0.0,
        format!("{}/100 pass, smallest chained lower bound {lowest:.3e}", run.summary.holds),
    )
}

fn quad_instance(trial: u64) -> Option<(f64, f64, f64)> {
    let mut rng = trial_rng(7, 2, trial);
    for _ in 0..verify::MAX_ATTEMPTS {
        let (a, b) = verify::interval(&mut rng);
        let (f, g, u) = if trial % 2 == 0 {
            (
                verify::piecewise(&mut rng, a, b, 3, false).unwrap(),
                verify::piecewise(&mut rng, a, b, 3, false).unwrap(),
                verify::bounded_variation(&mut rng, a, b).unwrap(),
            )
        } else {
            (
                verify::piecewise(&mut rng, a, b, 3, true).unwrap(),
                verify::piecewise(&mut rng, a, b, 3, true).unwrap(),
                verify::lipschitz(&mut rng, a, b).unwrap(),
            )
        };
        let n = 1 + (trial as usize * 7) % 32;
        let part = Partition::uniform(a, b, n).unwrap();
        let q = match remainder_bound_osc(&f, &g, &u, &part) {
            Ok(q) => q,
            Err(Error::DegenerateCell { .. }) => continue,
            Err(e) => panic!("quadrature instance {trial}: {e}"),
        };
        let exact = rs_integral(&f.mul(&g).unwrap(), &u, a, b).unwrap();
        let err = (exact.value - q.value).abs();
        return Some((err, q.remainder_bound + exact.abs_error + q.value_error, q.tight_bound));
    }
    None
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

/// Piecewise-linear interpolant of `√t` at `(k/m)^2`.
fn sqrt_surrogate(m: usize) -> PiecewiseFunction {
    let nodes: Vec<f64> = (0..=m).map(|k| (k as f64 / m as f64).powi(2)).collect();
    let pieces = nodes
        .windows(2)
        .map(|w| {
            let (y0, y1) = (w[0].sqrt(), w[1].sqrt());
            let s = (y1 - y0) / (w[1] - w[0]);
            Poly::new([y0 - s * w[0], s])
        })
        .collect();
    PiecewiseFunction::new(nodes, pieces).unwrap()
}

fn c7_quadrature() -> Outcome {
    let mut unsound = 0;
    let mut used = 0;
    for trial in 0..500 {
        if let Some((err, bound, _)) = quad_instance(trial) {
            used += 1;
            if err > bound {
                unsound += 1;
            }
        }
    }
    let u = poly(&[0.0, 1.0]);
    let g = PiecewiseFunction::step(0.0, 1.0, std::f64::consts::FRAC_1_SQRT_2, -1.0, 1.0).unwrap();
    let ns: Vec<usize> = (2..=8).map(|k| 1usize << k).collect();
    let mut slopes = Vec::new();
    let mut rate_ok = true;
    for (r, f) in [(0.5, sqrt_surrogate(16)), (1.0, poly(&[0.0, 1.0]))] {
        let cert = RegularityCertificate::Holder { h: 1.0, r };
        let (mut lx, mut ly) = (Vec::new(), Vec::new());
        for &n in &ns {
            let part = Partition::uniform(0.0, 1.0, n).unwrap();
            let q = remainder_bound_holder(&f, &g, &u, &part, &cert).unwrap();
            lx.push(part.mesh().ln());
            ly.push(q.remainder_bound.ln());
        }
        let s = slope(&lx, &ly);
        rate_ok &= s >= r - 0.1;
        slopes.push((r, s));
    }
    let t = poly(&[0.0, 1.0]);
    let ad = adaptive_quadrature(&t, &t, &t, 1e-6, 1 << 16).unwrap();
    let ad_ok = within(ad.value, 1.0 / 3.0, 1e-6);
    let (s_uniform, _) = composite_s(&t, &t, &t, &Partition::uniform(0.0, 1.0, 4).unwrap()).unwrap();
    outcome(
        unsound == 0 && used == 500 && rate_ok && ad_ok,
        format!(
            "{used} random instances, {unsound} unsound; slopes (r, slope) {slopes:?}; adaptive {} with {} cells (S_4 = {s_uniform})",
            ad.value,
            ad.partition.n()
        ),
    )
}

fn c8_oracle() -> Outcome {
    let t = poly(&[0.0, 1.0]);
    let mixed = PiecewiseFunction::with_values(
        vec![0.0, 0.7, 1.0],
        vec![Poly::new([0.0, 0.0, 1.0]), Poly::new([1.0, 0.0, 1.0])],
        &BTreeMap::from([(1, 0.8)]),
    )
    .unwrap();
    let mut fixtures: Vec<(String, PiecewiseFunction, PiecewiseFunction, Option<f64>)> = vec![
        ("t dt^2".into(), t.clone(), poly(&[0.0, 0.0, 1.0]), Some(2.0 / 3.0)),
        ("t d(endpoint jumps)".into(), t.clone(), endpoint_jump(), Some(1.0)),
        (
            "t^2 d(step)".into(),
            poly(&[0.0, 0.0, 1.0]),
            PiecewiseFunction::step(0.0, 1.0, 0.5, 0.0, 1.0).unwrap(),
            Some(0.25),
        ),
        ("sign dt".into(), PiecewiseFunction::step(0.0, 1.0, 0.5, -1.0, 1.0).unwrap(), t.clone(), Some(0.0)),
        ("cubic d(smoothstep)".into(), poly(&[0.0, -1.0, 0.0, 1.0]), poly(&[0.0, 0.0, 3.0, -2.0]), None),
        ("step d(mixed)".into(), PiecewiseFunction::step(0.0, 1.0, 0.3, 2.0, -1.0).unwrap(), mixed, None),
        (
            "t d(endpoint jumps) on [-3, 7]".into(),
            PiecewiseFunction::identity(-3.0, 7.0).unwrap(),
            stieltjes_core::sharpness::endpoint_jump_integrator(-3.0, 7.0).unwrap(),
            Some(4.0),
        ),
    ];
    for trial in 0..3 {
        let mut rng = trial_rng(8, 3, trial);
        let (a, b) = verify::interval(&mut rng);
        fixtures.push((
            format!("random {trial}"),
            verify::piecewise(&mut rng, a, b, 3, false).unwrap(),
            verify::bounded_variation(&mut rng, a, b).unwrap(),
            None,
        ));
    }
    let mut bad = Vec::new();
    for (name, f, u, exact) in &fixtures {
        let (a, b) = (u.a(), u.b());
        let r = rs_integral(f, u, a, b).unwrap();
        let o = rs_oracle(f, u, a, b, 1 << 16).unwrap();
        let agrees = (r.value - o.value).abs() <= r.abs_error + o.abs_error;
        let exact_ok = exact.is_none_or(|e| (r.value - e).abs() <= r.abs_error.max(1e-15));
        if !(agrees && exact_ok) {
            bad.push(format!("{name}: {} vs oracle {} (±{})", r.value, o.value, o.abs_error));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} fixtures{}",
            fixtures.len(),
            if bad.is_empty() { String::new() } else { format!("; {}", bad.join("; ")) }
        ),
    )
}

fn battery() -> Vec<(i32, String)> {
    let t_t2 = r#"{"f": {"domain": [0, 1], "pieces": [{"coeffs": [0, 1]}]}, "g": {"domain": [0, 1], "pieces": [{"coeffs": [0, 1]}]}, "u": {"domain": [0, 1], "pieces": [{"coeffs": [0, 0, 1]}]}, "certificates": [{"kind": "bounds", "params": [0, 1]}, {"kind": "lipschitz", "params": [1]}]}"#;
    let commands: Vec<Vec<&str>> = vec![
        vec!["integrate", "--json", t_t2],
        vec!["cheby", "--json", t_t2],
        vec!["dfunc", "--json", t_t2],
        vec!["bound", "--theorem", "thm_2_1a", "--json", t_t2],
        vec!["bound", "--theorem", "thm_a_2", "--json", t_t2],
        vec!["quad", "--partition", "uniform:8", "--json", t_t2],
        vec!["quad", "--tol", "1e-4", "--json", t_t2],
        vec!["sharpness"],
        vec!["verify", "--theorem", "all", "--trials", "40", "--seed", "99"],
    ];
    commands
        .into_iter()
        .map(|args| {
            let out = run_with_seed_env(std::iter::once("stieltjes").chain(args), None);
            let mut v: Value = serde_json::from_str(&out.stdout).expect("report is JSON");
            v["timestamp"] = Value::from(0);
            (out.code, serde_json::to_string(&v).unwrap())
        })
        .collect()
}

fn c9_determinism() -> Outcome {
    let first = battery();
    let second = battery();
    let codes: Vec<i32> = first.iter().map(|(c, _)| *c).collect();
    let same = first == second;
    outcome(
        same && codes.iter().all(|&c| c == 0),
        format!("{} commands, exit codes {codes:?}, identical: {same}", first.len()),
    )
}

fn main() -> ExitCode {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("1 endpoint-jump witness", Some(Duration::from_secs(1)), c1_endpoint_witness),
        ("2 step and centered witnesses", None, c2_step_and_centered_witnesses),
        ("3 moment witnesses", None, c3_moment_witnesses),
        ("4 identity suite", Some(Duration::from_secs(10)), c4_identities),
        ("5 soundness battery", Some(Duration::from_secs(300)), c5_soundness_battery),
        ("6 positivity", None, c6_positivity),
        ("7 quadrature soundness and rate", None, c7_quadrature),
        ("8 oracle equivalence", None, c8_oracle),
        ("9 determinism", None, c9_determinism),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let o = timed(limit, run);
        if !o.pass {
            failed += 1;
        }
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
