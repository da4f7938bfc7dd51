//! The `stieltjes` command line: argument parsing, subcommands and the JSON
//! report written to standard output.

mod report;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

pub use report::{digest, ErrorObject, ReportDocument, TOOL, VERSION};

use crate::bounds::{evaluate, TheoremId};
use crate::document::InputDocument;
use crate::error::{Error, Result};
use crate::funcrep::{PiecewiseFunction, RegularityCertificate};
use crate::functionals::{cheby_T, functional_D, functional_E, identity_residual_D, kernel_forms_D};
use crate::par::Mode;
use crate::quadrature::{
    adaptive_quadrature, convergence_table, remainder_bound_holder, remainder_bound_osc, Partition,
};
use crate::sharpness::sharpness_table;
use crate::stieltjes::{riemann_integral, rs_integral};
use crate::verify::verify_with;

/// Environment variable that overrides `--seed`.
pub const SEED_ENV: &str = "STIELTJES_SEED";

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "stieltjes",
    version,
    about = "Certified Riemann-Stieltjes integrals, Cebysev functionals and Gruss-type bounds"
)]
struct Cli {
    /// seed for randomized commands (overridden by STIELTJES_SEED)
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Input {
    /// JSON input document
    #[arg(long, conflicts_with = "json")]
    input: Option<PathBuf>,
    /// inline JSON input document
    #[arg(long)]
    json: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// ∫ f du over [lo, hi] (the domain by default); ∫ f dt without `u`
    Integrate {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        lo: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        hi: Option<f64>,
    },
    /// T(f,g;u), or the weighted E(f,g;w) when only `w` is given
    Cheby {
        #[command(flatten)]
        input: Input,
    },
    /// D(f;u) with its three kernel forms
    Dfunc {
        #[command(flatten)]
        input: Input,
    },
    /// evaluates one bound
    Bound {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        theorem: String,
        /// exponent of the L^p branches
        #[arg(long)]
        p: Option<f64>,
        /// point of the Ostrowski bounds
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
    },
    /// composite rule for ∫ f g du with its remainder bounds
    Quad {
        #[command(flatten)]
        input: Input,
        /// `uniform:<n>` or `points:<t0>,<t1>,...`
        #[arg(long)]
        partition: Option<String>,
        /// run the adaptive rule to this tolerance instead
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 4096)]
        max_cells: usize,
        /// uniform cell counts for a convergence table
        #[arg(long, value_delimiter = ',')]
        convergence: Vec<usize>,
        /// write the convergence table as CSV
        #[arg(long, requires = "convergence")]
        csv: Option<PathBuf>,
    },
    /// the table of extremal inputs and their ratios
    Sharpness {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// randomized soundness check of one bound or of `all`
    Verify {
        #[arg(long, default_value = "all")]
        theorem: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// include every per-trial report
        #[arg(long)]
        reports: bool,
        #[arg(long)]
        sequential: bool,
    },
}

/// Exit code and the text destined for standard output and error.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Runs `argv` (program name first) with the seed override taken from the
/// environment.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    run_with_seed_env(argv, std::env::var(SEED_ENV).ok())
}

pub fn run_with_seed_env<I, T>(argv: I, seed_env: Option<String>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    Outcome { code: EXIT_OK, stdout: text, stderr: String::new() }
                }
                _ => Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: text },
            };
        }
    };
    let command = argv.iter().skip(1).cloned().collect();
    let seed = match seed_env.as_deref().map(str::parse::<u64>) {
        Some(Ok(s)) => Some(s),
        Some(Err(e)) => {
            return Outcome { code: EXIT_ERROR, stdout: String::new(), stderr: format!("{SEED_ENV}: {e}\n") };
        }
        None => cli.seed,
    };
    execute(cli.command, command, seed)
}

struct Success {
    results: Value,
    canonical_input: String,
    seed: Option<u64>,
    violation: Option<String>,
}

fn execute(cmd: Command, command: Vec<String>, seed: Option<u64>) -> Outcome {
    let seed_used = match &cmd {
        Command::Verify { .. } => Some(seed.unwrap_or(0)),
        _ => seed,
    };
    match dispatch(cmd, seed_used) {
        Ok(s) => {
            let mut doc = ReportDocument::new(command, s.seed, &s.canonical_input);
            doc.results = Some(s.results);
            let (code, stderr) = match s.violation {
                Some(msg) => (EXIT_VIOLATION, msg),
                None => (EXIT_OK, String::new()),
            };
            Outcome { code, stdout: doc.to_json() + "\n", stderr }
        }
        Err((e, canonical_input)) => {
            let mut doc = ReportDocument::new(command, seed_used, &canonical_input);
            doc.error = Some(ErrorObject::from(&e));
            Outcome { code: EXIT_ERROR, stdout: doc.to_json() + "\n", stderr: format!("error: {e}\n") }
        }
    }
}

fn load(input: &Input) -> Result<InputDocument> {
    let text = match (&input.input, &input.json) {
        (Some(path), _) => std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidFunction(format!("cannot read {}: {e}", path.display())))?,
        (None, Some(text)) => text.clone(),
        (None, None) => return Err(Error::InvalidFunction("pass --input <path> or --json <document>".into())),
    };
    InputDocument::parse(&text)
}

fn canonical(doc: &InputDocument) -> String {
    serde_json::to_string(doc).expect("input serializes")
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn dispatch(cmd: Command, seed: Option<u64>) -> std::result::Result<Success, (Error, String)> {
    let input = match &cmd {
        Command::Integrate { input, .. }
        | Command::Cheby { input }
        | Command::Dfunc { input }
        | Command::Bound { input, .. }
        | Command::Quad { input, .. } => Some(load(input).map_err(|e| (e, String::new()))?),
        _ => None,
    };
    let canonical_input = input.as_ref().map(canonical).unwrap_or_else(|| "{}".to_string());
    let ok = |results| Success { results, canonical_input: canonical_input.clone(), seed, violation: None };
    let fail = |e| (e, canonical_input.clone());
    let doc = input.unwrap_or_default();
    match cmd {
        Command::Integrate { lo, hi, .. } => integrate(&doc, lo, hi).map(ok).map_err(fail),
        Command::Cheby { .. } => cheby(&doc).map(ok).map_err(fail),
        Command::Dfunc { .. } => dfunc(&doc).map(ok).map_err(fail),
        Command::Bound { theorem, p, x, .. } => bound(&doc, &theorem, p, x).map(ok).map_err(fail),
        Command::Quad { partition, tol, max_cells, convergence, csv, .. } => {
            quad(&doc, partition.as_deref(), tol, max_cells, &convergence, csv.as_ref()).map(ok).map_err(fail)
        }
        Command::Sharpness { lo, hi, csv } => sharpness(lo, hi, csv.as_ref()).map(ok).map_err(fail),
        Command::Verify { theorem, trials, reports, sequential } => {
            let mode = if sequential { Mode::Sequential } else { Mode::default() };
            let (results, violation) = verify(&theorem, trials, seed.unwrap_or(0), reports, mode).map_err(fail)?;
            Ok(Success { results, canonical_input, seed, violation })
        }
    }
}

fn integrate(doc: &InputDocument, lo: Option<f64>, hi: Option<f64>) -> Result<Value> {
    let f = doc.require("f")?;
    let u = doc.function("u")?;
    let dom = u.as_ref().unwrap_or(&f);
    let (c, d) = (lo.unwrap_or(dom.a()), hi.unwrap_or(dom.b()));
    let r = match &u {
        Some(u) => rs_integral(&f, u, c, d)?,
        None => riemann_integral(&f, c, d)?,
    };
    Ok(json!({"interval": [c, d], "value": r.value, "abs_error": r.abs_error, "method": r.method}))
}

fn cheby(doc: &InputDocument) -> Result<Value> {
    let (f, g) = (doc.require("f")?, doc.require("g")?);
    match (doc.function("u")?, doc.function("w")?) {
        (Some(u), _) => Ok(json!({"functional": "T", "result": cheby_T(&f, &g, &u)?})),
        (None, Some(w)) => Ok(json!({"functional": "E", "result": functional_E(&f, &g, &w)?})),
        (None, None) => Err(Error::InvalidFunction("cheby needs an integrator `u` or a weight `w`".into())),
    }
}

fn dfunc(doc: &InputDocument) -> Result<Value> {
    let (f, u) = (doc.require("f")?, doc.require("u")?);
    let d = functional_D(&f, &u)?;
    let [phi, gamma, delta] = kernel_forms_D(&f, &u)?;
    Ok(json!({
        "result": d,
        "kernel_forms": {"phi": phi, "gamma": gamma, "delta": delta},
        "identity_residual": identity_residual_D(&f, &u)?,
    }))
}

fn bound(doc: &InputDocument, theorem: &str, p: Option<f64>, x: Option<f64>) -> Result<Value> {
    let id: TheoremId = theorem.parse()?;
    let mut inp = doc.bound_inputs()?;
    inp.p = p.or(inp.p);
    inp.x = x.or(inp.x);
    Ok(to_value(&evaluate(id, &inp)?))
}

fn parse_partition(spec: &str, f: &PiecewiseFunction) -> Result<Partition> {
    let bad = || Error::Domain(format!("partition `{spec}`: expected uniform:<n> or points:<t0>,<t1>,..."));
    match spec.split_once(':') {
        Some(("uniform", n)) => Partition::uniform(f.a(), f.b(), n.trim().parse().map_err(|_| bad())?),
        Some(("points", list)) => {
            let pts =
                list.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect::<Result<Vec<_>>>()?;
            Partition::new(pts)
        }
        _ => Err(bad()),
    }
}

fn quad(
    doc: &InputDocument,
    partition: Option<&str>,
    tol: Option<f64>,
    max_cells: usize,
    convergence: &[usize],
    csv: Option<&PathBuf>,
) -> Result<Value> {
    let (f, u) = (doc.require("f")?, doc.require("u")?);
    let g = match doc.function("g")? {
        Some(g) => g,
        None => PiecewiseFunction::constant(u.a(), u.b(), 1.0)?,
    };
    let mut out = serde_json::Map::new();
    if let Some(tol) = tol {
        out.insert("method".into(), json!("adaptive"));
        out.insert("result".into(), to_value(&adaptive_quadrature(&f, &g, &u, tol, max_cells)?));
    } else {
        let part = parse_partition(partition.unwrap_or("uniform:16"), &u)?;
        out.insert("method".into(), json!("composite"));
        out.insert("result".into(), to_value(&remainder_bound_osc(&f, &g, &u, &part)?));
        let holder = doc
            .certificates_for("f")?
            .into_iter()
            .find(|c| matches!(c, RegularityCertificate::Holder { .. } | RegularityCertificate::Lipschitz { .. }));
        if let Some(cert) = holder {
            out.insert("holder".into(), to_value(&remainder_bound_holder(&f, &g, &u, &part, &cert)?));
        }
    }
    if !convergence.is_empty() {
        let rows = convergence_table(&f, &g, &u, convergence)?;
        if let Some(path) = csv {
            let mut text = String::from("n,mesh,bound,tight_bound,true_error\n");
            for r in &rows {
                let _ = writeln!(text, "{},{},{},{},{}", r.n, r.mesh, r.bound, r.tight_bound, r.true_error);
            }
            write_file(path, &text)?;
        }
        out.insert("convergence".into(), to_value(&rows));
    }
    Ok(Value::Object(out))
}

fn write_file(path: &PathBuf, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Domain(format!("cannot write {}: {e}", path.display())))
}

fn sharpness(lo: f64, hi: f64, csv: Option<&PathBuf>) -> Result<Value> {
    let rows = sharpness_table(lo, hi)?;
    if let Some(path) = csv {
        let mut text = String::from("id,theorem_id,lhs,rhs,ratio,expected,pass\n");
        for r in &rows {
            let _ =
                writeln!(text, "{},{},{},{},{},{},{}", r.id, r.theorem_id, r.lhs, r.rhs, r.ratio, r.expected, r.pass);
        }
        write_file(path, &text)?;
    }
    let all_pass = rows.iter().all(|r| r.pass);
    Ok(json!({"interval": [lo, hi], "rows": rows, "all_pass": all_pass}))
}

fn verify(theorem: &str, trials: usize, seed: u64, with_reports: bool, mode: Mode) -> Result<(Value, Option<String>)> {
    let ids: Vec<TheoremId> = if theorem == "all" { TheoremId::ALL.to_vec() } else { vec![theorem.parse()?] };
    let mut summaries = Vec::new();
    let mut reports = serde_json::Map::new();
    let mut violations = 0;
    let mut first = None;
    for id in ids {
        let run = verify_with(mode, id, trials, seed)?;
        violations += run.summary.violations;
        if first.is_none() {
            first = run.summary.reproducer.clone();
        }
        if with_reports {
            reports.insert(id.to_string(), to_value(&run.reports));
        }
        summaries.push(run.summary);
    }
    let mut out = json!({"trials": trials, "violations": violations, "summaries": summaries});
    if with_reports {
        out["reports"] = Value::Object(reports);
    }
    let violation = first.map(|r| {
        format!(
            "violation: {} trial {} (seed {seed}); reproducer:\n{}\n",
            r.theorem_id,
            r.trial,
            serde_json::to_string_pretty(&r).expect("reproducer serializes")
        )
    });
    Ok((out, violation))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> Outcome {
        run_with_seed_env(std::iter::once("stieltjes").chain(args.iter().copied()), None)
    }

    fn results(o: &Outcome) -> Value {
        let doc: ReportDocument = serde_json::from_str(&o.stdout).unwrap();
        doc.results.unwrap()
    }

    #[test]
    fn integrate_t_against_t_squared() {
        let o = run_args(&[
            "integrate",
            "--json",
            r#"{"f": {"domain": [0, 1], "pieces": [{"coeffs": [0, 1]}]}, "u": {"domain": [0, 1], "pieces": [{"coeffs": [0, 0, 1]}]}}"#,
        ]);
        assert_eq!(o.code, EXIT_OK, "{}", o.stderr);
        let r = results(&o);
        assert_eq!(r["value"].as_f64().unwrap(), 0.6666666666666666);
        assert!(r["abs_error"].as_f64().unwrap() <= 1e-12);
    }

    #[test]
    fn errors_are_structured() {
        let o = run_args(&["integrate", "--json", r#"{"f": {"domain": [0, 1], "pieces": []}}"#]);
        assert_eq!(o.code, EXIT_ERROR);
        let doc: ReportDocument = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(doc.error.unwrap().kind, "invalid_function");
        let o = run_args(&[
            "bound",
            "--theorem",
            "thm_9",
            "--json",
            r#"{"f": {"domain": [0, 1], "pieces": [{"coeffs": [1]}]}}"#,
        ]);
        assert_eq!(o.code, EXIT_ERROR);
        assert!(o.stdout.contains("unknown_theorem"));
        assert_eq!(run_args(&["frobnicate"]).code, EXIT_ERROR);
        assert_eq!(run_args(&["--help"]).code, EXIT_OK);
    }

    #[test]
    fn seed_environment_overrides_flag() {
        let argv = ["stieltjes", "verify", "--theorem", "thm_b_1", "--trials", "3", "--seed", "5"];
        let o = run_with_seed_env(argv, Some("9".into()));
        let doc: ReportDocument = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(doc.seed, Some(9));
        assert_eq!(run_with_seed_env(argv, Some("x".into())).code, EXIT_ERROR);
    }
}
