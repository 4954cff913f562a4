//! `qint`: evaluate, differentiate and integrate functions of a quaternionic
//! variable, and run the verification suite.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error,
//! 3 verification failure.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qint_core::verify::{run_suite, Suite, SuiteReport, Tolerances, VerifyConfig};
use qint_core::{
    differential, eval_derivative, eval_function, integrate_with_branch_tracking, AnalyticFunction,
    Error, ErrorKind, IntegrationReport, Integrator, Path, Quaternion, Rule,
};

#[derive(Parser)]
#[command(name = "qint", version, about = "Calculus with functions of a quaternionic variable")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate F (or F′) at a point.
    Eval {
        #[command(flatten)]
        func: FunctionArg,
        /// Point as `[w, x1, x2, x3]`.
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        /// Print F′(x) instead of F(x).
        #[arg(long)]
        derivative: bool,
    },
    /// Apply the differential 𝒟F(x) to an increment.
    Diff {
        #[command(flatten)]
        func: FunctionArg,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: String,
    },
    /// Integrate 𝒟F along a path.
    Integrate(IntegrateArgs),
    /// Run the verification suite.
    Verify {
        #[arg(long, default_value = "default")]
        suite: String,
        /// Write the aggregate JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Tolerance override: a number or a JSON object (takes precedence over QINT_TOL).
        #[arg(long)]
        tol: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        steps: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Args)]
struct FunctionArg {
    /// Function: a name (exp, sin, cos, ln, reciprocal, x, x^N), a JSON spec, or @file.
    #[arg(long = "fn")]
    function: String,
}

#[derive(Args)]
struct IntegrateArgs {
    #[command(flatten)]
    func: FunctionArg,
    /// Path: a JSON spec or @file.
    #[arg(long)]
    path: String,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Evaluation point on each chord: left or midpoint.
    #[arg(long, default_value = "left")]
    rule: String,
    /// Comma-separated ascending step counts for a convergence study.
    #[arg(long, value_delimiter = ',')]
    study: Option<Vec<usize>>,
    /// Follow ln continuously along a path inside one slice.
    #[arg(long)]
    branch_track: bool,
    /// Use finite-difference slice quadrature instead of the staircase.
    #[arg(long, conflicts_with = "branch_track")]
    slice_quadrature: bool,
    /// Write rows as CSV, or the full report as JSON when the name ends in `.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

enum Failure {
    Usage(String),
    Domain(String),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e.kind() {
            ErrorKind::Invalid => Failure::Usage(e.to_string()),
            _ => Failure::Domain(e.to_string()),
        }
    }
}

fn io_failure(what: &str, e: impl std::fmt::Display) -> Failure {
    Failure::Usage(format!("{what}: {e}"))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verification) => ExitCode::from(3),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Eval { func, at, derivative } => {
            let f = load_function(&func.function)?;
            let x = parse_quaternion(&at)?;
            let v = if derivative { eval_derivative(&f, x)? } else { eval_function(&f, x)? };
            println!("{v}");
        }
        Command::Diff { func, at, delta } => {
            let f = load_function(&func.function)?;
            let v = differential(&f, parse_quaternion(&at)?, parse_quaternion(&delta)?)?;
            println!("{v}");
        }
        Command::Integrate(args) => integrate_cmd(args)?,
        Command::Verify {
            suite,
            out,
            tol,
            steps,
            threads,
        } => {
            let suite: Suite = suite.parse()?;
            let tolerances = match tol {
                Some(t) => Tolerances::parse_override(&t)?,
                None => Tolerances::from_env()?,
            };
            let cfg = VerifyConfig {
                tolerances,
                steps,
                threads: threads.max(1),
                ..VerifyConfig::default()
            };
            let checks = run_suite(suite, &cfg);
            let report = SuiteReport::new(suite, &cfg, checks);
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            for c in &report.checks {
                let line = serde_json::to_string(c).map_err(|e| io_failure("serialize", e))?;
                writeln!(lock, "{line}").map_err(|e| io_failure("stdout", e))?;
            }
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            eprintln!(
                "{} checks, {} passed, {} failed",
                report.checks.len(),
                report.checks.len() - failed,
                failed
            );
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&report).map_err(|e| io_failure("serialize", e))?;
                fs::write(&path, text).map_err(|e| io_failure(&path.display().to_string(), e))?;
            }
            if !report.pass {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn integrate_cmd(args: IntegrateArgs) -> Result<(), Failure> {
    let f = load_function(&args.func.function)?;
    let path: Path = Path::parse(&read_spec(&args.path)?)?;
    let rule: Rule = args.rule.parse()?;
    let integrator = Integrator::new(rule).with_threads(args.threads);

    let report: IntegrationReport = if args.branch_track {
        integrate_with_branch_tracking(&f, &path, args.steps)?
    } else if let Some(ns) = &args.study {
        integrator.convergence_study(&f, &path, ns)?
    } else if args.slice_quadrature {
        integrator.slice_quadrature(&f, &path, args.steps)?
    } else {
        integrator.integrate(&f, &path, args.steps)?
    };

    println!("{}", report.value);
    if let Some(r) = report.reference {
        eprintln!("reference F(x_b) - F(x_a) = {r}");
    }
    if let Some(e) = report.abs_error {
        eprintln!("abs_error = {e:.3e}");
    }
    if let Some(o) = report.est_order {
        eprintln!("est_order = {o:.4}");
    }

    if let Some(out) = &args.out {
        let is_json = out.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            let text = serde_json::to_string_pretty(&report).map_err(|e| io_failure("serialize", e))?;
            fs::write(out, text).map_err(|e| io_failure(&out.display().to_string(), e))?;
        } else {
            write_csv(out, &report).map_err(|e| io_failure(&out.display().to_string(), e))?;
        }
    }
    Ok(())
}

fn write_csv(out: &std::path::Path, report: &IntegrationReport) -> Result<(), Box<dyn std::error::Error>> {
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(["N", "value_w", "value_x1", "value_x2", "value_x3", "abs_error", "est_order"])?;
    let num = |v: f64| format!("{v:.16e}");
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let rows: Vec<(usize, Quaternion, Option<f64>)> = if report.rows.is_empty() {
        vec![(report.steps, report.value, report.abs_error)]
    } else {
        report.rows.iter().map(|r| (r.steps, r.value, r.abs_error)).collect()
    };
    for (n, v, err) in rows {
        w.write_record([
            n.to_string(),
            num(v.w),
            num(v.x1),
            num(v.x2),
            num(v.x3),
            opt(err),
            opt(report.est_order),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Inline text, or the contents of a file when prefixed with `@`.
fn read_spec(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(file) => fs::read_to_string(file).map_err(|e| io_failure(file, e)),
        None => Ok(arg.to_string()),
    }
}

fn load_function(arg: &str) -> Result<AnalyticFunction, Failure> {
    Ok(AnalyticFunction::parse(&read_spec(arg)?)?)
}

fn parse_quaternion(text: &str) -> Result<Quaternion, Failure> {
    serde_json::from_str(text.trim())
        .map_err(|e| Failure::Usage(format!("expected a point as [w, x1, x2, x3]: {e}")))
}
