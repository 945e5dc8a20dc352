//! `msolab`: build operators, run membership checks, recover symbols and run
//! the seeded suites. Every payload is JSON.
//!
//! Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 invalid input.

use std::fs;
use std::io::{self, Read};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use msolab::characterize::{
    check_adtto, check_block_conditions, default_tolerance, is_analytic_adtto, recover_symbol,
    shift_invariance_defect,
};
use msolab::operators::{build_dtto, build_tto};
use msolab::suite::{run_suite, SuiteConfig, DEFAULT_SEED};
use msolab::{
    BlaschkeProduct, BlockOperator, DefectReport, DenseComplexMatrix, Error, LaurentPolynomial,
    RecoveryMethod, SuiteName, SymbolFunction,
};

#[derive(Parser)]
#[command(
    name = "msolab",
    version,
    about = "Truncated and dual truncated Toeplitz operators on model spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an operator and dump it as JSON.
    Build {
        #[arg(value_enum)]
        kind: Kind,
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Run membership checks on an operator JSON file (`-` reads stdin).
    Check {
        input: String,
        /// Comma-separated subset of shift, blocks, adtto, analytic.
        #[arg(long, value_enum, value_delimiter = ',')]
        checks: Vec<CheckKind>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Recover the symbol of a block operator JSON file (`-` reads stdin).
    Recover {
        input: String,
        #[arg(long, default_value = "boundary")]
        method: RecoveryMethod,
        /// Largest residual accepted; defaults by inner-function zero moduli.
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Run a seeded suite: acceptance, fuzz or convergence.
    Suite {
        name: SuiteName,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tto,
    Dtto,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum CheckKind {
    Shift,
    Blocks,
    Adtto,
    Analytic,
}

#[derive(Args)]
struct Inputs {
    /// Inner function: `z`, `z^m` or `{"zeros": [[re, im], ...], "constant": [re, im]}`.
    #[arg(long)]
    theta: Option<String>,
    /// Inner function of the codomain; defaults to theta.
    #[arg(long)]
    alpha: Option<String>,
    /// Symbol as `{"coeffs": [[k, re, im], ...]}`.
    #[arg(long)]
    symbol: Option<String>,
    /// Truncation depth of the dual sections.
    #[arg(long = "M", id = "M")]
    m: Option<usize>,
}

#[derive(Args)]
struct Output {
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failures that map to exit code 2.
struct InputError(String);

impl From<Error> for InputError {
    fn from(e: Error) -> Self {
        Self(e.to_string())
    }
}

type CliResult<T> = Result<T, InputError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> CliResult<bool> {
    match command {
        Command::Build {
            kind,
            inputs,
            output,
        } => {
            let theta = inner_or_default(inputs.theta.as_deref())?;
            let alpha = match inputs.alpha.as_deref() {
                Some(s) => BlaschkeProduct::parse_spec(s)?,
                None => theta.clone(),
            };
            let phi = SymbolFunction::new(symbol_or_default(inputs.symbol.as_deref())?);
            match kind {
                Kind::Tto => emit(&output, &build_tto(&theta, &alpha, &phi))?,
                Kind::Dtto => {
                    let m = inputs
                        .m
                        .unwrap_or(phi.degree() + theta.guard() + alpha.guard() + 6);
                    emit(&output, &build_dtto(&theta, &alpha, &phi, m)?)?
                }
            }
            Ok(true)
        }
        Command::Check {
            input,
            checks,
            tol,
            output,
        } => {
            check_positive(tol)?;
            let report = match read_operator(&input)? {
                Operator::Block(d) => check_block(&d, &checks, tol)?,
                Operator::Dense(a) => check_dense(&a, &checks, tol)?,
            };
            emit(&output, &report)?;
            Ok(report.pass)
        }
        Command::Recover {
            input,
            method,
            tol,
            output,
        } => {
            check_positive(tol)?;
            let Operator::Block(d) = read_operator(&input)? else {
                return Err(InputError("symbol recovery needs a block operator".into()));
            };
            let recovery = recover_symbol(&d, method)?;
            let tolerance = tol.unwrap_or_else(|| default_tolerance(&d.theta, &d.alpha));
            let pass = recovery.residual <= tolerance;
            emit(
                &output,
                &RecoverReport {
                    method,
                    symbol: recovery.symbol,
                    residual: recovery.residual,
                    tolerance,
                    pass,
                },
            )?;
            Ok(pass)
        }
        Command::Suite {
            name,
            inputs,
            tol,
            seed,
            output,
        } => {
            let config = SuiteConfig {
                theta: inputs
                    .theta
                    .as_deref()
                    .map(BlaschkeProduct::parse_spec)
                    .transpose()?,
                alpha: inputs
                    .alpha
                    .as_deref()
                    .map(BlaschkeProduct::parse_spec)
                    .transpose()?,
                symbol: inputs.symbol.as_deref().map(parse_symbol).transpose()?,
                m: inputs.m,
                tol,
                seed,
            };
            let report = run_suite(name, &config)?;
            for c in &report.criteria {
                eprintln!("{}", c.summary_line());
            }
            emit(&output, &report)?;
            Ok(report.pass)
        }
    }
}

#[derive(Serialize)]
struct CheckReport {
    operator: &'static str,
    pass: bool,
    reports: Vec<DefectReport>,
}

impl CheckReport {
    fn new(operator: &'static str, reports: Vec<DefectReport>) -> Self {
        Self {
            operator,
            pass: reports.iter().all(|r| r.pass),
            reports,
        }
    }
}

#[derive(Serialize)]
struct RecoverReport {
    method: RecoveryMethod,
    symbol: SymbolFunction,
    residual: f64,
    tolerance: f64,
    pass: bool,
}

enum Operator {
    Block(BlockOperator),
    Dense(DenseComplexMatrix),
}

fn check_block(
    d: &BlockOperator,
    checks: &[CheckKind],
    tol: Option<f64>,
) -> CliResult<CheckReport> {
    let checks = if checks.is_empty() {
        &[CheckKind::Adtto][..]
    } else {
        checks
    };
    let mut reports = Vec::new();
    for kind in checks {
        match kind {
            CheckKind::Shift => reports.push(shift_invariance_defect(d, tol)?),
            CheckKind::Blocks => reports.extend(check_block_conditions(d, tol)?),
            CheckKind::Adtto => reports.extend(check_adtto(d, tol)?.conditions),
            CheckKind::Analytic => reports.push(is_analytic_adtto(d)?),
        }
    }
    Ok(CheckReport::new("block", reports))
}

fn check_dense(
    a: &DenseComplexMatrix,
    checks: &[CheckKind],
    tol: Option<f64>,
) -> CliResult<CheckReport> {
    if checks.iter().any(|c| *c != CheckKind::Shift) {
        return Err(InputError(
            "only the shift check applies to operators between model spaces".into(),
        ));
    }
    Ok(CheckReport::new(
        "dense",
        vec![shift_invariance_defect(a, tol)?],
    ))
}

fn check_positive(tol: Option<f64>) -> CliResult<()> {
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            Err(InputError(format!("tolerance must be positive, got {t}")))
        }
        _ => Ok(()),
    }
}

fn inner_or_default(spec: Option<&str>) -> CliResult<BlaschkeProduct> {
    Ok(BlaschkeProduct::parse_spec(spec.unwrap_or("z^2"))?)
}

fn symbol_or_default(spec: Option<&str>) -> CliResult<LaurentPolynomial> {
    spec.map_or_else(|| Ok(LaurentPolynomial::one()), parse_symbol)
}

fn parse_symbol(spec: &str) -> CliResult<LaurentPolynomial> {
    serde_json::from_str(spec).map_err(|e| InputError(format!("symbol JSON: {e}")))
}

fn read_operator(input: &str) -> CliResult<Operator> {
    let text = if input == "-" {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| InputError(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(input).map_err(|e| InputError(format!("{input}: {e}")))?
    };
    let value: Value =
        serde_json::from_str(&text).map_err(|e| InputError(format!("operator JSON: {e}")))?;
    let parsed = if value.get("blocks").is_some() {
        serde_json::from_value(value).map(Operator::Block)
    } else if value.get("entries").is_some() {
        serde_json::from_value(value).map(Operator::Dense)
    } else {
        return Err(InputError(
            "operator JSON needs a \"blocks\" or \"entries\" field".into(),
        ));
    };
    parsed.map_err(|e| InputError(format!("operator JSON: {e}")))
}

fn emit<T: Serialize>(output: &Output, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| InputError(e.to_string()))?;
    text.push('\n');
    match &output.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
