//! `gvc`: command-line front end for the vanishing engine.
//!
//! Exit codes: 0 success, 1 falsification with witness, 2 input error,
//! 3 engine precondition or form failure.

mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gvc_core::diffop::DiffOpError;
use gvc_core::dsl::{format_poly, parse_phi, parse_poly};
use gvc_core::gvc::{
    certify, check_conclusion, check_hypothesis, classify_kernel, counterexample_search,
    eq1_residual, eq2_leading_difference, eq2_value, kernel_element, SearchConfig,
};
use gvc_core::{GvcError, PhiSpec, Polynomial, Ring};
use serde::Serialize;

use output::{Emitter, Failure};

#[derive(Debug, Parser)]
#[command(
    name = "gvc",
    version,
    about = "Exact checks of Lambda^m(P^m Q) = 0 for Lambda = (Dx - Phi(Dy)) Dy"
)]
struct Cli {
    /// Print a JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Default output mode when --json is not given.
    #[arg(long, global = true, env = "GVC_OUTPUT", value_enum, default_value_t = OutputMode::Text)]
    output: OutputMode,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OutputMode {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the hypothesis Lambda^m(P^m) = 0 and the conclusion for Q up to m_max.
    Check(CheckArgs),
    /// Derive a threshold m* with Lambda^m(P^m Q) = 0 for all m >= m*.
    Certify(CertifyArgs),
    /// Print exp(x Phi(Dy)) (f(x) + g(y)).
    Kernel(KernelArgs),
    /// Decompose P in the kernel of Lambda as exp(x Phi(Dy)) (f + g).
    Classify(ClassifyArgs),
    /// Closed-form coefficient oracles.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Enumerate or sample small P and look for failures of the certified bound.
    Search(SearchArgs),
}

#[derive(Debug, Subcommand)]
enum OracleCommand {
    /// Compare the x = 0 slice of Lambda^2(P^2) with its closed form.
    Eq1(KernelArgs),
    /// Evaluate (4r)! r! r! - 6 (3r)! (2r)! r! + 6 ((2r)!)^3.
    Eq2(Eq2Args),
}

#[derive(Debug, Args)]
struct PhiArg {
    /// Phi as a polynomial in t, e.g. "t^2 - 3*t".
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    phi: PhiArg,
    /// P as a polynomial in x, y.
    #[arg(long = "P", allow_hyphen_values = true)]
    p: Option<String>,
    /// Q as a polynomial in x, y.
    #[arg(long = "Q", default_value = "1", allow_hyphen_values = true)]
    q: String,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    m_max: u32,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    #[command(flatten)]
    phi: PhiArg,
    #[arg(long = "P", allow_hyphen_values = true)]
    p: Option<String>,
    #[arg(long = "Q", default_value = "1", allow_hyphen_values = true)]
    q: String,
    /// Number of extra m values recomputed above m*.
    #[arg(long, default_value_t = 5)]
    m_verify: u32,
}

#[derive(Debug, Args)]
struct KernelArgs {
    #[command(flatten)]
    phi: PhiArg,
    /// f as a polynomial in x.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    f: String,
    /// g as a polynomial in y.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    g: String,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    #[command(flatten)]
    phi: PhiArg,
    #[arg(long = "P", allow_hyphen_values = true)]
    p: Option<String>,
}

#[derive(Debug, Args)]
struct Eq2Args {
    #[arg(long)]
    r: u32,
}

#[derive(Debug, Args)]
struct SearchArgs {
    #[command(flatten)]
    phi: PhiArg,
    #[arg(long, default_value_t = 2)]
    max_deg_x: u32,
    #[arg(long, default_value_t = 2)]
    max_deg_y: u32,
    /// Coefficient pool, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "-1,0,1"
    )]
    pool: Vec<i64>,
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u32).range(1..))]
    m_max: u32,
    /// Sample this many candidates instead of enumerating the whole box.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Effective configuration, echoed in JSON output.
#[derive(Debug, Default, Serialize)]
struct RunConfig {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<String>,
    #[serde(rename = "P", skip_serializing_if = "Option::is_none")]
    p: Option<String>,
    #[serde(rename = "Q", skip_serializing_if = "Option::is_none")]
    q: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    f: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_max: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    m_verify: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_deg_x: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_deg_y: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pool: Option<Vec<i64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    output: OutputMode,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mode = if cli.json {
        OutputMode::Json
    } else {
        cli.output
    };
    let (config, result) = run(cli.command, mode);
    Emitter::new(mode).finish(&config, result)
}

type Outcome = Result<output::Report, Failure>;

fn run(command: Command, mode: OutputMode) -> (RunConfig, Outcome) {
    match command {
        Command::Check(a) => {
            let config = RunConfig {
                command: "check",
                phi: a.phi.phi.clone(),
                p: a.p.clone(),
                q: Some(a.q.clone()),
                m_max: Some(a.m_max),
                output: mode,
                ..RunConfig::default()
            };
            (config, cmd_check(&a))
        }
        Command::Certify(a) => {
            let config = RunConfig {
                command: "certify",
                phi: a.phi.phi.clone(),
                p: a.p.clone(),
                q: Some(a.q.clone()),
                m_verify: Some(a.m_verify),
                output: mode,
                ..RunConfig::default()
            };
            (config, cmd_certify(&a))
        }
        Command::Kernel(a) => {
            let config = RunConfig {
                command: "kernel",
                phi: a.phi.phi.clone(),
                f: Some(a.f.clone()),
                g: Some(a.g.clone()),
                output: mode,
                ..RunConfig::default()
            };
            (config, cmd_kernel(&a))
        }
        Command::Classify(a) => {
            let config = RunConfig {
                command: "classify",
                phi: a.phi.phi.clone(),
                p: a.p.clone(),
                output: mode,
                ..RunConfig::default()
            };
            (config, cmd_classify(&a))
        }
        Command::Oracle(OracleCommand::Eq1(a)) => {
            let config = RunConfig {
                command: "oracle eq1",
                phi: a.phi.phi.clone(),
                f: Some(a.f.clone()),
                g: Some(a.g.clone()),
                output: mode,
                ..RunConfig::default()
            };
            (config, cmd_eq1(&a))
        }
        Command::Oracle(OracleCommand::Eq2(a)) => {
            let config = RunConfig {
                command: "oracle eq2",
                r: Some(a.r),
                output: mode,
                ..RunConfig::default()
            };
            (config, Ok(cmd_eq2(&a)))
        }
        Command::Search(a) => {
            let config = RunConfig {
                command: "search",
                phi: a.phi.phi.clone(),
                m_max: Some(a.m_max),
                max_deg_x: Some(a.max_deg_x),
                max_deg_y: Some(a.max_deg_y),
                pool: Some(a.pool.clone()),
                samples: a.samples,
                seed: Some(a.seed),
                output: mode,
                ..RunConfig::default()
            };
            (config, cmd_search(&a))
        }
    }
}

fn input_phi(arg: &PhiArg) -> Result<PhiSpec, Failure> {
    let text = arg.phi.as_deref().ok_or_else(|| Failure::missing("phi"))?;
    parse_phi(text).map_err(|e| Failure::parse("phi", text, e))
}

fn input_poly(field: &'static str, text: Option<&str>) -> Result<Polynomial, Failure> {
    let text = text.ok_or_else(|| Failure::missing(field))?;
    parse_poly(text, &Ring::xy()).map_err(|e| Failure::parse(field, text, e))
}

fn cmd_check(a: &CheckArgs) -> Outcome {
    let phi = input_phi(&a.phi)?;
    let p = input_poly("P", a.p.as_deref())?;
    let q = input_poly("Q", Some(&a.q))?;
    let hypothesis = check_hypothesis(&phi, &p, a.m_max).map_err(Failure::engine)?;
    let conclusion = check_conclusion(&phi, &p, &q, a.m_max).map_err(Failure::engine)?;
    Ok(output::check_report(hypothesis, conclusion))
}

fn cmd_certify(a: &CertifyArgs) -> Outcome {
    let phi = input_phi(&a.phi)?;
    let p = input_poly("P", a.p.as_deref())?;
    let q = input_poly("Q", Some(&a.q))?;
    let cert = certify(&phi, &p, &q, a.m_verify).map_err(Failure::engine)?;
    Ok(output::certificate_report(cert))
}

fn kernel_inputs(a: &KernelArgs) -> Result<(PhiSpec, Polynomial, Polynomial), Failure> {
    let phi = input_phi(&a.phi)?;
    let f = input_poly("f", Some(&a.f))?;
    let g = input_poly("g", Some(&a.g))?;
    Ok((phi, f, g))
}

fn cmd_kernel(a: &KernelArgs) -> Outcome {
    let (phi, f, g) = kernel_inputs(a)?;
    let p = kernel_element(&phi, &f, &g).map_err(Failure::engine)?;
    Ok(output::Report::single("P", format_poly(&p)))
}

fn cmd_classify(a: &ClassifyArgs) -> Outcome {
    let phi = input_phi(&a.phi)?;
    let p = input_poly("P", a.p.as_deref())?;
    let d = classify_kernel(&phi, &p).map_err(Failure::engine)?;
    Ok(output::Report::pairs(vec![
        ("f", format_poly(&d.f)),
        ("g", format_poly(&d.g)),
    ]))
}

fn cmd_eq1(a: &KernelArgs) -> Outcome {
    let (phi, f, g) = kernel_inputs(a)?;
    let e = eq1_residual(&phi, &f, &g).map_err(Failure::engine)?;
    Ok(output::Report::pairs(vec![
        ("direct", format_poly(&e.direct)),
        ("transcribed", format_poly(&e.transcribed)),
        ("residual", format_poly(&e.residual)),
    ]))
}

fn cmd_eq2(a: &Eq2Args) -> output::Report {
    output::eq2_report(
        eq2_value(a.r).to_string(),
        eq2_leading_difference(a.r).to_string(),
    )
}

fn cmd_search(a: &SearchArgs) -> Outcome {
    let phi = input_phi(&a.phi)?;
    if a.pool.is_empty() {
        return Err(Failure::config("pool must not be empty"));
    }
    let config = SearchConfig {
        max_deg_x: a.max_deg_x,
        max_deg_y: a.max_deg_y,
        pool: a.pool.clone(),
        m_max: a.m_max,
        sample: a.samples.map(|n| (n, a.seed)),
    };
    let outcome = counterexample_search(&phi, &config).map_err(Failure::engine)?;
    Ok(output::search_report(outcome))
}

/// Exit code for an engine error.
fn engine_exit_code(e: &GvcError) -> u8 {
    match e {
        GvcError::HypothesisViolated { .. } | GvcError::BoundViolated { .. } => 1,
        GvcError::DiffOp(DiffOpError::Poly(_)) | GvcError::Poly(_) => 2,
        _ => 3,
    }
}
