//! Text and JSON rendering of command results and failures.

use std::process::ExitCode;

use gvc_core::dsl::{format_poly, DslError};
use gvc_core::gvc::{SearchHit, SearchOutcome, VanishEntry};
use gvc_core::{GvcCertificate, GvcError, VanishReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::{engine_exit_code, OutputMode, RunConfig};

/// A completed command: exit code, text lines, JSON payload.
pub struct Report {
    exit: u8,
    text: Vec<String>,
    json: Value,
}

impl Report {
    pub fn single(key: &str, value: String) -> Self {
        Report {
            exit: 0,
            text: vec![value.clone()],
            json: json!({ key: value }),
        }
    }

    pub fn pairs(items: Vec<(&str, String)>) -> Self {
        let text = items.iter().map(|(k, v)| format!("{k}: {v}")).collect();
        let json = Value::Object(
            items
                .into_iter()
                .map(|(k, v)| (k.to_string(), Value::String(v)))
                .collect(),
        );
        Report {
            exit: 0,
            text,
            json,
        }
    }
}

pub enum Failure {
    Missing(&'static str),
    Config(String),
    Parse {
        field: &'static str,
        input: String,
        error: DslError,
    },
    Engine(GvcError),
}

impl Failure {
    pub fn missing(field: &'static str) -> Self {
        Failure::Missing(field)
    }

    pub fn config(message: impl Into<String>) -> Self {
        Failure::Config(message.into())
    }

    pub fn parse(field: &'static str, input: &str, error: DslError) -> Self {
        Failure::Parse {
            field,
            input: input.to_string(),
            error,
        }
    }

    pub fn engine(error: GvcError) -> Self {
        Failure::Engine(error)
    }

    fn exit_code(&self) -> u8 {
        match self {
            Failure::Missing(_) | Failure::Config(_) | Failure::Parse { .. } => 2,
            Failure::Engine(e) => engine_exit_code(e),
        }
    }

    fn text(&self) -> Vec<String> {
        match self {
            Failure::Missing(field) => vec![format!("error: --{field} is required")],
            Failure::Config(message) => vec![format!("error: {message}")],
            Failure::Parse {
                field,
                input,
                error,
            } => vec![
                format!("error: invalid {field}: {error}"),
                format!("  {input}"),
                format!("  {}^", " ".repeat(error.position().saturating_sub(1))),
            ],
            Failure::Engine(e) => vec![format!("error: {e}")],
        }
    }

    fn json(&self) -> Value {
        match self {
            Failure::Missing(field) => json!({
                "kind": "missing_argument",
                "field": field,
                "message": format!("--{field} is required"),
            }),
            Failure::Config(message) => json!({ "kind": "config", "message": message }),
            Failure::Parse {
                field,
                input,
                error,
            } => {
                let mut v = json!({
                    "kind": "parse",
                    "field": field,
                    "input": input,
                    "position": error.position(),
                    "message": error.to_string(),
                });
                if let DslError::Syntax(s) = error {
                    v["expected"] = json!(s.expected);
                    v["found"] = json!(s.found);
                }
                v
            }
            Failure::Engine(e) => engine_json(e),
        }
    }
}

fn engine_json(e: &GvcError) -> Value {
    let mut v = json!({ "message": e.to_string() });
    let kind = match e {
        GvcError::HypothesisViolated { m, witness } => {
            v["m"] = json!(m);
            v["witness"] = json!(format_poly(witness));
            "hypothesis_violated"
        }
        GvcError::BoundViolated { m, witness } => {
            v["m"] = json!(m);
            v["witness"] = json!(format_poly(witness));
            "bound_violated"
        }
        GvcError::FormViolated {
            violation,
            lambda2_p2,
        } => {
            v["violation"] = to_value(violation);
            v["lambda2_p2"] = json!(lambda2_p2.as_ref().map(format_poly));
            "form_violated"
        }
        GvcError::NotInKernel { witness } => {
            v["witness"] = json!(format_poly(witness));
            "not_in_kernel"
        }
        GvcError::NormalizationFailed => "normalization_failed",
        GvcError::PreconditionViolated(_)
        | GvcError::NonzeroConstantTerm(_)
        | GvcError::NotUnivariate { .. } => "precondition_violated",
        e if e.is_not_locally_nilpotent() => "not_locally_nilpotent",
        GvcError::DiffOp(_) => "operator",
        GvcError::Poly(_) => "polynomial",
    };
    v["kind"] = json!(kind);
    v
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn status_for(exit: u8) -> &'static str {
    match exit {
        0 => "ok",
        1 => "falsified",
        2 => "input_error",
        _ => "engine_error",
    }
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    config: &'a RunConfig,
    status: &'static str,
    exit_code: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<Value>,
}

pub struct Emitter {
    mode: OutputMode,
}

impl Emitter {
    pub fn new(mode: OutputMode) -> Self {
        Emitter { mode }
    }

    pub fn finish(&self, config: &RunConfig, outcome: Result<Report, Failure>) -> ExitCode {
        let exit = match &outcome {
            Ok(r) => r.exit,
            Err(f) => f.exit_code(),
        };
        match self.mode {
            OutputMode::Json => {
                let (result, error) = match outcome {
                    Ok(r) => (Some(r.json), None),
                    Err(f) => (None, Some(f.json())),
                };
                let envelope = Envelope {
                    command: config.command,
                    config,
                    status: status_for(exit),
                    exit_code: exit,
                    result,
                    error,
                };
                println!(
                    "{}",
                    serde_json::to_string_pretty(&envelope).expect("serializable")
                );
            }
            OutputMode::Text => match outcome {
                Ok(r) => r.text.iter().for_each(|l| println!("{l}")),
                Err(f) => f.text().iter().for_each(|l| eprintln!("{l}")),
            },
        }
        ExitCode::from(exit)
    }
}

fn witness_line(label: &str, e: &VanishEntry) -> String {
    let w = e.witness.as_ref().map(format_poly).unwrap_or_default();
    format!("{label}: fails at m = {}, witness {w}", e.m)
}

pub fn check_report(hypothesis: VanishReport, conclusion: VanishReport) -> Report {
    let m_max = hypothesis.m_max;
    let mut text = Vec::new();
    let hyp_fail = hypothesis.first_failure.and_then(|m| hypothesis.entry(m));
    match hyp_fail {
        Some(e) => text.push(witness_line("hypothesis", e)),
        None => text.push(format!("hypothesis: Lambda^m(P^m) = 0 for m = 1..={m_max}")),
    }
    let holds = conclusion.vanishes_at_end();
    if holds {
        text.push(format!(
            "conclusion: Lambda^m(P^m Q) = 0 for m = {}..={m_max}",
            conclusion.empirical_threshold
        ));
        text.push(format!("threshold: {}", conclusion.empirical_threshold));
    } else {
        let last = conclusion.entry(m_max).expect("m_max entry");
        text.push(witness_line("conclusion", last));
    }
    let exit = if hyp_fail.is_none() && holds { 0 } else { 1 };
    let json = json!({
        "hypothesis": to_value(&hypothesis),
        "conclusion": to_value(&conclusion),
        "hypothesis_holds": hyp_fail.is_none(),
        "threshold": holds.then_some(conclusion.empirical_threshold),
    });
    Report { exit, text, json }
}

fn monomial_text(a: u32, b: u32) -> String {
    let factor = |v: &str, e: u32| match e {
        0 => None,
        1 => Some(v.to_string()),
        _ => Some(format!("{v}^{e}")),
    };
    let parts: Vec<String> = [factor("x", a), factor("y", b)]
        .into_iter()
        .flatten()
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join("*")
    }
}

pub fn certificate_report(cert: GvcCertificate) -> Report {
    let last = cert.m_star + cert.samples.len().saturating_sub(1) as u32;
    let mut text = vec![
        format!("m*: {}", cert.m_star),
        format!(
            "route: {}",
            to_value(&cert.route).as_str().unwrap_or_default()
        ),
        format!("c: {}", cert.c),
        format!("phi_normalized: {}", cert.phi_normalized),
        format!("P_normalized: {}", format_poly(&cert.p_normalized)),
        format!("Q_normalized: {}", format_poly(&cert.q_normalized)),
        format!("f: {}", format_poly(&cert.f)),
        format!(
            "a1: {}",
            cert.a1
                .as_ref()
                .map_or_else(|| "none".to_string(), |a| a.to_string())
        ),
        format!("g: {}", format_poly(&cert.g)),
        format!("d: {}", cert.d),
        format!("r: {}", cert.r),
    ];
    for b in &cert.bounds {
        text.push(format!(
            "bound: {} vanishes for m > {}",
            monomial_text(b.a, b.b),
            b.threshold
        ));
    }
    text.push(format!("verified: m = {}..={last}", cert.m_star));
    Report {
        exit: 0,
        text,
        json: to_value(&cert),
    }
}

/// Integers travel as decimal strings; they outgrow JSON numbers quickly.
pub fn eq2_report(value: String, leading_difference: String) -> Report {
    Report {
        exit: 0,
        text: vec![value.clone()],
        json: json!({
            "value": value,
            "leading_difference": leading_difference,
        }),
    }
}

pub fn search_report(outcome: SearchOutcome) -> Report {
    let mut text = vec![
        format!("examined: {}", outcome.examined),
        format!("hypothesis_passed: {}", outcome.hypothesis_passed),
        format!("failures: {}", outcome.hits.len()),
    ];
    for hit in &outcome.hits {
        text.push(match hit {
            SearchHit::BeyondBound { p, q, m, bound } => format!(
                "  P = {}, Q = {}: nonzero at m = {m} > {bound}",
                format_poly(p),
                format_poly(q)
            ),
            SearchHit::Uncertified { p, error } => format!("  P = {}: {error}", format_poly(p)),
        });
    }
    Report {
        exit: if outcome.hits.is_empty() { 0 } else { 1 },
        text,
        json: to_value(&outcome),
    }
}
