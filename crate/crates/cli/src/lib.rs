//! Command-line front end for coupled-oscillator analysis: model files,
//! report assembly and rendering. The binary in `main.rs` is a thin clap
//! wrapper over this library.

pub mod input;
pub mod report;
pub mod text;

use cho_core::sweep::{SweepParam, SweepReport};
use cho_core::Violation;
use serde::Serialize;
use thiserror::Error;

pub use input::{parse_model_file, parse_model_str, ModelFile};
pub use report::{
    exit_code, run_analysis, AnalysisReport, AnalysisRequest, MassNorm, OutputFormat,
    ERROR_EXIT_CODE,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid model: {}", join_violations(.0))]
    Validation(Vec<Violation>),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Core(cho_core::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

impl From<cho_core::Error> for CliError {
    fn from(e: cho_core::Error) -> Self {
        match e {
            cho_core::Error::Validation(v) => CliError::Validation(v),
            other => CliError::Core(other),
        }
    }
}

/// `D:i,j` (1-based) or `D:all`.
pub fn parse_sweep_param(s: &str) -> Result<SweepParam, String> {
    let body = s
        .strip_prefix("D:")
        .ok_or_else(|| format!("expected D:i,j or D:all, got {s:?}"))?;
    if body == "all" {
        return Ok(SweepParam::AllCouplings);
    }
    let (i, j) = body
        .split_once(',')
        .ok_or_else(|| format!("expected D:i,j or D:all, got {s:?}"))?;
    let idx = |t: &str| -> Result<usize, String> {
        match t.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k - 1),
            _ => Err(format!("oscillator indices are 1-based integers, got {t:?}")),
        }
    };
    Ok(SweepParam::Coupling(idx(i)?, idx(j)?))
}

#[derive(Debug, Serialize)]
struct SweepRowJson<'a> {
    value: f64,
    verdict: &'static str,
    lambdas: &'a [f64],
}

#[derive(Debug, Serialize)]
struct TransitionJson {
    lo: f64,
    hi: f64,
    from: &'static str,
    to: &'static str,
}

#[derive(Debug, Serialize)]
struct SweepJson<'a> {
    params: Vec<String>,
    rows: Vec<SweepRowJson<'a>>,
    transitions: Vec<TransitionJson>,
}

pub fn sweep_to_json(r: &SweepReport) -> String {
    let doc = SweepJson {
        params: r.params.iter().map(text::param_label).collect(),
        rows: r
            .rows
            .iter()
            .map(|x| SweepRowJson {
                value: x.value,
                verdict: x.verdict.as_str(),
                lambdas: &x.lambdas,
            })
            .collect(),
        transitions: r
            .transitions
            .iter()
            .map(|t| TransitionJson {
                lo: t.lo,
                hi: t.hi,
                from: t.verdict_lo.as_str(),
                to: t.verdict_hi.as_str(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("sweep contains only plain data")
}
