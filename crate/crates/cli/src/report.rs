//! Analysis pipeline: model → decomposition → bound-state verdict → spectrum.

use std::str::FromStr;

use cho_core::boundstate::{classify, MinorStatus, Verdict};
use cho_core::diagonalize::{
    compute_a, compute_s, decompose_mass_normalized, decompose_with, DecomposeOptions,
};
use cho_core::model::{build_t, build_v, OscillatorModel};
use cho_core::spectrum::{ground_state_energy, lowest_levels};
use serde::{Serialize, Serializer};

use crate::input::ModelFile;
use crate::CliError;

pub const DEFAULT_LEVELS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassNorm {
    None,
    /// Reference mass is the geometric mean of the masses.
    Geometric,
    Explicit(f64),
}

impl FromStr for MassNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "none" => Ok(MassNorm::None),
            "geometric" => Ok(MassNorm::Geometric),
            _ => match s.parse::<f64>() {
                Ok(m) if m.is_finite() && m > 0.0 => Ok(MassNorm::Explicit(m)),
                _ => Err(format!(
                    "expected none, geometric or a positive mass, got {s:?}"
                )),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisRequest {
    pub model: OscillatorModel,
    pub levels: usize,
    pub mass_norm: MassNorm,
    pub output_format: OutputFormat,
    /// Replaces the Jacobi convergence tolerance.
    pub tolerance_override: Option<f64>,
}

impl AnalysisRequest {
    pub fn new(model: OscillatorModel) -> Self {
        Self {
            model,
            levels: DEFAULT_LEVELS,
            mass_norm: MassNorm::None,
            output_format: OutputFormat::Text,
            tolerance_override: None,
        }
    }
}

fn ser_verdict<S: Serializer>(v: &Verdict, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(v.as_str())
}

#[derive(Debug, Clone, Serialize)]
pub struct Matrices {
    #[serde(rename = "T")]
    pub t: Vec<Vec<f64>>,
    #[serde(rename = "V")]
    pub v: Vec<Vec<f64>>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MassNormalized {
    pub m_ref: f64,
    pub k: Vec<f64>,
    pub c: Vec<Vec<f64>>,
    pub lambdas: Vec<f64>,
    pub residual_kinetic: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Modes {
    pub lambdas: Vec<f64>,
    /// `sqrt(lambda)`, or `null` for a non-positive eigenvalue.
    pub frequencies: Vec<Option<f64>>,
    pub u: Vec<Vec<f64>>,
    pub c: Vec<Vec<f64>>,
    pub residual_orth: f64,
    pub residual_kinetic: f64,
    pub residual_potential: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mass_normalized: Option<MassNormalized>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Minor {
    pub k: usize,
    pub value: f64,
    pub margin: f64,
    pub status: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundState {
    #[serde(serialize_with = "ser_verdict")]
    pub verdict: Verdict,
    pub minors: Vec<Minor>,
    pub eigenvalues: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub discriminant: Option<f64>,
    pub closed_form_checks: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Level {
    pub occupations: Vec<u32>,
    pub energy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub hbar: f64,
    pub ground_state_energy: f64,
    pub levels: Vec<Level>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub model: ModelFile,
    pub matrices: Matrices,
    pub modes: Modes,
    pub bound_state: BoundState,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Spectrum>,
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn verdict(&self) -> Verdict {
        self.bound_state.verdict
    }

    pub fn exit_code(&self) -> u8 {
        exit_code(self.verdict())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report contains only plain data")
    }
}

/// 0 bound, 1 unbound, 2 marginal; errors map to [`ERROR_EXIT_CODE`].
pub fn exit_code(verdict: Verdict) -> u8 {
    match verdict {
        Verdict::Bound => 0,
        Verdict::Unbound => 1,
        Verdict::Marginal => 2,
    }
}

pub const ERROR_EXIT_CODE: u8 = 3;

fn status_str(s: MinorStatus) -> &'static str {
    match s {
        MinorStatus::Positive => "positive",
        MinorStatus::Negative => "negative",
        MinorStatus::NearZero => "near-zero",
    }
}

pub fn run_analysis(req: &AnalysisRequest) -> Result<AnalysisReport, CliError> {
    let model = &req.model;
    model.ensure_valid()?;
    let mut opts = DecomposeOptions::default();
    if let Some(tol) = req.tolerance_override {
        if !(tol.is_finite() && tol > 0.0 && tol < 1.0) {
            return Err(CliError::Argument(format!(
                "tolerance must lie in (0, 1), got {tol}"
            )));
        }
        opts.tol = tol;
    }

    let t = build_t(model)?;
    let v = build_v(model)?;
    let a = compute_a(&t, &v)?;
    let s = compute_s(&t, &v)?;
    let matrices = Matrices {
        t: t.rows(),
        v: v.rows(),
        a: a.rows(),
        s: s.rows(),
    };

    let dec = decompose_with(model, opts)?;
    let mass_normalized = match req.mass_norm {
        MassNorm::None => None,
        MassNorm::Geometric => Some(decompose_mass_normalized(model, None)?),
        MassNorm::Explicit(m) => Some(decompose_mass_normalized(model, Some(m))?),
    }
    .map(|mn| MassNormalized {
        m_ref: mn.m_ref,
        k: mn.k,
        c: mn.c.rows(),
        lambdas: mn.lambdas,
        residual_kinetic: mn.residual_kinetic,
    });
    let modes = Modes {
        lambdas: dec.lambdas.clone(),
        frequencies: dec.frequencies(),
        u: dec.u.rows(),
        c: dec.c.rows(),
        residual_orth: dec.residual_orth,
        residual_kinetic: dec.residual_kinetic,
        residual_potential: dec.residual_potential,
        mass_normalized,
    };

    let bs = classify(model)?;
    let mut warnings = Vec::new();
    // an unbound verdict is caused by a clearly negative minor, which may
    // come after a near-zero one
    let cited = match bs.verdict {
        Verdict::Unbound => bs
            .per_minor
            .iter()
            .find(|m| m.status == MinorStatus::Negative),
        _ => bs.first_failing_minor(),
    };
    if let Some(m) = cited {
        match bs.verdict {
            Verdict::Unbound => warnings.push(format!(
                "unbound: leading principal minor k={} of S is {:.6e} (margin {:.1e}); \
                 normal-mode results are not valid and the spectrum is omitted",
                m.k, m.value, m.margin
            )),
            Verdict::Marginal => warnings.push(format!(
                "marginal: leading principal minor k={} of S is {:.6e}, within {:.1e} of zero; \
                 a zero-frequency mode is likely and the spectrum is omitted",
                m.k, m.value, m.margin
            )),
            Verdict::Bound => {}
        }
    }
    for c in bs.closed_form_checks.iter().filter(|c| !c.passed) {
        warnings.push(format!(
            "closed-form check {} disagrees: expected {:.12e}, got {:.12e} (tolerance {:.1e})",
            c.name, c.expected, c.actual, c.tolerance
        ));
    }

    let spectrum = if bs.verdict == Verdict::Bound && req.levels > 0 {
        let levels = lowest_levels(&dec, model.hbar, req.levels)?;
        Some(Spectrum {
            hbar: model.hbar,
            ground_state_energy: ground_state_energy(&dec, model.hbar)?,
            levels: levels
                .into_iter()
                .map(|l| Level {
                    occupations: l.occupations,
                    energy: l.energy,
                })
                .collect(),
        })
    } else {
        None
    };

    let bound_state = BoundState {
        verdict: bs.verdict,
        minors: bs
            .per_minor
            .iter()
            .map(|m| Minor {
                k: m.k,
                value: m.value,
                margin: m.margin,
                status: status_str(m.status),
            })
            .collect(),
        eigenvalues: bs.eigenvalues,
        discriminant: bs.discriminant,
        closed_form_checks: bs
            .closed_form_checks
            .into_iter()
            .map(|c| Check {
                name: c.name,
                expected: c.expected,
                actual: c.actual,
                tolerance: c.tolerance,
                passed: c.passed,
            })
            .collect(),
    };

    Ok(AnalysisReport {
        model: ModelFile::from_model(model),
        matrices,
        modes,
        bound_state,
        spectrum,
        warnings,
    })
}

/// Columns of `m` as rows, for printing eigenvectors.
pub(crate) fn columns(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    (0..n).map(|j| (0..n).map(|i| m[i][j]).collect()).collect()
}
