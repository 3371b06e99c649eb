//! Model files: JSON in, JSON echo out.
//!
//! Couplings are written with 1-based oscillator indices (`[1, 2, D]` is
//! `D12`); the library uses 0-based indices throughout.

use std::path::Path;

use cho_core::linalg::SymMatrix;
use cho_core::model::{Coupling, OscillatorModel};
use cho_core::Violation;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// On-disk model description. Exactly one of `omegas`, `stiffness_diag`
/// and `c` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    pub masses: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omegas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stiffness_diag: Option<Vec<f64>>,
    /// Two-oscillator shorthand `[C1, C2, C3]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub couplings: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kinetic: Option<Vec<Vec<f64>>>,
}

impl ModelFile {
    /// Canonical form of a model: raw stiffnesses, 1-based couplings.
    pub fn from_model(model: &OscillatorModel) -> Self {
        Self {
            hbar: Some(model.hbar),
            masses: model.masses.clone(),
            omegas: None,
            stiffness_diag: Some(model.stiffness_diag.clone()),
            c: None,
            couplings: model
                .couplings
                .iter()
                .map(|c| (c.i + 1, c.j + 1, c.value))
                .collect(),
            kinetic: model.kinetic_override.as_ref().map(SymMatrix::rows),
        }
    }

    pub fn into_model(self) -> Result<OscillatorModel, CliError> {
        let mut violations = Vec::new();
        let n = self.masses.len();

        let given = [
            self.omegas.is_some(),
            self.stiffness_diag.is_some(),
            self.c.is_some(),
        ];
        if given.iter().filter(|&&g| g).count() != 1 {
            violations.push(Violation::new(
                "model",
                "must give exactly one of omegas, stiffness_diag, c",
            ));
        }

        let mut couplings = Vec::new();
        let stiffness = if let Some(omegas) = &self.omegas {
            if omegas.len() != n {
                violations.push(Violation::new(
                    "omegas",
                    format!("must have {n} entries, found {}", omegas.len()),
                ));
            }
            self.masses.iter().zip(omegas).map(|(m, w)| m * w * w).collect()
        } else if let Some(k) = &self.stiffness_diag {
            k.clone()
        } else if let Some(c) = &self.c {
            if n != 2 {
                violations.push(Violation::new("c", format!("requires exactly 2 masses, found {n}")));
            }
            if c.len() != 3 {
                violations.push(Violation::new("c", format!("must have 3 entries, found {}", c.len())));
            }
            if !self.couplings.is_empty() {
                violations.push(Violation::new("couplings", "must be omitted when c is given"));
            }
            if c.len() == 3 {
                couplings.push(Coupling { i: 0, j: 1, value: c[2] });
                vec![c[0], c[1]]
            } else {
                Vec::new()
            }
        } else {
            Vec::new()
        };

        for (idx, &(i, j, value)) in self.couplings.iter().enumerate() {
            if i == 0 || j == 0 {
                violations.push(Violation::new(
                    format!("couplings[{idx}]"),
                    "indices are 1-based and must be >= 1",
                ));
                continue;
            }
            couplings.push(Coupling { i: i - 1, j: j - 1, value });
        }

        let kinetic = match &self.kinetic {
            Some(rows) => match SymMatrix::from_rows(rows) {
                Ok(t) => Some(t),
                Err(e) => {
                    violations.push(Violation::new("kinetic", e.to_string()));
                    None
                }
            },
            None => None,
        };

        let model = OscillatorModel {
            masses: self.masses,
            stiffness_diag: stiffness,
            couplings,
            hbar: self.hbar.unwrap_or(1.0),
            kinetic_override: kinetic,
        };
        if violations.is_empty() {
            violations = model.validate();
        }
        if violations.is_empty() {
            Ok(model)
        } else {
            Err(CliError::Validation(violations))
        }
    }
}

pub fn parse_model_str(text: &str) -> Result<OscillatorModel, CliError> {
    let file: ModelFile = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    file.into_model()
}

pub fn parse_model_file(path: &Path) -> Result<OscillatorModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_model_str(&text)
}
