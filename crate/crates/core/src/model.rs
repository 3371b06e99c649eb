//! Physical parameterisation of an oscillator system and the kinetic (`T`)
//! and potential (`V`) matrices it induces.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = sum_i p_i^2 / (2 m_i) + 1/2 ( sum_i k_i x_i^2 + sum_{i<j} D_ij x_i x_j )
//! ```
//!
//! where `k_i` is the diagonal stiffness (`m_i omega_i^2` in the frequency
//! parameterisation). Since `x^t V x` counts each off-diagonal pair twice,
//! `V_ij = D_ij / 2`.

use crate::error::{Error, Result, Violation};
use crate::linalg::{SymMatrix, MAX_DIM};

/// Bilinear coupling `D x_i x_j` between two oscillators (0-based indices).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OscillatorModel {
    pub masses: Vec<f64>,
    pub stiffness_diag: Vec<f64>,
    pub couplings: Vec<Coupling>,
    pub hbar: f64,
    /// Replaces `diag(1/m_i)` as the kinetic matrix when present.
    pub kinetic_override: Option<SymMatrix>,
}

impl OscillatorModel {
    /// Uncoupled model with raw diagonal stiffnesses and `hbar = 1`.
    pub fn new(masses: Vec<f64>, stiffness_diag: Vec<f64>) -> Self {
        Self {
            masses,
            stiffness_diag,
            couplings: Vec::new(),
            hbar: 1.0,
            kinetic_override: None,
        }
    }

    /// Uncoupled model from masses and angular frequencies, `k_i = m_i omega_i^2`.
    pub fn from_omegas(masses: Vec<f64>, omegas: &[f64]) -> Self {
        let stiffness = masses
            .iter()
            .zip(omegas)
            .map(|(m, w)| m * w * w)
            .collect();
        Self::new(masses, stiffness)
    }

    /// Two oscillators with potential `(C1 x1^2 + C2 x2^2 + C3 x1 x2) / 2`.
    pub fn two_body(m1: f64, m2: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Self::new(vec![m1, m2], vec![c1, c2]).with_coupling(0, 1, c3)
    }

    /// `n` identical oscillators (mass `m`, frequency `omega`) with the same
    /// coupling `d` between every pair.
    pub fn identical(n: usize, m: f64, omega: f64, d: f64) -> Self {
        let mut model = Self::from_omegas(vec![m; n], &vec![omega; n]);
        for i in 0..n {
            for j in (i + 1)..n {
                model = model.with_coupling(i, j, d);
            }
        }
        model
    }

    pub fn with_coupling(mut self, i: usize, j: usize, value: f64) -> Self {
        self.couplings.push(Coupling { i, j, value });
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Self {
        self.hbar = hbar;
        self
    }

    pub fn with_kinetic(mut self, t: SymMatrix) -> Self {
        self.kinetic_override = Some(t);
        self
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    /// `D_ij` for an unordered pair; zero when the pair is uncoupled.
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings
            .iter()
            .filter(|c| (c.i == i && c.j == j) || (c.i == j && c.j == i))
            .map(|c| c.value)
            .sum()
    }

    /// Sets `D_ij`, replacing any existing entry for the pair.
    pub fn set_coupling(&mut self, i: usize, j: usize, value: f64) {
        self.couplings
            .retain(|c| !((c.i == i && c.j == j) || (c.i == j && c.j == i)));
        self.couplings.push(Coupling { i, j, value });
    }

    /// `omega_i^2 = k_i / m_i`.
    pub fn omega_sq(&self, i: usize) -> f64 {
        self.stiffness_diag[i] / self.masses[i]
    }

    /// True when the kinetic matrix is `diag(1/m_i)`.
    pub fn has_diagonal_kinetic(&self) -> bool {
        self.kinetic_override.is_none()
    }

    /// Returns every broken invariant; empty when the model is usable.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let n = self.n();
        if n == 0 || n > MAX_DIM {
            out.push(Violation::new(
                "masses",
                format!("must contain between 1 and {MAX_DIM} entries, found {n}"),
            ));
        }
        for (i, m) in self.masses.iter().enumerate() {
            if !m.is_finite() || *m <= 0.0 {
                out.push(Violation::new(format!("masses[{i}]"), "must be > 0"));
            }
        }
        if self.stiffness_diag.len() != n {
            out.push(Violation::new(
                "stiffness_diag",
                format!("must have {n} entries, found {}", self.stiffness_diag.len()),
            ));
        }
        for (i, k) in self.stiffness_diag.iter().enumerate() {
            if !k.is_finite() {
                out.push(Violation::new(format!("stiffness_diag[{i}]"), "must be finite"));
            }
        }
        let mut seen: Vec<(usize, usize)> = Vec::new();
        for (idx, c) in self.couplings.iter().enumerate() {
            let field = format!("couplings[{idx}]");
            if c.i == c.j {
                out.push(Violation::new(field, "self-coupling forbidden"));
                continue;
            }
            if c.i >= n || c.j >= n {
                out.push(Violation::new(
                    field,
                    format!("index out of range for {n} oscillators"),
                ));
                continue;
            }
            if !c.value.is_finite() {
                out.push(Violation::new(field.clone(), "must be finite"));
            }
            let key = (c.i.min(c.j), c.i.max(c.j));
            if seen.contains(&key) {
                out.push(Violation::new(field, "duplicate coupling for this pair"));
            } else {
                seen.push(key);
            }
        }
        if !self.hbar.is_finite() || self.hbar <= 0.0 {
            out.push(Violation::new("hbar", "must be > 0"));
        }
        if let Some(t) = &self.kinetic_override {
            if t.n() != n {
                out.push(Violation::new(
                    "kinetic",
                    format!("must be {n}x{n}, found {}x{}", t.n(), t.n()),
                ));
            }
        }
        out
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(v))
        }
    }
}

/// Kinetic matrix: the override when given, else `diag(1/m_i)`.
pub fn build_t(model: &OscillatorModel) -> Result<SymMatrix> {
    match &model.kinetic_override {
        Some(t) => Ok(t.clone()),
        None => SymMatrix::diagonal(&model.masses.iter().map(|m| 1.0 / m).collect::<Vec<_>>()),
    }
}

/// Potential matrix: `V_ii = k_i`, `V_ij = V_ji = D_ij / 2`.
pub fn build_v(model: &OscillatorModel) -> Result<SymMatrix> {
    let n = model.n();
    let mut rows = vec![vec![0.0; n]; n];
    for (i, k) in model.stiffness_diag.iter().enumerate().take(n) {
        rows[i][i] = *k;
    }
    for c in &model.couplings {
        if c.i != c.j && c.i < n && c.j < n {
            rows[c.i][c.j] += c.value / 2.0;
            rows[c.j][c.i] += c.value / 2.0;
        }
    }
    SymMatrix::from_fn(n, |i, j| rows[i][j])
}
