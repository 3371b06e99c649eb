//! Simultaneous diagonalisation of `T` and `V`.
//!
//! With `C = T^{1/2} U`, where `U` holds the orthonormal eigenvectors of the
//! symmetric matrix `S = T^{1/2} V T^{1/2}`, the canonical transformation
//! `x = C x'`, `p = (C^t)^{-1} p'` satisfies
//!
//! ```text
//! C^{-1} T (C^t)^{-1} = I,    C^t V C = diag(lambda)
//! ```
//!
//! and the `lambda_i` are also the eigenvalues of the non-symmetric
//! `A = T V`, which is similar to `S`.

use crate::error::{Error, Result};
use crate::linalg::{
    inverse, jacobi_eigh, matmul, spd_sqrt, transpose, GenMatrix, SymMatrix, JACOBI_MAX_SWEEPS,
    JACOBI_TOL,
};
use crate::model::{build_t, build_v, OscillatorModel};

/// Bound on `||U^t U - I||_max`.
pub const ORTH_TOL: f64 = 1e-9;
/// Scale factor for the kinetic and potential residual bounds.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Largest skew accepted in `T^{1/2} V T^{1/2}` before symmetrising,
/// relative to `1 + ||S||_max`.
const SKEW_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        Self {
            tol: JACOBI_TOL,
            max_sweeps: JACOBI_MAX_SWEEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeDecomposition {
    /// Squared normal-mode frequencies, ascending.
    pub lambdas: Vec<f64>,
    /// Orthogonal eigenvector matrix of `S`.
    pub u: GenMatrix,
    /// Canonical transformation `T^{1/2} U`. Column order and signs follow `u`.
    pub c: GenMatrix,
    pub residual_orth: f64,
    pub residual_kinetic: f64,
    pub residual_potential: f64,
}

impl ModeDecomposition {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    /// `sqrt(lambda_i)`, or `None` for a non-positive eigenvalue.
    pub fn frequencies(&self) -> Vec<Option<f64>> {
        self.lambdas
            .iter()
            .map(|&l| (l > 0.0).then(|| l.sqrt()))
            .collect()
    }
}

/// Decomposition with dimensionless `C`, normalised against a reference
/// mass: `C^{-1} T (C^t)^{-1} = I / m_ref` and `C^t V C = K`.
#[derive(Debug, Clone, PartialEq)]
pub struct MassNormalizedDecomposition {
    pub m_ref: f64,
    /// Diagonal of `K`.
    pub k: Vec<f64>,
    pub c: GenMatrix,
    /// `k_i / m_ref`.
    pub lambdas: Vec<f64>,
    /// `m_ref * ||C^{-1} T (C^t)^{-1} - I/m_ref||_max`.
    pub residual_kinetic: f64,
}

pub fn compute_a(t: &SymMatrix, v: &SymMatrix) -> Result<GenMatrix> {
    matmul(&t.to_gen(), &v.to_gen())
}

/// `T^{1/2} V T^{1/2}`, symmetrised after checking that rounding skew is
/// negligible.
pub fn compute_s(t: &SymMatrix, v: &SymMatrix) -> Result<SymMatrix> {
    let root = spd_sqrt(t)?;
    s_from_root(&root, v)
}

fn s_from_root(root: &SymMatrix, v: &SymMatrix) -> Result<SymMatrix> {
    let r = root.to_gen();
    let p = matmul(&matmul(&r, &v.to_gen())?, &r)?;
    let skew = p.max_skew();
    let limit = SKEW_TOL * (1.0 + p.max_abs());
    if skew > limit {
        return Err(Error::InternalConsistency {
            what: "skew of T^1/2 V T^1/2",
            value: skew,
            limit,
        });
    }
    Ok(p.symmetrize())
}

fn check(what: &'static str, value: f64, limit: f64) -> Result<()> {
    if value <= limit {
        Ok(())
    } else {
        Err(Error::InternalConsistency { what, value, limit })
    }
}

pub fn decompose(model: &OscillatorModel) -> Result<ModeDecomposition> {
    decompose_with(model, DecomposeOptions::default())
}

/// Like [`decompose`] with an explicit Jacobi tolerance and sweep budget.
pub fn decompose_with(model: &OscillatorModel, opts: DecomposeOptions) -> Result<ModeDecomposition> {
    model.ensure_valid()?;
    let t = build_t(model)?;
    let v = build_v(model)?;
    let root = spd_sqrt(&t)?;
    let s = s_from_root(&root, &v)?;
    let eig = jacobi_eigh(&s, opts.tol, opts.max_sweeps)?;
    let n = s.n();
    let u = eig.vectors;
    let c = matmul(&root.to_gen(), &u)?;
    let ident = GenMatrix::identity(n)?;

    let residual_orth = matmul(&transpose(&u), &u)?.max_abs_diff(&ident);

    let ci = inverse(&c)?;
    let kinetic = matmul(&matmul(&ci, &t.to_gen())?, &transpose(&ci))?;
    let residual_kinetic = kinetic.max_abs_diff(&ident);

    let ctvc = matmul(&matmul(&transpose(&c), &v.to_gen())?, &c)?;
    let residual_potential = ctvc.max_off_diag();
    let diag_err = ctvc
        .diag()
        .iter()
        .zip(&eig.values)
        .fold(0.0_f64, |m, (d, l)| m.max((d - l).abs()));

    check("||U^t U - I||", residual_orth, ORTH_TOL)?;
    check(
        "||C^-1 T C^-t - I||",
        residual_kinetic,
        RESIDUAL_TOL * (1.0 + t.max_abs()),
    )?;
    check(
        "offdiag(C^t V C)",
        residual_potential,
        RESIDUAL_TOL * (1.0 + v.max_abs()),
    )?;
    // absolute against the spectral scale: lambdas may sit at zero
    check(
        "|diag(C^t V C) - lambda|",
        diag_err,
        RESIDUAL_TOL * (1.0 + s.max_abs()),
    )?;

    Ok(ModeDecomposition {
        lambdas: eig.values,
        u,
        c,
        residual_orth,
        residual_kinetic,
        residual_potential,
    })
}

/// Geometric mean of the masses.
pub fn geometric_mean_mass(model: &OscillatorModel) -> f64 {
    let n = model.n() as f64;
    (model.masses.iter().map(|m| m.ln()).sum::<f64>() / n).exp()
}

/// Mass-normalised decomposition. `m_ref` defaults to the geometric mean
/// of the masses.
///
/// `K` is read off the diagonal of `C^t V C` for the rescaled `C`, so the
/// reported `lambdas = K / m_ref` come from an actual product rather than
/// from rescaling the unnormalised eigenvalues.
pub fn decompose_mass_normalized(
    model: &OscillatorModel,
    m_ref: Option<f64>,
) -> Result<MassNormalizedDecomposition> {
    if let Some(m) = m_ref {
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "reference mass must be > 0, got {m}"
            )));
        }
    }
    let dec = decompose(model)?;
    let m = match m_ref {
        Some(m) => m,
        None => geometric_mean_mass(model),
    };
    let t = build_t(model)?;
    let v = build_v(model)?;
    let c = dec.c.scaled(m.sqrt())?;
    let ctvc = matmul(&matmul(&transpose(&c), &v.to_gen())?, &c)?;
    let k = ctvc.diag();
    let lambdas = k.iter().map(|x| x / m).collect();

    let ci = inverse(&c)?;
    let kinetic = matmul(&matmul(&ci, &t.to_gen())?, &transpose(&ci))?;
    let target = GenMatrix::identity(dec.n())?.scaled(1.0 / m)?;
    let residual_kinetic = m * kinetic.max_abs_diff(&target);
    check(
        "m ||C^-1 T C^-t - I/m||",
        residual_kinetic,
        RESIDUAL_TOL * (1.0 + m * t.max_abs()),
    )?;

    Ok(MassNormalizedDecomposition {
        m_ref: m,
        k,
        c,
        lambdas,
        residual_kinetic,
    })
}
