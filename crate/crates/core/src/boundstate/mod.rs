//! Bound-state classification.
//!
//! Bound states exist iff every `lambda_i > 0`, i.e. iff `S` is positive
//! definite, which by Sylvester's criterion holds iff every leading
//! principal minor of `S` is positive. [`classify`] applies the criterion
//! with a small dead zone around zero and cross-checks it against the
//! closed-form conditions available for two to five oscillators.

pub mod appendix;

use crate::diagonalize::compute_s;
use crate::error::{Error, Result};
use crate::linalg::{
    char_poly_coeffs, jacobi_eigh, leading_principal_minors, JACOBI_MAX_SWEEPS, JACOBI_TOL,
};
use crate::model::{build_t, build_v, OscillatorModel};

use appendix::{evaluate_terms, QUARTIC_TERMS, QUINTIC_TERMS};

pub use appendix::{audit_terms, Term, TermMismatch};

/// Dead-zone scale: minor `k` counts as zero when
/// `|minor| <= MARGIN_TOL * (1 + ||S||_max^k)`.
pub const MARGIN_TOL: f64 = 1e-10;

/// Relative tolerance for closed-form cross-checks.
pub const CHECK_REL_TOL: f64 = 1e-8;

/// Absolute floor for closed-form checks, relative to the cancellation
/// scale of the quantity being compared.
const CHECK_FLOOR: f64 = 1e-12;

/// Tolerance on `Delta >= 0`, relative to `1 + |a|^6`.
pub const DISCRIMINANT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Bound,
    Unbound,
    Marginal,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Bound => "bound",
            Verdict::Unbound => "unbound",
            Verdict::Marginal => "marginal",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinorStatus {
    Positive,
    Negative,
    NearZero,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinorEntry {
    pub k: usize,
    pub value: f64,
    pub margin: f64,
    pub status: MinorStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormCheck {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl ClosedFormCheck {
    fn within(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            expected,
            actual,
            tolerance,
            passed: (expected - actual).abs() <= tolerance,
        }
    }

    /// Relative comparison with an absolute floor proportional to `scale`.
    fn relative(name: impl Into<String>, expected: f64, actual: f64, scale: f64) -> Self {
        let tol = CHECK_REL_TOL * expected.abs().max(actual.abs()) + CHECK_FLOOR * scale;
        Self::within(name, expected, actual, tol)
    }

    fn agreement(name: impl Into<String>, expected: bool, actual: bool) -> Self {
        let f = |b: bool| if b { 1.0 } else { 0.0 };
        Self::within(name, f(expected), f(actual), 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundStateReport {
    pub minors: Vec<f64>,
    pub verdict: Verdict,
    pub per_minor: Vec<MinorEntry>,
    /// Eigenvalues of `S`, ascending.
    pub eigenvalues: Vec<f64>,
    pub closed_form_checks: Vec<ClosedFormCheck>,
    /// Cubic discriminant, three oscillators only.
    pub discriminant: Option<f64>,
}

impl BoundStateReport {
    pub fn all_checks_passed(&self) -> bool {
        self.closed_form_checks.iter().all(|c| c.passed)
    }

    /// First minor that is not clearly positive.
    pub fn first_failing_minor(&self) -> Option<&MinorEntry> {
        self.per_minor
            .iter()
            .find(|m| m.status != MinorStatus::Positive)
    }
}

pub fn minor_margin(s_max: f64, k: usize) -> f64 {
    MARGIN_TOL * (1.0 + s_max.powi(k as i32))
}

/// Verdict from leading principal minors.
///
/// Any clearly negative minor rules out positive definiteness, so it wins
/// over a near-zero one: `Unbound` if some minor is below `-margin`,
/// otherwise `Marginal` if some minor is inside the dead zone, otherwise
/// `Bound`.
pub fn verdict_from_minors(minors: &[f64], s_max: f64) -> (Verdict, Vec<MinorEntry>) {
    let per_minor: Vec<MinorEntry> = minors
        .iter()
        .enumerate()
        .map(|(i, &value)| {
            let k = i + 1;
            let margin = minor_margin(s_max, k);
            let status = if value > margin {
                MinorStatus::Positive
            } else if value < -margin {
                MinorStatus::Negative
            } else {
                MinorStatus::NearZero
            };
            MinorEntry {
                k,
                value,
                margin,
                status,
            }
        })
        .collect();
    let verdict = if per_minor.iter().any(|m| m.status == MinorStatus::Negative) {
        Verdict::Unbound
    } else if per_minor.iter().any(|m| m.status == MinorStatus::NearZero) {
        Verdict::Marginal
    } else {
        Verdict::Bound
    };
    (verdict, per_minor)
}

fn s_matrix(model: &OscillatorModel) -> Result<crate::linalg::SymMatrix> {
    model.ensure_valid()?;
    compute_s(&build_t(model)?, &build_v(model)?)
}

/// `4^(k/2) * m_1 ... m_k * minor_k(S)`. For a diagonal kinetic matrix this
/// is `4^(k/2) det(V_k)`, the quantity the explicit polynomial conditions
/// evaluate.
pub fn scaled_minor(model: &OscillatorModel, k: usize) -> Result<f64> {
    let s = s_matrix(model)?;
    if k == 0 || k > s.n() {
        return Err(Error::WrongDimension {
            expected: k,
            found: s.n(),
        });
    }
    let minor = leading_principal_minors(&s.leading(k)?)[k - 1];
    let mass: f64 = model.masses[..k].iter().product();
    Ok(4.0_f64.powi((k / 2) as i32) * mass * minor)
}

pub fn classify(model: &OscillatorModel) -> Result<BoundStateReport> {
    let s = s_matrix(model)?;
    let n = s.n();
    let minors = leading_principal_minors(&s);
    let (verdict, per_minor) = verdict_from_minors(&minors, s.max_abs());
    let eigenvalues = jacobi_eigh(&s, JACOBI_TOL, JACOBI_MAX_SWEEPS)?.values;

    let mut checks = Vec::new();
    if verdict != Verdict::Marginal {
        let scale = s.max_abs().max(1.0);
        let eig_bound = eigenvalues.iter().all(|&l| l > 1e-12 * scale);
        checks.push(ClosedFormCheck::agreement(
            "sylvester_vs_eigenvalues",
            eig_bound,
            verdict == Verdict::Bound,
        ));
    }

    let mut discriminant = None;
    if model.has_diagonal_kinetic() {
        let scaled = |k: usize| -> f64 {
            let mass: f64 = model.masses[..k].iter().product();
            4.0_f64.powi((k / 2) as i32) * mass * minors[k - 1]
        };
        match n {
            2 => {
                let (_, cond2) = n2_conditions(model)?;
                let c = &model.stiffness_diag;
                let d = model.coupling(0, 1);
                let scale = 4.0 * (c[0] * c[1]).abs() + d * d;
                checks.push(ClosedFormCheck::relative(
                    "n2_cond2_vs_scaled_minor_2",
                    scaled(2),
                    cond2,
                    scale,
                ));
                let (l1, l2) = n2_closed_eigenvalues(model)?;
                let spread = eigenvalues[0].abs().max(eigenvalues[1].abs());
                checks.push(ClosedFormCheck::relative(
                    "n2_lambda_1_closed_vs_jacobi",
                    eigenvalues[0],
                    l1,
                    spread,
                ));
                checks.push(ClosedFormCheck::relative(
                    "n2_lambda_2_closed_vs_jacobi",
                    eigenvalues[1],
                    l2,
                    spread,
                ));
            }
            3 => {
                let conds = n3_conditions(model)?;
                checks.push(ClosedFormCheck::relative(
                    "n3_cond1_vs_scaled_minor_2",
                    scaled(2),
                    conds.cond1,
                    conds.cond1_scale,
                ));
                checks.push(ClosedFormCheck::relative(
                    "n3_cond2_vs_scaled_minor_3",
                    scaled(3),
                    conds.cond2,
                    conds.cond2_scale,
                ));
                let cubic = n3_charpoly(model)?;
                let a_mat = crate::diagonalize::compute_a(&build_t(model)?, &build_v(model)?)?;
                let fl = char_poly_coeffs(&a_mat);
                let scale = cubic.a.abs().max(1.0);
                checks.push(ClosedFormCheck::relative("n3_a_vs_faddeev_leverrier", -fl[1], cubic.a, scale));
                checks.push(ClosedFormCheck::relative(
                    "n3_b_vs_faddeev_leverrier",
                    fl[2],
                    cubic.b,
                    scale.powi(2),
                ));
                checks.push(ClosedFormCheck::relative(
                    "n3_c_vs_faddeev_leverrier",
                    -fl[3],
                    cubic.c,
                    scale.powi(3),
                ));
                let delta = n3_discriminant(cubic.a, cubic.b, cubic.c);
                let l = &eigenvalues;
                let from_eigs =
                    ((l[0] - l[1]) * (l[0] - l[2]) * (l[1] - l[2])).powi(2);
                checks.push(ClosedFormCheck::within(
                    "n3_discriminant_vs_eigenvalue_gaps",
                    from_eigs,
                    delta,
                    CHECK_REL_TOL * from_eigs.abs() + DISCRIMINANT_TOL * (1.0 + scale.powi(6)),
                ));
                discriminant = Some(delta);
                if verdict != Verdict::Marginal {
                    let poly = necessary_coefficient_conditions(model)?;
                    checks.push(ClosedFormCheck::agreement(
                        "n3_polynomial_route_vs_sylvester",
                        verdict == Verdict::Bound,
                        poly.polynomial_route_bound(),
                    ));
                    checks.push(ClosedFormCheck::agreement(
                        "n3_conditions_vs_sylvester",
                        verdict == Verdict::Bound,
                        conds.is_bound(),
                    ));
                }
            }
            4 => {
                let (value, mag) = evaluate_terms(&QUARTIC_TERMS, model);
                checks.push(ClosedFormCheck::relative(
                    "n4_condition_vs_scaled_minor_4",
                    scaled(4),
                    value,
                    mag,
                ));
            }
            5 => {
                let (value, mag) = evaluate_terms(&QUARTIC_TERMS, model);
                checks.push(ClosedFormCheck::relative(
                    "n4_condition_vs_scaled_minor_4",
                    scaled(4),
                    value,
                    mag,
                ));
                let (value, mag) = evaluate_terms(&QUINTIC_TERMS, model);
                checks.push(ClosedFormCheck::relative(
                    "n5_condition_vs_scaled_minor_5",
                    scaled(5),
                    value,
                    mag,
                ));
            }
            _ => {}
        }
    }

    Ok(BoundStateReport {
        minors,
        verdict,
        per_minor,
        eigenvalues,
        closed_form_checks: checks,
        discriminant,
    })
}

fn require(model: &OscillatorModel, n: usize) -> Result<()> {
    if model.n() != n {
        return Err(Error::WrongDimension {
            expected: n,
            found: model.n(),
        });
    }
    if !model.has_diagonal_kinetic() {
        return Err(Error::NonDiagonalKinetic);
    }
    model.ensure_valid()
}

/// `(m2 C1 + m1 C2, 4 C1 C2 - C3^2)`; both positive iff bound.
pub fn n2_conditions(model: &OscillatorModel) -> Result<(f64, f64)> {
    require(model, 2)?;
    let (m1, m2) = (model.masses[0], model.masses[1]);
    let (c1, c2) = (model.stiffness_diag[0], model.stiffness_diag[1]);
    let c3 = model.coupling(0, 1);
    Ok((m2 * c1 + m1 * c2, 4.0 * c1 * c2 - c3 * c3))
}

/// Closed-form eigenvalues `(s -+ R) / (2 m1 m2)` with `s = m1 C2 + m2 C1`
/// and `R = sqrt((m2 C1 - m1 C2)^2 + m1 m2 C3^2)`.
///
/// The root with the cancelling sign is recovered from the product of the
/// roots, `(4 C1 C2 - C3^2) / (4 m1 m2)`, which is algebraically identical
/// and keeps full relative accuracy for small eigenvalues.
pub fn n2_closed_eigenvalues(model: &OscillatorModel) -> Result<(f64, f64)> {
    require(model, 2)?;
    let (m1, m2) = (model.masses[0], model.masses[1]);
    let (c1, c2) = (model.stiffness_diag[0], model.stiffness_diag[1]);
    let c3 = model.coupling(0, 1);
    let s = m1 * c2 + m2 * c1;
    let r = ((m2 * c1 - m1 * c2).powi(2) + m1 * m2 * c3 * c3).sqrt();
    let denom = 2.0 * m1 * m2;
    let product = (4.0 * c1 * c2 - c3 * c3) / (4.0 * m1 * m2);
    if s >= 0.0 {
        let l2 = (s + r) / denom;
        let l1 = if l2 != 0.0 { product / l2 } else { 0.0 };
        Ok((l1, l2))
    } else {
        let l1 = (s - r) / denom;
        let l2 = if l1 != 0.0 { product / l1 } else { 0.0 };
        Ok((l1, l2))
    }
}

/// Coefficients of `x^3 - a x^2 + b x - c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

pub fn n3_charpoly(model: &OscillatorModel) -> Result<CubicCoefficients> {
    require(model, 3)?;
    let m = &model.masses;
    let (w1, w2, w3) = (model.omega_sq(0), model.omega_sq(1), model.omega_sq(2));
    let (d12, d13, d23) = (
        model.coupling(0, 1),
        model.coupling(0, 2),
        model.coupling(1, 2),
    );
    let a = w1 + w2 + w3;
    let b = w1 * w2 + w1 * w3 + w2 * w3
        - d12 * d12 / (4.0 * m[0] * m[1])
        - d13 * d13 / (4.0 * m[0] * m[2])
        - d23 * d23 / (4.0 * m[1] * m[2]);
    let c = w1 * w2 * w3
        - (d12 * d12 * w3 / (4.0 * m[0] * m[1]) + d13 * d13 * w2 / (4.0 * m[0] * m[2])
            + d23 * d23 * w1 / (4.0 * m[1] * m[2])
            - d12 * d13 * d23 / (4.0 * m[0] * m[1] * m[2]));
    Ok(CubicCoefficients { a, b, c })
}

/// Discriminant of `x^3 - a x^2 + b x - c`, equal to the product of
/// squared root differences.
pub fn n3_discriminant(a: f64, b: f64, c: f64) -> f64 {
    a * a * b * b - 4.0 * a * a * a * c + 18.0 * a * b * c - 4.0 * b * b * b - 27.0 * c * c
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct N3Conditions {
    pub omega1_sq: f64,
    /// `4 m1 m2 w1 w2 - D12^2`
    pub cond1: f64,
    /// `4 m1 m2 m3 w1 w2 w3 + D12 D13 D23 - m1 w1 D23^2 - m2 w2 D13^2 - m3 w3 D12^2`
    pub cond2: f64,
    /// Sums of term magnitudes, for judging cancellation.
    pub cond1_scale: f64,
    pub cond2_scale: f64,
}

impl N3Conditions {
    /// Includes the first-minor condition `omega_1^2 > 0`.
    pub fn is_bound(&self) -> bool {
        self.omega1_sq > 0.0 && self.cond1 > 0.0 && self.cond2 > 0.0
    }
}

pub fn n3_conditions(model: &OscillatorModel) -> Result<N3Conditions> {
    require(model, 3)?;
    Ok(n3_leading_conditions(model))
}

fn n3_leading_conditions(model: &OscillatorModel) -> N3Conditions {
    let m = &model.masses;
    let (w1, w2, w3) = (model.omega_sq(0), model.omega_sq(1), model.omega_sq(2));
    let (d12, d13, d23) = (
        model.coupling(0, 1),
        model.coupling(0, 2),
        model.coupling(1, 2),
    );
    let c1_terms = [4.0 * m[0] * m[1] * w1 * w2, -d12 * d12];
    let c2_terms = [
        4.0 * m[0] * m[1] * m[2] * w1 * w2 * w3,
        d12 * d13 * d23,
        -m[0] * w1 * d23 * d23,
        -m[1] * w2 * d13 * d13,
        -m[2] * w3 * d12 * d12,
    ];
    N3Conditions {
        omega1_sq: w1,
        cond1: c1_terms.iter().sum(),
        cond2: c2_terms.iter().sum(),
        cond1_scale: c1_terms.iter().map(|x| x.abs()).sum(),
        cond2_scale: c2_terms.iter().map(|x| x.abs()).sum(),
    }
}

/// Four-oscillator polynomial condition (must be `> 0`, together with the
/// three-oscillator ones).
pub fn n4_condition(model: &OscillatorModel) -> Result<f64> {
    require(model, 4)?;
    Ok(evaluate_terms(&QUARTIC_TERMS, model).0)
}

/// Five-oscillator polynomial condition.
pub fn n5_condition(model: &OscillatorModel) -> Result<f64> {
    require(model, 5)?;
    Ok(evaluate_terms(&QUINTIC_TERMS, model).0)
}

/// Polynomial-route data for three oscillators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientConditions {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub discriminant: f64,
    pub b_positive: bool,
    pub c_positive: bool,
    /// `Delta >= -DISCRIMINANT_TOL * (1 + |a|^6)`.
    pub discriminant_nonnegative: bool,
    pub a_positive: bool,
}

impl CoefficientConditions {
    /// All three roots real and positive.
    ///
    /// `b > 0`, `c > 0` and `Delta >= 0` alone also admit one positive and
    /// two negative roots; `a > 0` excludes that. In the frequency
    /// parameterisation `a` is a sum of `omega_i^2` and always positive.
    pub fn polynomial_route_bound(&self) -> bool {
        self.a_positive && self.b_positive && self.c_positive && self.discriminant_nonnegative
    }
}

pub fn necessary_coefficient_conditions(model: &OscillatorModel) -> Result<CoefficientConditions> {
    let CubicCoefficients { a, b, c } = n3_charpoly(model)?;
    let discriminant = n3_discriminant(a, b, c);
    Ok(CoefficientConditions {
        a,
        b,
        c,
        discriminant,
        b_positive: b > 0.0,
        c_positive: c > 0.0,
        discriminant_nonnegative: discriminant >= -DISCRIMINANT_TOL * (1.0 + a.abs().powi(6)),
        a_positive: a > 0.0,
    })
}
