//! One-parameter scans over coupling strengths.
//!
//! Each grid point is classified and decomposed; wherever the verdict
//! changes between neighbouring points the edge is bracketed by bisection.

use crate::boundstate::{classify, Verdict};
use crate::diagonalize::decompose;
use crate::error::{Error, Result};
use crate::model::OscillatorModel;

/// Bracket width at which bisection stops.
pub const FLIP_WIDTH: f64 = 1e-9;

const MAX_BISECTIONS: usize = 200;

/// Which couplings a sweep drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// A single pair, 0-based.
    Coupling(usize, usize),
    /// Every pair `i < j` set to the same value.
    AllCouplings,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub verdict: Verdict,
    pub lambdas: Vec<f64>,
}

/// Edge between two verdicts, bracketed to `hi - lo < FLIP_WIDTH` (or the
/// narrowest width floating point allows).
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub lo: f64,
    pub hi: f64,
    pub verdict_lo: Verdict,
    pub verdict_hi: Verdict,
}

impl SweepReport {
    /// Edges where the verdict enters or leaves `verdict`.
    pub fn edges_of(&self, verdict: Verdict) -> impl Iterator<Item = &Transition> {
        self.transitions
            .iter()
            .filter(move |t| t.verdict_lo == verdict || t.verdict_hi == verdict)
    }
}

impl Transition {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub params: Vec<SweepParam>,
    pub rows: Vec<SweepRow>,
    pub transitions: Vec<Transition>,
}

/// Copy of `model` with the swept couplings set to `value`.
pub fn with_param(model: &OscillatorModel, params: &[SweepParam], value: f64) -> OscillatorModel {
    let mut m = model.clone();
    let n = m.n();
    for p in params {
        match *p {
            SweepParam::Coupling(i, j) => m.set_coupling(i, j, value),
            SweepParam::AllCouplings => {
                for i in 0..n {
                    for j in (i + 1)..n {
                        m.set_coupling(i, j, value);
                    }
                }
            }
        }
    }
    m
}

fn verdict_at(model: &OscillatorModel, params: &[SweepParam], value: f64) -> Result<Verdict> {
    Ok(classify(&with_param(model, params, value))?.verdict)
}

/// Bisects `[lo, hi]` for the point where the verdict stops being the one
/// found at `lo`, down to `FLIP_WIDTH`.
pub fn locate_flip(
    model: &OscillatorModel,
    params: &[SweepParam],
    mut lo: f64,
    mut hi: f64,
) -> Result<Transition> {
    let v_lo = verdict_at(model, params, lo)?;
    let mut v_hi = verdict_at(model, params, hi)?;
    if v_lo == v_hi {
        return Err(Error::InvalidArgument(format!(
            "verdict is {} at both {lo} and {hi}",
            v_lo.as_str()
        )));
    }
    for _ in 0..MAX_BISECTIONS {
        if hi - lo < FLIP_WIDTH {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = verdict_at(model, params, mid)?;
        if v == v_lo {
            lo = mid;
        } else {
            hi = mid;
            v_hi = v;
        }
    }
    Ok(Transition {
        lo,
        hi,
        verdict_lo: v_lo,
        verdict_hi: v_hi,
    })
}

/// Every verdict change inside `[lo, hi]`, scanning upward. A step may hide
/// more than one change (e.g. a thin marginal band between bound and
/// unbound), so the scan restarts just above each located edge.
fn edges_between(
    model: &OscillatorModel,
    params: &[SweepParam],
    lo: f64,
    hi: f64,
) -> Result<Vec<Transition>> {
    let target = verdict_at(model, params, hi)?;
    let mut out = Vec::new();
    let mut start = lo;
    // three verdicts allow at most two edges per step
    while out.len() < 2 {
        let t = locate_flip(model, params, start, hi)?;
        let done = t.verdict_hi == target;
        start = t.hi;
        out.push(t);
        if done {
            break;
        }
    }
    Ok(out)
}

/// Evaluates `steps + 1` evenly spaced values from `from` to `to` and
/// localises every verdict change between neighbours.
pub fn sweep(
    model: &OscillatorModel,
    params: &[SweepParam],
    from: f64,
    to: f64,
    steps: usize,
) -> Result<SweepReport> {
    if params.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one parameter".into()));
    }
    if steps == 0 || !from.is_finite() || !to.is_finite() || !(from < to) {
        return Err(Error::InvalidArgument(format!(
            "sweep range must satisfy from < to with steps >= 1 (got {from}..{to}, {steps} steps)"
        )));
    }
    let n = model.n();
    for p in params {
        if let SweepParam::Coupling(i, j) = *p {
            if i == j || i >= n || j >= n {
                return Err(Error::InvalidArgument(format!(
                    "coupling ({}, {}) is not a valid pair for {n} oscillators",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    model.ensure_valid()?;

    let mut rows = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let value = if i == steps {
            to
        } else {
            from + (to - from) * (i as f64) / (steps as f64)
        };
        let m = with_param(model, params, value);
        let verdict = classify(&m)?.verdict;
        let lambdas = decompose(&m)?.lambdas;
        rows.push(SweepRow {
            value,
            verdict,
            lambdas,
        });
    }

    let mut transitions = Vec::new();
    for w in rows.windows(2) {
        if w[0].verdict != w[1].verdict {
            transitions.extend(edges_between(model, params, w[0].value, w[1].value)?);
        }
    }
    Ok(SweepReport {
        params: params.to_vec(),
        rows,
        transitions,
    })
}
