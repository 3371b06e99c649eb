//! Explicit bound-state polynomials for four and five oscillators.
//!
//! Each polynomial is stored as a list of terms (integer coefficient times a
//! monomial in `D_ij`, `m_i` and `omega_i^2`, 1-based indices). The value of
//! the `k`-oscillator polynomial equals
//! `4^(k/2) * m_1 ... m_k * det(S_k)`, the scaled `k`-th leading principal
//! minor of `S`, i.e. `4^(k/2) det(V_k)`. [`audit_terms`] expands that
//! determinant symbolically (Leibniz formula) and compares it term by term
//! against a table, so a mistyped entry is reported by position.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::OscillatorModel;

/// One monomial of an appendix polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Term {
    pub coeff: i32,
    /// Coupling factors, repeated for powers: `D12^2` is `[(1, 2), (1, 2)]`.
    pub couplings: &'static [(usize, usize)],
    pub masses: &'static [usize],
    /// Indices `i` of `omega_i^2` factors.
    pub omegas_sq: &'static [usize],
}

const fn term(
    coeff: i32,
    couplings: &'static [(usize, usize)],
    masses: &'static [usize],
    omegas_sq: &'static [usize],
) -> Term {
    Term {
        coeff,
        couplings,
        masses,
        omegas_sq,
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.coeff)?;
        let mut i = 0;
        while i < self.couplings.len() {
            let p = self.couplings[i];
            let mut pow = 1;
            while i + pow < self.couplings.len() && self.couplings[i + pow] == p {
                pow += 1;
            }
            write!(f, " D{}{}", p.0, p.1)?;
            if pow > 1 {
                write!(f, "^{pow}")?;
            }
            i += pow;
        }
        for m in self.masses {
            write!(f, " m{m}")?;
        }
        for w in self.omegas_sq {
            write!(f, " w{w}^2")?;
        }
        Ok(())
    }
}

pub const QUARTIC_TERMS: [Term; 17] = [
    term(1, &[(1, 2), (1, 2), (3, 4), (3, 4)], &[], &[]),
    term(-4, &[(1, 2), (1, 2)], &[3, 4], &[3, 4]),
    term(4, &[(1, 2), (1, 3), (2, 3)], &[4], &[4]),
    term(-2, &[(1, 2), (1, 3), (2, 4), (3, 4)], &[], &[]),
    term(-2, &[(1, 2), (1, 4), (2, 3), (3, 4)], &[], &[]),
    term(4, &[(1, 2), (1, 4), (2, 4)], &[3], &[3]),
    term(1, &[(1, 3), (1, 3), (2, 4), (2, 4)], &[], &[]),
    term(-4, &[(1, 3), (1, 3)], &[2, 4], &[2, 4]),
    term(-2, &[(1, 3), (1, 4), (2, 3), (2, 4)], &[], &[]),
    term(4, &[(1, 3), (1, 4), (3, 4)], &[2], &[2]),
    term(1, &[(1, 4), (1, 4), (2, 3), (2, 3)], &[], &[]),
    term(-4, &[(1, 4), (1, 4)], &[2, 3], &[2, 3]),
    term(-4, &[(2, 3), (2, 3)], &[1, 4], &[1, 4]),
    term(4, &[(2, 3), (2, 4), (3, 4)], &[1], &[1]),
    term(-4, &[(2, 4), (2, 4)], &[1, 3], &[1, 3]),
    term(-4, &[(3, 4), (3, 4)], &[1, 2], &[1, 2]),
    term(16, &[], &[1, 2, 3, 4], &[1, 2, 3, 4]),
];

pub const QUINTIC_TERMS: [Term; 73] = [
    term(1, &[(1, 2), (1, 2), (3, 4), (3, 4)], &[5], &[5]),
    term(-1, &[(1, 2), (1, 2), (3, 4), (3, 5), (4, 5)], &[], &[]),
    term(1, &[(1, 2), (1, 2), (3, 5), (3, 5)], &[4], &[4]),
    term(1, &[(1, 2), (1, 2), (4, 5), (4, 5)], &[3], &[3]),
    term(-4, &[(1, 2), (1, 2)], &[3, 4, 5], &[3, 4, 5]),
    term(-1, &[(1, 2), (1, 3), (2, 3), (4, 5), (4, 5)], &[], &[]),
    term(4, &[(1, 2), (1, 3), (2, 3)], &[4, 5], &[4, 5]),
    term(-2, &[(1, 2), (1, 3), (2, 4), (3, 4)], &[5], &[5]),
    term(1, &[(1, 2), (1, 3), (2, 4), (3, 5), (4, 5)], &[], &[]),
    term(1, &[(1, 2), (1, 3), (2, 5), (3, 4), (4, 5)], &[], &[]),
    term(-2, &[(1, 2), (1, 3), (2, 5), (3, 5)], &[4], &[4]),
    term(-2, &[(1, 2), (1, 4), (2, 3), (3, 4)], &[5], &[5]),
    term(1, &[(1, 2), (1, 4), (2, 3), (3, 5), (4, 5)], &[], &[]),
    term(-1, &[(1, 2), (1, 4), (2, 4), (3, 5), (3, 5)], &[], &[]),
    term(4, &[(1, 2), (1, 4), (2, 4)], &[3, 5], &[3, 5]),
    term(1, &[(1, 2), (1, 4), (2, 5), (3, 4), (3, 5)], &[], &[]),
    term(-2, &[(1, 2), (1, 4), (2, 5), (4, 5)], &[3], &[3]),
    term(1, &[(1, 2), (1, 5), (2, 3), (3, 4), (4, 5)], &[], &[]),
    term(-2, &[(1, 2), (1, 5), (2, 3), (3, 5)], &[4], &[4]),
    term(1, &[(1, 2), (1, 5), (2, 4), (3, 4), (3, 5)], &[], &[]),
    term(-2, &[(1, 2), (1, 5), (2, 4), (4, 5)], &[3], &[3]),
    term(-1, &[(1, 2), (1, 5), (2, 5), (3, 4), (3, 4)], &[], &[]),
    term(4, &[(1, 2), (1, 5), (2, 5)], &[3, 4], &[3, 4]),
    term(1, &[(1, 3), (1, 3), (2, 4), (2, 4)], &[5], &[5]),
    term(-1, &[(1, 3), (1, 3), (2, 4), (2, 5), (4, 5)], &[], &[]),
    term(1, &[(1, 3), (1, 3), (2, 5), (2, 5)], &[4], &[4]),
    term(1, &[(1, 3), (1, 3), (4, 5), (4, 5)], &[2], &[2]),
    term(-4, &[(1, 3), (1, 3)], &[2, 4, 5], &[2, 4, 5]),
    term(-2, &[(1, 3), (1, 4), (2, 3), (2, 4)], &[5], &[5]),
    term(1, &[(1, 3), (1, 4), (2, 3), (2, 5), (4, 5)], &[], &[]),
    term(1, &[(1, 3), (1, 4), (2, 4), (2, 5), (3, 5)], &[], &[]),
    term(-1, &[(1, 3), (1, 4), (2, 5), (2, 5), (3, 4)], &[], &[]),
    term(4, &[(1, 3), (1, 4), (3, 4)], &[2, 5], &[2, 5]),
    term(-2, &[(1, 3), (1, 4), (3, 5), (4, 5)], &[2], &[2]),
    term(1, &[(1, 3), (1, 5), (2, 3), (2, 4), (4, 5)], &[], &[]),
    term(-2, &[(1, 3), (1, 5), (2, 3), (2, 5)], &[4], &[4]),
    term(-1, &[(1, 3), (1, 5), (2, 4), (2, 4), (3, 5)], &[], &[]),
    term(1, &[(1, 3), (1, 5), (2, 4), (2, 5), (3, 4)], &[], &[]),
    term(-2, &[(1, 3), (1, 5), (3, 4), (4, 5)], &[2], &[2]),
    term(4, &[(1, 3), (1, 5), (3, 5)], &[2, 4], &[2, 4]),
    term(1, &[(1, 4), (1, 4), (2, 3), (2, 3)], &[5], &[5]),
    term(-1, &[(1, 4), (1, 4), (2, 3), (2, 5), (3, 5)], &[], &[]),
    term(1, &[(1, 4), (1, 4), (2, 5), (2, 5)], &[3], &[3]),
    term(1, &[(1, 4), (1, 4), (3, 5), (3, 5)], &[2], &[2]),
    term(-4, &[(1, 4), (1, 4)], &[2, 3, 5], &[2, 3, 5]),
    term(-1, &[(1, 4), (1, 5), (2, 3), (2, 3), (4, 5)], &[], &[]),
    term(1, &[(1, 4), (1, 5), (2, 3), (2, 4), (3, 5)], &[], &[]),
    term(1, &[(1, 4), (1, 5), (2, 3), (2, 5), (3, 4)], &[], &[]),
    term(-2, &[(1, 4), (1, 5), (2, 4), (2, 5)], &[3], &[3]),
    term(-2, &[(1, 4), (1, 5), (3, 4), (3, 5)], &[2], &[2]),
    term(4, &[(1, 4), (1, 5), (4, 5)], &[2, 3], &[2, 3]),
    term(1, &[(1, 5), (1, 5), (2, 3), (2, 3)], &[4], &[4]),
    term(-1, &[(1, 5), (1, 5), (2, 3), (2, 4), (3, 4)], &[], &[]),
    term(1, &[(1, 5), (1, 5), (2, 4), (2, 4)], &[3], &[3]),
    term(1, &[(1, 5), (1, 5), (3, 4), (3, 4)], &[2], &[2]),
    term(-4, &[(1, 5), (1, 5)], &[2, 3, 4], &[2, 3, 4]),
    term(1, &[(2, 3), (2, 3), (4, 5), (4, 5)], &[1], &[1]),
    term(-4, &[(2, 3), (2, 3)], &[1, 4, 5], &[1, 4, 5]),
    term(4, &[(2, 3), (2, 4), (3, 4)], &[1, 5], &[1, 5]),
    term(-2, &[(2, 3), (2, 4), (3, 5), (4, 5)], &[1], &[1]),
    term(-2, &[(2, 3), (2, 5), (3, 4), (4, 5)], &[1], &[1]),
    term(4, &[(2, 3), (2, 5), (3, 5)], &[1, 4], &[1, 4]),
    term(1, &[(2, 4), (2, 4), (3, 5), (3, 5)], &[1], &[1]),
    term(-4, &[(2, 4), (2, 4)], &[1, 3, 5], &[1, 3, 5]),
    term(-2, &[(2, 4), (2, 5), (3, 4), (3, 5)], &[1], &[1]),
    term(4, &[(2, 4), (2, 5), (4, 5)], &[1, 3], &[1, 3]),
    term(1, &[(2, 5), (2, 5), (3, 4), (3, 4)], &[1], &[1]),
    term(-4, &[(2, 5), (2, 5)], &[1, 3, 4], &[1, 3, 4]),
    term(-4, &[(3, 4), (3, 4)], &[1, 2, 5], &[1, 2, 5]),
    term(4, &[(3, 4), (3, 5), (4, 5)], &[1, 2], &[1, 2]),
    term(-4, &[(3, 5), (3, 5)], &[1, 2, 4], &[1, 2, 4]),
    term(-4, &[(4, 5), (4, 5)], &[1, 2, 3], &[1, 2, 3]),
    term(16, &[], &[1, 2, 3, 4, 5], &[1, 2, 3, 4, 5]),
];
/// Number of oscillators a polynomial covers; also the number of pairs
/// needed to index its couplings.
const MAX_K: usize = 5;
const PAIRS: usize = MAX_K * (MAX_K - 1) / 2;

/// Exponent vector over `D_ij` (pairs in lexicographic order), `m_i` and
/// `omega_i^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Monomial {
    d: [u8; PAIRS],
    m: [u8; MAX_K],
    w: [u8; MAX_K],
}

fn pair_index(i: usize, j: usize) -> usize {
    // 0-based i < j < MAX_K
    let (i, j) = (i.min(j), i.max(j));
    i * (2 * MAX_K - i - 1) / 2 + (j - i - 1)
}

impl Term {
    fn monomial(&self) -> Option<Monomial> {
        let mut mono = Monomial {
            d: [0; PAIRS],
            m: [0; MAX_K],
            w: [0; MAX_K],
        };
        for &(i, j) in self.couplings {
            if i == j || i == 0 || j == 0 || i > MAX_K || j > MAX_K {
                return None;
            }
            mono.d[pair_index(i - 1, j - 1)] += 1;
        }
        for &i in self.masses {
            if i == 0 || i > MAX_K {
                return None;
            }
            mono.m[i - 1] += 1;
        }
        for &i in self.omegas_sq {
            if i == 0 || i > MAX_K {
                return None;
            }
            mono.w[i - 1] += 1;
        }
        Some(mono)
    }

    /// Numerical value for the given model (1-based indices into it).
    pub fn evaluate(&self, model: &OscillatorModel) -> f64 {
        let mut x = self.coeff as f64;
        for &(i, j) in self.couplings {
            x *= model.coupling(i - 1, j - 1);
        }
        for &i in self.masses {
            x *= model.masses[i - 1];
        }
        for &i in self.omegas_sq {
            x *= model.omega_sq(i - 1);
        }
        x
    }
}

/// Compensated (Neumaier) sum of the term values, plus the sum of their
/// magnitudes as a cancellation scale.
pub fn evaluate_terms(terms: &[Term], model: &OscillatorModel) -> (f64, f64) {
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut mag = 0.0_f64;
    for t in terms {
        let x = t.evaluate(model);
        mag += x.abs();
        let s = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - s) + x;
        } else {
            comp += (x - s) + sum;
        }
        sum = s;
    }
    (sum + comp, mag)
}

/// Coefficients of `4^(k/2) det(V_k)` with `V_ii = m_i omega_i^2` and
/// `V_ij = D_ij / 2`, by summing over all permutations.
fn reference_expansion(k: usize) -> BTreeMap<Monomial, f64> {
    assert!((1..=MAX_K).contains(&k));
    let scale = 4.0_f64.powi((k / 2) as i32);
    let mut out: BTreeMap<Monomial, f64> = BTreeMap::new();
    let mut perm: Vec<usize> = (0..k).collect();
    permute(&mut perm, 0, &mut |p| {
        let mut mono = Monomial {
            d: [0; PAIRS],
            m: [0; MAX_K],
            w: [0; MAX_K],
        };
        let mut coeff = scale * parity(p);
        for (i, &j) in p.iter().enumerate() {
            if i == j {
                mono.m[i] += 1;
                mono.w[i] += 1;
            } else {
                mono.d[pair_index(i, j)] += 1;
                coeff *= 0.5;
            }
        }
        *out.entry(mono).or_insert(0.0) += coeff;
    });
    out.retain(|_, c| *c != 0.0);
    out
}

fn permute(p: &mut Vec<usize>, start: usize, visit: &mut impl FnMut(&[usize])) {
    if start == p.len() {
        visit(p);
        return;
    }
    for i in start..p.len() {
        p.swap(start, i);
        permute(p, start + 1, visit);
        p.swap(start, i);
    }
}

fn parity(p: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// First disagreement between a term table and the determinant expansion.
#[derive(Debug, Clone, PartialEq)]
pub struct TermMismatch {
    /// Position in the table, or `None` for a term the table is missing.
    pub index: Option<usize>,
    pub term: String,
    pub transcribed: f64,
    pub expected: f64,
}

impl fmt::Display for TermMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            Some(i) => write!(
                f,
                "term #{i} [{}]: coefficient {} but determinant expansion gives {}",
                self.term, self.transcribed, self.expected
            ),
            None => write!(
                f,
                "missing term [{}] with coefficient {}",
                self.term, self.expected
            ),
        }
    }
}

fn render(mono: &Monomial, coeff: f64) -> String {
    let mut s = format!("{coeff}");
    let mut idx = 0;
    for i in 0..MAX_K {
        for j in (i + 1)..MAX_K {
            match mono.d[idx] {
                0 => {}
                1 => s += &format!(" D{}{}", i + 1, j + 1),
                p => s += &format!(" D{}{}^{p}", i + 1, j + 1),
            }
            idx += 1;
        }
    }
    for i in 0..MAX_K {
        for _ in 0..mono.m[i] {
            s += &format!(" m{}", i + 1);
        }
    }
    for i in 0..MAX_K {
        for _ in 0..mono.w[i] {
            s += &format!(" w{}^2", i + 1);
        }
    }
    s
}

/// Compares a term table with the symbolic expansion of the scaled `k`-th
/// minor and reports the first mismatching term.
pub fn audit_terms(terms: &[Term], k: usize) -> Result<(), TermMismatch> {
    let mut reference = reference_expansion(k);
    for (index, t) in terms.iter().enumerate() {
        let expected = t
            .monomial()
            .and_then(|mono| reference.remove(&mono))
            .unwrap_or(0.0);
        if expected != t.coeff as f64 {
            return Err(TermMismatch {
                index: Some(index),
                term: t.to_string(),
                transcribed: t.coeff as f64,
                expected,
            });
        }
    }
    if let Some((mono, coeff)) = reference.into_iter().next() {
        return Err(TermMismatch {
            index: None,
            term: render(&mono, coeff),
            transcribed: 0.0,
            expected: coeff,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_match_determinant_expansion() {
        assert_eq!(audit_terms(&QUARTIC_TERMS, 4), Ok(()));
        assert_eq!(audit_terms(&QUINTIC_TERMS, 5), Ok(()));
    }

    #[test]
    fn expansion_sizes() {
        assert_eq!(reference_expansion(2).len(), 2);
        assert_eq!(reference_expansion(3).len(), 5);
        assert_eq!(reference_expansion(4).len(), QUARTIC_TERMS.len());
        assert_eq!(reference_expansion(5).len(), QUINTIC_TERMS.len());
    }

    #[test]
    fn corrupted_coefficient_is_located() {
        let mut terms = QUINTIC_TERMS;
        terms[40].coeff = -terms[40].coeff;
        let err = audit_terms(&terms, 5).unwrap_err();
        assert_eq!(err.index, Some(40));
        assert_eq!(err.expected, QUINTIC_TERMS[40].coeff as f64);
    }

    #[test]
    fn wrong_index_is_located() {
        let mut terms = QUARTIC_TERMS;
        // the typeset "omega 2^2" slot, mistyped as omega_1^2
        terms[15] = term(-4, &[(3, 4), (3, 4)], &[1, 2], &[1, 1]);
        let err = audit_terms(&terms, 4).unwrap_err();
        assert_eq!(err.index, Some(15));
        assert_eq!(err.expected, 0.0);
    }

    #[test]
    fn dropped_term_is_reported() {
        let terms: Vec<Term> = QUARTIC_TERMS[1..].to_vec();
        let err = audit_terms(&terms, 4).unwrap_err();
        assert_eq!(err.index, None);
        assert_eq!(err.term, "1 D12^2 D34^2");
    }

    #[test]
    fn display() {
        assert_eq!(QUARTIC_TERMS[1].to_string(), "-4 D12^2 m3 m4 w3^2 w4^2");
    }

    #[test]
    fn pair_indexing_is_dense() {
        let mut seen = Vec::new();
        for i in 0..MAX_K {
            for j in (i + 1)..MAX_K {
                seen.push(pair_index(i, j));
            }
        }
        assert_eq!(seen, (0..PAIRS).collect::<Vec<_>>());
    }
}
