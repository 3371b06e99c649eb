//! Human-readable rendering. Output is deterministic: fixed precision and
//! no negative zeros, so it can be compared against golden files.

use std::fmt::Write;

use cho_core::sweep::{SweepParam, SweepReport};

use crate::report::{columns, AnalysisReport};

const WIDTH: usize = 16;

fn strip_negative_zero(s: String) -> String {
    let is_zero = s
        .trim_start_matches('-')
        .chars()
        .take_while(|c| *c != 'e')
        .all(|c| c == '0' || c == '.');
    if is_zero && s.starts_with('-') {
        s[1..].to_string()
    } else {
        s
    }
}

/// Ten decimals.
pub fn fixed(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    strip_negative_zero(format!("{x:.10}"))
}

/// Three significant digits, scientific.
pub fn sci(x: f64) -> String {
    if !x.is_finite() {
        return fixed(x);
    }
    strip_negative_zero(format!("{x:.2e}"))
}

fn row(out: &mut String, indent: &str, xs: &[f64]) {
    out.push_str(indent);
    for x in xs {
        let _ = write!(out, "{:>WIDTH$}", fixed(*x));
    }
    out.push('\n');
}

fn matrix(out: &mut String, name: &str, m: &[Vec<f64>]) {
    let _ = writeln!(out, "  {name}");
    for r in m {
        row(out, "    ", r);
    }
}

fn labelled(out: &mut String, label: &str, xs: &[f64]) {
    let _ = write!(out, "  {label:<11}");
    for x in xs {
        let _ = write!(out, "{:>WIDTH$}", fixed(*x));
    }
    out.push('\n');
}

pub fn render_report(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let m = &r.model;

    out.push_str("model\n");
    let _ = writeln!(out, "  oscillators {}", m.masses.len());
    let _ = writeln!(out, "  hbar       {:>WIDTH$}", fixed(m.hbar.unwrap_or(1.0)));
    labelled(&mut out, "masses", &m.masses);
    labelled(&mut out, "stiffness", m.stiffness_diag.as_deref().unwrap_or(&[]));
    if m.couplings.is_empty() {
        out.push_str("  couplings  none\n");
    } else {
        for (i, j, d) in &m.couplings {
            let _ = writeln!(out, "  D{i},{j:<8}{:>WIDTH$}", fixed(*d));
        }
    }
    if m.kinetic.is_some() {
        out.push_str("  kinetic    explicit (see T)\n");
    }

    out.push_str("\nmatrices\n");
    matrix(&mut out, "T", &r.matrices.t);
    matrix(&mut out, "V", &r.matrices.v);
    matrix(&mut out, "A = TV", &r.matrices.a);
    matrix(&mut out, "S = T^1/2 V T^1/2", &r.matrices.s);

    out.push_str("\nnormal modes\n");
    labelled(&mut out, "lambda", &r.modes.lambdas);
    let _ = write!(out, "  {:<11}", "frequency");
    for f in &r.modes.frequencies {
        let s = f.map_or_else(|| "imaginary".to_string(), fixed);
        let _ = write!(out, "{s:>WIDTH$}");
    }
    out.push('\n');
    out.push_str("  eigenvectors of S (columns of U, one per line)\n");
    for c in columns(&r.modes.u) {
        row(&mut out, "    ", &c);
    }
    out.push_str("  columns of C (x = C x'), one per line\n");
    for c in columns(&r.modes.c) {
        row(&mut out, "    ", &c);
    }
    let _ = writeln!(
        out,
        "  residuals  orthogonality {}  kinetic {}  potential {}",
        sci(r.modes.residual_orth),
        sci(r.modes.residual_kinetic),
        sci(r.modes.residual_potential)
    );
    if let Some(mn) = &r.modes.mass_normalized {
        let _ = writeln!(out, "  mass-normalised (m_ref = {})", fixed(mn.m_ref));
        labelled(&mut out, "K", &mn.k);
        labelled(&mut out, "K / m_ref", &mn.lambdas);
        let _ = writeln!(out, "  residual   kinetic {}", sci(mn.residual_kinetic));
    }

    let bs = &r.bound_state;
    out.push_str("\nbound state\n");
    let _ = writeln!(out, "  verdict    {}", bs.verdict.as_str());
    out.push_str("  leading principal minors of S\n");
    for mi in &bs.minors {
        let _ = writeln!(
            out,
            "    k={:<3}{:>WIDTH$}  margin {}  {}",
            mi.k,
            fixed(mi.value),
            sci(mi.margin),
            mi.status
        );
    }
    labelled(&mut out, "eig(S)", &bs.eigenvalues);
    if let Some(d) = bs.discriminant {
        let _ = writeln!(out, "  discriminant {}", fixed(d));
    }
    if !bs.closed_form_checks.is_empty() {
        out.push_str("  closed-form checks\n");
        for c in &bs.closed_form_checks {
            let _ = writeln!(
                out,
                "    {:<36}{:>WIDTH$}{:>WIDTH$}  tol {}  {}",
                c.name,
                fixed(c.expected),
                fixed(c.actual),
                sci(c.tolerance),
                if c.passed { "ok" } else { "FAIL" }
            );
        }
    }

    if let Some(sp) = &r.spectrum {
        let _ = writeln!(out, "\nspectrum (hbar = {})", fixed(sp.hbar));
        let _ = writeln!(out, "  ground state {}", fixed(sp.ground_state_energy));
        for (idx, l) in sp.levels.iter().enumerate() {
            let occ: Vec<String> = l.occupations.iter().map(u32::to_string).collect();
            let _ = writeln!(
                out,
                "  {idx:>4}{:>WIDTH$}  ({})",
                fixed(l.energy),
                occ.join(", ")
            );
        }
    }

    out.push_str("\nwarnings\n");
    if r.warnings.is_empty() {
        out.push_str("  none\n");
    }
    for w in &r.warnings {
        let _ = writeln!(out, "  {w}");
    }
    out
}

pub fn param_label(p: &SweepParam) -> String {
    match p {
        SweepParam::Coupling(i, j) => format!("D{},{}", i + 1, j + 1),
        SweepParam::AllCouplings => "D:all".to_string(),
    }
}

pub fn render_sweep(r: &SweepReport) -> String {
    let mut out = String::new();
    let labels: Vec<String> = r.params.iter().map(param_label).collect();
    let _ = writeln!(out, "sweep {}", labels.join(" "));
    let _ = write!(out, "{:>WIDTH$}  {:<9}", "value", "verdict");
    for k in 1..=r.rows.first().map_or(0, |x| x.lambdas.len()) {
        let _ = write!(out, "{:>WIDTH$}", format!("lambda{k}"));
    }
    out.push('\n');
    for row in &r.rows {
        let _ = write!(out, "{:>WIDTH$}  {:<9}", fixed(row.value), row.verdict.as_str());
        for l in &row.lambdas {
            let _ = write!(out, "{:>WIDTH$}", fixed(*l));
        }
        out.push('\n');
    }
    out.push_str("\ntransitions\n");
    if r.transitions.is_empty() {
        out.push_str("  none\n");
    }
    for t in &r.transitions {
        let _ = writeln!(
            out,
            "  {} -> {}  in [{}, {}]  width {}",
            t.verdict_lo.as_str(),
            t.verdict_hi.as_str(),
            strip_negative_zero(format!("{:.12}", t.lo)),
            strip_negative_zero(format!("{:.12}", t.hi)),
            sci(t.width())
        );
    }
    out
}
