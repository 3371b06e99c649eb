use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cho::{parse_model_file, parse_model_str, run_analysis, AnalysisRequest, MassNorm};
use cho_core::model::{build_t, build_v};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn cho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cho"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn golden(model: &str, golden: &str) {
    let out = cho(&["analyze", data(model).to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(golden);
    if std::env::var_os("CHO_BLESS").is_some() {
        std::fs::write(&path, stdout(&out)).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(stdout(&out), expected, "text report drifted from {golden}");
}

#[test]
fn golden_identical_three() {
    golden("identical3.json", "identical3.txt");
}

#[test]
fn golden_two_body() {
    golden("two_body.json", "two_body.txt");
}

#[test]
fn exit_codes_follow_verdict() {
    let cases = [
        ("identical3.json", 0, "bound"),
        ("identical3_d3.json", 1, "unbound"),
        ("marginal.json", 2, "marginal"),
        ("two_body.json", 0, "bound"),
    ];
    for (file, want, verdict) in cases {
        let path = data(file);
        let out = cho(&["check", path.to_str().unwrap()]);
        assert_eq!(code(&out), want, "{file}");
        assert_eq!(stdout(&out).trim(), verdict);
        let out = cho(&["analyze", path.to_str().unwrap(), "--format", "json"]);
        assert_eq!(code(&out), want, "{file}");
    }
}

#[test]
fn unbound_report_cites_failed_minor() {
    let out = cho(&["analyze", data("identical3_d3.json").to_str().unwrap(), "--format", "json"]);
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.get("spectrum").is_none());
    let warnings = v["warnings"].as_array().unwrap();
    assert_eq!(warnings.len(), 1);
    assert!(warnings[0].as_str().unwrap().contains("minor k=2"), "{warnings:?}");
    assert_eq!(v["bound_state"]["verdict"], "unbound");
    // the two lowest modes have negative lambda and no real frequency
    assert_eq!(v["modes"]["frequencies"][0], Value::Null);
}

#[test]
fn errors_exit_three() {
    let out = cho(&["analyze", data("zero_mass.json").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("masses[0] must be > 0"), "{}", stderr(&out));

    let out = cho(&["check", data("syntax_error.json").to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("line 3"), "{}", stderr(&out));

    let out = cho(&["analyze", data("missing.json").to_str().unwrap()]);
    assert_eq!(code(&out), 3);

    let out = cho(&["analyze", data("identical3.json").to_str().unwrap(), "--tol", "-1"]);
    assert_eq!(code(&out), 3);

    let out = cho(&["analyze", data("identical3.json").to_str().unwrap(), "--mass-norm", "0"]);
    assert_eq!(code(&out), 3);

    let out = cho(&["frobnicate"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn zero_levels_omits_spectrum() {
    let out = cho(&[
        "analyze",
        data("identical3.json").to_str().unwrap(),
        "--levels",
        "0",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v.get("spectrum").is_none());
    for key in ["model", "matrices", "modes", "bound_state", "warnings"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn json_model_block_round_trips_bit_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("model.json");
    std::fs::write(
        &src,
        r#"{"hbar":0.7,"masses":[1.3,0.45,2.2,0.9],"omegas":[0.31,1.7,0.93,1.1],
            "couplings":[[1,2,0.123456789],[2,4,-0.3],[3,4,0.1]]}"#,
    )
    .unwrap();
    let out = cho(&["analyze", src.to_str().unwrap(), "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let echoed = parse_model_str(&v["model"].to_string()).unwrap();
    let original = parse_model_file(&src).unwrap();
    let bits = |m: &cho_core::model::OscillatorModel| {
        let t = build_t(m).unwrap().rows();
        let v = build_v(m).unwrap().rows();
        t.into_iter()
            .chain(v)
            .flatten()
            .map(f64::to_bits)
            .collect::<Vec<_>>()
    };
    assert_eq!(bits(&echoed), bits(&original));
    assert_eq!(echoed.hbar.to_bits(), original.hbar.to_bits());

    // the reported lambdas also survive serialisation exactly
    let report = run_analysis(&AnalysisRequest::new(original)).unwrap();
    let lambdas: Vec<f64> = v["modes"]["lambdas"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    assert_eq!(lambdas, report.modes.lambdas);
}

#[test]
fn mass_normalisation_in_report() {
    let out = cho(&[
        "analyze",
        data("two_body.json").to_str().unwrap(),
        "--mass-norm",
        "geometric",
        "--format",
        "json",
    ]);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let mn = &v["modes"]["mass_normalized"];
    assert!((mn["m_ref"].as_f64().unwrap() - 2.0_f64.sqrt()).abs() < 1e-15);
    for k in 0..2 {
        let a = mn["lambdas"][k].as_f64().unwrap();
        let b = v["modes"]["lambdas"][k].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-10 * b.abs());
    }

    let mut req = AnalysisRequest::new(parse_model_file(&data("two_body.json")).unwrap());
    req.mass_norm = MassNorm::Explicit(100.0);
    let r = run_analysis(&req).unwrap();
    assert_eq!(r.modes.mass_normalized.unwrap().m_ref, 100.0);
}

#[test]
fn sweep_reproduces_bound_window() {
    let out = cho(&[
        "sweep",
        data("identical3.json").to_str().unwrap(),
        "--param",
        "D:all",
        "--from",
        "-2",
        "--to",
        "3",
        "--steps",
        "20",
        "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 21);
    let edges: Vec<(f64, f64)> = v["transitions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|t| t["from"] == "unbound" || t["to"] == "unbound")
        .map(|t| (t["lo"].as_f64().unwrap(), t["hi"].as_f64().unwrap()))
        .collect();
    assert_eq!(edges.len(), 2);
    for ((lo, hi), target) in edges.into_iter().zip([-1.0, 2.0]) {
        assert!(hi - lo < 1e-9);
        assert!((0.5 * (lo + hi) - target).abs() < 1e-9);
    }
}

#[test]
fn sweep_text_and_bad_param() {
    let path = data("two_body.json");
    let out = cho(&[
        "sweep", path.to_str().unwrap(), "--param", "D:1,2", "--from", "-3", "--to", "3",
        "--steps", "6",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("sweep D1,2\n"));
    assert!(text.contains("transitions"));

    let out = cho(&[
        "sweep", path.to_str().unwrap(), "--param", "D:1,3", "--from", "0", "--to", "1",
        "--steps", "2",
    ]);
    assert_eq!(code(&out), 3);
    let out = cho(&[
        "sweep", path.to_str().unwrap(), "--param", "X", "--from", "0", "--to", "1", "--steps",
        "2",
    ]);
    assert_eq!(code(&out), 3);
}
