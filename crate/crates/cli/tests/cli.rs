use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use floquet_cli::parse_problem;
use floquet_cli::run::{chart_point, chart_report};
use serde_json::Value;

fn problems() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/problems")
}

fn floquet(args: &[&str], spec: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_floquet"))
        .args(args)
        .arg("--spec")
        .arg(spec)
        .output()
        .expect("binary runs")
}

fn write_spec(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn mu_of(target: &Value, method: &str) -> (f64, f64) {
    let r = target["results"]
        .as_array()
        .unwrap()
        .iter()
        .find(|r| r["method"] == method)
        .unwrap();
    complex(&r["mu"])
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

#[test]
fn zero_perturbation_reports_unperturbed_exponents() {
    let out = json(&floquet(
        &["exponents", "--format", "json"],
        &problems().join("minimal.json"),
    ));
    let t = &out["targets"][0];
    let aleph = complex(&t["aleph"]);
    assert!(dist(aleph, (0.5, 0.0)) < 1e-15);
    for m in ["rs", "wb", "direct"] {
        assert!(dist(mu_of(t, m), aleph) < 1e-14, "{m}");
    }
}

#[test]
fn scalar_cosine_drive_keeps_exponent() {
    let out = json(&floquet(
        &["exponents", "--format", "json"],
        &problems().join("scalar_cosine.json"),
    ));
    let t = &out["targets"][0];
    assert!(dist(mu_of(t, "direct"), (-0.7, 0.0)) < 1e-10);
    assert!(dist(mu_of(t, "rs"), (-0.7, 0.0)) < 1e-12);
    assert!(dist(mu_of(t, "wb"), (-0.7, 0.0)) < 1e-12);
}

#[test]
fn mathieu_off_resonance_series_close_to_oracle() {
    let dir = tempfile::tempdir().unwrap();
    for delta in [0.1, 0.5] {
        let text = std::fs::read_to_string(problems().join("mathieu.json"))
            .unwrap()
            .replace("\"delta\": 0.3", &format!("\"delta\": {delta}"));
        let out = json(&floquet(
            &["exponents", "--format", "json"],
            &write_spec(&dir, "m.json", &text),
        ));
        for t in out["targets"].as_array().unwrap() {
            assert!(
                dist(mu_of(t, "rs"), mu_of(t, "direct")) <= 5e-4,
                "delta {delta}"
            );
        }
    }
}

#[test]
fn csv_exponents_have_fixed_header() {
    let out = floquet(&["exponents"], &problems().join("mathieu.json"));
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "j,method,order,mu_re,mu_im,aleph_re,aleph_im,converged,iterations,cutoff_shift,min_gap,error"
    );
    assert_eq!(lines.count(), 6);
}

#[test]
fn invalid_omega_exits_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "bad.json",
        "{\n  \"n\": 1,\n  \"omega\": 0,\n  \"K\": 0,\n  \"a0\": [[0, [[[1, 0]]]]]\n}\n",
    );
    let out = floquet(&["exponents"], &spec);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 3") && err.contains("omega"), "{err}");
}

#[test]
fn solve_free_constant_system_traces_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_spec(
        &dir,
        "free.json",
        r#"{"n": 2, "omega": 1.0, "K": 1,
            "a0": [[0, [[[-0.5, 0], [0, 0]], [[0, 0], [0.2, 0]]]]],
            "y0": [[1, 0], [0, 0]],
            "solve": {"periods": 1, "points_per_period": 64}}"#,
    );
    let out = floquet(&["solve"], &spec);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "t,y1_re,y1_im,y2_re,y2_im");
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((v[1] - (-0.5 * v[0]).exp()).abs() < 1e-13);
        assert!(v[2].abs() < 1e-13 && v[3].abs() < 1e-13 && v[4].abs() < 1e-13);
    }
}

#[test]
fn solve_without_forcing_or_state_is_usage_error() {
    let out = floquet(&["solve"], &problems().join("mathieu.json"));
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
}

#[test]
fn driven_mathieu_residual_report() {
    let out = json(&floquet(
        &["solve", "--format", "json"],
        &problems().join("mathieu_driven.json"),
    ));
    assert!(out["residual_max"].as_f64().unwrap() <= 1e-5);
    assert_eq!(out["trajectory"].as_array().unwrap().len(), 3 * 512 + 1);
}

#[test]
fn chart_needs_two_sweeps() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"{"n": 2, "omega": 1.0, "K": 8,
        "template": {"name": "mathieu", "params": {"delta": 0.3, "eps": 0.1}},
        "sweep": [{"path": "params.delta", "values": [0.2, 0.3]}]}"#;
    let out = floquet(&["stability-chart"], &write_spec(&dir, "one.json", text));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn chart_unperturbed_row_is_marginal_and_output_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let chart = problems().join("mathieu_chart.json");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let run = |out: &Path, jobs: &str| {
        let o = floquet(
            &[
                "stability-chart",
                "--grid",
                "6",
                "--jobs",
                jobs,
                "--out",
                out.to_str().unwrap(),
            ],
            &chart,
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    run(&a, "1");
    run(&b, "2");
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "p1,p2,re_mu_min,growth_rate,unstable,method,converged,error"
    );
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 36);
    for r in rows.iter().filter(|r| r[1] == "0") {
        assert!(r[2].parse::<f64>().unwrap().abs() <= 1e-8, "{r:?}");
        assert_eq!(r[4], "false");
    }
}

#[test]
fn sweep_points_are_isolated() {
    let mut spec =
        parse_problem(&std::fs::read_to_string(problems().join("mathieu_chart.json")).unwrap())
            .unwrap();
    spec.sweep[0].values = vec![0.2, 0.25, 0.6];
    spec.sweep[1].values = vec![0.0, 0.1];
    let grid = chart_report(&spec, Some(2)).unwrap();
    assert_eq!(chart_point(&spec, 0.25, 0.1), grid.points[3]);
    assert_eq!(chart_point(&spec, 0.6, 0.0), grid.points[4]);
    assert_eq!(grid.points[3].unstable, Some(true));
}

#[test]
fn compare_zero_perturbation_gives_zero_errors() {
    let out = json(&floquet(
        &["compare", "--format", "json"],
        &problems().join("minimal.json"),
    ));
    for row in out["rows"].as_array().unwrap() {
        for col in ["rs1", "rs2", "wb1", "wb2"] {
            assert_eq!(row[col].as_f64(), Some(0.0), "{col}");
        }
    }
}

#[test]
fn compare_error_ratio_shows_cubic_remainder() {
    let out = json(&floquet(
        &["compare", "--format", "json"],
        &problems().join("generic_constant.json"),
    ));
    let rs2: Vec<f64> = out["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["rs2"].as_f64().unwrap())
        .collect();
    for w in rs2.windows(2) {
        let ratio = w[1] / w[0];
        assert!((ratio - 8.0).abs() <= 0.15 * 8.0, "ratio {ratio}");
    }
    let fit = out["fits"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["column"] == "rs2")
        .unwrap();
    assert!((fit["exponent"].as_f64().unwrap() - 3.0).abs() < 0.1);
}

#[test]
fn compare_flags_near_degenerate_series() {
    let out = json(&floquet(
        &["compare", "--format", "json"],
        &problems().join("mathieu_resonant.json"),
    ));
    for row in out["rows"].as_array().unwrap() {
        assert_eq!(row["rs2"], "SmallDenominator");
        assert!(row["wb2"].as_f64().unwrap() < 1e-3);
    }
}

#[test]
fn check_suite_passes_on_mathieu_and_meissner() {
    for name in ["mathieu.json", "meissner.json", "mathieu_driven.json"] {
        let out = floquet(&["check", "--format", "json"], &problems().join(name));
        let checks = json(&out);
        for c in checks.as_array().unwrap() {
            assert_eq!(c["pass"], true, "{name}: {c}");
        }
    }
}

#[test]
fn numerical_failures_exit_with_code_three() {
    // The resonant pair is degenerate, so the dense solve cannot pick one
    // exponent per mode and a fundamental matrix cannot be assembled.
    let out = floquet(&["check"], &problems().join("mathieu_resonant.json"));
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stdout.is_empty(), "partial output is still written");
}

#[test]
fn shipped_problem_files_parse() {
    for entry in std::fs::read_dir(problems()).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(parse_problem(&text).is_ok(), "{}", path.display());
    }
}
