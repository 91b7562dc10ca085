use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cvtele_cli::{emit, parse_json, run_scenario, Format, Scenario};

fn cvtele(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvtele"))
        .args(args)
        .output()
        .unwrap()
}

fn scenario(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(rel)
}

const SMALL: &str = r#"
resources = ["sb-subopt", "pss", "twb"]
outputs = ["fidelity", "deviations", "delta"]

[input]
s_db = 5.0
beta_re = 0.7

[channel]
tau = 0.1
r2 = 0.05
gain = 1.1

[sweep]
axis = "r_db"
from = 0.0
to = 15.0
points = 7
"#;

#[test]
fn run_writes_csv_with_expected_shape() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, SMALL).unwrap();
    let out = dir.path().join("out.csv");
    let o = cvtele(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let header = rdr.headers().unwrap().clone();
    // 1 + observables x resources, with deviations counting five
    assert_eq!(header.len(), 1 + 7 * 3);
    assert_eq!(&header[0], "r_db");
    assert_eq!(&header[1], "fidelity:sb-subopt");
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 7);
    for row in &rows {
        for cell in row.iter() {
            let v: f64 = cell.parse().unwrap();
            assert!(v.is_finite());
            // 17 significant digits
            assert_eq!(
                cell.split('e')
                    .next()
                    .unwrap()
                    .trim_start_matches('-')
                    .len(),
                18
            );
        }
    }
}

#[test]
fn json_round_trip() {
    let sc = Scenario::from_toml(SMALL).unwrap();
    let result = run_scenario(&sc).unwrap();
    let text = emit::to_string(&result, Format::Json).unwrap();
    assert_eq!(parse_json(&text).unwrap(), result);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(value["scenario"]["sweep"]["points"], 7);
    assert_eq!(value["version"], env!("CARGO_PKG_VERSION"));
}

#[test]
fn output_is_byte_identical_across_runs_and_thread_counts() {
    let path = scenario("fig2/lossy-s5.toml");
    let p = path.to_str().unwrap();
    let a = cvtele(&["run", "--scenario", p, "--jobs", "1"]);
    let b = cvtele(&["run", "--scenario", p, "--jobs", "8"]);
    let c = cvtele(&["run", p, "--format", "json", "--jobs", "3"]);
    let d = cvtele(&["run", p, "--format", "json", "--jobs", "3"]);
    assert!(a.status.success() && c.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (i, bad) in [
        SMALL.replace("points = 7", "points = 1"),
        SMALL.replace("axis = \"r_db\"", "axis = \"temperature\""),
        SMALL.replace("\"pss\"", "\"noon\""),
        "not = [valid".to_string(),
    ]
    .iter()
    .enumerate()
    {
        let cfg = dir.path().join(format!("bad{i}.toml"));
        std::fs::write(&cfg, bad).unwrap();
        let o = cvtele(&["run", cfg.to_str().unwrap()]);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
    }
    assert_eq!(
        cvtele(&["compare-resources", "--tau", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        cvtele(&["run", "/nonexistent/scenario.toml"]).status.code(),
        Some(1)
    );
}

#[test]
fn verify_reports_table_and_failures() {
    let o = cvtele(&["verify", "--cases", "5"]);
    assert!(o.status.success());
    let table = String::from_utf8(o.stdout).unwrap();
    assert_eq!(table.lines().filter(|l| l.ends_with("PASS")).count(), 9);

    let o = cvtele(&["verify", "--cases", "2", "--tolerance", "0"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn compare_resources_and_optimal_angles() {
    let o = cvtele(&[
        "compare-resources",
        "--r-db",
        "10",
        "--s-db",
        "5",
        "--resources",
        "sb-subopt,pss,twb",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "resource,delta,fidelity,sigma,var_x,var_p");
    assert_eq!(lines.len(), 4);
    let fid = |l: &str| l.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    assert!(fid(lines[1]) > fid(lines[3]));

    let o = cvtele(&[
        "optimal-angles",
        "--from-db",
        "0",
        "--to-db",
        "30",
        "--points",
        "4",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let table: emit::Table = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(table.rows.len(), 4);
    let last = &table.rows[3].1;
    assert!((last[0] - last[2]).abs() < 1e-3);
}

#[test]
fn list_names_every_strategy() {
    let text = String::from_utf8(cvtele(&["list"]).stdout).unwrap();
    for name in [
        "twb",
        "pas",
        "pss",
        "sb-subopt",
        "sb-opt",
        "sb-optvar",
        "sb-free",
        "deviations",
        "fidelity",
    ] {
        assert!(text.contains(name), "{name}");
    }
}
