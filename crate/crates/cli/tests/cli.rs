use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_arraylimits"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (Output, PathBuf) {
    let path = dir.join(name);
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let out = run(&all);
    (out, path)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn single_element_is_lossless() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_to(
        dir.path(),
        "e.json",
        &[
            "--command",
            "efficiency2d",
            "--m",
            "1",
            "--n",
            "1",
            "--format",
            "json",
        ],
    );
    assert!(out.status.success());
    let doc = json(&path);
    assert_eq!(doc["summary"]["eta"].as_f64().unwrap(), 1.0);
    assert_eq!(doc["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["quad"]["panels_per_axis"], 256);
}

#[test]
fn two_wavelength_stack_gains_37_5_percent() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_to(
        dir.path(),
        "g.json",
        &[
            "--command",
            "gain",
            "--m",
            "5",
            "--n",
            "5",
            "--dz",
            "0.75",
            "--format",
            "json",
        ],
    );
    assert!(out.status.success());
    let ratio = json(&path)["summary"]["gain_ratio"].as_f64().unwrap();
    assert_eq!(ratio, 1.375);
    // the CSV rows end at the full region
    let (_, csv) = run_to(
        dir.path(),
        "g.csv",
        &["--command", "gain", "--m", "5", "--n", "5", "--dz", "0.75"],
    );
    let text = std::fs::read_to_string(csv).unwrap();
    let last: f64 = text
        .lines()
        .last()
        .unwrap()
        .rsplit(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(last, 1.375);
}

#[test]
fn half_wave_codebook_has_two_entries() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_to(
        dir.path(),
        "c.csv",
        &[
            "--command",
            "codebook",
            "--dz",
            "0.5",
            "--threshold",
            "1.4142135623730951",
        ],
    );
    assert!(out.status.success());
    let text = std::fs::read_to_string(path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("index,cos_xi"));
    assert_eq!(lines.len(), 3);
    // cos ξ_1 = 1 − λ φ_t / (2π dz) with φ_t = π/2
    let cos_xi: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    assert!((cos_xi - 0.5).abs() < 1e-15);
}

#[test]
fn identical_configs_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    for (cmd, fmt) in [
        ("efficiency3d", "json"),
        ("feasible-region", "csv"),
        ("volume", "csv"),
        ("intensity-map", "svg"),
    ] {
        let args = [
            "--command",
            cmd,
            "--m",
            "6",
            "--n",
            "6",
            "--grid",
            "24",
            "--format",
            fmt,
        ];
        let (a, pa) = run_to(dir.path(), "a", &args);
        let (b, pb) = run_to(dir.path(), "b", &args);
        assert!(a.status.success() && b.status.success(), "{cmd}");
        assert_eq!(
            std::fs::read(pa).unwrap(),
            std::fs::read(pb).unwrap(),
            "{cmd}"
        );
    }
}

#[test]
fn json_output_replays_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "--command",
        "scan-sweep",
        "--m",
        "4",
        "--n",
        "4",
        "--dz",
        "0.75",
        "--angles",
        "0,37.5,80",
        "--pattern",
        "cosine_theta",
        "--panels",
        "64",
        "--format",
        "json",
    ];
    let (first, p1) = run_to(dir.path(), "first.json", &args);
    assert!(first.status.success());
    let cfg = p1.to_str().unwrap().to_string();
    let (second, p2) = run_to(dir.path(), "second.json", &["--config", &cfg]);
    assert!(
        second.status.success(),
        "{}",
        String::from_utf8_lossy(&second.stderr)
    );
    assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# stack\ncommand = gain\nm = 5\nn = 5\ndz = 0.25\nformat = json\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap().to_string();
    let (_, from_file) = run_to(dir.path(), "f.json", &["--config", &c]);
    let (_, overridden) = run_to(dir.path(), "o.json", &["--config", &c, "--dz", "0.75"]);
    // A_xz = 2 × 0.25 with the file value, 2 × 0.75 once the flag wins
    assert_eq!(json(&from_file)["summary"]["a_xz"].as_f64().unwrap(), 0.5);
    assert_eq!(
        json(&overridden)["summary"]["gain_ratio"].as_f64().unwrap(),
        1.375
    );
}

#[test]
fn exit_codes_separate_usage_from_domain_errors() {
    let bad_key = run(&["--command", "frobnicate"]);
    assert_eq!(bad_key.status.code(), Some(2));
    let bad_number = run(&["--command", "gain", "--m", "five"]);
    assert_eq!(bad_number.status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "command = gain\nwavelength = 1\n").unwrap();
    assert_eq!(
        run(&["--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );

    let domain = run(&["--command", "codebook", "--threshold", "2.5"]);
    assert_eq!(domain.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&domain.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "domain");
    let quad = run(&[
        "--command",
        "scan-sweep",
        "--m",
        "32",
        "--n",
        "32",
        "--panels",
        "2",
        "--nodes",
        "2",
    ]);
    assert_eq!(quad.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&quad.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "quadrature");
}

#[test]
fn heatmap_svg_is_self_contained() {
    let dir = tempfile::tempdir().unwrap();
    let (out, path) = run_to(
        dir.path(),
        "f.svg",
        &[
            "--command",
            "feasible-region",
            "--grid",
            "16",
            "--format",
            "svg",
        ],
    );
    assert!(out.status.success());
    let svg = std::fs::read_to_string(path).unwrap();
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\""));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert!(!svg.contains("<script") && !svg.contains("href"));
    assert!(svg.contains("max ") && svg.contains("min "));
    // 16 × 16 data cells plus the 32-step legend and two frame rectangles
    assert_eq!(svg.matches("<rect").count(), 16 * 16 + 32 + 2);
}

#[test]
fn parseval_residuals_are_tiny() {
    let out = run(&[
        "--command",
        "parseval-check",
        "--panels",
        "32",
        "--nodes",
        "8",
        "--format",
        "json",
        "--seed",
        "7",
    ]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["summary"]["max_abs_error"].as_f64().unwrap() < 1e-9);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 50);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = [
        "--command",
        "intensity-map",
        "--m",
        "4",
        "--n",
        "4",
        "--grid",
        "20",
    ];
    let one = bin()
        .args(args)
        .env("ARRAYLIMITS_THREADS", "1")
        .output()
        .unwrap();
    let four = bin()
        .args(args)
        .env("ARRAYLIMITS_THREADS", "4")
        .output()
        .unwrap();
    assert!(one.status.success() && four.status.success());
    assert_eq!(one.stdout, four.stdout);
    let bad = bin()
        .args(args)
        .env("ARRAYLIMITS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
