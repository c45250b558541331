mod common;

use std::process::{Command, Output};

use common::{corpus_path, corpus_text};
use zn_riemann_cli::ManifoldSpec;

const CORPUS: [&str; 14] = [
    "bad_even",
    "bad_odd",
    "disk",
    "euclid",
    "flat",
    "odd",
    "odd_base",
    "odd_fibre",
    "odd_super",
    "odd_z2",
    "poincare",
    "ppwave",
    "sphere",
    "warped",
];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zn-riemann"))
        .args(args)
        .output()
        .unwrap()
}

fn spec_arg(name: &str) -> String {
    corpus_path(name).display().to_string()
}

#[test]
fn corpus_round_trips() {
    for name in CORPUS {
        let spec = ManifoldSpec::parse(&corpus_text(name)).unwrap();
        let again = ManifoldSpec::parse(&spec.to_text()).unwrap();
        assert_eq!(again, spec, "{name}");
        assert_eq!(again.to_text(), spec.to_text(), "{name}");
    }
}

#[test]
fn json_output_is_deterministic() {
    let spec = spec_arg("odd");
    let a = run(&["--json", "--spec", &spec, "christoffel"]);
    let b = run(&["--json", "--spec", &spec, "christoffel"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert!(v.is_object());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["--spec", &spec_arg("flat"), "validate"]), 0);
    assert_eq!(code(&["--spec", &spec_arg("bad_even"), "validate"]), 1);
    assert_eq!(code(&["--spec", &spec_arg("euclid"), "killing", "d/dq"]), 2);
    assert_eq!(code(&["--spec", "/nonexistent/chart.zr", "validate"]), 2);
    assert_eq!(code(&["--spec", &spec_arg("bad_even"), "scalar"]), 3);
}

#[test]
fn killing_fields_of_the_plane() {
    let euclid = spec_arg("euclid");
    let out = run(&["--spec", &euclid, "killing", "d/dx"]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
}

#[test]
fn syntax_errors_report_positions() {
    let dir = std::env::temp_dir().join(format!("zn-riemann-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.zr");
    let text = format!("{}g[x,y] = 1 + * x\n", corpus_text("euclid"));
    std::fs::write(&path, &text).unwrap();
    let line = text.lines().count();
    let out = run(&["--spec", path.to_str().unwrap(), "validate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(&format!("{line}:")), "{err}");
    let json = run(&["--json", "--spec", path.to_str().unwrap(), "validate"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stderr).unwrap();
    assert_eq!(v["error"]["line"], line);
    std::fs::remove_dir_all(&dir).ok();
}
