//! Exit-code and file-format behavior of the envalg binary.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_envalg"))
}

fn descriptor(name: &str) -> String {
    format!(
        "{}/../../descriptors/{name}",
        env!("CARGO_MANIFEST_DIR")
    )
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("envalg_cli_{name}"))
}

#[test]
fn missing_manifold_exits_2_without_partial_output() {
    let out = tmp("missing.csv");
    let _ = std::fs::remove_file(&out);
    let output = bin()
        .args(["conf", "betti", "--manifold", "no_such_file.desc", "--max-k", "3", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(!out.exists(), "no partial output on input error");
}

#[test]
fn builtin_manifold_r3() {
    let output = bin()
        .args(["conf", "betti", "--manifold", "builtin:R3", "--max-k", "4", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    for k in 2..=4 {
        assert!(stdout.contains(&format!("{k},0,1\n")));
        assert!(!stdout.contains(&format!("{k},2,")), "odd n has no extra class");
    }
}

#[test]
fn malformed_lie_file_exits_2() {
    let path = tmp("bad.lie");
    std::fs::write(&path, "basis x zero 1\n").unwrap();
    let output = bin()
        .args(["env", "pbw", "--lie"])
        .arg(&path)
        .args(["--n", "2", "--max-weight", "3"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn invalid_lie_table_exits_2() {
    // bracket set without its antisymmetric partner in both orders
    let path = tmp("corrupt.lie");
    std::fs::write(
        &path,
        "basis x 0 1\nbasis y 0 1\nbasis z 0 1\nbracket x y = 1 z\nbracket y x = 1 z\n",
    )
    .unwrap();
    let output = bin()
        .args(["ce", "homology", "--lie"])
        .arg(&path)
        .args(["--max-weight", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("Antisymmetry"), "violation list is printed: {stderr}");
}

#[test]
fn env_pbw_builtins_exit_0() {
    for lie in ["sl2", "abelian:0", "freelie:1:1"] {
        for n in ["1", "2", "3"] {
            let output = bin()
                .args(["env", "pbw", "--lie", lie, "--n", n, "--max-weight", "4"])
                .output()
                .unwrap();
            assert_eq!(output.status.code(), Some(0), "lie={lie} n={n}");
        }
    }
}

#[test]
fn verify_unknown_suite_exits_2() {
    let output = bin().args(["verify", "--suite", "bogus"]).output().unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn verify_single_suite_exits_0() {
    let output = bin()
        .args(["verify", "--suite", "exactla", "--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("[exactla] rank-nullity"));
    assert!(stdout.contains("0 failed"));
}

#[test]
fn cov_compose_round_trip() {
    let enum_out = tmp("covers.json");
    let status = bin()
        .args(["cov", "enum", "--i", "1", "--j", "2", "--format", "json", "--out"])
        .arg(&enum_out)
        .status()
        .unwrap();
    assert!(status.success());
    let covers: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&enum_out).unwrap()).unwrap();
    assert_eq!(covers.len(), 3);

    // compose a splitting {1} -> {a,b} with the fold function {a,b} -> {u}
    let input = tmp("compose_input.json");
    std::fs::write(
        &input,
        r#"[
          {"source":["1"],"target":["a","b"],"parts":{"a":["1"],"b":["1"]}},
          {"source":["a","b"],"target":["u"],"parts":{"u":["a","b"]}}
        ]"#,
    )
    .unwrap();
    let output = bin().args(["cov", "compose", "--input"]).arg(&input).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let composite: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(composite["parts"]["u"], serde_json::json!(["1"]));
}

#[test]
fn conf_ordered_text_includes_oracle() {
    let output = bin()
        .args(["conf", "ordered", "--k", "3", "--n", "2"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("H^1(Conf_3(R^2)) = Q^3"));
    assert!(stdout.contains("oracle: 1 + 3*t^1 + 2*t^2"));
    assert!(!stdout.contains("differs"));
}

#[test]
fn lie_free_writes_loadable_file() {
    let path = tmp("freelie.lie");
    let status = bin()
        .args(["lie", "free", "--degrees", "0,1", "--max-weight", "3", "--out"])
        .arg(&path)
        .status()
        .unwrap();
    assert!(status.success());
    let output = bin()
        .args(["ce", "homology", "--lie"])
        .arg(&path)
        .args(["--max-weight", "3", "--format", "csv"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8(output.stdout).unwrap();
    // reduced CE homology of a free Lie algebra is the shifted generators
    assert!(stdout.contains("1,1,1\n"), "degree-0 generator: {stdout}");
    assert!(stdout.contains("1,2,1\n"), "degree-1 generator: {stdout}");
}
