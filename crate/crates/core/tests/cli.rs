use std::process::Command;

fn catalytic(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_catalytic")).args(args).env_remove("CATALYTIC_PRECISION").output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into(), String::from_utf8_lossy(&out.stderr).into())
}

#[test]
fn motzkin_coefficients() {
    let (code, out, _) = catalytic(&["analyze", "corpus:motzkin", "--coeffs", "10"]);
    assert_eq!(code, 0);
    assert!(out.contains("1, 1, 2, 4, 9, 21, 51, 127, 323, 835"), "{out}");
}

#[test]
fn vertex_clt() {
    let (code, out, _) = catalytic(&["analyze", "corpus:planar-maps-vertices", "--clt"]);
    assert_eq!(code, 0);
    assert!(out.contains("mu            5e-1"), "{out}");
    assert!(out.contains("sigma^2       1.5625e-1"), "{out}");
}

#[test]
fn file_input_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let eq = dir.path().join("maps.cat");
    std::fs::write(&eq, "#! u-shift = 1\nM = 1 + z*(u+1)^2*M^2 + z*(u+1)*M + z*(u+1)*D\n").unwrap();
    let json = dir.path().join("out.json");
    let (code, _, err) = catalytic(&["analyze", eq.to_str().unwrap(), "--coeffs", "4", "--json", json.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["1", "2", "9", "54"]));
    assert_eq!(v["u_shift"], "1");
}

#[test]
fn shift_flag_rewrites_the_polynomial() {
    let dir = tempfile::tempdir().unwrap();
    let eq = dir.path().join("dyck.cat");
    std::fs::write(&eq, "M = 1 + z*u*M + z*D\n").unwrap();
    let (code, out, err) = catalytic(&["analyze", eq.to_str().unwrap(), "--shift-u", "1", "--coeffs", "7"]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("u shift       1"), "{out}");
    // R(z, u+1) of the Dyck equation is the Motzkin polynomial
    assert!(out.contains("M = 1 + z*D + z*M + z*u*M"), "{out}");
    assert!(out.contains("1, 1, 2, 4, 9, 21, 51"), "{out}");
}

#[test]
fn exit_codes() {
    let (code, _, err) = catalytic(&["validate", "no-such"]);
    assert_eq!(code, 2);
    assert!(err.contains("no-such"), "{err}");
    assert_eq!(catalytic(&["analyze"]).0, 1);
    assert_eq!(catalytic(&["analyze", "corpus:motzkin", "--precision", "abc"]).0, 1);
    assert_eq!(catalytic(&["analyze", "corpus:motzkin", "--expect-z0", "x"]).0, 1);
    assert_eq!(catalytic(&["analyze", "/nonexistent/file.cat"]).0, 1);
    assert_eq!(catalytic(&["analyze", "corpus:no-such"]).0, 2);
    assert_eq!(catalytic(&["--help"]).0, 0);
}

#[test]
fn parse_errors_are_analysis_errors() {
    let dir = tempfile::tempdir().unwrap();
    let eq = dir.path().join("bad.cat");
    std::fs::write(&eq, "M = 1 + z*(u+\n").unwrap();
    let (code, _, err) = catalytic(&["analyze", eq.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2, column 1"), "{err}");
}

#[test]
fn validate_reports_per_check() {
    let (code, out, _) = catalytic(&["validate", "simple-maps"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.starts_with("simple-maps: pass"));
    assert!(out.contains("warning: generic mode"), "{out}");
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_catalytic"))
        .args(["analyze", "corpus:dyck", "--json", "/dev/stdout"])
        .env("CATALYTIC_PRECISION", "128")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"precision\": 128"));
}
