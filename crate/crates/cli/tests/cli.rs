use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hodge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hodge")).args(args).output().expect("binary runs")
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn unitary_group_order_over_f4() {
    let c = config("hermitian-f4.toml");
    let o = hodge(&["--config", c.to_str().unwrap(), "--suite", "groups", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    let row = out.lines().find(|l| l.starts_with("su4-order,")).expect("su4-order row");
    assert!(row.ends_with(",25920,25920,pass"), "{row}");
}

#[test]
fn singular_gram_is_a_config_error() {
    let c = config("singular.toml");
    let o = hodge(&["--config", c.to_str().unwrap(), "--suite", "all"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("form.gram"));
}

#[test]
fn flag_errors_name_the_flag() {
    let o = hodge(&["--suite", "everything"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--suite"));
    let o = hodge(&["--suite", "geometry"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--config"));
    let o = hodge(&["--config", "/nonexistent/form.toml"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_key_in_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "[field]\nkind = \"finite\"\norder = 6\n[form]\ndiagonal = [1, 1]\ndegree = 1\n").unwrap();
    let o = hodge(&["--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("field.order"));
}

#[test]
fn rational_examples_need_no_config() {
    let o = hodge(&["--suite", "rational-examples", "--format", "json-lines"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = stdout(&o).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let get = |id: &str| rows.iter().find(|r| r["check_id"] == id).unwrap_or_else(|| panic!("{id}"));
    assert_eq!(get("disc-class-h1")["actual"], "-1");
    assert_eq!(get("anisotropy-h1")["status"], "pass");
    assert_eq!(get("k-split-h1")["actual"], "no");
    assert_eq!(get("g-ww-two-paths")["status"], "pass");
    assert_eq!(get("g-ww-zero")["status"], "mismatched");
    assert_eq!(get("disc-class-h2")["actual"], "1");
}

#[test]
fn reports_are_deterministic() {
    let c = config("minus-type-f3.toml");
    let a = hodge(&["--config", c.to_str().unwrap(), "--format", "csv"]);
    let b = hodge(&["--config", c.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn shipped_configs_pass() {
    for name in [
        "dual-numbers-f4.toml",
        "hermitian-f4.toml",
        "hermitian-f9.toml",
        "minus-type-f3.toml",
        "plane-f9.toml",
        "quadratic-sqrt2.toml",
        "rational-anisotropic.toml",
        "split-f5.toml",
    ] {
        let c = config(name);
        let o = hodge(&["--config", c.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}\n{}", stdout(&o));
    }
}

#[test]
fn cap_exceeded_is_a_failure() {
    let c = config("hermitian-f4.toml");
    let o = hodge(&["--config", c.to_str().unwrap(), "--suite", "groups", "--cap", "100"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("su4-order"));
}
