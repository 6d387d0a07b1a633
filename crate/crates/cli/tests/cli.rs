use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], cache: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zetahopf")).args(args).env("MZV_CACHE_DIR", cache).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).trim_end().to_string()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).trim_end().to_string()
}

#[test]
fn zeta_two_to_twenty_digits() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mzv", "eval", "2", "--digits", "20"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "1.6449340668482264365");
}

#[test]
fn dual_of_xxy() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["word", "dual", "xxy"], dir.path());
    assert_eq!(stdout(&o), "xyy");
}

#[test]
fn divergent_zeta_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mzv", "eval", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("NonAdmissible"));
}

#[test]
fn usage_errors_exit_two_with_one_line_naming_the_token() {
    let dir = tempfile::tempdir().unwrap();
    for (args, token) in [
        (vec!["mzv", "eval", "2,x"], "2,x"),
        (vec!["word", "dual", "xqy"], "xqy"),
        (vec!["verify", "unknown"], "unknown"),
        (vec!["--digits", "5", "mzv", "eval", "2"], "5"),
        (vec!["frobnicate"], "frobnicate"),
        (vec!["tree", "antipode", "(()"], "(()"),
    ] {
        let o = run(&args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let e = stderr(&o);
        assert_eq!(e.lines().count(), 1, "{e}");
        assert!(e.contains(token), "{e}");
    }
}

#[test]
fn cached_values_print_identically() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["mzv", "eval", "3,1,2", "--digits", "40", "--json"];
    let cold = run(&args, dir.path());
    assert!(dir.path().join("zeta.jsonl").exists());
    let warm = run(&args, dir.path());
    assert_eq!(cold.stdout, warm.stdout);
    std::fs::write(dir.path().join("zeta.jsonl"), "not json\n").unwrap();
    let damaged = run(&args, dir.path());
    assert_eq!(cold.stdout, damaged.stdout);
}

#[test]
fn fit_reads_eval_output() {
    let dir = tempfile::tempdir().unwrap();
    let v = run(&["mzv", "eval", "2,1", "--json"], dir.path());
    let file = dir.path().join("v.json");
    std::fs::write(&file, &v.stdout).unwrap();
    let o = run(&["fit", file.to_str().unwrap(), "--weight", "3"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "ζ(3)");

    std::fs::write(&file, "0.12345678901234567890\n").unwrap();
    let o = run(&["fit", file.to_str().unwrap(), "--weight", "2", "--digits", "20"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_numbers_are_strings_with_requested_digits() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["mzv", "eval", "3", "--digits", "25", "--json"], dir.path());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let s = v["value"].as_str().unwrap();
    assert_eq!(s.chars().filter(char::is_ascii_digit).count(), 25);
    assert!(s.starts_with("1.202056903159594285399738"));
}

#[test]
fn tree_and_matrix_commands() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["tree", "antipode", "(())"], dir.path());
    assert_eq!(stdout(&o), "-1\t(())\n1\t() ()");
    let o = run(&["matrix", "moment", "6", "--N", "2"], dir.path());
    assert_eq!(stdout(&o), "5·N^4 + 10·N^2\nN=2: 120");
    let o = run(&["matrix", "genus", "4"], dir.path());
    assert_eq!(stdout(&o), "g0: 2\ng1: 1");
    let a = run(&["matrix", "mc", "2", "--N", "3", "--samples", "20000", "--seed", "5", "--jobs", "3"], dir.path());
    let b = run(&["matrix", "mc", "2", "--N", "3", "--samples", "20000", "--seed", "5", "--jobs", "1"], dir.path());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn selberg_value_of_a_beta_graph() {
    let dir = tempfile::tempdir().unwrap();
    let g = dir.path().join("beta.json");
    std::fs::write(
        &g,
        r#"{"vertices": ["r0", "t", "r1"], "roots": {"r0": "0", "r1": "1"}, "edges": [[0, 1], [1, 2]],
            "omega": {"0-1": ["1", "0"], "1-2": ["0", "0"]}, "phi": []}"#,
    )
    .unwrap();
    let o = run(&["selberg", "value", g.to_str().unwrap(), "--digits", "12"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    // B(2, 1) = 1/2
    assert!(stdout(&o).starts_with("0.500000000000"), "{}", stdout(&o));
}

#[test]
fn verify_hopf_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "hopf", "--json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["suites"][0]["suite"], "hopf");
}
