//! End-to-end tests of the installed binary: exit-code contract, output
//! shapes, and report determinism across processes.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vertexforge"))
        .args(args)
        .env("VERTEXFORGE_TRUNC", "16")
        .output()
        .expect("binary runs")
}

#[test]
fn exit_codes_follow_the_contract() {
    // 0: suite passes
    let ok = run(&["verify", "nogo", "--trials", "20"]);
    assert_eq!(ok.status.code(), Some(0), "{}", String::from_utf8_lossy(&ok.stderr));
    // 2: malformed config (unknown suite)
    let bad_suite = run(&["verify", "definitely-not-a-suite"]);
    assert_eq!(bad_suite.status.code(), Some(2));
    // 2: malformed config (unparseable beta)
    let bad_beta = run(&["verify", "nogo", "--beta", "orange"]);
    assert_eq!(bad_beta.status.code(), Some(2));
    // 2: bad table selector
    let bad_table = run(&["dump", "no-such-table"]);
    assert_eq!(bad_table.status.code(), Some(2));
    // 2: non-polynomial p
    let bad_p = run(&["verify", "nogo", "--p", "z^-1"]);
    assert_eq!(bad_p.status.code(), Some(2));
}

#[test]
fn bracket_command_prints_canonical_forms() {
    let out = run(&["bracket", "e@1", "f@-1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), "h(0) + k");

    let out = run(&["bracket", "e^1@0", "f^1@-1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), "h(0) + h(2) + (1/2)*k");
}

#[test]
fn vacuum_apply_matches_the_central_term() {
    let out = run(&[
        "vacuum", "apply", "--op", "e^1@1", "--to", "f^1@-1*1", "--level", "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), "(z + z^3)*1");
}

#[test]
fn json_reports_are_byte_identical_across_processes() {
    let args = ["verify", "jacobi-hatgp", "--trials", "40", "--seed", "11", "--json"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains("\"suite\": \"jacobi-hatgp\""));
    assert!(!text.contains("wall_ms"), "timing must stay out of the report bytes");
}

#[test]
fn check_lie_flags_a_broken_spec() {
    // a spec whose bracket table violates antisymmetry outright
    let dir = std::env::temp_dir().join("vertexforge-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("broken.json");
    std::fs::write(
        &path,
        r#"{
            "basis": ["x", "y"],
            "brackets": [[0, 1, [1, 0]], [1, 0, [1, 0]]],
            "form": [[1, 0], [0, 1]]
        }"#,
    )
    .unwrap();
    let out = run(&["check-lie", "--algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("FAIL"));
}

#[test]
fn env_var_overrides_truncation() {
    let out = Command::new(env!("CARGO_BIN_EXE_vertexforge"))
        .args(["reduce-dr", "z^-1", "0"])
        .env("VERTEXFORGE_TRUNC", "4")
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    // val -1 + trunc 4 = cap 3: certified below weight 3
    assert!(text.contains("certified for weights < 3"), "{text}");
}
