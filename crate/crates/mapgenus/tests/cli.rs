use std::process::Command;

use mapgenus::cli::run;

fn mg(args: &[&str]) -> mapgenus::cli::Outcome {
    run(std::iter::once("mapgenus").chain(args.iter().copied()))
}

#[test]
fn count_example() {
    let o = mg(&["count", "--kind", "two-legged", "--g", "1", "--j", "1", "--nu", "3"]);
    assert_eq!((o.code, o.stdout.as_str()), (0, "30\n"));
    let o = mg(&["count", "--kind", "regular", "--g", "2", "--j", "3", "--nu", "3", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["count"], "17290800");
}

#[test]
fn poly_example_has_known_roots() {
    // (1/1440)(5ν−2)·(ν+1)ν(ν−1)(ν−2)(ν−3), expanded lowest degree first.
    let o = mg(&["poly", "--kind", "S", "--g", "2", "--j", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    let want = ["0", "1/120", "-1/36", "1/96", "7/288", "-3/160", "1/288"];
    assert_eq!(v["coeffs"], serde_json::json!(want));
}

#[test]
fn formula_and_coeffs_round_trip() {
    let dir = std::env::temp_dir().join(format!("mapgenus-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("a2.json");
    let o = mg(&["coeffs", "--kind", "a", "--g", "2", "--out", file.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let o = mg(&["formula", "--eq", "general", "--kind", "two-legged", "--g", "2", "--nu", "3", "--j", "3", "--coeffs", file.to_str().unwrap()]);
    assert_eq!(o.stdout, "355492800\n");
    let o = mg(&["formula", "--eq", "hexic", "--kind", "two-legged", "--g", "2", "--j", "3"]);
    assert_eq!(o.stdout, "355492800\n");
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(mg(&["count", "--kind", "regular"]).code, 2);
    assert_eq!(mg(&["formula", "--eq", "quartic", "--nu", "3", "--g", "1", "--j", "2"]).code, 2);
    assert_eq!(mg(&["oracle", "--nu", "3", "--j", "4", "--legs", "2"]).code, 2);
    assert_eq!(mg(&["coeffs", "--kind", "b", "--g", "1"]).code, 2);
    assert_eq!(mg(&["--help"]).code, 0);
}

#[test]
fn freud_print_lists_sorted_terms() {
    let o = mg(&["freud", "--nu", "2", "--print"]);
    assert_eq!(o.stdout, "{-1,0}\n{0,0}\n{0,1}\n");
}

#[test]
fn output_is_independent_of_thread_count() {
    let a = mg(&["--threads", "1", "oracle", "--nu", "2", "--j", "3", "--legs", "2", "--format", "json"]);
    let b = mg(&["--threads", "3", "oracle", "--nu", "2", "--j", "3", "--legs", "2", "--format", "json"]);
    assert_eq!(a, b);
    let a = mg(&["--threads", "1", "lab", "expand", "--nu", "2", "--u", "0.02", "--Ns", "4,8"]);
    let b = mg(&["--threads", "2", "lab", "expand", "--nu", "2", "--u", "0.02", "--Ns", "4,8"]);
    assert_eq!(a, b);
    assert!(a.stdout.starts_with("nu,u,N,"));
}

#[test]
fn fixture_override_is_honoured() {
    let o = mg(&["--data-dir", "/nonexistent", "coeffs", "--kind", "a", "--g", "1", "--fixture"]);
    assert_eq!(o.code, 2);
    let o = mg(&["coeffs", "--kind", "a", "--g", "1", "--fixture", "--format", "json"]);
    assert_eq!(o.code, 0);
}

#[test]
fn binary_verify_quick_succeeds() {
    let out = Command::new(env!("CARGO_BIN_EXE_mapgenus")).args(["verify", "--quick"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().all(|l| l.contains(" PASS ")), "{text}");
}

#[test]
fn binary_reports_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_mapgenus")).args(["count", "--nu", "x"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
