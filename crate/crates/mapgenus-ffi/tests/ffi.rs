use std::ffi::c_char;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use mapgenus::counts::{count_at, CountKind};
use mapgenus::series::build_tables;
use mapgenus_ffi::*;

fn tables(g: u32, j: u32) -> *mut MgTables {
    let mut t = ptr::null_mut();
    assert_eq!(unsafe { mg_tables_new(g, j, &mut t) }, MgStatus::Ok);
    assert!(!t.is_null());
    t
}

fn take_string(s: *mut c_char) -> String {
    let out = unsafe { borrow_str(s) }.expect("utf-8 string").to_owned();
    unsafe { mg_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { borrow_str(mg_last_error()) }.unwrap_or_default().to_owned()
}

#[test]
fn counts_match_the_engine() {
    let t = tables(3, 5);
    let (rec, free) = build_tables(3, 5).unwrap();
    for (code, kind) in [(MG_KIND_REGULAR, CountKind::Regular), (MG_KIND_TWO_LEGGED, CountKind::TwoLegged)] {
        for g in 0..=3 {
            for j in 1..=5 {
                for nu in 2..=5 {
                    let mut s = ptr::null_mut();
                    assert_eq!(unsafe { mg_count(t, code, g, j, nu, &mut s) }, MgStatus::Ok);
                    let want = count_at(kind, g, j, nu, &rec, &free).unwrap();
                    assert_eq!(take_string(s), want.to_string(), "{kind:?} g={g} j={j} nu={nu}");
                }
            }
        }
    }
    unsafe { mg_tables_free(t) };
}

#[test]
fn u64_counts_and_overflow() {
    let t = tables(1, 16);
    let mut n = 0u64;
    assert_eq!(unsafe { mg_count_u64(t, MG_KIND_REGULAR, 0, 1, 2, &mut n) }, MgStatus::Ok);
    assert_eq!(n, 2);
    assert_eq!(unsafe { mg_count_u64(t, MG_KIND_REGULAR, 1, 16, 6, &mut n) }, MgStatus::Overflow);
    assert!(last_error().contains("64 bits"));
    unsafe { mg_tables_free(t) };
}

#[test]
fn polynomial_text() {
    let t = tables(1, 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mg_polynomial(t, MG_KIND_REGULAR, 0, 2, &mut s) }, MgStatus::Ok);
    let text = take_string(s);
    let want = mapgenus::counts::regular(0, 2, &build_tables(1, 2).unwrap().1).unwrap().polynomial.to_string();
    assert_eq!(text, want);
    unsafe { mg_tables_free(t) };
}

#[test]
fn errors_are_reported() {
    let t = tables(1, 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mg_count(t, MG_KIND_REGULAR, 2, 1, 2, &mut s) }, MgStatus::NotCovered);
    assert!(s.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { mg_count(t, 7, 0, 1, 2, &mut s) }, MgStatus::InvalidArgument);
    assert!(last_error().contains("kind"));
    assert_eq!(unsafe { mg_count(t, MG_KIND_REGULAR, 0, 1, 0, &mut s) }, MgStatus::InvalidArgument);
    assert_eq!(unsafe { mg_count(ptr::null(), MG_KIND_REGULAR, 0, 1, 2, &mut s) }, MgStatus::NullPointer);
    assert_eq!(unsafe { mg_count(t, MG_KIND_REGULAR, 0, 1, 2, ptr::null_mut()) }, MgStatus::NullPointer);
    assert_eq!(unsafe { mg_tables_new(1, 1, ptr::null_mut()) }, MgStatus::NullPointer);
    // A successful call clears the message.
    assert_eq!(unsafe { mg_count(t, MG_KIND_REGULAR, 0, 1, 2, &mut s) }, MgStatus::Ok);
    take_string(s);
    assert!(mg_last_error().is_null());
    unsafe {
        mg_tables_free(t);
        mg_tables_free(ptr::null_mut());
        mg_string_free(ptr::null_mut());
        mg_histogram_free(ptr::null_mut());
    }
}

#[test]
fn oracle_histogram() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { mg_oracle_enumerate(3, 2, 2, 1, &mut h) }, MgStatus::Ok);
    let (mut g, mut total) = (0u32, 0u64);
    assert_eq!(unsafe { mg_histogram_max_genus(h, &mut g) }, MgStatus::Ok);
    assert_eq!(unsafe { mg_histogram_total(h, &mut total) }, MgStatus::Ok);
    assert_eq!(g, 2);
    assert_eq!(total, (1..14u64).step_by(2).product::<u64>());
    let counts: Vec<u64> = (0..=3)
        .map(|g| {
            let mut c = 0;
            assert_eq!(unsafe { mg_histogram_count(h, g, &mut c) }, MgStatus::Ok);
            c
        })
        .collect();
    assert_eq!(counts, [21600, 79200, 21240, 0]);
    unsafe { mg_histogram_free(h) };

    assert_eq!(unsafe { mg_oracle_enumerate(2, 1, 1, 0, &mut h) }, MgStatus::InvalidArgument);
    assert!(h.is_null());
    assert_eq!(unsafe { mg_oracle_enumerate(4, 4, 0, 0, &mut h) }, MgStatus::InvalidArgument);
    assert!(last_error().contains("cap"));
}

#[test]
fn version_string() {
    assert_eq!(unsafe { borrow_str(mg_version()) }, Some(env!("CARGO_PKG_VERSION")));
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("mapgenus.h")
}

#[test]
fn header_declares_the_api() {
    let h = std::fs::read_to_string(header()).expect("generated header");
    for name in [
        "mg_version",
        "mg_last_error",
        "mg_string_free",
        "mg_tables_new",
        "mg_tables_free",
        "mg_count",
        "mg_count_u64",
        "mg_polynomial",
        "mg_oracle_enumerate",
        "mg_histogram_count",
        "mg_histogram_max_genus",
        "mg_histogram_total",
        "mg_histogram_free",
        "typedef struct MgTables MgTables",
        "MG_STATUS_NOT_COVERED = 3",
        "MG_KIND_TWO_LEGGED 1",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

/// Builds the static library (test builds only produce the rlib), then
/// compiles the C smoke program against it and the generated header.
#[test]
fn c_program_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let target_dir = profile_dir.parent().unwrap();
    let mut build = Command::new(env!("CARGO"));
    build.args(["build", "--quiet", "--lib", "-p", "mapgenus-ffi", "--target-dir"]).arg(target_dir);
    if profile_dir.file_name().is_some_and(|n| n == "release") {
        build.arg("--release");
    }
    assert!(build.status().expect("cargo").success(), "static library build failed");
    let lib = profile_dir.join("libmapgenus_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let src = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join("c").join("smoke.c");
    let out = std::env::temp_dir().join(format!("mapgenus_smoke_{}", std::process::id()));
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("C compiler");
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
