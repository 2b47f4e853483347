use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use matcop_ffi::*;

const FIG2: &str = "cnf(neg, axiom, ~p(X) | ~p(f(Y))). cnf(pos, axiom, p(Z) | p(f(Z))).";

fn parse(text: &str) -> *mut McProblem {
    let src = CString::new(text).unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { mc_problem_parse(src.as_ptr(), &mut p) }, McStatus::Ok);
    assert!(!p.is_null());
    p
}

fn last_error() -> String {
    let e = mc_last_error();
    assert!(!e.is_null());
    unsafe { CStr::from_ptr(e) }.to_string_lossy().into_owned()
}

#[test]
fn prove_then_check_round_trip() {
    let p = parse(FIG2);
    assert_eq!(unsafe { mc_problem_clause_count(p) }, 2);
    let mut cfg = mc_config_default();
    cfg.mode = McMode::Matrix;
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { mc_prove(p, &cfg, &mut o) }, McStatus::Ok);
    assert_eq!(unsafe { mc_outcome_verdict(o) }, McVerdict::Theorem);
    let proof = unsafe { mc_outcome_proof(o) };
    assert!(!proof.is_null());
    assert_eq!(unsafe { mc_check_proof(p, proof) }, McStatus::Ok);
    assert!(mc_last_error().is_null());

    // drop the last connection line
    let text = unsafe { CStr::from_ptr(proof) }.to_str().unwrap().to_string();
    let cut = text.rfind("\nconnect ").unwrap() + 1;
    let end = cut + text[cut..].find('\n').unwrap() + 1;
    let broken = CString::new(format!("{}{}", &text[..cut], &text[end..])).unwrap();
    assert_eq!(unsafe { mc_check_proof(p, broken.as_ptr()) }, McStatus::Rejected);
    assert!(!last_error().is_empty());
    unsafe {
        mc_outcome_free(o);
        mc_problem_free(p);
    }
}

#[test]
fn non_theorem_has_no_proof() {
    let p = parse("cnf(a, axiom, p(a)). cnf(b, axiom, ~p(b)).");
    let mut o = ptr::null_mut();
    assert_eq!(unsafe { mc_prove(p, ptr::null(), &mut o) }, McStatus::Ok);
    assert_eq!(unsafe { mc_outcome_verdict(o) }, McVerdict::NonTheorem);
    assert!(unsafe { mc_outcome_proof(o) }.is_null());
    unsafe {
        mc_outcome_free(o);
        mc_problem_free(p);
    }
}

#[test]
fn errors_are_reported() {
    let src = CString::new("cnf(a, axiom, p(a)").unwrap();
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { mc_problem_parse(src.as_ptr(), &mut p) }, McStatus::ParseError);
    assert!(p.is_null());
    assert!(last_error().contains("syntax"));
    assert_eq!(unsafe { mc_problem_parse(ptr::null(), &mut p) }, McStatus::NullArgument);
    let mut o = ptr::null_mut();
    assert_eq!(
        unsafe { mc_prove(ptr::null(), ptr::null(), &mut o) },
        McStatus::NullArgument
    );
    let bad = [0xffu8, 0];
    assert_eq!(
        unsafe { mc_problem_parse(bad.as_ptr().cast(), &mut p) },
        McStatus::InvalidUtf8
    );
    let q = parse(FIG2);
    let junk = CString::new("not a proof").unwrap();
    assert_eq!(unsafe { mc_check_proof(q, junk.as_ptr()) }, McStatus::ParseError);
    unsafe {
        mc_problem_free(q);
        mc_problem_free(ptr::null_mut());
        mc_outcome_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/matcop.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for f in [
        "mc_problem_parse",
        "mc_prove",
        "mc_check_proof",
        "mc_last_error",
        "MC_STATUS_REJECTED",
    ] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(out) = Command::new("cc")
        .args(["-fsyntax-only", "-std=c99", "-Wall", "-Werror", "-x", "c"])
        .arg(&header)
        .output()
    else {
        eprintln!("no C compiler; skipping syntax check");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
