use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use cks_ffi::*;

const K1: &str = "TYPE K1\nOBJECT\ng1 { }\ng2 { }\ng3 { }\nATTRIBUTE\na { }\nb { }\nc { }\nINCIDENCE\ng1 { a b }\ng2 { b c }\ng3 { c }\n";
const K1_CLIF: &str = "TYPE K1\nGENERATOR: OBJECT\n3 { g3 }\n4 { g1 }\n5 { g2 }\nGENERATOR: ATTRIBUTE\n2 { b }\n3 { c }\n4 { a }\nSUCCESSOR\n1 { }\n2 { 1 }\n3 { 1 }\n4 { 2 }\n5 { 2 3 }\n6 { 4 5 }\n";

fn k1() -> (*mut CksContext, *mut CksLattice) {
    let text = CString::new(K1).unwrap();
    let mut ctx = ptr::null_mut();
    let mut lattice = ptr::null_mut();
    unsafe {
        assert_eq!(cks_context_parse_fcif(text.as_ptr(), &mut ctx), CksStatus::Ok);
        assert_eq!(cks_lattice_build(ctx, &mut lattice), CksStatus::Ok);
    }
    (ctx, lattice)
}

#[test]
fn build_measure_and_emit() {
    let (ctx, lattice) = k1();
    unsafe {
        assert_eq!(cks_context_object_count(ctx), 3);
        assert_eq!(cks_context_attribute_count(ctx), 3);
        assert_eq!(cks_lattice_concept_count(lattice), 6);

        let mut s = 0;
        assert_eq!(cks_ext_similarity(lattice, 1, 2, &mut s), CksStatus::Ok);
        assert_eq!(s, 1);
        let (mut n, mut d) = (0, 0);
        assert_eq!(cks_ext_linkage(lattice, 1, 2, &mut n, &mut d), CksStatus::Ok);
        assert_eq!((n, d), (1, 2));
        assert_eq!(cks_int_linkage(lattice, 4, 1, &mut n, &mut d), CksStatus::Ok);
        assert_eq!((n, d), (1, 2));
        let mut below = false;
        assert_eq!(cks_lattice_leq(lattice, 4, 1, &mut below), CksStatus::Ok);
        assert!(below);

        let name = CString::new("K1").unwrap();
        let mut clif = ptr::null_mut();
        assert_eq!(cks_lattice_emit_clif(lattice, name.as_ptr(), &mut clif), CksStatus::Ok);
        assert_eq!(CStr::from_ptr(clif).to_str().unwrap(), K1_CLIF);
        cks_string_free(clif);

        let text = CString::new(K1_CLIF).unwrap();
        let mut again = ptr::null_mut();
        assert_eq!(cks_lattice_parse_clif(text.as_ptr(), &mut again), CksStatus::Ok);
        assert_eq!(cks_lattice_concept_count(again), 6);
        cks_lattice_free(again);

        cks_lattice_free(lattice);
        cks_context_free(ctx);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let (ctx, lattice) = k1();
    unsafe {
        let mut n = 0;
        let mut d = 0;
        assert_eq!(cks_ext_linkage(lattice, 5, 0, &mut n, &mut d), CksStatus::EmptyExtent);
        assert_eq!(cks_int_linkage(lattice, 0, 1, &mut n, &mut d), CksStatus::EmptyIntent);
        assert_eq!(cks_ext_similarity(lattice, 0, 9, &mut n), CksStatus::IndexOutOfRange);
        assert!(CStr::from_ptr(cks_last_error())
            .to_str()
            .unwrap()
            .contains("out of range"));

        let bad = CString::new("TYPE X\nOBJECT\ng1 { }\nATTRIBUTE\na { }\nINCIDENCE\ng9 { a }\n").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(cks_context_parse_fcif(bad.as_ptr(), &mut out), CksStatus::Syntax);
        assert!(out.is_null());
        assert!(CStr::from_ptr(cks_last_error()).to_str().unwrap().starts_with("7:1:"));

        assert_eq!(cks_context_parse_fcif(ptr::null(), &mut out), CksStatus::NullArgument);
        assert_eq!(cks_lattice_build(ptr::null(), ptr::null_mut()), CksStatus::NullArgument);
        assert_eq!(cks_lattice_concept_count(ptr::null()), 0);
        cks_lattice_free(ptr::null_mut());
        cks_context_free(ptr::null_mut());
        cks_string_free(ptr::null_mut());

        cks_lattice_free(lattice);
        cks_context_free(ctx);
    }
}

#[test]
fn header_declares_the_api_and_compiles_as_c() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/cks.h")).unwrap();
    for name in [
        "cks_context_parse_fcif",
        "cks_lattice_build",
        "cks_lattice_concept_count",
        "cks_lattice_emit_clif",
        "cks_ext_linkage",
        "cks_lattice_leq",
        "cks_last_error",
        "CKS_STATUS_OK",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
    let probe = tempfile::Builder::new().suffix(".c").tempfile().unwrap();
    std::fs::write(
        probe.path(),
        "#include \"cks.h\"\nint main(void) { return cks_lattice_concept_count(0) == 0 ? 0 : 1; }\n",
    )
    .unwrap();
    match Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(dir.join("include"))
        .arg(probe.path())
        .output()
    {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(e) => eprintln!("no C compiler available ({e}); syntax check skipped"),
    }
}
