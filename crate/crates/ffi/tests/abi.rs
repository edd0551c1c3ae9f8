use std::ffi::{CStr, CString};
use std::ptr;

use ramflow_ffi::*;

const K3: &str = r#"{"signature":[{"name":"E","arity":2,"symmetric":true}],"size":3,"relations":{"E":[[0,1],[0,2],[1,2]]}}"#;
const EDGE: &str = r#"{"signature":[{"name":"E","arity":2,"symmetric":true}],"size":2,"relations":{"E":[[0,1]]}}"#;
const POINT: &str = r#"{"signature":[{"name":"E","arity":2,"symmetric":true}],"size":1}"#;

fn structure(json: &str) -> *mut RamflowStructure {
    let text = CString::new(json).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ramflow_structure_from_json(text.as_ptr(), &mut out) }, RamflowStatus::Ok);
    out
}

fn class(spec: &str, ordered: bool) -> *mut RamflowClass {
    let text = CString::new(spec).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ramflow_class_parse(text.as_ptr(), ordered, &mut out) }, RamflowStatus::Ok);
    out
}

#[test]
fn structure_round_trip() {
    let s = structure(K3);
    let mut size = 0;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(ramflow_structure_size(s, &mut size), RamflowStatus::Ok);
        assert_eq!(ramflow_structure_to_json(s, &mut json), RamflowStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_string();
        ramflow_string_free(json);
        let back = structure(&text);
        let mut iso = false;
        assert_eq!(ramflow_are_isomorphic(s, back, &mut iso), RamflowStatus::Ok);
        assert!(iso);
        ramflow_structure_free(back);
        ramflow_structure_free(s);
    }
    assert_eq!(size, 3);
}

#[test]
fn errors_are_reported() {
    let bad = CString::new("{").unwrap();
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(ramflow_structure_from_json(bad.as_ptr(), &mut out), RamflowStatus::Malformed);
        assert!(out.is_null());
        assert!(!ramflow_last_error().is_null());
        assert_eq!(ramflow_structure_from_json(ptr::null(), &mut out), RamflowStatus::NullPointer);
        let spec = CString::new("kn-free:1").unwrap();
        let mut c = ptr::null_mut();
        assert_eq!(ramflow_class_parse(spec.as_ptr(), false, &mut c), RamflowStatus::Malformed);
        let s = structure(K3);
        let k4free = class("kn-free:3", false);
        let mut yes = true;
        assert_eq!(ramflow_class_contains(k4free, s, &mut yes), RamflowStatus::Ok);
        assert!(!yes);
        assert!(ramflow_last_error().is_null());
        ramflow_class_free(k4free);
        ramflow_structure_free(s);
    }
}

#[test]
fn ramsey_and_embeddings() {
    let (k3, e, p) = (structure(K3), structure(EDGE), structure(POINT));
    let mut arrows = false;
    let mut n = 0;
    unsafe {
        assert_eq!(ramflow_arrows(k3, e, p, 2, &mut arrows), RamflowStatus::Ok);
        assert!(arrows);
        assert_eq!(ramflow_arrows(k3, e, p, 0, &mut arrows), RamflowStatus::InvalidArgument);
        assert_eq!(ramflow_count_embeddings(e, k3, &mut n), RamflowStatus::Ok);
        for h in [k3, e, p] {
            ramflow_structure_free(h);
        }
    }
    assert_eq!(n, 6);
}

#[test]
fn amalgamation_over_a_point() {
    let (p, e) = (structure(POINT), structure(EDGE));
    let graphs = class("graph", false);
    let (i, j) = ([1usize], [0usize]);
    let mut d = ptr::null_mut();
    let (mut k, mut l) = ([0usize; 2], [0usize; 2]);
    let mut size = 0;
    unsafe {
        let st = ramflow_amalgamate(p, e, e, i.as_ptr(), j.as_ptr(), 1, graphs, &mut d, k.as_mut_ptr(), l.as_mut_ptr());
        assert_eq!(st, RamflowStatus::Ok);
        ramflow_structure_size(d, &mut size);
        let bad = [7usize];
        let mut d2 = ptr::null_mut();
        let st = ramflow_amalgamate(p, e, e, bad.as_ptr(), j.as_ptr(), 1, graphs, &mut d2, ptr::null_mut(), ptr::null_mut());
        assert_eq!(st, RamflowStatus::Malformed);
        ramflow_structure_free(d);
        ramflow_structure_free(p);
        ramflow_structure_free(e);
        ramflow_class_free(graphs);
    }
    assert_eq!(size, 3);
    assert_eq!(k, [0, 1]);
    assert_eq!(l[0], 1);
}

#[test]
fn flows_and_construction() {
    let antichain = structure(r#"{"signature":[],"size":3,"partial_order":[]}"#);
    let posets = class("poset", false);
    let graphs = class("graph", true);
    let e = structure(EDGE);
    let mut count = 0;
    let mut minimal = false;
    unsafe {
        assert_eq!(ramflow_admissible_order_count(antichain, posets, &mut count), RamflowStatus::Ok);
        assert_eq!(ramflow_flow_is_minimal(antichain, posets, &mut minimal), RamflowStatus::Ok);
        let mut st = ptr::null_mut();
        assert_eq!(ramflow_construction_new(e, graphs, 1, &mut st), RamflowStatus::Ok);
        for _ in 0..6 {
            let mut bad = usize::MAX;
            assert_eq!(ramflow_construction_step(st, &mut bad), RamflowStatus::Ok);
            assert_eq!(bad, 0);
        }
        let mut cur = ptr::null_mut();
        let mut size = 0;
        assert_eq!(ramflow_construction_current(st, &mut cur), RamflowStatus::Ok);
        ramflow_structure_size(cur, &mut size);
        assert!(size >= 2);
        ramflow_structure_free(cur);
        ramflow_construction_free(st);
        for h in [antichain, e] {
            ramflow_structure_free(h);
        }
        ramflow_class_free(posets);
        ramflow_class_free(graphs);
    }
    assert_eq!(count, 6);
    assert!(minimal);
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/ramflow.h");
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(
        &src,
        format!("#include \"{header}\"\nint main(void) {{ RamflowStructure *s = 0; ramflow_structure_free(s); return RamflowStatus_Ok; }}\n"),
    )
    .unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match std::process::Command::new(&cc).arg("-fsyntax-only").arg(&src).status() {
        Ok(status) => assert!(status.success(), "{cc} rejected the header"),
        Err(_) => eprintln!("no C compiler found; header check skipped"),
    }
}
