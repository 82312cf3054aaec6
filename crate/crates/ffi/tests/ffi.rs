use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use srk_ffi::*;

const K3_GR: &str = "p tw 3 3\n1 2\n2 3\n1 3\n";

fn graph(text: &str) -> *mut SrkGraph {
    let gr = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { srk_graph_parse_gr(gr.as_ptr(), &mut g) }, SrkStatus::Ok);
    g
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(srk_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn solve_k3() {
    unsafe {
        let g = graph(K3_GR);
        assert_eq!(srk_graph_vertex_count(g), 3);
        let mut td = ptr::null_mut();
        assert_eq!(srk_td_heuristic(g, &mut td), SrkStatus::Ok);
        assert_eq!(srk_td_width(td), 2);
        let mut r = ptr::null_mut();
        assert_eq!(srk_solve(g, td, 0, 1, 2, ptr::null(), 0, 1, &mut r), SrkStatus::Ok);
        let got: Vec<bool> = (0..srk_report_len(r)).map(|s| srk_report_feasible(r, s)).collect();
        assert_eq!(got, [false, true, false, true]);
        assert_eq!(srk_report_min(r), 1);
        assert_eq!(srk_report_max(r), 3);
        let json = srk_report_json(r);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(text.contains("\"schema\":1"));
        srk_string_free(json);

        let mut o = ptr::null_mut();
        assert_eq!(srk_oracle(g, 0, 1, 2, ptr::null(), 0, &mut o), SrkStatus::Ok);
        assert_eq!(srk_report_len(o), 4);
        assert!((0..4).all(|s| srk_report_feasible(o, s) == srk_report_feasible(r, s)));
        srk_report_free(o);
        srk_report_free(r);
        srk_td_free(td);
        srk_graph_free(g);
    }
}

#[test]
fn shifts_and_built_graphs() {
    unsafe {
        let mut g = ptr::null_mut();
        assert_eq!(srk_graph_new(1, &mut g), SrkStatus::Ok);
        let mut td = ptr::null_mut();
        assert_eq!(srk_td_heuristic(g, &mut td), SrkStatus::Ok);
        // A lone plain switch cannot turn its own light off, unless it starts off.
        let mut r = ptr::null_mut();
        assert_eq!(srk_solve(g, td, 1, 1, 2, ptr::null(), 0, 1, &mut r), SrkStatus::Ok);
        assert_eq!(srk_report_min(r), -1);
        srk_report_free(r);
        let shifts = [1u32];
        assert_eq!(srk_solve(g, td, 1, 1, 2, shifts.as_ptr(), 1, 1, &mut r), SrkStatus::Ok);
        assert_eq!(srk_report_min(r), 0);
        srk_report_free(r);
        assert_eq!(srk_graph_add_edge(g, 0, 5), SrkStatus::Invalid);
        srk_td_free(td);
        srk_graph_free(g);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut g = ptr::null_mut();
        let bad = CString::new("p tw 2 1\n1 3\n").unwrap();
        assert_eq!(srk_graph_parse_gr(bad.as_ptr(), &mut g), SrkStatus::Parse);
        assert!(g.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(srk_graph_parse_gr(ptr::null(), &mut g), SrkStatus::NullPointer);
        assert!(last_error().contains("null"));

        let g = graph(K3_GR);
        let td_text = CString::new("s td 1 2 3\nb 1 1 2\n").unwrap();
        let mut td = ptr::null_mut();
        assert_eq!(srk_td_parse(g, td_text.as_ptr(), &mut td), SrkStatus::Decomposition);
        let mut r = ptr::null_mut();
        assert_eq!(srk_solve(g, ptr::null(), 0, 1, 2, ptr::null(), 0, 1, &mut r), SrkStatus::NullPointer);
        assert_eq!(srk_td_heuristic(g, &mut td), SrkStatus::Ok);
        assert_eq!(srk_solve(g, td, 0, 0, 0, ptr::null(), 0, 1, &mut r), SrkStatus::InvalidSpec);
        let short = [0u32; 2];
        assert_eq!(srk_solve(g, td, 0, 1, 2, short.as_ptr(), 2, 1, &mut r), SrkStatus::Invalid);
        srk_td_free(td);
        srk_graph_free(g);

        let big_text = CString::new("p tw 30 0\n").unwrap();
        let mut big = ptr::null_mut();
        assert_eq!(srk_graph_parse_gr(big_text.as_ptr(), &mut big), SrkStatus::Ok);
        assert_eq!(srk_oracle(big, 0, 1, 2, ptr::null(), 0, &mut r), SrkStatus::OverCap);
        srk_graph_free(big);

        assert_eq!(srk_report_len(ptr::null()), 0);
        assert_eq!(srk_report_min(ptr::null()), -1);
        assert!(srk_report_json(ptr::null()).is_null());
        srk_graph_free(ptr::null_mut());
    }
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(srk_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_api() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/srk.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in ["srk_solve", "srk_oracle", "srk_td_parse", "srk_report_json", "srk_last_error", "SrkStatus_OverCap"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    // Compile the header as C when a compiler is around.
    let Ok(cc) = Command::new("cc").arg("--version").output() else { return };
    if !cc.status.success() {
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("use.c");
    std::fs::write(&src, "#include \"srk.h\"\nint main(void) { SrkGraph *g = 0; return srk_graph_new(3, &g) == SrkStatus_Ok ? 0 : 1; }\n").unwrap();
    let out = Command::new("cc")
        .arg("-fsyntax-only")
        .arg("-I")
        .arg(header.parent().unwrap())
        .arg(&src)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
