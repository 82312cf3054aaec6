//! C interface to the solver.
//!
//! Every fallible entry point returns an [`SrkStatus`]; on failure the
//! message is available from [`srk_last_error`] on the same thread until the
//! next failing call. Handles are opaque and must be released with their
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use srk::dp::{solve_with, SolveOptions, SolveReport};
use srk::graph::{heuristic_decomposition, make_nice, Graph, NiceTreeDecomposition, TreeDecomposition};
use srk::oracle::{brute_force_sizes_capped, oracle_cap};
use srk::residue::ProblemSpec;
use srk::Error;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SrkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Decomposition = 4,
    InvalidSpec = 5,
    OverCap = 6,
    Invalid = 7,
    Io = 8,
    Panic = 9,
}

pub struct SrkGraph(Graph);

/// A decomposition bound to the graph it was built for.
pub struct SrkDecomposition {
    td: TreeDecomposition,
    nice: NiceTreeDecomposition,
}

pub struct SrkReport(SolveReport);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SrkStatus {
    match e {
        Error::Parse { .. } => SrkStatus::Parse,
        Error::Decomposition(_) => SrkStatus::Decomposition,
        Error::InvalidSpec(_) => SrkStatus::InvalidSpec,
        Error::OverCap { .. } | Error::BagTooWide { .. } | Error::PrimeSearch => SrkStatus::OverCap,
        Error::Io(_) => SrkStatus::Io,
        _ => SrkStatus::Invalid,
    }
}

struct Fail(SrkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

type FfiResult<T> = Result<T, Fail>;

fn guard(f: impl FnOnce() -> FfiResult<()>) -> SrkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SrkStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SrkStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(SrkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(SrkStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn shifts_of<'a>(shifts: *const u32, len: usize) -> Option<&'a [u32]> {
    if shifts.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(shifts, len))
    }
}

/// Message of the last failure on this thread, or null. Owned by the
/// library; valid until the next call that fails.
#[no_mangle]
pub extern "C" fn srk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn srk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Edgeless graph on `n` vertices.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srk_graph_new(n: usize, out: *mut *mut SrkGraph) -> SrkStatus {
    guard(|| put(out, SrkGraph(Graph::new(n))))
}

/// Parses PACE `.gr` text.
///
/// # Safety
/// `gr` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srk_graph_parse_gr(gr: *const c_char, out: *mut *mut SrkGraph) -> SrkStatus {
    guard(|| {
        let g = Graph::parse_gr(text(gr, "gr")?)?;
        put(out, SrkGraph(g))
    })
}

/// Adds the edge `{u, v}` (0-based). Duplicate edges are ignored.
///
/// # Safety
/// `g` must be a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn srk_graph_add_edge(g: *mut SrkGraph, u: usize, v: usize) -> SrkStatus {
    guard(|| {
        let g = g.as_mut().ok_or_else(|| null("graph"))?;
        g.0.add_edge(u, v)?;
        Ok(())
    })
}

/// Vertex count, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live graph handle.
#[no_mangle]
pub unsafe extern "C" fn srk_graph_vertex_count(g: *const SrkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.0.n())
}

/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn srk_graph_free(g: *mut SrkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

fn decomposition(td: TreeDecomposition) -> SrkDecomposition {
    let nice = make_nice(&td);
    SrkDecomposition { td, nice }
}

/// Parses PACE `.td` text and validates it against `g`.
///
/// # Safety
/// `g` must be a live graph handle, `td` NUL-terminated, `out` valid for
/// writes.
#[no_mangle]
pub unsafe extern "C" fn srk_td_parse(g: *const SrkGraph, td: *const c_char, out: *mut *mut SrkDecomposition) -> SrkStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let td = TreeDecomposition::parse_td(text(td, "td")?, &g.0)?;
        put(out, decomposition(td))
    })
}

/// Min-fill decomposition of `g`.
///
/// # Safety
/// `g` must be a live graph handle and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srk_td_heuristic(g: *const SrkGraph, out: *mut *mut SrkDecomposition) -> SrkStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        put(out, decomposition(heuristic_decomposition(&g.0)))
    })
}

/// Width (largest bag minus one), or 0 for a null handle.
///
/// # Safety
/// `td` must be null or a live decomposition handle.
#[no_mangle]
pub unsafe extern "C" fn srk_td_width(td: *const SrkDecomposition) -> usize {
    td.as_ref().map_or(0, |t| t.td.width())
}

/// # Safety
/// `td` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn srk_td_free(td: *mut SrkDecomposition) {
    if !td.is_null() {
        drop(Box::from_raw(td));
    }
}

/// Runs the decomposition DP for `σ = a_sigma mod m`, `ρ = a_rho mod m`.
/// `shifts` may be null; otherwise it holds `shifts_len` entries, one per
/// vertex. `threads` of 0 or 1 runs joins sequentially.
///
/// # Safety
/// Handles must be live, `td` built for `g`, `shifts` null or valid for
/// `shifts_len` reads, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn srk_solve(
    g: *const SrkGraph,
    td: *const SrkDecomposition,
    a_sigma: u32,
    a_rho: u32,
    m: u32,
    shifts: *const u32,
    shifts_len: usize,
    threads: usize,
    out: *mut *mut SrkReport,
) -> SrkStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let td = borrow(td, "decomposition")?;
        let spec = ProblemSpec::residues(a_sigma, a_rho, m)?;
        let opts = SolveOptions {
            threads,
            ..SolveOptions::default()
        };
        let report = solve_with(&g.0, &td.nice, spec, shifts_of(shifts, shifts_len), &opts, &mut ())?;
        put(out, SrkReport(report))
    })
}

/// Exhaustive enumeration with the same report layout as [`srk_solve`].
/// Refuses graphs over the enumeration cap with `OverCap`.
///
/// # Safety
/// As for [`srk_solve`].
#[no_mangle]
pub unsafe extern "C" fn srk_oracle(
    g: *const SrkGraph,
    a_sigma: u32,
    a_rho: u32,
    m: u32,
    shifts: *const u32,
    shifts_len: usize,
    out: *mut *mut SrkReport,
) -> SrkStatus {
    guard(|| {
        let g = borrow(g, "graph")?;
        let spec = ProblemSpec::residues(a_sigma, a_rho, m)?;
        let feasible = brute_force_sizes_capped(&g.0, spec, shifts_of(shifts, shifts_len), oracle_cap())?;
        put(out, SrkReport(SolveReport::from_feasible(feasible, Default::default())))
    })
}

/// Length of the feasibility vector (`n + 1`).
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn srk_report_len(r: *const SrkReport) -> usize {
    r.as_ref().map_or(0, |r| r.0.feasible.len())
}

/// Whether a solution of exactly `size` vertices exists.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn srk_report_feasible(r: *const SrkReport, size: usize) -> bool {
    r.as_ref().is_some_and(|r| r.0.feasible.get(size).copied().unwrap_or(false))
}

/// Smallest feasible size, or -1 if there is none.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn srk_report_min(r: *const SrkReport) -> i64 {
    r.as_ref().and_then(|r| r.0.min).map_or(-1, |s| s as i64)
}

/// Largest feasible size, or -1 if there is none.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn srk_report_max(r: *const SrkReport) -> i64 {
    r.as_ref().and_then(|r| r.0.max).map_or(-1, |s| s as i64)
}

/// The JSON report. Release with [`srk_string_free`]; null on a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn srk_report_json(r: *const SrkReport) -> *mut c_char {
    match r.as_ref() {
        Some(r) => CString::new(r.0.to_json()).map_or(ptr::null_mut(), CString::into_raw),
        None => ptr::null_mut(),
    }
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn srk_report_free(r: *mut SrkReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn srk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
