//! C interface.
//!
//! Graphs are opaque `PfGraph` handles created from PGE text and released
//! with `pf_graph_free`. Partitions cross the boundary as caller-owned
//! `uint32_t` arrays of length `n`. Every call returns a `PfStatus`; the
//! message of the last failure on the calling thread is available from
//! `pf_last_error`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use pathforest::constructor::{construct, ConstructError};
use pathforest::cycles::in_class;
use pathforest::discharging::audit;
use pathforest::io::{read_pge, read_pge_graph, IoError};
use pathforest::partition::ClassKind;
use pathforest::{f2_f, solve, verify, ClassSpec, Embedding, Graph, Outcome, Partition, SolveOptions};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    /// The partition violates a class.
    Invalid = 1,
    /// No partition exists.
    Infeasible = 2,
    BudgetExceeded = 3,
    ParseError = 4,
    NullPointer = 5,
    BadArgument = 6,
    /// The rotation system is not a planar embedding.
    NoEmbedding = 7,
    /// The result is valid but the run logged a research-grade event.
    ResearchGrade = 8,
    Panic = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PfClassKind {
    /// Induced subgraph is a forest.
    Forest = 0,
    /// Only the degree cap applies.
    DegreeOnly = 1,
}

/// A class specification. `cap < 0` means unbounded degree.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PfClass {
    pub kind: PfClassKind,
    pub cap: i64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PfCounts {
    pub vertices: usize,
    pub edges: usize,
    /// Zero when the graph has no planar embedding.
    pub faces: usize,
    pub components: usize,
    pub has_embedding: bool,
}

/// Charge totals in twelfths.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PfAuditSums {
    pub initial_twelfths: i64,
    pub final_twelfths: i64,
    pub components: usize,
    pub negatives: usize,
    pub conservation: bool,
}

/// Opaque graph handle.
pub struct PfGraph {
    graph: Graph,
    embedding: Option<Embedding>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn fail(status: PfStatus, message: impl Into<String>) -> PfStatus {
    let text = CString::new(message.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
    status
}

fn guarded(f: impl FnOnce() -> PfStatus) -> PfStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(PfStatus::Panic, "internal panic"))
}

fn specs(classes: *const PfClass, count: usize) -> Result<Vec<ClassSpec>, PfStatus> {
    if classes.is_null() {
        return Err(fail(PfStatus::NullPointer, "classes is null"));
    }
    if count == 0 {
        return Err(fail(PfStatus::BadArgument, "at least one class is required"));
    }
    // SAFETY: the caller passes `count` readable entries.
    let raw = unsafe { std::slice::from_raw_parts(classes, count) };
    Ok(raw
        .iter()
        .map(|c| {
            let cap = usize::try_from(c.cap).ok();
            match (c.kind, cap) {
                (PfClassKind::Forest, Some(d)) => ClassSpec::forest(d),
                (PfClassKind::Forest, None) => ClassSpec::any_forest(),
                (PfClassKind::DegreeOnly, d) => ClassSpec { kind: ClassKind::DegreeOnly, cap: d },
            }
        })
        .collect())
}

fn graph_ref<'a>(g: *const PfGraph) -> Result<&'a PfGraph, PfStatus> {
    // SAFETY: non-null handles come from `pf_graph_from_pge`.
    unsafe { g.as_ref() }.ok_or_else(|| fail(PfStatus::NullPointer, "graph is null"))
}

fn write_parts(parts: &[usize], out: *mut u32) {
    // SAFETY: the caller provides `n` writable entries.
    let dst = unsafe { std::slice::from_raw_parts_mut(out, parts.len()) };
    for (d, &p) in dst.iter_mut().zip(parts) {
        *d = p as u32;
    }
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Parses PGE text. Non-planar rotations are accepted; such graphs support
/// verify and solve only.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_graph_from_pge(text: *const c_char, out: *mut *mut PfGraph) -> PfStatus {
    guarded(|| {
        if text.is_null() || out.is_null() {
            return fail(PfStatus::NullPointer, "text or out is null");
        }
        let Ok(text) = CStr::from_ptr(text).to_str() else {
            return fail(PfStatus::ParseError, "text is not UTF-8");
        };
        let handle = match read_pge(text) {
            Ok((graph, e)) => PfGraph { graph, embedding: Some(e) },
            Err(IoError::Embedding(_)) => match read_pge_graph(text) {
                Ok(graph) => PfGraph { graph, embedding: None },
                Err(e) => return fail(PfStatus::ParseError, e.to_string()),
            },
            Err(e) => return fail(PfStatus::ParseError, e.to_string()),
        };
        *out = Box::into_raw(Box::new(handle));
        PfStatus::Ok
    })
}

/// # Safety
/// `g` must be null or a handle from `pf_graph_from_pge` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pf_graph_free(g: *mut PfGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_graph_counts(g: *const PfGraph, out: *mut PfCounts) -> PfStatus {
    guarded(|| {
        let g = tri!(graph_ref(g));
        if out.is_null() {
            return fail(PfStatus::NullPointer, "out is null");
        }
        *out = PfCounts {
            vertices: g.graph.n(),
            edges: g.graph.m(),
            faces: g.embedding.as_ref().map_or(0, Embedding::face_count),
            components: g.graph.components().1,
            has_embedding: g.embedding.is_some(),
        };
        PfStatus::Ok
    })
}

/// Writes whether the graph has no 4- and no 6-cycles and a planar embedding.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_graph_in_class(g: *const PfGraph, out: *mut bool) -> PfStatus {
    guarded(|| {
        let g = tri!(graph_ref(g));
        if out.is_null() {
            return fail(PfStatus::NullPointer, "out is null");
        }
        *out = g.embedding.is_some() && in_class(&g.graph);
        PfStatus::Ok
    })
}

/// Searches for a partition. `budget == 0` selects the default budget. On
/// `PF_STATUS_OK` the parts are written to `parts_out` (length `n`).
///
/// # Safety
/// `g` must be a live handle, `classes` must hold `count` entries and
/// `parts_out` must hold `n` entries.
#[no_mangle]
pub unsafe extern "C" fn pf_solve(
    g: *const PfGraph,
    classes: *const PfClass,
    count: usize,
    budget: u64,
    parts_out: *mut u32,
) -> PfStatus {
    guarded(|| {
        let g = tri!(graph_ref(g));
        let specs = tri!(specs(classes, count));
        if parts_out.is_null() {
            return fail(PfStatus::NullPointer, "parts_out is null");
        }
        let options = if budget == 0 { SolveOptions::default() } else { SolveOptions::with_budget(budget) };
        match solve(&g.graph, &specs, options).outcome {
            Outcome::Feasible(p) => {
                write_parts(p.parts(), parts_out);
                PfStatus::Ok
            }
            Outcome::Infeasible => fail(PfStatus::Infeasible, "no partition exists"),
            Outcome::BudgetExceeded => fail(PfStatus::BudgetExceeded, "search budget exhausted"),
        }
    })
}

/// Returns `PF_STATUS_OK` for a valid partition and `PF_STATUS_INVALID`
/// otherwise; the last-error message then describes the witness.
///
/// # Safety
/// As for `pf_solve`, with `parts` readable.
#[no_mangle]
pub unsafe extern "C" fn pf_verify(g: *const PfGraph, classes: *const PfClass, count: usize, parts: *const u32) -> PfStatus {
    guarded(|| {
        let g = tri!(graph_ref(g));
        let specs = tri!(specs(classes, count));
        if parts.is_null() {
            return fail(PfStatus::NullPointer, "parts is null");
        }
        let raw = std::slice::from_raw_parts(parts, g.graph.n());
        let p = match Partition::new(raw.iter().map(|&x| x as usize).collect(), specs) {
            Ok(p) => p,
            Err(e) => return fail(PfStatus::BadArgument, e.to_string()),
        };
        match verify(&g.graph, &p) {
            Ok(v) if v.valid => PfStatus::Ok,
            Ok(v) => fail(PfStatus::Invalid, format!("{:?}", v.witness)),
            Err(e) => fail(PfStatus::BadArgument, e.to_string()),
        }
    })
}

/// Builds an (F2, F)-partition by peeling reducible configurations. The
/// partition is written even when the status is `PF_STATUS_RESEARCH_GRADE`.
///
/// # Safety
/// `g` must be a live handle, `parts_out` must hold `n` entries and
/// `fallbacks_out` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pf_construct(g: *const PfGraph, parts_out: *mut u32, fallbacks_out: *mut usize) -> PfStatus {
    guarded(|| {
        let g = tri!(graph_ref(g));
        let Some(e) = &g.embedding else {
            return fail(PfStatus::NoEmbedding, "construct needs a planar embedding");
        };
        if parts_out.is_null() {
            return fail(PfStatus::NullPointer, "parts_out is null");
        }
        match construct(&g.graph, e) {
            Ok(c) => {
                write_parts(c.partition.parts(), parts_out);
                if !fallbacks_out.is_null() {
                    *fallbacks_out = c.trace.fallbacks;
                }
                if c.trace.research_grade() {
                    fail(PfStatus::ResearchGrade, format!("{:?}", c.trace.telemetry))
                } else {
                    PfStatus::Ok
                }
            }
            Err(ConstructError::BudgetExceeded { n }) => {
                fail(PfStatus::BudgetExceeded, format!("budget exhausted on {n} vertices"))
            }
            Err(e) => fail(PfStatus::Infeasible, e.to_string()),
        }
    })
}

/// Runs the discharging rules and reports charge totals.
///
/// # Safety
/// `g` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pf_audit_sums(g: *const PfGraph, out: *mut PfAuditSums) -> PfStatus {
    guarded(|| {
        let g = tri!(graph_ref(g));
        let Some(e) = &g.embedding else {
            return fail(PfStatus::NoEmbedding, "audit needs a planar embedding");
        };
        if out.is_null() {
            return fail(PfStatus::NullPointer, "out is null");
        }
        let s = audit(&g.graph, e).summary;
        *out = PfAuditSums {
            initial_twelfths: s.sum_initial.0,
            final_twelfths: s.sum_final.0,
            components: s.components,
            negatives: s.negatives.len(),
            conservation: s.conservation,
        };
        PfStatus::Ok
    })
}

/// Static description of a status.
#[no_mangle]
pub extern "C" fn pf_status_message(status: PfStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PfStatus::Ok => c"ok",
        PfStatus::Invalid => c"partition is invalid",
        PfStatus::Infeasible => c"no partition exists",
        PfStatus::BudgetExceeded => c"search budget exhausted",
        PfStatus::ParseError => c"parse error",
        PfStatus::NullPointer => c"null pointer argument",
        PfStatus::BadArgument => c"bad argument",
        PfStatus::NoEmbedding => c"graph has no planar embedding",
        PfStatus::ResearchGrade => c"research-grade event",
        PfStatus::Panic => c"internal panic",
    };
    s.as_ptr()
}

/// Message of the last failure on this thread. Valid until the next failing
/// call on the same thread.
#[no_mangle]
pub extern "C" fn pf_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Writes the two `(F2, F)` classes.
///
/// # Safety
/// `out` must hold two writable entries.
#[no_mangle]
pub unsafe extern "C" fn pf_classes_f2_f(out: *mut PfClass) -> PfStatus {
    if out.is_null() {
        return fail(PfStatus::NullPointer, "out is null");
    }
    for (i, s) in f2_f().iter().enumerate() {
        let kind = match s.kind {
            ClassKind::Forest => PfClassKind::Forest,
            ClassKind::DegreeOnly => PfClassKind::DegreeOnly,
        };
        *out.add(i) = PfClass { kind, cap: s.cap.map_or(-1, |c| c as i64) };
    }
    PfStatus::Ok
}
