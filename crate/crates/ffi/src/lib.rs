//! C ABI for ranklab.
//!
//! Every fallible call returns a [`RanklabStatus`]; on failure the message
//! is available from [`ranklab_last_error`] on the same thread. Graphs are
//! opaque handles released with [`ranklab_graph_free`]. Output arrays are
//! caller-allocated and must hold `ranklab_graph_node_count` values.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ranklab::metrics::{average_deviation, NativeOrder};
use ranklab::walker::diversity::Pd2Mode;
use ranklab::walker::scores_from_counters;
use ranklab::{
    contribution_ratios, generate, pagerank, reliability, run_walk, DiversityModel, Error, Graph,
    NodeId, PrdRule, RankVector, ReliabilityParams, Scenario, ScenarioConfig, SolverConfig,
    WalkConfig,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RanklabStatus {
    Ok = 0,
    InvalidInput = 1,
    Parse = 2,
    NotConverged = 3,
    Numeric = 4,
    Io = 5,
    NullPointer = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RanklabScenario {
    S1 = 0,
    S2 = 1,
    S2b = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RanklabDiversity {
    None = 0,
    Pd1 = 1,
    Pd2 = 2,
    Pd3 = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RanklabPd2Mode {
    TransitionReplay = 0,
    DuplicateDepth = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RanklabPrd {
    Off = 0,
    Revisit = 1,
    Literal = 2,
}

/// Random-walk settings; start from [`ranklab_walk_config_default`].
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct RanklabWalkConfig {
    pub epsilon: f64,
    pub steps: u64,
    pub seed: u64,
    pub walkers: usize,
    pub window: usize,
    pub diversity: RanklabDiversity,
    pub pd2_mode: RanklabPd2Mode,
    pub prd: RanklabPrd,
}

/// Opaque graph handle.
pub struct RanklabGraph {
    inner: Graph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> RanklabStatus {
    match err {
        Error::Input(_) => RanklabStatus::InvalidInput,
        Error::Parse { .. } => RanklabStatus::Parse,
        Error::Convergence { .. } => RanklabStatus::NotConverged,
        Error::Numeric(_) => RanklabStatus::Numeric,
        Error::Io(_) => RanklabStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Status(RanklabStatus, String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null() -> Failure {
    Failure::Status(RanklabStatus::NullPointer, "null pointer argument".into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RanklabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RanklabStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            RanklabStatus::Panic
        }
    }
}

unsafe fn graph_ref<'a>(g: *const RanklabGraph) -> Result<&'a Graph, Failure> {
    g.as_ref().map(|g| &g.inner).ok_or_else(null)
}

unsafe fn write_scores(x: &[f64], out: *mut f64, len: usize) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    if len < x.len() {
        return Err(Failure::Status(
            RanklabStatus::BufferTooSmall,
            format!("output holds {len} values, {} needed", x.len()),
        ));
    }
    ptr::copy_nonoverlapping(x.as_ptr(), out, x.len());
    Ok(())
}

unsafe fn store_graph(g: Graph, out: *mut *mut RanklabGraph) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null());
    }
    *out = Box::into_raw(Box::new(RanklabGraph { inner: g }));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. Valid until
/// the next call into the library.
#[no_mangle]
pub extern "C" fn ranklab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ranklab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a graph from `m` edges `src[k] -> dst[k]` with 0-based ids.
///
/// # Safety
/// `src` and `dst` must point to `m` readable values (or be NULL when `m`
/// is 0); `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ranklab_graph_new(
    n: usize,
    src: *const u32,
    dst: *const u32,
    m: usize,
    out: *mut *mut RanklabGraph,
) -> RanklabStatus {
    guard(|| {
        let edges: Vec<(NodeId, NodeId)> = if m == 0 {
            Vec::new()
        } else {
            if src.is_null() || dst.is_null() {
                return Err(null());
            }
            let s = std::slice::from_raw_parts(src, m);
            let d = std::slice::from_raw_parts(dst, m);
            s.iter()
                .zip(d)
                .map(|(&a, &b)| (NodeId(a), NodeId(b)))
                .collect()
        };
        store_graph(Graph::build(n, edges)?, out)
    })
}

/// Loads an edge list with 1-based ids.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ranklab_graph_load(
    path: *const c_char,
    out: *mut *mut RanklabGraph,
) -> RanklabStatus {
    guard(|| {
        if path.is_null() {
            return Err(null());
        }
        let p = CStr::from_ptr(path).to_str().map_err(|_| {
            Failure::Status(
                RanklabStatus::InvalidInput,
                "path is not valid UTF-8".into(),
            )
        })?;
        store_graph(Graph::load_edge_list(p)?, out)
    })
}

/// Generates a synthetic scenario graph with `L = 100 n` link attempts.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ranklab_graph_generate(
    scenario: RanklabScenario,
    n: usize,
    alpha: f64,
    seed: u64,
    out: *mut *mut RanklabGraph,
) -> RanklabStatus {
    guard(|| {
        let s = match scenario {
            RanklabScenario::S1 => Scenario::S1,
            RanklabScenario::S2 => Scenario::S2,
            RanklabScenario::S2b => Scenario::S2b,
        };
        store_graph(generate(&ScenarioConfig::new(s, n, alpha, seed))?, out)
    })
}

/// # Safety
/// `g` must come from this library and not be used afterwards. NULL is a
/// no-op.
#[no_mangle]
pub unsafe extern "C" fn ranklab_graph_free(g: *mut RanklabGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Node count, 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ranklab_graph_node_count(g: *const RanklabGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.node_count())
}

/// Distinct edge count, 0 for NULL.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ranklab_graph_edge_count(g: *const RanklabGraph) -> usize {
    g.as_ref().map_or(0, |g| g.inner.edge_count())
}

/// Analytic PageRank. `tol <= 0` and `max_iter == 0` select the defaults.
///
/// # Safety
/// `g` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ranklab_pagerank(
    g: *const RanklabGraph,
    epsilon: f64,
    tol: f64,
    max_iter: usize,
    out: *mut f64,
    len: usize,
) -> RanklabStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let mut cfg = SolverConfig::with_epsilon(epsilon)?;
        if tol > 0.0 {
            cfg.tol = tol;
        }
        if max_iter > 0 {
            cfg.max_iter = max_iter;
        }
        write_scores(pagerank(g, &cfg)?.scores(), out, len)
    })
}

/// Reliability `F` of the analytic scores.
///
/// # Safety
/// `g` must be a live handle; `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ranklab_reliability(
    g: *const RanklabGraph,
    epsilon: f64,
    alpha: f64,
    beta: f64,
    include_damping: bool,
    out: *mut f64,
    len: usize,
) -> RanklabStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let params = ReliabilityParams {
            alpha,
            beta,
            include_damping,
        };
        params.validate()?;
        let x = pagerank(g, &SolverConfig::with_epsilon(epsilon)?)?;
        let f = reliability(&contribution_ratios(g, &x, epsilon, &params)?, &params)?;
        write_scores(&f.reliability, out, len)
    })
}

#[no_mangle]
pub extern "C" fn ranklab_walk_config_default() -> RanklabWalkConfig {
    let d = WalkConfig::default();
    RanklabWalkConfig {
        epsilon: d.epsilon,
        steps: d.steps,
        seed: d.seed,
        walkers: d.walkers,
        window: d.window,
        diversity: RanklabDiversity::None,
        pd2_mode: RanklabPd2Mode::TransitionReplay,
        prd: RanklabPrd::Off,
    }
}

fn walk_config(c: &RanklabWalkConfig) -> WalkConfig {
    let mode = match c.pd2_mode {
        RanklabPd2Mode::TransitionReplay => Pd2Mode::TransitionReplay,
        RanklabPd2Mode::DuplicateDepth => Pd2Mode::DuplicateDepth,
    };
    WalkConfig {
        epsilon: c.epsilon,
        steps: c.steps,
        seed: c.seed,
        walkers: c.walkers,
        window: c.window,
        diversity: match c.diversity {
            RanklabDiversity::None => None,
            RanklabDiversity::Pd1 => Some(DiversityModel::pd1()),
            RanklabDiversity::Pd2 => Some(DiversityModel::pd2(mode)),
            RanklabDiversity::Pd3 => Some(DiversityModel::pd3()),
        },
        prd: match c.prd {
            RanklabPrd::Off => PrdRule::Off,
            RanklabPrd::Revisit => PrdRule::Revisit,
            RanklabPrd::Literal => PrdRule::Literal,
        },
    }
}

/// Normalized visit counters of a Monte-Carlo walk.
///
/// # Safety
/// `g` must be a live handle, `cfg` readable, `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn ranklab_walk(
    g: *const RanklabGraph,
    cfg: *const RanklabWalkConfig,
    out: *mut f64,
    len: usize,
) -> RanklabStatus {
    guard(|| {
        let g = graph_ref(g)?;
        let cfg = cfg.as_ref().ok_or_else(null)?;
        let c = run_walk(g, &walk_config(cfg))?;
        write_scores(scores_from_counters(&c)?.scores(), out, len)
    })
}

/// Average CDF deviation of two score vectors in index order.
///
/// # Safety
/// `x1` and `x2` must hold `len` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ranklab_average_deviation(
    x1: *const f64,
    x2: *const f64,
    len: usize,
    out: *mut f64,
) -> RanklabStatus {
    guard(|| {
        if x1.is_null() || x2.is_null() || out.is_null() {
            return Err(null());
        }
        let a = RankVector::raw(std::slice::from_raw_parts(x1, len).to_vec())?;
        let b = RankVector::raw(std::slice::from_raw_parts(x2, len).to_vec())?;
        *out = average_deviation(&a, &b, &NativeOrder::identity(len))?;
        Ok(())
    })
}
