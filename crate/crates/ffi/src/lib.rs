//! C ABI over the graphlim core: opaque graph handles, status codes, and
//! flat-buffer views of the main computations. The header is generated into
//! include/graphlim.h at build time.

use std::os::raw::c_char;

use graphlim::bslimit;
use graphlim::error::Error;
use graphlim::graph::Graph;
use graphlim::pointsupport::{self, CenterMode, FiniteMetric};
use graphlim::potential::{self, CapacityProblem};
use graphlim::spectral::{self, LaplacianKind};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GlStatus {
    Ok = 0,
    InvalidInput = 1,
    NonConvergence = 2,
    CapExceeded = 3,
    Disconnected = 4,
}

impl From<&Error> for GlStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::NonConvergence { .. } => GlStatus::NonConvergence,
            Error::SizeCapExceeded(_) | Error::BudgetExceeded(_) => GlStatus::CapExceeded,
            Error::Disconnected => GlStatus::Disconnected,
            _ => GlStatus::InvalidInput,
        }
    }
}

/// Opaque graph handle.
pub struct GlGraph {
    inner: Graph,
}

macro_rules! try_ffi {
    ($expr:expr) => {
        match $expr {
            Ok(v) => v,
            Err(e) => return GlStatus::from(&e),
        }
    };
}

unsafe fn slice_or_empty<'a, T>(ptr: *const T, len: u64) -> Option<&'a [T]> {
    if len == 0 {
        Some(&[])
    } else if ptr.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(ptr, len as usize))
    }
}

/// Builds a graph from `vertex_count` and `edge_count` endpoint pairs laid
/// out as [u0, v0, u1, v1, ...]. On success writes a heap handle to `out`.
///
/// # Safety
/// `endpoints` must point to 2*edge_count readable u64 values; `out` must be
/// a valid writable pointer.
#[no_mangle]
pub unsafe extern "C" fn gl_graph_build(
    vertex_count: u64,
    edge_count: u64,
    endpoints: *const u64,
    out: *mut *mut GlGraph,
) -> GlStatus {
    if out.is_null() {
        return GlStatus::InvalidInput;
    }
    let Some(flat) = slice_or_empty(endpoints, 2 * edge_count) else {
        return GlStatus::InvalidInput;
    };
    let edges: Vec<(usize, usize)> =
        flat.chunks_exact(2).map(|c| (c[0] as usize, c[1] as usize)).collect();
    let g = try_ffi!(Graph::new(vertex_count as usize, &edges));
    *out = Box::into_raw(Box::new(GlGraph { inner: g }));
    GlStatus::Ok
}

/// Releases a graph handle. Null is a no-op.
///
/// # Safety
/// `g` must be null or a pointer previously returned by gl_graph_build.
#[no_mangle]
pub unsafe extern "C" fn gl_graph_free(g: *mut GlGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// # Safety
/// `g` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn gl_graph_vertex_count(g: *const GlGraph) -> u64 {
    g.as_ref().map_or(0, |h| h.inner.vertex_count() as u64)
}

/// # Safety
/// `g` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn gl_graph_edge_count(g: *const GlGraph) -> u64 {
    g.as_ref().map_or(0, |h| h.inner.edge_count() as u64)
}

/// Degree of `v`; loops count twice.
///
/// # Safety
/// `g` must be a valid handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_graph_degree(g: *const GlGraph, v: u64, out: *mut u64) -> GlStatus {
    let (Some(h), false) = (g.as_ref(), out.is_null()) else {
        return GlStatus::InvalidInput;
    };
    if v as usize >= h.inner.vertex_count() {
        return GlStatus::InvalidInput;
    }
    *out = h.inner.degree(v as usize) as u64;
    GlStatus::Ok
}

/// BFS distances from `source` into `out` (length = vertex count);
/// unreachable vertices get -1.
///
/// # Safety
/// `out` must point to vertex_count writable i64 values.
#[no_mangle]
pub unsafe extern "C" fn gl_distances_from(
    g: *const GlGraph,
    source: u64,
    out: *mut i64,
) -> GlStatus {
    let (Some(h), false) = (g.as_ref(), out.is_null()) else {
        return GlStatus::InvalidInput;
    };
    let dist = try_ffi!(h.inner.distances_from(source as usize));
    let out = std::slice::from_raw_parts_mut(out, dist.len());
    for (slot, d) in out.iter_mut().zip(dist) {
        *slot = d.map_or(-1, |x| x as i64);
    }
    GlStatus::Ok
}

/// Exact Cheeger constant (graphs up to 24 vertices).
///
/// # Safety
/// Output pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_cheeger_exact(
    g: *const GlGraph,
    out_value: *mut f64,
    out_boundary: *mut u64,
    out_size: *mut u64,
) -> GlStatus {
    let Some(h) = g.as_ref() else { return GlStatus::InvalidInput };
    if out_value.is_null() || out_boundary.is_null() || out_size.is_null() {
        return GlStatus::InvalidInput;
    }
    let cut = try_ffi!(spectral::cheeger_exact(&h.inner));
    *out_value = cut.value;
    *out_boundary = cut.boundary as u64;
    *out_size = cut.size as u64;
    GlStatus::Ok
}

/// Second-smallest Laplacian eigenvalue; `normalized` != 0 selects the
/// normalized Laplacian.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_lambda2(
    g: *const GlGraph,
    normalized: i32,
    out: *mut f64,
) -> GlStatus {
    let (Some(h), false) = (g.as_ref(), out.is_null()) else {
        return GlStatus::InvalidInput;
    };
    let kind =
        if normalized != 0 { LaplacianKind::Normalized } else { LaplacianKind::Combinatorial };
    *out = try_ffi!(spectral::lambda2(&h.inner, kind));
    GlStatus::Ok
}

unsafe fn vertex_set(ptr: *const u64, len: u64) -> Option<Vec<usize>> {
    slice_or_empty(ptr, len).map(|s| s.iter().map(|&v| v as usize).collect())
}

/// p-capacity between vertex sets (potential 1 on sources, 0 on grounds).
///
/// # Safety
/// Set pointers must cover their declared lengths; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_p_capacity(
    g: *const GlGraph,
    sources: *const u64,
    n_sources: u64,
    grounds: *const u64,
    n_grounds: u64,
    p: f64,
    out: *mut f64,
) -> GlStatus {
    let (Some(h), false) = (g.as_ref(), out.is_null()) else {
        return GlStatus::InvalidInput;
    };
    let (Some(src), Some(gnd)) = (vertex_set(sources, n_sources), vertex_set(grounds, n_grounds))
    else {
        return GlStatus::InvalidInput;
    };
    let prob = try_ffi!(CapacityProblem::new(h.inner.clone(), src, gnd, p));
    let sol = try_ffi!(potential::p_capacity(&prob, 1e-8));
    *out = sol.energy;
    GlStatus::Ok
}

/// Effective resistance between vertex sets: 1 / cap_2.
///
/// # Safety
/// As gl_p_capacity.
#[no_mangle]
pub unsafe extern "C" fn gl_effective_resistance(
    g: *const GlGraph,
    sources: *const u64,
    n_sources: u64,
    grounds: *const u64,
    n_grounds: u64,
    out: *mut f64,
) -> GlStatus {
    let (Some(h), false) = (g.as_ref(), out.is_null()) else {
        return GlStatus::InvalidInput;
    };
    let (Some(src), Some(gnd)) = (vertex_set(sources, n_sources), vertex_set(grounds, n_grounds))
    else {
        return GlStatus::InvalidInput;
    };
    *out = try_ffi!(potential::effective_resistance(&h.inner, &src, &gnd));
    GlStatus::Ok
}

/// Monte-Carlo escape probability from `root` to the boundary set; writes the
/// estimate and its binomial standard error.
///
/// # Safety
/// As gl_p_capacity.
#[no_mangle]
pub unsafe extern "C" fn gl_escape_probability(
    g: *const GlGraph,
    root: u64,
    boundary: *const u64,
    n_boundary: u64,
    trials: u64,
    seed: u64,
    out_estimate: *mut f64,
    out_std_error: *mut f64,
) -> GlStatus {
    let Some(h) = g.as_ref() else { return GlStatus::InvalidInput };
    if out_estimate.is_null() || out_std_error.is_null() {
        return GlStatus::InvalidInput;
    }
    let Some(b) = vertex_set(boundary, n_boundary) else {
        return GlStatus::InvalidInput;
    };
    let (est, se) = try_ffi!(potential::escape_probability_mc(
        &h.inner,
        root as usize,
        &b,
        trials as usize,
        seed
    ));
    *out_estimate = est;
    *out_std_error = se;
    GlStatus::Ok
}

/// Canonical hex code of the depth-r ball around `root`, written as a
/// NUL-terminated string into `buf`; `out_len` receives the length without
/// the terminator. Fails with CapExceeded when `buf_len` is too small.
///
/// # Safety
/// `buf` must point to `buf_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn gl_ball_code_hex(
    g: *const GlGraph,
    root: u64,
    r: u64,
    buf: *mut u8,
    buf_len: u64,
    out_len: *mut u64,
) -> GlStatus {
    let Some(h) = g.as_ref() else { return GlStatus::InvalidInput };
    if buf.is_null() || out_len.is_null() {
        return GlStatus::InvalidInput;
    }
    let ball = try_ffi!(h.inner.ball(root as usize, r as usize));
    let code = try_ffi!(bslimit::canonical_code(&ball));
    let hex = code.to_hex();
    if hex.len() + 1 > buf_len as usize {
        return GlStatus::CapExceeded;
    }
    let out = std::slice::from_raw_parts_mut(buf, hex.len() + 1);
    out[..hex.len()].copy_from_slice(hex.as_bytes());
    out[hex.len()] = 0;
    *out_len = hex.len() as u64;
    GlStatus::Ok
}

/// Counts (delta, s)-supported points of a point cloud given as
/// dim-major-flattened coordinates; `sufficient` != 0 selects the
/// conservative center mode.
///
/// # Safety
/// `coords` must hold dim*n readable doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn gl_supported_count(
    dim: u64,
    n: u64,
    coords: *const f64,
    delta: f64,
    s: u64,
    sufficient: i32,
    out: *mut u64,
) -> GlStatus {
    if out.is_null() {
        return GlStatus::InvalidInput;
    }
    let Some(flat) = slice_or_empty(coords, dim * n) else {
        return GlStatus::InvalidInput;
    };
    let pts: Vec<Vec<f64>> = flat.chunks_exact(dim as usize).map(|c| c.to_vec()).collect();
    let metric = try_ffi!(FiniteMetric::from_points(dim as usize, pts));
    let mode = if sufficient != 0 { CenterMode::Sufficient } else { CenterMode::Necessary };
    *out = try_ffi!(pointsupport::count_supported(&metric, delta, s as usize, mode)) as u64;
    GlStatus::Ok
}

/// Minimum Euler genus over all rotation systems (exhaustive; small graphs).
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn gl_min_genus_exhaustive(g: *const GlGraph, out: *mut u64) -> GlStatus {
    let (Some(h), false) = (g.as_ref(), out.is_null()) else {
        return GlStatus::InvalidInput;
    };
    *out = try_ffi!(graphlim::embedding::min_genus_exhaustive(&h.inner)) as u64;
    GlStatus::Ok
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn gl_status_message(status: GlStatus) -> *const c_char {
    let msg: &'static [u8] = match status {
        GlStatus::Ok => b"ok\0",
        GlStatus::InvalidInput => b"invalid input\0",
        GlStatus::NonConvergence => b"iteration failed to converge\0",
        GlStatus::CapExceeded => b"size or budget cap exceeded\0",
        GlStatus::Disconnected => b"graph is disconnected\0",
    };
    msg.as_ptr() as *const c_char
}
