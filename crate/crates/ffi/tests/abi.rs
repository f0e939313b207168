//! Exercises the C ABI the way a foreign caller would: raw pointers, flat
//! buffers, and status codes.

use std::ffi::CStr;

use graphlim_ffi::*;

fn build(n: u64, edges: &[(u64, u64)]) -> *mut GlGraph {
    let flat: Vec<u64> = edges.iter().flat_map(|&(a, b)| [a, b]).collect();
    let mut handle: *mut GlGraph = std::ptr::null_mut();
    let status = unsafe { gl_graph_build(n, edges.len() as u64, flat.as_ptr(), &mut handle) };
    assert_eq!(status, GlStatus::Ok);
    assert!(!handle.is_null());
    handle
}

fn cycle_edges(n: u64) -> Vec<(u64, u64)> {
    (0..n).map(|v| (v, (v + 1) % n)).collect()
}

#[test]
fn build_query_free() {
    let g = build(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
    unsafe {
        assert_eq!(gl_graph_vertex_count(g), 4);
        assert_eq!(gl_graph_edge_count(g), 4);
        let mut deg = 0u64;
        assert_eq!(gl_graph_degree(g, 2, &mut deg), GlStatus::Ok);
        assert_eq!(deg, 2);
        assert_eq!(gl_graph_degree(g, 9, &mut deg), GlStatus::InvalidInput);
        gl_graph_free(g);
        gl_graph_free(std::ptr::null_mut()); // null is a no-op
    }
}

#[test]
fn build_rejects_bad_input() {
    let mut handle: *mut GlGraph = std::ptr::null_mut();
    unsafe {
        // endpoint out of range
        let flat = [0u64, 5];
        assert_eq!(gl_graph_build(3, 1, flat.as_ptr(), &mut handle), GlStatus::InvalidInput);
        // null endpoint buffer with non-zero edge count
        assert_eq!(gl_graph_build(3, 1, std::ptr::null(), &mut handle), GlStatus::InvalidInput);
        // null out pointer
        assert_eq!(gl_graph_build(3, 0, std::ptr::null(), std::ptr::null_mut()), GlStatus::InvalidInput);
    }
}

#[test]
fn distances_mark_unreachable() {
    // two components: a triangle and an isolated edge
    let g = build(5, &[(0, 1), (1, 2), (2, 0), (3, 4)]);
    let mut dist = [0i64; 5];
    unsafe {
        assert_eq!(gl_distances_from(g, 0, dist.as_mut_ptr()), GlStatus::Ok);
        assert_eq!(dist, [0, 1, 1, -1, -1]);
        gl_graph_free(g);
    }
}

#[test]
fn cheeger_and_lambda2_on_a_cycle() {
    let g = build(10, &cycle_edges(10));
    let (mut value, mut boundary, mut size) = (0.0f64, 0u64, 0u64);
    let mut l2 = 0.0f64;
    unsafe {
        assert_eq!(gl_cheeger_exact(g, &mut value, &mut boundary, &mut size), GlStatus::Ok);
        assert_eq!((boundary, size), (2, 5));
        assert_eq!(value, 0.4);
        assert_eq!(gl_lambda2(g, 0, &mut l2), GlStatus::Ok);
        // C10 combinatorial lambda2 = 2 - 2 cos(2 pi / 10)
        let expected = 2.0 - 2.0 * (2.0 * std::f64::consts::PI / 10.0).cos();
        assert!((l2 - expected).abs() < 1e-8);
        assert!(l2 / 2.0 <= value + 1e-9);
        gl_graph_free(g);
    }
}

#[test]
fn capacity_resistance_and_escape_are_consistent() {
    // path with 5 vertices: R(0,4) = 4, cap_2 = 1/4
    let g = build(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    let (src, gnd) = ([0u64], [4u64]);
    let (mut cap, mut r) = (0.0f64, 0.0f64);
    unsafe {
        assert_eq!(
            gl_p_capacity(g, src.as_ptr(), 1, gnd.as_ptr(), 1, 2.0, &mut cap),
            GlStatus::Ok
        );
        assert!((cap - 0.25).abs() < 1e-9);
        assert_eq!(
            gl_effective_resistance(g, src.as_ptr(), 1, gnd.as_ptr(), 1, &mut r),
            GlStatus::Ok
        );
        assert!((r - 4.0).abs() < 1e-9);
        // overlapping sets are rejected before any solve
        assert_eq!(
            gl_p_capacity(g, src.as_ptr(), 1, src.as_ptr(), 1, 2.0, &mut cap),
            GlStatus::InvalidInput
        );

        let (mut est, mut se) = (0.0f64, 0.0f64);
        assert_eq!(
            gl_escape_probability(g, 0, gnd.as_ptr(), 1, 100_000, 7, &mut est, &mut se),
            GlStatus::Ok
        );
        // 1/(deg(0) * R) = 1/4
        assert!((est - 0.25).abs() <= 3.0 * se + 1e-12);
        gl_graph_free(g);
    }
}

#[test]
fn ball_codes_distinguish_roots() {
    // path with 5 vertices: the ball at an end differs from the center ball
    let g = build(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
    let mut buf_end = [0u8; 256];
    let mut buf_mid = [0u8; 256];
    let mut len = 0u64;
    unsafe {
        assert_eq!(
            gl_ball_code_hex(g, 0, 1, buf_end.as_mut_ptr(), 256, &mut len),
            GlStatus::Ok
        );
        assert_eq!(CStr::from_ptr(buf_end.as_ptr().cast()).to_bytes().len() as u64, len);
        assert_eq!(
            gl_ball_code_hex(g, 2, 1, buf_mid.as_mut_ptr(), 256, &mut len),
            GlStatus::Ok
        );
        assert_ne!(buf_end, buf_mid);
        // symmetric roots give identical codes
        let mut buf_other_end = [0u8; 256];
        assert_eq!(
            gl_ball_code_hex(g, 4, 1, buf_other_end.as_mut_ptr(), 256, &mut len),
            GlStatus::Ok
        );
        assert_eq!(buf_end, buf_other_end);
        // a too-small buffer reports CapExceeded
        let mut tiny = [0u8; 2];
        assert_eq!(
            gl_ball_code_hex(g, 0, 1, tiny.as_mut_ptr(), 2, &mut len),
            GlStatus::CapExceeded
        );
        gl_graph_free(g);
    }
}

#[test]
fn supported_count_on_a_flat_cloud() {
    // 3x3 unit grid in the plane, flattened row-major
    let mut coords = Vec::new();
    for i in 0..3 {
        for j in 0..3 {
            coords.extend([i as f64, j as f64]);
        }
    }
    let mut count = 0u64;
    unsafe {
        assert_eq!(
            gl_supported_count(2, 9, coords.as_ptr(), 0.5, 1, 0, &mut count),
            GlStatus::Ok
        );
        assert!(count <= 9);
        // sufficient mode never counts more points than necessary mode
        let mut suff = 0u64;
        assert_eq!(
            gl_supported_count(2, 9, coords.as_ptr(), 0.5, 1, 1, &mut suff),
            GlStatus::Ok
        );
        assert!(suff <= count);
        // delta outside (0,1) is invalid
        assert_eq!(
            gl_supported_count(2, 9, coords.as_ptr(), 1.5, 1, 0, &mut count),
            GlStatus::InvalidInput
        );
    }
}

#[test]
fn min_genus_through_the_abi() {
    let k5: Vec<(u64, u64)> =
        (0..5).flat_map(|a| ((a + 1)..5).map(move |b| (a, b))).collect();
    let g = build(5, &k5);
    let mut genus = 0u64;
    unsafe {
        assert_eq!(gl_min_genus_exhaustive(g, &mut genus), GlStatus::Ok);
        assert_eq!(genus, 1);
        gl_graph_free(g);
    }
}

#[test]
fn status_messages_are_nul_terminated_text() {
    for status in [
        GlStatus::Ok,
        GlStatus::InvalidInput,
        GlStatus::NonConvergence,
        GlStatus::CapExceeded,
        GlStatus::Disconnected,
    ] {
        let msg = unsafe { CStr::from_ptr(gl_status_message(status)) };
        assert!(!msg.to_str().unwrap().is_empty());
    }
}

#[test]
fn generated_header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/graphlim.h"))
        .expect("header generated at build time");
    for symbol in [
        "gl_graph_build",
        "gl_graph_free",
        "gl_cheeger_exact",
        "gl_p_capacity",
        "gl_escape_probability",
        "gl_ball_code_hex",
        "gl_supported_count",
        "gl_min_genus_exhaustive",
        "gl_status_message",
    ] {
        assert!(header.contains(symbol), "missing {symbol} in header");
    }
    assert!(header.contains("GRAPHLIM_H"));
}
