use std::ffi::CStr;
use std::ptr;

use ranklab_ffi::*;

fn last_error() -> String {
    let p = ranklab_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn cycle() -> *mut RanklabGraph {
    let src = [0u32, 1, 2];
    let dst = [1u32, 2, 0];
    let mut g = ptr::null_mut();
    let s = unsafe { ranklab_graph_new(3, src.as_ptr(), dst.as_ptr(), 3, &mut g) };
    assert_eq!(s, RanklabStatus::Ok);
    g
}

#[test]
fn graph_lifecycle_and_pagerank() {
    let g = cycle();
    unsafe {
        assert_eq!(ranklab_graph_node_count(g), 3);
        assert_eq!(ranklab_graph_edge_count(g), 3);
        let mut x = [0.0; 3];
        assert_eq!(
            ranklab_pagerank(g, 0.15, 0.0, 0, x.as_mut_ptr(), 3),
            RanklabStatus::Ok
        );
        assert!(x.iter().all(|v| (v - 1.0 / 3.0).abs() < 1e-10));
        let mut f = [0.0; 3];
        assert_eq!(
            ranklab_reliability(g, 0.15, 2.0, 0.5, false, f.as_mut_ptr(), 3),
            RanklabStatus::Ok
        );
        assert!(f.iter().all(|&v| v == 0.5));
        ranklab_graph_free(g);
        ranklab_graph_free(ptr::null_mut());
        assert_eq!(ranklab_graph_node_count(ptr::null()), 0);
    }
}

#[test]
fn walk_and_deviation() {
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(
            ranklab_graph_generate(RanklabScenario::S1, 50, 2.0, 1, &mut g),
            RanklabStatus::Ok
        );
        let n = ranklab_graph_node_count(g);
        let mut cfg = ranklab_walk_config_default();
        cfg.steps = 200_000;
        cfg.walkers = 2;
        cfg.diversity = RanklabDiversity::Pd2;
        cfg.prd = RanklabPrd::Revisit;
        let mut w = vec![0.0; n];
        assert_eq!(ranklab_walk(g, &cfg, w.as_mut_ptr(), n), RanklabStatus::Ok);
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let mut x = vec![0.0; n];
        assert_eq!(
            ranklab_pagerank(g, 0.15, 0.0, 0, x.as_mut_ptr(), n),
            RanklabStatus::Ok
        );
        let mut d = -1.0;
        assert_eq!(
            ranklab_average_deviation(x.as_ptr(), x.as_ptr(), n, &mut d),
            RanklabStatus::Ok
        );
        assert_eq!(d, 0.0);
        assert_eq!(
            ranklab_average_deviation(x.as_ptr(), w.as_ptr(), n, &mut d),
            RanklabStatus::Ok
        );
        assert!(d > 0.0 && d < 1.0);
        ranklab_graph_free(g);
    }
}

#[test]
fn errors_carry_status_and_message() {
    let g = cycle();
    unsafe {
        let mut x = [0.0; 2];
        assert_eq!(
            ranklab_pagerank(g, 0.15, 0.0, 0, x.as_mut_ptr(), 2),
            RanklabStatus::BufferTooSmall
        );
        assert!(last_error().contains("3 needed"));
        let mut x = [0.0; 3];
        assert_eq!(
            ranklab_pagerank(g, 1.5, 0.0, 0, x.as_mut_ptr(), 3),
            RanklabStatus::InvalidInput
        );
        assert_eq!(
            ranklab_pagerank(ptr::null(), 0.15, 0.0, 0, x.as_mut_ptr(), 3),
            RanklabStatus::NullPointer
        );
        // success clears the previous message
        assert_eq!(
            ranklab_pagerank(g, 0.15, 0.0, 0, x.as_mut_ptr(), 3),
            RanklabStatus::Ok
        );
        assert!(ranklab_last_error().is_null());

        let src = [0u32];
        let dst = [7u32];
        let mut bad = ptr::null_mut();
        assert_eq!(
            ranklab_graph_new(3, src.as_ptr(), dst.as_ptr(), 1, &mut bad),
            RanklabStatus::InvalidInput
        );
        assert!(bad.is_null());

        let mut loaded = ptr::null_mut();
        let path = c"/nonexistent/ranklab.edges";
        assert_eq!(
            ranklab_graph_load(path.as_ptr(), &mut loaded),
            RanklabStatus::Io
        );
        ranklab_graph_free(g);
    }
}

#[test]
fn load_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.edges");
    std::fs::write(&path, "# Nodes: 4 Edges: 2\n1 2\n3 1\n").unwrap();
    let c = std::ffi::CString::new(path.to_str().unwrap()).unwrap();
    let mut g = ptr::null_mut();
    unsafe {
        assert_eq!(ranklab_graph_load(c.as_ptr(), &mut g), RanklabStatus::Ok);
        assert_eq!(ranklab_graph_node_count(g), 4);
        assert_eq!(ranklab_graph_edge_count(g), 2);
        ranklab_graph_free(g);
    }
}
