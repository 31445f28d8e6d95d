use ranklab::experiment::fixtures;
use ranklab::metrics::spearman;
use ranklab::solver::{pagerank, SolverConfig};
use ranklab::synthgen::{generate, Scenario, ScenarioConfig, S2B_TRAP};
use ranklab::{Graph, NodeId};

fn in_degrees(g: &Graph) -> Vec<f64> {
    g.nodes().map(|v| g.in_degree(v) as f64).collect()
}

/// Least-squares slope of log(density) against log(degree) over
/// power-of-two bins, keeping bins with enough nodes and degrees well
/// above the sampling noise.
fn loglog_slope(degrees: &[f64], min_degree: f64, max_degree: f64) -> f64 {
    let mut bins = std::collections::BTreeMap::<u32, usize>::new();
    for &d in degrees
        .iter()
        .filter(|&&d| d >= min_degree && d <= max_degree)
    {
        *bins.entry(d.log2().floor() as u32).or_default() += 1;
    }
    let pts: Vec<(f64, f64)> = bins
        .into_iter()
        .filter(|&(_, c)| c >= 5)
        .map(|(b, c)| {
            let lo = 2f64.powi(b as i32);
            let center = lo * 1.5;
            (center.ln(), (c as f64 / lo).ln())
        })
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn generation_is_deterministic_per_seed() {
    for scenario in [Scenario::S1, Scenario::S2, Scenario::S2b] {
        let cfg = ScenarioConfig::new(scenario, 300, 2.0, 7);
        let a = generate(&cfg).unwrap();
        assert_eq!(a, generate(&cfg).unwrap(), "{scenario}");
        let other = generate(&ScenarioConfig { seed: 8, ..cfg }).unwrap();
        assert_ne!(a, other, "{scenario}");
    }
}

#[test]
fn in_degree_tail_follows_the_power_law() {
    let n = 10_000;
    let alpha = 2.0;
    let g = generate(&ScenarioConfig::new(Scenario::S1, n, alpha, 3)).unwrap();
    let slope = loglog_slope(&in_degrees(&g), 8.0, n as f64 / 20.0);
    let expected = -(1.0 + 1.0 / alpha);
    eprintln!("in-degree slope {slope:.3} (expected {expected:.3})");
    assert!(
        (slope - expected).abs() <= 0.4,
        "slope {slope}, expected {expected}"
    );
}

#[test]
fn pagerank_tracks_in_degree_on_uniform_sources() {
    let g = generate(&ScenarioConfig::new(Scenario::S1, 1000, 2.0, 1)).unwrap();
    let x = pagerank(&g, &SolverConfig::default()).unwrap();
    let rho = spearman(x.scores(), &in_degrees(&g));
    assert!(rho > 0.9, "spearman {rho}");
}

#[test]
fn permuted_sources_change_out_degrees_only() {
    let base = ScenarioConfig::new(Scenario::S2, 1000, 2.0, 5);
    let g = generate(&base).unwrap();
    let out: Vec<f64> = g.nodes().map(|v| g.out_degree(v) as f64).collect();
    // out-degree is no longer uniform across nodes
    let max = out.iter().cloned().fold(0.0, f64::max);
    let min = out.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(max > 10.0 * min.max(1.0), "out-degree range {min}..{max}");
    // destinations still favour low positions
    assert!(g.in_degree(NodeId(0)) > g.in_degree(NodeId(999)));
}

#[test]
fn s2b_rewires_the_trap() {
    let g = generate(&ScenarioConfig::new(Scenario::S2b, 200, 2.0, 1)).unwrap();
    let trap = NodeId::from(S2B_TRAP);
    assert_eq!(g.out_neighbors(NodeId(0)), &[trap]);
    assert_eq!(g.out_neighbors(trap), &[trap]);
    assert!(g.in_degree(trap) >= 2);
    let small = ScenarioConfig::new(Scenario::S2b, 50, 2.0, 1);
    assert!(generate(&small).is_err());
}

#[test]
fn edge_list_round_trip() {
    let g = generate(&ScenarioConfig::new(Scenario::S2, 120, 1.5, 2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.edges");
    g.save_edge_list(&path).unwrap();
    assert_eq!(Graph::load_edge_list(&path).unwrap(), g);
    assert_eq!(
        Graph::read_edge_list(fixtures::text("c2").unwrap().as_bytes(), &path).unwrap(),
        fixtures::c2()
    );
}

#[test]
fn s2b_contributors_of_the_trap() {
    use ranklab::reliability::{contribution_ratios, top_contributors, ReliabilityParams};
    let g = generate(&ScenarioConfig::new(Scenario::S2b, 1000, 1.5, 1)).unwrap();
    let trap = NodeId::from(S2B_TRAP);
    let x = pagerank(&g, &SolverConfig::default()).unwrap();
    let r = contribution_ratios(&g, &x, 0.15, &ReliabilityParams::default()).unwrap();
    let top = top_contributors(&r, trap, 3);
    // the self-loop carries most of the inflow; node 1 leads the rest
    assert_eq!(top[0].0, trap);
    assert_eq!(top[1].0, NodeId(0));
    assert!(top[0].1 + top[1].1 > 0.99, "{top:?}");
}
