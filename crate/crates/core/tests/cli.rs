use std::path::Path;
use std::process::{Command, Output};

fn ranklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ranklab"))
        .args(args)
        .env("RANKLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_rank() {
    let dir = tempfile::tempdir().unwrap();
    let gen = dir.path().join("gen");
    let out = ranklab(&[
        "generate",
        "--scenario",
        "s2",
        "--n",
        "200",
        "--alpha",
        "2",
        "--seed",
        "4",
        "--out",
        arg(&gen),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let meta: serde_json::Value = serde_json::from_str(&read(&gen, "metadata.json")).unwrap();
    assert_eq!(meta["config"]["seed"], 4);
    assert!(read(&gen, "graph.edges").starts_with("# Nodes: 200 Edges: "));

    let ranked = dir.path().join("rank");
    let graph = gen.join("graph.edges");
    let out = ranklab(&[
        "rank",
        "--graph",
        arg(&graph),
        "--method",
        "PRxF",
        "--out",
        arg(&ranked),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let scores = read(&ranked, "scores.csv");
    assert_eq!(scores.lines().next(), Some("node,score,F"));
    assert_eq!(scores.lines().count(), 201);
    let meta: serde_json::Value = serde_json::from_str(&read(&ranked, "metadata.json")).unwrap();
    assert_eq!(meta["args"]["method"], "PRxF");
    assert_eq!(meta["nodes"], 200);
}

#[test]
fn same_seed_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = ranklab(&[
            "rank",
            "--fixture",
            "c2",
            "--method",
            "PR+DxF",
            "--diversity",
            "pd2",
            "--steps",
            "20000",
            "--walkers",
            "3",
            "--counters",
            "--out",
            arg(&out_dir),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        (
            read(&out_dir, "scores.csv"),
            read(&out_dir, "transitions.csv"),
        )
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn trace_lists_every_arrival() {
    let dir = tempfile::tempdir().unwrap();
    let out = ranklab(&[
        "rank",
        "--fixture",
        "c1",
        "--method",
        "walkPR",
        "--steps",
        "50",
        "--trace",
        "--out",
        arg(dir.path()),
    ]);
    assert!(out.status.success());
    // the initial placement plus one line per transition
    assert_eq!(read(dir.path(), "trace.txt").lines().count(), 51);
}

#[test]
fn reliability_and_contributors_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = ranklab(&[
        "reliability",
        "--fixture",
        "c1",
        "--beta",
        "1",
        "--out",
        arg(dir.path()),
    ]);
    assert!(out.status.success());
    let rel = read(dir.path(), "reliability.csv");
    assert_eq!(rel.lines().next(), Some("node,score,E,F,score_times_F"));
    let a = rel.lines().find(|l| l.starts_with("5,")).unwrap();
    assert!(a.contains(",0.25,0.75,"), "{a}");

    let out = ranklab(&[
        "contributors",
        "--fixture",
        "c2",
        "--node",
        "8",
        "--depth",
        "2",
        "--top",
        "2",
        "--out",
        arg(dir.path()),
    ]);
    assert!(out.status.success());
    let rows = read(dir.path(), "contributors.csv");
    assert_eq!(rows.lines().next(), Some("target,source,ratio,depth"));
    assert_eq!(rows.lines().count(), 5);
}

#[test]
fn deviation_writes_summary_and_per_node_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = ranklab(&[
        "deviation",
        "--scenario",
        "s1",
        "--n",
        "100",
        "--methods",
        "PR,PRxF",
        "--out",
        arg(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let dev = read(dir.path(), "deviation.csv");
    assert_eq!(dev.lines().count(), 3);
    assert!(read(dir.path(), "node_deviation_PR.csv")
        .lines()
        .skip(1)
        .all(|l| l.ends_with(",1.0") || l.ends_with(",NA")));
    assert!(dir.path().join("node_deviation_PRxF.csv").exists());
}

#[test]
fn table1_small_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = ranklab(&[
        "table1",
        "--n",
        "100",
        "--links-per-node",
        "20",
        "--alphas",
        "2.0",
        "--seeds",
        "2",
        "--steps",
        "20000",
        "--beta",
        "1",
        "--out",
        arg(dir.path()),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t = read(dir.path(), "table1.csv");
    assert_eq!(t.lines().next(), Some("alpha,PR,PRxF,PR+D,(PR+D)xF"));
    assert_eq!(t.lines().count(), 2);
    assert_eq!(read(dir.path(), "table1_runs.csv").lines().count(), 3);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out = ranklab(&[
        "rank",
        "--fixture",
        "c1",
        "--epsilon",
        "1.5",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = ranklab(&[
        "rank",
        "--graph",
        "/nonexistent/graph.edges",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let bad = dir.path().join("bad.edges");
    std::fs::write(&bad, "# Nodes: 3 Edges: 1\n0 1\n").unwrap();
    let out = ranklab(&["rank", "--graph", arg(&bad), "--out", arg(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = ranklab(&[
        "rank",
        "--method",
        "HITS",
        "--fixture",
        "c1",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));

    let out = ranklab(&[
        "rank",
        "--fixture",
        "c2",
        "--max-iter",
        "3",
        "--out",
        arg(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("residual"));
}
