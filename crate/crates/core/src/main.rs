use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ranklab::experiment::{self, fixtures, rank_from_counters, Table1Config};
use ranklab::metrics::{average_deviation, incoming_baseline, node_deviation, NativeOrder};
use ranklab::reliability::{
    contribution_ratios, contributor_report, reliability, write_contributor_csv,
    write_reliability_csv,
};
use ranklab::rng::RNG_ALGORITHM;
use ranklab::solver::{fmt_f64, pagerank};
use ranklab::synthgen::{generate, GenerationMetadata, Scenario, ScenarioConfig};
use ranklab::walker::{run_walk_traced, DiversityKind, DiversityModel, Pd2Mode, PrdRule};
use ranklab::{Error, Graph, Method, NodeId, RankParams, ReliabilityParams, VERSION};

#[derive(Parser)]
#[command(
    name = "ranklab",
    version,
    about = "PageRank reliability and path-diversity walks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic power-law graph.
    Generate {
        #[command(flatten)]
        scenario: ScenarioArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score every node with one method.
    Rank {
        #[command(flatten)]
        source: GraphArgs,
        #[arg(long, default_value = "PR")]
        method: Method,
        #[command(flatten)]
        params: ParamArgs,
        /// Also write `counters.csv` and `transitions.csv` for walker methods.
        #[arg(long)]
        counters: bool,
        /// Write every walk arrival to `trace.txt` (single-threaded).
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Analytic contribution ratios and reliability.
    Reliability {
        #[command(flatten)]
        source: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Largest contributors to one node, by path length.
    Contributors {
        #[command(flatten)]
        source: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        /// 1-based node position.
        #[arg(long)]
        node: usize,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        #[arg(long, default_value_t = 5)]
        top: usize,
        /// Scale each link by the damping factor.
        #[arg(long)]
        discount: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Deviation of each method from the in-degree baseline.
    Deviation {
        #[command(flatten)]
        source: GraphArgs,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, value_delimiter = ',', default_value = "PR,PRxF,PR+D,PR+DxF")]
        methods: Vec<Method>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Median average deviation over an alpha x seed grid.
    Table1 {
        #[arg(long, default_value_t = 1000)]
        n: usize,
        /// Link attempts per node.
        #[arg(long, default_value_t = 100)]
        links_per_node: usize,
        #[arg(long, value_delimiter = ',', default_value = "1.5,2.0,2.5")]
        alphas: Vec<f64>,
        /// Seeds `1..=seeds`.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args, Clone, Serialize)]
struct ScenarioArgs {
    #[arg(long, default_value = "s1")]
    scenario: Scenario,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Link attempts; defaults to 100 n.
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Pair swaps for the permuted scenarios; defaults to n.
    #[arg(long)]
    permutations: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl ScenarioArgs {
    fn config(&self) -> ScenarioConfig {
        let mut c = ScenarioConfig::new(self.scenario, self.n, self.alpha, self.seed);
        if let Some(l) = self.l {
            c.link_attempts = l;
        }
        c.permutations = self.permutations;
        c
    }
}

#[derive(Args, Clone, Serialize)]
struct GraphArgs {
    /// Edge list with a `# Nodes:` header and 1-based ids.
    #[arg(long, conflicts_with_all = ["fixture", "scenario"])]
    graph: Option<PathBuf>,
    /// Bundled example graph: c1 or c2.
    #[arg(long, conflicts_with = "scenario")]
    fixture: Option<String>,
    /// Generate the graph in-process instead of loading it.
    #[arg(long)]
    scenario: Option<Scenario>,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long)]
    permutations: Option<usize>,
    /// Generator seed; also the default walk seed.
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl GraphArgs {
    fn load(&self) -> ranklab::Result<Graph> {
        if let Some(path) = &self.graph {
            return Graph::load_edge_list(path).map_err(|e| match e {
                Error::Io(io) => Error::Input(format!("cannot read {}: {io}", path.display())),
                other => other,
            });
        }
        if let Some(name) = &self.fixture {
            return match name.as_str() {
                "c1" => Ok(fixtures::c1()),
                "c2" => Ok(fixtures::c2()),
                other => Err(Error::Input(format!("unknown fixture {other:?}"))),
            };
        }
        let Some(scenario) = self.scenario else {
            return Err(Error::Input(
                "one of --graph, --fixture or --scenario is required".into(),
            ));
        };
        let mut c = ScenarioConfig::new(scenario, self.n, self.alpha, self.seed);
        if let Some(l) = self.l {
            c.link_attempts = l;
        }
        c.permutations = self.permutations;
        generate(&c)
    }
}

#[derive(Args, Clone, Serialize)]
struct ParamArgs {
    #[arg(long, default_value_t = 0.15)]
    epsilon: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long, default_value_t = 0.5)]
    beta: f64,
    /// Concentration exponent of the reliability error.
    #[arg(long, default_value_t = 2.0)]
    rel_alpha: f64,
    /// Count teleport transitions as contributions.
    #[arg(long)]
    include_damping: bool,
    #[arg(long, default_value_t = 1_000_000)]
    steps: u64,
    #[arg(long, default_value_t = 1)]
    walkers: usize,
    /// Walk seed; defaults to the graph seed.
    #[arg(long)]
    walk_seed: Option<u64>,
    /// pd1, pd2 or pd3.
    #[arg(long)]
    diversity: Option<DiversityKind>,
    #[arg(long, default_value = "transition-replay")]
    pd2_mode: Pd2Mode,
    /// PD1 memory length.
    #[arg(long, default_value_t = 16)]
    window: usize,
    /// off, revisit or literal; PR+D methods treat off as revisit.
    #[arg(long, default_value = "off")]
    prd: PrdRule,
    /// Shorthand for `--prd literal`.
    #[arg(long)]
    prd_literal: bool,
}

impl ParamArgs {
    fn build(&self, seed: u64) -> RankParams {
        let mut p = RankParams {
            epsilon: self.epsilon,
            tol: self.tol,
            max_iter: self.max_iter,
            reliability: ReliabilityParams {
                alpha: self.rel_alpha,
                beta: self.beta,
                include_damping: self.include_damping,
            },
            ..RankParams::default()
        };
        p.walk.epsilon = self.epsilon;
        p.walk.steps = self.steps;
        p.walk.walkers = self.walkers;
        p.walk.seed = self.walk_seed.unwrap_or(seed);
        p.walk.window = self.window;
        p.walk.prd = if self.prd_literal {
            PrdRule::Literal
        } else {
            self.prd
        };
        p.walk.diversity = self.diversity.map(|k| match k {
            DiversityKind::Pd2 => DiversityModel::pd2(self.pd2_mode),
            other => DiversityModel::of_kind(other),
        });
        p
    }
}

#[derive(Serialize)]
struct RunMetadata<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    rng_algorithm: &'static str,
    command: &'a str,
    args: T,
    nodes: Option<usize>,
    edges: Option<usize>,
}

fn write_metadata<T: Serialize>(
    out: &Path,
    command: &str,
    args: T,
    g: Option<&Graph>,
) -> anyhow::Result<()> {
    let meta = RunMetadata {
        tool: "ranklab",
        version: VERSION,
        rng_algorithm: RNG_ALGORITHM,
        command,
        args,
        nodes: g.map(Graph::node_count),
        edges: g.map(Graph::edge_count),
    };
    let text = serde_json::to_string_pretty(&meta)?;
    fs::write(out.join("metadata.json"), text + "\n")?;
    Ok(())
}

fn create(out: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = out.join(name);
    let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn node_arg(g: &Graph, position: usize) -> ranklab::Result<NodeId> {
    if position == 0 || position > g.node_count() {
        return Err(Error::Input(format!(
            "node {position} out of range 1..={}",
            g.node_count()
        )));
    }
    Ok(NodeId::from(position - 1))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Generate { scenario, out } => {
            fs::create_dir_all(&out)?;
            let cfg = scenario.config();
            let g = generate(&cfg)?;
            g.save_edge_list(out.join("graph.edges"))?;
            GenerationMetadata::new(&cfg, &g).save(out.join("metadata.json"))?;
        }
        Command::Rank {
            source,
            method,
            params,
            counters,
            trace,
            out,
        } => {
            fs::create_dir_all(&out)?;
            let g = source.load()?;
            let p = params.build(source.seed);
            let result = if trace && method.uses_walker() {
                let mut w = create(&out, "trace.txt")?;
                let mut io_err = None;
                let c = run_walk_traced(&g, &p.walk_for(method), &mut |ev| {
                    if io_err.is_none() {
                        if let Err(e) = ev.write_line(&mut w) {
                            io_err = Some(e);
                        }
                    }
                })?;
                if let Some(e) = io_err {
                    return Err(e.into());
                }
                w.flush()?;
                rank_from_counters(&g, method, &p, c)?
            } else {
                experiment::rank(&g, method, &p)?
            };
            result.write_csv(create(&out, "scores.csv")?)?;
            if counters {
                if let Some(c) = &result.counters {
                    c.write_counter_csv(create(&out, "counters.csv")?)?;
                    c.write_transition_csv(&g, create(&out, "transitions.csv")?)?;
                }
            }
            let args = json!({ "method": method.name(), "graph": source, "params": p });
            write_metadata(&out, "rank", args, Some(&g))?;
        }
        Command::Reliability {
            source,
            params,
            out,
        } => {
            fs::create_dir_all(&out)?;
            let g = source.load()?;
            let p = params.build(source.seed);
            let x = pagerank(&g, &p.solver()?)?;
            let r = contribution_ratios(&g, &x, p.epsilon, &p.reliability)?;
            let f = reliability(&r, &p.reliability)?;
            write_reliability_csv(&x, &f, create(&out, "reliability.csv")?)?;
            let args = json!({ "graph": source, "params": p });
            write_metadata(&out, "reliability", args, Some(&g))?;
        }
        Command::Contributors {
            source,
            params,
            node,
            depth,
            top,
            discount,
            out,
        } => {
            fs::create_dir_all(&out)?;
            let g = source.load()?;
            let target = node_arg(&g, node)?;
            let p = params.build(source.seed);
            let x = pagerank(&g, &p.solver()?)?;
            let r = contribution_ratios(&g, &x, p.epsilon, &p.reliability)?;
            let rows = contributor_report(&r, target, depth, top, p.epsilon, discount);
            write_contributor_csv(&rows, create(&out, "contributors.csv")?)?;
            let args = json!({
                "graph": source, "params": p, "node": node,
                "depth": depth, "top": top, "discount": discount,
            });
            write_metadata(&out, "contributors", args, Some(&g))?;
        }
        Command::Deviation {
            source,
            params,
            methods,
            out,
        } => {
            fs::create_dir_all(&out)?;
            let g = source.load()?;
            let p = params.build(source.seed);
            let baseline = incoming_baseline(&g)?;
            let order = NativeOrder::identity(g.node_count());
            let pr = experiment::rank(&g, Method::Pr, &p)?;
            let mut w = create(&out, "deviation.csv")?;
            writeln!(w, "method,average_deviation")?;
            for &m in &methods {
                let res = if m == Method::Pr {
                    pr.clone()
                } else {
                    experiment::rank(&g, m, &p)?
                };
                let d = average_deviation(&res.scores, &baseline, &order)?;
                writeln!(w, "{},{}", m.name(), fmt_f64(d))?;
                let file = format!("node_deviation_{}.csv", m.name().replace('+', "plus"));
                node_deviation(&pr.scores, &res.scores)?.write_csv(create(&out, &file)?)?;
            }
            w.flush()?;
            let names: Vec<&str> = methods.iter().map(|m| m.name()).collect();
            let args = json!({ "graph": source, "params": p, "methods": names });
            write_metadata(&out, "deviation", args, Some(&g))?;
        }
        Command::Table1 {
            n,
            links_per_node,
            alphas,
            seeds,
            params,
            out,
        } => {
            fs::create_dir_all(&out)?;
            let mut p = params.build(0);
            p.walk.prd = match p.walk.prd {
                PrdRule::Off => PrdRule::Revisit,
                rule => rule,
            };
            let cfg = Table1Config {
                n,
                links_per_node,
                alphas,
                seeds: (1..=seeds).collect(),
                params: p,
            };
            let t = experiment::table1(&cfg)?;
            t.write_csv(create(&out, "table1.csv")?)?;
            t.write_runs_csv(create(&out, "table1_runs.csv")?)?;
            write_metadata(&out, "table1", &cfg, None)?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Input(_) | Error::Parse { .. }) => 2,
        Some(Error::Convergence { .. }) => 3,
        _ => 1,
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("RANKLAB_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // fails only if a pool already exists, which cannot happen here
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
