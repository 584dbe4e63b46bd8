use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use graphlift::experiment::{self, graph_seed, write_outputs, CsvRow, ExperimentConfig, LiftScheme, Outputs};
use graphlift::linalg::sym_eigenvalues;
use graphlift::markov::{read_chain, ReversibleChain};
use graphlift::{analyze, generate, realize, Error, GraphKind, LiftSpec, Sampler};

/// Refuse runs whose lifted dimension exceeds this without `--allow-large`.
const MAX_LIFTED_DIM: usize = 20_000;

#[derive(Parser, Debug)]
#[command(name = "graphlift", version, about = "Random graph lifts and the spectra of their new eigenvalues")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a lift and write its matchings.
    Lift(CommonArgs),
    /// Print the sorted adjacency and normalized Laplacian spectra of a graph.
    Spectrum(CommonArgs),
    /// Old/new spectrum split and deviation norms for a single lift.
    Analyze(CommonArgs),
    /// Monte Carlo exceedance of the adjacency and Laplacian bounds.
    Theorem1(CommonArgs),
    /// Direct versus iterated lifts (requires --ks).
    Corollary(CommonArgs),
    /// Lifts of a reversible Markov chain.
    Markov(CommonArgs),
    /// Empirical 1/k marginals of the matching on the first edge.
    Marginals(CommonArgs),
    /// Observed max new eigenvalue relative to sqrt(max degree) and the bound.
    Sharpness(CommonArgs),
}

#[derive(Args, Debug, Default)]
struct CommonArgs {
    /// JSON file with ExperimentConfig fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Graph generator: complete:N, cycle:N, cliques:Q,S, er:N,P.
    #[arg(long)]
    graph: Option<String>,
    /// Graph file (`n m` header, then one `i j` edge per line).
    #[arg(long)]
    graph_file: Option<PathBuf>,
    /// Lift file (as written by `lift --spec-out`), used by `analyze`.
    #[arg(long)]
    lift_file: Option<PathBuf>,
    /// Chain generator for `markov`: cycle:N, complete:M, random:N,DENSITY.
    #[arg(long)]
    chain: Option<String>,
    /// Chain file: `n`, n rows of P, then pi.
    #[arg(long)]
    chain_file: Option<PathBuf>,
    #[arg(long)]
    k: Option<usize>,
    /// Stage orders of an iterated lift, comma separated.
    #[arg(long, value_delimiter = ',')]
    ks: Option<Vec<usize>>,
    /// uniform or cyclic.
    #[arg(long)]
    sampler: Option<Sampler>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Run trials one after another instead of in parallel.
    #[arg(long)]
    sequential: bool,
    /// Output prefix: writes PREFIX.csv and PREFIX.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Where `lift` writes the matchings in the text lift format.
    #[arg(long)]
    spec_out: Option<PathBuf>,
    /// Permit lifted dimensions above 20000.
    #[arg(long)]
    allow_large: bool,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl CommonArgs {
    /// Merged configuration; `trials` defaults to 1 for single-shot commands.
    fn config(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_json_file(path)?,
            None => ExperimentConfig {
                graph: None,
                graph_file: None,
                k: None,
                ks: None,
                sampler: Sampler::Uniform,
                trials: 1,
                delta: graphlift::spectral::DEFAULT_DELTA,
                master_seed: 0,
                parallel: true,
                outputs: Outputs::default(),
            },
        };
        if self.graph.is_some() || self.graph_file.is_some() {
            cfg.graph = self.graph.clone();
            cfg.graph_file = self.graph_file.clone();
        }
        if self.k.is_some() || self.ks.is_some() {
            cfg.k = self.k;
            cfg.ks = self.ks.clone();
        }
        if let Some(s) = self.sampler {
            cfg.sampler = s;
        }
        if let Some(t) = self.trials {
            cfg.trials = t;
        }
        if let Some(d) = self.delta {
            cfg.delta = d;
        }
        if let Some(s) = self.seed {
            cfg.master_seed = s;
        }
        if self.sequential {
            cfg.parallel = false;
        }
        if let Some(prefix) = &self.out {
            cfg.outputs = Outputs {
                csv: Some(with_suffix(prefix, "csv")),
                json: Some(with_suffix(prefix, "json")),
            };
        }
        Ok(cfg)
    }

    fn guard(&self, n: usize, k: usize) -> Result<(), Error> {
        let dim = n.saturating_mul(k);
        if dim > MAX_LIFTED_DIM && !self.allow_large {
            return Err(config_err(format!(
                "lifted dimension n*k = {dim} exceeds {MAX_LIFTED_DIM}; pass --allow-large to run anyway"
            )));
        }
        Ok(())
    }
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

fn run(cmd: Command) -> Result<String, Error> {
    match cmd {
        Command::Lift(a) => cmd_lift(&a),
        Command::Spectrum(a) => cmd_spectrum(&a),
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Theorem1(a) => cmd_theorem1(&a),
        Command::Corollary(a) => cmd_corollary(&a),
        Command::Markov(a) => cmd_markov(&a),
        Command::Marginals(a) => cmd_marginals(&a),
        Command::Sharpness(a) => cmd_sharpness(&a),
    }
}

/// Validated config, base graph and lift scheme, with the size guard applied.
fn experiment_setup(a: &CommonArgs) -> Result<(ExperimentConfig, graphlift::Graph, LiftScheme), Error> {
    let cfg = a.config()?;
    cfg.validate()?;
    let g = cfg.load_graph()?;
    let scheme = cfg.scheme()?;
    a.guard(g.n(), scheme.k())?;
    Ok((cfg, g, scheme))
}

#[derive(Serialize)]
struct MatchedPair {
    i: usize,
    j: usize,
    l: usize,
    r: usize,
}

impl CsvRow for MatchedPair {
    const HEADER: &'static [&'static str] = &["i", "j", "l", "r"];
    fn push_fields(&self, out: &mut Vec<String>) {
        out.extend([self.i, self.j, self.l, self.r].map(|x| x.to_string()));
    }
}

#[derive(Serialize)]
struct LiftOutput<'a> {
    n: usize,
    k: usize,
    seed: u64,
    scheme: &'a LiftScheme,
    base_edges: &'a [(usize, usize)],
    /// One-based permutation per base edge, aligned with `base_edges`.
    matchings: Vec<Vec<usize>>,
    lifted_edges: &'a [(usize, usize)],
}

fn cmd_lift(a: &CommonArgs) -> Result<String, Error> {
    let (cfg, g, scheme) = experiment_setup(a)?;
    let spec = scheme.sample(&g, cfg.master_seed)?;
    let lifted = realize(&spec);
    let pairs: Vec<MatchedPair> = spec
        .iter()
        .flat_map(|(&(i, j), m)| {
            (0..m.k()).map(move |l| MatchedPair {
                i,
                j,
                l: l + 1,
                r: m.image(l) + 1,
            })
        })
        .collect();
    let out = LiftOutput {
        n: g.n(),
        k: spec.k(),
        seed: cfg.master_seed,
        scheme: &scheme,
        base_edges: g.edges(),
        matchings: spec.matchings().iter().map(|m| m.one_based()).collect(),
        lifted_edges: lifted.graph().edges(),
    };
    write_outputs(&cfg.outputs, &pairs, &out)?;
    if let Some(path) = &a.spec_out {
        let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        spec.write_text(std::io::BufWriter::new(f))?;
    }
    Ok(format!(
        "lift: n={} k={} lifted vertices={} lifted edges={}",
        g.n(),
        spec.k(),
        lifted.graph().n(),
        lifted.graph().edge_count()
    ))
}

#[derive(Serialize)]
struct SpectrumRow {
    index: usize,
    adjacency: f64,
    laplacian: Option<f64>,
}

impl CsvRow for SpectrumRow {
    const HEADER: &'static [&'static str] = &["index", "adjacency", "laplacian"];
    fn push_fields(&self, out: &mut Vec<String>) {
        out.push(self.index.to_string());
        out.push(experiment::fmt_f64(self.adjacency));
        out.push(self.laplacian.map(experiment::fmt_f64).unwrap_or_default());
    }
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| experiment::fmt_f64(*x)).collect::<Vec<_>>().join(" ")
}

fn cmd_spectrum(a: &CommonArgs) -> Result<String, Error> {
    let cfg = a.config()?;
    let g = cfg.load_graph()?;
    a.guard(g.n(), 1)?;
    let adj = sym_eigenvalues(&g.adjacency())?;
    let lap = sym_eigenvalues(&g.normalized_laplacian())?;
    println!("A: {}", fmt_list(adj.values()));
    println!("L: {}", fmt_list(lap.values()));
    let rows: Vec<SpectrumRow> = adj
        .values()
        .iter()
        .zip(lap.values())
        .enumerate()
        .map(|(index, (&adjacency, &l))| SpectrumRow {
            index: index + 1,
            adjacency,
            laplacian: Some(l),
        })
        .collect();
    let json = serde_json::json!({ "adjacency": adj, "laplacian": lap });
    write_outputs(&cfg.outputs, &rows, &json)?;
    Ok(format!("spectrum: n={} |E|={} lambda_max={}", g.n(), g.edge_count(), adj.max().unwrap_or(0.0)))
}

#[derive(Serialize)]
struct NewEigenvalue {
    operator: &'static str,
    value: f64,
}

impl CsvRow for NewEigenvalue {
    const HEADER: &'static [&'static str] = &["operator", "value"];
    fn push_fields(&self, out: &mut Vec<String>) {
        out.push(self.operator.to_string());
        out.push(experiment::fmt_f64(self.value));
    }
}

fn cmd_analyze(a: &CommonArgs) -> Result<String, Error> {
    let cfg = a.config()?;
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) {
        return Err(config_err(format!("delta = {} must lie in (0, 1)", cfg.delta)));
    }
    let spec = match &a.lift_file {
        Some(path) => {
            let f = File::open(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            LiftSpec::read_text(BufReader::new(f))?
        }
        None => {
            let g = cfg.load_graph()?;
            let scheme = cfg.scheme()?;
            a.guard(g.n(), scheme.k())?;
            scheme.sample(&g, cfg.master_seed)?
        }
    };
    let g = spec.base().clone();
    a.guard(g.n(), spec.k())?;
    let (dev, bounds) = analyze(&g, &spec, cfg.delta)?;
    let mut rows: Vec<NewEigenvalue> = dev
        .new_eigs_adjacency
        .values()
        .iter()
        .map(|&value| NewEigenvalue { operator: "adjacency", value })
        .collect();
    if let Some(lap) = &dev.new_eigs_laplacian {
        rows.extend(lap.values().iter().map(|&value| NewEigenvalue { operator: "laplacian", value }));
    }
    let json = serde_json::json!({ "deviation": dev, "bounds": bounds });
    println!("{}", serde_json::to_string_pretty(&json).map_err(|e| Error::Io(e.to_string()))?);
    write_outputs(&cfg.outputs, &rows, &json)?;
    if dev.match_failure() {
        return Err(Error::SpectrumContainmentViolated {
            unmatched: dev.match_failures_adjacency + dev.match_failures_laplacian,
            first: f64::NAN,
        });
    }
    Ok(format!(
        "analyze: n={} k={} max_new_adj={} dev_norm_adj={} prop_equality_holds={}",
        g.n(),
        spec.k(),
        dev.max_new_adjacency,
        dev.dev_norm_adjacency,
        dev.prop_equality_holds
    ))
}

fn cmd_theorem1(a: &CommonArgs) -> Result<String, Error> {
    let (cfg, g, scheme) = experiment_setup(a)?;
    let rep = experiment::run_theorem1(&g, &scheme, cfg.trials, cfg.delta, cfg.master_seed, cfg.parallel)?;
    write_outputs(&cfg.outputs, &rep.records, &rep)?;
    let s = &rep.summary;
    Ok(format!(
        "theorem1: trials={} exceeded_adj={}/{} exceeded_lap={}/{} max_new_adj={} adjacency_bound={}",
        s.trials,
        s.exceeded_adj,
        s.trials,
        s.exceeded_lap,
        s.laplacian_trials,
        s.max_observed_adj,
        s.bounds.adjacency_bound
    ))
}

fn cmd_corollary(a: &CommonArgs) -> Result<String, Error> {
    let (cfg, g, scheme) = experiment_setup(a)?;
    let LiftScheme::Iterated { ks } = scheme else {
        return Err(config_err("corollary needs --ks (iterated lift stage orders)"));
    };
    let rep = experiment::run_corollary_experiment(&g, &ks, cfg.trials, cfg.delta, cfg.master_seed, cfg.parallel)?;
    write_outputs(&cfg.outputs, &rep.records, &rep)?;
    let s = &rep.summary;
    Ok(format!(
        "corollary: trials={} k={} exceeded_adj={} exceeded_lap={} max_adj_diff={} adjacency_bound={}",
        s.trials, s.k, s.exceeded_adj, s.exceeded_lap, s.max_adj_diff_norm, s.adjacency_bound
    ))
}

fn parse_chain(spec: &str, seed: u64) -> Result<ReversibleChain, Error> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let bad = || config_err(format!("bad chain spec `{spec}` (cycle:N, complete:M, random:N,DENSITY)"));
    let args: Vec<&str> = args.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    match (name, args.as_slice()) {
        ("cycle", [n]) => {
            let n = n.parse().map_err(|_| bad())?;
            ReversibleChain::random_walk(&generate(&GraphKind::Cycle { n }, 0)?)
        }
        ("complete", [m]) => {
            let n = m.parse().map_err(|_| bad())?;
            ReversibleChain::random_walk(&generate(&GraphKind::Complete { n }, 0)?)
        }
        ("random", [n, d]) => {
            ReversibleChain::random(n.parse().map_err(|_| bad())?, d.parse().map_err(|_| bad())?, graph_seed(seed))
        }
        _ => Err(bad()),
    }
}

fn cmd_markov(a: &CommonArgs) -> Result<String, Error> {
    let cfg = a.config()?;
    if cfg.graph.is_some() || cfg.graph_file.is_some() {
        return Err(config_err("markov takes --chain or --chain-file, not a graph"));
    }
    let chain = match (&a.chain, &a.chain_file) {
        (Some(s), None) => parse_chain(s, cfg.master_seed)?,
        (None, Some(path)) => {
            let f = File::open(path).map_err(|e| config_err(format!("{}: {e}", path.display())))?;
            read_chain(BufReader::new(f))?
        }
        _ => return Err(config_err("markov needs exactly one of --chain or --chain-file")),
    };
    if cfg.trials == 0 {
        return Err(config_err("trials must be at least 1"));
    }
    let k = match (cfg.k, &cfg.ks) {
        (Some(k), None) if k >= 1 => k,
        _ => return Err(config_err("markov needs --k >= 1")),
    };
    a.guard(chain.n(), k)?;
    let rep = experiment::run_markov_experiment(&chain, k, cfg.sampler, cfg.trials, cfg.delta, cfg.master_seed, cfg.parallel)
        .map_err(|e| match e {
            Error::InvalidParams(m) => Error::Config(m),
            other => other,
        })?;
    write_outputs(&cfg.outputs, &rep.records, &rep)?;
    let max_new = rep.records.iter().map(|r| r.max_new_abs).fold(0.0, f64::max);
    Ok(format!(
        "markov: n={} k={} c_P={} chain_bound={} max_new={} exceeded={}/{}",
        rep.n, rep.k, rep.c_p, rep.chain_bound, max_new, rep.exceeded, rep.trials
    ))
}

fn cmd_marginals(a: &CommonArgs) -> Result<String, Error> {
    let mut cfg = a.config()?;
    if a.trials.is_none() && a.config.is_none() {
        cfg.trials = 10_000;
    }
    cfg.validate()?;
    let g = cfg.load_graph()?;
    let rep = match cfg.scheme()? {
        LiftScheme::Iterated { ks } => experiment::run_iterated_marginal_check(&g, &ks, cfg.trials, cfg.master_seed)?,
        scheme => experiment::run_marginal_check(&g, scheme.k(), cfg.sampler, cfg.trials, cfg.master_seed)?,
    };
    write_outputs(&cfg.outputs, &rep.cells, &rep)?;
    Ok(format!(
        "marginals: edge=({},{}) k={} trials={} max_deviation={} half_width={} pass={}",
        rep.edge.0, rep.edge.1, rep.k, rep.trials, rep.max_abs_deviation, rep.half_width, rep.pass
    ))
}

fn cmd_sharpness(a: &CommonArgs) -> Result<String, Error> {
    let (cfg, g, scheme) = experiment_setup(a)?;
    let rep = experiment::run_sharpness_probe(&g, &scheme, cfg.trials, cfg.delta, cfg.master_seed, cfg.parallel)?;
    write_outputs(&cfg.outputs, &rep.records, &rep)?;
    Ok(format!(
        "sharpness: trials={} k={} ratio_sqrt_dmax median={} max={} ratio_bound max={}",
        rep.trials, rep.k, rep.ratio_sqrt_dmax.median, rep.ratio_sqrt_dmax.max, rep.ratio_bound.max
    ))
}
