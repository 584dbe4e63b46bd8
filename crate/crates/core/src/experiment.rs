//! Seeded Monte Carlo experiments over random lifts.
//!
//! Trial `t` of a run with master seed `s` draws all of its randomness from
//! `split(s, t)`, so records do not depend on scheduling and a parallel run
//! is byte-for-byte the same as a sequential one. Records are always
//! returned in trial order.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{generate, Graph, GraphKind};
use crate::lift::{iterated_lift, realize, sample_lift, sample_uniform_lift, LiftSpec, Matching, Sampler};
use crate::linalg::operator_norm;
use crate::markov::{c_param, chain_bound, chain_new_eigenvalues, lift_chain, ReversibleChain};
use crate::rng::{split, split_path};
use crate::spectral::{analyze, bound_report, corollary_bounds, new_adjacency_eigenvalues, BoundReport, DEFAULT_DELTA};

/// Substream reserved for random base graphs, disjoint from trial streams.
const GRAPH_STREAM: u64 = 0x6772_6170_6800;

/// Trials below this count trigger a warning in the marginal check.
pub const MARGINAL_MIN_TRIALS: usize = 1000;

/// Seed of trial `t`.
pub fn trial_seed(master_seed: u64, t: usize) -> u64 {
    split(master_seed, t as u64)
}

/// Seed used to generate a random base graph from a run's master seed.
pub fn graph_seed(master_seed: u64) -> u64 {
    split_path(master_seed, &[GRAPH_STREAM])
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    #[serde(default)]
    pub csv: Option<PathBuf>,
    #[serde(default)]
    pub json: Option<PathBuf>,
}

/// Experiment configuration, as read from JSON or assembled from CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Generator spec such as `complete:20` (see [`GraphKind`]).
    #[serde(default)]
    pub graph: Option<String>,
    /// Graph file in the edge-list format; exclusive with `graph`.
    #[serde(default)]
    pub graph_file: Option<PathBuf>,
    #[serde(default)]
    pub k: Option<usize>,
    /// Stage orders of an iterated lift; exclusive with `k`.
    #[serde(default)]
    pub ks: Option<Vec<usize>>,
    #[serde(default)]
    pub sampler: Sampler,
    pub trials: usize,
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_parallel")]
    pub parallel: bool,
    #[serde(default)]
    pub outputs: Outputs,
}

fn default_delta() -> f64 {
    DEFAULT_DELTA
}

fn default_parallel() -> bool {
    true
}

/// How each trial draws its lift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "scheme")]
pub enum LiftScheme {
    Uniform { k: usize },
    Cyclic { k: usize },
    Iterated { ks: Vec<usize> },
}

impl LiftScheme {
    pub fn k(&self) -> usize {
        match self {
            LiftScheme::Uniform { k } | LiftScheme::Cyclic { k } => *k,
            LiftScheme::Iterated { ks } => ks.iter().product(),
        }
    }

    pub fn sample(&self, g: &Graph, seed: u64) -> Result<LiftSpec> {
        match self {
            LiftScheme::Uniform { k } => sample_lift(g, *k, Sampler::Uniform, seed),
            LiftScheme::Cyclic { k } => sample_lift(g, *k, Sampler::Cyclic, seed),
            LiftScheme::Iterated { ks } => Ok(iterated_lift(g, ks, seed)?.1),
        }
    }
}

impl ExperimentConfig {
    /// Minimal config for an in-memory run; graph source left empty.
    pub fn new(k: usize, trials: usize, master_seed: u64) -> Self {
        Self {
            graph: None,
            graph_file: None,
            k: Some(k),
            ks: None,
            sampler: Sampler::Uniform,
            trials,
            delta: DEFAULT_DELTA,
            master_seed,
            parallel: true,
            outputs: Outputs::default(),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::Config(format!("delta = {} must lie in (0, 1)", self.delta)));
        }
        self.scheme().map(|_| ())
    }

    pub fn scheme(&self) -> Result<LiftScheme> {
        match (self.k, &self.ks) {
            (Some(_), Some(_)) => Err(Error::Config("give either k or ks, not both".into())),
            (None, None) => Err(Error::Config("missing lift order: set k or ks".into())),
            (Some(0), None) => Err(Error::Config("k must be at least 1".into())),
            (Some(k), None) => Ok(match self.sampler {
                Sampler::Uniform => LiftScheme::Uniform { k },
                Sampler::Cyclic => LiftScheme::Cyclic { k },
            }),
            (None, Some(ks)) => {
                if ks.is_empty() || ks.iter().any(|&k| k < 2) {
                    return Err(Error::Config("ks must be a non-empty list of orders >= 2".into()));
                }
                if self.sampler != Sampler::Uniform {
                    return Err(Error::Config("iterated lifts use the uniform sampler".into()));
                }
                Ok(LiftScheme::Iterated { ks: ks.clone() })
            }
        }
    }

    /// Builds the base graph. Random generators are seeded from
    /// [`graph_seed`] of the master seed.
    pub fn load_graph(&self) -> Result<Graph> {
        match (&self.graph, &self.graph_file) {
            (Some(_), Some(_)) => Err(Error::Config("give either graph or graph_file, not both".into())),
            (None, None) => Err(Error::Config("missing graph: set graph or graph_file".into())),
            (Some(spec), None) => {
                let kind: GraphKind = spec.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
                generate(&kind, graph_seed(self.master_seed))
            }
            (None, Some(path)) => {
                let f = File::open(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
                Graph::read_text(BufReader::new(f))
            }
        }
    }
}

fn run_trials<T: Send>(trials: usize, parallel: bool, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    if parallel {
        (0..trials).into_par_iter().map(f).collect()
    } else {
        (0..trials).map(f).collect()
    }
}

/// One trial of a bound-exceedance run. Laplacian fields are `None` when the base
/// graph has an isolated vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub max_new_adj: f64,
    pub dev_norm_adj: f64,
    pub adjacency_bound: f64,
    pub exceeded_adj: bool,
    pub max_new_lap_dev: Option<f64>,
    pub dev_norm_lap: Option<f64>,
    pub laplacian_bound: Option<f64>,
    pub exceeded_lap: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Summary {
    pub scheme: LiftScheme,
    pub bounds: BoundReport,
    pub trials: usize,
    pub master_seed: u64,
    pub exceeded_adj: usize,
    pub exceedance_fraction_adj: f64,
    pub laplacian_trials: usize,
    pub exceeded_lap: usize,
    pub exceedance_fraction_lap: Option<f64>,
    pub max_observed_adj: f64,
    pub mean_observed_adj: f64,
    pub max_observed_lap_dev: Option<f64>,
    /// Trials where max new |η| and the deviation norm disagree beyond tolerance.
    pub prop_equality_failures: usize,
    pub max_prop_gap_adj: f64,
    pub max_prop_gap_lap: Option<f64>,
    /// Extremes of every lifted Laplacian spectrum seen.
    pub lift_laplacian_min: Option<f64>,
    pub lift_laplacian_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Theorem1Report {
    pub summary: Theorem1Summary,
    pub records: Vec<TrialRecord>,
}

/// Independent lifts of `g`, each compared with the adjacency and Laplacian bounds.
pub fn run_theorem1(
    g: &Graph,
    scheme: &LiftScheme,
    trials: usize,
    delta: f64,
    master_seed: u64,
    parallel: bool,
) -> Result<Theorem1Report> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let bounds = bound_report(g, scheme.k(), delta)?;
    let per_trial = run_trials(trials, parallel, |t| {
        let seed = trial_seed(master_seed, t);
        let spec = scheme.sample(g, seed)?;
        let (dev, b) = analyze(g, &spec, delta)?;
        if dev.match_failure() {
            let first = dev.new_eigs_adjacency.values().first().copied().unwrap_or(f64::NAN);
            return Err(Error::SpectrumContainmentViolated {
                unmatched: dev.match_failures_adjacency + dev.match_failures_laplacian,
                first,
            });
        }
        let record = TrialRecord {
            trial: t,
            seed,
            max_new_adj: dev.max_new_adjacency,
            dev_norm_adj: dev.dev_norm_adjacency,
            adjacency_bound: b.adjacency_bound,
            exceeded_adj: dev.max_new_adjacency > b.adjacency_bound,
            max_new_lap_dev: dev.max_new_laplacian_dev,
            dev_norm_lap: dev.dev_norm_laplacian,
            laplacian_bound: b.laplacian_bound,
            exceeded_lap: dev.max_new_laplacian_dev.zip(b.laplacian_bound).map(|(x, bound)| x > bound),
        };
        Ok((record, dev.prop_equality_holds, dev.prop_gap_adjacency, dev.prop_gap_laplacian, dev.lift_laplacian_min, dev.lift_laplacian_max))
    })?;

    let fmax = |acc: Option<f64>, x: Option<f64>| match (acc, x) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (a, b) => a.or(b),
    };
    let fmin = |acc: Option<f64>, x: Option<f64>| match (acc, x) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    let mut prop_failures = 0;
    let mut max_gap_adj: f64 = 0.0;
    let mut max_gap_lap = None;
    let mut lap_min = None;
    let mut lap_max = None;
    let mut records = Vec::with_capacity(trials);
    for (rec, holds, gap_a, gap_l, lo, hi) in per_trial {
        prop_failures += usize::from(!holds);
        max_gap_adj = max_gap_adj.max(gap_a);
        max_gap_lap = fmax(max_gap_lap, gap_l);
        lap_min = fmin(lap_min, lo);
        lap_max = fmax(lap_max, hi);
        records.push(rec);
    }
    let exceeded_adj = records.iter().filter(|r| r.exceeded_adj).count();
    let laplacian_trials = records.iter().filter(|r| r.exceeded_lap.is_some()).count();
    let exceeded_lap = records.iter().filter(|r| r.exceeded_lap == Some(true)).count();
    let summary = Theorem1Summary {
        scheme: scheme.clone(),
        bounds,
        trials,
        master_seed,
        exceeded_adj,
        exceedance_fraction_adj: exceeded_adj as f64 / trials as f64,
        laplacian_trials,
        exceeded_lap,
        exceedance_fraction_lap: (laplacian_trials > 0).then(|| exceeded_lap as f64 / laplacian_trials as f64),
        max_observed_adj: records.iter().map(|r| r.max_new_adj).fold(0.0, f64::max),
        mean_observed_adj: records.iter().map(|r| r.max_new_adj).sum::<f64>() / trials as f64,
        max_observed_lap_dev: records.iter().map(|r| r.max_new_lap_dev).fold(None, fmax),
        prop_equality_failures: prop_failures,
        max_prop_gap_adj: max_gap_adj,
        max_prop_gap_lap: max_gap_lap,
        lift_laplacian_min: lap_min,
        lift_laplacian_max: lap_max,
    };
    Ok(Theorem1Report { summary, records })
}

pub fn run_theorem1_experiment(config: &ExperimentConfig) -> Result<Theorem1Report> {
    config.validate()?;
    let g = config.load_graph()?;
    run_theorem1(&g, &config.scheme()?, config.trials, config.delta, config.master_seed, config.parallel)
}

/// Direct uniform k-lift versus iterated lift, one pair per trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryRecord {
    pub trial: usize,
    pub seed: u64,
    pub adj_diff_norm: f64,
    pub lap_diff_norm: Option<f64>,
    pub adjacency_bound: f64,
    pub laplacian_bound: Option<f64>,
    pub exceeded_adj: bool,
    pub exceeded_lap: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollarySummary {
    pub ks: Vec<usize>,
    pub k: usize,
    pub n: usize,
    pub delta: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub adjacency_bound: f64,
    pub laplacian_bound: Option<f64>,
    pub exceeded_adj: usize,
    pub exceedance_fraction_adj: f64,
    pub exceeded_lap: usize,
    pub exceedance_fraction_lap: Option<f64>,
    pub max_adj_diff_norm: f64,
    pub max_lap_diff_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub summary: CorollarySummary,
    pub records: Vec<CorollaryRecord>,
}

/// Per trial, the direct lift uses `split(trial_seed, 0)` and the iterated
/// lift `split(trial_seed, 1)`. Both operators are assembled on the same
/// flattened labeling, so their difference is meaningful.
pub fn run_corollary_experiment(
    g: &Graph,
    ks: &[usize],
    trials: usize,
    delta: f64,
    master_seed: u64,
    parallel: bool,
) -> Result<CorollaryReport> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if ks.is_empty() || ks.iter().any(|&k| k < 2) {
        return Err(Error::params("ks must be a non-empty list of orders >= 2"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::params(format!("delta = {delta} outside (0, 1)")));
    }
    let deg = g.degrees();
    let k: usize = ks.iter().product();
    let n = g.n();
    let adjacency_bound = 32.0 * (deg.d_max as f64 * (4.0 * n as f64 * k as f64 / delta).ln()).sqrt();
    let laplacian_bound = if deg.d_min > 0 {
        Some(corollary_bounds(deg.d_min, deg.d_max, n, k, delta)?.1)
    } else {
        None
    };
    let records = run_trials(trials, parallel, |t| {
        let seed = trial_seed(master_seed, t);
        let direct = realize(&sample_uniform_lift(g, k, split(seed, 0))?);
        let (iterated, _) = iterated_lift(g, ks, split(seed, 1))?;
        let adj_diff_norm = operator_norm(&direct.graph().adjacency().sub(&iterated.graph().adjacency()))?;
        let lap_diff_norm = match laplacian_bound {
            Some(_) => Some(operator_norm(
                &direct.graph().normalized_laplacian().sub(&iterated.graph().normalized_laplacian()),
            )?),
            None => None,
        };
        Ok(CorollaryRecord {
            trial: t,
            seed,
            adj_diff_norm,
            lap_diff_norm,
            adjacency_bound,
            laplacian_bound,
            exceeded_adj: adj_diff_norm > adjacency_bound,
            exceeded_lap: lap_diff_norm.zip(laplacian_bound).map(|(x, b)| x > b),
        })
    })?;
    let exceeded_adj = records.iter().filter(|r| r.exceeded_adj).count();
    let exceeded_lap = records.iter().filter(|r| r.exceeded_lap == Some(true)).count();
    let summary = CorollarySummary {
        ks: ks.to_vec(),
        k,
        n,
        delta,
        trials,
        master_seed,
        adjacency_bound,
        laplacian_bound,
        exceeded_adj,
        exceedance_fraction_adj: exceeded_adj as f64 / trials as f64,
        exceeded_lap,
        exceedance_fraction_lap: laplacian_bound.map(|_| exceeded_lap as f64 / trials as f64),
        max_adj_diff_norm: records.iter().map(|r| r.adj_diff_norm).fold(0.0, f64::max),
        max_lap_diff_norm: laplacian_bound.map(|_| records.iter().filter_map(|r| r.lap_diff_norm).fold(0.0, f64::max)),
    };
    Ok(CorollaryReport { summary, records })
}

/// One cell `(ℓ, r)` of a marginal tally, 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalCell {
    pub l: usize,
    pub r: usize,
    pub count: u64,
    pub frequency: f64,
    pub within: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginalReport {
    /// The tallied base edge, 1-based.
    pub edge: (usize, usize),
    pub k: usize,
    pub trials: usize,
    pub expected: f64,
    /// Three binomial standard deviations at p = 1/k.
    pub half_width: f64,
    pub max_abs_deviation: f64,
    pub failing_cells: usize,
    pub pass: bool,
    pub cells: Vec<MarginalCell>,
}

/// Tallies how often copy `ℓ` of the designated edge's first endpoint is
/// matched to copy `r` of the second, over `trials` draws of `draw(t)`.
pub fn tally_marginals(
    edge: (usize, usize),
    k: usize,
    trials: usize,
    draw: impl Fn(usize) -> Result<Matching>,
) -> Result<MarginalReport> {
    if trials == 0 {
        return Err(Error::params("marginal check needs at least one trial"));
    }
    if trials < MARGINAL_MIN_TRIALS {
        log::warn!("marginal check with {trials} trials; at least {MARGINAL_MIN_TRIALS} recommended");
    }
    let mut counts = vec![0u64; k * k];
    for t in 0..trials {
        let m = draw(t)?;
        if m.k() != k {
            return Err(Error::params(format!("matching of order {} in a k = {k} tally", m.k())));
        }
        for l in 0..k {
            counts[l * k + m.image(l)] += 1;
        }
    }
    let p = 1.0 / k as f64;
    let half_width = 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
    let cells: Vec<MarginalCell> = counts
        .iter()
        .enumerate()
        .map(|(idx, &count)| {
            let frequency = count as f64 / trials as f64;
            MarginalCell {
                l: idx / k + 1,
                r: idx % k + 1,
                count,
                frequency,
                within: (frequency - p).abs() <= half_width,
            }
        })
        .collect();
    let failing_cells = cells.iter().filter(|c| !c.within).count();
    Ok(MarginalReport {
        edge,
        k,
        trials,
        expected: p,
        half_width,
        max_abs_deviation: cells.iter().map(|c| (c.frequency - p).abs()).fold(0.0, f64::max),
        failing_cells,
        pass: failing_cells == 0,
        cells,
    })
}

fn designated_edge(g: &Graph) -> Result<(usize, usize)> {
    g.edges()
        .first()
        .copied()
        .ok_or_else(|| Error::params("marginal check needs a graph with at least one edge"))
}

/// Marginals of a single-step sampler on the first edge of `g`.
pub fn run_marginal_check(g: &Graph, k: usize, sampler: Sampler, trials: usize, seed: u64) -> Result<MarginalReport> {
    let edge = designated_edge(g)?;
    tally_marginals(edge, k, trials, |t| {
        let spec = sample_lift(g, k, sampler, trial_seed(seed, t))?;
        Ok(spec.matchings()[0].clone())
    })
}

/// Marginals of the flattened composite matching of an iterated lift.
pub fn run_iterated_marginal_check(g: &Graph, ks: &[usize], trials: usize, seed: u64) -> Result<MarginalReport> {
    let edge = designated_edge(g)?;
    tally_marginals(edge, ks.iter().product(), trials, |t| {
        let (_, spec) = iterated_lift(g, ks, trial_seed(seed, t))?;
        Ok(spec.matchings()[0].clone())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessRecord {
    pub trial: usize,
    pub seed: u64,
    pub max_new_adj: f64,
    pub ratio_sqrt_dmax: f64,
    pub ratio_bound: f64,
}

/// Order statistics of a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub min: f64,
    pub mean: f64,
    pub median: f64,
    pub max: f64,
}

impl Distribution {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let m = v.len();
        let median = if m % 2 == 1 { v[m / 2] } else { 0.5 * (v[m / 2 - 1] + v[m / 2]) };
        Some(Self {
            min: v[0],
            mean: v.iter().sum::<f64>() / m as f64,
            median,
            max: v[m - 1],
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpnessReport {
    pub k: usize,
    pub d_max: usize,
    pub adjacency_bound: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub ratio_sqrt_dmax: Distribution,
    pub ratio_bound: Distribution,
    pub records: Vec<SharpnessRecord>,
}

/// Records max new |η| relative to √Δ and to the adjacency bound. Purely
/// descriptive; nothing is asserted about the ratios.
pub fn run_sharpness_probe(
    g: &Graph,
    scheme: &LiftScheme,
    trials: usize,
    delta: f64,
    master_seed: u64,
    parallel: bool,
) -> Result<SharpnessReport> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let bounds = bound_report(g, scheme.k(), delta)?;
    let sqrt_d = (bounds.d_max as f64).sqrt();
    let records = run_trials(trials, parallel, |t| {
        let seed = trial_seed(master_seed, t);
        let lifted = realize(&scheme.sample(g, seed)?);
        let max_new_adj = new_adjacency_eigenvalues(g, &lifted)?.max_abs();
        Ok(SharpnessRecord {
            trial: t,
            seed,
            max_new_adj,
            ratio_sqrt_dmax: if sqrt_d > 0.0 { max_new_adj / sqrt_d } else { 0.0 },
            ratio_bound: max_new_adj / bounds.adjacency_bound,
        })
    })?;
    let col = |f: fn(&SharpnessRecord) -> f64| records.iter().map(f).collect::<Vec<_>>();
    Ok(SharpnessReport {
        k: scheme.k(),
        d_max: bounds.d_max,
        adjacency_bound: bounds.adjacency_bound,
        trials,
        master_seed,
        ratio_sqrt_dmax: Distribution::of(&col(|r| r.ratio_sqrt_dmax)).expect("trials >= 1"),
        ratio_bound: Distribution::of(&col(|r| r.ratio_bound)).expect("trials >= 1"),
        records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovRecord {
    pub trial: usize,
    pub seed: u64,
    pub max_new_abs: f64,
    pub chain_bound: f64,
    pub exceeded: bool,
    pub balance_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub c_p: f64,
    pub chain_bound: f64,
    pub trials: usize,
    pub master_seed: u64,
    pub exceeded: usize,
    pub exceedance_fraction: f64,
    pub records: Vec<MarkovRecord>,
}

/// Random lifts of a reversible chain against 16 √(c_P ln(nk/δ)).
pub fn run_markov_experiment(
    chain: &ReversibleChain,
    k: usize,
    sampler: Sampler,
    trials: usize,
    delta: f64,
    master_seed: u64,
    parallel: bool,
) -> Result<MarkovReport> {
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let c_p = c_param(chain);
    let bound = chain_bound(c_p, chain.n(), k, delta)?;
    let records = run_trials(trials, parallel, |t| {
        let seed = trial_seed(master_seed, t);
        let lifted = lift_chain(chain, k, seed, sampler)?;
        let max_new_abs = chain_new_eigenvalues(chain, &lifted.chain)?.max_abs();
        Ok(MarkovRecord {
            trial: t,
            seed,
            max_new_abs,
            chain_bound: bound,
            exceeded: max_new_abs > bound,
            balance_gap: lifted.chain.worst_balance_violation().map_or(0.0, |w| w.2),
        })
    })?;
    let exceeded = records.iter().filter(|r| r.exceeded).count();
    Ok(MarkovReport {
        n: chain.n(),
        k,
        delta,
        c_p,
        chain_bound: bound,
        trials,
        master_seed,
        exceeded,
        exceedance_fraction: exceeded as f64 / trials as f64,
        records,
    })
}

/// Rows that can be written as CSV with a fixed header.
pub trait CsvRow {
    const HEADER: &'static [&'static str];
    fn push_fields(&self, out: &mut Vec<String>);
}

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn opt_bool(x: Option<bool>) -> String {
    x.map(|b| b.to_string()).unwrap_or_default()
}

impl CsvRow for TrialRecord {
    const HEADER: &'static [&'static str] = &[
        "trial",
        "seed",
        "max_new_adj",
        "dev_norm_adj",
        "adjacency_bound",
        "exceeded_adj",
        "max_new_lap_dev",
        "dev_norm_lap",
        "laplacian_bound",
        "exceeded_lap",
    ];

    fn push_fields(&self, out: &mut Vec<String>) {
        out.extend([
            self.trial.to_string(),
            self.seed.to_string(),
            fmt_f64(self.max_new_adj),
            fmt_f64(self.dev_norm_adj),
            fmt_f64(self.adjacency_bound),
            self.exceeded_adj.to_string(),
            opt_f64(self.max_new_lap_dev),
            opt_f64(self.dev_norm_lap),
            opt_f64(self.laplacian_bound),
            opt_bool(self.exceeded_lap),
        ]);
    }
}

impl CsvRow for CorollaryRecord {
    const HEADER: &'static [&'static str] = &[
        "trial",
        "seed",
        "adj_diff_norm",
        "adjacency_bound",
        "exceeded_adj",
        "lap_diff_norm",
        "laplacian_bound",
        "exceeded_lap",
    ];

    fn push_fields(&self, out: &mut Vec<String>) {
        out.extend([
            self.trial.to_string(),
            self.seed.to_string(),
            fmt_f64(self.adj_diff_norm),
            fmt_f64(self.adjacency_bound),
            self.exceeded_adj.to_string(),
            opt_f64(self.lap_diff_norm),
            opt_f64(self.laplacian_bound),
            opt_bool(self.exceeded_lap),
        ]);
    }
}

impl CsvRow for MarginalCell {
    const HEADER: &'static [&'static str] = &["l", "r", "count", "frequency", "within"];

    fn push_fields(&self, out: &mut Vec<String>) {
        out.extend([
            self.l.to_string(),
            self.r.to_string(),
            self.count.to_string(),
            fmt_f64(self.frequency),
            self.within.to_string(),
        ]);
    }
}

impl CsvRow for SharpnessRecord {
    const HEADER: &'static [&'static str] = &["trial", "seed", "max_new_adj", "ratio_sqrt_dmax", "ratio_bound"];

    fn push_fields(&self, out: &mut Vec<String>) {
        out.extend([
            self.trial.to_string(),
            self.seed.to_string(),
            fmt_f64(self.max_new_adj),
            fmt_f64(self.ratio_sqrt_dmax),
            fmt_f64(self.ratio_bound),
        ]);
    }
}

impl CsvRow for MarkovRecord {
    const HEADER: &'static [&'static str] = &["trial", "seed", "max_new_abs", "chain_bound", "exceeded", "balance_gap"];

    fn push_fields(&self, out: &mut Vec<String>) {
        out.extend([
            self.trial.to_string(),
            self.seed.to_string(),
            fmt_f64(self.max_new_abs),
            fmt_f64(self.chain_bound),
            self.exceeded.to_string(),
            fmt_f64(self.balance_gap),
        ]);
    }
}

/// CSV text with LF line endings.
pub fn to_csv<R: CsvRow>(rows: &[R]) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut fields = Vec::with_capacity(R::HEADER.len());
    w.write_record(R::HEADER).expect("writing to memory");
    for row in rows {
        fields.clear();
        row.push_fields(&mut fields);
        w.write_record(&fields).expect("writing to memory");
    }
    let bytes = w.into_inner().expect("flushing to memory");
    String::from_utf8(bytes).expect("fields are UTF-8")
}

/// Writes the CSV and/or pretty JSON named in `outputs`.
pub fn write_outputs<R: CsvRow, S: Serialize>(outputs: &Outputs, rows: &[R], report: &S) -> Result<()> {
    if let Some(path) = &outputs.csv {
        std::fs::write(path, to_csv(rows)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    if let Some(path) = &outputs.json {
        let f = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(f);
        serde_json::to_writer_pretty(&mut w, report).map_err(|e| Error::Io(e.to_string()))?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    Ok(())
}
