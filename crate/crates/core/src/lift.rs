//! Random k-lifts: matchings, samplers, realization, iterated lifts.
//!
//! Copy `ℓ` of base vertex `i` (both 1-based) is vertex `(i − 1)·k + ℓ` of the
//! lifted graph. For a canonical base edge `i < j`, a [`Matching`] `σ` joins
//! copy `ℓ` of `i` to copy `σ(ℓ)` of `j`.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{numbered_lines, Graph};
use crate::linalg::DenseMatrix;
use crate::rng::{split_path, SplitMix64};

/// Stream tag separating per-stage seeds of an iterated lift from per-edge seeds.
const STAGE_STREAM: u64 = 0x0057_4741_4745;

/// A perfect matching between the copies of two adjacent base vertices,
/// stored as a permutation of `0..k` (0-based internally, 1-based in files).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Matching {
    sigma: Vec<usize>,
}

impl Matching {
    /// Validates that `sigma` is a bijection of `0..sigma.len()`.
    pub fn new(sigma: Vec<usize>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::params("matching of order 0"));
        }
        let mut seen = vec![false; sigma.len()];
        for &s in &sigma {
            if s >= sigma.len() || std::mem::replace(&mut seen[s], true) {
                return Err(Error::params(format!("{sigma:?} is not a permutation")));
            }
        }
        Ok(Self { sigma })
    }

    /// Builds from a 1-based permutation such as `(2, 3, 1)`.
    pub fn from_one_based(sigma: &[usize]) -> Result<Self> {
        if sigma.contains(&0) {
            return Err(Error::params("1-based permutation contains 0"));
        }
        Self::new(sigma.iter().map(|s| s - 1).collect())
    }

    pub fn identity(k: usize) -> Self {
        Self {
            sigma: (0..k).collect(),
        }
    }

    /// ℓ ↦ ℓ + shift (mod k), 0-based.
    pub fn cyclic(k: usize, shift: usize) -> Self {
        Self {
            sigma: (0..k).map(|l| (l + shift) % k).collect(),
        }
    }

    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// 0-based image of 0-based copy `l`.
    #[inline]
    pub fn image(&self, l: usize) -> usize {
        self.sigma[l]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.sigma
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.sigma.iter().map(|s| s + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.sigma.len()];
        for (l, &r) in self.sigma.iter().enumerate() {
            inv[r] = l;
        }
        Self { sigma: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.sigma.iter().enumerate().all(|(l, &r)| l == r)
    }
}

/// Which side of a canonical edge `i < j` the permutation matrix maps from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// V₍ᵢ,ⱼ₎, with a 1 at `(ℓ, σ(ℓ))`.
    IToJ,
    /// V₍ⱼ,ᵢ₎ = V₍ᵢ,ⱼ₎ᵀ.
    JToI,
}

/// The k×k 0/1 matrix of a matching.
pub fn permutation_matrix(m: &Matching, direction: Direction) -> DenseMatrix {
    let k = m.k();
    let mut v = DenseMatrix::zeros(k);
    for l in 0..k {
        match direction {
            Direction::IToJ => v.set(l, m.image(l), 1.0),
            Direction::JToI => v.set(m.image(l), l, 1.0),
        }
    }
    v
}

/// Distribution of a single edge's matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Sampler {
    /// Uniform over all k! permutations.
    #[default]
    Uniform,
    /// Uniform over the k cyclic shifts: exact 1/k marginals, tiny support.
    Cyclic,
}

impl FromStr for Sampler {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Sampler::Uniform),
            "cyclic" => Ok(Sampler::Cyclic),
            other => Err(Error::params(format!("unknown sampler `{other}` (uniform|cyclic)"))),
        }
    }
}

impl fmt::Display for Sampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampler::Uniform => "uniform",
            Sampler::Cyclic => "cyclic",
        })
    }
}

/// A base graph plus one matching per base edge, aligned with `base.edges()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftSpec {
    base: Graph,
    k: usize,
    matchings: Vec<Matching>,
}

impl LiftSpec {
    /// `matchings[e]` belongs to `base.edges()[e]`.
    pub fn new(base: Graph, k: usize, matchings: Vec<Matching>) -> Result<Self> {
        if k == 0 {
            return Err(Error::params("lift order must be at least 1"));
        }
        if matchings.len() != base.edge_count() {
            return Err(Error::params(format!(
                "{} matchings for {} base edges",
                matchings.len(),
                base.edge_count()
            )));
        }
        if let Some(m) = matchings.iter().find(|m| m.k() != k) {
            return Err(Error::params(format!("matching of order {} in a {k}-lift", m.k())));
        }
        Ok(Self { base, k, matchings })
    }

    /// Every edge matched by the identity: k disjoint copies of the base.
    pub fn identity(base: Graph, k: usize) -> Result<Self> {
        let m = base.edge_count();
        Self::new(base, k, vec![Matching::identity(k); m])
    }

    pub fn base(&self) -> &Graph {
        &self.base
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn matchings(&self) -> &[Matching] {
        &self.matchings
    }

    /// `(edge, matching)` pairs in canonical edge order.
    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Matching)> {
        self.base.edges().iter().zip(&self.matchings)
    }

    /// Matching of the canonical edge `(min(a,b), max(a,b))`.
    pub fn matching(&self, a: usize, b: usize) -> Option<&Matching> {
        self.base.edge_index(a, b).map(|e| &self.matchings[e])
    }

    pub fn lifted_vertex_count(&self) -> usize {
        self.base.n() * self.k
    }

    /// Header `n k m`, then `i j σ(1) … σ(k)` per base edge, all 1-based.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {} {}", self.base.n(), self.k, self.base.edge_count())?;
        for (&(i, j), m) in self.iter() {
            write!(w, "{i} {j}")?;
            for s in m.one_based() {
                write!(w, " {s}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = numbered_lines(r);
        let (hline, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::parse(1, "empty input, expected header `n k m`"))?;
        let head = crate::graph::parse_usizes(&header, hline, 3)?;
        let (n, k, m) = (head[0], head[1], head[2]);
        if n == 0 || k == 0 {
            return Err(Error::parse(hline, "n and k must be at least 1"));
        }
        let mut rows: Vec<((usize, usize), Matching, usize)> = Vec::with_capacity(m);
        let mut last_line = hline;
        for item in lines {
            let (line, text) = item?;
            last_line = line;
            if rows.len() == m {
                return Err(Error::parse(line, format!("more than the declared {m} edges")));
            }
            let v = crate::graph::parse_usizes(&text, line, k + 2)?;
            let (i, j) = (v[0], v[1]);
            if i == j || i == 0 || j == 0 || i > n || j > n {
                return Err(Error::parse(line, format!("invalid edge {i} {j}")));
            }
            let perm = Matching::from_one_based(&v[2..])
                .map_err(|e| Error::parse(line, e.to_string()))?;
            // A line written as `j i` describes the inverse matching of the canonical edge.
            let (edge, perm) = if i < j { ((i, j), perm) } else { ((j, i), perm.inverse()) };
            rows.push((edge, perm, line));
        }
        if rows.len() != m {
            return Err(Error::parse(
                last_line + 1,
                format!("expected {m} edges, found {}", rows.len()),
            ));
        }
        rows.sort_by_key(|r| r.0);
        for w in rows.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::parse(w[1].2, format!("duplicate edge {:?}", w[1].0)));
            }
        }
        let edges: Vec<_> = rows.iter().map(|r| r.0).collect();
        let base = Graph::new(n, &edges)?;
        Self::new(base, k, rows.into_iter().map(|r| r.1).collect())
    }
}

/// A realized lift: the graph on `n·k` vertices under the fixed labeling.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedGraph {
    graph: Graph,
    base_n: usize,
    k: usize,
}

impl LiftedGraph {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn into_graph(self) -> Graph {
        self.graph
    }

    pub fn base_n(&self) -> usize {
        self.base_n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Lifted vertex of copy `l` of base vertex `i` (all 1-based).
    pub fn label(&self, i: usize, l: usize) -> usize {
        (i - 1) * self.k + l
    }

    /// Inverse of [`LiftedGraph::label`].
    pub fn unlabel(&self, v: usize) -> (usize, usize) {
        ((v - 1) / self.k + 1, (v - 1) % self.k + 1)
    }
}

fn check_order(k: usize) -> Result<()> {
    if k == 0 {
        Err(Error::params("lift order must be at least 1"))
    } else {
        Ok(())
    }
}

/// Seed of the substream that draws the matching of base edge `(i, j)`.
pub fn edge_seed(seed: u64, i: usize, j: usize) -> u64 {
    split_path(seed, &[i as u64, j as u64])
}

/// Independent uniform permutation per edge, Fisher–Yates over the edge's
/// own substream.
pub fn sample_uniform_lift(g: &Graph, k: usize, seed: u64) -> Result<LiftSpec> {
    check_order(k)?;
    let matchings = g
        .edges()
        .iter()
        .map(|&(i, j)| {
            let mut rng = SplitMix64::new(edge_seed(seed, i, j));
            let mut sigma: Vec<usize> = (0..k).collect();
            rng.shuffle(&mut sigma);
            Matching { sigma }
        })
        .collect();
    LiftSpec::new(g.clone(), k, matchings)
}

/// Independent uniformly random cyclic shift per edge.
pub fn sample_cyclic_lift(g: &Graph, k: usize, seed: u64) -> Result<LiftSpec> {
    check_order(k)?;
    let matchings = g
        .edges()
        .iter()
        .map(|&(i, j)| {
            let mut rng = SplitMix64::new(edge_seed(seed, i, j));
            Matching::cyclic(k, rng.below(k as u64) as usize)
        })
        .collect();
    LiftSpec::new(g.clone(), k, matchings)
}

pub fn sample_lift(g: &Graph, k: usize, sampler: Sampler, seed: u64) -> Result<LiftSpec> {
    match sampler {
        Sampler::Uniform => sample_uniform_lift(g, k, seed),
        Sampler::Cyclic => sample_cyclic_lift(g, k, seed),
    }
}

/// Builds the lifted graph: `{(i,ℓ), (j,σᵢⱼ(ℓ))}` for every base edge and copy.
pub fn realize(spec: &LiftSpec) -> LiftedGraph {
    let k = spec.k;
    let mut edges = Vec::with_capacity(k * spec.base.edge_count());
    for (&(i, j), m) in spec.iter() {
        for l in 0..k {
            edges.push(((i - 1) * k + l + 1, (j - 1) * k + m.image(l) + 1));
        }
    }
    let graph = Graph::new(spec.base.n() * k, &edges).expect("lifted edges are valid by construction");
    LiftedGraph {
        graph,
        base_n: spec.base.n(),
        k,
    }
}

/// Mixed-radix index of `(ℓ₁, …, ℓ_s)` in `[k₁] × … × [k_s]`, first stage
/// most significant: `1 + Σ (ℓₜ − 1) Π_{u>t} k_u`. Everything 1-based.
pub fn flatten_index(tuple: &[usize], ks: &[usize]) -> Result<usize> {
    if tuple.len() != ks.len() {
        return Err(Error::params(format!(
            "tuple has {} components but there are {} radices",
            tuple.len(),
            ks.len()
        )));
    }
    let mut idx = 0usize;
    for (t, (&l, &k)) in tuple.iter().zip(ks).enumerate() {
        if l < 1 || l > k {
            return Err(Error::params(format!("component {t} = {l} outside 1..={k}")));
        }
        idx = idx * k + (l - 1);
    }
    Ok(idx + 1)
}

/// Inverse of [`flatten_index`].
pub fn unflatten_index(index: usize, ks: &[usize]) -> Result<Vec<usize>> {
    let total: usize = ks.iter().product();
    if index < 1 || index > total {
        return Err(Error::params(format!("index {index} outside 1..={total}")));
    }
    let mut rest = index - 1;
    let mut out = vec![0; ks.len()];
    for (slot, &k) in out.iter_mut().zip(ks).rev() {
        *slot = rest % k + 1;
        rest /= k;
    }
    Ok(out)
}

/// Seed used for stage `t` (0-based) of [`iterated_lift`]. Stage 0 uses
/// the caller's seed, so a single-stage iterated lift is exactly
/// `sample_uniform_lift(g, k, seed)`.
pub fn stage_seed(seed: u64, t: usize) -> u64 {
    if t == 0 {
        seed
    } else {
        split_path(seed, &[STAGE_STREAM, t as u64])
    }
}

/// `s` successive uniform lifts of orders `ks`. Returns the final graph on
/// `[n] × [k]`, `k = Π kₜ`, with copies flattened by [`flatten_index`], and
/// the induced single-step [`LiftSpec`] of `g` whose matchings compose the
/// stagewise ones.
pub fn iterated_lift(g: &Graph, ks: &[usize], seed: u64) -> Result<(LiftedGraph, LiftSpec)> {
    if ks.is_empty() {
        return Err(Error::params("iterated lift needs at least one stage"));
    }
    if let Some(k) = ks.iter().find(|&&k| k < 2) {
        return Err(Error::params(format!("stage order {k} < 2")));
    }
    let mut stages = Vec::with_capacity(ks.len());
    let mut current = g.clone();
    for (t, &k) in ks.iter().enumerate() {
        let spec = sample_uniform_lift(&current, k, stage_seed(seed, t))?;
        current = realize(&spec).into_graph();
        stages.push(spec);
    }
    compose_stages(g, &stages)
}

/// Composes explicit stage lifts, where `stages[t]` must be a lift of the
/// graph realized by `stages[t − 1]` (and `stages[0]` a lift of `g`).
pub fn compose_stages(g: &Graph, stages: &[LiftSpec]) -> Result<(LiftedGraph, LiftSpec)> {
    let first = stages
        .first()
        .ok_or_else(|| Error::params("no stages to compose"))?;
    if first.base() != g {
        return Err(Error::params("first stage is not a lift of the base graph"));
    }
    let n = g.n();
    let mut composite: Vec<Matching> = first.matchings().to_vec();
    let mut big_k = first.k();
    let mut realized = realize(first);
    for stage in &stages[1..] {
        if stage.base() != realized.graph() {
            return Err(Error::params("stage is not a lift of the previous stage"));
        }
        let kt = stage.k();
        let mut next = Vec::with_capacity(composite.len());
        for (&(i, j), sigma) in g.edges().iter().zip(&composite) {
            let mut s = vec![0usize; big_k * kt];
            for a in 0..big_k {
                let b = sigma.image(a);
                // Stage vertices carrying copy a of i and copy b of j (1-based).
                let u = (i - 1) * big_k + a + 1;
                let v = (j - 1) * big_k + b + 1;
                let tau = stage
                    .matching(u, v)
                    .expect("stage base contains every composite edge");
                for c in 0..kt {
                    s[a * kt + c] = b * kt + tau.image(c);
                }
            }
            next.push(Matching { sigma: s });
        }
        composite = next;
        big_k *= kt;
        realized = realize(stage);
    }
    let spec = LiftSpec::new(g.clone(), big_k, composite)?;
    let lifted = LiftedGraph {
        graph: realized.into_graph(),
        base_n: n,
        k: big_k,
    };
    Ok((lifted, spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};

    fn k2() -> Graph {
        Graph::new(2, &[(1, 2)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        generate(&GraphKind::Complete { n }, 0).unwrap()
    }

    #[test]
    fn order_one_is_identity() {
        let g = complete(5);
        for seed in 0..10 {
            let spec = sample_uniform_lift(&g, 1, seed).unwrap();
            assert!(spec.matchings().iter().all(|m| m.as_slice() == [0]));
            assert_eq!(realize(&spec).graph(), &g);
        }
        assert!(sample_uniform_lift(&g, 0, 1).is_err());
        assert!(sample_cyclic_lift(&g, 0, 1).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let g = complete(6);
        assert_eq!(
            sample_uniform_lift(&g, 5, 99).unwrap(),
            sample_uniform_lift(&g, 5, 99).unwrap()
        );
        assert_ne!(
            sample_uniform_lift(&g, 5, 99).unwrap(),
            sample_uniform_lift(&g, 5, 100).unwrap()
        );
    }

    #[test]
    fn edge_substreams_do_not_depend_on_other_edges() {
        let big = complete(6);
        let small = Graph::new(6, &[(2, 5), (3, 4)]).unwrap();
        let a = sample_uniform_lift(&big, 7, 5).unwrap();
        let b = sample_uniform_lift(&small, 7, 5).unwrap();
        assert_eq!(a.matching(2, 5), b.matching(2, 5));
        assert_eq!(a.matching(3, 4), b.matching(3, 4));
    }

    #[test]
    fn uniform_two_lift_identity_frequency() {
        let g = k2();
        let hits = (0..10_000u64)
            .filter(|&s| sample_uniform_lift(&g, 2, s).unwrap().matchings()[0].is_identity())
            .count();
        let freq = hits as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.015, "{freq}");
    }

    #[test]
    fn cyclic_lift_shapes() {
        assert!(Matching::cyclic(3, 0).is_identity());
        assert_eq!(Matching::cyclic(4, 1).as_slice(), &[1, 2, 3, 0]);
        let spec = sample_cyclic_lift(&complete(4), 5, 8).unwrap();
        for m in spec.matchings() {
            let shift = m.image(0);
            assert_eq!(m, &Matching::cyclic(5, shift));
        }
    }

    #[test]
    fn cyclic_marginals() {
        let g = k2();
        let k = 3;
        let trials = 10_000;
        let mut counts = vec![vec![0usize; k]; k];
        for s in 0..trials {
            let spec = sample_cyclic_lift(&g, k, s as u64).unwrap();
            let m = &spec.matchings()[0];
            for l in 0..k {
                counts[l][m.image(l)] += 1;
            }
        }
        let p = 1.0 / k as f64;
        let half = 3.0 * (p * (1.0 - p) / trials as f64).sqrt();
        for row in &counts {
            for &c in row {
                assert!((c as f64 / trials as f64 - p).abs() <= half);
            }
        }
    }

    #[test]
    fn realize_examples() {
        let id = LiftSpec::identity(k2(), 2).unwrap();
        assert_eq!(realize(&id).graph().edges(), &[(1, 3), (2, 4)]);
        let swap = LiftSpec::new(k2(), 2, vec![Matching::new(vec![1, 0]).unwrap()]).unwrap();
        assert_eq!(realize(&swap).graph().edges(), &[(1, 4), (2, 3)]);
        let tri = LiftSpec::identity(complete(3), 2).unwrap();
        let lifted = realize(&tri);
        assert_eq!(lifted.graph().components(), vec![vec![1, 3, 5], vec![2, 4, 6]]);
    }

    #[test]
    fn labels_round_trip() {
        let lifted = realize(&LiftSpec::identity(complete(3), 4).unwrap());
        assert_eq!(lifted.label(2, 3), 7);
        assert_eq!(lifted.unlabel(7), (2, 3));
    }

    #[test]
    fn permutation_matrix_examples() {
        assert_eq!(
            permutation_matrix(&Matching::identity(3), Direction::IToJ),
            DenseMatrix::identity(3)
        );
        let m = Matching::from_one_based(&[2, 3, 1]).unwrap();
        let v = permutation_matrix(&m, Direction::IToJ);
        assert_eq!(v.get(0, 1), 1.0);
        assert_eq!(v.get(1, 2), 1.0);
        assert_eq!(v.get(2, 0), 1.0);
        assert_eq!(v.transpose().matmul(&v), DenseMatrix::identity(3));
        assert_eq!(permutation_matrix(&m, Direction::JToI), v.transpose());
        assert_eq!(v.row_sums(), vec![1.0; 3]);
        assert_eq!(v.col_sums(), vec![1.0; 3]);
    }

    #[test]
    fn matching_validation() {
        assert!(Matching::new(vec![0, 0]).is_err());
        assert!(Matching::new(vec![2, 0]).is_err());
        assert!(Matching::new(vec![]).is_err());
        assert!(Matching::from_one_based(&[0, 1]).is_err());
    }

    #[test]
    fn flatten_examples() {
        assert_eq!(flatten_index(&[1, 1], &[2, 3]).unwrap(), 1);
        assert_eq!(flatten_index(&[2, 3], &[2, 3]).unwrap(), 6);
        assert_eq!(flatten_index(&[1, 2], &[2, 3]).unwrap(), 2);
        assert!(flatten_index(&[3, 1], &[2, 3]).is_err());
        assert!(flatten_index(&[0, 1], &[2, 3]).is_err());
        assert!(flatten_index(&[1], &[2, 3]).is_err());
        let ks = [2, 3, 4];
        for idx in 1..=24 {
            let t = unflatten_index(idx, &ks).unwrap();
            assert_eq!(flatten_index(&t, &ks).unwrap(), idx);
        }
    }

    #[test]
    fn iterated_rejects_small_stages() {
        assert!(iterated_lift(&k2(), &[2, 1], 0).is_err());
        assert!(iterated_lift(&k2(), &[], 0).is_err());
    }

    #[test]
    fn single_stage_iterated_is_direct() {
        let g = complete(5);
        let (lifted, spec) = iterated_lift(&g, &[4], 17).unwrap();
        let direct = sample_uniform_lift(&g, 4, 17).unwrap();
        assert_eq!(spec, direct);
        assert_eq!(lifted, realize(&direct));
    }

    #[test]
    fn induced_spec_realizes_to_iterated_graph() {
        let g = complete(4);
        for seed in 0..20 {
            let (lifted, spec) = iterated_lift(&g, &[2, 3, 2], seed).unwrap();
            assert_eq!(spec.k(), 12);
            assert_eq!(&realize(&spec), &lifted);
        }
    }

    #[test]
    fn spec_text_round_trip() {
        let spec = sample_uniform_lift(&complete(4), 3, 2).unwrap();
        let text = spec.to_text();
        assert!(text.starts_with("4 3 6\n"));
        assert_eq!(LiftSpec::read_text(text.as_bytes()).unwrap(), spec);
    }

    #[test]
    fn spec_text_reversed_edge_uses_inverse() {
        let a = LiftSpec::read_text("2 3 1\n1 2 2 3 1\n".as_bytes()).unwrap();
        let b = LiftSpec::read_text("2 3 1\n2 1 3 1 2\n".as_bytes()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spec_text_errors() {
        for (text, line) in [
            ("2 2 1\n1 2 1 1\n", 2),
            ("2 2 1\n1 2 1\n", 2),
            ("2 2 2\n1 2 1 2\n2 1 1 2\n", 3),
            ("2 2 1\n", 2),
            ("3 2 1\n1 1 1 2\n", 2),
        ] {
            match LiftSpec::read_text(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
