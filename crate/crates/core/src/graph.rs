//! Simple undirected graphs on vertices `1..=n`, their adjacency matrices and
//! normalized Laplacians, fixture generators and the edge-list text format.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SymmetricMatrix;
use crate::rng::SplitMix64;

/// Simple undirected graph. Vertices are `1..=n`; edges are stored as
/// sorted, deduplicated `(min, max)` pairs so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeProfile {
    pub per_vertex: Vec<usize>,
    pub d_min: usize,
    pub d_max: usize,
}

impl DegreeProfile {
    pub fn has_isolated(&self) -> bool {
        self.d_min == 0
    }
}

impl Graph {
    /// Builds a graph from 1-based pairs, canonicalizing and deduplicating.
    pub fn new(n: usize, edge_list: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::params("graph needs at least one vertex"));
        }
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(a, b) in edge_list {
            if a == b {
                return Err(Error::InvalidEdge(a, b, "self-loop"));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::InvalidEdge(a, b, "endpoint outside 1..=n"));
            }
            edges.push((a.min(b), a.max(b)));
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Self { n, edges })
    }

    /// Edge-free graph on `n` vertices.
    pub fn empty(n: usize) -> Result<Self> {
        Self::new(n, &[])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of the canonical edge `(min(a,b), max(a,b))` in [`Graph::edges`].
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.edge_index(a, b).is_some()
    }

    pub fn degrees(&self) -> DegreeProfile {
        let mut per_vertex = vec![0usize; self.n];
        for &(a, b) in &self.edges {
            per_vertex[a - 1] += 1;
            per_vertex[b - 1] += 1;
        }
        let d_min = per_vertex.iter().copied().min().unwrap_or(0);
        let d_max = per_vertex.iter().copied().max().unwrap_or(0);
        DegreeProfile {
            per_vertex,
            d_min,
            d_max,
        }
    }

    /// 0/1 adjacency matrix with zero diagonal.
    pub fn adjacency(&self) -> SymmetricMatrix {
        let mut m = SymmetricMatrix::zeros(self.n);
        for &(a, b) in &self.edges {
            m.set(a - 1, b - 1, 1.0);
        }
        m
    }

    /// L = I − T A T with T = diag(deg^(−1/2)), and T entry 0 on isolated
    /// vertices (which therefore get a 1 on the diagonal of L).
    pub fn normalized_laplacian(&self) -> SymmetricMatrix {
        let t: Vec<f64> = self
            .degrees()
            .per_vertex
            .iter()
            .map(|&d| if d == 0 { 0.0 } else { 1.0 / (d as f64).sqrt() })
            .collect();
        let mut m = SymmetricMatrix::identity(self.n);
        for &(a, b) in &self.edges {
            m.set(a - 1, b - 1, -t[a - 1] * t[b - 1]);
        }
        m
    }

    /// Connected components as sorted vertex lists.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut parent: Vec<usize> = (0..self.n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, a - 1), find(&mut parent, b - 1));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
        for v in 0..self.n {
            let r = find(&mut parent, v);
            groups.entry(r).or_default().push(v + 1);
        }
        groups.into_values().collect()
    }

    /// Writes the `n m` / `i j` edge-list format.
    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.n, self.edges.len())?;
        for &(a, b) in &self.edges {
            writeln!(w, "{a} {b}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the edge-list format. Blank lines are ignored; every other
    /// problem is reported with its 1-based line number.
    pub fn read_text<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = numbered_lines(r);
        let (line_no, header) = lines
            .next()
            .transpose()?
            .ok_or_else(|| Error::parse(1, "empty input, expected header `n m`"))?;
        let head = parse_usizes(&header, line_no, 2)?;
        let (n, m) = (head[0], head[1]);
        if n == 0 {
            return Err(Error::parse(line_no, "vertex count must be at least 1"));
        }
        let mut edges = Vec::with_capacity(m);
        for item in lines {
            let (line_no, text) = item?;
            if edges.len() == m {
                return Err(Error::parse(line_no, format!("more than the declared {m} edges")));
            }
            let v = parse_usizes(&text, line_no, 2)?;
            let (a, b) = (v[0], v[1]);
            if a == b {
                return Err(Error::parse(line_no, format!("self-loop at vertex {a}")));
            }
            if a == 0 || b == 0 || a > n || b > n {
                return Err(Error::parse(line_no, format!("endpoint outside 1..={n}")));
            }
            edges.push((a, b));
        }
        if edges.len() != m {
            return Err(Error::parse(
                line_no_after(&edges, line_no),
                format!("expected {m} edges, found {}", edges.len()),
            ));
        }
        Self::new(n, &edges)
    }
}

fn line_no_after(edges: &[(usize, usize)], header_line: usize) -> usize {
    header_line + edges.len() + 1
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edges.len())
    }
}

/// Non-blank lines with their 1-based line numbers.
pub(crate) fn numbered_lines<R: BufRead>(r: R) -> impl Iterator<Item = Result<(usize, String)>> {
    r.lines().enumerate().filter_map(|(i, l)| match l {
        Ok(s) if s.trim().is_empty() => None,
        Ok(s) => Some(Ok((i + 1, s))),
        Err(e) => Some(Err(Error::from(e))),
    })
}

pub(crate) fn parse_usizes(text: &str, line: usize, expected: usize) -> Result<Vec<usize>> {
    let fields: Vec<&str> = text.split_whitespace().collect();
    if fields.len() != expected {
        return Err(Error::parse(
            line,
            format!("expected {expected} integers, found {} fields", fields.len()),
        ));
    }
    fields
        .iter()
        .map(|f| {
            f.parse::<usize>()
                .map_err(|_| Error::parse(line, format!("`{f}` is not a nonnegative integer")))
        })
        .collect()
}

/// Fixture families accepted by [`generate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Complete { n: usize },
    Cycle { n: usize },
    /// `copies` vertex-disjoint cliques of `size` vertices each.
    DisjointCliques { copies: usize, size: usize },
    ErdosRenyi { n: usize, p: f64 },
}

impl GraphKind {
    pub fn needs_seed(&self) -> bool {
        matches!(self, GraphKind::ErdosRenyi { .. })
    }
}

/// `complete:N`, `cycle:N`, `cliques:Q,S` (or `disjoint_cliques:Q,S`),
/// `er:N,P` (or `erdos_renyi:N,P`).
impl FromStr for GraphKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let args: Vec<&str> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',').map(str::trim).collect()
        };
        let int = |i: usize| -> Result<usize> {
            args.get(i)
                .ok_or_else(|| Error::params(format!("`{s}`: missing argument {}", i + 1)))?
                .parse()
                .map_err(|_| Error::params(format!("`{s}`: argument {} is not an integer", i + 1)))
        };
        let want = |count: usize| -> Result<()> {
            if args.len() == count {
                Ok(())
            } else {
                Err(Error::params(format!("`{s}`: expected {count} argument(s)")))
            }
        };
        match name.trim() {
            "complete" | "K" => {
                want(1)?;
                Ok(GraphKind::Complete { n: int(0)? })
            }
            "cycle" | "C" => {
                want(1)?;
                Ok(GraphKind::Cycle { n: int(0)? })
            }
            "cliques" | "disjoint_cliques" => {
                want(2)?;
                Ok(GraphKind::DisjointCliques {
                    copies: int(0)?,
                    size: int(1)?,
                })
            }
            "er" | "erdos_renyi" | "gnp" => {
                want(2)?;
                let p = args[1]
                    .parse::<f64>()
                    .map_err(|_| Error::params(format!("`{s}`: edge probability is not a number")))?;
                Ok(GraphKind::ErdosRenyi { n: int(0)?, p })
            }
            other => Err(Error::params(format!("unknown graph generator `{other}`"))),
        }
    }
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphKind::Complete { n } => write!(f, "complete:{n}"),
            GraphKind::Cycle { n } => write!(f, "cycle:{n}"),
            GraphKind::DisjointCliques { copies, size } => write!(f, "cliques:{copies},{size}"),
            GraphKind::ErdosRenyi { n, p } => write!(f, "er:{n},{p}"),
        }
    }
}

/// Deterministic fixture generator. `seed` only matters for Erdős–Rényi,
/// which visits pairs `(i, j)`, `i < j`, in lexicographic order and keeps
/// each with probability `p`.
pub fn generate(kind: &GraphKind, seed: u64) -> Result<Graph> {
    match *kind {
        GraphKind::Complete { n } => {
            if n < 1 {
                return Err(Error::params("complete graph needs n >= 1"));
            }
            let edges: Vec<_> = (1..=n)
                .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
                .collect();
            Graph::new(n, &edges)
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(Error::params("cycle needs n >= 3"));
            }
            let edges: Vec<_> = (1..=n).map(|i| (i, i % n + 1)).collect();
            Graph::new(n, &edges)
        }
        GraphKind::DisjointCliques { copies, size } => {
            if copies < 1 || size < 2 {
                return Err(Error::params("disjoint cliques need copies >= 1 and size >= 2"));
            }
            let mut edges = Vec::new();
            for c in 0..copies {
                let off = c * size;
                for i in 1..=size {
                    for j in (i + 1)..=size {
                        edges.push((off + i, off + j));
                    }
                }
            }
            Graph::new(copies * size, &edges)
        }
        GraphKind::ErdosRenyi { n, p } => {
            if n < 1 {
                return Err(Error::params("Erdős–Rényi graph needs n >= 1"));
            }
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::params(format!("edge probability {p} outside [0, 1]")));
            }
            let mut rng = SplitMix64::new(seed);
            let mut edges = Vec::new();
            for i in 1..=n {
                for j in (i + 1)..=n {
                    if rng.next_f64() < p {
                        edges.push((i, j));
                    }
                }
            }
            Graph::new(n, &edges)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::sym_eigenvalues;

    #[test]
    fn make_graph_examples() {
        let g = Graph::new(2, &[(1, 2)]).unwrap();
        assert_eq!(g.edges(), &[(1, 2)]);
        let g = Graph::new(3, &[(2, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(g.edges(), &[(1, 2), (2, 3)]);
        assert!(matches!(Graph::new(2, &[(1, 1)]), Err(Error::InvalidEdge(1, 1, _))));
        assert!(matches!(Graph::new(2, &[(1, 3)]), Err(Error::InvalidEdge(..))));
        assert!(matches!(Graph::new(2, &[(0, 1)]), Err(Error::InvalidEdge(..))));
        assert!(Graph::new(0, &[]).is_err());
    }

    #[test]
    fn adjacency_examples() {
        let a = Graph::new(2, &[(1, 2)]).unwrap().adjacency();
        assert_eq!(a.as_slice(), &[0.0, 1.0, 1.0, 0.0]);
        let k3 = generate(&GraphKind::Complete { n: 3 }, 0).unwrap().adjacency();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(k3.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        assert_eq!(Graph::empty(3).unwrap().adjacency(), SymmetricMatrix::zeros(3));
    }

    #[test]
    fn laplacian_examples() {
        let l = Graph::new(2, &[(1, 2)]).unwrap().normalized_laplacian();
        assert_eq!(l.as_slice(), &[1.0, -1.0, -1.0, 1.0]);
        let l = Graph::empty(1).unwrap().normalized_laplacian();
        assert_eq!(l.as_slice(), &[1.0]);
        // I − A/2 for K3: characteristic roots 0, 3/2, 3/2.
        let l = generate(&GraphKind::Complete { n: 3 }, 0).unwrap().normalized_laplacian();
        let s = sym_eigenvalues(&l).unwrap();
        for (got, want) in s.values().iter().zip([0.0, 1.5, 1.5]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn isolated_vertex_keeps_unit_diagonal() {
        let g = Graph::new(3, &[(1, 2)]).unwrap();
        let l = g.normalized_laplacian();
        assert_eq!(l.get(2, 2), 1.0);
        assert_eq!(l.get(0, 2), 0.0);
        assert!(g.degrees().has_isolated());
    }

    #[test]
    fn degree_examples() {
        let d = generate(&GraphKind::Complete { n: 4 }, 0).unwrap().degrees();
        assert_eq!(d.per_vertex, vec![3; 4]);
        assert_eq!((d.d_min, d.d_max), (3, 3));
        let d = Graph::new(3, &[(1, 2), (2, 3)]).unwrap().degrees();
        assert_eq!(d.per_vertex, vec![1, 2, 1]);
        assert_eq!((d.d_min, d.d_max), (1, 2));
        assert_eq!(Graph::empty(2).unwrap().degrees().per_vertex, vec![0, 0]);
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generate(&GraphKind::Complete { n: 4 }, 0).unwrap().edge_count(), 6);
        let g = generate(&GraphKind::DisjointCliques { copies: 2, size: 3 }, 0).unwrap();
        assert_eq!((g.n(), g.edge_count()), (6, 6));
        assert_eq!(g.components(), vec![vec![1, 2, 3], vec![4, 5, 6]]);
        let g = generate(&GraphKind::Cycle { n: 5 }, 0).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert!(g.degrees().per_vertex.iter().all(|&d| d == 2));
    }

    #[test]
    fn generator_rejects_bad_params() {
        for kind in [
            GraphKind::Complete { n: 0 },
            GraphKind::Cycle { n: 2 },
            GraphKind::DisjointCliques { copies: 2, size: 1 },
            GraphKind::ErdosRenyi { n: 5, p: 1.5 },
            GraphKind::ErdosRenyi { n: 0, p: 0.5 },
        ] {
            assert!(matches!(generate(&kind, 1), Err(Error::InvalidParams(_))), "{kind:?}");
        }
    }

    #[test]
    fn erdos_renyi_is_seeded() {
        let kind = GraphKind::ErdosRenyi { n: 30, p: 0.3 };
        assert_eq!(generate(&kind, 11).unwrap(), generate(&kind, 11).unwrap());
        assert_ne!(generate(&kind, 11).unwrap(), generate(&kind, 12).unwrap());
        assert_eq!(generate(&GraphKind::ErdosRenyi { n: 6, p: 1.0 }, 3).unwrap().edge_count(), 15);
        assert_eq!(generate(&GraphKind::ErdosRenyi { n: 6, p: 0.0 }, 3).unwrap().edge_count(), 0);
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("complete:20".parse::<GraphKind>().unwrap(), GraphKind::Complete { n: 20 });
        assert_eq!(
            "cliques:2,3".parse::<GraphKind>().unwrap(),
            GraphKind::DisjointCliques { copies: 2, size: 3 }
        );
        assert_eq!(
            "erdos_renyi:10,0.4".parse::<GraphKind>().unwrap(),
            GraphKind::ErdosRenyi { n: 10, p: 0.4 }
        );
        for bad in ["", "complete", "complete:x", "cycle:1,2", "torus:3"] {
            assert!(bad.parse::<GraphKind>().is_err(), "{bad}");
        }
        let k = GraphKind::ErdosRenyi { n: 10, p: 0.25 };
        assert_eq!(k.to_string().parse::<GraphKind>().unwrap(), k);
    }

    #[test]
    fn text_format() {
        let g = generate(&GraphKind::Cycle { n: 4 }, 0).unwrap();
        let text = g.to_text();
        assert_eq!(text, "4 4\n1 2\n1 4\n2 3\n3 4\n");
        assert_eq!(Graph::read_text(text.as_bytes()).unwrap(), g);
    }

    #[test]
    fn text_errors_carry_line_numbers() {
        let cases = [
            ("3 1\n1 x\n", 2),
            ("3 2\n1 2\n\n2 2\n", 4),
            ("3 1\n1 4\n", 2),
            ("3 1 7\n", 1),
            ("3 2\n1 2\n", 3),
            ("3 1\n1 2\n2 3\n", 3),
        ];
        for (text, line) in cases {
            match Graph::read_text(text.as_bytes()) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }
}
