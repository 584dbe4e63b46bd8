//! Reversible Markov chains and their random lifts.
//!
//! A chain `P` reversible w.r.t. `π` is similar to the symmetric matrix
//! `Q(i,j) = √(π(i)/π(j)) P(i,j)`, so its spectrum is real. Lifting uses one
//! matching per unordered pair `{i, j}` in the support of `P`, shared by both
//! directions; self-transitions stay on the same copy.

use std::io::{BufRead, Write};


use crate::error::{Error, Result};
use crate::graph::{numbered_lines, Graph};
use crate::lift::{sample_lift, LiftSpec, Sampler};
use crate::linalg::{default_match_tol, multiset_diff, sym_eigenvalues, DenseMatrix, Spectrum, SymmetricMatrix};
use crate::rng::SplitMix64;

/// Tolerance for row sums, π normalization and detailed balance.
pub const CHAIN_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct ReversibleChain {
    p: DenseMatrix,
    pi: Vec<f64>,
}

impl ReversibleChain {
    /// Validates stochasticity, positivity of `pi` and detailed balance.
    /// A reducible chain is accepted with a warning.
    pub fn new(p: DenseMatrix, pi: Vec<f64>) -> Result<Self> {
        let chain = Self::validated(p, pi)?;
        if !chain.is_irreducible() {
            log::warn!("chain on {} states is not irreducible; spectra are still computed", chain.n());
        }
        Ok(chain)
    }

    /// Lifts of irreducible chains may be reducible, so no warning here.
    fn validated(p: DenseMatrix, pi: Vec<f64>) -> Result<Self> {
        let n = p.dim();
        if n == 0 {
            return Err(Error::params("chain needs at least one state"));
        }
        if pi.len() != n {
            return Err(Error::params(format!("pi has {} entries for {n} states", pi.len())));
        }
        if let Some(i) = pi.iter().position(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::InvalidStationary(format!("pi({}) = {} is not positive", i + 1, pi[i])));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > CHAIN_TOL {
            return Err(Error::InvalidStationary(format!("pi sums to {total}")));
        }
        for i in 0..n {
            let row = p.row(i);
            if row.iter().any(|&x| !(x >= 0.0) || !x.is_finite()) {
                return Err(Error::NotStochastic {
                    row: i + 1,
                    sum: row.iter().sum(),
                });
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > CHAIN_TOL {
                return Err(Error::NotStochastic { row: i + 1, sum });
            }
        }
        let chain = Self { p, pi };
        if let Some((i, j, gap)) = chain.worst_balance_violation() {
            if gap > CHAIN_TOL {
                return Err(Error::NotReversible { i, j, gap });
            }
        }
        Ok(chain)
    }

    /// Chain of the random walk on an undirected weighted graph:
    /// `P(i,j) = w(i,j) / w(i)` and `π(i) ∝ w(i)`, reversible by construction.
    /// Diagonal weights become self-transitions.
    pub fn from_weights(w: &SymmetricMatrix) -> Result<Self> {
        let n = w.dim();
        let strength: Vec<f64> = (0..n).map(|i| w.row(i).iter().sum()).collect();
        if let Some(i) = strength.iter().position(|&s| !(s > 0.0)) {
            return Err(Error::params(format!("state {} has no outgoing weight", i + 1)));
        }
        let total: f64 = strength.iter().sum();
        let mut p = DenseMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                p.set(i, j, w.get(i, j) / strength[i]);
            }
        }
        Self::new(p, strength.iter().map(|s| s / total).collect())
    }

    /// Simple random walk on a graph without isolated vertices.
    pub fn random_walk(g: &Graph) -> Result<Self> {
        Self::from_weights(&g.adjacency())
    }

    /// Random reversible chain: symmetric weights uniform on [0, 1) kept
    /// with probability `density` (the diagonal always kept, so every state
    /// has outgoing weight).
    pub fn random(n: usize, density: f64, seed: u64) -> Result<Self> {
        if n == 0 || !(0.0..=1.0).contains(&density) {
            return Err(Error::params("random chain needs n >= 1 and density in [0, 1]"));
        }
        let mut rng = SplitMix64::new(seed);
        let mut w = SymmetricMatrix::zeros(n);
        for i in 0..n {
            w.set(i, i, 0.05 + rng.next_f64());
            for j in (i + 1)..n {
                if rng.next_f64() < density {
                    w.set(i, j, rng.next_f64());
                }
            }
        }
        Self::from_weights(&w)
    }

    pub fn n(&self) -> usize {
        self.pi.len()
    }

    pub fn p(&self) -> &DenseMatrix {
        &self.p
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    /// Largest |π(i)P(i,j) − π(j)P(j,i)| and where it occurs (1-based).
    pub fn worst_balance_violation(&self) -> Option<(usize, usize, f64)> {
        let n = self.n();
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            for j in (i + 1)..n {
                let gap = (self.pi[i] * self.p.get(i, j) - self.pi[j] * self.p.get(j, i)).abs();
                if worst.is_none_or(|w| gap > w.2) {
                    worst = Some((i + 1, j + 1, gap));
                }
            }
        }
        worst
    }

    /// Unordered pairs `{i, j}`, `i ≠ j`, with a positive transition either way.
    pub fn support_graph(&self) -> Graph {
        let n = self.n();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.p.get(i, j) > 0.0 || self.p.get(j, i) > 0.0 {
                    edges.push((i + 1, j + 1));
                }
            }
        }
        Graph::new(n, &edges).expect("support edges are valid")
    }

    pub fn is_irreducible(&self) -> bool {
        self.support_graph().components().len() == 1
    }
}

/// Q(i,j) = √(π(i)/π(j)) P(i,j); symmetric by detailed balance.
pub fn symmetrize(chain: &ReversibleChain) -> SymmetricMatrix {
    let n = chain.n();
    let pi = chain.pi();
    SymmetricMatrix::from_fn(n, |i, j| (pi[i] / pi[j]).sqrt() * chain.p().get(i, j))
}

/// A lifted chain together with the matchings that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedChain {
    pub chain: ReversibleChain,
    /// Matchings over the support graph of the base chain.
    pub spec: LiftSpec,
}

/// P⁽ᵏ⁾ on `[n] × [k]` (state `(i, ℓ)` is `(i − 1)k + ℓ`), stationary for
/// π⁽ᵏ⁾(i, ℓ) = π(i)/k.
pub fn lift_chain(chain: &ReversibleChain, k: usize, seed: u64, sampler: Sampler) -> Result<LiftedChain> {
    let support = chain.support_graph();
    let spec = sample_lift(&support, k, sampler, seed)?;
    lift_chain_with(chain, spec)
}

/// Lifts with explicit matchings over the chain's support graph.
pub fn lift_chain_with(chain: &ReversibleChain, spec: LiftSpec) -> Result<LiftedChain> {
    if spec.base() != &chain.support_graph() {
        return Err(Error::params("matchings are not over the chain's support graph"));
    }
    let n = chain.n();
    let k = spec.k();
    let dim = n * k;
    let p = chain.p();
    let mut lifted = DenseMatrix::zeros(dim);
    for i in 0..n {
        let stay = p.get(i, i);
        if stay != 0.0 {
            for l in 0..k {
                lifted.set(i * k + l, i * k + l, stay);
            }
        }
    }
    for (&(i, j), m) in spec.iter() {
        let (a, b) = (i - 1, j - 1);
        for l in 0..k {
            let r = m.image(l);
            lifted.set(a * k + l, b * k + r, p.get(a, b));
            lifted.set(b * k + r, a * k + l, p.get(b, a));
        }
    }
    let pi = chain.pi().iter().flat_map(|&x| std::iter::repeat_n(x / k as f64, k)).collect();
    Ok(LiftedChain {
        chain: ReversibleChain::validated(lifted, pi)?,
        spec,
    })
}

/// c_P = maxᵢ Σⱼ π(j) P(j,i)² / π(i).
pub fn c_param(chain: &ReversibleChain) -> f64 {
    let n = chain.n();
    let (p, pi) = (chain.p(), chain.pi());
    (0..n)
        .map(|i| (0..n).map(|j| pi[j] * p.get(j, i).powi(2)).sum::<f64>() / pi[i])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// max over (i, r) of P(r, i), an upper bound for [`c_param`].
pub fn max_transition(chain: &ReversibleChain) -> f64 {
    chain.p().as_slice().iter().copied().fold(0.0, f64::max)
}

/// 16 √(c_P ln(nk/δ)).
pub fn chain_bound(c_p: f64, n: usize, k: usize, delta: f64) -> Result<f64> {
    if !(c_p >= 0.0) {
        return Err(Error::params(format!("c_P = {c_p} must be nonnegative")));
    }
    if n < 1 || k < 1 {
        return Err(Error::params("n and k must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::params(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(16.0 * (c_p * (n as f64 * k as f64 / delta).ln()).sqrt())
}

/// spec(P⁽ᵏ⁾) ∖ spec(P), computed through the symmetrizations.
pub fn chain_new_eigenvalues(chain: &ReversibleChain, lifted: &ReversibleChain) -> Result<Spectrum> {
    if lifted.n() % chain.n() != 0 {
        return Err(Error::params("lifted chain size is not a multiple of the base size"));
    }
    let big = sym_eigenvalues(&symmetrize(lifted))?;
    let small = sym_eigenvalues(&symmetrize(chain))?;
    let diff = multiset_diff(&big, &small, default_match_tol(big.max_abs()));
    if diff.match_failure() {
        return Err(Error::SpectrumContainmentViolated {
            unmatched: diff.unmatched.len(),
            first: diff.unmatched[0],
        });
    }
    Ok(diff.remainder)
}

/// Chain file: `n`, then `n` rows of `P`, then one row with `π`.
pub fn read_chain<R: BufRead>(r: R) -> Result<ReversibleChain> {
    let mut lines = numbered_lines(r);
    let (hline, header) = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::parse(1, "empty input, expected state count"))?;
    let n = crate::graph::parse_usizes(&header, hline, 1)?[0];
    if n == 0 {
        return Err(Error::parse(hline, "state count must be at least 1"));
    }
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut last = hline;
    for item in lines {
        let (line, text) = item?;
        last = line;
        if rows.len() == n + 1 {
            return Err(Error::parse(line, "trailing data after the stationary vector"));
        }
        let what = if rows.len() < n {
            format!("row {} of P", rows.len() + 1)
        } else {
            "pi".to_string()
        };
        let fields: Vec<&str> = text.split_whitespace().collect();
        if fields.len() != n {
            return Err(Error::parse(line, format!("{what}: expected {n} values, found {}", fields.len())));
        }
        let vals = fields
            .iter()
            .enumerate()
            .map(|(c, f)| {
                f.parse::<f64>()
                    .map_err(|_| Error::parse(line, format!("{what}, column {}: `{f}` is not a number", c + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(vals);
    }
    if rows.len() != n + 1 {
        return Err(Error::parse(last + 1, format!("expected {} rows of P plus pi, found {}", n, rows.len())));
    }
    let pi = rows.pop().expect("n + 1 rows");
    ReversibleChain::new(DenseMatrix::from_rows(&rows), pi)
}

pub fn write_chain<W: Write>(chain: &ReversibleChain, mut w: W) -> Result<()> {
    let n = chain.n();
    writeln!(w, "{n}")?;
    for i in 0..n {
        let row: Vec<String> = chain.p().row(i).iter().map(|x| format!("{x:.17e}")).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    let pi: Vec<String> = chain.pi().iter().map(|x| format!("{x:.17e}")).collect();
    writeln!(w, "{}", pi.join(" "))?;
    Ok(())
}
