//! Old/new eigenvalue decomposition of lifts, deviation operator norms, and
//! the closed-form concentration bounds they are compared against.
//!
//! For a lift with matchings `σᵢⱼ`, the adjacency operator on ℝⁿ ⊗ ℝᵏ is
//! `A⁽ᵏ⁾ = Σ_{ij∈E} eᵢeⱼᵀ ⊗ V₍ᵢ,ⱼ₎ + eⱼeᵢᵀ ⊗ V₍ⱼ,ᵢ₎` and its mean over any
//! sampler with 1/k marginals is `A ⊗ Πₖ`. The spectrum of `A` sits inside the
//! spectrum of `A⁽ᵏ⁾`; whatever is left over ("new" eigenvalues) has largest
//! magnitude exactly `‖A⁽ᵏ⁾ − A ⊗ Πₖ‖`. The normalized Laplacian behaves the
//! same way around 1 with mean `Iₙ ⊗ Iₖ − (I − L) ⊗ Πₖ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::lift::{permutation_matrix, Direction, LiftSpec, LiftedGraph};
use crate::linalg::{
    default_match_tol, kron, multiset_diff, operator_norm, projector_pi, sym_eigenvalues, Spectrum,
    SpectrumDiff, SymmetricMatrix,
};

/// Relative threshold for the recorded "max new |η| = deviation norm" check.
pub const PROP_EQUALITY_REL_TOL: f64 = 1e-6;

/// Default confidence parameter when none is given.
pub const DEFAULT_DELTA: f64 = 0.05;

fn check_lift_of(g: &Graph, lifted: &LiftedGraph) -> Result<()> {
    if lifted.base_n() != g.n() {
        return Err(Error::params(format!(
            "lift has {} base vertices, graph has {}",
            lifted.base_n(),
            g.n()
        )));
    }
    Ok(())
}

fn check_spec_of(g: &Graph, spec: &LiftSpec) -> Result<()> {
    if spec.base() != g {
        return Err(Error::params("lift spec was not built over this graph"));
    }
    Ok(())
}

fn require_positive_degrees(g: &Graph) -> Result<Vec<usize>> {
    let deg = g.degrees().per_vertex;
    match deg.iter().position(|&d| d == 0) {
        Some(v) => Err(Error::DegreeZeroUnsupported(v + 1)),
        None => Ok(deg),
    }
}

fn diff_spectra(lift: &SymmetricMatrix, base: &SymmetricMatrix) -> Result<SpectrumDiff> {
    let big = sym_eigenvalues(lift)?;
    let small = sym_eigenvalues(base)?;
    let tol = default_match_tol(big.max_abs());
    Ok(multiset_diff(&big, &small, tol))
}

fn containment(diff: SpectrumDiff) -> Result<Spectrum> {
    if diff.match_failure() {
        return Err(Error::SpectrumContainmentViolated {
            unmatched: diff.unmatched.len(),
            first: diff.unmatched[0],
        });
    }
    Ok(diff.remainder)
}

/// spec(A⁽ᵏ⁾) ∖ spec(A).
pub fn new_adjacency_eigenvalues(g: &Graph, lifted: &LiftedGraph) -> Result<Spectrum> {
    check_lift_of(g, lifted)?;
    containment(diff_spectra(&lifted.graph().adjacency(), &g.adjacency())?)
}

/// spec(L⁽ᵏ⁾) ∖ spec(L).
pub fn new_laplacian_eigenvalues(g: &Graph, lifted: &LiftedGraph) -> Result<Spectrum> {
    check_lift_of(g, lifted)?;
    containment(diff_spectra(
        &lifted.graph().normalized_laplacian(),
        &g.normalized_laplacian(),
    )?)
}

/// Writes `scale · V` into block `(bi, bj)` and `scale · Vᵀ` into `(bj, bi)`.
fn place_blocks(data: &mut [f64], dim: usize, k: usize, bi: usize, bj: usize, v: &crate::linalg::DenseMatrix, scale: f64) {
    for l in 0..k {
        for r in 0..k {
            let x = v.get(l, r);
            if x != 0.0 {
                data[(bi * k + l) * dim + bj * k + r] += scale * x;
                data[(bj * k + r) * dim + bi * k + l] += scale * x;
            }
        }
    }
}

/// A⁽ᵏ⁾ assembled block by block from the permutation matrices V₍ᵢ,ⱼ₎.
pub fn lift_adjacency_from_blocks(spec: &LiftSpec) -> SymmetricMatrix {
    let k = spec.k();
    let dim = spec.lifted_vertex_count();
    let mut data = vec![0.0; dim * dim];
    for (&(i, j), m) in spec.iter() {
        let v = permutation_matrix(m, Direction::IToJ);
        place_blocks(&mut data, dim, k, i - 1, j - 1, &v, 1.0);
    }
    SymmetricMatrix::from_row_major(dim, data)
}

/// L⁽ᵏ⁾ = Iₙ ⊗ Iₖ − Σ (eᵢeⱼᵀ ⊗ V₍ᵢ,ⱼ₎ + eⱼeᵢᵀ ⊗ V₍ⱼ,ᵢ₎) / √(deg i · deg j).
pub fn lift_laplacian_from_blocks(spec: &LiftSpec) -> Result<SymmetricMatrix> {
    let deg = require_positive_degrees(spec.base())?;
    let k = spec.k();
    let dim = spec.lifted_vertex_count();
    let mut data = vec![0.0; dim * dim];
    for (&(i, j), m) in spec.iter() {
        let v = permutation_matrix(m, Direction::IToJ);
        let w = 1.0 / ((deg[i - 1] * deg[j - 1]) as f64).sqrt();
        place_blocks(&mut data, dim, k, i - 1, j - 1, &v, -w);
    }
    for d in 0..dim {
        data[d * dim + d] += 1.0;
    }
    Ok(SymmetricMatrix::from_row_major(dim, data))
}

/// A ⊗ Πₖ.
pub fn expected_adjacency(g: &Graph, k: usize) -> Result<SymmetricMatrix> {
    Ok(kron(&g.adjacency(), &projector_pi(k)?))
}

/// Iₙ ⊗ Iₖ − (I − L) ⊗ Πₖ.
pub fn expected_laplacian(g: &Graph, k: usize) -> Result<SymmetricMatrix> {
    let n = g.n();
    let off = SymmetricMatrix::identity(n).sub(&g.normalized_laplacian());
    Ok(SymmetricMatrix::identity(n * k).sub(&kron(&off, &projector_pi(k)?)))
}

/// ‖A⁽ᵏ⁾ − A ⊗ Πₖ‖.
pub fn adjacency_deviation_norm(g: &Graph, spec: &LiftSpec) -> Result<f64> {
    check_spec_of(g, spec)?;
    let dev = lift_adjacency_from_blocks(spec).sub(&expected_adjacency(g, spec.k())?);
    operator_norm(&dev)
}

/// ‖L⁽ᵏ⁾ − (Iₙ ⊗ Iₖ − (I − L) ⊗ Πₖ)‖. Needs every base degree positive.
pub fn laplacian_deviation_norm(g: &Graph, spec: &LiftSpec) -> Result<f64> {
    check_spec_of(g, spec)?;
    let dev = lift_laplacian_from_blocks(spec)?.sub(&expected_laplacian(g, spec.k())?);
    operator_norm(&dev)
}

fn check_common(n: usize, k: usize, delta: f64) -> Result<()> {
    if n < 1 || k < 1 {
        return Err(Error::params("n and k must be at least 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::params(format!("delta = {delta} outside (0, 1)")));
    }
    Ok(())
}

fn check_min_degree(d_min: usize) -> Result<()> {
    if d_min == 0 {
        Err(Error::params("minimum degree must be at least 1"))
    } else {
        Ok(())
    }
}

/// 16 √(Δ ln(2nk/δ)): holds for all new adjacency eigenvalues w.p. ≥ 1 − δ.
pub fn adjacency_bound(d_max: usize, n: usize, k: usize, delta: f64) -> Result<f64> {
    check_common(n, k, delta)?;
    Ok(16.0 * (d_max as f64 * (2.0 * n as f64 * k as f64 / delta).ln()).sqrt())
}

/// 16 √(ln(2nk/δ) / d): bound on |1 − β| over new Laplacian eigenvalues β.
pub fn laplacian_bound(d_min: usize, n: usize, k: usize, delta: f64) -> Result<f64> {
    check_common(n, k, delta)?;
    check_min_degree(d_min)?;
    Ok(16.0 * ((2.0 * n as f64 * k as f64 / delta).ln() / d_min as f64).sqrt())
}

/// Distance bounds between a direct k-lift and an iterated one:
/// `(32 √(Δ ln(4nk/δ)), 32 √(ln(4nk/δ) / d))`.
pub fn corollary_bounds(d_min: usize, d_max: usize, n: usize, k: usize, delta: f64) -> Result<(f64, f64)> {
    check_common(n, k, delta)?;
    check_min_degree(d_min)?;
    let log = (4.0 * n as f64 * k as f64 / delta).ln();
    Ok((
        32.0 * (d_max as f64 * log).sqrt(),
        32.0 * (log / d_min as f64).sqrt(),
    ))
}

/// Tail bound 2·dim·exp(−t² / (8σ² + 4Mt)) for ‖Σ Xᵢ‖ ≥ t, where the Xᵢ are
/// independent, mean zero, ‖Xᵢ‖ ≤ M and σ² = ‖Σ E Xᵢ²‖. Not clipped to 1.
pub fn freedman_tail(t: f64, sigma2: f64, m: f64, dim: usize) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::params(format!("t = {t} must be nonnegative")));
    }
    if !(m > 0.0) {
        return Err(Error::params(format!("M = {m} must be positive")));
    }
    if !(sigma2 >= 0.0) {
        return Err(Error::params(format!("sigma2 = {sigma2} must be nonnegative")));
    }
    if dim == 0 {
        return Err(Error::params("dimension must be positive"));
    }
    let prefactor = 2.0 * dim as f64;
    if t == 0.0 {
        return Ok(prefactor);
    }
    Ok(prefactor * (-t * t / (8.0 * sigma2 + 4.0 * m * t)).exp())
}

/// Parameters fed to [`freedman_tail`] in the adjacency and Laplacian cases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreedmanParameters {
    pub sigma2_adjacency: f64,
    pub m_adjacency: f64,
    pub sigma2_laplacian: Option<f64>,
    pub m_laplacian: Option<f64>,
    pub dim: usize,
}

/// σ² = Δ, M = 2 for the adjacency sum; σ² = 1/d, M = 2/d for the Laplacian.
pub fn freedman_parameters(g: &Graph, k: usize) -> FreedmanParameters {
    let deg = g.degrees();
    let (s_lap, m_lap) = if deg.d_min > 0 {
        let d = deg.d_min as f64;
        (Some(1.0 / d), Some(2.0 / d))
    } else {
        (None, None)
    };
    FreedmanParameters {
        sigma2_adjacency: deg.d_max as f64,
        m_adjacency: 2.0,
        sigma2_laplacian: s_lap,
        m_laplacian: m_lap,
        dim: g.n() * k,
    }
}

/// Σ_{ij∈E} Var(Zᵢⱼ) = [Σᵢ deg(i) eᵢeᵢᵀ] ⊗ (Iₖ − Πₖ) and its operator norm,
/// which is Δ whenever Δ > 0 and k ≥ 2.
pub fn variance_sum_adjacency(g: &Graph, k: usize) -> Result<(SymmetricMatrix, f64)> {
    let deg: Vec<f64> = g.degrees().per_vertex.iter().map(|&d| d as f64).collect();
    let centered = SymmetricMatrix::identity(k).sub(&projector_pi(k)?);
    let m = kron(&SymmetricMatrix::diagonal(&deg), &centered);
    let norm = operator_norm(&m)?;
    Ok((m, norm))
}

/// Laplacian counterpart: [Σᵢ (Σ_{j∼i} 1/(deg i · deg j)) eᵢeᵢᵀ] ⊗ (Iₖ − Πₖ),
/// whose norm is at most 1/d.
pub fn variance_sum_laplacian(g: &Graph, k: usize) -> Result<(SymmetricMatrix, f64)> {
    let deg = require_positive_degrees(g)?;
    let mut diag = vec![0.0; g.n()];
    for &(i, j) in g.edges() {
        let w = 1.0 / (deg[i - 1] * deg[j - 1]) as f64;
        diag[i - 1] += w;
        diag[j - 1] += w;
    }
    let centered = SymmetricMatrix::identity(k).sub(&projector_pi(k)?);
    let m = kron(&SymmetricMatrix::diagonal(&diag), &centered);
    let norm = operator_norm(&m)?;
    Ok((m, norm))
}

/// Observed quantities for one lift. Laplacian fields are `None` when the
/// base graph has an isolated vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub new_eigs_adjacency: Spectrum,
    pub new_eigs_laplacian: Option<Spectrum>,
    pub max_new_adjacency: f64,
    /// max |1 − β| over new Laplacian eigenvalues.
    pub max_new_laplacian_dev: Option<f64>,
    pub dev_norm_adjacency: f64,
    pub dev_norm_laplacian: Option<f64>,
    pub prop_gap_adjacency: f64,
    pub prop_gap_laplacian: Option<f64>,
    /// Both gaps within [`PROP_EQUALITY_REL_TOL`] · max(1, Δ).
    pub prop_equality_holds: bool,
    pub match_failures_adjacency: usize,
    pub match_failures_laplacian: usize,
    pub lift_laplacian_min: Option<f64>,
    pub lift_laplacian_max: Option<f64>,
    pub laplacian_skipped: Option<String>,
}

impl DeviationReport {
    pub fn match_failure(&self) -> bool {
        self.match_failures_adjacency + self.match_failures_laplacian > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub k: usize,
    pub delta: f64,
    pub d_min: usize,
    pub d_max: usize,
    pub adjacency_bound: f64,
    pub laplacian_bound: Option<f64>,
    pub corollary_bound_adjacency: f64,
    pub corollary_bound_laplacian: Option<f64>,
}

pub fn bound_report(g: &Graph, k: usize, delta: f64) -> Result<BoundReport> {
    let deg = g.degrees();
    let n = g.n();
    let adjacency_bound = adjacency_bound(deg.d_max, n, k, delta)?;
    check_common(n, k, delta)?;
    let cor_adj = 32.0 * (deg.d_max as f64 * (4.0 * n as f64 * k as f64 / delta).ln()).sqrt();
    let (laplacian_bound, cor_lap) = if deg.d_min > 0 {
        (
            Some(laplacian_bound(deg.d_min, n, k, delta)?),
            Some(corollary_bounds(deg.d_min, deg.d_max, n, k, delta)?.1),
        )
    } else {
        (None, None)
    };
    Ok(BoundReport {
        n,
        k,
        delta,
        d_min: deg.d_min,
        d_max: deg.d_max,
        adjacency_bound,
        laplacian_bound,
        corollary_bound_adjacency: cor_adj,
        corollary_bound_laplacian: cor_lap,
    })
}

/// Every observed quantity and every bound for one lift of `g`.
///
/// Containment failures are counted in the report rather than returned as
/// errors, so callers can decide how severe they are.
pub fn analyze(g: &Graph, spec: &LiftSpec, delta: f64) -> Result<(DeviationReport, BoundReport)> {
    check_spec_of(g, spec)?;
    let bounds = bound_report(g, spec.k(), delta)?;
    let lifted = crate::lift::realize(spec);
    let scale = (bounds.d_max as f64).max(1.0);

    let adj = diff_spectra(&lifted.graph().adjacency(), &g.adjacency())?;
    let dev_norm_adjacency = adjacency_deviation_norm(g, spec)?;
    let max_new_adjacency = adj.remainder.max_abs();
    let prop_gap_adjacency = (max_new_adjacency - dev_norm_adjacency).abs();
    let mut holds = prop_gap_adjacency <= PROP_EQUALITY_REL_TOL * scale;

    let mut report = DeviationReport {
        new_eigs_adjacency: adj.remainder,
        new_eigs_laplacian: None,
        max_new_adjacency,
        max_new_laplacian_dev: None,
        dev_norm_adjacency,
        dev_norm_laplacian: None,
        prop_gap_adjacency,
        prop_gap_laplacian: None,
        prop_equality_holds: false,
        match_failures_adjacency: adj.unmatched.len(),
        match_failures_laplacian: 0,
        lift_laplacian_min: None,
        lift_laplacian_max: None,
        laplacian_skipped: None,
    };

    if bounds.d_min == 0 {
        report.laplacian_skipped = Some("base graph has an isolated vertex".to_string());
    } else {
        let lift_lap = lifted.graph().normalized_laplacian();
        let big = sym_eigenvalues(&lift_lap)?;
        let small = sym_eigenvalues(&g.normalized_laplacian())?;
        let lap = multiset_diff(&big, &small, default_match_tol(big.max_abs()));
        let dev = laplacian_deviation_norm(g, spec)?;
        let max_dev = lap.remainder.max_abs_deviation_from(1.0);
        let gap = (max_dev - dev).abs();
        holds &= gap <= PROP_EQUALITY_REL_TOL;
        report.lift_laplacian_min = big.min();
        report.lift_laplacian_max = big.max();
        report.match_failures_laplacian = lap.unmatched.len();
        report.new_eigs_laplacian = Some(lap.remainder);
        report.max_new_laplacian_dev = Some(max_dev);
        report.dev_norm_laplacian = Some(dev);
        report.prop_gap_laplacian = Some(gap);
    }
    report.prop_equality_holds = holds;
    if !holds {
        log::warn!(
            "deviation norm and largest new eigenvalue disagree (adjacency gap {:e}, laplacian gap {:?})",
            report.prop_gap_adjacency,
            report.prop_gap_laplacian
        );
    }
    Ok((report, bounds))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, GraphKind};
    use crate::lift::{realize, sample_uniform_lift, Matching};

    fn k2() -> Graph {
        Graph::new(2, &[(1, 2)]).unwrap()
    }

    fn complete(n: usize) -> Graph {
        generate(&GraphKind::Complete { n }, 0).unwrap()
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    fn k2_lifts() -> Vec<LiftSpec> {
        [vec![0, 1], vec![1, 0]]
            .into_iter()
            .map(|s| LiftSpec::new(k2(), 2, vec![Matching::new(s).unwrap()]).unwrap())
            .collect()
    }

    #[test]
    fn k2_two_lift_new_eigenvalues() {
        for spec in k2_lifts() {
            let lifted = realize(&spec);
            let adj = new_adjacency_eigenvalues(&k2(), &lifted).unwrap();
            assert!(close(adj.values(), &[-1.0, 1.0], 1e-12));
            let lap = new_laplacian_eigenvalues(&k2(), &lifted).unwrap();
            assert!(close(lap.values(), &[0.0, 2.0], 1e-12));
            assert!((adjacency_deviation_norm(&k2(), &spec).unwrap() - 1.0).abs() < 1e-12);
            assert!((laplacian_deviation_norm(&k2(), &spec).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn triangle_identity_two_lift() {
        let spec = LiftSpec::identity(complete(3), 2).unwrap();
        let lifted = realize(&spec);
        let adj = new_adjacency_eigenvalues(&complete(3), &lifted).unwrap();
        assert!(close(adj.values(), &[-1.0, -1.0, 2.0], 1e-12));
        let lap = new_laplacian_eigenvalues(&complete(3), &lifted).unwrap();
        assert!(close(lap.values(), &[0.0, 1.5, 1.5], 1e-12));
        assert!((adjacency_deviation_norm(&complete(3), &spec).unwrap() - 2.0).abs() < 1e-12);
        // max |1 − β| over {0, 3/2, 3/2} is 1.
        assert!((laplacian_deviation_norm(&complete(3), &spec).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn order_one_has_nothing_new() {
        let g = complete(4);
        let spec = sample_uniform_lift(&g, 1, 3).unwrap();
        let lifted = realize(&spec);
        assert!(new_adjacency_eigenvalues(&g, &lifted).unwrap().is_empty());
        assert!(new_laplacian_eigenvalues(&g, &lifted).unwrap().is_empty());
        assert!(adjacency_deviation_norm(&g, &spec).unwrap() < 1e-12);
        assert!(laplacian_deviation_norm(&g, &spec).unwrap() < 1e-12);
    }

    #[test]
    fn block_assembly_matches_realized_graph() {
        let g = generate(&GraphKind::ErdosRenyi { n: 7, p: 0.5 }, 4).unwrap();
        let spec = sample_uniform_lift(&g, 4, 21).unwrap();
        assert_eq!(lift_adjacency_from_blocks(&spec), realize(&spec).graph().adjacency());
    }

    #[test]
    fn isolated_vertex_rejected_by_laplacian_route() {
        let g = Graph::new(3, &[(1, 2)]).unwrap();
        let spec = LiftSpec::identity(g.clone(), 2).unwrap();
        assert_eq!(
            laplacian_deviation_norm(&g, &spec),
            Err(Error::DegreeZeroUnsupported(3))
        );
        let (dev, bounds) = analyze(&g, &spec, 0.05).unwrap();
        assert!(dev.laplacian_skipped.is_some());
        assert!(dev.dev_norm_laplacian.is_none());
        assert!(bounds.laplacian_bound.is_none());
        assert!((dev.dev_norm_adjacency - 1.0).abs() < 1e-12);
    }

    #[test]
    fn adjacency_bound_examples() {
        assert_eq!(adjacency_bound(0, 5, 5, 0.1).unwrap(), 0.0);
        // 2nk/δ = e when n = k = 1 and δ = 2/e.
        let delta = 2.0 / std::f64::consts::E;
        assert!((adjacency_bound(1, 1, 1, delta).unwrap() - 16.0).abs() < 1e-12);
        assert!((laplacian_bound(1, 1, 1, delta).unwrap() - 16.0).abs() < 1e-12);
        assert!(adjacency_bound(1, 1, 1, 0.0).is_err());
        assert!(adjacency_bound(1, 1, 1, 1.0).is_err());
        assert!(laplacian_bound(0, 3, 3, 0.1).is_err());
    }

    #[test]
    fn bounds_at_desk_scale_parameters() {
        // Reference values from arbitrary-precision evaluation.
        let a = adjacency_bound(19, 20, 50, 0.05).unwrap();
        assert!((a - 227.028_701_581_494_539).abs() < 1e-10);
        let l = laplacian_bound(19, 20, 50, 0.05).unwrap();
        assert!((l - 11.948_879_030_604_976).abs() < 1e-12);
    }

    #[test]
    fn bounds_shrink_as_delta_grows() {
        let g = complete(6);
        let mut prev = bound_report(&g, 4, 0.001).unwrap();
        for delta in [0.01, 0.05, 0.2, 0.5, 0.9] {
            let cur = bound_report(&g, 4, delta).unwrap();
            assert!(cur.adjacency_bound <= prev.adjacency_bound);
            assert!(cur.laplacian_bound.unwrap() <= prev.laplacian_bound.unwrap());
            assert!(cur.corollary_bound_adjacency <= prev.corollary_bound_adjacency);
            assert!(cur.corollary_bound_laplacian.unwrap() <= prev.corollary_bound_laplacian.unwrap());
            prev = cur;
        }
    }

    #[test]
    fn laplacian_bound_scaling() {
        let a = laplacian_bound(3, 20, 50, 0.05).unwrap();
        let b = laplacian_bound(12, 20, 50, 0.05).unwrap();
        assert!((b - a / 2.0).abs() < 1e-12);
    }

    #[test]
    fn corollary_examples() {
        // 4nk/δ = e would need δ > 1, which is rejected.
        assert!(corollary_bounds(1, 1, 1, 1, 4.0 / std::f64::consts::E).is_err());
        let (a, l) = corollary_bounds(3, 3, 4, 4, 0.1).unwrap();
        // 50-digit evaluations of 32√(3 ln 640) and 32√(ln 640 / 3).
        assert!((a - 140.888_715_792_850_565).abs() < 1e-11);
        assert!((l - 46.962_905_264_283_522).abs() < 1e-11);
        let base = adjacency_bound(3, 4, 4, 0.05).unwrap();
        // 32 √(Δ ln(4nk/δ)) = 2 · 16 √(Δ ln(2nk/(δ/2)))
        assert!((a - 2.0 * base).abs() < 1e-12);
        assert!((l - 2.0 * laplacian_bound(3, 4, 4, 0.05).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn freedman_examples() {
        assert_eq!(freedman_tail(0.0, 3.0, 1.0, 7).unwrap(), 14.0);
        assert_eq!(freedman_tail(0.0, 0.0, 1.0, 7).unwrap(), 14.0);
        let v = freedman_tail(4.0, 0.0, 1.0, 1).unwrap();
        assert!((v - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        let v = freedman_tail(8.0, 4.0, 2.0, 10).unwrap();
        assert!((v - 20.0 * (-64.0f64 / 96.0).exp()).abs() < 1e-13);
        assert!(freedman_tail(-1.0, 1.0, 1.0, 1).is_err());
        assert!(freedman_tail(1.0, 1.0, 0.0, 1).is_err());
    }

    #[test]
    fn tail_at_theorem_threshold_is_below_delta() {
        // With σ² = Δ, M = 2 and t = 16 max{√(Δ ℓ), ℓ}, ℓ = ln(2nk/δ), the tail is ≤ δ.
        for &(dmax, n, k, delta) in &[(19usize, 20usize, 50usize, 0.05), (3, 4, 4, 0.1), (100, 10, 2, 0.01)] {
            let ell = (2.0 * n as f64 * k as f64 / delta).ln();
            let t = 16.0 * (dmax as f64 * ell).sqrt().max(ell);
            let tail = freedman_tail(t, dmax as f64, 2.0, n * k).unwrap();
            assert!(tail <= delta, "{tail} > {delta}");
        }
    }

    #[test]
    fn variance_sums() {
        let (m, norm) = variance_sum_adjacency(&k2(), 2).unwrap();
        assert_eq!(m.dim(), 4);
        assert!((norm - 1.0).abs() < 1e-12);
        let (m, norm) = variance_sum_adjacency(&complete(4), 1).unwrap();
        assert_eq!(m.max_abs(), 0.0);
        assert_eq!(norm, 0.0);
        let (_, norm) = variance_sum_adjacency(&complete(4), 3).unwrap();
        assert!((norm - 3.0).abs() < 1e-12);
        let path = Graph::new(4, &[(1, 2), (2, 3), (3, 4)]).unwrap();
        let (_, norm) = variance_sum_laplacian(&path, 3).unwrap();
        assert!(norm <= 1.0 + 1e-12);
        let params = freedman_parameters(&path, 3);
        assert_eq!(params.sigma2_laplacian, Some(1.0));
        assert_eq!(params.m_laplacian, Some(2.0));
        assert_eq!(params.sigma2_adjacency, 2.0);
        assert_eq!(params.dim, 12);
    }

    #[test]
    fn analyze_fixtures() {
        let spec = LiftSpec::identity(k2(), 2).unwrap();
        let (dev, bounds) = analyze(&k2(), &spec, 0.05).unwrap();
        assert!((dev.dev_norm_adjacency - 1.0).abs() < 1e-12);
        assert!(close(dev.new_eigs_adjacency.values(), &[-1.0, 1.0], 1e-12));
        assert!(dev.prop_equality_holds);
        assert_eq!(bounds.d_max, 1);

        let g = complete(5);
        let (dev, _) = analyze(&g, &sample_uniform_lift(&g, 1, 0).unwrap(), 0.5).unwrap();
        assert!(dev.new_eigs_adjacency.is_empty());
        assert!(dev.new_eigs_laplacian.as_ref().unwrap().is_empty());
        assert!(dev.dev_norm_adjacency < 1e-12);
        assert!(dev.dev_norm_laplacian.unwrap() < 1e-12);

        let spec = LiftSpec::identity(complete(3), 2).unwrap();
        let (dev, bounds) = analyze(&complete(3), &spec, 0.05).unwrap();
        assert!((dev.dev_norm_adjacency - 2.0).abs() < 1e-12);
        assert!(dev.max_new_adjacency <= bounds.adjacency_bound);
    }

    #[test]
    fn report_serializes_flat() {
        let spec = LiftSpec::identity(k2(), 2).unwrap();
        let (dev, bounds) = analyze(&k2(), &spec, 0.05).unwrap();
        let v = serde_json::to_value(&dev).unwrap();
        assert!(v.get("dev_norm_adjacency").unwrap().is_number());
        assert!(v.get("new_eigs_adjacency").unwrap().is_array());
        let b = serde_json::to_value(&bounds).unwrap();
        assert_eq!(b["d_max"], 1);
    }
}
