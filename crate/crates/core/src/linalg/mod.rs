//! Dense linear algebra: symmetric eigenvalues, operator norms, Kronecker
//! products and eigenvalue-multiset arithmetic.

mod eigen;
mod matrix;
mod spectrum;

pub use eigen::SWEEPS_PER_EIGENVALUE;
pub use matrix::{DenseMatrix, SymmetricMatrix};
pub use spectrum::{default_match_tol, multiset_diff, Spectrum, SpectrumDiff};

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Above this dimension [`operator_norm`] switches to power iteration.
pub const DENSE_NORM_LIMIT: usize = 4096;
pub const POWER_REL_TOL: f64 = 1e-9;

/// Dot product with four independent accumulators so the loop vectorizes.
/// Summation order is fixed, so results are reproducible.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let chunks = n / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..n {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// All eigenvalues of `m`, sorted.
pub fn sym_eigenvalues(m: &SymmetricMatrix) -> Result<Spectrum> {
    let dec = eigen::decompose(m, false)?;
    Ok(Spectrum::new(dec.values))
}

/// Quality of a full eigendecomposition of `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub spectrum: Spectrum,
    /// max over eigenpairs of ‖M v − λ v‖.
    pub max_residual: f64,
    /// max |vᵢᵀvⱼ − δᵢⱼ|.
    pub max_orthogonality_error: f64,
    /// The scale the residual guarantee is stated against, max(1, ‖M‖).
    pub scale: f64,
}

impl ResidualReport {
    /// Checks ‖M v − λ v‖ ≤ `rel` · max(1, ‖M‖) for every pair.
    pub fn within(&self, rel: f64) -> bool {
        self.max_residual <= rel * self.scale
    }
}

/// Decomposes `m` including eigenvectors and measures residuals and
/// orthogonality. Eigenvectors themselves are not exposed.
pub fn residual_check(m: &SymmetricMatrix) -> Result<ResidualReport> {
    let dec = eigen::decompose(m, true)?;
    let n = m.dim();
    let mut max_residual: f64 = 0.0;
    for (lambda, v) in dec.values.iter().zip(&dec.vectors) {
        let mv = m.matvec(v);
        let r = mv
            .iter()
            .zip(v)
            .map(|(a, b)| (a - lambda * b).powi(2))
            .sum::<f64>()
            .sqrt();
        max_residual = max_residual.max(r);
    }
    let mut max_orthogonality_error: f64 = 0.0;
    for i in 0..n {
        for j in 0..=i {
            let target = if i == j { 1.0 } else { 0.0 };
            let g = dot(&dec.vectors[i], &dec.vectors[j]);
            max_orthogonality_error = max_orthogonality_error.max((g - target).abs());
        }
    }
    let spectrum = Spectrum::new(dec.values);
    let scale = spectrum.max_abs().max(1.0);
    Ok(ResidualReport {
        spectrum,
        max_residual,
        max_orthogonality_error,
        scale,
    })
}

/// ‖M‖ = max |λ|. Exact (full spectrum) up to [`DENSE_NORM_LIMIT`], power
/// iteration on M² above it.
pub fn operator_norm(m: &SymmetricMatrix) -> Result<f64> {
    if m.dim() <= DENSE_NORM_LIMIT {
        Ok(sym_eigenvalues(m)?.max_abs())
    } else {
        power_operator_norm(m, POWER_REL_TOL, 10 * m.dim())
    }
}

/// ‖M‖ by power iteration on M², stopping once the estimate moves by less
/// than `rel_tol` relative to itself.
pub fn power_operator_norm(m: &SymmetricMatrix, rel_tol: f64, max_iter: usize) -> Result<f64> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::params("operator norm of a 0x0 matrix"));
    }
    if m.max_abs() == 0.0 {
        return Ok(0.0);
    }
    let mut rng = SplitMix64::new(0x005e_ed0f_90e7);
    let mut x: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
    normalize(&mut x);
    let mut estimate = 0.0;
    for _ in 0..max_iter {
        let y = m.matvec(&x);
        // x is a unit vector, so ‖Mx‖² is the Rayleigh quotient of M².
        let next = dot(&y, &y).sqrt();
        let mut z = m.matvec(&y);
        if normalize(&mut z) == 0.0 {
            return Ok(next);
        }
        x = z;
        if (next - estimate).abs() <= rel_tol * next {
            return Ok(next);
        }
        estimate = next;
    }
    Err(Error::EigenFailure {
        dim: n,
        iterations: max_iter,
    })
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Kronecker product. Row `(i, l)` of the result is `i * dim(b) + l` (0-based),
/// the same flattening the lift vertex labeling uses.
pub fn kron(a: &SymmetricMatrix, b: &SymmetricMatrix) -> SymmetricMatrix {
    let (n, k) = (a.dim(), b.dim());
    let dim = n * k;
    let mut data = vec![0.0; dim * dim];
    for i in 0..n {
        for j in 0..n {
            let aij = a.get(i, j);
            if aij == 0.0 {
                continue;
            }
            for l in 0..k {
                let row = (i * k + l) * dim + j * k;
                for (dst, bv) in data[row..row + k].iter_mut().zip(b.row(l)) {
                    *dst = aij * bv;
                }
            }
        }
    }
    SymmetricMatrix::from_row_major(dim, data)
}

/// Πₖ, the k×k matrix with every entry 1/k.
pub fn projector_pi(k: usize) -> Result<SymmetricMatrix> {
    if k == 0 {
        return Err(Error::params("projector order must be at least 1"));
    }
    Ok(SymmetricMatrix::from_row_major(k, vec![1.0 / k as f64; k * k]))
}
