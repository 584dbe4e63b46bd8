//! Symmetric eigensolver: Householder reduction to tridiagonal form followed
//! by implicit QR sweeps with Wilkinson shifts.

use super::{dot, SymmetricMatrix};
use crate::error::{Error, Result};

/// QR sweeps allowed per eigenvalue before giving up.
pub const SWEEPS_PER_EIGENVALUE: usize = 50;

pub(crate) struct Decomposition {
    pub values: Vec<f64>,
    /// Row `j` is the unit eigenvector for `values[j]`. Empty unless requested.
    pub vectors: Vec<Vec<f64>>,
}

struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
    /// Householder vectors and their `beta`s, kept only when eigenvectors are wanted.
    reflectors: Vec<(Vec<f64>, f64)>,
}

/// Reduces `a` (row-major, only the lower triangle is read) to tridiagonal
/// form. The matrix buffer is destroyed.
fn tridiagonalize(n: usize, a: &mut [f64], keep_reflectors: bool) -> Tridiagonal {
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::new();
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let base = k + 1;
        let v = &mut v[..m];
        let p = &mut p[..m];
        for r in 0..m {
            v[r] = a[(base + r) * n + k];
        }
        diag[k] = a[k * n + k];

        let tail_sq: f64 = v[1..].iter().map(|x| x * x).sum();
        if tail_sq == 0.0 {
            off[k] = v[0];
            if keep_reflectors {
                reflectors.push((Vec::new(), 0.0));
            }
            continue;
        }
        let norm = (v[0] * v[0] + tail_sq).sqrt();
        let alpha = if v[0] > 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let beta = 2.0 / (v[0] * v[0] + tail_sq);
        off[k] = alpha;

        // p = beta * S v, reading S from its lower triangle.
        p.iter_mut().for_each(|x| *x = 0.0);
        for r in 0..m {
            let row_start = (base + r) * n + base;
            let row = &a[row_start..row_start + r];
            let vr = v[r];
            let mut acc = dot(row, &v[..r]) + a[row_start + r] * vr;
            acc += p[r];
            p[r] = acc;
            for (pc, x) in p[..r].iter_mut().zip(row) {
                *pc += x * vr;
            }
        }
        p.iter_mut().for_each(|x| *x *= beta);
        let kk = 0.5 * beta * dot(p, v);
        // w overwrites p
        for (pc, vc) in p.iter_mut().zip(v.iter()) {
            *pc -= kk * vc;
        }
        let w = &*p;
        for r in 0..m {
            let row_start = (base + r) * n + base;
            let row = &mut a[row_start..=row_start + r];
            let (vr, wr) = (v[r], w[r]);
            for ((x, vc), wc) in row.iter_mut().zip(&v[..=r]).zip(&w[..=r]) {
                *x -= vr * wc + wr * vc;
            }
        }
        if keep_reflectors {
            reflectors.push((v.to_vec(), beta));
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2) * n + n - 2];
        off[n - 2] = a[(n - 1) * n + n - 2];
    }
    if n >= 1 {
        diag[n - 1] = a[(n - 1) * n + n - 1];
    }
    Tridiagonal {
        diag,
        off,
        reflectors,
    }
}

/// Qᵀ for Q = H_0 H_1 ... H_{n-3}, stored row-major.
fn accumulate_qt(n: usize, reflectors: &[(Vec<f64>, f64)]) -> Vec<Vec<f64>> {
    let mut qt: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut r = vec![0.0; n];
            r[i] = 1.0;
            r
        })
        .collect();
    let mut t = vec![0.0; n];
    for (k, (v, beta)) in reflectors.iter().enumerate() {
        if *beta == 0.0 {
            continue;
        }
        let base = k + 1;
        // t = vᵀ X over rows base..n
        t.iter_mut().for_each(|x| *x = 0.0);
        for (r, vr) in v.iter().enumerate() {
            for (tc, x) in t.iter_mut().zip(&qt[base + r]) {
                *tc += vr * x;
            }
        }
        for (r, vr) in v.iter().enumerate() {
            let s = beta * vr;
            for (x, tc) in qt[base + r].iter_mut().zip(&t) {
                *x -= s * tc;
            }
        }
    }
    qt
}

#[inline]
fn negligible(off: f64, d0: f64, d1: f64) -> bool {
    off.abs() <= f64::EPSILON * (d0.abs() + d1.abs()) || off.abs() < f64::MIN_POSITIVE
}

/// Diagonalizes the symmetric tridiagonal matrix (diag, off) in place. When
/// `rows` is given, the same rotations are applied to its rows.
fn tridiagonal_qr(diag: &mut [f64], off: &mut [f64], mut rows: Option<&mut [Vec<f64>]>) -> Result<()> {
    let n = diag.len();
    if n <= 1 {
        return Ok(());
    }
    let cap = SWEEPS_PER_EIGENVALUE * n;
    let mut iterations = 0usize;
    let mut hi = n - 1;
    while hi > 0 {
        if negligible(off[hi - 1], diag[hi - 1], diag[hi]) {
            off[hi - 1] = 0.0;
            hi -= 1;
            continue;
        }
        let mut lo = hi - 1;
        while lo > 0 && !negligible(off[lo - 1], diag[lo - 1], diag[lo]) {
            lo -= 1;
        }
        if lo > 0 {
            off[lo - 1] = 0.0;
        }
        iterations += 1;
        if iterations > cap {
            return Err(Error::EigenFailure { dim: n, iterations });
        }

        // Wilkinson shift from the trailing 2x2 block.
        let delta = 0.5 * (diag[hi - 1] - diag[hi]);
        let e = off[hi - 1];
        let sign = if delta >= 0.0 { 1.0 } else { -1.0 };
        let denom = delta + sign * delta.hypot(e);
        let shift = if denom == 0.0 { diag[hi] } else { diag[hi] - e * e / denom };

        let mut x = diag[lo] - shift;
        let mut z = off[lo];
        for k in lo..hi {
            let r = x.hypot(z);
            let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (x / r, z / r) };
            if k > lo {
                off[k - 1] = r;
            }
            let (a, b, g) = (diag[k], off[k], diag[k + 1]);
            let cs = c * s;
            diag[k] = c * c * a + 2.0 * cs * b + s * s * g;
            diag[k + 1] = s * s * a - 2.0 * cs * b + c * c * g;
            off[k] = cs * (g - a) + (c * c - s * s) * b;
            if k + 1 < hi {
                z = s * off[k + 1];
                off[k + 1] *= c;
                x = off[k];
            }
            if let Some(rows) = rows.as_deref_mut() {
                let (head, tail) = rows.split_at_mut(k + 1);
                let (rk, rk1) = (&mut head[k], &mut tail[0]);
                for (p, q) in rk.iter_mut().zip(rk1.iter_mut()) {
                    let (u, w) = (*p, *q);
                    *p = c * u + s * w;
                    *q = -s * u + c * w;
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn decompose(m: &SymmetricMatrix, want_vectors: bool) -> Result<Decomposition> {
    let n = m.dim();
    if n == 0 {
        return Err(Error::params("eigenproblem of a 0x0 matrix"));
    }
    if m.as_slice().iter().any(|x| !x.is_finite()) {
        return Err(Error::params("matrix has non-finite entries"));
    }
    let mut work = m.clone().into_data();
    let mut tri = tridiagonalize(n, &mut work, want_vectors);
    drop(work);
    let mut rows = if want_vectors {
        Some(accumulate_qt(n, &tri.reflectors))
    } else {
        None
    };
    tridiagonal_qr(&mut tri.diag, &mut tri.off, rows.as_deref_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| tri.diag[a].total_cmp(&tri.diag[b]));
    let values = order.iter().map(|&i| tri.diag[i]).collect();
    let vectors = match rows {
        Some(mut rows) => order.iter().map(|&i| std::mem::take(&mut rows[i])).collect(),
        None => Vec::new(),
    };
    Ok(Decomposition { values, vectors })
}
