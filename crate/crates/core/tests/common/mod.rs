//! Independent reference computations shared by the integration tests.
//!
//! Eigenvalues here come from the characteristic polynomial (Faddeev–LeVerrier
//! coefficients, Aberth–Ehrlich roots), which shares no code with the
//! library's Householder/QR solver.

#![allow(dead_code)]

use graphlift::rng::SplitMix64;
use graphlift::SymmetricMatrix;
use num_complex::Complex64;

/// Coefficients of det(xI − M), lowest degree first (leading 1 last).
pub fn charpoly(m: &SymmetricMatrix) -> Vec<f64> {
    let n = m.dim();
    let a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut mk = vec![vec![0.0; n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += a[i][l] * mk[l][j];
                }
                next[i][j] = s;
            }
            next[i][i] += c[n - k + 1];
        }
        mk = next;
        let mut tr = 0.0;
        for i in 0..n {
            for l in 0..n {
                tr += a[i][l] * mk[l][i];
            }
        }
        c[n - k] = -tr / k as f64;
    }
    c
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &coef in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + coef;
    }
    (p, dp)
}

/// All complex roots of a monic polynomial by Aberth–Ehrlich iteration.
pub fn poly_roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    // Cauchy bound on root magnitude.
    let radius = 1.0 + c[..n].iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|j| Complex64::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (j as f64 + 0.25) / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 * radius {
            break;
        }
    }
    z
}

/// Eigenvalues of a small symmetric matrix as sorted real parts of the
/// characteristic polynomial's roots.
pub fn oracle_eigenvalues(m: &SymmetricMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = poly_roots(&charpoly(m)).iter().map(|z| z.re).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Symmetric matrix with entries uniform on [−1, 1).
pub fn random_symmetric(dim: usize, seed: u64) -> SymmetricMatrix {
    let mut rng = SplitMix64::new(seed);
    let mut m = SymmetricMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..=i {
            m.set(i, j, 2.0 * rng.next_f64() - 1.0);
        }
    }
    m
}

pub fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}
