use serde::{Deserialize, Serialize};

/// Eigenvalue multiset, stored sorted nondecreasing with multiplicity.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        Self { values }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min(&self) -> Option<f64> {
        self.values.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.values.last().copied()
    }

    /// Largest |λ|, or 0 for the empty multiset.
    pub fn max_abs(&self) -> f64 {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => lo.abs().max(hi.abs()),
            _ => 0.0,
        }
    }

    /// Largest |c − λ|, or 0 for the empty multiset.
    pub fn max_abs_deviation_from(&self, c: f64) -> f64 {
        match (self.min(), self.max()) {
            (Some(lo), Some(hi)) => (c - lo).abs().max((hi - c).abs()),
            _ => 0.0,
        }
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }
}

/// Result of [`multiset_diff`]: what is left of `big`, plus the elements of
/// `small` that found no partner.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumDiff {
    pub remainder: Spectrum,
    pub unmatched: Vec<f64>,
}

impl SpectrumDiff {
    pub fn match_failure(&self) -> bool {
        !self.unmatched.is_empty()
    }
}

/// Tolerance used when matching old eigenvalues inside a lifted spectrum.
pub fn default_match_tol(norm_of_big: f64) -> f64 {
    1e-7 * norm_of_big.max(1.0)
}

/// `big \ small` as multisets, with approximate equality.
///
/// Elements of `small` are taken in increasing order; each consumes the
/// nearest unconsumed element of `big` within `tol`, ties going to the lower
/// index.
pub fn multiset_diff(big: &Spectrum, small: &Spectrum, tol: f64) -> SpectrumDiff {
    assert!(tol >= 0.0, "negative tolerance");
    let b = big.values();
    let mut used = vec![false; b.len()];
    let mut unmatched = Vec::new();
    for &s in small.values() {
        let start = b.partition_point(|&x| x < s - tol);
        let mut best: Option<(usize, f64)> = None;
        for (idx, &x) in b.iter().enumerate().skip(start) {
            if x > s + tol {
                break;
            }
            if used[idx] {
                continue;
            }
            let dist = (x - s).abs();
            if best.is_none_or(|(_, d)| dist < d) {
                best = Some((idx, dist));
            }
        }
        match best {
            Some((idx, _)) => used[idx] = true,
            None => unmatched.push(s),
        }
    }
    let remainder = b
        .iter()
        .zip(&used)
        .filter(|(_, &u)| !u)
        .map(|(&x, _)| x)
        .collect();
    SpectrumDiff {
        remainder: Spectrum { values: remainder },
        unmatched,
    }
}
