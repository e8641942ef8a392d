use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

/// Entries at or below this magnitude are treated as structural zeros.
pub const NNZ_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Svd,
    Truncated,
    Randomized,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Svd => "svd",
            Algorithm::Truncated => "truncated",
            Algorithm::Randomized => "randomized",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "svd" => Ok(Algorithm::Svd),
            "truncated" => Ok(Algorithm::Truncated),
            "randomized" => Ok(Algorithm::Randomized),
            _ => Err(Error::InvalidArgument(format!(
                "unknown algorithm '{s}'; valid: svd, truncated, randomized"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub group: String,
    pub convention: String,
    pub space: String,
    pub algorithm: Algorithm,
    pub seed: Option<u64>,
    pub tolerance: f64,
}

impl Provenance {
    pub fn new(algorithm: Algorithm, tolerance: f64) -> Self {
        Self {
            group: String::new(),
            convention: String::new(),
            space: String::new(),
            algorithm,
            seed: None,
            tolerance,
        }
    }
}

/// Orthonormal basis of an invariant subspace, stored as tensors.
#[derive(Debug, Clone)]
pub struct BasisSet {
    pub order: usize,
    pub dim: usize,
    pub elements: Vec<DenseTensor>,
    pub provenance: Provenance,
}

impl BasisSet {
    pub fn from_columns(order: usize, dim: usize, cols: &DMatrix<f64>, provenance: Provenance) -> Result<Self> {
        let elements = cols
            .column_iter()
            .map(|c| DenseTensor::devectorize(c.as_slice(), order, dim))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            order,
            dim,
            elements,
            provenance,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Elements as the columns of a `d^n x k` matrix.
    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.dim.pow(self.order as u32);
        let mut m = DMatrix::zeros(n, self.elements.len());
        for (j, e) in self.elements.iter().enumerate() {
            m.column_mut(j).copy_from_slice(e.as_slice());
        }
        m
    }

    /// `max |BᵀB - I|`
    pub fn orthonormality_error(&self) -> f64 {
        let m = self.matrix();
        let g = m.transpose() * &m - DMatrix::identity(m.ncols(), m.ncols());
        g.abs().max()
    }

    /// Echelon form of the span, display-normalized and sorted.
    ///
    /// The result does not depend on which orthonormal basis of the span
    /// the solver happened to return.
    pub fn display_elements(&self) -> Vec<DenseTensor> {
        if self.is_empty() {
            return Vec::new();
        }
        let rows = echelon_rows(&self.matrix().transpose());
        let mut out: Vec<DenseTensor> = rows
            .into_iter()
            .map(|r| display_normalize(&DenseTensor::from_vec(self.order, self.dim, r).expect("row length")))
            .collect();
        sort_for_display(&mut out);
        out
    }
}

/// Reduced row echelon form with partial pivoting; returns nonzero rows.
pub(crate) fn echelon_rows(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let mut m = a.clone();
    let (k, n) = m.shape();
    let scale = m.abs().max().max(1e-300);
    let mut row = 0;
    for col in 0..n {
        if row == k {
            break;
        }
        let (piv, val) = (row..k)
            .map(|r| (r, m[(r, col)].abs()))
            .fold((row, -1.0), |best, x| if x.1 > best.1 { x } else { best });
        if val <= 1e-8 * scale {
            continue;
        }
        m.swap_rows(row, piv);
        let p = m[(row, col)];
        for c in 0..n {
            m[(row, c)] /= p;
        }
        for r in 0..k {
            if r != row {
                let f = m[(r, col)];
                if f != 0.0 {
                    for c in 0..n {
                        let v = m[(row, c)];
                        m[(r, c)] -= f * v;
                    }
                }
            }
        }
        row += 1;
    }
    (0..row)
        .map(|r| {
            m.row(r)
                .iter()
                .map(|&v| if v.abs() < 1e-12 { 0.0 } else { v })
                .collect()
        })
        .collect()
}

/// Scales so the max-abs entry is 1, positive at the first max-abs position.
pub fn display_normalize(t: &DenseTensor) -> DenseTensor {
    let m = t.max_abs();
    if m == 0.0 {
        return t.clone();
    }
    let first = t
        .as_slice()
        .iter()
        .find(|v| v.abs() >= m * (1.0 - 1e-9))
        .copied()
        .unwrap_or(m);
    snap(&t.scale(1.0 / first.abs() * first.signum()))
}

/// Rounds every entry to a multiple of 2⁻⁴⁰, clearing solver noise so that
/// values such as 1 and −0.5 come out exact.
pub fn snap(t: &DenseTensor) -> DenseTensor {
    const Q: f64 = (1u64 << 40) as f64;
    let mut out = t.clone();
    for v in out.as_mut_slice() {
        *v = (*v * Q).round() / Q;
    }
    out
}

fn support(t: &DenseTensor) -> Vec<usize> {
    t.as_slice()
        .iter()
        .enumerate()
        .filter(|(_, v)| v.abs() > NNZ_TOL)
        .map(|(i, _)| i)
        .collect()
}

/// Fewest nonzeros first, ties broken by lexicographically smaller support.
pub fn sparsity_cmp(a: &DenseTensor, b: &DenseTensor) -> Ordering {
    let (sa, sb) = (support(a), support(b));
    sa.len().cmp(&sb.len()).then_with(|| sa.cmp(&sb))
}

pub fn sort_for_display(ts: &mut [DenseTensor]) {
    ts.sort_by(sparsity_cmp);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_fixes_sign_and_scale() {
        let t = DenseTensor::from_vec(1, 3, vec![0.0, -0.5, 0.5]).unwrap();
        let n = display_normalize(&t);
        assert_eq!(n.as_slice(), &[0.0, 1.0, -1.0]);
    }

    #[test]
    fn echelon_is_basis_independent() {
        let a = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let rot = DMatrix::from_row_slice(2, 2, &[0.6, 0.8, -0.8, 0.6]);
        assert_eq!(echelon_rows(&a).len(), 2);
        let r1 = echelon_rows(&a);
        let r2 = echelon_rows(&(rot * &a));
        for (x, y) in r1.iter().flatten().zip(r2.iter().flatten()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn sort_prefers_sparse_then_lexicographic() {
        let a = DenseTensor::from_vec(1, 3, vec![0.0, 1.0, 1.0]).unwrap();
        let b = DenseTensor::from_vec(1, 3, vec![0.0, 0.0, 1.0]).unwrap();
        let c = DenseTensor::from_vec(1, 3, vec![1.0, 0.0, 0.0]).unwrap();
        let mut v = vec![a.clone(), b.clone(), c.clone()];
        sort_for_display(&mut v);
        assert_eq!(v, vec![c, b, a]);
    }
}
