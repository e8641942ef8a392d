//! Householder QR with column pivoting.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct PivotedQr {
    /// Orthonormal columns spanning the retained pivots.
    pub q: DMatrix<f64>,
    /// Diagonal of R in pivot order, one entry per processed column.
    pub r_diag: Vec<f64>,
    /// Column permutation: `perm[k]` is the original column of pivot `k`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

/// Factorizes `a` and keeps pivots with `|R_kk| > rel_tol * |R_00|`.
pub fn pivoted_qr(a: &DMatrix<f64>, rel_tol: f64) -> PivotedQr {
    let (m, n) = a.shape();
    let mut w = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<DVector<f64>> = Vec::new();
    let mut r_diag: Vec<f64> = Vec::new();
    let steps = m.min(n);
    let mut rank = 0;
    for k in 0..steps {
        let (piv, best) = (k..n)
            .map(|j| (j, w.view((k, j), (m - k, 1)).norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        w.swap_columns(k, piv);
        perm.swap(k, piv);
        if best == 0.0 || (k > 0 && best <= rel_tol * r_diag[0].abs()) {
            r_diag.push(best);
            break;
        }
        let mut v: DVector<f64> = w.column(k).rows(k, m - k).into_owned();
        let alpha = if v[0] >= 0.0 { -best } else { best };
        v[0] -= alpha;
        let vn = v.norm();
        r_diag.push(alpha);
        rank += 1;
        if vn > 0.0 {
            v /= vn;
            let mut block = w.view_mut((k, k), (m - k, n - k));
            let proj = v.transpose() * &block;
            block -= &v * proj * 2.0;
        }
        reflectors.push(v);
    }
    let mut q = DMatrix::zeros(m, rank);
    for j in 0..rank {
        q[(j, j)] = 1.0;
    }
    for (k, v) in reflectors.iter().enumerate().rev() {
        let mut block = q.view_mut((k, 0), (m - k, rank));
        let proj = v.transpose() * &block;
        block -= v * proj * 2.0;
    }
    PivotedQr { q, r_diag, perm, rank }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reveals_rank_of_product() {
        let a = DMatrix::from_fn(8, 3, |i, j| ((i * 3 + j * 5) % 7) as f64 - 3.0);
        let b = DMatrix::from_fn(3, 6, |i, j| ((i * i + 2 * j + i * j) % 5) as f64 + 0.5);
        let c = &a * &b;
        let qr = pivoted_qr(&c, 1e-8);
        assert_eq!(qr.rank, 3);
        assert!((qr.q.transpose() * &qr.q - DMatrix::identity(3, 3)).abs().max() < 1e-12);
        let resid = &c - &qr.q * (qr.q.transpose() * &c);
        assert!(resid.abs().max() < 1e-10);
        assert!(qr.r_diag[0].abs() >= qr.r_diag[1].abs());
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let qr = pivoted_qr(&DMatrix::zeros(4, 3), 1e-8);
        assert_eq!(qr.rank, 0);
        assert_eq!(qr.q.ncols(), 0);
    }
}
