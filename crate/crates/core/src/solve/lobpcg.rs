//! Block LOBPCG for the smallest eigenpairs of `MᵀM`, used to extract a
//! known-size nullspace without a full SVD.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::basis::{Algorithm, BasisSet, Provenance};
use super::constraints::ConstraintSet;
use super::nullspace::{nullspace_of, NullspaceOptions};
use crate::error::{Error, Result};

pub const GUARD_VECTORS: usize = 5;
pub const EIG_TOL: f64 = 1e-10;
pub const KEEP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy)]
pub struct LobpcgOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub guard: usize,
    pub seed: u64,
}

impl Default for LobpcgOptions {
    fn default() -> Self {
        Self {
            tol: EIG_TOL,
            max_iter: 1000,
            guard: GUARD_VECTORS,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LobpcgResult {
    pub eigenvalues: Vec<f64>,
    pub vectors: DMatrix<f64>,
    pub iterations: usize,
}

/// Modified Gram-Schmidt (two passes) that drops numerically dependent columns.
fn orthonormalize(s: &DMatrix<f64>, drop_tol: f64) -> DMatrix<f64> {
    let mut kept: Vec<nalgebra::DVector<f64>> = Vec::new();
    for j in 0..s.ncols() {
        let mut v = s.column(j).into_owned();
        let n0 = v.norm();
        if n0 == 0.0 {
            continue;
        }
        for _ in 0..2 {
            for q in &kept {
                let c = q.dot(&v);
                v.axpy(-c, q, 1.0);
            }
        }
        let n = v.norm();
        if n > drop_tol * n0 {
            kept.push(v / n);
        }
    }
    DMatrix::from_columns(&kept)
}

fn sorted_eigen(t: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (t + t.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut idx: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = DMatrix::from_fn(t.nrows(), idx.len(), |i, j| eig.eigenvectors[(i, idx[j])]);
    (vals, vecs)
}

/// Smallest `nev` eigenpairs of the symmetric operator `apply`, iterating a
/// block of `block >= nev` vectors. Only the first `nev` must converge.
pub fn lobpcg<F>(apply: F, n: usize, nev: usize, block: usize, opts: &LobpcgOptions) -> Result<LobpcgResult>
where
    F: Fn(&DMatrix<f64>) -> DMatrix<f64>,
{
    let block = block.min(n).max(nev);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let x0 = DMatrix::from_fn(n, block, |_, _| StandardNormal.sample(&mut rng));
    let mut x = orthonormalize(&x0, 1e-10);
    let (vals, c) = sorted_eigen(&(x.transpose() * apply(&x)));
    x = &x * &c;
    let mut ax = apply(&x);
    let mut lambda = vals;
    let mut p: Option<DMatrix<f64>> = None;
    let mut worst = f64::INFINITY;
    for iter in 0..opts.max_iter {
        let mut r = &ax - &x * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(lambda.clone()));
        worst = (0..nev)
            .map(|j| r.column(j).norm() / lambda[j].abs().max(1.0))
            .fold(0.0, f64::max);
        if worst <= opts.tol {
            return Ok(LobpcgResult {
                eigenvalues: lambda,
                vectors: x,
                iterations: iter,
            });
        }
        // Keep the search directions orthogonal to the current block.
        let proj = x.transpose() * &r;
        r -= &x * proj;
        let mut cols: Vec<nalgebra::DVector<f64>> = x.column_iter().map(|c| c.into_owned()).collect();
        cols.extend(r.column_iter().map(|c| c.into_owned()));
        if let Some(pp) = &p {
            cols.extend(pp.column_iter().map(|c| c.into_owned()));
        }
        let s = orthonormalize(&DMatrix::from_columns(&cols), 1e-10);
        let as_ = apply(&s);
        let (vals, c) = sorted_eigen(&(s.transpose() * &as_));
        let cb = c.columns(0, block).into_owned();
        let xn = &s * &cb;
        // Directions outside the old block become the new conjugate set.
        let mut pn = xn.clone() - &x * (x.transpose() * &xn);
        let pnorm = pn.norm();
        if pnorm > 0.0 {
            pn /= pnorm;
        }
        p = Some(pn);
        ax = &as_ * &cb;
        x = xn;
        lambda = vals[..block].to_vec();
    }
    Err(Error::NotConverged {
        iterations: opts.max_iter,
        residual: worst,
    })
}

/// Truncated nullspace: `rank` is an upper bound on the nullspace dimension.
pub fn nullspace_truncated(c: &ConstraintSet, rank: usize, opts: &LobpcgOptions) -> Result<BasisSet> {
    let m = c.assemble()?;
    let n = m.ncols();
    let prov = Provenance::new(Algorithm::Truncated, opts.tol);
    let block = (rank + opts.guard).min(n);
    let cols = if rank == 0 {
        DMatrix::zeros(n, 0)
    } else if 3 * block >= n {
        nullspace_of(&m, NullspaceOptions::default())?
    } else {
        let mt = m.transpose();
        let res = lobpcg(|x| &mt * (&m * x), n, rank, block, opts)?;
        let keep: Vec<_> = res
            .vectors
            .column_iter()
            .filter(|v| (&m * v).norm() <= KEEP_TOL)
            .map(|v| v.into_owned())
            .collect();
        orthonormalize(&DMatrix::from_columns(&keep), 1e-6)
    };
    let cols = if cols.ncols() == 0 { DMatrix::zeros(n, 0) } else { cols };
    BasisSet::from_columns(c.order(), c.dim(), &cols, prov)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_operator_smallest_pairs() {
        let n = 60;
        let d: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
        let apply = |x: &DMatrix<f64>| DMatrix::from_fn(n, x.ncols(), |i, j| d[i] * x[(i, j)]);
        let res = lobpcg(apply, n, 3, 6, &LobpcgOptions::default()).unwrap();
        for (k, v) in res.eigenvalues[..3].iter().enumerate() {
            assert!((v - 0.5 * k as f64).abs() < 1e-9, "{v}");
        }
    }

    #[test]
    fn nonconvergence_is_reported() {
        let n = 80;
        let apply = |x: &DMatrix<f64>| DMatrix::from_fn(n, x.ncols(), |i, j| (1.0 + i as f64) * x[(i, j)]);
        let opts = LobpcgOptions {
            max_iter: 1,
            ..Default::default()
        };
        assert!(matches!(lobpcg(apply, n, 2, 4, &opts), Err(Error::NotConverged { .. })));
    }
}
