//! Brute-force dimension oracle: the rank of the dense Reynolds projector
//! on the ambient tensor space, built from the full list of group
//! elements rather than from generators or eigenvalues.
//!
//! Sampled groups are replaced by finite stand-ins with the same invariants
//! at the orders used here: the dihedral group of order 26 for the
//! transverse class (exact for ambient order < 13) and the icosahedral
//! rotation group for the isotropic class (exact while the space has no
//! angular-momentum-6 component, which covers order ≤ 5 and A²(S³)).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupSpec, OrthogonalMatrix};
use crate::solve::nullspace::svd_right;
use crate::spaces::SpaceSpec;
use crate::tensor::multi_index;

const DIHEDRAL_N: usize = 13;

pub fn icosahedral_rotations() -> Result<FiniteGroup> {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let n = (1.0 + phi * phi).sqrt();
    let cyc = OrthogonalMatrix::from_row_slice(3, &[0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0])?;
    let flip = OrthogonalMatrix::from_row_slice(3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0])?;
    let five = OrthogonalMatrix::rotation(&[0.0, 1.0 / n, phi / n], 2.0 * std::f64::consts::PI / 5.0)?;
    FiniteGroup::from_generators("icosahedral", &[cyc, flip, five], 200)
}

/// The closed group, or a finite stand-in for a sampled class.
pub fn stand_in(group: &GroupSpec) -> Result<FiniteGroup> {
    if group.finite_hint {
        return group.close();
    }
    match group.name.as_str() {
        "transverse" => {
            let gens = [
                OrthogonalMatrix::axis_rotation(0, std::f64::consts::PI),
                OrthogonalMatrix::axis_rotation(2, 2.0 * std::f64::consts::PI / DIHEDRAL_N as f64),
            ];
            FiniteGroup::from_generators("dihedral", &gens, 1000)
        }
        "isotropic" => icosahedral_rotations(),
        other => Err(Error::InfiniteGroup(other.to_string())),
    }
}

/// `(1/|G|) Σ g⊗..⊗g` on the ambient space of `space`.
fn group_projector(group: &FiniteGroup, order: usize, dim: usize) -> DMatrix<f64> {
    let n = dim.pow(order as u32);
    let idx: Vec<Vec<usize>> = (0..n).map(|f| multi_index(f, order, dim)).collect();
    let mut p = DMatrix::zeros(n, n);
    for g in group.elements() {
        let m = g.matrix();
        for (i, ii) in idx.iter().enumerate() {
            for (j, jj) in idx.iter().enumerate() {
                let mut v = 1.0;
                for (a, b) in ii.iter().zip(jj) {
                    v *= m[(*a, *b)];
                    if v == 0.0 {
                        break;
                    }
                }
                p[(i, j)] += v;
            }
        }
    }
    p / group.order() as f64
}

/// Averages the signed slot permutations that define the space.
fn space_projector(space: &SpaceSpec) -> DMatrix<f64> {
    let (order, dim) = (space.ambient_order(), space.base_dim());
    let n = space.ambient_len();
    let perms = space.symmetry_group();
    let mut p = DMatrix::zeros(n, n);
    for h in &perms {
        for j in 0..n {
            let jj = multi_index(j, order, dim);
            let target = h.perm.iter().fold(0, |f, &q| f * dim + jj[q]);
            p[(target, j)] += h.sign;
        }
    }
    p / perms.len() as f64
}

fn range_basis(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (s, v) = svd_right(p)?;
    let rank = s.iter().filter(|x| **x > 0.5).count();
    Ok(v.columns(0, rank).into_owned())
}

/// Dimension of the invariant subspace of `space` with the given trace
/// conditions, from projector ranks.
pub fn reynolds_rank(group: &FiniteGroup, space: &SpaceSpec, traces: &[(usize, usize)]) -> Result<usize> {
    let (order, dim) = (space.ambient_order(), space.base_dim());
    let p = group_projector(group, order, dim) * space_projector(space);
    let q = range_basis(&p)?;
    if traces.is_empty() || q.ncols() == 0 {
        return Ok(q.ncols());
    }
    let n = space.ambient_len();
    let rows_per = dim.pow(order as u32 - 2);
    let mut t = DMatrix::zeros(rows_per * traces.len(), n);
    for (b, &(x, y)) in traces.iter().enumerate() {
        for j in 0..n {
            let jj = multi_index(j, order, dim);
            if jj[x] == jj[y] {
                let row = jj
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != x && *k != y)
                    .fold(0, |f, (_, &i)| f * dim + i);
                t[(b * rows_per + row, j)] = 1.0;
            }
        }
    }
    let tq = t * &q;
    let (s, _) = svd_right(&tq)?;
    let rank = s.iter().filter(|v| **v > 1e-8).count();
    Ok(q.ncols() - rank)
}

pub fn oracle_dimension(group: &GroupSpec, space: &SpaceSpec, traces: &[(usize, usize)]) -> Result<usize> {
    reynolds_rank(&stand_in(group)?, space, traces)
}
