//! Sparsest single element of a span: minimize `‖B‖₁` subject to
//! `‖B‖_∞ = 1` by fixing one component to 1 and solving a convex LP for
//! each candidate pivot.

use std::cmp::Ordering;

use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::DMatrix;

use super::basis::{display_normalize, sparsity_cmp, BasisSet, NNZ_TOL};
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

const L1_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SparsifiedTensor {
    pub tensor: DenseTensor,
    pub nnz: usize,
    pub l1: f64,
    /// Flat index of the component fixed to 1 in the winning LP.
    pub pivot: usize,
}

impl SparsifiedTensor {
    fn from_tensor(t: DenseTensor, pivot: usize) -> Self {
        let mut t = display_normalize(&t);
        for v in t.as_mut_slice() {
            if v.abs() <= 1e-10 {
                *v = 0.0;
            }
        }
        let l1 = t.as_slice().iter().map(|v| v.abs()).sum();
        Self {
            nnz: t.nnz(NNZ_TOL),
            l1,
            tensor: t,
            pivot,
        }
    }
}

/// Lower L1 first (within a relative tie band), then fewer nonzeros, then
/// lexicographically smaller support.
pub fn candidate_cmp(a: &SparsifiedTensor, b: &SparsifiedTensor) -> Ordering {
    let band = L1_TIE * a.l1.max(b.l1).max(1.0);
    if (a.l1 - b.l1).abs() > band {
        return a.l1.total_cmp(&b.l1);
    }
    sparsity_cmp(&a.tensor, &b.tensor)
}

/// Rows of `a` grouped up to sign; returns `(representative, multiplicity)`.
fn row_classes(a: &DMatrix<f64>) -> Vec<(usize, usize)> {
    let scale = a.abs().max().max(1e-300);
    let tol = 1e-10 * scale;
    let mut classes: Vec<(usize, usize)> = Vec::new();
    'rows: for i in 0..a.nrows() {
        let row = a.row(i);
        if row.amax() <= tol {
            continue;
        }
        for (rep, count) in classes.iter_mut() {
            let r = a.row(*rep);
            if (row - r).amax() <= tol || (row + r).amax() <= tol {
                *count += 1;
                continue 'rows;
            }
        }
        classes.push((i, 1));
    }
    classes
}

fn solve_pivot(a: &DMatrix<f64>, classes: &[(usize, usize)], pivot: usize) -> Result<Vec<f64>> {
    let k = a.ncols();
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let c: Vec<_> = (0..k)
        .map(|_| lp.add_var(0.0, (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    for &(rep, mult) in classes {
        let u = lp.add_var(mult as f64, (0.0, 1.0));
        let mut expr: Vec<_> = (0..k)
            .filter(|&l| a[(rep, l)] != 0.0)
            .map(|l| (c[l], a[(rep, l)]))
            .collect();
        if rep == pivot {
            lp.add_constraint(expr.clone(), ComparisonOp::Eq, 1.0);
        }
        expr.push((u, -1.0));
        lp.add_constraint(expr.clone(), ComparisonOp::Le, 0.0);
        let last = expr.len() - 1;
        expr[last].1 = 1.0;
        lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
    }
    let sol = lp.solve().map_err(|e| Error::Lp(format!("{e:?}")))?;
    let coeffs = nalgebra::DVector::from_iterator(k, c.iter().map(|v| *sol.var_value(*v)));
    Ok((a * coeffs).as_slice().to_vec())
}

/// One LP optimum per distinct pivot class, best first.
pub fn sparse_candidates(elements: &[DenseTensor]) -> Result<Vec<SparsifiedTensor>> {
    let first = elements.first().ok_or(Error::EmptyBasis)?;
    let (order, dim) = (first.order(), first.dim());
    let mut a = DMatrix::zeros(first.len(), elements.len());
    for (j, e) in elements.iter().enumerate() {
        if e.order() != order || e.dim() != dim {
            return Err(Error::Shape {
                expected: format!("order {order} dim {dim}"),
                found: format!("order {} dim {}", e.order(), e.dim()),
            });
        }
        a.column_mut(j).copy_from_slice(e.as_slice());
    }
    let classes = row_classes(&a);
    let mut out = Vec::with_capacity(classes.len());
    for &(rep, _) in &classes {
        let t = DenseTensor::from_vec(order, dim, solve_pivot(&a, &classes, rep)?)?;
        out.push(SparsifiedTensor::from_tensor(t, rep));
    }
    if out.is_empty() {
        return Err(Error::EmptyBasis);
    }
    out.sort_by(candidate_cmp);
    Ok(out)
}

pub fn sparsify_elements(elements: &[DenseTensor]) -> Result<SparsifiedTensor> {
    Ok(sparse_candidates(elements)?.remove(0))
}

pub fn sparsify_single(basis: &BasisSet) -> Result<SparsifiedTensor> {
    sparsify_elements(&basis.elements)
}

/// Best candidate accepted by `keep`, e.g. an exclusivity filter.
pub fn sparsify_filtered<F>(elements: &[DenseTensor], mut keep: F) -> Result<Option<SparsifiedTensor>>
where
    F: FnMut(&DenseTensor) -> Result<bool>,
{
    for cand in sparse_candidates(elements)? {
        if keep(&cand.tensor)? {
            return Ok(Some(cand));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scaled_identity_becomes_identity() {
        let i = DenseTensor::identity(3).scale(1.0 / 3f64.sqrt());
        let s = sparsify_elements(&[i]).unwrap();
        assert_eq!(s.nnz, 3);
        assert!(s.tensor.max_abs_diff(&DenseTensor::identity(3)).unwrap() < 1e-12);
    }

    #[test]
    fn picks_sparsest_combination() {
        // span{e1 + e2, e2 + e3}: e1+e2, e1-e3 and e2+e3 all have L1 = 2
        let a = DenseTensor::from_vec(1, 3, vec![1.0, 1.0, 0.0]).unwrap();
        let b = DenseTensor::from_vec(1, 3, vec![0.0, 1.0, 1.0]).unwrap();
        let s = sparsify_elements(&[a.scale(0.3).add(&b).unwrap(), b.scale(-2.0)]).unwrap();
        assert_eq!(s.nnz, 2);
        assert!((s.l1 - 2.0).abs() < 1e-9);
        let want = DenseTensor::from_vec(1, 3, vec![1.0, 1.0, 0.0]).unwrap();
        assert!(s.tensor.max_abs_diff(&want).unwrap() < 1e-9);
    }

    #[test]
    fn empty_basis_is_an_error() {
        assert!(matches!(sparsify_elements(&[]), Err(Error::EmptyBasis)));
    }
}
