//! Dense real tensors of order `n` over `R^d`.
//!
//! Components are stored row-major: the flat position of `(i_0, .., i_{n-1})`
//! is `sum_k i_k d^(n-1-k)`, so the last index varies fastest.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groups::OrthogonalMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IndexOrder {
    #[default]
    RowMajor,
    ColumnMajor,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseTensor {
    order: usize,
    dim: usize,
    data: Vec<f64>,
}

fn shape_err(expected: impl ToString, found: impl ToString) -> Error {
    Error::Shape {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

impl DenseTensor {
    pub fn zeros(order: usize, dim: usize) -> Self {
        Self {
            order,
            dim,
            data: vec![0.0; dim.pow(order as u32)],
        }
    }

    pub fn from_vec(order: usize, dim: usize, data: Vec<f64>) -> Result<Self> {
        let len = dim.pow(order as u32);
        if data.len() != len {
            return Err(shape_err(
                format!("{len} components (d={dim}, n={order})"),
                data.len(),
            ));
        }
        Ok(Self { order, dim, data })
    }

    pub fn scalar(value: f64) -> Self {
        Self {
            order: 0,
            dim: 1,
            data: vec![value],
        }
    }

    /// The unit tensor `e_{i_0} ⊗ .. ⊗ e_{i_{n-1}}` (0-based indices).
    pub fn unit(dim: usize, index: &[usize]) -> Result<Self> {
        let mut t = Self::zeros(index.len(), dim);
        let f = t.flat_index(index)?;
        t.data[f] = 1.0;
        Ok(t)
    }

    /// Builds a tensor from sparse `(multi-index, value)` pairs, 0-based.
    pub fn from_entries(order: usize, dim: usize, entries: &[(Vec<usize>, f64)]) -> Result<Self> {
        let mut t = Self::zeros(order, dim);
        for (idx, v) in entries {
            if idx.len() != order {
                return Err(shape_err(format!("{order} indices"), idx.len()));
            }
            let f = t.flat_index(idx)?;
            t.data[f] += v;
        }
        Ok(t)
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(2, dim);
        for i in 0..dim {
            t.data[i * dim + i] = 1.0;
        }
        t
    }

    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(shape_err("square matrix", format!("{}x{}", m.nrows(), m.ncols())));
        }
        let d = m.nrows();
        let mut t = Self::zeros(2, d);
        for i in 0..d {
            for j in 0..d {
                t.data[i * d + j] = m[(i, j)];
            }
        }
        Ok(t)
    }

    pub fn to_matrix(&self) -> Result<DMatrix<f64>> {
        if self.order != 2 {
            return Err(shape_err("order 2", self.order));
        }
        Ok(DMatrix::from_row_slice(self.dim, self.dim, &self.data))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn flat_index(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.order {
            return Err(shape_err(format!("{} indices", self.order), index.len()));
        }
        let mut f = 0;
        for &i in index {
            if i >= self.dim {
                return Err(shape_err(format!("index < {}", self.dim), i));
            }
            f = f * self.dim + i;
        }
        Ok(f)
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        multi_index(flat, self.order, self.dim)
    }

    pub fn get(&self, index: &[usize]) -> Result<f64> {
        Ok(self.data[self.flat_index(index)?])
    }

    pub fn set(&mut self, index: &[usize], value: f64) -> Result<()> {
        let f = self.flat_index(index)?;
        self.data[f] = value;
        Ok(())
    }

    pub fn vectorize(&self) -> Vec<f64> {
        self.data.clone()
    }

    pub fn vectorize_with(&self, order: IndexOrder) -> Vec<f64> {
        match order {
            IndexOrder::RowMajor => self.data.clone(),
            IndexOrder::ColumnMajor => {
                let mut out = vec![0.0; self.data.len()];
                for (f, &v) in self.data.iter().enumerate() {
                    out[reversed_flat(f, self.order, self.dim)] = v;
                }
                out
            }
        }
    }

    pub fn devectorize(v: &[f64], order: usize, dim: usize) -> Result<Self> {
        Self::from_vec(order, dim, v.to_vec())
    }

    pub fn devectorize_with(v: &[f64], order: usize, dim: usize, layout: IndexOrder) -> Result<Self> {
        let mut t = Self::from_vec(order, dim, v.to_vec())?;
        if layout == IndexOrder::ColumnMajor {
            for f in 0..v.len() {
                t.data[f] = v[reversed_flat(f, order, dim)];
            }
        }
        Ok(t)
    }

    /// `g ⊠ t`: the matrix `g` applied to every slot.
    pub fn group_action(&self, g: &OrthogonalMatrix) -> Result<Self> {
        self.transform(g.matrix())
    }

    /// Applies an arbitrary square matrix to every slot.
    pub fn transform(&self, m: &DMatrix<f64>) -> Result<Self> {
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(shape_err(
                format!("{0}x{0} matrix", self.dim),
                format!("{}x{}", m.nrows(), m.ncols()),
            ));
        }
        let mut cur = self.data.clone();
        let mut next = vec![0.0; cur.len()];
        for mode in 0..self.order {
            mode_product(&cur, &mut next, m, self.order, self.dim, mode);
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data: cur,
        })
    }

    /// `out[i_perm(0), .., i_perm(n-1)] = sign * t[i_0, .., i_{n-1}]`.
    pub fn permute_indices(&self, perm: &[usize], sign: f64) -> Result<Self> {
        check_permutation(perm, self.order)?;
        let mut out = vec![0.0; self.data.len()];
        let mut idx = vec![0; self.order];
        let mut jdx = vec![0; self.order];
        for (f, &v) in self.data.iter().enumerate() {
            fill_multi_index(f, self.dim, &mut idx);
            for (p, &q) in perm.iter().enumerate() {
                jdx[p] = idx[q];
            }
            out[flat(&jdx, self.dim)] = sign * v;
        }
        Ok(Self {
            order: self.order,
            dim: self.dim,
            data: out,
        })
    }

    /// Contracts slots `a` and `b`, producing an order `n-2` tensor.
    pub fn trace_contract(&self, a: usize, b: usize) -> Result<Self> {
        if a == b || a >= self.order || b >= self.order {
            return Err(Error::InvalidAxes(a, b, self.order));
        }
        let n = self.order - 2;
        let mut out = Self::zeros(n, self.dim);
        let mut idx = vec![0; self.order];
        for (f, &v) in self.data.iter().enumerate() {
            fill_multi_index(f, self.dim, &mut idx);
            if idx[a] != idx[b] {
                continue;
            }
            let mut g = 0;
            for (k, &i) in idx.iter().enumerate() {
                if k != a && k != b {
                    g = g * self.dim + i;
                }
            }
            out.data[g] += v;
        }
        Ok(out)
    }

    pub fn inner(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn nnz(&self, tol: f64) -> usize {
        self.data.iter().filter(|v| v.abs() > tol).count()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            order: self.order,
            dim: self.dim,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &Self) -> Result<()> {
        self.check_same(x)?;
        for (s, v) in self.data.iter_mut().zip(&x.data) {
            *s += a * v;
        }
        Ok(())
    }

    pub fn outer(&self, other: &Self) -> Result<Self> {
        if self.order > 0 && other.order > 0 && self.dim != other.dim {
            return Err(shape_err(format!("dim {}", self.dim), other.dim));
        }
        let dim = if self.order == 0 { other.dim } else { self.dim };
        let mut data = Vec::with_capacity(self.data.len() * other.data.len());
        for a in &self.data {
            data.extend(other.data.iter().map(|b| a * b));
        }
        Ok(Self {
            order: self.order + other.order,
            dim,
            data,
        })
    }

    /// Full contraction `self : other` over the trailing slots of `self`.
    pub fn contract_trailing(&self, other: &Self) -> Result<Self> {
        if other.order > self.order || (other.order > 0 && other.dim != self.dim) {
            return Err(shape_err(
                format!("at most order {} over dim {}", self.order, self.dim),
                format!("order {} over dim {}", other.order, other.dim),
            ));
        }
        let m = other.data.len();
        let rows = self.data.len() / m;
        let data = (0..rows)
            .map(|r| {
                self.data[r * m..(r + 1) * m]
                    .iter()
                    .zip(&other.data)
                    .map(|(a, b)| a * b)
                    .sum()
            })
            .collect();
        Ok(Self {
            order: self.order - other.order,
            dim: self.dim,
            data,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Nonzero entries as `(0-based multi-index, value)` in flat order.
    pub fn entries(&self, tol: f64) -> Vec<(Vec<usize>, f64)> {
        self.data
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > tol)
            .map(|(f, &v)| (self.multi_index(f), v))
            .collect()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.order != other.order || self.dim != other.dim {
            return Err(shape_err(
                format!("order {} dim {}", self.order, self.dim),
                format!("order {} dim {}", other.order, other.dim),
            ));
        }
        Ok(())
    }
}

pub(crate) fn check_permutation(perm: &[usize], order: usize) -> Result<()> {
    if perm.len() != order {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    let mut seen = vec![false; order];
    for &p in perm {
        if p >= order || seen[p] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

pub(crate) fn multi_index(flat: usize, order: usize, dim: usize) -> Vec<usize> {
    let mut idx = vec![0; order];
    fill_multi_index(flat, dim, &mut idx);
    idx
}

fn fill_multi_index(mut flat: usize, dim: usize, idx: &mut [usize]) {
    for slot in idx.iter_mut().rev() {
        *slot = flat % dim;
        flat /= dim;
    }
}

fn flat(idx: &[usize], dim: usize) -> usize {
    idx.iter().fold(0, |f, &i| f * dim + i)
}

fn reversed_flat(f: usize, order: usize, dim: usize) -> usize {
    let idx = multi_index(f, order, dim);
    idx.iter().rev().fold(0, |g, &i| g * dim + i)
}

fn mode_product(src: &[f64], dst: &mut [f64], m: &DMatrix<f64>, order: usize, dim: usize, mode: usize) {
    let stride = dim.pow((order - 1 - mode) as u32);
    for (f, out) in dst.iter_mut().enumerate() {
        let a = (f / stride) % dim;
        let base = f - a * stride;
        let mut s = 0.0;
        for i in 0..dim {
            s += m[(a, i)] * src[base + i * stride];
        }
        *out = s;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot_z(theta: f64) -> OrthogonalMatrix {
        OrthogonalMatrix::rotation(&[0.0, 0.0, 1.0], theta).unwrap()
    }

    #[test]
    fn row_major_layout() {
        let t = DenseTensor::unit(3, &[1, 2, 0]).unwrap();
        assert_eq!(t.as_slice()[9 + 6], 1.0);
        assert_eq!(t.multi_index(15), vec![1, 2, 0]);
    }

    #[test]
    fn column_major_roundtrip() {
        let t = DenseTensor::from_vec(3, 2, (0..8).map(f64::from).collect()).unwrap();
        let v = t.vectorize_with(IndexOrder::ColumnMajor);
        // (1,0,0) sits at flat 4 row-major and 1 column-major
        assert_eq!(v[1], 4.0);
        let back = DenseTensor::devectorize_with(&v, 3, 2, IndexOrder::ColumnMajor).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn devectorize_checks_length() {
        assert!(DenseTensor::devectorize(&[0.0; 80], 4, 3).is_err());
    }

    #[test]
    fn action_on_vector_matches_matrix_product() {
        let g = rot_z(0.3);
        let v = DenseTensor::from_vec(1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let w = v.group_action(&g).unwrap();
        let m = g.matrix();
        for a in 0..3 {
            let expect: f64 = (0..3).map(|i| m[(a, i)] * v.as_slice()[i]).sum();
            assert!((w.as_slice()[a] - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn action_on_order_two_is_conjugation() {
        let g = rot_z(1.1);
        let a = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 0.5, -1.0, 0.0, 3.0, 2.0, 2.0, -4.0]);
        let t = DenseTensor::from_matrix(&a).unwrap();
        let expect = g.matrix() * &a * g.matrix().transpose();
        let got = t.group_action(&g).unwrap().to_matrix().unwrap();
        assert!((got - expect).abs().max() < 1e-13);
    }

    #[test]
    fn permutation_moves_slots() {
        let t = DenseTensor::unit(3, &[0, 1, 2]).unwrap();
        let p = t.permute_indices(&[2, 0, 1], -1.0).unwrap();
        assert_eq!(p.get(&[2, 0, 1]).unwrap(), -1.0);
        assert_eq!(p.norm(), 1.0);
        assert!(t.permute_indices(&[0, 0, 1], 1.0).is_err());
    }

    #[test]
    fn trace_of_identity_outer() {
        let i = DenseTensor::identity(3);
        let ii = i.outer(&i).unwrap();
        let tr = ii.trace_contract(0, 1).unwrap();
        assert_eq!(tr.order(), 2);
        assert_eq!(tr.max_abs_diff(&i.scale(3.0)).unwrap(), 0.0);
        let tr2 = ii.trace_contract(1, 2).unwrap();
        assert_eq!(tr2.max_abs_diff(&i).unwrap(), 0.0);
        assert!(ii.trace_contract(1, 1).is_err());
    }

    #[test]
    fn contract_trailing_is_double_dot() {
        let i = DenseTensor::identity(3);
        let ii = i.outer(&i).unwrap();
        let e = DenseTensor::from_vec(2, 3, vec![1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]).unwrap();
        let out = ii.contract_trailing(&e).unwrap();
        assert_eq!(out.max_abs_diff(&i.scale(6.0)).unwrap(), 0.0);
    }
}
