use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::groups::OrthogonalMatrix;
use crate::spaces::{SignedPermutation, SpaceSpec};
use crate::tensor::{multi_index, DenseTensor};

/// Homogeneous linear conditions on order-`n` tensors over `R^d`.
#[derive(Debug, Clone)]
pub struct ConstraintSet {
    order: usize,
    dim: usize,
    pub equivariance: Vec<OrthogonalMatrix>,
    pub transpositions: Vec<SignedPermutation>,
    /// Slot pairs whose contraction must vanish.
    pub traces: Vec<(usize, usize)>,
}

impl ConstraintSet {
    pub fn new(order: usize, dim: usize) -> Self {
        Self {
            order,
            dim,
            equivariance: Vec::new(),
            transpositions: Vec::new(),
            traces: Vec::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient_len(&self) -> usize {
        self.dim.pow(self.order as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.equivariance.is_empty() && self.transpositions.is_empty() && self.traces.is_empty()
    }

    pub fn with_generators(mut self, gens: &[OrthogonalMatrix]) -> Result<Self> {
        for g in gens {
            if g.dim() != self.dim {
                return Err(Error::Shape {
                    expected: format!("{0}x{0} generator", self.dim),
                    found: format!("{0}x{0}", g.dim()),
                });
            }
            self.equivariance.push(g.clone());
        }
        Ok(self)
    }

    pub fn with_space(mut self, space: &SpaceSpec) -> Result<Self> {
        if space.ambient_order() != self.order || space.base_dim() != self.dim {
            return Err(Error::Shape {
                expected: format!("order {} dim {}", self.order, self.dim),
                found: format!("space {space}"),
            });
        }
        self.transpositions.extend(space.symmetry_generators());
        Ok(self)
    }

    pub fn with_transposition(mut self, p: SignedPermutation) -> Result<Self> {
        if p.perm.len() != self.order {
            return Err(Error::InvalidPermutation(p.perm));
        }
        self.transpositions.push(p);
        Ok(self)
    }

    pub fn with_trace(mut self, a: usize, b: usize) -> Result<Self> {
        if a == b || a >= self.order || b >= self.order {
            return Err(Error::InvalidAxes(a, b, self.order));
        }
        self.traces.push((a, b));
        Ok(self)
    }

    /// Dense constraint matrix with one column per flat tensor component.
    pub fn assemble(&self) -> Result<DMatrix<f64>> {
        if self.is_empty() {
            return Err(Error::EmptyConstraints);
        }
        let n = self.ambient_len();
        let gens: Vec<&OrthogonalMatrix> = self
            .equivariance
            .iter()
            .filter(|g| g.distance(&OrthogonalMatrix::identity(self.dim)) > 1e-14)
            .collect();
        let trace_rows = if self.order >= 2 {
            self.dim.pow(self.order as u32 - 2)
        } else {
            0
        };
        let rows = (gens.len() + self.transpositions.len()) * n + self.traces.len() * trace_rows;
        let mut m = DMatrix::zeros(rows, n);
        let idx: Vec<Vec<usize>> = (0..n).map(|f| multi_index(f, self.order, self.dim)).collect();
        let mut r0 = 0;
        for g in gens {
            let gm = g.matrix();
            for (i, ii) in idx.iter().enumerate() {
                for (j, jj) in idx.iter().enumerate() {
                    let mut v = 1.0;
                    for (a, b) in ii.iter().zip(jj) {
                        v *= gm[(*a, *b)];
                        if v == 0.0 {
                            break;
                        }
                    }
                    m[(r0 + i, j)] = v;
                }
                m[(r0 + i, i)] -= 1.0;
            }
            r0 += n;
        }
        for p in &self.transpositions {
            for (j, jj) in idx.iter().enumerate() {
                let target = p.perm.iter().fold(0, |f, &q| f * self.dim + jj[q]);
                m[(r0 + target, j)] += p.sign;
                m[(r0 + j, j)] -= 1.0;
            }
            r0 += n;
        }
        for &(a, b) in &self.traces {
            for (j, jj) in idx.iter().enumerate() {
                if jj[a] != jj[b] {
                    continue;
                }
                let row = jj
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != a && *k != b)
                    .fold(0, |f, (_, &i)| f * self.dim + i);
                m[(r0 + row, j)] = 1.0;
            }
            r0 += trace_rows;
        }
        Ok(m)
    }

    /// `‖M vec(t)‖` evaluated directly from the constraint definitions.
    pub fn residual(&self, t: &DenseTensor) -> Result<f64> {
        if t.order() != self.order || t.dim() != self.dim {
            return Err(Error::Shape {
                expected: format!("order {} dim {}", self.order, self.dim),
                found: format!("order {} dim {}", t.order(), t.dim()),
            });
        }
        let mut sq = 0.0;
        for g in &self.equivariance {
            sq += t.group_action(g)?.sub(t)?.norm().powi(2);
        }
        for p in &self.transpositions {
            sq += p.apply(t)?.sub(t)?.norm().powi(2);
        }
        for &(a, b) in &self.traces {
            sq += t.trace_contract(a, b)?.norm().powi(2);
        }
        Ok(sq.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rank(m: &DMatrix<f64>) -> usize {
        m.clone().svd(false, false).singular_values.iter().filter(|s| **s > 1e-10).count()
    }

    #[test]
    fn identity_generator_gives_no_rows() {
        let c = ConstraintSet::new(2, 3)
            .with_generators(&[OrthogonalMatrix::identity(3)])
            .unwrap();
        assert_eq!(c.assemble().unwrap().nrows(), 0);
        assert!(matches!(ConstraintSet::new(2, 3).assemble(), Err(Error::EmptyConstraints)));
    }

    #[test]
    fn swap_rows_have_rank_one_for_two_by_two() {
        let c = ConstraintSet::new(2, 2)
            .with_transposition(SignedPermutation::new(vec![1, 0], 1.0).unwrap())
            .unwrap();
        let m = c.assemble().unwrap();
        assert_eq!(rank(&m), 1);
        let sym = DenseTensor::from_vec(2, 2, vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        assert!((&m * nalgebra::DVector::from_vec(sym.vectorize())).norm() < 1e-15);
    }

    #[test]
    fn trace_row_is_vectorized_identity() {
        let c = ConstraintSet::new(2, 3).with_trace(0, 1).unwrap();
        let m = c.assemble().unwrap();
        assert_eq!(m.nrows(), 1);
        let row: Vec<f64> = m.row(0).iter().copied().collect();
        assert_eq!(row, DenseTensor::identity(3).vectorize());
    }

    #[test]
    fn matrix_agrees_with_direct_residual() {
        let g = OrthogonalMatrix::rotation(&[0.0, 0.6, 0.8], 0.7).unwrap();
        let c = ConstraintSet::new(3, 3)
            .with_generators(&[g])
            .unwrap()
            .with_space(&SpaceSpec::parse("T3(R3)").unwrap())
            .unwrap()
            .with_transposition(SignedPermutation::new(vec![2, 1, 0], -1.0).unwrap())
            .unwrap()
            .with_trace(0, 2)
            .unwrap();
        let t = DenseTensor::from_vec(3, 3, (0..27).map(|i| ((i * 7) % 5) as f64 - 2.0).collect()).unwrap();
        let m = c.assemble().unwrap();
        let via_matrix = (&m * nalgebra::DVector::from_vec(t.vectorize())).norm();
        assert!((via_matrix - c.residual(&t).unwrap()).abs() < 1e-12);
    }
}
