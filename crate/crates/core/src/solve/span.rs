use nalgebra::{DMatrix, DVector};

use super::rrqr::pivoted_qr;
use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

pub const SPAN_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct SpanCheck {
    pub inside: bool,
    /// `‖t - Σ c_a b_a‖ / ‖t‖`
    pub residual: f64,
    pub coefficients: Vec<f64>,
}

fn as_matrix(basis: &[DenseTensor], t: &DenseTensor) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(t.len(), basis.len());
    for (j, b) in basis.iter().enumerate() {
        if b.order() != t.order() || b.dim() != t.dim() {
            return Err(Error::Shape {
                expected: format!("order {} dim {}", t.order(), t.dim()),
                found: format!("order {} dim {}", b.order(), b.dim()),
            });
        }
        m.column_mut(j).copy_from_slice(b.as_slice());
    }
    Ok(m)
}

/// Least-squares membership of `t` in the span of `basis`.
pub fn in_span(basis: &[DenseTensor], t: &DenseTensor, tol: f64) -> Result<SpanCheck> {
    let a = as_matrix(basis, t)?;
    let tn = t.norm();
    if tn == 0.0 {
        return Ok(SpanCheck {
            inside: true,
            residual: 0.0,
            coefficients: vec![0.0; basis.len()],
        });
    }
    if basis.is_empty() {
        return Ok(SpanCheck {
            inside: false,
            residual: 1.0,
            coefficients: vec![],
        });
    }
    let b = DVector::from_column_slice(t.as_slice());
    let qr = pivoted_qr(&a, 1e-12);
    let proj = &qr.q * (qr.q.transpose() * &b);
    let residual = (&b - &proj).norm() / tn;
    let coefficients = a
        .svd(true, true)
        .solve(&proj, 1e-12)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?
        .iter()
        .copied()
        .collect();
    Ok(SpanCheck {
        inside: residual <= tol,
        residual,
        coefficients,
    })
}

/// Largest relative residual of any element of `a` against span(`b`).
pub fn max_span_residual(a: &[DenseTensor], b: &[DenseTensor]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in a {
        worst = worst.max(in_span(b, t, 0.0)?.residual);
    }
    Ok(worst)
}

/// Bidirectional containment.
pub fn spans_equal(a: &[DenseTensor], b: &[DenseTensor], tol: f64) -> Result<bool> {
    Ok(max_span_residual(a, b)? <= tol && max_span_residual(b, a)? <= tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_unit_is_outside() {
        let e11 = DenseTensor::unit(3, &[0, 0]).unwrap();
        let e22 = DenseTensor::unit(3, &[1, 1]).unwrap();
        let c = in_span(&[e22], &e11, SPAN_TOL).unwrap();
        assert!(!c.inside);
        assert!((c.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn combination_is_inside_with_coefficients() {
        let a = DenseTensor::unit(3, &[0, 1]).unwrap();
        let b = DenseTensor::unit(3, &[1, 0]).unwrap().add(&a).unwrap();
        let t = a.scale(2.0).add(&b.scale(-3.0)).unwrap();
        let c = in_span(&[a, b], &t, SPAN_TOL).unwrap();
        assert!(c.inside);
        assert!((c.coefficients[0] - 2.0).abs() < 1e-12);
        assert!((c.coefficients[1] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn zero_tensor_is_always_inside() {
        let z = DenseTensor::zeros(2, 3);
        let c = in_span(&[], &z, SPAN_TOL).unwrap();
        assert!(c.inside && c.coefficients.is_empty());
    }
}
