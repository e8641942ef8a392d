//! Mechanics presets: canonical fourth-order tensors, elastic-modulus and
//! yield-tensor constraint bundles, structure-tensor bases and the joint
//! invariants of a strain-like tensor with a fourth-order structure tensor.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::groups::{Convention, GroupSpec};
use crate::solve::{invariant_basis, BasisSet, ConstraintSet, SolveOptions};
use crate::spaces::SpaceSpec;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CanonicalName {
    II,
    JJ,
    KK,
    Oh,
    D4h,
}

impl CanonicalName {
    pub const ALL: [CanonicalName; 5] = [
        CanonicalName::II,
        CanonicalName::JJ,
        CanonicalName::KK,
        CanonicalName::Oh,
        CanonicalName::D4h,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CanonicalName::II => "II",
            CanonicalName::JJ => "JJ",
            CanonicalName::KK => "KK",
            CanonicalName::Oh => "Oh",
            CanonicalName::D4h => "D4h",
        }
    }
}

impl fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CanonicalName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CanonicalName::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown canonical tensor '{s}'; valid: II, JJ, KK, Oh, D4h")))
    }
}

fn delta(a: usize, b: usize) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// The named fourth-order tensor over `R^3`.
pub fn canonical(name: CanonicalName) -> DenseTensor {
    let mut t = DenseTensor::zeros(4, 3);
    for f in 0..81 {
        let idx = t.multi_index(f);
        let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
        let v = match name {
            CanonicalName::II => delta(i, j) * delta(k, l),
            CanonicalName::JJ => delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k),
            CanonicalName::KK => delta(i, k) * delta(j, l) - delta(i, l) * delta(j, k),
            CanonicalName::Oh => delta(i, j) * delta(j, k) * delta(k, l),
            CanonicalName::D4h => {
                if i.max(j).max(k).max(l) > 1 {
                    0.0
                } else {
                    // Re(i^s) with 1-based indices, s = i + j + k + l
                    match (i + j + k + l + 4) % 4 {
                        0 => 1.0,
                        2 => -1.0,
                        _ => 0.0,
                    }
                }
            }
        };
        t.as_mut_slice()[f] = v;
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConstraintPreset {
    #[default]
    None,
    /// Minor and major symmetries of an elastic modulus.
    Modulus,
    /// Modulus symmetries plus traceless conditions on both index pairs.
    Yield,
}

impl ConstraintPreset {
    pub fn space(&self) -> Option<SpaceSpec> {
        match self {
            ConstraintPreset::None => None,
            _ => Some(SpaceSpec::parse("S2(S2(R3))").expect("valid space")),
        }
    }

    pub fn traces(&self) -> Vec<(usize, usize)> {
        match self {
            ConstraintPreset::Yield => vec![(2, 3), (0, 1)],
            _ => vec![],
        }
    }
}

impl FromStr for ConstraintPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ConstraintPreset::None),
            "modulus" => Ok(ConstraintPreset::Modulus),
            "yield" => Ok(ConstraintPreset::Yield),
            _ => Err(Error::InvalidArgument(format!(
                "unknown preset '{s}'; valid: none, modulus, yield"
            ))),
        }
    }
}

pub fn modulus_constraints(group: &GroupSpec) -> Result<ConstraintSet> {
    let space = ConstraintPreset::Modulus.space().unwrap();
    ConstraintSet::new(4, 3).with_generators(&group.generators)?.with_space(&space)
}

pub fn yield_constraints(group: &GroupSpec) -> Result<ConstraintSet> {
    let mut c = modulus_constraints(group)?;
    for (a, b) in ConstraintPreset::Yield.traces() {
        c = c.with_trace(a, b)?;
    }
    Ok(c)
}

/// Invariant tensors of order `order` (1 to 4) for a catalog group.
pub fn structure_basis(name: &str, convention: Convention, order: usize) -> Result<BasisSet> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidArgument(format!("order must be 1..4, got {order}")));
    }
    let group = GroupSpec::catalog(name, convention)?;
    invariant_basis(&group, &SpaceSpec::tensor_power(order, 3), &[], &SolveOptions::default())
}

/// `(I1, .., I6)`: the principal invariants of `E` and three joint
/// invariants with the structure tensor `A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantVector(pub [f64; 6]);

fn check_inputs(e: &DenseTensor, a: &DenseTensor) -> Result<DMatrix<f64>> {
    if e.order() != 2 || e.dim() != 3 || a.order() != 4 || a.dim() != 3 {
        return Err(Error::Shape {
            expected: "order-2 E and order-4 A over R3".into(),
            found: format!("E order {} dim {}, A order {} dim {}", e.order(), e.dim(), a.order(), a.dim()),
        });
    }
    let m = e.to_matrix()?;
    let asym = (&m - m.transpose()).abs().max();
    if asym > 1e-10 * m.abs().max().max(1.0) {
        return Err(Error::InvalidArgument(format!("E must be symmetric (asymmetry {asym:.3e})")));
    }
    Ok(m)
}

fn quad(a: &DenseTensor, x: &DenseTensor, y: &DenseTensor) -> Result<f64> {
    x.inner(&a.contract_trailing(y)?)
}

pub fn kambouchev_invariants(e: &DenseTensor, a: &DenseTensor) -> Result<InvariantVector> {
    let m = check_inputs(e, a)?;
    let m2 = &m * &m;
    let e2 = DenseTensor::from_matrix(&m2)?;
    let tr = m.trace();
    Ok(InvariantVector([
        tr,
        0.5 * (tr * tr - m2.trace()),
        m.determinant(),
        quad(a, e, e)?,
        quad(a, e, &e2)?,
        quad(a, &e2, &e2)?,
    ]))
}

/// Gradients `∂I_a/∂E` of the invariants, as order-2 tensors.
pub fn kambouchev_basis(e: &DenseTensor, a: &DenseTensor) -> Result<[DenseTensor; 6]> {
    let m = check_inputs(e, a)?;
    let m2 = &m * &m;
    let e2 = DenseTensor::from_matrix(&m2)?;
    let id = DMatrix::<f64>::identity(3, 3);
    let cof = cofactor(&m);
    // A^T swaps the index pairs: (A^T)_IJKL = A_KLIJ
    let at = a.permute_indices(&[2, 3, 0, 1], 1.0)?;
    let sym = a.add(&at)?;
    let b4 = sym.contract_trailing(e)?;
    let ae2 = a.contract_trailing(&e2)?.to_matrix()?;
    let ate = at.contract_trailing(e)?;
    let ate2 = at.contract_trailing(&e2)?;
    let ae2t = a.contract_trailing(&e2)?;
    // (A^T : E)_IQ E_JQ + E_QI (A^T : E)_QJ
    let g5 = ate.to_matrix()? * m.transpose() + m.transpose() * ate.to_matrix()?;
    let b5 = ae2 + g5;
    // ((A + A^T) : E²)_IQ E_JQ + E_QI ((A + A^T) : E²)_QJ
    let s2 = ate2.add(&ae2t)?.to_matrix()?;
    let b6 = &s2 * m.transpose() + m.transpose() * &s2;
    Ok([
        DenseTensor::identity(3),
        DenseTensor::from_matrix(&(id * m.trace() - m.transpose()))?,
        DenseTensor::from_matrix(&cof)?,
        b4,
        DenseTensor::from_matrix(&b5)?,
        DenseTensor::from_matrix(&b6)?,
    ])
}

fn cofactor(m: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(3, 3, |i, j| {
        let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
        let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
        m[(r0, c0)] * m[(r1, c1)] - m[(r0, c1)] * m[(r1, c0)]
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_counts() {
        assert_eq!(canonical(CanonicalName::II).nnz(0.0), 9);
        assert_eq!(canonical(CanonicalName::JJ).nnz(0.0), 21 - 6);
        assert_eq!(canonical(CanonicalName::Oh).nnz(0.0), 3);
        let d = canonical(CanonicalName::D4h);
        assert_eq!(d.nnz(0.0), 8);
        assert_eq!(d.get(&[0, 0, 0, 0]).unwrap(), 1.0);
        assert_eq!(d.get(&[0, 0, 1, 1]).unwrap(), -1.0);
        assert_eq!(d.get(&[0, 1, 0, 1]).unwrap(), -1.0);
    }

    #[test]
    fn invariants_at_identity_strain() {
        let oh = canonical(CanonicalName::Oh);
        let v = kambouchev_invariants(&DenseTensor::identity(3), &oh).unwrap();
        assert_eq!(v.0, [3.0, 3.0, 1.0, 3.0, 3.0, 3.0]);
        let e = DenseTensor::unit(3, &[0, 0]).unwrap();
        let v = kambouchev_invariants(&e, &oh).unwrap();
        assert_eq!(v.0, [1.0, 0.0, 0.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn b4_at_identity_is_twice_identity() {
        let b = kambouchev_basis(&DenseTensor::identity(3), &canonical(CanonicalName::Oh)).unwrap();
        assert!(b[3].max_abs_diff(&DenseTensor::identity(3).scale(2.0)).unwrap() < 1e-15);
    }

    #[test]
    fn preset_parsing() {
        assert_eq!("yield".parse::<ConstraintPreset>().unwrap(), ConstraintPreset::Yield);
        assert!("plastic".parse::<ConstraintPreset>().is_err());
        assert_eq!("d4h".parse::<CanonicalName>().unwrap(), CanonicalName::D4h);
    }
}
