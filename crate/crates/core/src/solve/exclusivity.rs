//! Exclusivity: a characteristic tensor of `G` must be moved by every
//! orthogonal transformation outside `G`. We look for witnesses, i.e.
//! transformations not in `G` that leave the tensor unchanged.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::constraints::ConstraintSet;
use super::nullspace::{nullspace_full, NullspaceOptions};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, GroupSpec, OrthogonalMatrix};
use crate::tensor::DenseTensor;

pub const MOVE_TOL: f64 = 1e-6;
const MEMBER_TOL: f64 = 1e-8;
const MAX_PROBE_ORDER: usize = 4;

/// Decides whether an orthogonal matrix belongs to a (possibly sampled) group.
pub enum Membership {
    Finite(FiniteGroup),
    /// Sampled groups: `g` counts as a member when it fixes every invariant
    /// of the group up to order 4.
    Invariants(Vec<DenseTensor>),
}

impl Membership {
    pub fn new(group: &GroupSpec) -> Result<Self> {
        if group.finite_hint {
            return Ok(Membership::Finite(group.close()?));
        }
        let mut inv = Vec::new();
        for n in 1..=MAX_PROBE_ORDER {
            let c = ConstraintSet::new(n, group.dim()).with_generators(&group.generators)?;
            inv.extend(nullspace_full(&c, NullspaceOptions::default())?.elements);
        }
        Ok(Membership::Invariants(inv))
    }

    pub fn contains(&self, g: &OrthogonalMatrix) -> Result<bool> {
        match self {
            Membership::Finite(f) => Ok(f.contains(g)),
            Membership::Invariants(inv) => {
                for t in inv {
                    if t.group_action(g)?.sub(t)?.norm() > MEMBER_TOL {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

fn moved(t: &DenseTensor, g: &OrthogonalMatrix) -> Result<bool> {
    Ok(t.group_action(g)?.sub(t)?.norm() > MOVE_TOL * t.norm())
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbeResult {
    pub probe: String,
    /// Probe generators that already belong to the tensor's own group.
    pub skipped: usize,
    /// Index of a probe generator outside the group that fixes the tensor.
    pub witness: Option<usize>,
    pub exclusive: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExclusivityReport {
    pub probes: Vec<ProbeResult>,
    pub random_rotations: usize,
    pub random_witnesses: usize,
    pub exclusive: bool,
}

pub fn exclusivity_check(
    t: &DenseTensor,
    group: &GroupSpec,
    probes: &[GroupSpec],
    n_random: usize,
    seed: u64,
) -> Result<ExclusivityReport> {
    for g in &group.generators {
        if moved(t, g)? {
            return Err(Error::NotInvariant(t.group_action(g)?.sub(t)?.norm()));
        }
    }
    let member = Membership::new(group)?;
    exclusivity_with(t, &member, probes, n_random, seed)
}

/// As [`exclusivity_check`], reusing a prepared membership test and
/// skipping the invariance precondition.
pub fn exclusivity_with(
    t: &DenseTensor,
    member: &Membership,
    probes: &[GroupSpec],
    n_random: usize,
    seed: u64,
) -> Result<ExclusivityReport> {
    let mut results = Vec::with_capacity(probes.len());
    for p in probes {
        let mut skipped = 0;
        let mut witness = None;
        for (i, g) in p.generators.iter().enumerate() {
            if member.contains(g)? {
                skipped += 1;
            } else if witness.is_none() && !moved(t, g)? {
                witness = Some(i);
            }
        }
        results.push(ProbeResult {
            probe: format!("{}/{}", p.name, p.convention),
            skipped,
            witness,
            exclusive: witness.is_none(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_witnesses = 0;
    for _ in 0..n_random {
        let q = OrthogonalMatrix::random_rotation(&mut rng);
        if !member.contains(&q)? && !moved(t, &q)? {
            random_witnesses += 1;
        }
    }
    let exclusive = random_witnesses == 0 && results.iter().all(|r| r.exclusive);
    Ok(ExclusivityReport {
        probes: results,
        random_rotations: n_random,
        random_witnesses,
        exclusive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::Convention;

    fn catalog(name: &str) -> GroupSpec {
        GroupSpec::catalog(name, Convention::So3Kb).unwrap()
    }

    #[test]
    fn identity_is_not_characteristic_of_cubic() {
        let r = exclusivity_check(&DenseTensor::identity(3), &catalog("cubic"), &[], 64, 0).unwrap();
        assert!(!r.exclusive);
        assert_eq!(r.random_witnesses, 64);
    }

    #[test]
    fn axis_dyad_is_characteristic_of_transverse() {
        let t = DenseTensor::unit(3, &[2, 2]).unwrap();
        let r = exclusivity_check(&t, &catalog("transverse"), &[catalog("isotropic")], 64, 0).unwrap();
        assert_eq!(r.probes[0].skipped, 1);
        assert!(r.exclusive);
    }

    #[test]
    fn axis_vector_does_not_characterize_monoclinic() {
        let e1 = DenseTensor::unit(3, &[0]).unwrap();
        let th = crate::groups::sample_angle();
        let about_e1 = GroupSpec {
            name: "transverse-e1".into(),
            convention: Convention::Custom,
            generators: vec![
                OrthogonalMatrix::axis_rotation(1, std::f64::consts::PI),
                OrthogonalMatrix::axis_rotation(0, th),
            ],
            finite_hint: false,
            sample_angles: vec![th],
        };
        let r = exclusivity_check(&e1, &catalog("monoclinic"), &[about_e1], 16, 0).unwrap();
        assert_eq!(r.probes[0].witness, Some(1));
        assert!(!r.exclusive);
    }

    #[test]
    fn non_invariant_input_is_rejected() {
        let t = DenseTensor::unit(3, &[0, 1]).unwrap();
        assert!(matches!(
            exclusivity_check(&t, &catalog("cubic"), &[], 0, 0),
            Err(Error::NotInvariant(_))
        ));
    }
}
