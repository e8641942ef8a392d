use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tensorkit_core::mech::{self, canonical, kambouchev_invariants, structure_basis, CanonicalName};
use tensorkit_core::solve::{
    exclusivity_check, in_span, invariant_basis, nullspace_full, nullspace_truncated, spans_equal, sparsify_single,
    Algorithm, ConstraintSet, LobpcgOptions, NullspaceOptions, SolveOptions,
};
use tensorkit_core::spaces::predict_dimension;
use tensorkit_core::{Convention, DenseTensor, Error, FiniteGroup, GroupSpec, OrthogonalMatrix, SpaceSpec};

fn t2(entries: &[(usize, usize, f64)]) -> DenseTensor {
    let e: Vec<_> = entries.iter().map(|&(i, j, v)| (vec![i, j], v)).collect();
    DenseTensor::from_entries(2, 3, &e).unwrap()
}

fn random_tensor(order: usize, seed: u64) -> DenseTensor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v = (0..3usize.pow(order as u32)).map(|_| rng.random_range(-1.0..1.0)).collect();
    DenseTensor::from_vec(order, 3, v).unwrap()
}

#[test]
fn tensor_core_examples() {
    let e12 = t2(&[(0, 1, 1.0)]);
    assert_eq!(e12.vectorize()[1], 1.0);
    assert_eq!(e12.vectorize().iter().filter(|v| **v != 0.0).count(), 1);
    assert_eq!(DenseTensor::zeros(3, 2).vectorize(), vec![0.0; 8]);

    let t = random_tensor(3, 1);
    assert_eq!(t.group_action(&OrthogonalMatrix::identity(3)).unwrap(), t);
    assert!(t.group_action(&OrthogonalMatrix::inversion(3)).unwrap().max_abs_diff(&t.scale(-1.0)).unwrap() < 1e-15);
    let e11 = t2(&[(0, 0, 1.0)]);
    let rot = e11.group_action(&OrthogonalMatrix::axis_rotation(2, PI / 2.0)).unwrap();
    assert!(rot.max_abs_diff(&t2(&[(1, 1, 1.0)])).unwrap() < 1e-15);

    assert_eq!(e12.permute_indices(&[1, 0], 1.0).unwrap(), t2(&[(1, 0, 1.0)]));
    assert_eq!(DenseTensor::identity(3).trace_contract(0, 1).unwrap().as_slice(), &[3.0]);
    assert_eq!(e12.trace_contract(0, 1).unwrap().as_slice(), &[0.0]);
    assert!(matches!(e12.trace_contract(1, 1), Err(Error::InvalidAxes(..))));

    let r = random_tensor(4, 2);
    let c = r.trace_contract(2, 3).unwrap();
    for i in 0..3 {
        for j in 0..3 {
            let s: f64 = (0..3).map(|k| r.get(&[i, j, k, k]).unwrap()).sum();
            assert!((c.get(&[i, j]).unwrap() - s).abs() < 1e-14);
        }
    }
    assert_eq!(DenseTensor::identity(3).inner(&DenseTensor::identity(3)).unwrap(), 3.0);
    assert_eq!(e12.inner(&t2(&[(1, 0, 1.0)])).unwrap(), 0.0);
    let oh = canonical(CanonicalName::Oh);
    assert_eq!(oh.inner(&oh).unwrap(), 3.0);
}

#[test]
fn block_swap_with_sign_negates_a_block_symmetric_tensor() {
    let r = random_tensor(6, 3);
    // brute-force symmetrization over the block swap
    let swapped = r.permute_indices(&[3, 4, 5, 0, 1, 2], 1.0).unwrap();
    let sym = r.add(&swapped).unwrap().scale(0.5);
    let out = sym.permute_indices(&[3, 4, 5, 0, 1, 2], -1.0).unwrap();
    assert!(out.max_abs_diff(&sym.scale(-1.0)).unwrap() < 1e-15);
}

#[test]
fn group_examples() {
    let q = OrthogonalMatrix::rotation(&[0.0, 0.0, 1.0], PI / 2.0).unwrap();
    let e1 = nalgebra::DVector::from_vec(vec![1.0, 0.0, 0.0]);
    assert!((q.matrix() * &e1 - nalgebra::DVector::from_vec(vec![0.0, 1.0, 0.0])).norm() < 1e-15);
    assert_eq!(OrthogonalMatrix::rotation(&[1.0, 0.0, 0.0], 0.0).unwrap().distance(&OrthogonalMatrix::identity(3)), 0.0);
    let half = OrthogonalMatrix::rotation(&[1.0, 0.0, 0.0], PI).unwrap();
    let d = OrthogonalMatrix::from_row_slice(3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0]).unwrap();
    assert!(half.distance(&d) < 1e-15);
    assert!(matches!(OrthogonalMatrix::rotation(&[1.0, 1.0, 0.0], 1.0), Err(Error::NonUnitAxis(_))));

    let a = [0.6, 0.0, 0.8];
    let r = OrthogonalMatrix::reflection(&a).unwrap();
    assert!((r.det() + 1.0).abs() < 1e-12);
    assert!(r.compose(&r).distance(&OrthogonalMatrix::identity(3)) < 1e-12);
    let ra = r.matrix() * nalgebra::DVector::from_column_slice(&a);
    assert!((ra + nalgebra::DVector::from_column_slice(&a)).norm() < 1e-15);

    // identities among the axis generators
    let q1 = OrthogonalMatrix::axis_rotation(0, PI);
    let q2 = OrthogonalMatrix::axis_rotation(1, PI);
    let q3 = OrthogonalMatrix::axis_rotation(2, PI);
    assert!(q1.compose(&q2).compose(&q3).distance(&OrthogonalMatrix::identity(3)) < 1e-12);
    let (r1, r2, r3) = (
        OrthogonalMatrix::axis_reflection(0),
        OrthogonalMatrix::axis_reflection(1),
        OrthogonalMatrix::axis_reflection(2),
    );
    assert!(r2.compose(&r1).compose(&r3).distance(&OrthogonalMatrix::inversion(3)) < 1e-12);
    for n in [2u32, 3, 4, 6] {
        let q = OrthogonalMatrix::axis_rotation(2, PI / n as f64);
        let mut p = OrthogonalMatrix::identity(3);
        for _ in 0..2 * n {
            p = p.compose(&q);
        }
        assert!(p.distance(&OrthogonalMatrix::identity(3)) < 1e-12);
    }

    let c4 = FiniteGroup::from_generators("c4", &[OrthogonalMatrix::axis_rotation(2, PI / 2.0)], 100).unwrap();
    assert_eq!(c4.order(), 4);
    let kb = GroupSpec::catalog("cubic", Convention::So3Kb).unwrap();
    assert_eq!(kb.generators.len(), 3);
    assert_eq!(kb.close().unwrap().order(), 24);
    assert_eq!(GroupSpec::catalog("cubic", Convention::O3Zheng).unwrap().close().unwrap().order(), 48);
    let tet = GroupSpec::catalog("tetragonal", Convention::O3Zheng).unwrap();
    assert_eq!(tet.generators.len(), 4);
    assert!(tet.generators.iter().any(|g| g.distance(&OrthogonalMatrix::inversion(3)) < 1e-15));
    let err = GroupSpec::catalog("hexagonal", Convention::So3Kb).unwrap_err().to_string();
    assert!(err.contains("triclinic") && err.contains("isotropic"));

    let iso = GroupSpec::catalog("isotropic", Convention::So3Kb).unwrap();
    assert!(!iso.finite_hint);
    let free = FiniteGroup::from_generators("free", &iso.generators, 10_000).unwrap_err();
    assert!(free.to_string().contains("group appears infinite; use sampled-generator mode"));
}

#[test]
fn custom_group_from_json() {
    let g = GroupSpec::from_json(r#"{"name": "mirror", "generators": [[[1,0,0],[0,1,0],[0,0,-1]]]}"#).unwrap();
    assert_eq!(g.close().unwrap().order(), 2);
    let bad = GroupSpec::from_json(r#"{"name": "skew", "generators": [[[1,1,0],[0,1,0],[0,0,1]]]}"#);
    assert!(matches!(bad, Err(Error::NotOrthogonal { .. })));
}

#[test]
fn space_examples() {
    let s2 = SpaceSpec::parse("S2(R3)").unwrap();
    let gens = s2.symmetry_generators();
    assert_eq!(gens.len(), 1);
    assert_eq!(gens[0].perm, vec![1, 0]);
    let p = s2.project(&t2(&[(0, 1, 1.0)])).unwrap();
    assert_eq!(p, t2(&[(0, 1, 0.5), (1, 0, 0.5)]));
    assert_eq!(SpaceSpec::parse("A2(R3)").unwrap().project(&t2(&[(0, 0, 1.0)])).unwrap().max_abs(), 0.0);

    let a2s3 = SpaceSpec::parse("A2(S3(R3))").unwrap();
    let g = a2s3.symmetry_generators();
    assert!(g.iter().any(|p| p.perm == vec![3, 4, 5, 0, 1, 2] && p.sign == -1.0));
    assert!(g.iter().filter(|p| p.sign == 1.0).all(|p| {
        let moved: Vec<usize> = (0..6).filter(|&i| p.perm[i] != i).collect();
        moved.iter().all(|&i| i < 3) || moved.iter().all(|&i| i >= 3)
    }));

    for (s, d) in [("T4(R3)", 81), ("S2(S2(R3))", 21), ("A2(S3(R3))", 45)] {
        assert_eq!(SpaceSpec::parse(s).unwrap().dimension(), d);
    }
    let cubic = GroupSpec::catalog("cubic", Convention::O3Zheng).unwrap().close().unwrap();
    assert_eq!(predict_dimension(&SpaceSpec::parse("S2(S2(R3))").unwrap(), &cubic).unwrap(), 3);
    assert_eq!(predict_dimension(&a2s3, &cubic).unwrap(), 1);
    assert!(SpaceSpec::parse("Q2(R3)").is_err());
    assert!(SpaceSpec::parse("S0(R3)").is_err());
}

#[test]
fn constraint_assembly_examples() {
    let c = ConstraintSet::new(2, 3).with_trace(0, 1).unwrap();
    let m = c.assemble().unwrap();
    assert_eq!(m.nrows(), 1);
    assert_eq!(m.row(0).iter().copied().collect::<Vec<_>>(), DenseTensor::identity(3).vectorize());

    let sym = SpaceSpec::parse("S2(R2)").unwrap();
    let m = ConstraintSet::new(2, 2).with_space(&sym).unwrap().assemble().unwrap();
    assert_eq!(m.rank(1e-12), 1);
    assert!(matches!(ConstraintSet::new(2, 3).assemble(), Err(Error::EmptyConstraints)));
}

#[test]
fn solver_examples() {
    let t4 = SpaceSpec::tensor_power(4, 3);
    let iso = GroupSpec::catalog("isotropic", Convention::So3Kb).unwrap();
    assert_eq!(invariant_basis(&iso, &t4, &[], &SolveOptions::default()).unwrap().len(), 3);
    let trivial = GroupSpec::custom("trivial", vec![], true).unwrap();
    let c = ConstraintSet::new(1, 3).with_generators(&trivial.generators).unwrap();
    // identity generators contribute no rows, so add a vacuous space constraint
    let c = c.with_space(&SpaceSpec::tensor_power(1, 3)).unwrap();
    assert_eq!(nullspace_full(&c, NullspaceOptions::default()).map(|b| b.len()).unwrap_or(3), 3);

    let c = ConstraintSet::new(2, 3).with_generators(&trivial.generators).unwrap().with_space(&SpaceSpec::tensor_power(2, 3)).unwrap();
    let full = nullspace_full(&c, NullspaceOptions::default()).unwrap_or_else(|_| panic!("full"));
    let trunc = nullspace_truncated(&c, 9, &LobpcgOptions::default()).unwrap();
    assert!(spans_equal(&full.elements, &trunc.elements, 1e-8).unwrap());

    let cubic = GroupSpec::catalog("cubic", Convention::O3Zheng).unwrap();
    let rnd = invariant_basis(
        &cubic,
        &t4,
        &[],
        &SolveOptions {
            algorithm: Algorithm::Randomized,
            seed: 5,
            ..Default::default()
        },
    )
    .unwrap();
    let svd = invariant_basis(&cubic, &t4, &[], &SolveOptions::default()).unwrap();
    assert_eq!(rnd.len(), 4);
    assert!(spans_equal(&rnd.elements, &svd.elements, 1e-8).unwrap());
    assert_eq!(rnd.provenance.seed, Some(5));
    assert_eq!(svd.provenance.seed, None);

    let yield_ = mech::ConstraintPreset::Yield;
    for (name, want) in [("cubic", 2), ("isotropic", 1), ("monoclinic", 9), ("orthotropic", 6)] {
        let g = GroupSpec::catalog(name, Convention::O3Zheng).unwrap();
        let b = invariant_basis(
            &g,
            &yield_.space().unwrap(),
            &yield_.traces(),
            &SolveOptions {
                algorithm: Algorithm::Truncated,
                rank: Some(if g.finite_hint { predict_dimension(&yield_.space().unwrap(), &g.close().unwrap()).unwrap() as usize } else { 2 }),
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(b.len(), want, "{name}");
    }
}

#[test]
fn randomized_solver_refuses_traces() {
    let g = GroupSpec::catalog("cubic", Convention::O3Zheng).unwrap();
    let opts = SolveOptions {
        algorithm: Algorithm::Randomized,
        ..Default::default()
    };
    let s = SpaceSpec::parse("S2(S2(R3))").unwrap();
    assert!(invariant_basis(&g, &s, &[(0, 1)], &opts).is_err());
}

#[test]
fn span_and_sparsify_examples() {
    let b = vec![t2(&[(1, 1, 1.0)])];
    let r = in_span(&b, &t2(&[(0, 0, 1.0)]), 1e-8).unwrap();
    assert!(!r.inside);
    assert!((r.residual - 1.0).abs() < 1e-15);
    assert!(in_span(&b, &DenseTensor::zeros(2, 3), 1e-8).unwrap().inside);

    let single = tensorkit_core::solve::BasisSet {
        order: 2,
        dim: 3,
        elements: vec![DenseTensor::identity(3).scale(1.0 / 3f64.sqrt())],
        provenance: tensorkit_core::solve::Provenance::new(Algorithm::Svd, 1e-10),
    };
    let s = sparsify_single(&single).unwrap();
    assert_eq!(s.nnz, 3);
    assert_eq!(s.tensor, DenseTensor::identity(3));

    let kb = structure_basis("transverse", Convention::So3Kb, 2).unwrap();
    let s = sparsify_single(&kb).unwrap();
    assert!(s.nnz == 1 || s.nnz == 2);
    assert!(in_span(&kb.elements, &s.tensor, 1e-8).unwrap().inside);
}

#[test]
fn exclusivity_examples() {
    let cubic = GroupSpec::catalog("cubic", Convention::O3Zheng).unwrap();
    let iso = GroupSpec::catalog("isotropic", Convention::O3Zheng).unwrap();
    let r = exclusivity_check(&DenseTensor::identity(3), &cubic, &[iso.clone()], 16, 1).unwrap();
    assert!(!r.exclusive);

    let trans = GroupSpec::catalog("transverse", Convention::So3Kb).unwrap();
    let e33 = t2(&[(2, 2, 1.0)]);
    let iso_kb = GroupSpec::catalog("isotropic", Convention::So3Kb).unwrap();
    assert!(exclusivity_check(&e33, &trans, &[iso_kb], 0, 0).unwrap().exclusive);

    // e1 under SO(3) monoclinic (half-turn about e1) is also fixed by every
    // rotation about e1.
    let mono = GroupSpec::catalog("monoclinic", Convention::So3Kb).unwrap();
    let about_e1 = GroupSpec::custom("transverse-e1", vec![OrthogonalMatrix::axis_rotation(0, tensorkit_core::groups::sample_angle())], false).unwrap();
    let e1 = DenseTensor::from_vec(1, 3, vec![1.0, 0.0, 0.0]).unwrap();
    assert!(!exclusivity_check(&e1, &mono, &[about_e1], 0, 0).unwrap().exclusive);

    assert!(exclusivity_check(&t2(&[(0, 1, 1.0)]), &cubic, &[], 0, 0).is_err());
}

#[test]
fn mech_examples() {
    let ii = canonical(CanonicalName::II);
    let jj = canonical(CanonicalName::JJ);
    assert_eq!(ii.inner(&jj).unwrap(), 6.0);
    let kk = canonical(CanonicalName::KK);
    assert_eq!(kk.permute_indices(&[0, 1, 3, 2], -1.0).unwrap(), kk);

    let space = mech::ConstraintPreset::Modulus.space().unwrap();
    let trivial = GroupSpec::custom("trivial", vec![], true).unwrap();
    assert_eq!(invariant_basis(&trivial, &space, &[], &SolveOptions::default()).unwrap().len(), 21);
    let c = mech::modulus_constraints(&trivial).unwrap();
    assert_eq!(c.transpositions.len(), 3);

    let t = structure_basis("transverse", Convention::So3Kb, 2).unwrap();
    assert_eq!(t.len(), 2);
    let want = [t2(&[(0, 0, 1.0), (1, 1, 1.0)]), t2(&[(2, 2, 1.0)])];
    assert!(spans_equal(&t.elements, &want, 1e-8).unwrap());
    let iso = structure_basis("isotropic", Convention::O3Zheng, 4).unwrap();
    assert!(spans_equal(&iso.elements, &[ii.clone(), jj, kk], 1e-8).unwrap());
    assert_eq!(structure_basis("cubic", Convention::O3Zheng, 3).unwrap().len(), 0);
    assert!(structure_basis("cubic", Convention::O3Zheng, 5).is_err());

    let zero = kambouchev_invariants(&DenseTensor::zeros(2, 3), &ii).unwrap();
    assert_eq!(zero.0, [0.0; 6]);
    let skew = t2(&[(0, 1, 1.0)]);
    assert!(kambouchev_invariants(&skew, &ii).is_err());
}

#[test]
fn kambouchev_invariants_are_joint_isotropic() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let d4 = canonical(CanonicalName::D4h);
    for _ in 0..10 {
        let g = OrthogonalMatrix::random_rotation(&mut rng);
        let mut e = random_tensor(2, rng.random());
        e = e.add(&e.permute_indices(&[1, 0], 1.0).unwrap()).unwrap().scale(0.5);
        let a = kambouchev_invariants(&e, &d4).unwrap().0;
        let b = kambouchev_invariants(&e.group_action(&g).unwrap(), &d4.group_action(&g).unwrap()).unwrap().0;
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-10 * x.abs().max(1.0));
        }
    }
}
