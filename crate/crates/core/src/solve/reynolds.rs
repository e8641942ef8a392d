use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::basis::{Algorithm, BasisSet, Provenance};
use super::rrqr::pivoted_qr;
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;
use crate::spaces::SpaceSpec;
use crate::tensor::DenseTensor;

pub const RRQR_TOL: f64 = 1e-8;
pub const INVARIANCE_TOL: f64 = 1e-8;
const ZERO_COLUMN: f64 = 1e-12;

/// Group average `(1/|G|) Σ g ⊠ t`.
pub fn reynolds_apply(group: &FiniteGroup, t: &DenseTensor) -> Result<DenseTensor> {
    if group.order() == 0 {
        return Err(Error::InvalidArgument("empty group".into()));
    }
    let mut acc = DenseTensor::zeros(t.order(), t.dim());
    for g in group.elements() {
        acc.axpy(1.0, &t.group_action(g)?)?;
    }
    Ok(acc.scale(1.0 / group.order() as f64))
}

#[derive(Debug, Clone, Copy)]
pub struct RandomizedOptions {
    /// Basis elements combined per column.
    pub samples: usize,
    pub rank: usize,
    pub oversample: usize,
    pub seed: u64,
}

impl RandomizedOptions {
    /// `m = max(1, ceil(ln dim V))`, `p = 5`.
    pub fn with_defaults(space: &SpaceSpec, rank: usize, seed: u64) -> Self {
        Self {
            samples: default_samples(space.dimension()),
            rank,
            oversample: 5,
            seed,
        }
    }
}

pub fn default_samples(dim: u64) -> usize {
    ((dim as f64).ln().ceil() as usize).max(1)
}

/// Range finder on the Reynolds operator: random signed sums of standard
/// basis elements are averaged over the group, then a pivoted QR extracts
/// an orthonormal basis of the invariant subspace. Columns whose image
/// vanishes are discarded, and drawing continues past `rank + oversample`
/// columns until the QR reveals at least `rank` directions.
pub fn randomized_invariant_basis(group: &FiniteGroup, space: &SpaceSpec, opts: &RandomizedOptions) -> Result<BasisSet> {
    let n = space.ambient_len();
    let cols = opts.rank + opts.oversample;
    if cols > n {
        return Err(Error::InvalidArgument(format!(
            "rank + oversample = {cols} exceeds ambient dimension {n}"
        )));
    }
    if opts.samples == 0 {
        return Err(Error::InvalidArgument("samples per column must be at least 1".into()));
    }
    if group.order() == 0 {
        return Err(Error::InvalidArgument("empty group".into()));
    }
    let order = space.ambient_order();
    let dim = space.base_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut pool: Vec<usize> = Vec::new();
    let mut columns: Vec<DenseTensor> = Vec::new();
    let max_draws = cols + 4 * n;
    let mut draws = 0;
    let mut qr = None;
    while draws < max_draws {
        let mut x = DenseTensor::zeros(order, dim);
        for _ in 0..opts.samples {
            if pool.is_empty() {
                pool = (0..n).collect();
                pool.shuffle(&mut rng);
            }
            let f = pool.pop().unwrap();
            let s = if rng.random::<bool>() { 1.0 } else { -1.0 };
            x.as_mut_slice()[f] += s;
        }
        draws += 1;
        let y = reynolds_apply(group, &space.project(&x)?)?;
        if y.max_abs() <= ZERO_COLUMN {
            continue;
        }
        columns.push(y);
        if columns.len() >= cols && (columns.len() - cols) % (opts.oversample + 1) == 0 {
            let a = DMatrix::from_fn(n, columns.len(), |i, j| columns[j].as_slice()[i]);
            let f = pivoted_qr(&a, RRQR_TOL);
            let done = f.rank >= opts.rank;
            qr = Some(f);
            if done {
                break;
            }
        }
    }
    let qr = match qr {
        Some(f) if f.rank >= opts.rank => f,
        other => {
            return Err(Error::NotConverged {
                iterations: draws,
                residual: other.map_or(0, |f| f.rank) as f64,
            })
        }
    };
    let basis = BasisSet::from_columns(
        order,
        dim,
        &qr.q,
        Provenance {
            seed: Some(opts.seed),
            ..Provenance::new(Algorithm::Randomized, RRQR_TOL)
        },
    )?;
    for b in &basis.elements {
        let r = reynolds_apply(group, b)?.sub(b)?.norm();
        if r > INVARIANCE_TOL {
            return Err(Error::NotInvariant(r));
        }
    }
    Ok(basis)
}
