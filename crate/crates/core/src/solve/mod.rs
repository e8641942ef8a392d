//! Constraint assembly and the three basis solvers (full SVD, LOBPCG on
//! `MᵀM`, randomized Reynolds range finder), plus span tests,
//! sparsification and exclusivity checks.

pub mod basis;
pub mod constraints;
pub mod exclusivity;
pub mod lobpcg;
pub mod nullspace;
pub mod reynolds;
pub mod rrqr;
pub mod span;
pub mod sparsify;

pub use basis::{Algorithm, BasisSet, Provenance};
pub use constraints::ConstraintSet;
pub use exclusivity::{exclusivity_check, ExclusivityReport, Membership};
pub use lobpcg::{nullspace_truncated, LobpcgOptions};
pub use nullspace::{nullspace_full, NullspaceOptions};
pub use reynolds::{randomized_invariant_basis, reynolds_apply, RandomizedOptions};
pub use span::{in_span, spans_equal, SpanCheck};
pub use sparsify::{sparsify_single, SparsifiedTensor};

use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::spaces::{predict_dimension, SpaceSpec};

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub algorithm: Algorithm,
    pub nullspace: NullspaceOptions,
    /// Rank bound for the truncated and randomized solvers; predicted when absent.
    pub rank: Option<usize>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub oversample: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            algorithm: Algorithm::Svd,
            nullspace: NullspaceOptions::default(),
            rank: None,
            seed: 0,
            samples: None,
            oversample: 5,
        }
    }
}

/// Invariant basis of `space` under `group`, with extra trace conditions.
pub fn invariant_basis(
    group: &GroupSpec,
    space: &SpaceSpec,
    traces: &[(usize, usize)],
    opts: &SolveOptions,
) -> Result<BasisSet> {
    let mut c = ConstraintSet::new(space.ambient_order(), space.base_dim())
        .with_generators(&group.generators)?
        .with_space(space)?;
    for &(a, b) in traces {
        c = c.with_trace(a, b)?;
    }
    let rank_hint = || -> Result<usize> {
        match opts.rank {
            Some(r) => Ok(r),
            None => Ok(predict_dimension(space, &group.close()?)? as usize),
        }
    };
    let mut basis = match opts.algorithm {
        Algorithm::Svd => nullspace_full(&c, opts.nullspace)?,
        Algorithm::Truncated => {
            let lo = LobpcgOptions {
                seed: opts.seed,
                ..Default::default()
            };
            nullspace_truncated(&c, rank_hint()?, &lo)?
        }
        Algorithm::Randomized => {
            if !traces.is_empty() {
                return Err(Error::InvalidArgument(
                    "the randomized solver does not support trace conditions".into(),
                ));
            }
            let finite = group.close()?;
            let r = rank_hint()?;
            let mut ro = RandomizedOptions::with_defaults(space, r, opts.seed);
            ro.oversample = opts.oversample.min(space.ambient_len().saturating_sub(r));
            if let Some(m) = opts.samples {
                ro.samples = m;
            }
            randomized_invariant_basis(&finite, space, &ro)?
        }
    };
    basis.provenance.group = group.name.clone();
    basis.provenance.convention = group.convention.to_string();
    basis.provenance.space = space.to_string();
    if opts.algorithm != Algorithm::Svd {
        basis.provenance.seed = Some(opts.seed);
    }
    Ok(basis)
}
