use nalgebra::DMatrix;

use super::basis::{Algorithm, BasisSet, Provenance};
use super::constraints::ConstraintSet;
use crate::error::{Error, Result};

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MIN_GAP: f64 = 1e3;
pub const TOL_ENV: &str = "TENSORKIT_TOL";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NullspaceOptions {
    /// Singular values at or below `rel_tol * max(σ_max, 1)` count as zero.
    pub rel_tol: f64,
    /// Required ratio between the smallest rejected and largest accepted σ.
    pub min_gap: f64,
}

impl Default for NullspaceOptions {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            min_gap: DEFAULT_MIN_GAP,
        }
    }
}

impl NullspaceOptions {
    /// Defaults, with the singular cut taken from `TENSORKIT_TOL` when set.
    pub fn from_env() -> Result<Self> {
        let mut o = Self::default();
        if let Ok(v) = std::env::var(TOL_ENV) {
            o.rel_tol = v
                .trim()
                .parse()
                .ok()
                .filter(|t: &f64| t.is_finite() && *t > 0.0)
                .ok_or_else(|| Error::InvalidArgument(format!("{TOL_ENV}={v} is not a positive number")))?;
        }
        Ok(o)
    }
}

/// Right singular vectors and singular values (descending) of `m`.
pub(crate) fn svd_right(m: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = m.ncols();
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Svd);
    }
    let rows = m.nrows().max(n);
    let a = faer::Mat::<f64>::from_fn(rows, n, |i, j| if i < m.nrows() { m[(i, j)] } else { 0.0 });
    let svd = a.thin_svd().map_err(|_| Error::Svd)?;
    let s = svd.S().column_vector();
    let v = svd.V();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));
    let sigma = order.iter().map(|&i| s[i]).collect();
    let vm = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((sigma, vm))
}

/// Orthonormal nullspace of `m` with the gap-checked singular cut.
pub fn nullspace_of(m: &DMatrix<f64>, opts: NullspaceOptions) -> Result<DMatrix<f64>> {
    let n = m.ncols();
    let (sigma, v) = svd_right(m)?;
    let smax = sigma.first().copied().unwrap_or(0.0);
    let cut = opts.rel_tol * smax.max(1.0);
    let rank = sigma.iter().filter(|s| **s > cut).count();
    let k = n - rank;
    let gap_ok = if k == 0 {
        sigma.last().is_none_or(|s| *s >= opts.min_gap * cut)
    } else if rank == 0 {
        true
    } else {
        let accepted = sigma[rank];
        let rejected = sigma[rank - 1];
        accepted == 0.0 || rejected >= opts.min_gap * accepted
    };
    if !gap_ok {
        return Err(Error::NoSpectralGap { tol: cut, spectrum: sigma });
    }
    Ok(v.columns(rank, k).into_owned())
}

pub fn nullspace_full(c: &ConstraintSet, opts: NullspaceOptions) -> Result<BasisSet> {
    let m = c.assemble()?;
    let cols = nullspace_of(&m, opts)?;
    BasisSet::from_columns(
        c.order(),
        c.dim(),
        &cols,
        Provenance::new(Algorithm::Svd, opts.rel_tol),
    )
}
