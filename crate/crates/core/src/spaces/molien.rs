use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::{AlgebraKind, SpaceSpec};
use crate::error::{Error, Result};
use crate::groups::{FiniteGroup, OrthogonalMatrix};

const ROUND_GUARD: f64 = 1e-6;
const IMAG_TOL: f64 = 1e-9;

type C = Complex<f64>;

/// Coefficients `c_0, c_1, ..` of a Hilbert/Molien series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HilbertCoeffs(pub Vec<u64>);

impl HilbertCoeffs {
    pub fn coefficient(&self, n: usize) -> Option<u64> {
        self.0.get(n).copied()
    }
}

fn eigenvalues(g: &OrthogonalMatrix) -> Vec<C> {
    g.matrix().complex_eigenvalues().iter().copied().collect()
}

fn to_integer(z: C, degree: usize) -> Result<u64> {
    let r = z.re.round();
    if z.im.abs() > IMAG_TOL || (z.re - r).abs() > ROUND_GUARD || r < 0.0 {
        return Err(Error::NonIntegral {
            degree,
            value: format!("{:.9}{:+.3e}i", z.re, z.im),
        });
    }
    Ok(r as u64)
}

/// Multiplies a truncated power series by `1/(1 - λt)` or `(1 + λt)`.
fn mul_factor(series: &mut [C], lambda: C, kind: AlgebraKind) {
    match kind {
        AlgebraKind::Symmetric => {
            for n in 1..series.len() {
                let prev = series[n - 1];
                series[n] += lambda * prev;
            }
        }
        AlgebraKind::Alternating => {
            for n in (1..series.len()).rev() {
                let prev = series[n - 1];
                series[n] += lambda * prev;
            }
        }
        AlgebraKind::Tensor => unreachable!(),
    }
}

/// Averages the Molien series of `group` up to degree `max_order`.
///
/// Tensor powers use `(tr g)^n`; symmetric and alternating powers use the
/// complete and elementary symmetric polynomials of the eigenvalues.
pub fn molien_series(group: &FiniteGroup, kind: AlgebraKind, max_order: usize) -> Result<HilbertCoeffs> {
    let len = max_order + 1;
    let mut acc = vec![C::new(0.0, 0.0); len];
    for g in group.elements() {
        let lam = eigenvalues(g);
        let mut s = vec![C::new(0.0, 0.0); len];
        s[0] = C::new(1.0, 0.0);
        match kind {
            AlgebraKind::Tensor => {
                let tr: C = lam.iter().sum();
                for n in 1..len {
                    s[n] = s[n - 1] * tr;
                }
            }
            _ => {
                for &l in &lam {
                    mul_factor(&mut s, l, kind);
                }
            }
        }
        for (a, v) in acc.iter_mut().zip(&s) {
            *a += v;
        }
    }
    let k = group.order() as f64;
    acc.iter()
        .enumerate()
        .map(|(n, z)| to_integer(z / k, n))
        .collect::<Result<Vec<_>>>()
        .map(HilbertCoeffs)
}

/// Eigenvalue multiset of the induced action on `space`, given the
/// eigenvalues on the base vector space.
pub fn space_eigenvalues(space: &SpaceSpec, base: &[C]) -> Vec<C> {
    match space {
        SpaceSpec::Base(_) => base.to_vec(),
        SpaceSpec::Tensor(k, c) => {
            let e = space_eigenvalues(c, base);
            products(&e, *k, Mode::All)
        }
        SpaceSpec::Sym(k, c) => products(&space_eigenvalues(c, base), *k, Mode::NonDecreasing),
        SpaceSpec::Alt(k, c) => products(&space_eigenvalues(c, base), *k, Mode::Increasing),
    }
}

#[derive(Clone, Copy)]
enum Mode {
    All,
    NonDecreasing,
    Increasing,
}

fn products(e: &[C], k: usize, mode: Mode) -> Vec<C> {
    let mut out = Vec::new();
    fn rec(e: &[C], k: usize, start: usize, acc: C, mode: Mode, out: &mut Vec<C>) {
        if k == 0 {
            out.push(acc);
            return;
        }
        for i in start..e.len() {
            let next = match mode {
                Mode::All => 0,
                Mode::NonDecreasing => i,
                Mode::Increasing => i + 1,
            };
            rec(e, k - 1, next, acc * e[i], mode, out);
        }
    }
    rec(e, k, 0, C::new(1.0, 0.0), mode, &mut out);
    out
}

/// `dim V^G` as the group average of the character of `V`.
pub fn predict_dimension(space: &SpaceSpec, group: &FiniteGroup) -> Result<u64> {
    if group.dim() != space.base_dim() {
        return Err(Error::Shape {
            expected: format!("group acting on R{}", space.base_dim()),
            found: format!("R{}", group.dim()),
        });
    }
    let mut acc = C::new(0.0, 0.0);
    for g in group.elements() {
        let chi: C = space_eigenvalues(space, &eigenvalues(g)).iter().sum();
        if chi.im.abs() > IMAG_TOL * (1.0 + chi.re.abs()) {
            return Err(Error::NonIntegral {
                degree: space.ambient_order(),
                value: format!("character {:.9}{:+.3e}i", chi.re, chi.im),
            });
        }
        acc += chi;
    }
    to_integer(acc / group.order() as f64, space.ambient_order())
}
