//! Invariant tensor bases for finite and sampled point groups.
//!
//! The crate is organised bottom-up: dense tensors, orthogonal groups,
//! structured tensor spaces, constraint solvers, and the mechanics layer
//! (canonical structure tensors and invariant-based stress bases).

pub mod error;
pub mod groups;
pub mod mech;
pub mod reproduce;
pub mod solve;
pub mod spaces;
pub mod tensor;

pub use error::{Error, Result};
pub use groups::{Convention, FiniteGroup, GroupSpec, OrthogonalMatrix};
pub use spaces::{AlgebraKind, HilbertCoeffs, SignedPermutation, SpaceSpec};
pub use tensor::{DenseTensor, IndexOrder};
