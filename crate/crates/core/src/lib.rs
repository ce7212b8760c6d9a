//! Exact signed-permutation models of complex and quaternionic units acting
//! on ±1 sequences, plus the two numerical predictability demonstrations
//! (Lorenz-63 perturbations and the upscale-cascade horizon).

pub mod cascade;
pub mod epr;
pub mod error;
pub mod exact;
pub mod lorenz;
pub mod quat;
pub mod roots;
pub mod seq;
pub mod superpose;

pub use error::{Error, Result};
pub use exact::{AngleBase, Dyadic, RawAngle, SymbolicAngle};
pub use roots::{Definability, SignedPermutation};
pub use seq::BitSequence;
