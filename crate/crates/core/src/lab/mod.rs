//! Finite-dimensional counterparts of the nice cases: modules over `Q^k`,
//! where characters can be listed, and the partition-of-unity approximation
//! in `C([0,1], Q^d)`.

mod approx;
mod finite;
pub mod linalg;
mod partition;

pub use approx::{module_approximate, random_approx_instance, ApproxOptions, ApproxSummary, ModuleApproximation};
pub use finite::{check_fge1, random_module, vanishing_characters, zero_one_family, DiscreteCharacter, FiniteAlgebraModule};
pub use partition::{partition_of_unity, uncovered_points, CoverPartition};

use crate::scalar::Q;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LabError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("the intervals do not cover [0, 1] near {point}")]
    NotCovering { point: Q },
    /// The generator values at `t` miss `f(t)`; `witness` is orthogonal to all
    /// of them, so `h ↦ ⟨h(t), witness⟩` is a character vanishing on the module.
    #[error("pointwise density fails at t = {t}")]
    DensityViolated { t: Q, witness: Vec<Q> },
    #[error("could not certify the distance below eps (bound {bound})")]
    NotCertified { bound: f64 },
}
