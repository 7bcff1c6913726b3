//! The counterexample itself: the tower, the generators `f^[n]`, the
//! annihilating functional `g`, and the certificate tying them together.

mod certificate;
mod character;
mod functional;
mod tower;

pub use certificate::{
    default_test_functions, nonniceness_certificate, norm_bound_suite, test_function_corpus, CertificateOptions,
    NonNicenessCertificate, NormBoundReport, CERTIFICATE_SCHEMA,
};
pub use character::{character_check, uniform_grid, CharacterReport};
pub use functional::{
    apply_g, apply_g_n, f0_residual, f0_residual_with, generator, rho_prime_by_parts, rho_prime_direct, F0Residual,
    PhiFunctional, VectorFn,
};
pub use tower::{build_tower, LevelReport, PipelineTower, TowerMode};

use crate::lemmas::LemmaError;

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("level {n}: {source}")]
    Level {
        n: usize,
        #[source]
        source: LemmaError,
    },
    #[error("index {index} outside 0..={order}")]
    OutOfRange { index: usize, order: usize },
}

impl PipelineError {
    /// The stage hint carried by a balanced-mass infeasibility, if any.
    pub fn required_depth(&self) -> Option<u32> {
        match self {
            PipelineError::Level { source: LemmaError::Infeasible { required_depth, .. }, .. } => *required_depth,
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            PipelineError::Level { source: LemmaError::Infeasible { .. } | LemmaError::CoverInfeasible { .. }, .. }
        )
    }
}
