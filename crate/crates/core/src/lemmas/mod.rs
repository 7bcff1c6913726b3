//! The three constructive lemmas behind the tower: boundary bumps with
//! prescribed end slopes, prescribing a derivative on `K`, and balanced mass.

mod balanced;
mod bump;
mod prescribe;
mod random;
mod tietze;

pub use balanced::{
    balanced_mass, balanced_mass_with, detect_svc, required_svc_depth, BalanceOptions, BalancedMassResult, Block,
    Selection,
};
pub use bump::{boundary_bump, bump_profile, bump_with_width, profile_poly, Bump, BumpSpec};
pub use prescribe::{prescribe_derivative, Prescribed};
pub use random::{random_bump_spec, random_prescribe_instance};
pub use tietze::tietze_extend;

use crate::pw::PwError;

#[derive(Debug, thiserror::Error)]
pub enum LemmaError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("component {component} alone carries |h|-mass {mass:.3e} above the cover budget {budget:.3e}; use a deeper stage")]
    CoverInfeasible { component: usize, mass: f64, budget: f64 },
    #[error("no block selection meets the bounds for eps = {eps:.3e}{}", required_depth.map(|d| format!("; increase depth to at least {d}")).unwrap_or_default())]
    Infeasible { eps: f64, required_depth: Option<u32>, best_effort: Option<Box<BalancedMassResult>> },
    #[error(transparent)]
    Pw(#[from] PwError),
}
