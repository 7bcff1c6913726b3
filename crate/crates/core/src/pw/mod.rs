//! Exact piecewise-polynomial arithmetic on `[0, 1]` and on finite unions of
//! closed intervals.

mod extremum;
mod function;
mod interval;
pub mod io;
mod norms;
mod poly;
mod segment;
mod setfn;

pub use function::{PiecewiseFn, Smoothness};
pub use interval::{svc_set, svc_set_with, Indicator, IntervalUnion, SvcParams};
pub use norms::{
    integrate_over, l2_norm, l2_norm_sq, sobolev_inner, sobolev_norm, sobolev_norm_sq, sup_norm, sup_norm_on,
};
pub use poly::Poly;
pub use segment::{merge_sorted, PiecewisePoly};
pub use setfn::{set_antiderivative, SetFn};

/// Largest polynomial degree a [`PiecewiseFn`] may carry.
pub const MAX_DEGREE: usize = 8;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PwError {
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("polynomial degree {0} exceeds the cap of {MAX_DEGREE}")]
    DegreeOverflow(usize),
    #[error("declared smoothness {declared:?} but the function is only {actual:?}")]
    SmoothnessViolated { declared: Smoothness, actual: Smoothness },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("json: {0}")]
    Json(String),
}
