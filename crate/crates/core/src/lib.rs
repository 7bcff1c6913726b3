//! Constructive verification of a non-nice Sobolev module.

pub mod check;
pub mod density;
pub mod lab;
pub mod lemmas;
pub mod pipeline;
pub mod pw;
pub mod scalar;
pub(crate) mod serde_q;

pub use scalar::{Mode, Scalar, Q};
