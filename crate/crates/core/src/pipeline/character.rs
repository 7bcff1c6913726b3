//! Point evaluations of the generators: a character `h ↦ ⟨h(t), y⟩` kills
//! the module only if `{f^[n](t)}` fails to span densely.

use serde::Serialize;

use crate::density::{min_singular_oracle, span_is_dense, PerturbationPair, Verdict};
use crate::scalar::Scalar;

use super::tower::{pow2_neg, PipelineTower};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CharacterReport {
    pub t: String,
    /// `Σ_{n<=N} n^-2 ρ_n(t)`.
    pub sum: String,
    pub sum_abs: f64,
    /// `2^-N`.
    pub bound: f64,
    /// The sum equals `S_N(t) - 1`.
    pub telescopes: bool,
    pub verdict: Verdict,
    pub sigma_min: f64,
    pub passed: bool,
}

/// Threshold below which the singular-value oracle calls the span degenerate.
pub const SIGMA_FLOOR: f64 = 1e-8;

pub fn character_check<S: Scalar>(tower: &PipelineTower<S>, t: &S) -> CharacterReport {
    let order = tower.order();
    let gamma: Vec<S> = (1..=order).map(|n| S::one() / S::from_i64((n * n) as i64)).collect();
    let delta: Vec<S> = (1..=order).map(|n| tower.rho(n).eval(t)).collect();
    let pair = PerturbationPair::new(gamma, delta).expect("equal lengths");
    let report = span_is_dense(&pair);
    let sum = report.sum.clone();
    let telescopes = (sum.clone() - (tower.s(order).eval(t) - S::one())).is_negligible();
    let bound = pow2_neg::<f64>(order);
    let sum_abs = sum.to_f64().abs();
    let sigma_min = min_singular_oracle(&pair);
    let passed = sum_abs < bound && telescopes && report.dense() && sigma_min > SIGMA_FLOOR;
    CharacterReport {
        t: t.to_decimal_string(),
        sum: sum.to_decimal_string(),
        sum_abs,
        bound,
        telescopes,
        verdict: report.verdict,
        sigma_min,
        passed,
    }
}

/// `i/(n-1)` for `i = 0..n`.
pub fn uniform_grid<S: Scalar>(n: usize) -> Vec<S> {
    let n = n.max(2);
    (0..n).map(|i| S::from_frac(i as i64, (n - 1) as i64)).collect()
}
