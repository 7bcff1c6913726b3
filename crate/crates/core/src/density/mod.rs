//! Density of the span of `f₀ = e₀ + Σ γ_n e_n`, `f_n = e_n - δ_n e₀` for
//! finitely supported sequences: the span is dense exactly when
//! `Σ γ_n δ_n ≠ -1`, which is cross-checked against the smallest singular
//! value of the matrix of `S = I + T` on `span{e₀, …, e_N}`.

mod svd;

use serde::Serialize;

pub use svd::singular_values;

use crate::scalar::{Scalar, FLOAT_TOL};

/// `γ_n`, `δ_n` for `1 <= n <= N`, stored from `n = 1`; both sequences vanish
/// beyond `N` unless tail norms are declared.
#[derive(Clone, Debug, PartialEq)]
pub struct PerturbationPair<S> {
    gamma: Vec<S>,
    delta: Vec<S>,
    /// Declared `ℓ²` norms of the omitted tails `(γ_n)_{n>N}`, `(δ_n)_{n>N}`.
    pub tails: Option<(f64, f64)>,
}

impl<S: Scalar> PerturbationPair<S> {
    pub fn new(gamma: Vec<S>, delta: Vec<S>) -> Result<Self, DensityError> {
        if gamma.len() != delta.len() {
            return Err(DensityError::LengthMismatch(gamma.len(), delta.len()));
        }
        Ok(Self { gamma, delta, tails: None })
    }

    pub fn with_tails(mut self, gamma_tail: f64, delta_tail: f64) -> Self {
        self.tails = Some((gamma_tail, delta_tail));
        self
    }

    pub fn order(&self) -> usize {
        self.gamma.len()
    }

    pub fn gamma(&self) -> &[S] {
        &self.gamma
    }

    pub fn delta(&self) -> &[S] {
        &self.delta
    }

    /// `s = Σ γ_n δ_n`.
    pub fn pairing(&self) -> S {
        self.gamma.iter().zip(&self.delta).fold(S::zero(), |acc, (g, d)| acc + g.clone() * d.clone())
    }

    /// `(cγ, δ/c)`.
    pub fn rescaled(&self, c: &S) -> Self {
        Self {
            gamma: self.gamma.iter().map(|g| g.clone() * c.clone()).collect(),
            delta: self.delta.iter().map(|d| d.clone() / c.clone()).collect(),
            tails: self.tails,
        }
    }

    /// Matrix of `S = I + T` in the basis `e₀, …, e_N`: column `n` is `f_n`.
    pub fn operator_matrix(&self) -> Vec<Vec<S>> {
        let n = self.order() + 1;
        let mut m = vec![vec![S::zero(); n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = S::one();
        }
        for k in 1..n {
            m[k][0] = self.gamma[k - 1].clone();
            m[0][k] = -self.delta[k - 1].clone();
        }
        m
    }

    pub fn matrix_csv(&self) -> String {
        let mut out = String::new();
        for row in self.operator_matrix() {
            let cells: Vec<String> = row.iter().map(|x| format!("{:.16e}", x.to_f64())).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DensityError {
    #[error("gamma has {0} terms but delta has {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Dense,
    NotDense,
    /// `Σ γ_n δ_n` is within tolerance (or within the declared tail bound) of -1.
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityReport<S> {
    pub sum: S,
    /// Cauchy–Schwarz bound on the omitted tail of the pairing.
    pub tail_bound: f64,
    pub verdict: Verdict,
}

impl<S: Scalar> DensityReport<S> {
    pub fn dense(&self) -> bool {
        self.verdict == Verdict::Dense
    }
}

/// The pairing test. Exact in rational mode; in float mode a pairing within
/// `1e-10` of -1 is reported as indeterminate rather than forced.
pub fn span_is_dense<S: Scalar>(p: &PerturbationPair<S>) -> DensityReport<S> {
    let sum = p.pairing();
    let tail_bound = p.tails.map_or(0.0, |(g, d)| g * d);
    let gap = sum.clone() + S::one();
    let verdict = if tail_bound > 0.0 && gap.to_f64().abs() <= tail_bound {
        Verdict::Indeterminate
    } else if S::EXACT {
        if gap.is_zero() {
            Verdict::NotDense
        } else {
            Verdict::Dense
        }
    } else if gap.to_f64().abs() <= FLOAT_TOL {
        Verdict::Indeterminate
    } else {
        Verdict::Dense
    };
    DensityReport { sum, tail_bound, verdict }
}

/// A non-zero kernel vector of `I + T` when the pairing is -1: with
/// `v = e₀ - Σ γ_n e_n` the `e_n` coordinates of `(I + T)v` are
/// `-γ_n + γ_n = 0` and the `e₀` coordinate is `1 + Σ γ_n δ_n = 0`.
pub fn kernel_vector<S: Scalar>(p: &PerturbationPair<S>) -> Option<Vec<S>> {
    let gap = p.pairing() + S::one();
    if !gap.is_negligible() {
        return None;
    }
    let mut v = Vec::with_capacity(p.order() + 1);
    v.push(S::one());
    v.extend(p.gamma.iter().map(|g| -g.clone()));
    Some(v)
}

/// Brute-force `(I + T)v` through the explicit matrix.
pub fn apply_operator<S: Scalar>(p: &PerturbationPair<S>, v: &[S]) -> Vec<S> {
    p.operator_matrix()
        .iter()
        .map(|row| row.iter().zip(v).fold(S::zero(), |acc, (m, x)| acc + m.clone() * x.clone()))
        .collect()
}

/// Smallest singular value of the truncated `S = I + T`.
pub fn min_singular_oracle<S: Scalar>(p: &PerturbationPair<S>) -> f64 {
    let m: Vec<Vec<f64>> = p.operator_matrix().iter().map(|r| r.iter().map(Scalar::to_f64).collect()).collect();
    singular_values(&m).last().copied().unwrap_or(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;
    use num::Zero;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    #[test]
    fn empty_perturbation_is_dense() {
        let p = PerturbationPair::<Q>::new(vec![q(0, 1); 3], vec![q(0, 1); 3]).unwrap();
        let r = span_is_dense(&p);
        assert_eq!(r.sum, q(0, 1));
        assert!(r.dense());
        assert!(kernel_vector(&p).is_none());
        assert!((min_singular_oracle(&p) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn one_term_critical_pair() {
        let p = PerturbationPair::<Q>::new(vec![q(1, 1)], vec![q(-1, 1)]).unwrap();
        let r = span_is_dense(&p);
        assert_eq!(r.sum, q(-1, 1));
        assert_eq!(r.verdict, Verdict::NotDense);
        let v = kernel_vector(&p).unwrap();
        // f₀ = f₁ = e₀ + e₁, so e₀ - e₁ spans the kernel
        assert_eq!(v, vec![q(1, 1), q(-1, 1)]);
        assert!(apply_operator(&p, &v).iter().all(|x| x.is_zero()));
        assert!(min_singular_oracle(&p) < 1e-10);
    }

    #[test]
    fn kernel_vector_solves_the_system_exactly() {
        let p = PerturbationPair::<Q>::new(vec![q(1, 2), q(2, 1), q(-1, 3)], vec![q(-1, 1), q(-1, 4), q(0, 1)]).unwrap();
        assert_eq!(p.pairing(), q(-1, 1));
        let v = kernel_vector(&p).unwrap();
        for (n, g) in p.gamma().iter().enumerate() {
            assert_eq!(v[n + 1].clone() + g.clone() * v[0].clone(), q(0, 1));
        }
        assert!(apply_operator(&p, &v).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn float_mode_near_critical_is_indeterminate() {
        let p = PerturbationPair::<f64>::new(vec![1.0], vec![-1.0 + 1e-12]).unwrap();
        assert_eq!(span_is_dense(&p).verdict, Verdict::Indeterminate);
    }

    #[test]
    fn declared_tails_widen_the_indeterminate_band() {
        let p = PerturbationPair::<Q>::new(vec![q(1, 1)], vec![q(-9, 10)]).unwrap();
        assert!(span_is_dense(&p).dense());
        let p = p.with_tails(0.5, 0.5);
        assert_eq!(span_is_dense(&p).verdict, Verdict::Indeterminate);
        assert_eq!(span_is_dense(&p).tail_bound, 0.25);
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(PerturbationPair::<Q>::new(vec![q(1, 1)], vec![]).is_err());
    }
}
