//! Piecewise-polynomial functions on `[0, 1]`.

use serde::{Deserialize, Serialize};

use super::poly::Poly;
use super::segment::PiecewisePoly;
use super::{PwError, MAX_DEGREE};
use crate::scalar::Scalar;

/// Declared smoothness of a piecewise function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Smoothness {
    /// May jump at breakpoints (e.g. the derivative of a merely continuous function).
    Discontinuous,
    C0,
    C1,
}

impl Smoothness {
    pub fn lowered(self) -> Self {
        match self {
            Smoothness::C1 => Smoothness::C0,
            _ => Smoothness::Discontinuous,
        }
    }

    pub fn raised(self) -> Self {
        match self {
            Smoothness::Discontinuous => Smoothness::C0,
            _ => Smoothness::C1,
        }
    }
}

/// A piecewise polynomial on `[0, 1]` with a declared smoothness class.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseFn<S> {
    seg: PiecewisePoly<S>,
    smoothness: Smoothness,
}

impl<S: Scalar> PiecewiseFn<S> {
    /// Wraps a segment on `[0, 1]`, checking the declared smoothness and the
    /// degree cap.
    pub fn new(seg: PiecewisePoly<S>, smoothness: Smoothness) -> Result<Self, PwError> {
        if !seg.lo().is_zero() || !seg.hi().is_one() {
            return Err(PwError::Malformed("a PiecewiseFn must live on [0, 1]".into()));
        }
        if seg.max_degree() > MAX_DEGREE {
            return Err(PwError::DegreeOverflow(seg.max_degree()));
        }
        let f = Self { seg, smoothness };
        if let Some(actual) = f.verify_smoothness() {
            return Err(PwError::SmoothnessViolated { declared: smoothness, actual });
        }
        Ok(f)
    }

    pub(crate) fn from_segment(seg: PiecewisePoly<S>, smoothness: Smoothness) -> Self {
        debug_assert!(seg.lo().is_zero() && seg.hi().is_one());
        Self { seg, smoothness }
    }

    pub fn from_poly(p: Poly<S>) -> Self {
        Self::from_segment(PiecewisePoly::from_poly(S::zero(), S::one(), p), Smoothness::C1)
    }

    pub fn constant(c: S) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn zero() -> Self {
        Self::constant(S::zero())
    }

    pub fn one() -> Self {
        Self::constant(S::one())
    }

    /// `x ↦ x`.
    pub fn identity() -> Self {
        Self::from_poly(Poly::linear(S::zero(), S::one()))
    }

    /// Polynomial in the global variable `x` with coefficients `c[k]` for `x^k`.
    pub fn monomials(c: Vec<S>) -> Self {
        Self::from_poly(Poly::new(c))
    }

    /// Continuous piecewise-linear interpolant of `(x_i, y_i)`; knots must
    /// start at 0, end at 1 and increase strictly.
    pub fn piecewise_linear(knots: &[(S, S)]) -> Result<Self, PwError> {
        if knots.len() < 2 {
            return Err(PwError::Malformed("need at least two knots".into()));
        }
        let breaks: Vec<S> = knots.iter().map(|k| k.0.clone()).collect();
        let polys = knots
            .windows(2)
            .map(|w| {
                let width = w[1].0.clone() - w[0].0.clone();
                Poly::linear(w[0].1.clone(), (w[1].1.clone() - w[0].1.clone()) / width)
            })
            .collect();
        Self::new(PiecewisePoly::new(breaks, polys)?, Smoothness::C0)
    }

    pub fn segment(&self) -> &PiecewisePoly<S> {
        &self.seg
    }

    pub fn into_segment(self) -> PiecewisePoly<S> {
        self.seg
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn breaks(&self) -> &[S] {
        self.seg.breaks()
    }

    pub fn num_pieces(&self) -> usize {
        self.seg.len()
    }

    pub fn max_degree(&self) -> usize {
        self.seg.max_degree()
    }

    pub fn eval(&self, x: &S) -> S {
        self.seg.eval(x)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let breaks = self.seg.breaks();
        let i = breaks.partition_point(|b| b.to_f64() <= x).saturating_sub(1).min(self.seg.len() - 1);
        let p = self.seg.polys()[i].to_f64_coeffs();
        super::extremum::horner(&p, x - self.seg.breaks()[i].to_f64())
    }

    pub fn eval_derivative(&self, x: &S) -> S {
        self.seg.eval_derivative(x)
    }

    /// Returns the smoothness actually observed when it is lower than declared.
    pub fn verify_smoothness(&self) -> Option<Smoothness> {
        let actual = if self.seg.is_continuous(1) {
            Smoothness::C1
        } else if self.seg.is_continuous(0) {
            Smoothness::C0
        } else {
            Smoothness::Discontinuous
        };
        (actual < self.smoothness).then_some(actual)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_segment(self.seg.add(&other.seg), self.smoothness.min(other.smoothness))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_segment(self.seg.sub(&other.seg), self.smoothness.min(other.smoothness))
    }

    /// Pointwise product over the merged partition; degrees add.
    pub fn mul(&self, other: &Self) -> Self {
        Self::from_segment(self.seg.mul(&other.seg), self.smoothness.min(other.smoothness))
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::from_segment(self.seg.scale(k), self.smoothness)
    }

    pub fn neg(&self) -> Self {
        Self::from_segment(self.seg.neg(), self.smoothness)
    }

    pub fn add_constant(&self, c: &S) -> Self {
        Self::from_segment(self.seg.add_constant(c), self.smoothness)
    }

    /// Piecewise derivative. Differentiating a C0 function yields a function
    /// flagged [`Smoothness::Discontinuous`].
    pub fn differentiate(&self) -> Self {
        Self::from_segment(self.seg.derivative(), self.smoothness.lowered())
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        Self::from_segment(self.seg.antiderivative(S::zero()), self.smoothness.raised())
    }

    pub fn integral(&self) -> S {
        self.seg.integral()
    }

    pub fn simplify(&self) -> Self {
        Self::from_segment(self.seg.simplify(), self.smoothness)
    }

    pub fn restrict(&self, a: &S, b: &S) -> PiecewisePoly<S> {
        self.seg.restrict(a, b)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> PiecewiseFn<T> {
        PiecewiseFn { seg: self.seg.map_scalar(f), smoothness: self.smoothness }
    }

    pub fn to_f64(&self) -> PiecewiseFn<f64> {
        self.map_scalar(|x| x.to_f64())
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        self.seg.approx_eq(&other.seg)
    }

    /// `(t, f(t))` on a uniform grid of `n >= 2` points.
    pub fn sample(&self, n: usize) -> Vec<(f64, f64)> {
        let n = n.max(2);
        (0..n)
            .map(|i| {
                let t = S::from_frac(i as i64, (n - 1) as i64);
                (t.to_f64(), self.eval(&t).to_f64())
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    #[test]
    fn unit_of_the_algebra() {
        let f = PiecewiseFn::piecewise_linear(&[(q(0, 1), q(1, 1)), (q(1, 3), q(-2, 1)), (q(1, 1), q(4, 1))]).unwrap();
        assert!(f.mul(&PiecewiseFn::one()).approx_eq(&f));
    }

    #[test]
    fn x_times_x_is_x_squared() {
        let x = PiecewiseFn::<Q>::identity();
        let sq = x.mul(&x);
        assert_eq!(sq.eval(&q(1, 2)), q(1, 4));
        assert_eq!(sq.max_degree(), 2);
    }

    #[test]
    fn differentiating_c0_flags_jumps() {
        let hat = PiecewiseFn::piecewise_linear(&[(q(0, 1), q(0, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(0, 1))]).unwrap();
        let d = hat.differentiate();
        assert_eq!(d.smoothness(), Smoothness::Discontinuous);
        assert_eq!(d.eval(&q(1, 4)), q(2, 1));
        assert_eq!(d.eval(&q(3, 4)), q(-2, 1));
    }

    #[test]
    fn declared_smoothness_is_verified() {
        let seg = PiecewisePoly::new(
            vec![q(0, 1), q(1, 2), q(1, 1)],
            vec![Poly::constant(q(0, 1)), Poly::constant(q(1, 1))],
        )
        .unwrap();
        assert!(PiecewiseFn::new(seg.clone(), Smoothness::C0).is_err());
        assert!(PiecewiseFn::new(seg, Smoothness::Discontinuous).is_ok());
    }
}
