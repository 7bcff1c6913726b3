//! Dense univariate polynomials in a local variable `s`.

use crate::scalar::Scalar;

/// Polynomial `c[0] + c[1] s + ... + c[d] s^d`.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial has no
/// coefficients at all.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    coeffs: Vec<S>,
}

impl<S: Scalar> Poly<S> {
    pub fn new(mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: S) -> Self {
        Self::new(vec![c])
    }

    /// `c0 + c1 s`.
    pub fn linear(c0: S, c1: S) -> Self {
        Self::new(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, s: &S) -> S {
        let mut acc = S::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * s;
            acc += c;
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.clone() * S::from_i64(i as i64))
            .collect();
        Self::new(coeffs)
    }

    /// Antiderivative vanishing at `s = 0`.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(S::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c.clone() / S::from_i64(i as i64 + 1));
        }
        Self::new(coeffs)
    }

    /// `∫_0^w p(s) ds`.
    pub fn integral_to(&self, w: &S) -> S {
        self.antiderivative().eval(w)
    }

    pub fn scale(&self, k: &S) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| match (self.coeffs.get(i), other.coeffs.get(i)) {
                (Some(a), Some(b)) => a.clone() + b.clone(),
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => S::zero(),
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![S::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += &(a.clone() * b);
            }
        }
        Self::new(out)
    }

    /// `s ↦ p(c0 + c1 s)`.
    pub fn compose_linear(&self, c0: &S, c1: &S) -> Self {
        let shifted = self.shift(c0);
        let mut power = S::one();
        let mut coeffs = Vec::with_capacity(shifted.coeffs.len());
        for c in shifted.coeffs {
            coeffs.push(c * &power);
            power = power * c1;
        }
        Self::new(coeffs)
    }

    /// Taylor shift `s ↦ p(s + c)`, by repeated synthetic division.
    pub fn shift(&self, c: &S) -> Self {
        if c.is_zero() || self.coeffs.len() < 2 {
            return self.clone();
        }
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n - 1 {
            for j in (i..n - 1).rev() {
                let t = a[j + 1].clone() * c;
                a[j] += &t;
            }
        }
        Self::new(a)
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| {
            let a = self.coeffs.get(i).cloned().unwrap_or_else(S::zero);
            let b = other.coeffs.get(i).cloned().unwrap_or_else(S::zero);
            a.approx_eq(&b)
        })
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(Scalar::to_f64).collect()
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::new(self.coeffs.iter().map(f).collect())
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
    fn eval_derivative_and_antiderivative() {
        // 1 + 2s + 3s^2
        let p = Poly::new(vec![q(1, 1), q(2, 1), q(3, 1)]);
        assert_eq!(p.eval(&q(2, 1)), q(17, 1));
        assert_eq!(p.derivative(), Poly::new(vec![q(2, 1), q(6, 1)]));
        assert_eq!(p.integral_to(&q(1, 1)), q(3, 1));
        assert_eq!(p.antiderivative().derivative(), p);
    }

    #[test]
    fn shift_matches_evaluation() {
        let p = Poly::new(vec![q(-1, 1), q(0, 1), q(5, 2), q(1, 3)]);
        let c = q(3, 7);
        let shifted = p.shift(&c);
        for x in [q(0, 1), q(1, 2), q(-2, 5)] {
            assert_eq!(shifted.eval(&x), p.eval(&(x.clone() + c.clone())));
        }
    }

    #[test]
    fn trailing_zeros_are_trimmed() {
        let p = Poly::new(vec![q(1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(p.degree(), 0);
        assert!(Poly::<Q>::new(vec![q(0, 1)]).is_zero());
        assert_eq!(p.sub(&p), Poly::zero());
    }
}
