//! C¹ functions vanishing at both ends of an interval with prescribed end
//! slopes and arbitrarily small sup norm.

use crate::check::{CheckItem, Certificate};
use crate::pw::{PiecewiseFn, PiecewisePoly, Poly, Smoothness};
use crate::scalar::{max_of, min_of, Scalar};

use super::LemmaError;

/// The cubic cutoff `(1 - u)²(1 + 2u) = 1 - 3u² + 2u³`.
pub fn profile_poly<S: Scalar>() -> Poly<S> {
    Poly::new(vec![S::one(), S::zero(), S::from_i64(-3), S::from_i64(2)])
}

/// The cutoff on `[0, 1]`: non-increasing, equal to 1 with zero slope at 0 and
/// to 0 with zero slope at 1, so it extends by zero as a C¹ function.
pub fn bump_profile<S: Scalar>() -> PiecewiseFn<S> {
    PiecewiseFn::from_poly(profile_poly())
}

/// End slopes `a` at `alpha` and `b` at `beta`, sup-norm budget `eps`.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec<S> {
    pub alpha: S,
    pub beta: S,
    pub a: S,
    pub b: S,
    pub eps: S,
}

impl<S: Scalar> BumpSpec<S> {
    pub fn new(alpha: S, beta: S, a: S, b: S, eps: S) -> Result<Self, LemmaError> {
        let spec = Self { alpha, beta, a, b, eps };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), LemmaError> {
        if self.alpha >= self.beta {
            return Err(LemmaError::InvalidInput("bump needs alpha < beta".into()));
        }
        if self.eps <= S::zero() {
            return Err(LemmaError::InvalidInput("bump needs eps > 0".into()));
        }
        Ok(())
    }

    /// Half of the strict bound: `min((β-α)/2, eps / max(|a|, |b|, 1)) / 2`.
    pub fn delta(&self) -> S {
        let two = S::from_i64(2);
        let slope = max_of(max_of(self.a.abs(), self.b.abs()), S::one());
        min_of((self.beta.clone() - self.alpha.clone()) / two.clone(), self.eps.clone() / slope) / two
    }
}

/// The constructed function on `[alpha, beta]` and the width of its two
/// non-zero end pieces.
#[derive(Clone, Debug, PartialEq)]
pub struct Bump<S> {
    pub spec: BumpSpec<S>,
    pub delta: S,
    pub f: PiecewisePoly<S>,
}

/// Builds the bump with the default width [`BumpSpec::delta`].
pub fn boundary_bump<S: Scalar>(spec: &BumpSpec<S>) -> Result<Bump<S>, LemmaError> {
    spec.validate()?;
    bump_with_width(spec, spec.delta())
}

/// Builds the bump with end pieces of width `delta`; any `0 < delta <=
/// spec.delta()` keeps every postcondition.
pub fn bump_with_width<S: Scalar>(spec: &BumpSpec<S>, delta: S) -> Result<Bump<S>, LemmaError> {
    spec.validate()?;
    if delta <= S::zero() || delta > spec.delta() {
        return Err(LemmaError::InvalidInput("bump width must lie in (0, spec.delta()]".into()));
    }
    let phi = profile_poly::<S>();
    // s ↦ s·φ(s/δ)
    let scaled = phi.compose_linear(&S::zero(), &(S::one() / delta.clone()));
    let left = Poly::linear(S::zero(), S::one()).mul(&scaled);
    // near β: b(x - β)φ((β - x)/δ); with t = β - x this is -b·t·φ(t/δ), and on
    // the last piece t = δ - s.
    let right = left.scale(&(-spec.b.clone())).compose_linear(&delta, &(-S::one()));
    let left = left.scale(&spec.a);
    let a0 = spec.alpha.clone() + delta.clone();
    let b0 = spec.beta.clone() - delta.clone();
    let f = PiecewisePoly::new(
        vec![spec.alpha.clone(), a0, b0, spec.beta.clone()],
        vec![left, Poly::zero(), right],
    )?;
    Ok(Bump { spec: spec.clone(), delta, f })
}

impl<S: Scalar> Bump<S> {
    pub fn sup_abs(&self) -> f64 {
        self.f.sup_abs()
    }

    /// The bump extended by zero to `[0, 1]` when `[alpha, beta] ⊂ [0, 1]`.
    pub fn to_unit_fn(&self) -> Result<PiecewiseFn<S>, LemmaError> {
        if self.spec.alpha < S::zero() || self.spec.beta > S::one() {
            return Err(LemmaError::InvalidInput("bump interval leaves [0, 1]".into()));
        }
        let seg = PiecewisePoly::concat(vec![
            PiecewisePoly::zero(S::zero(), self.spec.alpha.clone()),
            self.f.clone(),
            PiecewisePoly::zero(self.spec.beta.clone(), S::one()),
        ])?;
        Ok(PiecewiseFn::new(seg, Smoothness::Discontinuous)?)
    }

    /// Endpoint values and slopes (exact in rational mode), C¹ matching and
    /// the sup-norm bounds.
    pub fn certificate(&self) -> Certificate {
        let s = &self.spec;
        let d = self.f.derivative();
        let sup = self.sup_abs();
        let slope = max_of(s.a.abs(), s.b.abs());
        let mut c = Certificate::default();
        c.push(CheckItem::eq("f(alpha) = 0", &self.f.value_at_lo(), &S::zero()));
        c.push(CheckItem::eq("f(beta) = 0", &self.f.value_at_hi(), &S::zero()));
        c.push(CheckItem::eq("f'(alpha) = a", &d.value_at_lo(), &s.a));
        c.push(CheckItem::eq("f'(beta) = b", &d.value_at_hi(), &s.b));
        c.push(CheckItem::holds("f is C1 on [alpha, beta]", self.f.is_continuous(1)));
        c.push(CheckItem::le("sup|f| <= delta*max(|a|,|b|)", sup, (self.delta.clone() * slope).to_f64()));
        c.push(CheckItem::lt("sup|f| < eps", sup, s.eps.to_f64()));
        c
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
    fn profile_conditions() {
        let phi = bump_profile::<Q>();
        assert_eq!(phi.eval(&q(0, 1)), q(1, 1));
        assert_eq!(phi.eval_derivative(&q(0, 1)), q(0, 1));
        assert_eq!(phi.eval(&q(1, 1)), q(0, 1));
        assert_eq!(phi.eval_derivative(&q(1, 1)), q(0, 1));
        assert_eq!(phi.eval(&q(1, 2)), q(1, 2));
        // non-increasing: φ' = 6u² - 6u <= 0 on [0, 1]
        let (lo, hi) = phi.differentiate().segment().range();
        assert!(hi <= 0.0 && lo >= -1.5 - 1e-15);
    }

    #[test]
    fn zero_prescription_is_zero() {
        let spec = BumpSpec::new(q(0, 1), q(1, 1), q(0, 1), q(0, 1), q(1, 10)).unwrap();
        let f = boundary_bump(&spec).unwrap();
        assert!(f.f.approx_eq(&PiecewisePoly::zero(q(0, 1), q(1, 1))));
    }

    #[test]
    fn left_slope_example() {
        let spec = BumpSpec::new(q(0, 1), q(1, 1), q(1, 1), q(0, 1), q(1, 10)).unwrap();
        let f = boundary_bump(&spec).unwrap();
        assert_eq!(f.delta, q(1, 20));
        let cert = f.certificate();
        assert!(cert.all_passed(), "{cert:?}");
        assert!(f.sup_abs() <= 0.05);
    }

    #[test]
    fn right_slope_support() {
        let spec = BumpSpec::new(q(0, 1), q(1, 2), q(0, 1), q(2, 1), q(1, 100)).unwrap();
        let f = boundary_bump(&spec).unwrap();
        let cert = f.certificate();
        assert!(cert.all_passed(), "{cert:?}");
        let support_start = q(1, 2) - f.delta.clone();
        assert_eq!(f.f.restrict(&q(0, 1), &support_start).sup_abs(), 0.0);
        assert_eq!(f.f.eval_derivative(&q(1, 2)), q(2, 1));
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(BumpSpec::new(q(1, 1), q(1, 1), q(0, 1), q(0, 1), q(1, 1)).is_err());
        assert!(BumpSpec::new(q(0, 1), q(1, 1), q(0, 1), q(0, 1), q(0, 1)).is_err());
        let spec = BumpSpec::new(q(0, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1)).unwrap();
        assert!(bump_with_width(&spec, q(1, 1)).is_err());
    }
}
