//! Norms, inner products and set integrals.

use super::function::PiecewiseFn;
use super::interval::IntervalUnion;
use crate::scalar::Scalar;

/// `∫_S f`, integrating each component of `S` exactly.
pub fn integrate_over<S: Scalar>(f: &PiecewiseFn<S>, set: &IntervalUnion<S>) -> S {
    set.components().iter().fold(S::zero(), |acc, (l, r)| acc + f.restrict(l, r).integral())
}

/// `‖f‖₂²`, exact in rational mode.
pub fn l2_norm_sq<S: Scalar>(f: &PiecewiseFn<S>) -> S {
    f.mul(f).integral()
}

pub fn l2_norm<S: Scalar>(f: &PiecewiseFn<S>) -> f64 {
    l2_norm_sq(f).to_f64().max(0.0).sqrt()
}

/// `‖f‖_∞` over `[0, 1]`.
pub fn sup_norm<S: Scalar>(f: &PiecewiseFn<S>) -> f64 {
    f.segment().sup_abs()
}

/// `sup_{x ∈ S} |f(x)|`.
pub fn sup_norm_on<S: Scalar>(f: &PiecewiseFn<S>, set: &IntervalUnion<S>) -> f64 {
    set.components().iter().map(|(l, r)| f.restrict(l, r).sup_abs()).fold(0.0, f64::max)
}

/// `⟨f, g⟩_{1,2} = ∫ f g + ∫ f' g'` for real-valued functions.
pub fn sobolev_inner<S: Scalar>(f: &PiecewiseFn<S>, g: &PiecewiseFn<S>) -> S {
    f.mul(g).integral() + f.differentiate().mul(&g.differentiate()).integral()
}

pub fn sobolev_norm_sq<S: Scalar>(f: &PiecewiseFn<S>) -> S {
    sobolev_inner(f, f)
}

pub fn sobolev_norm<S: Scalar>(f: &PiecewiseFn<S>) -> f64 {
    sobolev_norm_sq(f).to_f64().max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pw::svc_set;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    #[test]
    fn elementary_norms() {
        let one = PiecewiseFn::<Q>::one();
        let x = PiecewiseFn::<Q>::identity();
        assert_eq!(sobolev_inner(&one, &one), q(1, 1));
        assert_eq!(l2_norm_sq(&x), q(1, 3));
        assert!((l2_norm(&x) - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert_eq!(sobolev_norm_sq(&x), q(4, 3));
        assert_eq!(sup_norm(&x.mul(&x)), 1.0);
    }

    #[test]
    fn set_integrals() {
        let k = svc_set(3).unwrap();
        assert_eq!(integrate_over(&PiecewiseFn::one(), &k), q(9, 16));
        assert_eq!(integrate_over(&PiecewiseFn::zero(), &k), q(0, 1));
        assert_eq!(integrate_over(&PiecewiseFn::<Q>::identity(), &IntervalUnion::unit()), q(1, 2));
    }

    #[test]
    fn sup_on_set_ignores_gaps() {
        let k = svc_set(1).unwrap();
        // hat peaking at 1/2, which lies in the gap
        let hat = PiecewiseFn::piecewise_linear(&[(q(0, 1), q(0, 1)), (q(1, 2), q(1, 1)), (q(1, 1), q(0, 1))]).unwrap();
        assert!((sup_norm_on(&hat, &k) - 0.75).abs() < 1e-15);
        assert_eq!(sup_norm(&hat), 1.0);
    }
}
