//! Continuous extension of a function on `K` to `[0, 1]`.

use crate::pw::{IntervalUnion, PiecewiseFn, PiecewisePoly, SetFn, Smoothness};
use crate::scalar::Scalar;

use super::LemmaError;

/// Extends `a` linearly across every gap of `K` and by constants before the
/// first and after the last component. The result agrees with `a` on `K` and
/// has the same sup norm, since interpolation cannot overshoot.
pub fn tietze_extend<S: Scalar>(k: &IntervalUnion<S>, a: &SetFn<S>) -> Result<PiecewiseFn<S>, LemmaError> {
    if a.domain() != k {
        return Err(LemmaError::InvalidInput("function is not defined on the given set".into()));
    }
    if a.pieces().iter().any(|p| !p.is_continuous(0)) {
        return Err(LemmaError::InvalidInput("function on K must be continuous".into()));
    }
    let comps = k.components();
    if comps.is_empty() {
        return Ok(PiecewiseFn::zero());
    }
    let pieces = a.pieces();
    let mut parts = Vec::with_capacity(2 * comps.len() + 1);
    parts.push(PiecewisePoly::constant(S::zero(), comps[0].0.clone(), pieces[0].value_at_lo()));
    for i in 0..comps.len() {
        parts.push(pieces[i].clone());
        if i + 1 < comps.len() {
            parts.push(PiecewisePoly::affine(
                comps[i].1.clone(),
                comps[i + 1].0.clone(),
                pieces[i].value_at_hi(),
                pieces[i + 1].value_at_lo(),
            ));
        }
    }
    let last = comps.len() - 1;
    parts.push(PiecewisePoly::constant(comps[last].1.clone(), S::one(), pieces[last].value_at_hi()));
    let seg = PiecewisePoly::concat(parts)?;
    Ok(PiecewiseFn::new(seg.simplify(), Smoothness::C0)?)
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
    fn constant_extends_to_constant() {
        let k = svc_set(3).unwrap();
        let h = tietze_extend(&k, &SetFn::constant(k.clone(), q(7, 3))).unwrap();
        assert!(h.approx_eq(&PiecewiseFn::constant(q(7, 3))));
    }

    #[test]
    fn linear_across_gap() {
        let k = svc_set(1).unwrap();
        let a = SetFn::from_constants(k.clone(), vec![q(0, 1), q(1, 1)]).unwrap();
        let h = tietze_extend(&k, &a).unwrap();
        assert_eq!(h.eval(&q(1, 2)), q(1, 2));
        assert_eq!(h.eval(&q(7, 16)), q(1, 4));
        assert!(a.equals_fn(&h));
    }

    #[test]
    fn identity_on_full_interval() {
        let k = IntervalUnion::<Q>::unit();
        let f = PiecewiseFn::monomials(vec![q(1, 1), q(-2, 1), q(3, 4)]);
        let h = tietze_extend(&k, &SetFn::restrict(&f, &k)).unwrap();
        assert!(h.approx_eq(&f));
    }
}
