//! Functions defined only on a compact set `K` given as an [`IntervalUnion`].

use super::function::{PiecewiseFn, Smoothness};
use super::interval::IntervalUnion;
use super::segment::PiecewisePoly;
use super::PwError;
use crate::scalar::{max_of, Scalar};

/// A function on `K`: one piecewise polynomial spanning each component.
#[derive(Clone, Debug, PartialEq)]
pub struct SetFn<S> {
    domain: IntervalUnion<S>,
    pieces: Vec<PiecewisePoly<S>>,
}

impl<S: Scalar> SetFn<S> {
    pub fn new(domain: IntervalUnion<S>, pieces: Vec<PiecewisePoly<S>>) -> Result<Self, PwError> {
        if pieces.len() != domain.len() {
            return Err(PwError::DomainMismatch(format!(
                "{} pieces for {} components",
                pieces.len(),
                domain.len()
            )));
        }
        for ((l, r), p) in domain.components().iter().zip(&pieces) {
            if p.lo() != l || p.hi() != r {
                return Err(PwError::DomainMismatch("piece does not span its component".into()));
            }
        }
        Ok(Self { domain, pieces })
    }

    /// One constant per component.
    pub fn from_constants(domain: IntervalUnion<S>, values: Vec<S>) -> Result<Self, PwError> {
        if values.len() != domain.len() {
            return Err(PwError::DomainMismatch("one value per component expected".into()));
        }
        let pieces = domain
            .components()
            .iter()
            .zip(values)
            .map(|((l, r), c)| PiecewisePoly::constant(l.clone(), r.clone(), c))
            .collect();
        Ok(Self { domain, pieces })
    }

    pub fn constant(domain: IntervalUnion<S>, c: S) -> Self {
        let n = domain.len();
        Self::from_constants(domain, vec![c; n]).expect("lengths agree")
    }

    pub fn zero(domain: IntervalUnion<S>) -> Self {
        Self::constant(domain, S::zero())
    }

    /// `f|_K`.
    pub fn restrict(f: &PiecewiseFn<S>, domain: &IntervalUnion<S>) -> Self {
        let pieces = domain.components().iter().map(|(l, r)| f.restrict(l, r)).collect();
        Self { domain: domain.clone(), pieces }
    }

    pub fn domain(&self) -> &IntervalUnion<S> {
        &self.domain
    }

    pub fn pieces(&self) -> &[PiecewisePoly<S>] {
        &self.pieces
    }

    /// `None` off the domain.
    pub fn eval(&self, x: &S) -> Option<S> {
        self.domain.component_of(x).map(|i| self.pieces[i].eval(x))
    }

    fn zip(&self, other: &Self, f: impl Fn(&PiecewisePoly<S>, &PiecewisePoly<S>) -> PiecewisePoly<S>) -> Result<Self, PwError> {
        if self.domain != other.domain {
            return Err(PwError::DomainMismatch("SetFn operands live on different sets".into()));
        }
        let pieces = self.pieces.iter().zip(&other.pieces).map(|(a, b)| f(a, b)).collect();
        Ok(Self { domain: self.domain.clone(), pieces })
    }

    pub fn add(&self, other: &Self) -> Result<Self, PwError> {
        self.zip(other, PiecewisePoly::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, PwError> {
        self.zip(other, PiecewisePoly::sub)
    }

    pub fn mul(&self, other: &Self) -> Result<Self, PwError> {
        self.zip(other, PiecewisePoly::mul)
    }

    /// `self + f|_K`.
    pub fn add_fn(&self, f: &PiecewiseFn<S>) -> Self {
        self.add(&Self::restrict(f, &self.domain)).expect("same domain")
    }

    pub fn mul_fn(&self, f: &PiecewiseFn<S>) -> Self {
        self.mul(&Self::restrict(f, &self.domain)).expect("same domain")
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { domain: self.domain.clone(), pieces: self.pieces.iter().map(|p| p.scale(k)).collect() }
    }

    pub fn neg(&self) -> Self {
        Self { domain: self.domain.clone(), pieces: self.pieces.iter().map(PiecewisePoly::neg).collect() }
    }

    /// Piecewise derivative on each component.
    pub fn differentiate(&self) -> Self {
        Self { domain: self.domain.clone(), pieces: self.pieces.iter().map(PiecewisePoly::derivative).collect() }
    }

    pub fn simplify(&self) -> Self {
        Self { domain: self.domain.clone(), pieces: self.pieces.iter().map(PiecewisePoly::simplify).collect() }
    }

    /// `∫_K f`.
    pub fn integral(&self) -> S {
        self.pieces.iter().fold(S::zero(), |acc, p| acc + p.integral())
    }

    /// `∫_T f` for a set `T` contained in the domain.
    pub fn integrate_over(&self, set: &IntervalUnion<S>) -> Result<S, PwError> {
        let mut acc = S::zero();
        for (a, b) in set.components() {
            let i = self
                .domain
                .component_containing(a, b)
                .ok_or_else(|| PwError::DomainMismatch("integration set leaves the SetFn domain".into()))?;
            acc = acc + self.pieces[i].restrict(a, b).integral();
        }
        Ok(acc)
    }

    /// Exact (rational mode) or tolerance-based (float mode) function equality.
    pub fn equals(&self, other: &Self) -> bool {
        self.domain == other.domain && self.pieces.iter().zip(&other.pieces).all(|(a, b)| a.approx_eq(b))
    }

    /// Whether this equals `f|_K` as polynomial identities on each component.
    pub fn equals_fn(&self, f: &PiecewiseFn<S>) -> bool {
        self.equals(&Self::restrict(f, &self.domain))
    }

    pub fn sup_abs(&self) -> f64 {
        self.pieces.iter().map(PiecewisePoly::sup_abs).fold(0.0, f64::max)
    }

    pub fn sup_abs_bound(&self) -> S {
        self.pieces.iter().fold(S::zero(), |m, p| max_of(m, p.sup_abs_bound()))
    }

    pub fn max_degree(&self) -> usize {
        self.pieces.iter().map(PiecewisePoly::max_degree).max().unwrap_or(0)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> SetFn<T> {
        SetFn { domain: self.domain.map_scalar(f), pieces: self.pieces.iter().map(|p| p.map_scalar(f)).collect() }
    }

    pub fn to_f64(&self) -> SetFn<f64> {
        self.map_scalar(|x| x.to_f64())
    }
}

/// `B(x) = ∫_{K ∩ [x, 1]} A(t) dt`: continuous, constant on every gap of `K`,
/// and `B(1) = 0`.
pub fn set_antiderivative<S: Scalar>(a: &SetFn<S>) -> PiecewiseFn<S> {
    let comps = a.domain().components();
    // tails[i] = ∫ of A over the components strictly right of i
    let mut tails = vec![S::zero(); comps.len() + 1];
    for i in (0..comps.len()).rev() {
        tails[i] = tails[i + 1].clone() + a.pieces()[i].integral();
    }
    let mut parts = Vec::with_capacity(2 * comps.len() + 1);
    let mut cursor = S::zero();
    for (i, ((l, r), piece)) in comps.iter().zip(a.pieces()).enumerate() {
        parts.push(PiecewisePoly::constant(cursor, l.clone(), tails[i].clone()));
        // On [l, r]: B(x) = tail_{i+1} + ∫_x^r A = tails[i] - ∫_l^x A.
        let running = piece.antiderivative(S::zero());
        parts.push(running.neg().add_constant(&tails[i]));
        cursor = r.clone();
    }
    parts.push(PiecewisePoly::constant(cursor, S::one(), S::zero()));
    let seg = PiecewisePoly::concat(parts).expect("contiguous by construction");
    PiecewiseFn::from_segment(seg.simplify(), Smoothness::C0)
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
    fn zero_density_gives_zero_antiderivative() {
        let k = svc_set(3).unwrap();
        let b = set_antiderivative(&SetFn::zero(k));
        assert!(b.approx_eq(&PiecewiseFn::zero()));
    }

    #[test]
    fn unit_density_recovers_measure_at_zero() {
        let k = svc_set(4).unwrap();
        let b = set_antiderivative(&SetFn::constant(k.clone(), q(1, 1)));
        assert_eq!(b.eval(&q(0, 1)), k.measure());
        assert_eq!(b.eval(&q(1, 1)), q(0, 1));
        assert!(b.segment().is_continuous(0));
    }

    #[test]
    fn antiderivative_is_flat_on_gaps() {
        let k = svc_set(2).unwrap();
        let a = SetFn::from_constants(k.clone(), vec![q(1, 1), q(-2, 1), q(3, 1), q(5, 7)]).unwrap();
        let b = set_antiderivative(&a);
        let c = k.components();
        for w in c.windows(2) {
            let mid = (w[0].1.clone() + w[1].0.clone()) / q(2, 1);
            assert_eq!(b.eval(&w[0].1), b.eval(&mid));
            assert_eq!(b.eval(&w[1].0), b.eval(&mid));
            assert_eq!(b.eval_derivative(&mid), q(0, 1));
        }
        // B' = -A inside components
        let mid0 = (c[1].0.clone() + c[1].1.clone()) / q(2, 1);
        assert_eq!(b.eval_derivative(&mid0), q(2, 1));
    }

    #[test]
    fn restriction_round_trips() {
        let k = svc_set(2).unwrap();
        let f = PiecewiseFn::monomials(vec![q(1, 1), q(-1, 3), q(2, 1)]);
        let a = SetFn::restrict(&f, &k);
        assert!(a.equals_fn(&f));
        assert_eq!(a.eval(&q(1, 2)), None);
        assert_eq!(a.eval(&q(1, 8)), Some(f.eval(&q(1, 8))));
    }

    #[test]
    fn integrate_over_subset() {
        let k = svc_set(1).unwrap();
        let a = SetFn::constant(k.clone(), q(2, 1));
        let sub = IntervalUnion::new(vec![(q(0, 1), q(1, 8))]).unwrap();
        assert_eq!(a.integrate_over(&sub).unwrap(), q(1, 4));
        let outside = IntervalUnion::new(vec![(q(1, 4), q(1, 2))]).unwrap();
        assert!(a.integrate_over(&outside).is_err());
    }
}
