//! Compact subsets of `[0, 1]` given as finite unions of closed intervals, and
//! the Smith–Volterra–Cantor stages used for `K`.

use num::bigint::BigInt;
use num::One;

use super::function::{PiecewiseFn, Smoothness};
use super::segment::PiecewisePoly;
use super::PwError;
use crate::scalar::{Scalar, Q};

/// Sorted, pairwise disjoint closed intervals `[l_i, r_i] ⊂ [0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntervalUnion<S> {
    components: Vec<(S, S)>,
}

impl<S: Scalar> IntervalUnion<S> {
    pub fn new(components: Vec<(S, S)>) -> Result<Self, PwError> {
        for (l, r) in &components {
            if l > r || *l < S::zero() || *r > S::one() {
                return Err(PwError::Malformed("interval endpoints must satisfy 0 <= l <= r <= 1".into()));
            }
        }
        if components.windows(2).any(|w| w[0].1 >= w[1].0) {
            return Err(PwError::Malformed("components must be sorted and pairwise disjoint".into()));
        }
        Ok(Self { components })
    }

    pub fn empty() -> Self {
        Self { components: Vec::new() }
    }

    pub fn unit() -> Self {
        Self { components: vec![(S::zero(), S::one())] }
    }

    pub fn components(&self) -> &[(S, S)] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Lebesgue measure, exact in rational mode.
    pub fn measure(&self) -> S {
        self.components.iter().fold(S::zero(), |acc, (l, r)| acc + (r.clone() - l.clone()))
    }

    pub fn lengths(&self) -> impl Iterator<Item = S> + '_ {
        self.components.iter().map(|(l, r)| r.clone() - l.clone())
    }

    /// Gap lengths between consecutive components.
    pub fn gaps(&self) -> Vec<S> {
        self.components.windows(2).map(|w| w[1].0.clone() - w[0].1.clone()).collect()
    }

    pub fn contains_point(&self, x: &S) -> bool {
        self.component_of(x).is_some()
    }

    pub fn component_of(&self, x: &S) -> Option<usize> {
        let i = self.components.partition_point(|(l, _)| l <= x);
        (i > 0 && *x <= self.components[i - 1].1).then(|| i - 1)
    }

    /// Index of the component of `self` containing `[a, b]`, if any.
    pub fn component_containing(&self, a: &S, b: &S) -> Option<usize> {
        self.component_of(a).filter(|&i| *b <= self.components[i].1)
    }

    /// Every component of `other` lies inside a component of `self`.
    pub fn contains_union(&self, other: &Self) -> bool {
        other.components.iter().all(|(a, b)| self.component_containing(a, b).is_some())
    }

    /// Measure of `self ∩ [a, b]`.
    pub fn measure_within(&self, a: &S, b: &S) -> S {
        self.components.iter().fold(S::zero(), |acc, (l, r)| {
            let lo = if l > a { l.clone() } else { a.clone() };
            let hi = if r < b { r.clone() } else { b.clone() };
            if hi > lo {
                acc + (hi - lo)
            } else {
                acc
            }
        })
    }

    /// Disjoint union; fails when the pieces overlap.
    pub fn disjoint_union(&self, other: &Self) -> Result<Self, PwError> {
        let mut all: Vec<(S, S)> = self.components.iter().chain(&other.components).cloned().collect();
        all.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("ordered scalars"));
        Self::new(all)
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> IntervalUnion<T> {
        IntervalUnion { components: self.components.iter().map(|(l, r)| (f(l), f(r))).collect() }
    }

    pub fn indicator(&self) -> Indicator<S> {
        Indicator { set: self.clone() }
    }
}

/// `χ_S`: 1 on the set, 0 off it.
#[derive(Clone, Debug, PartialEq)]
pub struct Indicator<S> {
    pub set: IntervalUnion<S>,
}

impl<S: Scalar> Indicator<S> {
    pub fn eval(&self, x: &S) -> S {
        if self.set.contains_point(x) {
            S::one()
        } else {
            S::zero()
        }
    }

    /// `‖χ‖₂² = μ(set)`.
    pub fn l2_norm_sq(&self) -> S {
        self.set.measure()
    }

    /// The indicator as a (discontinuous) piecewise-constant function; values
    /// at the finitely many endpoints follow the left-closed piece convention.
    pub fn to_piecewise(&self) -> PiecewiseFn<S> {
        let mut parts = Vec::new();
        let mut cursor = S::zero();
        for (l, r) in self.set.components() {
            parts.push(PiecewisePoly::zero(cursor.clone(), l.clone()));
            parts.push(PiecewisePoly::constant(l.clone(), r.clone(), S::one()));
            cursor = r.clone();
        }
        parts.push(PiecewisePoly::zero(cursor, S::one()));
        let seg = PiecewisePoly::concat(parts).expect("contiguous by construction");
        PiecewiseFn::from_segment(seg.simplify(), Smoothness::Discontinuous)
    }
}

/// Parameters of a Smith–Volterra–Cantor construction: at stage `n` the open
/// middle interval of length `base^-n` is removed from every current component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct SvcParams {
    pub base: u32,
}

impl Default for SvcParams {
    fn default() -> Self {
        Self { base: 4 }
    }
}

impl SvcParams {
    /// Exact measure after `depth` stages: `1 - Σ_{n<=depth} 2^{n-1} base^{-n}`.
    pub fn measure(&self, depth: u32) -> Q {
        let mut m = Q::one();
        for n in 1..=depth {
            m -= Q::new(BigInt::one() << (n as usize - 1), num::pow(BigInt::from(self.base), n as usize));
        }
        m
    }

    /// Length of every component at stage `depth` (all components are congruent).
    pub fn component_length(&self, depth: u32) -> Q {
        self.measure(depth) / Q::from_integer(BigInt::one() << depth as usize)
    }

    /// Total length of gaps removed strictly after stage `from` up to `depth`,
    /// inside a single stage-`from` component.
    pub fn internal_gap_measure(&self, from: u32, depth: u32) -> Q {
        let mut g = Q::from_integer(0.into());
        for s in from + 1..=depth {
            g += Q::new(BigInt::one() << (s - from - 1) as usize, num::pow(BigInt::from(self.base), s as usize));
        }
        g
    }
}

/// The stage-`depth` Smith–Volterra–Cantor set with the standard `4^-n` removals.
pub fn svc_set(depth: u32) -> Result<IntervalUnion<Q>, PwError> {
    svc_set_with(depth, SvcParams::default())
}

pub fn svc_set_with(depth: u32, params: SvcParams) -> Result<IntervalUnion<Q>, PwError> {
    if depth == 0 {
        return Err(PwError::Malformed("svc depth must be at least 1".into()));
    }
    if params.base < 4 {
        return Err(PwError::Malformed("svc base must be at least 4".into()));
    }
    let two = Q::from_integer(2.into());
    let mut comps = vec![(Q::from_integer(0.into()), Q::one())];
    for n in 1..=depth {
        let removed = Q::new(BigInt::one(), num::pow(BigInt::from(params.base), n as usize));
        let half = &removed / &two;
        let mut next = Vec::with_capacity(comps.len() * 2);
        for (l, r) in comps {
            let mid = (&l + &r) / &two;
            next.push((l, &mid - &half));
            next.push((&mid + &half, r));
        }
        comps = next;
    }
    Ok(IntervalUnion { components: comps })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    #[test]
    fn first_stage_by_hand() {
        let k = svc_set(1).unwrap();
        assert_eq!(k.components(), &[(q(0, 1), q(3, 8)), (q(5, 8), q(1, 1))]);
        assert_eq!(k.measure(), q(3, 4));
    }

    #[test]
    fn second_and_third_stage_measures() {
        let k2 = svc_set(2).unwrap();
        assert_eq!(k2.len(), 4);
        assert_eq!(k2.measure(), q(3, 4) - q(2, 16));
        assert_eq!(svc_set(3).unwrap().measure(), q(9, 16));
    }

    #[test]
    fn closed_form_measure_matches_construction() {
        let p = SvcParams::default();
        for d in 1..=8 {
            assert_eq!(svc_set(d).unwrap().measure(), p.measure(d));
            let k = svc_set(d).unwrap();
            assert!(k.lengths().all(|l| l == p.component_length(d)));
        }
    }

    #[test]
    fn empty_and_unit_measures() {
        assert_eq!(IntervalUnion::<Q>::empty().measure(), q(0, 1));
        assert_eq!(IntervalUnion::<Q>::unit().measure(), q(1, 1));
    }

    #[test]
    fn rejects_overlaps_and_out_of_range() {
        assert!(IntervalUnion::new(vec![(q(0, 1), q(1, 2)), (q(1, 2), q(1, 1))]).is_err());
        assert!(IntervalUnion::new(vec![(q(-1, 2), q(1, 2))]).is_err());
        assert!(IntervalUnion::new(vec![(q(1, 2), q(1, 4))]).is_err());
        assert!(svc_set(0).is_err());
    }

    #[test]
    fn indicator_norm_is_measure() {
        let k = svc_set(3).unwrap();
        let chi = k.indicator();
        let pw = chi.to_piecewise();
        assert_eq!(pw.mul(&pw).integral(), chi.l2_norm_sq());
        assert_eq!(chi.eval(&q(1, 2)), q(0, 1));
        assert_eq!(chi.eval(&q(0, 1)), q(1, 1));
    }

    #[test]
    fn measure_within_counts_overlap() {
        let k = svc_set(1).unwrap();
        assert_eq!(k.measure_within(&q(1, 4), &q(3, 4)), q(1, 8) + q(1, 8));
    }

    #[test]
    fn larger_base_removes_less() {
        let p = SvcParams { base: 8 };
        let k = svc_set_with(3, p).unwrap();
        assert_eq!(k.measure(), p.measure(3));
        assert!(k.measure() > svc_set(3).unwrap().measure());
    }
}
