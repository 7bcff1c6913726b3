//! Piecewise polynomials on a closed interval `[lo, hi]`.
//!
//! Each piece is stored in the local coordinate `s = x - breaks[i]`, which keeps
//! float evaluation well conditioned for the very narrow pieces produced by the
//! bump constructions.

use super::extremum;
use super::poly::Poly;
use super::PwError;
use crate::scalar::{max_of, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePoly<S> {
    breaks: Vec<S>,
    polys: Vec<Poly<S>>,
}

impl<S: Scalar> PiecewisePoly<S> {
    /// Breakpoints must be strictly increasing, except for a single degenerate
    /// piece with `lo == hi`.
    pub fn new(breaks: Vec<S>, polys: Vec<Poly<S>>) -> Result<Self, PwError> {
        if polys.is_empty() || breaks.len() != polys.len() + 1 {
            return Err(PwError::Malformed("breakpoint/piece count mismatch".into()));
        }
        let degenerate = polys.len() == 1 && breaks[0] == breaks[1];
        if !degenerate && breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PwError::Malformed("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { breaks, polys })
    }

    pub fn from_poly(lo: S, hi: S, p: Poly<S>) -> Self {
        Self { breaks: vec![lo, hi], polys: vec![p] }
    }

    pub fn constant(lo: S, hi: S, c: S) -> Self {
        Self::from_poly(lo, hi, Poly::constant(c))
    }

    pub fn zero(lo: S, hi: S) -> Self {
        Self::from_poly(lo, hi, Poly::zero())
    }

    /// The affine function through `(lo, y0)` and `(hi, y1)`.
    pub fn affine(lo: S, hi: S, y0: S, y1: S) -> Self {
        let w = hi.clone() - lo.clone();
        let slope = if w.is_zero() { S::zero() } else { (y1 - y0.clone()) / w };
        Self::from_poly(lo, hi, Poly::linear(y0, slope))
    }

    pub fn lo(&self) -> &S {
        &self.breaks[0]
    }

    pub fn hi(&self) -> &S {
        self.breaks.last().expect("non-empty")
    }

    pub fn breaks(&self) -> &[S] {
        &self.breaks
    }

    pub fn polys(&self) -> &[Poly<S>] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn width(&self, i: usize) -> S {
        self.breaks[i + 1].clone() - self.breaks[i].clone()
    }

    pub fn max_degree(&self) -> usize {
        self.polys.iter().map(Poly::degree).max().unwrap_or(0)
    }

    /// Index of the piece used to evaluate at `x`: pieces are closed on the
    /// left, and the last piece also owns `hi`.
    pub fn locate(&self, x: &S) -> usize {
        let idx = self.breaks.partition_point(|b| b <= x);
        idx.saturating_sub(1).min(self.polys.len() - 1)
    }

    pub fn eval(&self, x: &S) -> S {
        let i = self.locate(x);
        self.polys[i].eval(&(x.clone() - self.breaks[i].clone()))
    }

    pub fn eval_derivative(&self, x: &S) -> S {
        let i = self.locate(x);
        self.polys[i].derivative().eval(&(x.clone() - self.breaks[i].clone()))
    }

    /// Value of piece `i` at its right end.
    pub fn right_value(&self, i: usize) -> S {
        self.polys[i].eval(&self.width(i))
    }

    pub fn left_value(&self, i: usize) -> S {
        self.polys[i].eval(&S::zero())
    }

    pub fn value_at_lo(&self) -> S {
        self.left_value(0)
    }

    pub fn value_at_hi(&self) -> S {
        self.right_value(self.len() - 1)
    }

    pub fn map_polys(&self, f: impl Fn(&Poly<S>) -> Poly<S>) -> Self {
        Self { breaks: self.breaks.clone(), polys: self.polys.iter().map(f).collect() }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> PiecewisePoly<T> {
        PiecewisePoly {
            breaks: self.breaks.iter().map(f).collect(),
            polys: self.polys.iter().map(|p| p.map_scalar(f)).collect(),
        }
    }

    pub fn derivative(&self) -> Self {
        self.map_polys(Poly::derivative)
    }

    pub fn scale(&self, k: &S) -> Self {
        self.map_polys(|p| p.scale(k))
    }

    pub fn neg(&self) -> Self {
        self.map_polys(Poly::neg)
    }

    pub fn add_constant(&self, c: &S) -> Self {
        self.map_polys(|p| p.add(&Poly::constant(c.clone())))
    }

    /// Continuous antiderivative taking the value `start` at `lo`.
    pub fn antiderivative(&self, start: S) -> Self {
        let mut acc = start;
        let mut polys = Vec::with_capacity(self.polys.len());
        for (i, p) in self.polys.iter().enumerate() {
            let a = p.antiderivative().add(&Poly::constant(acc.clone()));
            acc = a.eval(&self.width(i));
            polys.push(a);
        }
        Self { breaks: self.breaks.clone(), polys }
    }

    pub fn integral(&self) -> S {
        self.polys
            .iter()
            .enumerate()
            .fold(S::zero(), |acc, (i, p)| acc + p.integral_to(&self.width(i)))
    }

    /// Same function on a finer partition; `breaks` must start at `lo`, end at
    /// `hi` and contain every current breakpoint.
    pub fn refine_to(&self, breaks: &[S]) -> Self {
        if breaks.len() == self.breaks.len() {
            return self.clone();
        }
        let mut polys = Vec::with_capacity(breaks.len() - 1);
        let mut i = 0;
        for t in &breaks[..breaks.len() - 1] {
            while i + 1 < self.polys.len() && self.breaks[i + 1] <= *t {
                i += 1;
            }
            polys.push(self.polys[i].shift(&(t.clone() - self.breaks[i].clone())));
        }
        Self { breaks: breaks.to_vec(), polys }
    }

    /// Restriction to `[a, b] ⊂ [lo, hi]`.
    pub fn restrict(&self, a: &S, b: &S) -> Self {
        debug_assert!(a <= b);
        if a == b {
            let i = self.locate(a);
            let p = self.polys[i].shift(&(a.clone() - self.breaks[i].clone()));
            return Self::from_poly(a.clone(), b.clone(), p);
        }
        let first = self.breaks.partition_point(|t| t <= a);
        let last = self.breaks.partition_point(|t| t < b);
        let mut breaks = vec![a.clone()];
        if first < last {
            breaks.extend_from_slice(&self.breaks[first..last]);
        }
        breaks.push(b.clone());
        let start = self.locate(a);
        let mut polys = Vec::with_capacity(breaks.len() - 1);
        polys.push(self.polys[start].shift(&(a.clone() - self.breaks[start].clone())));
        for i in first..last.max(first) {
            polys.push(self.polys[i.min(self.polys.len() - 1)].clone());
        }
        Self { breaks, polys }
    }

    /// Combine two functions on the same interval piece by piece over the
    /// merged partition.
    pub fn zip_with(&self, other: &Self, f: impl Fn(&Poly<S>, &Poly<S>) -> Poly<S>) -> Self {
        let merged = merge_sorted(&self.breaks, &other.breaks);
        let a = self.refine_to(&merged);
        let b = other.refine_to(&merged);
        let polys = a.polys.iter().zip(&b.polys).map(|(p, q)| f(p, q)).collect();
        Self { breaks: merged, polys }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, Poly::add)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, Poly::sub)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, Poly::mul)
    }

    /// Joins pieces whose polynomials continue each other exactly.
    pub fn simplify(&self) -> Self {
        let mut breaks = vec![self.breaks[0].clone()];
        let mut polys: Vec<Poly<S>> = Vec::with_capacity(self.polys.len());
        for (i, p) in self.polys.iter().enumerate() {
            if let Some(last) = polys.last() {
                let start = breaks[breaks.len() - 2].clone();
                let w = self.breaks[i].clone() - start;
                // cheap value test before the full Taylor shift
                if last.eval(&w) == p.eval(&S::zero()) && last.shift(&w) == *p {
                    *breaks.last_mut().expect("non-empty") = self.breaks[i + 1].clone();
                    continue;
                }
            }
            polys.push(p.clone());
            breaks.push(self.breaks[i + 1].clone());
        }
        Self { breaks, polys }
    }

    /// Concatenate contiguous segments, dropping zero-width pieces.
    pub fn concat(parts: Vec<Self>) -> Result<Self, PwError> {
        let mut breaks: Vec<S> = Vec::new();
        let mut polys = Vec::new();
        for part in parts {
            if let Some(end) = breaks.last() {
                if *end != *part.lo() {
                    return Err(PwError::Malformed("segments are not contiguous".into()));
                }
            }
            for (i, p) in part.polys.iter().enumerate() {
                if part.breaks[i] == part.breaks[i + 1] {
                    continue;
                }
                if breaks.is_empty() {
                    breaks.push(part.breaks[i].clone());
                }
                polys.push(p.clone());
                breaks.push(part.breaks[i + 1].clone());
            }
            if breaks.is_empty() {
                breaks.push(part.lo().clone());
            }
        }
        if polys.is_empty() {
            let at = breaks.pop().ok_or_else(|| PwError::Malformed("no segments".into()))?;
            return Ok(Self::zero(at.clone(), at));
        }
        Ok(Self { breaks, polys })
    }

    /// `sup |f|` over the segment, by per-piece extremum search in f64.
    pub fn sup_abs(&self) -> f64 {
        self.polys
            .iter()
            .enumerate()
            .map(|(i, p)| extremum::max_abs_on(&p.to_f64_coeffs(), self.width(i).to_f64()))
            .fold(0.0, f64::max)
    }

    /// `(inf f, sup f)` over the segment, in f64.
    pub fn range(&self) -> (f64, f64) {
        self.polys.iter().enumerate().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (i, p)| {
            let (a, b) = extremum::range_on(&p.to_f64_coeffs(), self.width(i).to_f64());
            (lo.min(a), hi.max(b))
        })
    }

    /// A scalar upper bound for `sup |f|`: exact for pieces of degree <= 1,
    /// otherwise the f64 extremum padded by a relative margin.
    pub fn sup_abs_bound(&self) -> S {
        let mut best = S::zero();
        for (i, p) in self.polys.iter().enumerate() {
            let b = if p.degree() <= 1 {
                max_of(p.eval(&S::zero()).abs(), p.eval(&self.width(i)).abs())
            } else {
                let m = extremum::max_abs_on(&p.to_f64_coeffs(), self.width(i).to_f64());
                S::from_ratio(&f64_upper_to_ratio(m))
            };
            best = max_of(best, b);
        }
        best
    }

    /// Upper bound for `∫ |f|` over the segment (width times a per-piece bound).
    pub fn l1_bound(&self) -> S {
        self.polys.iter().enumerate().fold(S::zero(), |acc, (i, p)| {
            let w = self.width(i);
            let b = Self::from_poly(S::zero(), w.clone(), p.clone()).sup_abs_bound();
            acc + w * b
        })
    }

    /// Largest jump in value (order 0) or first derivative (order 1) across
    /// interior breakpoints, in f64; exact-zero checks use [`Self::is_continuous`].
    pub fn max_jump(&self, order: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.polys.len().saturating_sub(1) {
            let (l, r) = self.jump_pair(i, order);
            worst = worst.max((l - r).to_f64().abs());
        }
        worst
    }

    fn jump_pair(&self, i: usize, order: usize) -> (S, S) {
        let (p, q) = match order {
            0 => (self.polys[i].clone(), self.polys[i + 1].clone()),
            _ => (self.polys[i].derivative(), self.polys[i + 1].derivative()),
        };
        (p.eval(&self.width(i)), q.eval(&S::zero()))
    }

    /// Whether values (order 0) or values and first derivatives (order 1)
    /// match across every interior breakpoint, up to the scalar tolerance.
    pub fn is_continuous(&self, order: usize) -> bool {
        (0..self.polys.len().saturating_sub(1)).all(|i| {
            (0..=order).all(|k| {
                let (l, r) = self.jump_pair(i, k);
                l.approx_eq(&r)
            })
        })
    }

    /// Function equality on a common partition, up to the scalar tolerance.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if !self.lo().approx_eq(other.lo()) || !self.hi().approx_eq(other.hi()) {
            return false;
        }
        let diff = self.sub(other);
        diff.polys.iter().all(|p| p.approx_eq(&Poly::zero()))
    }
}

/// Sorted union of two sorted breakpoint lists.
pub fn merge_sorted<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) if x < y => {
                i += 1;
                x
            }
            (Some(x), Some(y)) if y < x => {
                j += 1;
                y
            }
            (Some(x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(x), None) => {
                i += 1;
                x
            }
            (None, Some(y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        if out.last() != Some(next) {
            out.push(next.clone());
        }
    }
    out
}

/// Rational upper bound for a non-negative f64 magnitude computed by extremum
/// search, padded well above its error budget.
pub(crate) fn f64_upper_to_ratio(m: f64) -> crate::scalar::Q {
    let padded = m * (1.0 + 1e-9) + 1e-12;
    crate::scalar::Q::from_float(padded).unwrap_or_else(|| crate::scalar::Q::from_integer(i64::MAX.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    fn sample() -> PiecewisePoly<Q> {
        // x on [0, 1/2], 1 - x on [1/2, 1]
        PiecewisePoly::new(
            vec![q(0, 1), q(1, 2), q(1, 1)],
            vec![Poly::linear(q(0, 1), q(1, 1)), Poly::linear(q(1, 2), q(-1, 1))],
        )
        .unwrap()
    }

    #[test]
    fn hat_evaluates_and_integrates() {
        let f = sample();
        assert_eq!(f.eval(&q(1, 4)), q(1, 4));
        assert_eq!(f.eval(&q(3, 4)), q(1, 4));
        assert_eq!(f.eval(&q(1, 1)), q(0, 1));
        assert_eq!(f.integral(), q(1, 4));
        assert!(f.is_continuous(0));
        assert!(!f.is_continuous(1));
    }

    #[test]
    fn restrict_and_refine_preserve_values() {
        let f = sample();
        let r = f.restrict(&q(1, 3), &q(2, 3));
        assert_eq!(r.len(), 2);
        assert_eq!(r.eval(&q(1, 3)), q(1, 3));
        assert_eq!(r.integral(), q(1, 4) - q(1, 9));
        let fine = f.refine_to(&[q(0, 1), q(1, 5), q(1, 2), q(7, 8), q(1, 1)]);
        assert!(fine.approx_eq(&f));
        assert_eq!(fine.simplify(), f);
    }

    #[test]
    fn product_merges_breakpoints() {
        let f = sample();
        let g = PiecewisePoly::new(
            vec![q(0, 1), q(1, 3), q(1, 1)],
            vec![Poly::constant(q(2, 1)), Poly::constant(q(3, 1))],
        )
        .unwrap();
        let h = f.mul(&g);
        assert_eq!(h.breaks().len(), 4);
        assert_eq!(h.eval(&q(1, 4)), q(1, 2));
        assert_eq!(h.eval(&q(3, 4)), q(3, 4));
    }

    #[test]
    fn antiderivative_is_continuous() {
        let f = sample();
        let a = f.antiderivative(q(0, 1));
        assert!(a.is_continuous(0));
        assert_eq!(a.value_at_hi(), q(1, 4));
        assert!(a.derivative().approx_eq(&f));
    }

    #[test]
    fn concat_drops_degenerate_pieces() {
        let a = PiecewisePoly::constant(q(0, 1), q(1, 2), q(1, 1));
        let b = PiecewisePoly::constant(q(1, 2), q(1, 2), q(5, 1));
        let c = PiecewisePoly::constant(q(1, 2), q(1, 1), q(2, 1));
        let joined = PiecewisePoly::concat(vec![a, b, c]).unwrap();
        assert_eq!(joined.len(), 2);
        assert_eq!(joined.eval(&q(3, 4)), q(2, 1));
    }
}
