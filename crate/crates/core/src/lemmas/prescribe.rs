//! Perturbing a C¹ function by less than `eps` so that its derivative on `K`
//! becomes a prescribed continuous function.
//!
//! With `h` a continuous extension of `a - f'` off `K`, `K` is covered by
//! closed intervals `I_j = [α_j, β_j]` (endpoints in gaps, except `α_1 = 0`
//! and `β_n = 1`). On `I_j` the correction is `ψ(x) = ∫_{α_j}^x h`; on the gap
//! `(β_j, α_{j+1})` it is a boundary bump plus the line that carries the value
//! `a_j = ∫_{I_j} h` down to zero, with the bump's end slopes chosen so `ψ` is C¹.
//!
//! The cover is cut by mass: every `I_j` carries `∫_{I_j} |h| <= δ·‖h‖_∞`.
//! That is all the sup-norm estimate uses, and it is achievable for fat Cantor
//! stages whose components are wider than `δ`.

use crate::check::{Certificate, CheckItem};
use crate::pw::{IntervalUnion, PiecewiseFn, PiecewisePoly, SetFn, Smoothness};
use crate::scalar::{dyadic_floor, min_of, Scalar};

use super::bump::{bump_with_width, BumpSpec};
use super::tietze::tietze_extend;
use super::LemmaError;

/// `g = ψ + f` together with the intermediate objects of the construction.
#[derive(Clone, Debug)]
pub struct Prescribed<S> {
    pub g: PiecewiseFn<S>,
    pub psi: PiecewiseFn<S>,
    pub h: PiecewiseFn<S>,
    /// Upper bound for `‖h‖_∞` used to size `δ`.
    pub h_norm: S,
    pub delta: S,
    pub cover: Vec<(S, S)>,
    /// `a_j = ∫_{I_j} h` for every cover interval but the last.
    pub corrections: Vec<S>,
    pub eps: S,
    target: SetFn<S>,
    f: PiecewiseFn<S>,
}

pub fn prescribe_derivative<S: Scalar>(
    k: &IntervalUnion<S>,
    a: &SetFn<S>,
    f: &PiecewiseFn<S>,
    eps: &S,
) -> Result<Prescribed<S>, LemmaError> {
    if *eps <= S::zero() {
        return Err(LemmaError::InvalidInput("eps must be positive".into()));
    }
    if f.smoothness() < Smoothness::C1 {
        return Err(LemmaError::InvalidInput("f must be declared C1".into()));
    }
    if a.domain() != k {
        return Err(LemmaError::InvalidInput("a is not defined on K".into()));
    }
    let residual = a.sub(&SetFn::restrict(&f.differentiate(), k))?;
    let h = tietze_extend(k, &residual)?;
    let h_norm = h.segment().sup_abs_bound();
    let two = S::from_i64(2);
    let delta = dyadic_floor(&(eps.clone() / (two.clone() * (S::one() + h_norm.clone()))));

    if h_norm.is_zero() {
        return Ok(Prescribed {
            g: f.clone(),
            psi: PiecewiseFn::zero(),
            h,
            h_norm,
            delta,
            cover: vec![(S::zero(), S::one())],
            corrections: Vec::new(),
            eps: eps.clone(),
            target: a.clone(),
            f: f.clone(),
        });
    }

    let cover = mass_cover(k, &h, &h_norm, &delta)?;
    let mut parts = Vec::with_capacity(3 * cover.len());
    let mut corrections = Vec::with_capacity(cover.len());
    for (j, (alpha, beta)) in cover.iter().enumerate() {
        let on_cover = h.restrict(alpha, beta).antiderivative(S::zero());
        let aj = on_cover.value_at_hi();
        parts.push(on_cover);
        let Some((next_alpha, _)) = cover.get(j + 1) else { break };
        let width = next_alpha.clone() - beta.clone();
        let slope = aj.clone() / width;
        let spec = BumpSpec::new(
            beta.clone(),
            next_alpha.clone(),
            h.eval(beta) + slope.clone(),
            h.eval(next_alpha) + slope,
            delta.clone(),
        )?;
        let bump = bump_with_width(&spec, dyadic_floor(&spec.delta()))?;
        let line = PiecewisePoly::affine(beta.clone(), next_alpha.clone(), aj.clone(), S::zero());
        parts.push(bump.f.add(&line));
        corrections.push(aj);
    }
    let seg = PiecewisePoly::concat(parts)?.simplify();
    let psi = PiecewiseFn::new(seg, Smoothness::C1)?;
    let g = psi.add(f).simplify();
    Ok(Prescribed { g, psi, h, h_norm, delta, cover, corrections, eps: eps.clone(), target: a.clone(), f: f.clone() })
}

/// Greedy cover of `K` by intervals whose `|h|`-mass stays below `δ·‖h‖`.
fn mass_cover<S: Scalar>(
    k: &IntervalUnion<S>,
    h: &PiecewiseFn<S>,
    h_norm: &S,
    delta: &S,
) -> Result<Vec<(S, S)>, LemmaError> {
    let budget = delta.clone() * h_norm.clone();
    let four = S::from_i64(4);
    let quarter_delta = delta.clone() / four.clone();
    let mass = |lo: &S, hi: &S| h.restrict(lo, hi).l1_bound();
    let comps = k.components();
    let mut cover = Vec::new();
    if comps.is_empty() {
        return Ok(vec![(S::zero(), S::one())]);
    }

    // Leading stretch before the first component.
    let l0 = comps[0].0.clone();
    let mut start = S::zero();
    let mut acc = S::zero();
    if l0 > S::zero() {
        let w = min_of(l0.clone() / four.clone(), quarter_delta.clone());
        cover.push((S::zero(), w.clone()));
        start = l0.clone() - w;
        acc = mass(&start, &l0);
    }

    // flank width and candidate cut points inside gap i (between comps i, i+1)
    let flank = |i: usize| -> (S, S) {
        let r = comps[i].1.clone();
        let l = comps[i + 1].0.clone();
        let w = min_of((l.clone() - r.clone()) / four.clone(), quarter_delta.clone());
        (r + w.clone(), l - w)
    };
    let last = comps.len() - 1;
    let r_last = comps[last].1.clone();
    let tail = if r_last < S::one() {
        let w = min_of((S::one() - r_last.clone()) / four.clone(), quarter_delta.clone());
        Some(r_last.clone() + w)
    } else {
        None
    };
    let closing = |i: usize| -> S {
        if i < last {
            mass(&comps[i].1, &flank(i).0)
        } else if let Some(end) = &tail {
            mass(&r_last, end)
        } else {
            S::zero()
        }
    };

    let mut first_in_cover = 0usize;
    for i in 0..comps.len() {
        let own = mass(&comps[i].0, &comps[i].1);
        let joined = if i == first_in_cover {
            acc.clone() + own.clone()
        } else {
            acc.clone() + mass(&comps[i - 1].1, &comps[i].0) + own.clone()
        };
        if joined.clone() + closing(i) <= budget {
            acc = joined;
            continue;
        }
        if i == first_in_cover {
            return Err(LemmaError::CoverInfeasible {
                component: i,
                mass: (joined + closing(i)).to_f64(),
                budget: budget.to_f64(),
            });
        }
        // close the running interval after component i - 1 and restart
        let (cut, restart) = flank(i - 1);
        cover.push((start, cut));
        start = restart.clone();
        first_in_cover = i;
        acc = mass(&restart, &comps[i].0) + own;
        if acc.clone() + closing(i) > budget {
            return Err(LemmaError::CoverInfeasible {
                component: i,
                mass: (acc + closing(i)).to_f64(),
                budget: budget.to_f64(),
            });
        }
    }
    match tail {
        Some(end) => {
            let w = end.clone() - r_last;
            cover.push((start, end));
            cover.push((S::one() - w, S::one()));
        }
        None => cover.push((start, S::one())),
    }
    Ok(cover)
}

impl<S: Scalar> Prescribed<S> {
    /// `g'|_K = a` as exact identities, the sup-norm bounds and C¹ regularity.
    pub fn certificate(&self) -> Certificate {
        let mut c = Certificate::default();
        let k = self.target.domain();
        let g_prime = SetFn::restrict(&self.g.differentiate(), k);
        c.push(CheckItem::holds("g'|_K = a", g_prime.equals(&self.target)));
        c.push(CheckItem::holds("g is C1", self.g.verify_smoothness().is_none() && self.g.segment().is_continuous(1)));
        let psi_sup = self.psi.segment().sup_abs();
        let bound = (self.delta.clone() * (S::one() + self.h_norm.clone())).to_f64();
        c.push(CheckItem::le("sup|psi| <= delta*(1+|h|)", psi_sup, bound));
        let dist = self.g.sub(&self.f).segment().sup_abs();
        c.push(CheckItem::lt("sup|g-f| < eps", dist, self.eps.to_f64()));
        let covered = self.cover.iter().fold(IntervalUnion::empty(), |acc: IntervalUnion<S>, (lo, hi)| {
            acc.disjoint_union(&IntervalUnion::new(vec![(lo.clone(), hi.clone())]).expect("ordered"))
                .expect("cover intervals are disjoint")
        });
        c.push(CheckItem::holds("K inside the cover", covered.contains_union(k)));
        c
    }
}
