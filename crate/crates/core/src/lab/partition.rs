//! Piecewise-linear partitions of unity on `[0, 1]` subordinate to a finite
//! open cover.
//!
//! A chain `V_{j_1}, …, V_{j_m}` is picked greedily (each step takes the
//! interval reaching furthest right among those overlapping the covered
//! part), so only consecutive links overlap. Neighbouring functions hand over
//! linearly across the middle third of each overlap and sum to one exactly;
//! intervals left out of the chain get the zero function.

use num::{One, Zero};

use crate::check::{Certificate, CheckItem};
use crate::pw::PiecewiseFn;
use crate::scalar::{format_rational, Q};

use super::LabError;

#[derive(Clone, Debug, PartialEq)]
pub struct CoverPartition {
    pub cover: Vec<(Q, Q)>,
    pub rhos: Vec<PiecewiseFn<Q>>,
    chain: Vec<usize>,
    ramps: Vec<(Q, Q)>,
}

impl CoverPartition {
    /// Indices of the cover sets whose function is not identically zero.
    pub fn active(&self) -> Vec<usize> {
        (0..self.rhos.len()).filter(|&j| !is_zero_fn(&self.rhos[j])).collect()
    }

    /// `Σ_j weights[j] ρ_j`, read off the chain: constant on each plateau,
    /// linear across each hand-over ramp.
    pub fn combine(&self, weights: &[Q]) -> PiecewiseFn<Q> {
        let w = |i: usize| weights[self.chain[i]].clone();
        let mut knots = vec![(Q::zero(), w(0))];
        for (i, (p, q)) in self.ramps.iter().enumerate() {
            knots.push((p.clone(), w(i)));
            knots.push((q.clone(), w(i + 1)));
        }
        knots.push((Q::one(), w(self.chain.len() - 1)));
        PiecewiseFn::piecewise_linear(&knots).expect("ramps are ordered inside (0, 1)")
    }

    /// The three partition clauses, each as an exact check.
    pub fn verify(&self) -> Certificate {
        let mut c = Certificate::default();
        for (j, (rho, (a, b))) in self.rhos.iter().zip(&self.cover).enumerate() {
            let seg = rho.segment();
            let linear = seg.max_degree() <= 1;
            let values: Vec<Q> = seg.breaks().iter().map(|t| rho.eval(t)).collect();
            let in_range = linear && values.iter().all(|v| *v >= Q::zero() && *v <= Q::one());
            c.push(CheckItem::holds(format!("range[{j}]: 0 <= rho_{j} <= 1"), in_range));
            c.push(CheckItem::holds(
                format!("support[{j}]: rho_{j} = 0 off ({}, {})", format_rational(a), format_rational(b)),
                vanishes_outside(rho, a, b),
            ));
        }
        let total = self.rhos.iter().fold(PiecewiseFn::zero(), |acc, r| acc.add(r)).add_constant(&-Q::one());
        c.push(CheckItem::holds("sum: rho_1 + ... + rho_m = 1", is_zero_fn(&total)));
        c
    }
}

fn is_zero_fn(f: &PiecewiseFn<Q>) -> bool {
    f.segment().polys().iter().all(|p| p.is_zero())
}

// A polynomial vanishing on an interval of positive length is zero; on a
// single point only the value is checked.
fn vanishes_outside(rho: &PiecewiseFn<Q>, a: &Q, b: &Q) -> bool {
    let seg = rho.segment();
    seg.polys().iter().enumerate().all(|(i, p)| {
        let (l, r) = (&seg.breaks()[i], &seg.breaks()[i + 1]);
        let part_ok = |lo: &Q, hi: &Q| {
            if lo > hi {
                true
            } else if lo == hi {
                p.eval(&(lo.clone() - l)).is_zero()
            } else {
                p.is_zero()
            }
        };
        part_ok(l, &a.clone().min(r.clone())) && part_ok(&b.clone().max(l.clone()), r)
    })
}

/// Partition of unity subordinate to the open intervals `cover` of `[0, 1]`.
pub fn partition_of_unity(cover: &[(Q, Q)]) -> Result<CoverPartition, LabError> {
    if let Some((a, b)) = cover.iter().find(|(a, b)| a >= b) {
        return Err(LabError::InvalidInput(format!("empty interval ({}, {})", format_rational(a), format_rational(b))));
    }
    let chain = greedy_chain(cover)?;
    let m = chain.len();
    // hand-over ramps [p_i, q_i] inside the overlap of links i and i + 1
    let ramps: Vec<(Q, Q)> = (0..m - 1)
        .map(|i| {
            let lo = cover[chain[i + 1]].0.clone();
            let hi = cover[chain[i]].1.clone();
            let third = (hi.clone() - lo.clone()) / Q::from_integer(3.into());
            (lo + third.clone(), hi - third)
        })
        .collect();
    let mut rhos = vec![PiecewiseFn::zero(); cover.len()];
    for (i, &j) in chain.iter().enumerate() {
        let start = if i == 0 { Q::one() } else { Q::zero() };
        let mut knots = vec![(Q::zero(), start)];
        if i > 0 {
            knots.push((ramps[i - 1].0.clone(), Q::zero()));
            knots.push((ramps[i - 1].1.clone(), Q::one()));
        }
        if i + 1 < m {
            knots.push((ramps[i].0.clone(), Q::one()));
            knots.push((ramps[i].1.clone(), Q::zero()));
        }
        let end = if i + 1 == m { Q::one() } else { Q::zero() };
        knots.push((Q::one(), end));
        rhos[j] = PiecewiseFn::piecewise_linear(&knots).expect("ramps are ordered inside (0, 1)");
    }
    Ok(CoverPartition { cover: cover.to_vec(), rhos, chain, ramps })
}

/// Cover indices sorted by left endpoint (ties by index).
fn by_left_end(cover: &[(Q, Q)]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..cover.len()).collect();
    idx.sort_by(|&i, &j| cover[i].0.cmp(&cover[j].0).then(i.cmp(&j)));
    idx
}

// Each link is the interval reaching furthest right among those that start
// strictly left of the covered stretch; since the best candidate is taken
// every time, link i + 2 starts at or after the right end of link i.
fn greedy_chain(cover: &[(Q, Q)]) -> Result<Vec<usize>, LabError> {
    let idx = by_left_end(cover);
    let mut chain = Vec::new();
    let mut reach = Q::zero();
    let mut next = 0;
    let mut best: Option<usize> = None;
    loop {
        while next < idx.len() && cover[idx[next]].0 < reach {
            let i = idx[next];
            if best.is_none_or(|b| cover[i].1 > cover[b].1) {
                best = Some(i);
            }
            next += 1;
        }
        match best {
            Some(b) if cover[b].1 > reach => {
                chain.push(b);
                reach = cover[b].1.clone();
                if reach > Q::one() {
                    return Ok(chain);
                }
            }
            _ => return Err(LabError::NotCovering { point: reach }),
        }
    }
}

/// One uncovered point of `[0, 1]` per gap left by the open intervals.
pub fn uncovered_points(cover: &[(Q, Q)]) -> Vec<Q> {
    let idx = by_left_end(cover);
    let mut gaps = Vec::new();
    let mut x = Q::zero();
    let mut next = 0;
    let mut best: Option<Q> = None;
    while x <= Q::one() {
        while next < idx.len() && cover[idx[next]].0 < x {
            best = best.max(Some(cover[idx[next]].1.clone()));
            next += 1;
        }
        match &best {
            Some(b) if *b > x => x = b.clone(),
            _ => {
                gaps.push(x.clone());
                // resume at the next left endpoint, itself uncovered
                let Some(&i) = idx.get(next) else { break };
                x = cover[i].0.clone();
                while next < idx.len() && cover[idx[next]].0 <= x {
                    best = best.max(Some(cover[idx[next]].1.clone()));
                    next += 1;
                }
                x = best.clone().expect("an interval was just absorbed");
            }
        }
    }
    gaps
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    #[test]
    fn single_interval_gives_one() {
        let p = partition_of_unity(&[(q(-1, 10), q(11, 10))]).unwrap();
        assert!(p.rhos[0].approx_eq(&PiecewiseFn::one()));
        assert!(p.verify().all_passed());
    }

    #[test]
    fn two_overlapping_intervals() {
        let p = partition_of_unity(&[(q(-1, 10), q(6, 10)), (q(4, 10), q(11, 10))]).unwrap();
        assert!(p.verify().all_passed());
        assert_eq!(p.rhos[0].eval(&q(1, 4)), q(1, 1));
        assert_eq!(p.rhos[1].eval(&q(7, 10)), q(1, 1));
        assert_eq!(p.rhos[0].eval(&q(1, 2)), q(1, 2));
    }

    #[test]
    fn redundant_sets_get_zero() {
        let cover = [(q(-1, 10), q(6, 10)), (q(1, 10), q(2, 10)), (q(4, 10), q(11, 10))];
        let p = partition_of_unity(&cover).unwrap();
        assert_eq!(p.active(), vec![0, 2]);
        assert!(p.verify().all_passed());
    }

    #[test]
    fn gaps_are_reported() {
        let err = partition_of_unity(&[(q(-1, 10), q(1, 2)), (q(1, 2), q(11, 10))]).unwrap_err();
        assert_eq!(err, LabError::NotCovering { point: q(1, 2) });
        let err = partition_of_unity(&[(q(0, 1), q(11, 10))]).unwrap_err();
        assert_eq!(err, LabError::NotCovering { point: q(0, 1) });
        assert!(partition_of_unity(&[(q(-1, 10), q(1, 1))]).is_err());
    }

    #[test]
    fn combination_matches_the_plain_sum() {
        let cover: Vec<(Q, Q)> = (0..12).map(|i| (q(i - 1, 10), q(i + 1, 10))).chain([(q(1, 5), q(9, 10))]).collect();
        let p = partition_of_unity(&cover).unwrap();
        assert!(p.verify().all_passed());
        let w: Vec<Q> = (0..cover.len() as i64).map(|i| q(i * i - 7, 3)).collect();
        let plain = p.rhos.iter().zip(&w).fold(PiecewiseFn::zero(), |acc, (r, c)| acc.add(&r.scale(c)));
        assert!(p.combine(&w).approx_eq(&plain));
    }

    #[test]
    fn gaps_are_listed_once_each() {
        let cover = [(q(-1, 10), q(1, 5)), (q(3, 10), q(1, 2)), (q(1, 2), q(9, 10))];
        assert_eq!(uncovered_points(&cover), vec![q(1, 5), q(1, 2), q(9, 10)]);
        assert!(uncovered_points(&[(q(-1, 1), q(2, 1))]).is_empty());
        assert_eq!(uncovered_points(&[]), vec![q(0, 1)]);
    }

    #[test]
    fn support_check_catches_leaks() {
        let mut p = partition_of_unity(&[(q(-1, 10), q(6, 10)), (q(4, 10), q(11, 10))]).unwrap();
        p.cover[0].1 = q(1, 2);
        assert!(!p.verify().all_passed());
    }
}
