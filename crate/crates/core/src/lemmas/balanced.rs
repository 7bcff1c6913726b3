//! A zero-mean function `A` on `K` whose tail integral `B(x) = ∫_{K∩[x,1]} A`
//! nearly cancels the indicator of `K` in `L²`.
//!
//! Components of `K` are grouped into blocks by cutting at every gap at least
//! as long as a threshold `τ`. Inside a block the first `m` components carry
//! `A = +1/μ` (so `B` climbs from 0 to -1 across them) and the last `m` carry
//! `A = -1/μ` (so it returns to 0); in between `B + χ` vanishes on `K` and only
//! the gaps cost. Thresholds are scanned in order of decreasing `τ` with a
//! closed-form `f64` cost model, then the chosen selection is rebuilt and
//! re-verified in exact arithmetic: the checks are the contract.

use std::ops::Range;

use crate::check::{Certificate, CheckItem, Relation};
use crate::pw::{l2_norm_sq, set_antiderivative, svc_set_with, IntervalUnion, PiecewiseFn, SetFn, SvcParams};
use num::{One, Zero};

use crate::scalar::{Scalar, Q};

use super::LemmaError;

/// The six cut points of one block and the component ranges of its zones.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Block {
    #[serde(serialize_with = "crate::serde_q::ser")]
    pub alpha: Q,
    #[serde(serialize_with = "crate::serde_q::ser")]
    pub beta: Q,
    #[serde(serialize_with = "crate::serde_q::ser")]
    pub a: Q,
    #[serde(serialize_with = "crate::serde_q::ser")]
    pub b: Q,
    #[serde(serialize_with = "crate::serde_q::ser")]
    pub u: Q,
    #[serde(serialize_with = "crate::serde_q::ser")]
    pub v: Q,
    pub plus: Range<usize>,
    pub minus: Range<usize>,
}

/// Which conditions a selection must meet.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Zero mean, the `L²` bound, and the block-measure bounds and full
    /// coverage of `K` that the existence argument relies on.
    PaperBounds,
    /// Zero mean and the `L²` bound only.
    NormOnly,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BalanceOptions {
    /// Minimum number of components in each `±` zone.
    pub min_zone: usize,
    pub selection: Selection,
}

impl Default for BalanceOptions {
    fn default() -> Self {
        Self { min_zone: 1, selection: Selection::PaperBounds }
    }
}

#[derive(Clone, Debug)]
pub struct BalancedMassResult {
    pub a: SetFn<Q>,
    /// `B(x) = ∫_{K∩[x,1]} A`.
    pub b: PiecewiseFn<Q>,
    pub blocks: Vec<Block>,
    pub n_blocks: usize,
    pub eps: Q,
    /// Gaps at least this long separate blocks; `None` means a single group.
    pub threshold: Option<Q>,
    pub zone_size: usize,
    /// `‖B + χ‖₂²`, exact.
    pub residual_sq: Q,
    /// The cost-model estimate of `residual_sq` that drove the selection.
    pub estimate: f64,
    /// Zero mean, `L²` bound and block geometry.
    pub contract: Certificate,
    /// Block-measure bounds, coverage and the `Ω₁` estimate.
    pub paper_bounds: Certificate,
}

impl BalancedMassResult {
    pub fn residual_norm(&self) -> f64 {
        self.residual_sq.to_f64().sqrt()
    }

    pub fn satisfies(&self, selection: Selection) -> bool {
        self.contract.all_passed() && (selection == Selection::NormOnly || self.paper_bounds.all_passed())
    }
}

pub fn balanced_mass(k: &IntervalUnion<Q>, eps: &Q) -> Result<BalancedMassResult, LemmaError> {
    balanced_mass_with(k, eps, BalanceOptions::default())
}

pub fn balanced_mass_with(k: &IntervalUnion<Q>, eps: &Q, opts: BalanceOptions) -> Result<BalancedMassResult, LemmaError> {
    if *eps <= Q::zero() {
        return Err(LemmaError::InvalidInput("eps must be positive".into()));
    }
    if opts.min_zone == 0 {
        return Err(LemmaError::InvalidInput("zones need at least one component".into()));
    }
    if k.measure().is_zero() {
        return Ok(build(k, eps, Vec::new(), None, 1, 0.0));
    }
    let eps2 = (eps.clone() * eps.clone()).to_f64();
    let lens: Vec<f64> = k.lengths().map(|l| l.to_f64()).collect();
    let gaps: Vec<Q> = k.gaps();
    let gaps_f: Vec<f64> = gaps.iter().map(Scalar::to_f64).collect();

    let mut thresholds: Vec<Option<Q>> = vec![None];
    let mut distinct = gaps.clone();
    distinct.sort_by(|a, b| b.cmp(a));
    distinct.dedup();
    thresholds.extend(distinct.into_iter().map(Some));

    let mut evaluated = Vec::new();
    for tau in thresholds {
        let groups = group_components(k.len(), &gaps, tau.as_ref());
        let zone = opts.min_zone;
        if !groups.iter().any(|g| g.len() >= 2 * zone) {
            continue;
        }
        let est = estimate(&lens, &gaps_f, &groups, zone, eps2);
        evaluated.push((tau, groups, est));
    }

    let passes = |e: &Estimate| match opts.selection {
        Selection::PaperBounds => e.cost <= eps2 && e.mu1_ok && e.mu2_ok && e.covered,
        Selection::NormOnly => e.cost <= eps2,
    };

    let order: Vec<usize> = match opts.selection {
        Selection::PaperBounds => (0..evaluated.len()).collect(),
        Selection::NormOnly => {
            let mut idx: Vec<usize> = (0..evaluated.len()).collect();
            idx.sort_by(|&i, &j| evaluated[i].2.cost.total_cmp(&evaluated[j].2.cost));
            idx
        }
    };
    for &i in &order {
        let (tau, groups, est) = &evaluated[i];
        if !passes(est) {
            continue;
        }
        let blocks = place_blocks(k, groups, opts.min_zone);
        let result = build(k, eps, blocks, tau.clone(), opts.min_zone, est.cost);
        if result.satisfies(opts.selection) {
            return Ok(result);
        }
    }

    let best_effort = evaluated
        .iter()
        .min_by(|a, b| a.2.cost.total_cmp(&b.2.cost))
        .map(|(tau, groups, est)| Box::new(build(k, eps, place_blocks(k, groups, opts.min_zone), tau.clone(), opts.min_zone, est.cost)));
    let required_depth = detect_svc(k).and_then(|(depth, params)| required_svc_depth(eps, opts, params, depth + 1));
    Err(LemmaError::Infeasible { eps: eps.to_f64(), required_depth, best_effort })
}

/// Maximal runs of component indices not separated by a gap `>= tau`.
fn group_components(n: usize, gaps: &[Q], tau: Option<&Q>) -> Vec<Range<usize>> {
    let mut groups = Vec::new();
    let mut start = 0;
    for (i, g) in gaps.iter().enumerate() {
        if tau.is_some_and(|t| g >= t) {
            groups.push(start..i + 1);
            start = i + 1;
        }
    }
    groups.push(start..n);
    groups
}

#[derive(Clone, Debug)]
struct Estimate {
    cost: f64,
    mu1_ok: bool,
    mu2_ok: bool,
    covered: bool,
}

const SLIVER: i64 = 1 << 16;

/// Closed-form `‖B + χ‖₂²` and the block-measure conditions for a grouping.
fn estimate(lens: &[f64], gaps: &[f64], groups: &[Range<usize>], m: usize, eps2: f64) -> Estimate {
    let n_blocks = groups.iter().filter(|g| g.len() >= 2 * m).count() as f64;
    let mut cost = 0.0;
    let mut inside_gaps = 0.0;
    let mut mu1_ok = true;
    let mut covered = true;
    for g in groups {
        if g.len() < 2 * m {
            let uncovered: f64 = lens[g.clone()].iter().sum();
            cost += uncovered;
            covered &= uncovered == 0.0;
            continue;
        }
        let plus = g.start..g.start + m;
        let minus = g.end - m..g.end;
        cost += zone_cost(lens, gaps, plus.clone(), false) + zone_cost(lens, gaps, minus.clone(), true);
        cost += gaps[plus.end - 1..minus.start].iter().sum::<f64>();
        inside_gaps += gaps[g.start..g.end - 1].iter().sum::<f64>();
        // slivers between the outer cut points and the block's end components
        let left = if g.start == 0 { 0.0 } else { gaps[g.start - 1] };
        let right = if g.end == lens.len() { 0.0 } else { gaps[g.end - 1] };
        inside_gaps += (left + right) / SLIVER as f64;
        let bound = eps2 / (16.0 * n_blocks);
        let mp: f64 = lens[plus].iter().sum();
        let mm: f64 = lens[minus].iter().sum();
        mu1_ok &= mp > 0.0 && mm > 0.0 && mp < bound && mm < bound;
    }
    Estimate { cost, mu1_ok, mu2_ok: inside_gaps < eps2 / 8.0, covered }
}

/// `∫ (B + χ)²` over a zone, where `B + χ` falls linearly in the remaining
/// mass fraction on components and equals that fraction minus one on gaps.
fn zone_cost(lens: &[f64], gaps: &[f64], zone: Range<usize>, trailing: bool) -> f64 {
    let total: f64 = lens[zone.clone()].iter().sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut r = 1.0;
    let mut cost = 0.0;
    for i in zone.clone() {
        let next = r - lens[i] / total;
        // on the trailing zone the integrand is 1 - r instead of r
        let (x, y) = if trailing { (1.0 - r, 1.0 - next) } else { (r, next) };
        cost += lens[i] * (x * x + x * y + y * y) / 3.0;
        if i + 1 < zone.end {
            let off = if trailing { next } else { 1.0 - next };
            cost += gaps[i] * off * off;
        }
        r = next;
    }
    cost
}

fn place_blocks(k: &IntervalUnion<Q>, groups: &[Range<usize>], m: usize) -> Vec<Block> {
    let comps = k.components();
    let gaps = k.gaps();
    let sliver = Q::from_integer(SLIVER.into());
    let frac = |num: i64, den: i64| Q::from_frac(num, den);
    let mut blocks = Vec::new();
    for g in groups.iter().filter(|g| g.len() >= 2 * m) {
        let plus = g.start..g.start + m;
        let minus = g.end - m..g.end;
        let first_l = &comps[g.start].0;
        let alpha = if g.start > 0 {
            first_l - &gaps[g.start - 1] / &sliver
        } else if first_l.is_zero() {
            Q::zero()
        } else {
            first_l - first_l / &sliver
        };
        let last_r = &comps[g.end - 1].1;
        let v = if g.end < comps.len() {
            last_r + &gaps[g.end - 1] / &sliver
        } else if last_r.is_one() {
            Q::one()
        } else {
            last_r + (Q::one() - last_r) / &sliver
        };
        let (j1, j2) = (plus.end - 1, minus.start - 1);
        let (gl1, gw1) = (comps[j1].1.clone(), gaps[j1].clone());
        let (gl2, gw2) = (comps[j2].1.clone(), gaps[j2].clone());
        let (beta, a, b, u) = if j1 == j2 {
            (
                &gl1 + &gw1 * frac(1, 5),
                &gl1 + &gw1 * frac(2, 5),
                &gl1 + &gw1 * frac(3, 5),
                &gl1 + &gw1 * frac(4, 5),
            )
        } else {
            (&gl1 + &gw1 * frac(1, 4), &gl1 + &gw1 * frac(1, 2), &gl2 + &gw2 * frac(1, 2), &gl2 + &gw2 * frac(3, 4))
        };
        blocks.push(Block { alpha, beta, a, b, u, v, plus, minus });
    }
    blocks
}

fn build(k: &IntervalUnion<Q>, eps: &Q, blocks: Vec<Block>, threshold: Option<Q>, zone: usize, estimate: f64) -> BalancedMassResult {
    let mut values = vec![Q::zero(); k.len()];
    let lens: Vec<Q> = k.lengths().collect();
    for blk in &blocks {
        let mp: Q = lens[blk.plus.clone()].iter().sum();
        let mm: Q = lens[blk.minus.clone()].iter().sum();
        for i in blk.plus.clone() {
            values[i] = mp.recip();
        }
        for i in blk.minus.clone() {
            values[i] = -mm.recip();
        }
    }
    let a = SetFn::from_constants(k.clone(), values).expect("one value per component");
    let b = set_antiderivative(&a);
    let chi = k.indicator().to_piecewise();
    let residual_sq = l2_norm_sq(&b.add(&chi));
    let eps2 = eps * eps;
    let n = blocks.len();

    let mut contract = Certificate::default();
    contract.push(CheckItem::eq("integral of A over K = 0", &a.integral(), &Q::zero()));
    contract.push(CheckItem::cmp("|B + chi|_2^2 <= eps^2", &residual_sq, Relation::Le, &eps2));
    let ordered = blocks.iter().all(|b| b.alpha < b.beta && b.beta < b.a && b.a < b.b && b.b < b.u && b.u < b.v)
        && blocks.windows(2).all(|w| w[0].v < w[1].alpha);
    contract.push(CheckItem::holds("alpha < beta < a < b < u < v, v_(k-1) < alpha_k", ordered));
    let off_k = blocks.iter().all(|b| {
        let exempt = |x: &Q| x.is_zero() || x.is_one();
        [&b.beta, &b.a, &b.b, &b.u].iter().all(|x| !k.contains_point(x))
            && (exempt(&b.alpha) || !k.contains_point(&b.alpha))
            && (exempt(&b.v) || !k.contains_point(&b.v))
    });
    contract.push(CheckItem::holds("block points off K (0 and 1 exempt)", off_k));

    let mut paper = Certificate::default();
    if n > 0 {
        let bound = &eps2 / Q::from_integer((16 * n).into());
        let front: Vec<Q> = blocks.iter().map(|b| k.measure_within(&b.alpha, &b.beta)).collect();
        let back: Vec<Q> = blocks.iter().map(|b| k.measure_within(&b.u, &b.v)).collect();
        let zone_max = front.iter().chain(&back).max().cloned().unwrap_or_default();
        let zone_min = front.iter().chain(&back).min().cloned().unwrap_or_default();
        paper.push(CheckItem::cmp("min zone measure > 0", &zone_min, Relation::Ne, &Q::zero()));
        paper.push(CheckItem::cmp("max zone measure < eps^2/(16n)", &zone_max, Relation::Lt, &bound));
    } else {
        paper.push(CheckItem::holds("at least one block", k.measure().is_zero()));
    }
    let span_gaps: Q = blocks.iter().map(|b| (&b.v - &b.alpha) - k.measure_within(&b.alpha, &b.v)).sum();
    paper.push(CheckItem::cmp("gap measure inside blocks < eps^2/8", &span_gaps, Relation::Lt, &(&eps2 / Q::from_integer(8.into()))));
    let covered: Q = blocks.iter().map(|b| k.measure_within(&b.alpha, &b.v)).sum();
    paper.push(CheckItem::eq("K covered by the blocks", &covered, &k.measure()));
    let omega1: Q = &span_gaps
        + blocks.iter().map(|b| k.measure_within(&b.alpha, &b.beta) + k.measure_within(&b.u, &b.v)).sum::<Q>();
    paper.push(CheckItem::cmp("mu(Omega_1) <= eps^2/4", &omega1, Relation::Le, &(&eps2 / Q::from_integer(4.into()))));
    paper.push(CheckItem::cmp("|B + chi|_2^2 <= 4 mu(Omega_1)", &residual_sq, Relation::Le, &(omega1 * Q::from_integer(4.into()))));

    BalancedMassResult {
        a,
        b,
        n_blocks: n,
        blocks,
        eps: eps.clone(),
        threshold,
        zone_size: zone,
        residual_sq,
        estimate,
        contract,
        paper_bounds: paper,
    }
}

/// Recognizes `K` as a Smith–Volterra–Cantor stage (base 4) by comparing with
/// the construction at the matching depth.
pub fn detect_svc(k: &IntervalUnion<Q>) -> Option<(u32, SvcParams)> {
    let n = k.len();
    if !n.is_power_of_two() || n < 2 {
        return None;
    }
    let depth = n.trailing_zeros();
    if depth > 20 {
        return None;
    }
    let params = SvcParams::default();
    (svc_set_with(depth, params).ok()? == *k).then_some((depth, params))
}

/// Smallest SVC depth `>= from` at which the closed-form model of the uniform
/// grouping predicts a valid selection; `None` beyond depth 64.
pub fn required_svc_depth(eps: &Q, opts: BalanceOptions, params: SvcParams, from: u32) -> Option<u32> {
    let eps2 = (eps * eps).to_f64();
    let base = params.base as f64;
    let m = opts.min_zone as f64;
    for d in from.max(1)..=64 {
        let comp = params.component_length(d).to_f64();
        for cut in 0..d {
            let groups = 2f64.powi(cut as i32);
            if 2f64.powi((d - cut) as i32) < 2.0 * m {
                break;
            }
            let inner: f64 = (cut + 1..=d).map(|s| 2f64.powi(s as i32 - 1) * base.powi(-(s as i32))).sum();
            let cost = inner + groups * 2.0 * m * comp / 3.0;
            let ok = match opts.selection {
                Selection::NormOnly => cost <= eps2,
                Selection::PaperBounds => {
                    cost <= eps2 && inner < eps2 / 8.0 && m * comp < eps2 / (16.0 * groups)
                }
            };
            if ok {
                return Some(d);
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pw::svc_set;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    #[test]
    fn null_set_takes_zero() {
        let k = IntervalUnion::new(vec![(q(1, 3), q(1, 3))]).unwrap();
        let r = balanced_mass(&k, &q(1, 100)).unwrap();
        assert_eq!(r.n_blocks, 0);
        assert!(r.a.equals(&SetFn::zero(k)));
    }

    #[test]
    fn deep_stage_half_eps() {
        let k = svc_set(10).unwrap();
        let r = balanced_mass(&k, &q(1, 2)).unwrap();
        assert!(r.contract.all_passed(), "{:?}", r.contract);
        assert!(r.paper_bounds.all_passed(), "{:?}", r.paper_bounds);
        assert!(r.residual_norm() <= 0.5);
    }

    #[test]
    fn each_front_zone_carries_unit_mass() {
        let k = svc_set(10).unwrap();
        let r = balanced_mass(&k, &q(1, 2)).unwrap();
        assert!(r.n_blocks > 1);
        for blk in &r.blocks {
            let zone = IntervalUnion::new(k.components()[blk.plus.clone()].to_vec()).unwrap();
            assert_eq!(r.a.integrate_over(&zone).unwrap(), q(1, 1));
        }
    }

    #[test]
    fn cost_model_matches_exact_residual() {
        let k = svc_set(7).unwrap();
        for m in [1, 2, 4] {
            let opts = BalanceOptions { min_zone: m, selection: Selection::NormOnly };
            let r = balanced_mass_with(&k, &q(1, 2), opts).unwrap();
            let exact = r.residual_sq.to_f64();
            assert!((r.estimate - exact).abs() <= 1e-12 * (1.0 + exact), "{} vs {exact}", r.estimate);
        }
    }

    #[test]
    fn coarse_stage_reports_required_depth() {
        let k = svc_set(4).unwrap();
        match balanced_mass(&k, &q(1, 1000)) {
            Err(LemmaError::Infeasible { required_depth, best_effort, .. }) => {
                // strict bounds at eps = 1e-3 need a very deep stage
                assert!(required_depth.unwrap() > 40);
                assert!(best_effort.is_some());
            }
            other => panic!("expected infeasible, got {other:?}"),
        }
    }

    #[test]
    fn detects_svc_stages() {
        assert_eq!(detect_svc(&svc_set(5).unwrap()).map(|d| d.0), Some(5));
        assert!(detect_svc(&IntervalUnion::new(vec![(q(0, 1), q(1, 4)), (q(1, 2), q(1, 1))]).unwrap()).is_none());
    }
}
