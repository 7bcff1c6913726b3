//! The tower `A_n, B_n, S_n, ρ_n` behind the non-nice submodule.

use serde::Serialize;

use crate::check::{Certificate, CheckItem, Relation};
use crate::lemmas::{balanced_mass_with, detect_svc, prescribe_derivative, BalanceOptions, LemmaError, Selection};
use crate::pw::{l2_norm_sq, set_antiderivative, IntervalUnion, PiecewiseFn, SetFn};
use crate::scalar::{Scalar, Q};

use super::PipelineError;

/// How to treat a level whose balanced-mass step cannot meet its `L²` bound.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TowerMode {
    /// Abort with the balanced-mass infeasibility error.
    Strict,
    /// Keep the lowest-cost selection and let the invariant report show the
    /// violated bound.
    #[default]
    BestEffort,
}

/// How each level was built.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelReport {
    pub n: usize,
    /// Components per `±` zone of `A_n`.
    pub zone_size: usize,
    pub blocks: usize,
    /// `‖B_n + χ‖₂`.
    pub residual_norm: f64,
    /// Whether the balanced-mass selection met `‖B_n + χ‖₂ < 2^-n`.
    pub balanced: bool,
    /// Smallest stage at which the balanced-mass step would succeed, when known.
    pub required_depth: Option<u32>,
    /// Cover intervals used when prescribing `S_n'`.
    pub cover_intervals: usize,
    pub pieces: usize,
}

#[derive(Clone, Debug)]
pub struct PipelineTower<S> {
    k: IntervalUnion<S>,
    depth: Option<u32>,
    a: Vec<SetFn<S>>,
    b: Vec<PiecewiseFn<S>>,
    s: Vec<PiecewiseFn<S>>,
    rho: Vec<PiecewiseFn<S>>,
    /// `ρ_n|_K` and `ρ_n'|_K = n²(A_n - A_{n-1})`, cached for the functional.
    rho_k: Vec<SetFn<S>>,
    rho_prime_k: Vec<SetFn<S>>,
    levels: Vec<LevelReport>,
}

/// `2^-n` as a scalar.
pub(crate) fn pow2_neg<S: Scalar>(n: usize) -> S {
    S::pow2_neg(n as u32)
}

/// Builds the tower up to order `order`.
///
/// Each `A_n` must keep `S_n` within `2^-n` of 1 while `S_n' = A_n` on `K`,
/// so a zone of `m` equal components (each carrying `|A|`-mass `1/m`) needs
/// `m` of order `2^{n+2}`. The zone starts at `2^{n+3}` (capped by half the
/// component count) and doubles whenever the
/// derivative-prescription cover cannot absorb a single component.
pub fn build_tower(k: &IntervalUnion<Q>, order: usize, mode: TowerMode) -> Result<PipelineTower<Q>, PipelineError> {
    if order == 0 {
        return Err(PipelineError::InvalidInput("order must be at least 1".into()));
    }
    if k.measure() <= Q::from_i64(0) {
        return Err(PipelineError::InvalidInput("K must have positive measure".into()));
    }
    let depth = detect_svc(k).map(|(d, _)| d);
    let mut tower = PipelineTower {
        k: k.clone(),
        depth,
        a: vec![SetFn::zero(k.clone())],
        b: vec![PiecewiseFn::zero()],
        s: vec![PiecewiseFn::one()],
        rho: vec![PiecewiseFn::one()],
        rho_k: Vec::new(),
        rho_prime_k: Vec::new(),
        levels: Vec::new(),
    };
    let one = PiecewiseFn::<Q>::one();
    for n in 1..=order {
        let eps: Q = pow2_neg(n);
        let mut zone = (1usize << (n + 3).min(62)).min(k.len() / 2).max(1);
        let (balanced, prescribed, required_depth) = loop {
            let opts = BalanceOptions { min_zone: zone, selection: Selection::NormOnly };
            let (bm, ok, required) = match balanced_mass_with(k, &eps, opts) {
                Ok(r) => (r, true, None),
                Err(LemmaError::Infeasible { best_effort: Some(r), required_depth, .. }) if mode == TowerMode::BestEffort => {
                    (*r, false, required_depth)
                }
                Err(e) => return Err(PipelineError::Level { n, source: e }),
            };
            match prescribe_derivative(k, &bm.a, &one, &eps) {
                Ok(p) => break ((bm, ok), p, required),
                Err(LemmaError::CoverInfeasible { .. }) if 2 * zone <= k.len() / 2 => zone *= 2,
                Err(e) => return Err(PipelineError::Level { n, source: e }),
            }
        };
        let ((bm, ok), prescribed) = (balanced, prescribed);
        let b = set_antiderivative(&bm.a);
        let s = prescribed.g;
        let n_sq = Q::from_i64((n * n) as i64);
        let rho = s.sub(&tower.s[n - 1]).scale(&n_sq).simplify();
        tower.levels.push(LevelReport {
            n,
            zone_size: bm.zone_size,
            blocks: bm.n_blocks,
            residual_norm: bm.residual_norm(),
            balanced: ok,
            required_depth,
            cover_intervals: prescribed.cover.len(),
            pieces: s.num_pieces(),
        });
        tower.a.push(bm.a);
        tower.b.push(b);
        tower.s.push(s);
        tower.rho.push(rho);
    }
    tower.refresh_caches();
    Ok(tower)
}

impl<S: Scalar> PipelineTower<S> {
    pub fn k(&self) -> &IntervalUnion<S> {
        &self.k
    }

    /// Stage of the fat Cantor set `K`, when it is one.
    pub fn depth(&self) -> Option<u32> {
        self.depth
    }

    pub fn order(&self) -> usize {
        self.a.len() - 1
    }

    /// `A_n`, with `A_0 = 0`.
    pub fn a(&self, n: usize) -> &SetFn<S> {
        &self.a[n]
    }

    /// `B_n`, with `B_0 = 0`.
    pub fn b(&self, n: usize) -> &PiecewiseFn<S> {
        &self.b[n]
    }

    /// `S_n`, with `S_0 = 1`.
    pub fn s(&self, n: usize) -> &PiecewiseFn<S> {
        &self.s[n]
    }

    /// `ρ_n = n²(S_n - S_{n-1})`, with `ρ_0 = 1`.
    pub fn rho(&self, n: usize) -> &PiecewiseFn<S> {
        &self.rho[n]
    }

    pub fn levels(&self) -> &[LevelReport] {
        &self.levels
    }

    pub fn rho_on_k(&self, n: usize) -> &SetFn<S> {
        &self.rho_k[n]
    }

    /// `ρ_n'` on `K`, read off exactly as `n²(A_n - A_{n-1})`.
    pub fn rho_prime_on_k(&self, n: usize) -> &SetFn<S> {
        &self.rho_prime_k[n]
    }

    fn refresh_caches(&mut self) {
        self.rho_k = self.rho.iter().map(|r| SetFn::restrict(r, &self.k).simplify()).collect();
        self.rho_prime_k = (0..self.a.len())
            .map(|n| {
                if n == 0 {
                    return SetFn::zero(self.k.clone());
                }
                let n_sq = S::from_i64((n * n) as i64);
                self.a[n].sub(&self.a[n - 1]).expect("same domain").scale(&n_sq)
            })
            .collect();
    }

    /// Swaps in a different `S_n` and recomputes `ρ_n`, `ρ_{n+1}`; used to
    /// check that the invariant report catches a bad level.
    pub fn replace_s(&mut self, n: usize, s: PiecewiseFn<S>) {
        assert!(n >= 1 && n <= self.order(), "level out of range");
        self.s[n] = s;
        for j in n..=(n + 1).min(self.order()) {
            let j_sq = S::from_i64((j * j) as i64);
            self.rho[j] = self.s[j].sub(&self.s[j - 1]).scale(&j_sq).simplify();
        }
        self.refresh_caches();
    }

    pub fn to_f64(&self) -> PipelineTower<f64> {
        PipelineTower {
            k: self.k.map_scalar(|x| x.to_f64()),
            depth: self.depth,
            a: self.a.iter().map(SetFn::to_f64).collect(),
            b: self.b.iter().map(PiecewiseFn::to_f64).collect(),
            s: self.s.iter().map(PiecewiseFn::to_f64).collect(),
            rho: self.rho.iter().map(PiecewiseFn::to_f64).collect(),
            rho_k: self.rho_k.iter().map(SetFn::to_f64).collect(),
            rho_prime_k: self.rho_prime_k.iter().map(SetFn::to_f64).collect(),
            levels: self.levels.clone(),
        }
    }

    /// Every level's invariants, plus the seeds, the boundary values of `B_n`
    /// and the telescoping identities. Check names are stable identifiers.
    pub fn invariants(&self) -> Certificate {
        let mut c = Certificate::default();
        let zero = S::zero();
        c.push(CheckItem::holds("seeds: A_0 = 0, B_0 = 0, S_0 = 1", {
            self.a[0].equals(&SetFn::zero(self.k.clone()))
                && self.b[0].approx_eq(&PiecewiseFn::zero())
                && self.s[0].approx_eq(&PiecewiseFn::one())
        }));
        let chi = self.k.indicator().to_piecewise();
        let mut partial = PiecewiseFn::<S>::zero();
        let mut partial_prime = SetFn::zero(self.k.clone());
        for n in 1..=self.order() {
            let eps: S = pow2_neg(n);
            c.push(CheckItem::eq(format!("zero_mean[{n}]: integral of A_{n} over K = 0"), &self.a[n].integral(), &zero));
            let resid = l2_norm_sq(&self.b[n].add(&chi));
            let eps_sq = eps.clone() * eps.clone();
            c.push(CheckItem::cmp(
                format!("cancels_indicator[{n}]: |B_{n} + chi|_2^2 < 4^-{n}"),
                &resid,
                Relation::Lt,
                &eps_sq,
            ));
            c.push(CheckItem::holds(
                format!("b_boundary[{n}]: B_{n}(0) = B_{n}(1) = 0"),
                self.b[n].eval(&zero).is_negligible() && self.b[n].eval(&S::one()).is_negligible(),
            ));
            let s_prime = SetFn::restrict(&self.s[n].differentiate(), &self.k);
            c.push(CheckItem::holds(format!("derivative_on_k[{n}]: S_{n}' = A_{n} on K"), s_prime.equals(&self.a[n])));
            let dist = self.s[n].add_constant(&(-S::one())).segment().sup_abs();
            c.push(CheckItem::lt(format!("near_one[{n}]: sup|S_{n} - 1| < 2^-{n}"), dist, eps.to_f64()));
            let rho_bound = 3.0 * (n * n) as f64 * eps.to_f64();
            c.push(CheckItem::le(
                format!("rho_bound[{n}]: sup|rho_{n}| <= 3 n^2 2^-{n}"),
                self.rho[n].segment().sup_abs(),
                rho_bound,
            ));
            let inv_sq = S::one() / S::from_i64((n * n) as i64);
            partial = partial.add(&self.rho[n].scale(&inv_sq));
            c.push(CheckItem::holds(
                format!("telescoping[{n}]: sum_(j<={n}) rho_j / j^2 = S_{n} - 1"),
                partial.approx_eq(&self.s[n].add_constant(&(-S::one()))),
            ));
            partial_prime = partial_prime.add(&self.rho_prime_on_k(n).scale(&inv_sq)).expect("same domain");
            c.push(CheckItem::holds(
                format!("telescoping_prime[{n}]: sum_(j<={n}) rho_j' / j^2 = A_{n} on K"),
                partial_prime.equals(&self.a[n])
                    && self.rho_k[n].differentiate().equals(self.rho_prime_on_k(n)),
            ));
        }
        c
    }
}
