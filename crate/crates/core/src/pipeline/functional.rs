//! `ℓ²`-valued functions, the generators `f^[n]` and the functional
//! `g(h) = Σ g_n(h_n)` with `g_n(φ) = ∫_K (ρ_n φ)'`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::pw::{l2_norm, sobolev_norm_sq, PiecewiseFn, SetFn};
use crate::scalar::Scalar;

use super::tower::{pow2_neg, PipelineTower};
use super::PipelineError;

/// Finitely many non-zero coordinates `h_n = ⟨h(·), e_n⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorFn<S> {
    coords: BTreeMap<usize, PiecewiseFn<S>>,
}

impl<S: Scalar> Default for VectorFn<S> {
    fn default() -> Self {
        Self { coords: BTreeMap::new() }
    }
}

impl<S: Scalar> VectorFn<S> {
    pub fn zero() -> Self {
        Self::default()
    }

    /// `f · e_n`.
    pub fn basis(n: usize, f: PiecewiseFn<S>) -> Self {
        let mut v = Self::zero();
        v.set(n, f);
        v
    }

    pub fn set(&mut self, n: usize, f: PiecewiseFn<S>) {
        self.coords.insert(n, f);
    }

    /// Coordinate `n`, zero when absent.
    pub fn coord(&self, n: usize) -> PiecewiseFn<S> {
        self.coords.get(&n).cloned().unwrap_or_else(PiecewiseFn::zero)
    }

    pub fn coords(&self) -> impl Iterator<Item = (usize, &PiecewiseFn<S>)> {
        self.coords.iter().map(|(n, f)| (*n, f))
    }

    /// Largest index carrying a coordinate.
    pub fn support_end(&self) -> Option<usize> {
        self.coords.keys().next_back().copied()
    }

    /// Module action `φ · h`.
    pub fn times(&self, phi: &PiecewiseFn<S>) -> Self {
        Self { coords: self.coords.iter().map(|(n, f)| (*n, phi.mul(f))).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        Self { coords: self.coords.iter().map(|(n, f)| (*n, f.scale(c))).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (n, f) in &other.coords {
            let sum = match out.coords.get(n) {
                Some(g) => g.add(f),
                None => f.clone(),
            };
            out.coords.insert(*n, sum);
        }
        out
    }

    /// Same function, regardless of how the coordinates are cut into pieces.
    pub fn same_as(&self, other: &Self) -> bool {
        let keys: std::collections::BTreeSet<usize> = self.coords.keys().chain(other.coords.keys()).copied().collect();
        keys.into_iter().all(|n| self.coord(n).approx_eq(&other.coord(n)))
    }

    /// `h(t) ∈ ℓ²` as its coordinates `0..=len-1`.
    pub fn eval(&self, t: &S, len: usize) -> Vec<S> {
        (0..len).map(|n| self.coords.get(&n).map_or_else(S::zero, |f| f.eval(t))).collect()
    }

    /// `‖h‖²_{W^{1,2}([0,1], ℓ²)} = Σ_n ‖h_n‖²_{1,2}`.
    pub fn sobolev_norm_sq(&self) -> S {
        self.coords.values().fold(S::zero(), |acc, f| acc + sobolev_norm_sq(f))
    }
}

/// `f^[0] = e_0 + Σ_{n<=N} n^-2 e_n` (constant in `x`) or `f^[n] = e_n - ρ_n e_0`.
pub fn generator<S: Scalar>(tower: &PipelineTower<S>, n: usize) -> Result<VectorFn<S>, PipelineError> {
    let order = tower.order();
    if n > order {
        return Err(PipelineError::OutOfRange { index: n, order });
    }
    if n == 0 {
        return Ok(truncated_f0(order));
    }
    let mut v = VectorFn::basis(n, PiecewiseFn::one());
    v.set(0, tower.rho(n).neg());
    Ok(v)
}

fn truncated_f0<S: Scalar>(m: usize) -> VectorFn<S> {
    let mut v = VectorFn::basis(0, PiecewiseFn::one());
    for n in 1..=m {
        v.set(n, PiecewiseFn::constant(S::one() / S::from_i64((n * n) as i64)));
    }
    v
}

/// `g_n(φ) = ∫_K ρ_n φ' + ∫_K ρ_n' φ`, with `ρ_n'` on `K` taken exactly as
/// `n²(A_n - A_{n-1})` and `ρ_0 = 1`.
pub fn apply_g_n<S: Scalar>(tower: &PipelineTower<S>, n: usize, phi: &PiecewiseFn<S>) -> S {
    let phi_k = SetFn::restrict(phi, tower.k());
    g_n_on_k(tower, n, &phi_k)
}

// Only values on K enter g_n, so everything is restricted before any
// arithmetic: the gap pieces of ρ_n never get multiplied out.
fn g_n_on_k<S: Scalar>(tower: &PipelineTower<S>, n: usize, phi_k: &SetFn<S>) -> S {
    let dphi_k = phi_k.differentiate();
    if n == 0 {
        return dphi_k.integral();
    }
    let first = tower.rho_on_k(n).mul(&dphi_k).expect("same domain").integral();
    let second = tower.rho_prime_on_k(n).mul(phi_k).expect("same domain").integral();
    first + second
}

/// `g(h) = Σ_n g_n(h_n)`; `h` may not reach past the tower's order.
pub fn apply_g<S: Scalar>(tower: &PipelineTower<S>, h: &VectorFn<S>) -> Result<S, PipelineError> {
    check_support(tower, h)?;
    Ok(h.coords().fold(S::zero(), |acc, (n, f)| acc + apply_g_n(tower, n, f)))
}

fn check_support<S: Scalar>(tower: &PipelineTower<S>, h: &VectorFn<S>) -> Result<(), PipelineError> {
    match h.support_end().filter(|&e| e > tower.order()) {
        Some(end) => Err(PipelineError::OutOfRange { index: end, order: tower.order() }),
        None => Ok(()),
    }
}

/// `g(φ h)` for one fixed `φ` and many `h`. Values `g_n(φ)` are memoized and
/// reused through linearity whenever a coordinate of `h` is constant; other
/// coordinates are multiplied by `φ` on `K` only.
pub struct PhiFunctional<'a, S> {
    tower: &'a PipelineTower<S>,
    phi: PiecewiseFn<S>,
    phi_k: SetFn<S>,
    memo: Vec<Option<S>>,
}

impl<'a, S: Scalar> PhiFunctional<'a, S> {
    pub fn new(tower: &'a PipelineTower<S>, phi: &PiecewiseFn<S>) -> Self {
        Self {
            tower,
            phi: phi.clone(),
            phi_k: SetFn::restrict(phi, tower.k()),
            memo: vec![None; tower.order() + 1],
        }
    }

    /// `g_n(φ)`.
    pub fn g_n(&mut self, n: usize) -> S {
        if let Some(v) = &self.memo[n] {
            return v.clone();
        }
        let v = g_n_on_k(self.tower, n, &self.phi_k);
        self.memo[n] = Some(v.clone());
        v
    }

    /// `g(φ h)`.
    pub fn g_times(&mut self, h: &VectorFn<S>) -> Result<S, PipelineError> {
        check_support(self.tower, h)?;
        let mut acc = S::zero();
        for (n, f) in h.coords() {
            let term = match constant_value(f) {
                Some(c) => c * self.g_n(n),
                None => {
                    let prod = SetFn::restrict(f, self.tower.k()).mul(&self.phi_k).expect("same domain");
                    g_n_on_k(self.tower, n, &prod)
                }
            };
            acc = acc + term;
        }
        Ok(acc)
    }

    pub fn phi(&self) -> &PiecewiseFn<S> {
        &self.phi
    }
}

fn constant_value<S: Scalar>(f: &PiecewiseFn<S>) -> Option<S> {
    let polys = f.segment().polys();
    let c = polys[0].eval(&S::zero());
    polys.iter().all(|p| p.degree() == 0 && p.eval(&S::zero()) == c).then_some(c)
}

/// `g(φ f^[0])` assembled to order `m`, next to its limit representation
/// `∫_0^1 φ'(B_m + χ)` and the bound `‖φ'‖₂ 2^-m` that the `L²` estimate on
/// `B_m + χ` gives for the latter. The two values differ by exactly
/// `∫_K φ'(S_m - 1)`, which vanishes only in the limit.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct F0Residual {
    pub m: usize,
    pub assembled: String,
    pub limit_form: String,
    pub limit_form_abs: f64,
    pub truncation_gap: String,
    /// `assembled - limit_form` equals the truncation gap.
    pub gap_identity: bool,
    pub bound: f64,
    pub passed: bool,
}

pub fn f0_residual<S: Scalar>(tower: &PipelineTower<S>, phi: &PiecewiseFn<S>, m: usize) -> Result<F0Residual, PipelineError> {
    f0_residual_with(&mut PhiFunctional::new(tower, phi), m)
}

pub fn f0_residual_with<S: Scalar>(g: &mut PhiFunctional<'_, S>, m: usize) -> Result<F0Residual, PipelineError> {
    let tower = g.tower;
    if m > tower.order() {
        return Err(PipelineError::OutOfRange { index: m, order: tower.order() });
    }
    let k = tower.k();
    let dphi = g.phi().differentiate();
    let assembled = g.g_times(&truncated_f0(m))?;
    let chi = k.indicator().to_piecewise();
    let limit_form = dphi.mul(&tower.b(m).add(&chi)).integral();
    let gap = SetFn::restrict(&tower.s(m).add_constant(&(-S::one())), k).mul_fn(&dphi).integral();
    let gap_identity = (assembled.clone() - limit_form.clone() - gap.clone()).is_negligible();
    let bound = l2_norm(&dphi) * pow2_neg::<f64>(m);
    let value = limit_form.to_f64().abs();
    Ok(F0Residual {
        m,
        assembled: assembled.to_decimal_string(),
        limit_form: limit_form.to_decimal_string(),
        limit_form_abs: value,
        truncation_gap: gap.to_decimal_string(),
        gap_identity,
        bound,
        passed: value <= bound,
    })
}

/// `∫_K ρ_n' φ` through its integrated-by-parts form `n² ∫_0^1 (B_n - B_{n-1}) φ'`.
pub fn rho_prime_by_parts<S: Scalar>(tower: &PipelineTower<S>, n: usize, phi: &PiecewiseFn<S>) -> S {
    let n_sq = S::from_i64((n * n) as i64);
    tower.b(n).sub(tower.b(n - 1)).mul(&phi.differentiate()).integral() * n_sq
}

/// `∫_K ρ_n' φ` computed directly on `K`.
pub fn rho_prime_direct<S: Scalar>(tower: &PipelineTower<S>, n: usize, phi: &PiecewiseFn<S>) -> S {
    tower.rho_prime_on_k(n).mul_fn(phi).integral()
}
