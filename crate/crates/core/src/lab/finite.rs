//! Modules over `A = Q^k` (functions on `k` points): every submodule of `A^n`
//! splits pointwise, so characters and ranks can be enumerated outright.

use num::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::scalar::{Scalar, Q};

use super::linalg::{nullspace, rank};
use super::LabError;

/// A submodule of `A^n` given by generators; `generators[g][ω][j]` is the
/// `j`-th coordinate of generator `g` at the point `ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteAlgebraModule {
    k: usize,
    n: usize,
    generators: Vec<Vec<Vec<Q>>>,
}

impl FiniteAlgebraModule {
    pub fn new(k: usize, n: usize, generators: Vec<Vec<Vec<Q>>>) -> Result<Self, LabError> {
        if k == 0 || n == 0 {
            return Err(LabError::Shape("k and n must be positive".into()));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != k || g.iter().any(|row| row.len() != n) {
                return Err(LabError::Shape(format!("generator {i} is not a {k}x{n} matrix")));
            }
        }
        Ok(Self { k, n, generators })
    }

    pub fn from_integers(k: usize, n: usize, generators: &[Vec<Vec<i64>>]) -> Result<Self, LabError> {
        let gens = generators.iter().map(|g| g.iter().map(|r| r.iter().map(|&x| Q::from_i64(x)).collect()).collect()).collect();
        Self::new(k, n, gens)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[Vec<Vec<Q>>] {
        &self.generators
    }

    /// Generator rows at `ω`; their span is `M_ω`.
    pub fn fiber(&self, omega: usize) -> Vec<Vec<Q>> {
        self.generators.iter().map(|g| g[omega].clone()).collect()
    }

    /// `dim M` over the scalars, read off the module span directly: the
    /// products `a_p g` for the basis `a_p(ω) = (ω + 1)^p` of `A`, flattened
    /// into `Q^{kn}`. No pointwise splitting is used.
    pub fn dimension(&self) -> usize {
        let mut rows = Vec::with_capacity(self.k * self.generators.len());
        for g in &self.generators {
            for p in 0..self.k {
                let mut row = Vec::with_capacity(self.k * self.n);
                for (omega, vals) in g.iter().enumerate() {
                    let a = Q::from_i64((omega as i64 + 1).pow(p as u32));
                    row.extend(vals.iter().map(|v| v.clone() * &a));
                }
                rows.push(row);
            }
        }
        rank(&rows)
    }

    pub fn is_full(&self) -> bool {
        self.dimension() == self.k * self.n
    }
}

/// `φ_c(a) = Σ_j c_j a_j(ω)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteCharacter {
    pub omega: usize,
    #[serde(serialize_with = "crate::serde_q::ser_vec")]
    pub c: Vec<Q>,
}

impl DiscreteCharacter {
    /// Value on an element of `A^n` given as a `k×n` matrix.
    pub fn apply(&self, element: &[Vec<Q>]) -> Q {
        element[self.omega].iter().zip(&self.c).fold(Q::zero(), |acc, (a, c)| acc + a.clone() * c)
    }

    pub fn vanishes_on(&self, m: &FiniteAlgebraModule) -> bool {
        m.generators().iter().all(|g| self.apply(g).is_zero())
    }
}

/// For every point, a basis of the annihilator of `M_ω`, one character each.
pub fn vanishing_characters(m: &FiniteAlgebraModule) -> Vec<DiscreteCharacter> {
    (0..m.k())
        .flat_map(|omega| {
            nullspace(&m.fiber(omega), m.n()).into_iter().map(move |c| DiscreteCharacter { omega, c })
        })
        .collect()
}

/// Whether "no character vanishes on `M`" and "`M = A^n`" agree for `m`; the
/// first is read off the fibres, the second off the flattened module span.
pub fn check_fge1(m: &FiniteAlgebraModule) -> bool {
    vanishing_characters(m).is_empty() == m.is_full()
}

/// Seeded module with `k, n` in `1..=4` and up to `n + 1` generators whose
/// entries are small integers, zero with probability about one half so that
/// deficient fibres are common.
pub fn random_module(seed: u64) -> FiniteAlgebraModule {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = rng.random_range(1..=4);
    let n = rng.random_range(1..=4);
    let count = rng.random_range(0..=n + 1);
    let gens = (0..count)
        .map(|_| {
            (0..k)
                .map(|_| {
                    (0..n)
                        .map(|_| if rng.random_bool(0.5) { Q::zero() } else { Q::from_i64(rng.random_range(-2..=2)) })
                        .collect()
                })
                .collect()
        })
        .collect();
    FiniteAlgebraModule::new(k, n, gens).expect("shapes are consistent")
}

/// Every module with at most `count` generators whose entries are 0 or 1.
pub fn zero_one_family(k: usize, n: usize, count: usize) -> Vec<FiniteAlgebraModule> {
    let cells = k * n;
    assert!(cells <= 16, "family too large");
    let pattern = |bits: u32| -> Vec<Vec<Q>> {
        (0..k).map(|w| (0..n).map(|j| Q::from_i64(((bits >> (w * n + j)) & 1) as i64)).collect()).collect()
    };
    let mut out = vec![FiniteAlgebraModule::new(k, n, Vec::new()).expect("valid shape")];
    let mut layer: Vec<Vec<u32>> = vec![Vec::new()];
    for _ in 0..count {
        let mut next = Vec::new();
        for set in &layer {
            let start = set.last().map_or(0, |&b| b + 1);
            for bits in start..(1u32 << cells) {
                let mut s = set.clone();
                s.push(bits);
                out.push(FiniteAlgebraModule::new(k, n, s.iter().map(|&b| pattern(b)).collect()).expect("valid shape"));
                next.push(s);
            }
        }
        layer = next;
    }
    out
}
