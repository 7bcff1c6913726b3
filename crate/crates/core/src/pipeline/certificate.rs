//! The machine-readable non-niceness certificate and the randomized
//! norm-bound suite.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::check::CheckItem;
use crate::pw::{sobolev_norm, PiecewiseFn};
use crate::scalar::{Scalar, Q};

use super::character::{character_check, uniform_grid, CharacterReport};
use super::functional::{apply_g, f0_residual_with, generator, F0Residual, PhiFunctional, VectorFn};
use super::tower::{LevelReport, PipelineTower};
use super::{apply_g_n, PipelineError};

pub const CERTIFICATE_SCHEMA: &str = "certificate_v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateOptions {
    pub grid: usize,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        Self { grid: 101 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerSection {
    pub order: usize,
    pub k_depth: Option<u32>,
    pub k_components: usize,
    pub k_measure: String,
    pub levels: Vec<LevelReport>,
    pub invariants: Vec<CheckItem>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnihilationItem {
    pub phi: String,
    pub n: usize,
    pub value: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct F0Section {
    pub phi: String,
    pub residuals: Vec<F0Residual>,
    /// `|∫ φ'(B_m + χ)|` does not grow with `m`.
    pub non_increasing: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Properness {
    pub witness: String,
    pub value: String,
    pub k_measure: String,
    pub equals_measure: bool,
    pub nonzero: bool,
}

/// What the finite run cannot see: analytic tails of the infinite family.
#[derive(Clone, Debug, Serialize)]
pub struct TailBounds {
    /// `Σ_{n>N} (6 n² 2^-n)²`, bounding `Σ_{n>N} ‖g_n‖²`.
    pub functional_norm_sq: f64,
    /// `Σ_{n>N} n^-2 sup|ρ_n| <= Σ_{n>N} 3·2^-n = 3·2^-N`.
    pub rho_series: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonNicenessCertificate {
    pub schema: &'static str,
    pub tower: TowerSection,
    pub characters: Vec<CharacterReport>,
    pub annihilation: Vec<AnnihilationItem>,
    pub f0_residuals: Vec<F0Section>,
    pub properness: Properness,
    pub tail_bounds: TailBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_bounds: Option<NormBoundReport>,
    pub verdict: &'static str,
    pub failures: Vec<String>,
}

impl NonNicenessCertificate {
    pub fn valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    /// Attaches a norm-bound run; any violating level invalidates the certificate.
    pub fn with_norm_bounds(mut self, report: NormBoundReport) -> Self {
        for l in report.levels.iter().filter(|l| l.violations > 0) {
            self.failures.push(format!("|g_{}(phi)| <= 6 n^2 2^-n |phi|_(1,2): {} of {} samples violate", l.n, l.violations, l.samples));
        }
        self.verdict = if self.failures.is_empty() { "VALID" } else { "INVALID" };
        self.norm_bounds = Some(report);
        self
    }
}

/// `1, x, x², x³ - x`.
pub fn default_test_functions<S: Scalar>() -> Vec<(String, PiecewiseFn<S>)> {
    let c = |v: &[i64]| PiecewiseFn::monomials(v.iter().map(|&x| S::from_i64(x)).collect());
    vec![
        ("1".into(), c(&[1])),
        ("x".into(), c(&[0, 1])),
        ("x^2".into(), c(&[0, 0, 1])),
        ("x^3-x".into(), c(&[0, -1, 0, 1])),
    ]
}

/// Seeded cubics with coefficients in `[-2, 2]` (multiples of 1/8),
/// alternating with piecewise-linear hats on dyadic knots.
pub fn test_function_corpus(seed: u64, count: usize) -> Vec<PiecewiseFn<Q>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|i| {
            if i % 2 == 0 {
                let coeffs = (0..4).map(|_| Q::from_frac(rng.random_range(-16..=16), 8)).collect();
                PiecewiseFn::monomials(coeffs)
            } else {
                let mut knots = [0i64; 3];
                while !(knots[0] < knots[1] && knots[1] < knots[2]) {
                    knots = [0; 3].map(|_| rng.random_range(1..64));
                    knots.sort_unstable();
                }
                let height = Q::from_frac(rng.random_range(-16..=16), 8);
                let z = || Q::from_i64(0);
                let pts = [
                    (z(), z()),
                    (Q::from_frac(knots[0], 64), z()),
                    (Q::from_frac(knots[1], 64), height),
                    (Q::from_frac(knots[2], 64), z()),
                    (Q::from_i64(1), z()),
                ];
                PiecewiseFn::piecewise_linear(&pts).expect("increasing knots")
            }
        })
        .collect()
}

/// Orders at which the `f^[0]` residual is reported: even `m >= 4` up to `N`,
/// and `N` itself.
fn residual_orders(order: usize) -> Vec<usize> {
    let mut ms: Vec<usize> = (4..=order).step_by(2).collect();
    if ms.last() != Some(&order) {
        ms.push(order);
    }
    ms
}

/// Runs the three verification suites and the tower invariants. Any failed
/// item makes the certificate INVALID and is listed by name.
pub fn nonniceness_certificate<S: Scalar>(
    tower: &PipelineTower<S>,
    test_functions: &[(String, PiecewiseFn<S>)],
    opts: &CertificateOptions,
) -> Result<NonNicenessCertificate, PipelineError> {
    let order = tower.order();
    let invariants = tower.invariants();
    let mut failures: Vec<String> = invariants.failures().map(|c| c.name.clone()).collect();

    let grid = uniform_grid::<S>(opts.grid);
    let characters: Vec<CharacterReport> = grid.par_iter().map(|t| character_check(tower, t)).collect();
    failures.extend(characters.iter().filter(|c| !c.passed).map(|c| format!("character at t = {}", c.t)));

    let generators: Vec<VectorFn<S>> = (1..=order).map(|n| generator(tower, n)).collect::<Result<_, _>>()?;
    let orders = residual_orders(order);
    let per_phi: Vec<(Vec<AnnihilationItem>, F0Section)> = test_functions
        .par_iter()
        .map(|(name, phi)| {
            let mut g = PhiFunctional::new(tower, phi);
            let items = generators
                .iter()
                .enumerate()
                .map(|(i, gen)| {
                    let value = g.g_times(gen).expect("within order");
                    AnnihilationItem { phi: name.clone(), n: i + 1, value: value.to_decimal_string(), passed: value.is_negligible() }
                })
                .collect();
            let residuals: Vec<F0Residual> =
                orders.iter().map(|&m| f0_residual_with(&mut g, m).expect("within order")).collect();
            let non_increasing = residuals.windows(2).all(|w| w[1].limit_form_abs <= w[0].limit_form_abs);
            (items, F0Section { phi: name.clone(), residuals, non_increasing })
        })
        .collect();
    let (annihilation, f0_residuals): (Vec<Vec<AnnihilationItem>>, Vec<F0Section>) = per_phi.into_iter().unzip();
    let annihilation: Vec<AnnihilationItem> = annihilation.into_iter().flatten().collect();
    failures.extend(annihilation.iter().filter(|a| !a.passed).map(|a| format!("g(({}) f^[{}]) = 0", a.phi, a.n)));
    for sec in &f0_residuals {
        for r in &sec.residuals {
            if !r.gap_identity {
                failures.push(format!("g(({}) f^[0]) at order {}: assembled = limit form + gap", sec.phi, r.m));
            }
            if !r.passed {
                failures.push(format!("|g(({}) f^[0])| at order {} <= |phi'|_2 2^-{}", sec.phi, r.m, r.m));
            }
        }
        if !sec.non_increasing {
            failures.push(format!("g(({}) f^[0]) residual non-increasing in m", sec.phi));
        }
    }

    let measure = tower.k().measure();
    let value = apply_g(tower, &VectorFn::basis(0, PiecewiseFn::identity()))?;
    let properness = Properness {
        witness: "x e_0".into(),
        value: value.to_decimal_string(),
        k_measure: measure.to_decimal_string(),
        equals_measure: (value.clone() - measure.clone()).is_negligible(),
        nonzero: !value.is_negligible(),
    };
    if !(properness.equals_measure && properness.nonzero) {
        failures.push("properness: g(x e_0) = measure(K) != 0".into());
    }

    let tail_bounds = TailBounds {
        functional_norm_sq: (order + 1..order + 200)
            .map(|n| {
                let b = 6.0 * (n * n) as f64 * (-(n as f64)).exp2();
                b * b
            })
            .sum(),
        rho_series: 3.0 * (-(order as f64)).exp2(),
    };

    Ok(NonNicenessCertificate {
        schema: CERTIFICATE_SCHEMA,
        tower: TowerSection {
            order,
            k_depth: tower.depth(),
            k_components: tower.k().len(),
            k_measure: measure.to_decimal_string(),
            levels: tower.levels().to_vec(),
            invariants: invariants.checks,
        },
        characters,
        annihilation,
        f0_residuals,
        properness,
        tail_bounds,
        norm_bounds: None,
        verdict: if failures.is_empty() { "VALID" } else { "INVALID" },
        failures,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NormBoundLevel {
    pub n: usize,
    pub samples: usize,
    pub violations: usize,
    /// `max |g_n(φ)| / (6 n² 2^-n ‖φ‖_{1,2})`.
    pub worst_ratio: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormBoundReport {
    pub seed: u64,
    pub levels: Vec<NormBoundLevel>,
}

impl NormBoundReport {
    pub fn violations(&self) -> usize {
        self.levels.iter().map(|l| l.violations).sum()
    }
}

/// Tries to falsify `|g_n(φ)| <= 6 n² 2^-n ‖φ‖_{1,2}` with `samples` seeded
/// test functions per level.
pub fn norm_bound_suite<S: Scalar>(tower: &PipelineTower<S>, seed: u64, samples: usize) -> NormBoundReport {
    let levels = (1..=tower.order())
        .into_par_iter()
        .map(|n| {
            let phis = test_function_corpus(seed.wrapping_add(n as u64), samples);
            let bound = 6.0 * (n * n) as f64 * (-(n as f64)).exp2();
            let mut violations = 0;
            let mut worst = 0.0f64;
            for phi in phis {
                let phi = phi.map_scalar(|x| S::from_ratio(x));
                let norm = sobolev_norm(&phi);
                let value = apply_g_n(tower, n, &phi).to_f64().abs();
                if norm == 0.0 {
                    continue;
                }
                let ratio = value / (bound * norm);
                worst = worst.max(ratio);
                if ratio > 1.0 {
                    violations += 1;
                }
            }
            NormBoundLevel { n, samples, violations, worst_ratio: worst }
        })
        .collect();
    NormBoundReport { seed, levels }
}
