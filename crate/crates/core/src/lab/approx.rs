//! Approximating a pointwise-admissible `f ∈ C([0,1], Q^d)` by an element of
//! the module generated by finitely many vector functions.
//!
//! At each sample `ω` the best constant combination `g_ω` of the generator
//! values is found exactly; `V_ω` is grown around `ω` while a certified bound
//! keeps `max_i |f_i - g_{ω,i}|` below `eps`; samples are added where the
//! `V_ω` leave gaps; a partition of unity glues the `g_ω` together. Distances
//! use the max norm on `Q^d`.

use num::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::pipeline::VectorFn;
use crate::pw::PiecewiseFn;
use crate::scalar::{Scalar, Q};

use super::linalg::project;
use super::partition::{partition_of_unity, uncovered_points, CoverPartition};
use super::LabError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApproxOptions {
    /// Uniform samples checked for pointwise density.
    pub grid: usize,
    /// Cap on the number of local approximants.
    pub max_centers: usize,
}

impl Default for ApproxOptions {
    fn default() -> Self {
        Self { grid: 257, max_centers: 1 << 14 }
    }
}

#[derive(Clone, Debug)]
pub struct ModuleApproximation {
    pub g: VectorFn<Q>,
    /// `g = Σ_i coefficients[i] · generators[i]`.
    pub coefficients: Vec<PiecewiseFn<Q>>,
    pub centers: Vec<Q>,
    pub partition: CoverPartition,
    /// Certified upper bound on `sup_t max_i |f_i(t) - g_i(t)|`.
    pub distance_bound: Q,
    /// Largest deviation seen at four times the grid density.
    pub sampled_distance: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ApproxSummary {
    pub centers: usize,
    pub cover_sets_used: usize,
    pub distance_bound: f64,
    pub sampled_distance: f64,
}

impl ModuleApproximation {
    pub fn summary(&self) -> ApproxSummary {
        ApproxSummary {
            centers: self.centers.len(),
            cover_sets_used: self.partition.active().len(),
            distance_bound: self.distance_bound.to_f64(),
            sampled_distance: self.sampled_distance,
        }
    }
}

/// Seeded instance in dimension `d <= 3`: a frame `h_i = e_i + small
/// quadratics` (diagonally dominant, hence a basis at every `t`), possibly one
/// extra arbitrary generator, and `f = Σ b_i h_i` for quadratic `b_i`.
pub fn random_approx_instance(seed: u64) -> (Vec<VectorFn<Q>>, VectorFn<Q>, Q) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // coefficients in [-scale, scale] / 8
    let quadratic = |rng: &mut ChaCha8Rng, scale: i64| {
        PiecewiseFn::monomials((0..3).map(|_| Q::from_frac(rng.random_range(-scale..=scale), 8)).collect())
    };
    let d = rng.random_range(1..=3);
    let mut gens: Vec<VectorFn<Q>> = (0..d)
        .map(|j| {
            let mut v = VectorFn::zero();
            for i in 0..d {
                // off-diagonal sup <= 3/16 per entry, diagonal >= 1 - 3/16
                let p = quadratic(&mut rng, 1).scale(&Q::from_frac(1, 2));
                v.set(i, if i == j { p.add_constant(&Q::one()) } else { p });
            }
            v
        })
        .collect();
    if rng.random_bool(0.5) {
        let mut v = VectorFn::zero();
        for i in 0..d {
            v.set(i, quadratic(&mut rng, 16));
        }
        gens.push(v);
    }
    let f = gens.iter().fold(VectorFn::zero(), |acc, h| acc.add(&h.times(&quadratic(&mut rng, 16))));
    let eps = Q::from_frac(1, [10, 20, 50][rng.random_range(0..3)]);
    (gens, f, eps)
}

struct Local {
    center: Q,
    coeffs: Vec<Q>,
    interval: (Q, Q),
}

pub fn module_approximate(
    generators: &[VectorFn<Q>],
    f: &VectorFn<Q>,
    eps: &Q,
    opts: ApproxOptions,
) -> Result<ModuleApproximation, LabError> {
    if *eps <= Q::zero() {
        return Err(LabError::InvalidInput("eps must be positive".into()));
    }
    if opts.grid < 2 {
        return Err(LabError::InvalidInput("grid needs at least two points".into()));
    }
    let dim = generators.iter().chain([f]).filter_map(VectorFn::support_end).max().map_or(1, |e| e + 1);
    let step = Q::from_frac(1, (opts.grid - 1) as i64);
    let ctx = Ctx { generators, f, eps, dim, step: step.clone() };

    let mut locals: Vec<Local> = Vec::new();
    for i in 0..opts.grid {
        locals.push(ctx.local(Q::from_frac(i as i64, (opts.grid - 1) as i64))?);
    }
    loop {
        let cover: Vec<(Q, Q)> = locals.iter().map(|l| l.interval.clone()).collect();
        let gaps = uncovered_points(&cover);
        if gaps.is_empty() {
            break;
        }
        if locals.len() + gaps.len() > opts.max_centers || gaps.iter().any(|x| locals.iter().any(|l| l.center == *x)) {
            return Err(LabError::NotCovering { point: gaps[0].clone() });
        }
        for x in gaps {
            locals.push(ctx.local(x)?);
        }
    }
    let partition = partition_of_unity(&locals.iter().map(|l| l.interval.clone()).collect::<Vec<_>>())?;

    let coefficients: Vec<PiecewiseFn<Q>> = (0..generators.len())
        .map(|i| partition.combine(&locals.iter().map(|l| l.coeffs[i].clone()).collect::<Vec<_>>()))
        .collect();
    let g = generators.iter().zip(&coefficients).fold(VectorFn::zero(), |acc, (h, a)| acc.add(&h.times(a)));

    let mut distance_bound = Q::zero();
    for i in 0..dim {
        let diff = f.coord(i).sub(&g.coord(i));
        distance_bound = distance_bound.max(diff.segment().sup_abs_bound());
    }
    let samples = 4 * (opts.grid - 1);
    let sampled_distance = (0..=samples)
        .map(|s| {
            let t = Q::from_frac(s as i64, samples as i64);
            (0..dim).map(|i| (f.coord(i).eval(&t) - g.coord(i).eval(&t)).to_f64().abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    if distance_bound >= *eps {
        return Err(LabError::NotCertified { bound: distance_bound.to_f64() });
    }
    Ok(ModuleApproximation {
        g,
        coefficients,
        centers: locals.into_iter().map(|l| l.center).collect(),
        partition,
        distance_bound,
        sampled_distance,
    })
}

struct Ctx<'a> {
    generators: &'a [VectorFn<Q>],
    f: &'a VectorFn<Q>,
    eps: &'a Q,
    dim: usize,
    step: Q,
}

impl Ctx<'_> {
    fn local(&self, t: Q) -> Result<Local, LabError> {
        let cols: Vec<Vec<Q>> = self.generators.iter().map(|h| h.eval(&t, self.dim)).collect();
        let target = self.f.eval(&t, self.dim);
        let (coeffs, proj) = project(&cols, &target);
        let residual: Vec<Q> = target.iter().zip(&proj).map(|(a, b)| a.clone() - b).collect();
        let half = self.eps.clone() / Q::from_i64(2);
        if residual.iter().any(|r| r.abs() >= half) {
            // the residual is orthogonal to every generator value at t
            return Err(LabError::DensityViolated { t, witness: residual });
        }
        let errs: Vec<PiecewiseFn<Q>> = (0..self.dim)
            .map(|i| {
                let gi = self.generators.iter().zip(&coeffs).fold(PiecewiseFn::zero(), |acc, (h, c)| {
                    if c.is_zero() {
                        acc
                    } else {
                        acc.add(&h.coord(i).scale(c))
                    }
                });
                self.f.coord(i).sub(&gi)
            })
            .collect();
        let right = self.reach(&errs, &t, true)?;
        let left = self.reach(&errs, &t, false)?;
        Ok(Local { center: t, coeffs, interval: (left, right) })
    }

    // Endpoint of V_ω on one side: halve the step until the certified bound
    // on the closed stretch is below eps. Past the ends of [0, 1] the
    // endpoint is pushed one step out so that 0 and 1 are interior.
    fn reach(&self, errs: &[PiecewiseFn<Q>], t: &Q, right: bool) -> Result<Q, LabError> {
        let mut h = self.step.clone();
        for _ in 0..64 {
            let end = if right { t.clone() + &h } else { t.clone() - &h };
            let (lo, hi) = if right {
                (t.clone(), end.clone().min(Q::one()))
            } else {
                (end.clone().max(Q::zero()), t.clone())
            };
            let bound = errs.iter().map(|e| e.segment().restrict(&lo, &hi).sup_abs_bound()).fold(Q::zero(), Q::max);
            if bound < *self.eps {
                return Ok(match right {
                    true if end >= Q::one() => end + &self.step,
                    false if end <= Q::zero() => end - &self.step,
                    _ => end,
                });
            }
            h = h / Q::from_i64(2);
        }
        Err(LabError::NotCertified { bound: f64::NAN })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    fn constant_vec(vals: &[i64]) -> VectorFn<Q> {
        let mut v = VectorFn::zero();
        for (i, &x) in vals.iter().enumerate() {
            v.set(i, PiecewiseFn::constant(Q::from_i64(x)));
        }
        v
    }

    #[test]
    fn a_generator_is_reproduced() {
        let mut h = VectorFn::basis(0, PiecewiseFn::identity());
        h.set(1, PiecewiseFn::monomials(vec![q(1, 1), q(0, 1), q(-1, 1)]));
        let out = module_approximate(&[h.clone()], &h, &q(1, 100), ApproxOptions { grid: 9, ..Default::default() }).unwrap();
        assert!(out.g.same_as(&h));
        assert!(out.distance_bound.is_zero());
    }

    #[test]
    fn two_dimensional_example() {
        let e0 = constant_vec(&[1, 0]);
        let mut xe = VectorFn::basis(0, PiecewiseFn::identity());
        xe.set(1, PiecewiseFn::one());
        let f = constant_vec(&[0, 1]);
        let gens = [e0, xe];
        let out = module_approximate(&gens, &f, &q(1, 10), ApproxOptions::default()).unwrap();
        assert!(out.distance_bound < q(1, 10));
        assert!(out.sampled_distance < 0.1);
        assert!(out.partition.verify().all_passed());
        // g is literally Σ a_i h_i
        let rebuilt = gens.iter().zip(&out.coefficients).fold(VectorFn::zero(), |acc, (h, a)| acc.add(&h.times(a)));
        assert_eq!(rebuilt, out.g);
    }

    #[test]
    fn missing_direction_is_reported_as_a_character() {
        let gens = [constant_vec(&[1, 0]), VectorFn::basis(0, PiecewiseFn::identity())];
        let err = module_approximate(&gens, &constant_vec(&[0, 1]), &q(1, 10), ApproxOptions::default()).unwrap_err();
        match err {
            LabError::DensityViolated { t, witness } => {
                assert_eq!(t, q(0, 1));
                assert_eq!(witness, vec![q(0, 1), q(1, 1)]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn seeded_instances_are_approximated() {
        for seed in 0..3 {
            let (gens, f, eps) = random_approx_instance(seed);
            let out = module_approximate(&gens, &f, &eps, ApproxOptions::default()).unwrap();
            assert!(out.distance_bound < eps);
            assert!(out.sampled_distance < eps.to_f64());
        }
    }

    #[test]
    fn coarse_grid_is_refined() {
        // V_ω has radius about 1/20 while the grid spacing is 1/2
        let gens = [constant_vec(&[1, 0]), {
            let mut v = VectorFn::basis(0, PiecewiseFn::identity());
            v.set(1, PiecewiseFn::one());
            v
        }];
        let out = module_approximate(&gens, &constant_vec(&[0, 1]), &q(1, 20), ApproxOptions { grid: 3, ..Default::default() })
            .unwrap();
        assert!(out.centers.len() > 3);
        assert!(out.distance_bound < q(1, 20));
    }
}
