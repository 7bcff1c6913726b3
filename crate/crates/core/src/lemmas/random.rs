//! Seeded inputs for the lemma postcondition suites.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::pw::{svc_set, IntervalUnion, PiecewiseFn, SetFn};
use crate::scalar::{Scalar, Q};

use super::bump::BumpSpec;

fn small_rational(rng: &mut ChaCha8Rng, range: i64, den: i64) -> Q {
    Q::from_frac(rng.random_range(-range..=range), den)
}

/// `α < β` in `[-2, 2]` on a grid of `1/64`, slopes in `[-8, 8]` (multiples of
/// 1/16), `eps` a power of two between `2^-12` and `1`.
pub fn random_bump_spec(seed: u64) -> BumpSpec<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = rng.random_range(-128..127);
    let beta = rng.random_range(alpha + 1..=128);
    BumpSpec::new(
        Q::from_frac(alpha, 64),
        Q::from_frac(beta, 64),
        small_rational(&mut rng, 128, 16),
        small_rational(&mut rng, 128, 16),
        Q::pow2_neg(rng.random_range(0..=12)),
    )
    .expect("alpha < beta and eps > 0")
}

/// `(K, a, f, eps)` with `K` a fat Cantor stage of depth 8 or 9, `a` a cubic
/// restricted to `K`, `f` a cubic (hence C¹) and `eps` in `{1/4, 1/8, 1/16}`.
/// At these depths every component is shorter than the cover width, so the
/// construction is always feasible.
pub fn random_prescribe_instance(seed: u64) -> (IntervalUnion<Q>, SetFn<Q>, PiecewiseFn<Q>, Q) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = svc_set(rng.random_range(8..=9)).expect("positive depth");
    let cubic = |rng: &mut ChaCha8Rng| PiecewiseFn::monomials((0..4).map(|_| small_rational(rng, 8, 8)).collect());
    let a = SetFn::restrict(&cubic(&mut rng), &k);
    let f = cubic(&mut rng);
    let eps = Q::pow2_neg(rng.random_range(2..=4));
    (k, a, f, eps)
}
