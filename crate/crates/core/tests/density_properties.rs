use nicety::density::{apply_operator, kernel_vector, min_singular_oracle, span_is_dense, PerturbationPair, Verdict};
use nicety::{Scalar, Q};
use num::Zero;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> Q {
    Q::from_frac(n, d)
}

/// Determinant by exact Gaussian elimination: the truncated operator is
/// injective exactly when this is non-zero.
fn det(mut m: Vec<Vec<Q>>) -> Q {
    let n = m.len();
    let mut acc = q(1, 1);
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !m[r][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            m.swap(p, c);
            acc = -acc;
        }
        acc = acc * m[c][c].clone();
        for r in c + 1..n {
            let f = m[r][c].clone() / m[c][c].clone();
            for k in c..n {
                let v = m[c][k].clone() * f.clone();
                m[r][k] = m[r][k].clone() - v;
            }
        }
    }
    acc
}

fn pair() -> impl Strategy<Value = PerturbationPair<Q>> {
    (1usize..=8)
        .prop_flat_map(|n| (prop::collection::vec(-32i64..=32, n), prop::collection::vec(-32i64..=32, n)))
        .prop_map(|(g, d)| {
            PerturbationPair::new(g.into_iter().map(|x| q(x, 8)).collect(), d.into_iter().map(|x| q(x, 8)).collect()).unwrap()
        })
}

/// A pair forced onto the critical surface `Σ γ_n δ_n = -1` by solving for
/// the last `δ` (with a non-zero last `γ`).
fn critical_pair() -> impl Strategy<Value = PerturbationPair<Q>> {
    (pair(), 1i64..=32).prop_map(|(p, g_last)| {
        let mut gamma = p.gamma().to_vec();
        let mut delta = p.delta().to_vec();
        let last = gamma.len() - 1;
        gamma[last] = q(g_last, 8);
        let partial = gamma[..last].iter().zip(&delta[..last]).fold(Q::zero(), |acc, (g, d)| acc + g.clone() * d.clone());
        delta[last] = (q(-1, 1) - partial) / gamma[last].clone();
        PerturbationPair::new(gamma, delta).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn verdict_agrees_with_the_determinant(p in pair()) {
        let d = det(p.operator_matrix());
        let report = span_is_dense(&p);
        prop_assert_eq!(report.dense(), !d.is_zero());
        prop_assert_eq!(d, report.sum + q(1, 1));
    }

    #[test]
    fn singular_values_agree_away_from_the_critical_surface(p in pair()) {
        let s = p.pairing().to_f64();
        prop_assume!((s + 1.0).abs() > 0.1);
        prop_assert!(span_is_dense(&p).dense());
        prop_assert!(min_singular_oracle(&p) > 1e-6);
    }

    #[test]
    fn critical_pairs_have_an_exact_kernel(p in critical_pair()) {
        prop_assert_eq!(span_is_dense(&p).verdict, Verdict::NotDense);
        let v = kernel_vector(&p).unwrap();
        prop_assert!(!v[0].is_zero());
        for (n, g) in p.gamma().iter().enumerate() {
            prop_assert_eq!(v[n + 1].clone() + g.clone() * v[0].clone(), Q::zero());
        }
        prop_assert!(apply_operator(&p, &v).iter().all(|x| x.is_zero()));
        prop_assert!(min_singular_oracle(&p) < 1e-8);
    }

    #[test]
    fn rescaling_keeps_the_pairing(p in pair(), c in prop::sample::select(vec![-3i64, -1, 2, 5, 7])) {
        let r = p.rescaled(&q(c, 2));
        prop_assert_eq!(r.pairing(), p.pairing());
        prop_assert_eq!(span_is_dense(&r).verdict, span_is_dense(&p).verdict);
    }

    #[test]
    fn float_mode_follows_exact_mode_off_the_surface(p in pair()) {
        prop_assume!((p.pairing().to_f64() + 1.0).abs() > 1e-6);
        let f = PerturbationPair::<f64>::new(
            p.gamma().iter().map(Scalar::to_f64).collect(),
            p.delta().iter().map(Scalar::to_f64).collect(),
        )
        .unwrap();
        prop_assert_eq!(span_is_dense(&f).verdict, span_is_dense(&p).verdict);
    }
}
