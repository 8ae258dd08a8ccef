use ndarray::Array2;
use proptest::prelude::*;

use crftiw::cli::preprocess_ma;
use crftiw::evaluate::ari;
use crftiw::npmix::{fit_mixture, map_assign, select_l, Init, MixtureOptions};
use crftiw::wavelet::{circular_shift, featurize_ti, Curve, WaveletFilter};

fn curve_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-10.0f64..10.0, len)
}

fn labels(n: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::collection::vec(1usize..=4, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ti_features_ignore_circular_shifts(values in curve_strategy(64), h in -200i64..200) {
        let c = Curve::new(values).unwrap();
        let f = WaveletFilter::symmlet8();
        let (Ok(a), Ok(b)) = (featurize_ti(&c, &f), featurize_ti(&circular_shift(&c, h), &f)) else {
            return Ok(());
        };
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn ti_features_shift_by_log_scale(values in curve_strategy(32), c in 0.01f64..100.0) {
        let curve = Curve::new(values).unwrap();
        let f = WaveletFilter::symmlet4();
        if let (Ok(a), Ok(b)) = (featurize_ti(&curve, &f), featurize_ti(&curve.scaled(c), &f)) {
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((y - x - c.ln()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn ari_symmetric_and_label_blind((p, q) in (2usize..30).prop_flat_map(|n| (labels(n), labels(n)))) {
        let a = ari(&p, &q).unwrap();
        prop_assert!((a - ari(&q, &p).unwrap()).abs() < 1e-12);
        let renamed: Vec<usize> = p.iter().map(|l| 10 * (5 - l)).collect();
        prop_assert!((a - ari(&renamed, &q).unwrap()).abs() < 1e-12);
        prop_assert!((ari(&p, &renamed).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!(a <= 1.0 + 1e-12);
    }

    #[test]
    fn elbow_choice_is_in_range(values in proptest::collection::vec(-1e3f64..1e3, 2..12), tau in 0.1f64..50.0) {
        let l = select_l(&values, tau).unwrap();
        prop_assert!((1..=values.len()).contains(&l));
    }

    #[test]
    fn moving_average_keeps_constants(v in -5.0f64..5.0, len in 1usize..40, window in 1usize..10) {
        let out = preprocess_ma(&vec![v; len], window).unwrap();
        prop_assert_eq!(out.len(), len);
        for x in out {
            prop_assert!((x - v).abs() < 1e-12);
        }
    }
}

fn two_blobs(seed: u64) -> Array2<f64> {
    use rand::SeedableRng;
    use rand_distr::{Distribution, StandardNormal};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((60, 2), |(i, _)| {
        let z: f64 = StandardNormal.sample(&mut rng);
        if i < 30 {
            z
        } else {
            3.0 + z
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn posterior_rows_are_distributions(seed in 0u64..1000, l in 2usize..4) {
        let data = two_blobs(seed);
        let (_, post) = fit_mixture(&data, l, &MixtureOptions { seed, ..Default::default() }).unwrap();
        for row in post.matrix().rows() {
            prop_assert!((row.sum() - 1.0).abs() < 1e-12);
            prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
        }
        prop_assert!(map_assign(&post).labels().iter().all(|k| (1..=l).contains(k)));
    }

    #[test]
    fn fit_is_equivariant_to_component_order(seed in 0u64..1000) {
        let data = two_blobs(seed);
        let init = Array2::from_shape_fn((60, 3), |(i, k)| if i % 3 == k { 0.8 } else { 0.1 });
        let order = [2usize, 0, 1];
        let permuted = Array2::from_shape_fn((60, 3), |(i, k)| init[[i, order[k]]]);
        let fit = |p: Array2<f64>| {
            fit_mixture(&data, 3, &MixtureOptions { init: Init::Posteriors(p), ..Default::default() })
                .unwrap()
        };
        let (a, pa) = fit(init);
        let (b, pb) = fit(permuted);
        prop_assert!((a.loglik - b.loglik).abs() < 1e-9);
        for (k, &o) in order.iter().enumerate() {
            prop_assert!((b.proportions[k] - a.proportions[o]).abs() < 1e-12);
            for i in 0..60 {
                prop_assert!((pb.matrix()[[i, k]] - pa.matrix()[[i, o]]).abs() < 1e-9);
            }
        }
    }
}
