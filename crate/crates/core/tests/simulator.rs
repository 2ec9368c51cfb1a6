use std::f64::consts::PI;

use proptest::prelude::*;
use vqreg::simulator::{
    loss_from_run, mitigate_counts, sample, shadow_estimate, simulate, ConfusionSet, Estimator, NoiseModel, RunMode,
};
use vqreg::synthesis::{build_regression_circuit, BuildMode, DataTable, RegressionParams};
use vqreg::{Circuit, Gate};

fn circuit() -> impl Strategy<Value = Circuit> {
    (2usize..=5).prop_flat_map(|width| {
        let gate = (0..5usize, 0..width, 0..width, -PI..PI).prop_map(|(k, q, t, a)| match k {
            0 => Gate::x(q),
            1 => Gate::h(q),
            2 => Gate::rz(q, a),
            3 => Gate::rx(q, a),
            _ if q == t => Gate::h(q),
            _ => Gate::cnot(q, t),
        });
        prop::collection::vec(gate, 0..16).prop_map(move |g| Circuit::from_gates(width, g).unwrap())
    })
}

fn regression() -> impl Strategy<Value = (DataTable, RegressionParams)> {
    (1usize..=4, 2usize..=4).prop_flat_map(|(r, c)| {
        (prop::collection::vec(-1.0f64..1.0, r * c), prop::collection::vec(0.0..PI, c)).prop_filter_map(
            "zero table",
            move |(v, p)| {
                let t = DataTable::new(r, c, v).ok()?.normalized().ok()?;
                Some((t, RegressionParams::new(p).ok()?))
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_preserves_norm(c in circuit()) {
        prop_assert!((simulate(&c).unwrap().norm_sqr() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sampling_is_seeded_and_complete(c in circuit(), seed in any::<u64>(), shots in 1u64..500) {
        let a = sample(&c, shots, seed, None).unwrap();
        prop_assert_eq!(a.shots(), shots);
        prop_assert_eq!(a.iter().map(|(_, n)| n).sum::<u64>(), shots);
        prop_assert_eq!(&a, &sample(&c, shots, seed, None).unwrap());
        let probs = simulate(&c).unwrap().probabilities();
        prop_assert!(a.iter().all(|(i, _)| probs[i] > 0.0));
    }

    #[test]
    fn noiseless_model_matches_no_model(c in circuit(), seed in any::<u64>()) {
        prop_assert_eq!(
            sample(&c, 200, seed, Some(&NoiseModel::noiseless())).unwrap(),
            sample(&c, 200, seed, None).unwrap()
        );
    }

    #[test]
    fn identity_mitigation_returns_frequencies(c in circuit(), seed in any::<u64>()) {
        let counts = sample(&c, 300, seed, None).unwrap();
        let q = mitigate_counts(&counts, &ConfusionSet::identity(c.width())).unwrap();
        for (i, f) in counts.frequencies() {
            prop_assert!((q.get(i) - f).abs() <= 1e-12);
        }
        prop_assert!((q.total() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn mitigated_distribution_is_normalized(c in circuit(), seed in any::<u64>(), flip in 0.0f64..0.2) {
        let noise = NoiseModel::readout_only(flip, flip / 2.0);
        let counts = sample(&c, 500, seed, Some(&noise)).unwrap();
        let q = mitigate_counts(&counts, &ConfusionSet::from_noise(&noise, c.width())).unwrap();
        prop_assert!((q.total() - 1.0).abs() <= 1e-9);
        prop_assert!(q.probs.values().all(|p| *p >= 0.0));
    }

    #[test]
    fn exact_loss_is_nonnegative_and_bounded((t, p) in regression()) {
        let (c, layout) = build_regression_circuit(&t, &p, BuildMode::Optimized).unwrap();
        let e = loss_from_run(&c, &layout, &RunMode::Exact, Estimator::XBasis).unwrap();
        prop_assert!(e.loss >= 0.0);
        prop_assert!(e.success_probability <= e.anc1_probability + 1e-12);
        prop_assert!(e.anc1_probability <= 1.0 / layout.k_pad() as f64 + 1e-12);
    }

    #[test]
    fn one_shadow_batch_is_one_run((t, p) in regression(), seed in any::<u64>()) {
        let (c, layout) = build_regression_circuit(&t, &p, BuildMode::Optimized).unwrap();
        let mode = RunMode::Sampled { shots: 2000, seed, noise: None, mitigation: None };
        let single = loss_from_run(&c, &layout, &mode, Estimator::XBasis);
        let shadow = shadow_estimate(&c, &layout, 2000, 1, seed, None, None);
        match (single, shadow) {
            (Ok(a), Ok(b)) => prop_assert!((a.loss - b).abs() <= 1e-12),
            (Err(_), Err(_)) => {}
            (a, b) => prop_assert!(false, "{a:?} vs {b:?}"),
        }
    }
}
