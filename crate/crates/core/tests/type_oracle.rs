mod common;

use common::*;
use proptest::prelude::*;
use wiretap_core::ensemble::exhaustive_ensemble_mean;
use wiretap_core::exponents::{eb_closed_form, et, level_range, DualOptions};
use wiretap_core::prob::{Channel, Distribution, JointXZ};
use wiretap_core::type_oracle::*;

#[test]
fn eb_bruteforce_matches_closed_form_both_ways() {
    let joint = bsc_joint(0.1);
    let p = Distribution::uniform(2);
    let closed = eb_closed_form(&joint, &p, 0.5, DualOptions::default()).unwrap();
    let o = eb_bruteforce(&joint, &p, 0.5, DEFAULT_EB_GRID).unwrap();
    // Every grid point is feasible, so none can beat the true minimum.
    assert!(o.grid_value >= closed.value - 1e-9);
    assert_close(
        o.grid_value,
        closed.value,
        o.slack.max(1e-3),
        "grid vs closed form",
    );
    assert_close(o.value, closed.value, 1e-9, "with analytic candidate");
}

#[test]
fn eb_bruteforce_ternary_input() {
    let mut r = rng(21);
    let joint = random_joint(&mut r, 3, 3);
    let p = random_distribution(&mut r, 3);
    let (lo, hi) = level_range(&joint, &p).unwrap();
    for k in 1..4 {
        let a = lo + k as f64 / 4.0 * (hi - lo);
        let closed = eb_closed_form(&joint, &p, a, DualOptions::default()).unwrap();
        let o = eb_bruteforce(&joint, &p, a, 24).unwrap();
        assert!(o.grid_value >= closed.value - 1e-9, "level {a}");
        assert!(o.grid_value >= a - o.slack, "level {a}");
        assert_close(o.grid_value, closed.value, 0.05, "coarse ternary grid");
    }
}

#[test]
fn eb_bruteforce_rejects_large_alphabets() {
    let mut r = rng(5);
    let joint = random_joint(&mut r, 4, 3);
    let p = random_distribution(&mut r, 3);
    assert!(eb_bruteforce(&joint, &p, 0.0, 10).is_err());
}

#[test]
fn type_classes_partition_the_sequence_space() {
    let p = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
    let total: f64 = enumerate_n_types(5, 3, 1000)
        .unwrap()
        .iter()
        .map(|t| type_class_log_prob(&p, t).unwrap().exp())
        .sum();
    assert_close(total, 1.0, 1e-13, "Σ P^n(T)");
}

#[test]
fn decomposition_over_output_types_matches_exhaustive_mean() {
    let joint = bsc_joint(0.1);
    let exhaustive = exhaustive_ensemble_mean(joint.input(), joint.channel(), 4, 2).unwrap();
    let by_types = type_decomposition(&joint, 4, 2, DEFAULT_ENUMERATION_CAP).unwrap();
    assert_close(
        by_types,
        exhaustive.divergence.estimate,
        1e-10,
        "E[D] by types",
    );
}

#[test]
fn decomposition_on_an_asymmetric_channel() {
    let joint = JointXZ::new(
        Distribution::new(vec![0.35, 0.65]).unwrap(),
        Channel::new(vec![vec![0.8, 0.2], vec![0.25, 0.75]]).unwrap(),
    )
    .unwrap();
    for (n, mp) in [(3, 2), (2, 3), (4, 1)] {
        let exhaustive = exhaustive_ensemble_mean(joint.input(), joint.channel(), n, mp).unwrap();
        let by_types = type_decomposition(&joint, n, mp, DEFAULT_ENUMERATION_CAP).unwrap();
        assert_close(
            by_types,
            exhaustive.divergence.estimate,
            1e-10,
            "E[D] by types",
        );
    }
}

#[test]
fn all_zero_output_type_moment_matches_enumeration() {
    // For z = 0000 the moment is E over pairs of codewords of U ln U with
    // U = (W^n(z|x1) + W^n(z|x2)) / (2 P_Z^n(z)); enumerate the 256 pairs.
    let joint = bsc_joint(0.1);
    let z = NType::new(vec![4, 0]).unwrap();
    let got = exact_un_log_moment(&joint, &z, 2, DEFAULT_ENUMERATION_CAP).unwrap();
    let ratio = |x: usize| {
        let flips = x.count_ones() as i32;
        0.9f64.powi(4 - flips) * 0.1f64.powi(flips) / 0.5f64.powi(4)
    };
    let mut expected = 0.0;
    for x1 in 0..16 {
        for x2 in 0..16 {
            let u = 0.5 * (ratio(x1) + ratio(x2));
            expected += u * u.ln() / 256.0;
        }
    }
    assert_close(got, expected, 1e-12, "E[U ln U] at z = 0000");
}

/// `-(1/n) ln E[U_n ln U_n]` for the balanced output type at each even n,
/// with `M' = ⌈exp(nR')⌉`.
fn moment_exponents(joint: &JointXZ, rate_prime: f64, ns: &[usize]) -> Vec<(usize, f64)> {
    ns.iter()
        .map(|&n| {
            let mp = ((n as f64 * rate_prime).exp() * (1.0 - 1e-12)).ceil() as usize;
            let z = NType::new(vec![n / 2, n / 2]).unwrap();
            let m = exact_un_log_moment(joint, &z, mp, 5_000_000).unwrap();
            (n, -m.ln() / n as f64)
        })
        .collect()
}

#[test]
fn per_type_moment_tracks_the_type_exponent() {
    let joint = bsc_joint(0.1);
    let p_hat = Distribution::uniform(2);
    for (rate_prime, ns) in [(0.2, vec![2, 4, 6, 8]), (0.5, vec![2, 4, 6])] {
        let target = et(&joint, &p_hat, rate_prime).unwrap().value;
        let exps = moment_exponents(&joint, rate_prime, &ns);
        let &(n, last) = exps.last().unwrap();
        println!("R' = {rate_prime}: E_t = {target:.4}, exponents {exps:?}");
        assert!(
            (last - target).abs() <= 0.15,
            "n = {n}: {last} not within 0.15 of {target}"
        );
        assert!(exps
            .iter()
            .all(|&(_, e)| e >= target - 0.15 || !e.is_finite()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shells_sum_to_one(seed in any::<u64>(), n in 1usize..6) {
        let mut r = rng(seed);
        let joint = random_joint(&mut r, 2, 3);
        for z in enumerate_n_types(n, 3, 1000).unwrap() {
            let set = a_level_set(&joint, &z, 100_000).unwrap();
            prop_assert!((set.total_prob() - 1.0).abs() < 1e-10);
            let distinct = set.levels.windows(2).all(|w| w[1].a - w[0].a > LEVEL_MERGE_TOLERANCE);
            prop_assert!(distinct);
        }
    }

    #[test]
    fn brute_force_never_beats_the_level(seed in any::<u64>(), t in 0.05f64..0.95) {
        let mut r = rng(seed);
        let joint = random_joint(&mut r, 2, 2);
        let p = random_distribution(&mut r, 2);
        let (lo, hi) = level_range(&joint, &p).unwrap();
        let a = lo + t * (hi - lo);
        let o = eb_bruteforce(&joint, &p, a, 100).unwrap();
        prop_assert!(o.value >= a - o.slack);
        prop_assert!(o.grid_value >= o.value);
    }
}
