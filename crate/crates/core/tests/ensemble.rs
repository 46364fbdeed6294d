mod common;

use common::*;
use wiretap_core::ensemble::*;
use wiretap_core::exponents::secrecy_exponent;
use wiretap_core::prob::{
    kl_divergence, mutual_information, output_marginal, Channel, Distribution, JointXZ,
    WiretapInstance,
};

fn bsc() -> (Distribution, Channel) {
    (Distribution::uniform(2), Channel::bsc(0.1).unwrap())
}

fn independent() -> (Distribution, Channel) {
    let row = Distribution::new(vec![0.6, 0.4]).unwrap();
    (
        Distribution::new(vec![0.3, 0.7]).unwrap(),
        Channel::constant(2, row),
    )
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn sampling_is_reproducible() {
    let (px, _) = bsc();
    let a = Codebook::sample(&px, 8, 3, 5, 42, 7).unwrap();
    let b = Codebook::sample(&px, 8, 3, 5, 42, 7).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.generator_id(), GENERATOR_ID);
    assert_ne!(a, Codebook::sample(&px, 8, 3, 5, 43, 7).unwrap());
    assert_ne!(a, Codebook::sample(&px, 8, 3, 5, 42, 8).unwrap());
    // Growing the codebook keeps the words already drawn.
    let big = Codebook::sample(&px, 8, 4, 9, 42, 7).unwrap();
    for w in 0..3 {
        for wp in 0..5 {
            assert_eq!(a.word(w, wp), big.word(w, wp));
        }
    }
}

#[test]
fn sample_codebook_uses_rounded_up_sizes() {
    let instance = WiretapInstance::new(
        Distribution::uniform(2),
        Channel::bsc(0.05).unwrap(),
        Channel::bsc(0.1).unwrap(),
        0.1,
        2f64.ln(),
    )
    .unwrap();
    let book = sample_codebook(&instance, 4, 1).unwrap();
    assert_eq!(book.messages(), 2);
    assert_eq!(book.m_prime(), 16);
    assert_eq!(book.n(), 4);
}

#[test]
fn symbol_frequencies_follow_the_input() {
    let px = Distribution::new(vec![0.2, 0.5, 0.3]).unwrap();
    let draws = 100_000;
    let book = Codebook::sample(&px, 1000, 1, draws / 1000, 9, 0).unwrap();
    let mut counts = [0usize; 3];
    for wp in 0..book.m_prime() {
        for &x in book.word(0, wp) {
            counts[x] += 1;
        }
    }
    for (x, &c) in counts.iter().enumerate() {
        let p = px.get(x);
        let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
        assert!(
            (c as f64 - draws as f64 * p).abs() <= 3.0 * sigma,
            "symbol {x}: {c} draws"
        );
    }
}

#[test]
fn fully_concentrated_input_is_rejected_up_front() {
    assert!(Distribution::new(vec![1.0, 0.0])
        .unwrap()
        .require_full_support("input")
        .is_err());
    assert!(JointXZ::new(
        Distribution::new(vec![1.0, 0.0]).unwrap(),
        Channel::bsc(0.1).unwrap()
    )
    .is_err());
}

#[test]
fn output_distribution_is_normalized() {
    let mut r = rng(3);
    let px = random_distribution(&mut r, 3);
    let ch = random_channel(&mut r, 3, 2);
    for seed in 0..5 {
        let book = Codebook::sample(&px, 6, 2, 4, seed, 0).unwrap();
        for w in 0..2 {
            let p = conditional_output_distribution(&book, &ch, w).unwrap();
            assert_eq!(p.len(), 64);
            assert_close(p.iter().sum(), 1.0, 1e-10, "Σ P_{Z|W}");
        }
    }
}

#[test]
fn independent_channel_leaks_nothing() {
    let (px, ch) = independent();
    let reference = product_distribution(&output_marginal(&px, &ch).unwrap(), 5).unwrap();
    let book = Codebook::sample(&px, 5, 1, 3, 11, 0).unwrap();
    let p = conditional_output_distribution(&book, &ch, 0).unwrap();
    for (a, b) in p.iter().zip(&reference) {
        assert_close(*a, *b, 1e-15, "P_{Z|W} = P_Z^n");
    }
    assert!(leakage_divergence(&book, &px, &ch, 0).unwrap() < 1e-15);
    let mean = ensemble_mean_divergence(&px, &ch, 5, 3, 50, 1).unwrap();
    assert!(mean.estimate < 1e-15 && mean.std_error < 1e-15);
    let exhaustive = exhaustive_ensemble_mean(&px, &ch, 3, 2).unwrap();
    assert!(exhaustive.divergence.estimate < 1e-15);
}

#[test]
fn single_codeword_divergence_tensorizes() {
    let (px, ch) = bsc();
    let pz = output_marginal(&px, &ch).unwrap();
    let word = vec![0, 1, 1, 0, 1];
    let book = Codebook::from_words(vec![vec![word.clone()]]).unwrap();
    let expected: f64 = word
        .iter()
        .map(|&x| kl_divergence(ch.row(x), &pz).unwrap())
        .sum();
    assert_close(
        leakage_divergence(&book, &px, &ch, 0).unwrap(),
        expected,
        1e-13,
        "Σ D(W(·|x_i)‖P_Z)",
    );
}

#[test]
fn leakage_matches_a_direct_double_loop() {
    let (px, ch) = bsc();
    let book = Codebook::sample(&px, 4, 1, 2, 2024, 0).unwrap();
    let mut direct = 0.0;
    for z in 0..16usize {
        let zs: Vec<usize> = (0..4).map(|i| (z >> (3 - i)) & 1).collect();
        let mut p = 0.0;
        for wp in 0..2 {
            let mut lik = 1.0;
            for (&x, &s) in book.word(0, wp).iter().zip(&zs) {
                lik *= ch.prob(x, s);
            }
            p += lik / 2.0;
        }
        direct += p * (p / 0.0625).ln();
    }
    let got = leakage_divergence(&book, &px, &ch, 0).unwrap();
    assert!(got.is_finite() && got >= 0.0);
    assert_close(got, direct, 1e-13, "double loop");
}

#[test]
fn exhaustive_mean_reproduces_the_output_marginal() {
    let (px, ch) = bsc();
    let e = exhaustive_ensemble_mean(&px, &ch, 4, 2).unwrap();
    assert!(e.max_output_deviation <= 1e-12);
    assert!(e.divergence.exact && e.divergence.std_error == 0.0);
    assert_eq!(e.divergence.replicates, 256);

    let mut r = rng(17);
    let px = random_distribution(&mut r, 3);
    let ch = random_channel(&mut r, 3, 2);
    let e = exhaustive_ensemble_mean(&px, &ch, 3, 2).unwrap();
    assert!(e.max_output_deviation <= 1e-12);
}

#[test]
fn single_codeword_ensemble_mean_is_n_times_mutual_information() {
    let mut r = rng(8);
    let px = random_distribution(&mut r, 2);
    let ch = random_channel(&mut r, 2, 3);
    let i = mutual_information(&px, &ch).unwrap();
    for n in 1..=5 {
        let e = exhaustive_ensemble_mean(&px, &ch, n, 1).unwrap();
        assert_close(e.divergence.estimate, n as f64 * i, 1e-12, "E[D] = nI");
    }
}

#[test]
fn exhaustive_rejects_oversized_enumeration() {
    let (px, ch) = bsc();
    assert!(exhaustive_ensemble_mean(&px, &ch, 8, 3).is_err());
}

#[test]
fn replicate_streams_are_prefix_stable_and_thread_independent() {
    let (px, ch) = bsc();
    let short = leakage_samples(&px, &ch, 5, 3, 40, 99, 0).unwrap();
    let long = leakage_samples(&px, &ch, 5, 3, 80, 99, 0).unwrap();
    assert_eq!(short[..], long[..40]);

    let one = with_threads(1, || {
        ensemble_mean_divergence(&px, &ch, 5, 3, 200, 5).unwrap()
    });
    let four = with_threads(4, || {
        ensemble_mean_divergence(&px, &ch, 5, 3, 200, 5).unwrap()
    });
    assert_eq!(one.estimate.to_bits(), four.estimate.to_bits());
    assert_eq!(one.std_error.to_bits(), four.std_error.to_bits());

    let e1 = with_threads(1, || {
        error_probability_mc(&px, &ch, 6, 2, 2, 300, 5).unwrap()
    });
    let e3 = with_threads(3, || {
        error_probability_mc(&px, &ch, 6, 2, 2, 300, 5).unwrap()
    });
    assert_eq!(e1, e3);
}

/// Two-sample Kolmogorov–Smirnov statistic.
fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn leakage_is_exchangeable_across_messages() {
    let (px, ch) = bsc();
    let n = 1000;
    let first = leakage_samples(&px, &ch, 5, 2, n, 0xABCD, 0).unwrap();
    let third = leakage_samples(&px, &ch, 5, 2, n, 0xABCD, 2).unwrap();
    let critical = 1.628 * (2.0 / n as f64).sqrt();
    let d = ks_statistic(&first, &third);
    assert!(d < critical, "KS {d} vs {critical}");
}

#[test]
fn monte_carlo_agrees_with_exhaustive_mean() {
    let (px, ch) = bsc();
    let exact = exhaustive_ensemble_mean(&px, &ch, 4, 2)
        .unwrap()
        .divergence
        .estimate;
    let mut outside = 0;
    for seed in 0..20 {
        let mc = ensemble_mean_divergence(&px, &ch, 4, 2, 2000, seed).unwrap();
        if (mc.estimate - exact).abs() > 4.0 * mc.std_error {
            outside += 1;
        }
    }
    assert_eq!(outside, 0);

    // n = 6 with M' reduced to 3 so that all 2^18 codebooks can be enumerated.
    let exact = exhaustive_ensemble_mean(&px, &ch, 6, 3)
        .unwrap()
        .divergence
        .estimate;
    let mc = ensemble_mean_divergence(&px, &ch, 6, 3, 10_000, 0xC0FFEE).unwrap();
    assert!(
        (mc.estimate - exact).abs() <= 4.0 * mc.std_error,
        "{} ± {} vs {exact}",
        mc.estimate,
        mc.std_error
    );
}

#[test]
fn empirical_exponents_by_regime() {
    let (px, ch) = independent();
    for p in empirical_exponent(&px, &ch, &[(3, 2), (4, 2)], 20, 1).unwrap() {
        assert_eq!(p.exponent, f64::INFINITY);
    }

    // R' = 0.2 is below I(X;Z) ≈ 0.368: the leakage does not decay.
    let (px, ch) = bsc();
    let points: Vec<(usize, usize)> = [4usize, 6, 8]
        .iter()
        .map(|&n| (n, codebook_size(n, 0.2, 1 << 20).unwrap()))
        .collect();
    let exps: Vec<f64> = empirical_exponent(&px, &ch, &points, 500, 3)
        .unwrap()
        .iter()
        .map(|p| p.exponent)
        .collect();
    assert!(exps.iter().all(|e| e.abs() < 0.1), "{exps:?}");
    assert!(exps[2] < exps[0], "{exps:?}");
}

#[test]
fn leakage_mutual_information_is_below_average_divergence() {
    let (px, ch) = bsc();
    let book = Codebook::sample(&px, 4, 2, 2, 77, 0).unwrap();
    let report =
        exact_leakage_mutual_information(&book, &px, &ch, &Distribution::uniform(2)).unwrap();
    assert!(report.mutual_information.is_finite() && report.average_divergence.is_finite());
    assert!(report.mutual_information <= report.average_divergence);
    assert!(report.output_divergence >= 0.0);

    // Direct I(W;Z) = Σ_w P_W(w) D(P_{Z|W=w} ‖ P_Z̄).
    let p0 = conditional_output_distribution(&book, &ch, 0).unwrap();
    let p1 = conditional_output_distribution(&book, &ch, 1).unwrap();
    let mix: Vec<f64> = p0.iter().zip(&p1).map(|(a, b)| 0.5 * (a + b)).collect();
    let direct = 0.5 * table_divergence(&p0, &mix) + 0.5 * table_divergence(&p1, &mix);
    assert_close(report.mutual_information, direct, 1e-13, "I(W;Z)");

    let single = Codebook::sample(&px, 4, 1, 2, 77, 0).unwrap();
    let r1 =
        exact_leakage_mutual_information(&single, &px, &ch, &Distribution::uniform(1)).unwrap();
    assert_eq!(r1.mutual_information, 0.0);

    let (px, ch) = independent();
    let book = Codebook::sample(&px, 4, 2, 2, 77, 0).unwrap();
    let r = exact_leakage_mutual_information(&book, &px, &ch, &Distribution::uniform(2)).unwrap();
    assert!(r.mutual_information < 1e-15);
}

#[test]
fn noiseless_decoding() {
    let ch = Channel::identity(2);
    let distinct = Codebook::from_words(vec![vec![vec![0, 0]], vec![vec![1, 1]]]).unwrap();
    assert_eq!(
        ml_error_per_message(&distinct, &ch).unwrap(),
        vec![0.0, 0.0]
    );
    // A shared word is decoded to either message with probability 1/2.
    let clash = Codebook::from_words(vec![vec![vec![0, 1]], vec![vec![0, 1]]]).unwrap();
    assert_eq!(ml_error_per_message(&clash, &ch).unwrap(), vec![0.5, 0.5]);
    // Collisions within one message's sub-codebook are harmless.
    let inner = Codebook::from_words(vec![
        vec![vec![0, 1], vec![0, 1]],
        vec![vec![1, 1], vec![1, 0]],
    ])
    .unwrap();
    assert_eq!(ml_error_per_message(&inner, &ch).unwrap(), vec![0.0, 0.0]);
}

#[test]
fn useless_channel_gives_chance_error() {
    let px = Distribution::uniform(2);
    let ch = Channel::bsc(0.5).unwrap();
    let m = 4;
    let book = Codebook::sample(&px, 3, m, 2, 1, 0).unwrap();
    let exact = ml_error_per_message(&book, &ch).unwrap();
    let avg = exact.iter().sum::<f64>() / m as f64;
    assert_close(avg, 1.0 - 1.0 / m as f64, 1e-12, "exact average error");
    let mc = error_probability_mc(&px, &ch, 3, m, 2, 4000, 2).unwrap();
    assert_close(mc.estimate, 0.75, 4.0 * mc.std_error, "Monte Carlo error");
}

#[test]
fn monte_carlo_error_matches_exact_per_codebook_average() {
    // Average of the exact per-codebook error over the same keyed codebooks.
    let px = Distribution::uniform(2);
    let ch = Channel::bsc(0.15).unwrap();
    let (n, m, mp, reps) = (5, 2, 2, 3000);
    let exact: f64 = (0..reps)
        .map(|r| {
            let book = Codebook::sample(&px, n, m, mp, 8, r as u64).unwrap();
            ml_error_per_message(&book, &ch)
                .unwrap()
                .iter()
                .sum::<f64>()
                / m as f64
        })
        .sum::<f64>()
        / reps as f64;
    let mc = error_probability_mc(&px, &ch, n, m, mp, reps, 8).unwrap();
    assert_close(mc.estimate, exact, 4.0 * mc.std_error, "MC vs exact");
}

#[test]
fn decoding_error_decays_with_blocklength() {
    let px = Distribution::uniform(2);
    let ch = Channel::bsc(0.05).unwrap();
    let estimates: Vec<f64> = [4usize, 7, 10]
        .iter()
        .map(|&n| {
            let total = codebook_size(n, 0.3, 1 << 20).unwrap();
            error_probability_mc(&px, &ch, n, total, 1, 4000, 0xC0FFEE)
                .unwrap()
                .estimate
        })
        .collect();
    assert!(estimates[2] < estimates[0], "{estimates:?}");
}

#[test]
fn expurgated_messages_meet_twice_the_average() {
    let px = Distribution::uniform(2);
    let ch = Channel::bsc(0.1).unwrap();
    let book = Codebook::sample(&px, 5, 4, 2, 6, 0).unwrap();
    let per = ml_error_per_message(&book, &ch).unwrap();
    let avg = per.iter().sum::<f64>() / per.len() as f64;
    let (kept, worst) = expurgate(&per);
    assert_eq!(kept.len(), 2);
    assert!(worst <= 2.0 * avg + 1e-15);
    assert_close(
        expurgated_union_rate(0.1, 0.2, 10),
        0.3 + 0.1 * 2f64.ln(),
        1e-15,
        "rate",
    );
}

#[test]
fn secrecy_reference_for_the_trend_run() {
    let joint = bsc_joint(0.1);
    assert_close(
        secrecy_exponent(&joint, 0.8).unwrap().value,
        0.8 - 1.64f64.ln(),
        1e-9,
        "E_s(0.8)",
    );
}

#[test]
fn uncapped_empirical_exponent_approaches_secrecy_exponent_from_above() {
    let joint = bsc_joint(0.1);
    let e_s = secrecy_exponent(&joint, 0.8).unwrap().value;
    let points: Vec<(usize, usize)> = [4usize, 6, 8]
        .iter()
        .map(|&n| (n, codebook_size(n, 0.8, usize::MAX).unwrap()))
        .collect();
    let run = empirical_exponent(joint.input(), joint.channel(), &points, 1000, 0xC0FFEE).unwrap();
    for pair in run.windows(2) {
        assert!(pair[1].exponent < pair[0].exponent, "{run:?}");
    }
    assert!(run.iter().all(|p| p.exponent > e_s), "{run:?}");
}
