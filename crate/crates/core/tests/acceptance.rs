//! Acceptance suite: one test per verification criterion, each printing a
//! PASS line with the quantities it checked. Run with
//! `cargo test -p nlchan --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nlchan::bounds::{
    classical_bound_channel_two, five_symbol_capacity_exact, five_symbol_capacity_first_order,
    live_cell_weights, quantum_bound_channel_two, quantum_win_probability,
    rate_one_scheme_other_pair_mi, FiveSymbolInput,
};
use nlchan::boxes::{best_deterministic_win, chsh_win_probability, pr_box, tsirelson_box};
use nlchan::channels::{
    build_channel_one, build_channel_two, LogBase, ProductDistribution,
};
use nlchan::coding::{empirical_rate, run_trials, MessageSource, RateModel, Strategy};
use nlchan::optimizer::{descend, multi_restart, AmplitudeVector, OptimizerConfig};
use nlchan::povm::{
    classical_replication, outcome_probability, outcome_probability_matrix,
    random_rank_one_povm, random_shared_state,
};

#[test]
fn criterion_01_pr_strategy_perfect_on_noiseless_channel() {
    let t0 = Instant::now();
    let ch = build_channel_one();
    let strategy = Strategy::box_assisted(pr_box());
    let stats = run_trials(&ch, &strategy, MessageSource::UniformRandom, 100_000, 7).unwrap();
    assert_eq!(stats.errors, [0, 0], "PR strategy must never err");
    assert_eq!(stats.erasures, [0, 0]);
    let rate = empirical_rate(&stats, RateModel::ErasureChannel, LogBase::Bits).unwrap();
    assert_eq!(rate.sum, 2.0, "empirical sum rate must be exactly 2");
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "PASS criterion 1: PR strategy, 10^5 uses of the noiseless channel: \
         0 errors, sum rate = {} bits in {elapsed:?}",
        rate.sum
    );
}

#[test]
fn criterion_02_one_bit_communication_strategy_exact() {
    let ch = build_channel_one();
    let strategy = Strategy::one_bit_comm();
    // Exhaustive cycling of all 4 message pairs x 10^4 repeats.
    let stats =
        run_trials(&ch, &strategy, MessageSource::ExhaustiveCycle, 40_000, 3).unwrap();
    assert_eq!(stats.errors, [0, 0]);
    assert_eq!(stats.erasures, [0, 0]);
    println!(
        "PASS criterion 2: one-bit-communication strategy, 4 message pairs x 10^4 \
         cycles: 0 errors"
    );
}

#[test]
fn criterion_03_classical_optimizer_max_is_one() {
    let t0 = Instant::now();
    let ch = build_channel_one();
    let cfg = OptimizerConfig {
        restarts: 1000,
        tol: 1e-6,
        ..OptimizerConfig::default()
    };
    let res = multi_restart(&ch, &cfg, 42).unwrap();
    assert!(
        (res.best_sum_rate - 1.0).abs() <= 1e-4,
        "max rate {}",
        res.best_sum_rate
    );
    // The known rate-1 scheme is itself a maximizer: descent started there
    // stays at rate 1.
    let x1 = AmplitudeVector::from_distribution(&[0.5, 0.5, 0.0, 0.0]).unwrap();
    let x2 = AmplitudeVector::from_distribution(&[1.0, 0.0, 0.0, 0.0]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let at_scheme = descend(&ch, (x1, x2), &cfg, &mut rng).unwrap();
    assert!(
        (at_scheme.best_sum_rate - 1.0).abs() <= 1e-6,
        "scheme rate {}",
        at_scheme.best_sum_rate
    );
    let elapsed = t0.elapsed();
    assert!(elapsed.as_secs_f64() < 120.0, "took {elapsed:?}");
    println!(
        "PASS criterion 3: 1000-restart optimizer on the noiseless channel: \
         max sum rate {} bits (rate-1 scheme stays at {}), in {elapsed:?}",
        res.best_sum_rate, at_scheme.best_sum_rate
    );
}

#[test]
fn criterion_04_chsh_values() {
    let (det, _) = best_deterministic_win();
    assert_eq!(det, 0.75, "deterministic brute-force maximum");
    let quantum = chsh_win_probability(&tsirelson_box());
    let target = quantum_win_probability();
    assert!((quantum - target).abs() < 1e-12);
    assert_eq!(chsh_win_probability(&pr_box()), 1.0);
    // Sampled win rate at full question coverage.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let t = tsirelson_box();
    let n = 100_000u32;
    let mut wins = 0u32;
    for i in 0..n {
        let x = (i % 2) as u8;
        let y = ((i / 2) % 2) as u8;
        let (a, b) = t.sample(x, y, &mut rng);
        if a ^ b == x & y {
            wins += 1;
        }
    }
    let sampled = wins as f64 / n as f64;
    assert!((sampled - target).abs() < 0.01, "sampled {sampled}");
    println!(
        "PASS criterion 4: CHSH wins — deterministic {det}, quantum {quantum:.12} \
         (sampled {sampled:.4}), PR 1.0"
    );
}

#[test]
fn criterion_05_erasure_channel_rates_per_resource() {
    let n = 100_000u64;
    let cos2 = quantum_win_probability();
    for (k, &eps) in [0.05, 0.1, 0.2].iter().enumerate() {
        let ch = build_channel_two(eps).unwrap();

        // PR strategy: sum rate 2*eps within 3 standard errors. Both
        // receivers erase together, so Var(sum) = 4 * alpha(1-alpha)/n.
        let stats = run_trials(
            &ch,
            &Strategy::box_assisted(pr_box()),
            MessageSource::UniformRandom,
            n,
            101 + k as u64,
        )
        .unwrap();
        assert_eq!(stats.errors, [0, 0]);
        let rate = empirical_rate(&stats, RateModel::ErasureChannel, LogBase::Bits).unwrap();
        let alpha_pr = 1.0 - eps;
        let se_sum = 2.0 * (alpha_pr * (1.0 - alpha_pr) / n as f64).sqrt();
        assert!(
            (rate.sum - 2.0 * eps).abs() <= 3.0 * se_sum,
            "eps={eps}: PR sum {} vs {}",
            rate.sum,
            2.0 * eps
        );

        // Quantum strategy: sum rate 2 cos^2(pi/8) eps and per-pair erasure
        // probability sin^2(pi/8) + (1-eps) cos^2(pi/8), within 3 SE.
        let qstats = run_trials(
            &ch,
            &Strategy::box_assisted(tsirelson_box()),
            MessageSource::UniformRandom,
            n,
            211 + k as u64,
        )
        .unwrap();
        assert_eq!(qstats.errors, [0, 0]);
        let alpha_q = (1.0 - cos2) + (1.0 - eps) * cos2;
        let se_frac = (alpha_q * (1.0 - alpha_q) / n as f64).sqrt();
        for pair in 0..2 {
            let frac = qstats.erasure_fraction(pair);
            assert!(
                (frac - alpha_q).abs() <= 3.0 * se_frac,
                "eps={eps} pair {pair}: erasure {frac} vs {alpha_q}"
            );
        }
        let qrate = empirical_rate(&qstats, RateModel::ErasureChannel, LogBase::Bits).unwrap();
        let qtarget = 2.0 * cos2 * eps;
        let qse_sum = 2.0 * se_frac;
        assert!(
            (qrate.sum - qtarget).abs() <= 3.0 * qse_sum,
            "eps={eps}: quantum sum {} vs {qtarget}",
            qrate.sum
        );
        println!(
            "PASS criterion 5 (eps={eps}): PR sum {:.4} ~ {:.4}, quantum sum {:.4} ~ \
             {qtarget:.4}, quantum erasures ~ {alpha_q:.4}",
            rate.sum,
            2.0 * eps,
            qrate.sum
        );
    }
}

#[test]
fn criterion_06_first_order_formula_is_second_order_accurate() {
    let probs = [3.0 / 16.0; 4];
    let mut diffs = Vec::new();
    for eps in [1e-2, 1e-3, 1e-4] {
        let inp = FiveSymbolInput::new(probs, 0.25, eps).unwrap();
        let exact = five_symbol_capacity_exact(&inp, LogBase::Nats);
        let first = five_symbol_capacity_first_order(&inp, LogBase::Nats);
        let diff = (exact - first).abs();
        let ratio = diff / (eps * eps);
        assert!(ratio < 0.2, "eps={eps}: |exact-first|/eps^2 = {ratio}");
        diffs.push((eps, diff));
    }
    for w in diffs.windows(2) {
        let slope = ((w[0].1 / w[1].1).ln()) / ((w[0].0 / w[1].0).ln());
        assert!(
            (slope - 2.0).abs() <= 0.1,
            "log-log slope {slope} between eps={} and eps={}",
            w[0].0,
            w[1].0
        );
    }
    println!(
        "PASS criterion 6: |exact - first-order| scales as eps^2 \
         (ratios {:?})",
        diffs
            .iter()
            .map(|(e, d)| (*e, d / (e * e)))
            .collect::<Vec<_>>()
    );
}

#[test]
fn criterion_07_classical_bound_optimum_recovered() {
    // Independent multi-start block-coordinate ascent over the weight
    // decomposition (masses on the simplex, weights capped at 1 summing
    // to 3).
    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let found = common::maximize_weighted_entropy(&mut rng, 20, 400);
    for v in found.masses {
        assert!((v - 0.25).abs() < 1e-4, "mass {v}");
    }
    for v in found.weights {
        assert!((v - 0.75).abs() < 1e-4, "weight {v}");
    }
    let closed = classical_bound_channel_two(1.0, LogBase::Nats).unwrap();
    assert!(
        (found.value_nats - closed).abs() < 1e-6,
        "oracle {} vs closed form {closed}",
        found.value_nats
    );
    assert!((closed - 1.2555).abs() < 1e-4);

    // The weight-sum bound holds across random product distributions.
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let dist = ProductDistribution::new(
            common::random_distribution(&mut rng),
            common::random_distribution(&mut rng),
        )
        .unwrap();
        let w = live_cell_weights(&dist).expect("bound must hold");
        worst = worst.max(w.weight_sum());
    }
    assert!(worst <= 3.0 + 1e-9, "worst weight sum {worst}");
    println!(
        "PASS criterion 7: constrained maximum at masses 1/4, weights 3/4, value \
         {:.6} nats = closed form; weight sum <= 3 on 10^4 random products \
         (worst {worst:.6})",
        found.value_nats
    );
}

#[test]
fn criterion_08_quantum_bound_below_super_quantum() {
    let bits = quantum_bound_channel_two(1.0, LogBase::Bits).unwrap();
    assert!((bits - 1.9020982338410801).abs() < 1e-9);
    for k in 1..=100 {
        let eps = k as f64 / 100.0;
        let q = quantum_bound_channel_two(eps, LogBase::Bits).unwrap();
        assert!(q < 2.0 * eps, "eps={eps}: {q}");
    }
    // Independent constrained maximization of the entropy expression with
    // the CHSH-limited total mass.
    let (oracle_nats, argmax) = common::maximize_entropy_with_mass(quantum_win_probability());
    let closed_nats = quantum_bound_channel_two(1.0, LogBase::Nats).unwrap();
    assert!(
        (oracle_nats - closed_nats).abs() < 1e-6,
        "oracle {oracle_nats} vs {closed_nats}"
    );
    for p in argmax {
        assert!((p - quantum_win_probability() / 4.0).abs() < 1e-6);
    }
    println!(
        "PASS criterion 8: quantum bound {bits:.6} bits < 2 at eps=1 and < 2*eps \
         on a 100-point grid; numeric maximum matches the closed form"
    );
}

#[test]
fn criterion_09_measurement_probability_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(90);
    // Closed form vs bilinear matrix form on random weighted elements.
    for _ in 0..10_000 {
        let state = random_shared_state(&mut rng);
        let rand_elem = |rng: &mut ChaCha8Rng| {
            let povm = random_rank_one_povm(rng, 2);
            povm.elements()[0]
        };
        let e1 = rand_elem(&mut rng);
        let e2 = rand_elem(&mut rng);
        let a = outcome_probability(&state, &e1, &e2);
        let b = outcome_probability_matrix(&state, &e1, &e2);
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
    // Replication returns strictly positive pairs; probabilities over all
    // element pairs sum to 1.
    let mut checked = 0;
    while checked < 10_000 {
        let state = random_shared_state(&mut rng);
        let povms_1 = [
            random_rank_one_povm(&mut rng, 2),
            random_rank_one_povm(&mut rng, 2),
        ];
        let povms_2 = [
            random_rank_one_povm(&mut rng, 2),
            random_rank_one_povm(&mut rng, 2),
        ];
        for m1 in 0..2u8 {
            for m2 in 0..2u8 {
                let (i, j) = classical_replication(m1, m2, &povms_1, &povms_2, &state);
                let p = outcome_probability(
                    &state,
                    &povms_1[m1 as usize].elements()[i],
                    &povms_2[m2 as usize].elements()[j],
                );
                assert!(p > 1e-12, "replication pair probability {p}");
                let total: f64 = povms_1[m1 as usize]
                    .elements()
                    .iter()
                    .flat_map(|e1| {
                        povms_2[m2 as usize]
                            .elements()
                            .iter()
                            .map(move |e2| outcome_probability(&state, e1, e2))
                    })
                    .sum();
                assert!((total - 1.0).abs() < 1e-9, "pair total {total}");
                checked += 1;
            }
        }
    }
    println!(
        "PASS criterion 9: formula = matrix form (1e-10) on 10^4 random elements; \
         replication positive and pair probabilities sum to 1 on 10^4 instances"
    );
}

#[test]
fn criterion_10_perfect_pair_locks_the_other_to_zero() {
    for k in 0..100 {
        let c = k as f64 / 99.0;
        let mi = rate_one_scheme_other_pair_mi(c).unwrap();
        assert!(mi.abs() < 1e-12, "c={c}: {mi}");
    }
    println!(
        "PASS criterion 10: second pair's mutual information is 0 (1e-12) across \
         100 values of the rate-1 scheme parameter"
    );
}
