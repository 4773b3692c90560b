//! Cross-module consistency: the restart search's empirical classical
//! maximum must respect the closed-form bounds, and its induced output
//! distribution must satisfy the five-symbol first-order cap.

use nlchan::bounds::{
    classical_bound_channel_two, five_symbol_capacity_first_order, live_cell_weights,
    FiveSymbolInput,
};
use nlchan::channels::{build_channel_two, LogBase, ProductDistribution};
use nlchan::optimizer::{multi_restart, OptimizerConfig};

#[test]
fn optimizer_rate_respects_first_order_bound() {
    let eps = 0.1;
    let ch = build_channel_two(eps).unwrap();
    let cfg = OptimizerConfig {
        restarts: 200,
        ..OptimizerConfig::default()
    };
    let res = multi_restart(&ch, &cfg, 21).unwrap();

    let normalize = |mut d: [f64; 4]| {
        let s: f64 = d.iter().sum();
        d.iter_mut().for_each(|v| *v /= s);
        d
    };
    let dist = ProductDistribution::new(
        normalize(res.best_vectors.0.squared()),
        normalize(res.best_vectors.1.squared()),
    )
    .unwrap();

    // Surviving-output probabilities induced by the best distribution,
    // stripped of the epsilon factor.
    let weights = live_cell_weights(&dist).unwrap();
    let survivable = weights.output_probs(1.0);
    let total: f64 = survivable.iter().sum();
    let inp = FiveSymbolInput::new(survivable, 1.0 - total, eps).unwrap();
    let cap_bits = five_symbol_capacity_first_order(&inp, LogBase::Bits);

    assert!(
        res.best_sum_rate <= cap_bits + 5.0 * eps * eps,
        "rate {} vs first-order cap {cap_bits}",
        res.best_sum_rate
    );
    assert!(
        res.best_sum_rate
            <= classical_bound_channel_two(eps, LogBase::Bits).unwrap() + 1e-3,
        "rate {} beats the closed-form bound",
        res.best_sum_rate
    );
}
