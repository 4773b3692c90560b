//! Closed-form capacity bounds for the erasure channel family.
//!
//! Covers the five-symbol reduction (exact and first-order in ε), the
//! binary erasure channel, the classical upper bound for the erasure
//! channel's product-distribution strategies, and the CHSH-constrained
//! quantum upper bound. The weight decomposition that drives the classical
//! bound is exposed so its sum constraint can be property-tested.

use serde::{Deserialize, Serialize};

use crate::channels::{build_channel_one, LogBase, ProductDistribution};
use crate::error::{Error, Result};

/// CHSH win probability achievable with shared entanglement.
pub fn quantum_win_probability() -> f64 {
    (std::f64::consts::FRAC_PI_8).cos().powi(2)
}

/// Input to the five-symbol erasure channel: four symbols transmitted
/// intact with probability ε (erased otherwise) and one symbol that is
/// always erased.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveSymbolInput {
    /// Probabilities of the four survivable symbols.
    pub probs: [f64; 4],
    /// Probability of the always-erased symbol.
    pub p_always_erased: f64,
    pub epsilon: f64,
}

impl FiveSymbolInput {
    pub fn new(probs: [f64; 4], p_always_erased: f64, epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        let mut sum = p_always_erased;
        for &p in probs.iter().chain([p_always_erased].iter()) {
            if p < 0.0 {
                return Err(Error::NegativeProbability {
                    context: "five-symbol input",
                    value: p,
                });
            }
        }
        sum += probs.iter().sum::<f64>();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::NotNormalized {
                context: "five-symbol input",
                sum,
                tol: 1e-12,
            });
        }
        Ok(FiveSymbolInput {
            probs,
            p_always_erased,
            epsilon,
        })
    }
}

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn binary_entropy_nats(p: f64) -> f64 {
    -xlnx(p) - xlnx(1.0 - p)
}

/// First-order (in ε) capacity of the five-symbol channel:
/// `-ε Σ p_i log p_i` over the four survivable symbols.
pub fn five_symbol_capacity_first_order(inp: &FiveSymbolInput, log_base: LogBase) -> f64 {
    let nats = -inp.epsilon * inp.probs.iter().map(|&p| xlnx(p)).sum::<f64>();
    log_base.from_nats(nats)
}

/// Exact mutual information of the five-symbol channel at fixed input
/// probabilities, via `H(Y) - H(Y|X)`.
pub fn five_symbol_capacity_exact(inp: &FiveSymbolInput, log_base: LogBase) -> f64 {
    let eps = inp.epsilon;
    let p_out_erased = 1.0 - eps + eps * inp.p_always_erased;
    let mut h_y = -xlnx(p_out_erased);
    for &p in &inp.probs {
        h_y -= xlnx(eps * p);
    }
    let survivable: f64 = inp.probs.iter().sum();
    let h_y_given_x = survivable * binary_entropy_nats(eps);
    log_base.from_nats((h_y - h_y_given_x).max(0.0))
}

/// Capacity of a binary erasure channel with the given erasure
/// probability: `1 - α` bits.
pub fn bec_capacity(erasure_prob: f64, log_base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&erasure_prob) || erasure_prob.is_nan() {
        return Err(Error::InvalidEpsilon(erasure_prob));
    }
    Ok(log_base.from_bits(1.0 - erasure_prob))
}

/// First-order upper bound on the classical sum rate of the erasure
/// channel: the weight decomposition's optimum sits at `k_ij = 1/4`,
/// weights `3/4`, giving `ε · (3/4) · log(16/3)`.
pub fn classical_bound_channel_two(epsilon: f64, log_base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let nats = epsilon * 0.75 * (16.0f64 / 3.0).ln();
    Ok(log_base.from_nats(nats))
}

/// First-order upper bound on the entanglement-assisted sum rate: maximize
/// `-ε Σ p_i log p_i` subject to `Σ p_i = cos²(π/8)`; the symmetric point
/// gives `ε · cos²(π/8) · log(4 / cos²(π/8))`, strictly below `2ε`.
pub fn quantum_bound_channel_two(epsilon: f64, log_base: LogBase) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let c = quantum_win_probability();
    let nats = epsilon * c * (4.0 / c).ln();
    Ok(log_base.from_nats(nats))
}

/// Decomposition of the erasure channel's non-erased output probabilities
/// under a product input distribution.
///
/// With `p` (`q`) the probability that sender 1 (2) leads with bit 0, each
/// non-erased output `ij` occurs with probability `ε · k_ij · w_ij`, where
/// `k_ij` is the product of the leading-bit probabilities and `w_ij` is
/// the fraction of that mass landing on surviving cells. The four weights
/// always satisfy `alpha + beta + gamma + delta <= 3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiveCellWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub k00: f64,
    pub k01: f64,
    pub k10: f64,
    pub k11: f64,
}

impl LiveCellWeights {
    pub fn weight_sum(&self) -> f64 {
        self.alpha + self.beta + self.gamma + self.delta
    }

    /// The non-erased output probabilities `ε k_ij w_ij` at a given ε.
    pub fn output_probs(&self, epsilon: f64) -> [f64; 4] {
        [
            epsilon * self.k00 * self.alpha,
            epsilon * self.k01 * self.beta,
            epsilon * self.k10 * self.gamma,
            epsilon * self.k11 * self.delta,
        ]
    }
}

/// Computes the weight decomposition for a product distribution on the
/// erasure channel and checks its sum bound. Degenerate leading-bit
/// probabilities (p or q in {0,1}) zero out the weights whose mass
/// vanishes.
pub fn live_cell_weights(dist: &ProductDistribution) -> Result<LiveCellWeights> {
    let d1 = dist.d1();
    let d2 = dist.d2();
    let p = d1[0] + d1[1];
    let q = d2[0] + d2[1];
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let w = LiveCellWeights {
        alpha: ratio(d1[0] * d2[0] + d1[1] * d2[1], p * q),
        beta: ratio(d1[0] * d2[2] + d1[1] * d2[3], p * (1.0 - q)),
        gamma: ratio(d1[2] * d2[0] + d1[3] * d2[1], (1.0 - p) * q),
        delta: ratio(d1[2] * d2[3] + d1[3] * d2[2], (1.0 - p) * (1.0 - q)),
        k00: p * q,
        k01: p * (1.0 - q),
        k10: (1.0 - p) * q,
        k11: (1.0 - p) * (1.0 - q),
    };
    let sum = w.weight_sum();
    if sum > 3.0 + 1e-9 {
        return Err(Error::WeightBoundViolated { sum });
    }
    Ok(w)
}

/// Second pair's mutual information (bits) under the noiseless channel's
/// rate-1 scheme family: sender 1 uniform on {00, 01}, sender 2 on
/// {00, 10} with probability `c` on 00. Zero for every `c`: once the
/// first pair communicates perfectly, the second receiver sees pure noise.
pub fn rate_one_scheme_other_pair_mi(c: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&c) || c.is_nan() {
        return Err(Error::InvalidEpsilon(c));
    }
    let ch = build_channel_one();
    let dist = ProductDistribution::new([0.5, 0.5, 0.0, 0.0], [c, 0.0, 1.0 - c, 0.0])?;
    Ok(ch.joint_rate(&dist, LogBase::Bits).r2)
}
