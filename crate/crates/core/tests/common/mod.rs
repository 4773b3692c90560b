//! Shared numeric oracles for the integration suites.
//!
//! These deliberately avoid the library's closed forms: constrained maxima
//! are found by multi-start block-coordinate ascent, with each block
//! solved exactly by bisecting the Lagrange multiplier of its simplex
//! constraint.

use rand::Rng;

fn xlnx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

/// Entropy-style objective in nats: Σ -(g_i k_i) ln(g_i k_i).
pub fn weighted_entropy_nats(g: &[f64; 4], k: &[f64; 4]) -> f64 {
    g.iter().zip(k.iter()).map(|(&a, &b)| -xlnx(a * b)).sum()
}

/// Exactly maximizes Σ -(w_i x_i) ln(w_i x_i) over x with Σ x = total and
/// 0 ≤ x_i ≤ cap, for fixed positive weights w, by bisecting the
/// multiplier of the sum constraint.
fn solve_block(w: &[f64; 4], total: f64, cap: f64) -> [f64; 4] {
    let w: Vec<f64> = w.iter().map(|&v| v.max(1e-12)).collect();
    let x_of = |lambda: f64| -> [f64; 4] {
        let mut x = [0.0; 4];
        for i in 0..4 {
            // Stationarity: w_i (-ln(x w_i) - 1) = lambda.
            let v = (-lambda / w[i] - 1.0).exp() / w[i];
            x[i] = v.clamp(0.0, cap);
        }
        x
    };
    let sum_of = |lambda: f64| -> f64 { x_of(lambda).iter().sum() };
    let mut lo = -200.0;
    let mut hi = 200.0;
    // Sum is decreasing in lambda; widen until bracketed.
    while sum_of(lo) < total && lo > -1e6 {
        lo *= 2.0;
    }
    while sum_of(hi) > total && hi < 1e6 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if sum_of(mid) > total {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    x_of(0.5 * (lo + hi))
}

pub struct ConstrainedMax {
    pub value_nats: f64,
    pub weights: [f64; 4],
    pub masses: [f64; 4],
}

/// Multi-start block-coordinate ascent for
/// max Σ -(g_i k_i) ln(g_i k_i) s.t. Σ g = 3, g ∈ [0,1]^4, Σ k = 1,
/// k ∈ [0,1]^4.
pub fn maximize_weighted_entropy(rng: &mut impl Rng, starts: usize, rounds: usize) -> ConstrainedMax {
    let mut best = ConstrainedMax {
        value_nats: f64::MIN,
        weights: [0.0; 4],
        masses: [0.0; 4],
    };
    for _ in 0..starts {
        let mut g = [0.0; 4];
        let mut k = [0.0; 4];
        let mut sg = 0.0;
        let mut sk = 0.0;
        for i in 0..4 {
            g[i] = rng.gen::<f64>() + 0.05;
            k[i] = rng.gen::<f64>() + 0.05;
            sg += g[i];
            sk += k[i];
        }
        for i in 0..4 {
            g[i] *= 3.0 / sg;
            g[i] = g[i].min(1.0);
            k[i] /= sk;
        }
        for _ in 0..rounds {
            g = solve_block(&k, 3.0, 1.0);
            k = solve_block(&g, 1.0, 1.0);
        }
        let value = weighted_entropy_nats(&g, &k);
        if value > best.value_nats {
            best = ConstrainedMax {
                value_nats: value,
                weights: g,
                masses: k,
            };
        }
    }
    best
}

/// Maximizes Σ -p_i ln p_i over p ≥ 0 with Σ p = total (a single exact
/// block solve with unit weights).
pub fn maximize_entropy_with_mass(total: f64) -> (f64, [f64; 4]) {
    let p = solve_block(&[1.0; 4], total, total);
    let value = p.iter().map(|&v| -xlnx(v)).sum();
    (value, p)
}

/// Draws a random point of the probability simplex over four symbols.
pub fn random_distribution(rng: &mut impl Rng) -> [f64; 4] {
    let mut d = [0.0; 4];
    let mut sum = 0.0;
    for v in d.iter_mut() {
        *v = -(rng.gen::<f64>().max(f64::MIN_POSITIVE)).ln();
        sum += *v;
    }
    d.iter_mut().for_each(|v| *v /= sum);
    d
}
