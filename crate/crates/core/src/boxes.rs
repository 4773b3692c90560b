//! Correlation resources shared between the two senders.
//!
//! A box is a bipartite conditional distribution `P(a, b | x, y)` on bits.
//! The constructors cover the resources compared throughout the crate: the
//! PR-box, the Tsirelson-level quantum statistics, deterministic local
//! strategies, and convex mixtures. All of them are non-signaling; the
//! check is exposed so tests can also probe constructed violations.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Normalization/non-signaling tolerance used by the constructors.
pub const BOX_TOL: f64 = 1e-12;

/// A bipartite conditional distribution on bits, indexed `pmf[x][y][a][b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationBox {
    pmf: [[[[f64; 2]; 2]; 2]; 2],
    label: String,
}

/// A local deterministic strategy: each party's output is a function of its
/// own input alone. The 16 of these are the extreme points of the classical
/// polytope, so brute force over them bounds every classical mixture.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DeterministicStrategy {
    pub fa: [u8; 2],
    pub fb: [u8; 2],
}

impl DeterministicStrategy {
    /// All 16 deterministic strategies.
    pub fn all() -> impl Iterator<Item = DeterministicStrategy> {
        (0u8..16).map(|k| DeterministicStrategy {
            fa: [k & 1, (k >> 1) & 1],
            fb: [(k >> 2) & 1, (k >> 3) & 1],
        })
    }
}

impl CorrelationBox {
    /// Accepts any normalized nonnegative table. Non-signaling is *not*
    /// enforced here (so violations can be constructed and detected); every
    /// named constructor below produces a non-signaling box.
    pub fn new(label: impl Into<String>, pmf: [[[[f64; 2]; 2]; 2]; 2]) -> Result<Self> {
        for col in pmf.iter().flatten() {
            let mut sum = 0.0;
            for v in col.iter().flatten() {
                if *v < 0.0 {
                    return Err(Error::NegativeProbability {
                        context: "correlation box",
                        value: *v,
                    });
                }
                sum += v;
            }
            if (sum - 1.0).abs() > BOX_TOL {
                return Err(Error::NotNormalized {
                    context: "correlation box column",
                    sum,
                    tol: BOX_TOL,
                });
            }
        }
        Ok(CorrelationBox {
            pmf,
            label: label.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn prob(&self, a: u8, b: u8, x: u8, y: u8) -> f64 {
        self.pmf[x as usize][y as usize][a as usize][b as usize]
    }

    /// Samples outputs for inputs `(x, y)`. Deterministic given `rng`.
    pub fn sample(&self, x: u8, y: u8, rng: &mut impl Rng) -> (u8, u8) {
        let mut u: f64 = rng.gen();
        let mut last = (0u8, 0u8);
        for a in 0..2u8 {
            for b in 0..2u8 {
                let p = self.prob(a, b, x, y);
                if u < p {
                    return (a, b);
                }
                u -= p;
                if p > 0.0 {
                    last = (a, b);
                }
            }
        }
        last
    }

    /// Checks both marginal conditions: Alice's outcome distribution must
    /// not depend on Bob's input and vice versa.
    pub fn is_nonsignaling(&self, tol: f64) -> bool {
        for x in 0..2u8 {
            for a in 0..2u8 {
                let m0: f64 = (0..2).map(|b| self.prob(a, b as u8, x, 0)).sum();
                let m1: f64 = (0..2).map(|b| self.prob(a, b as u8, x, 1)).sum();
                if (m0 - m1).abs() > tol {
                    return false;
                }
            }
        }
        for y in 0..2u8 {
            for b in 0..2u8 {
                let m0: f64 = (0..2).map(|a| self.prob(a as u8, b, 0, y)).sum();
                let m1: f64 = (0..2).map(|a| self.prob(a as u8, b, 1, y)).sum();
                if (m0 - m1).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Convex combination of boxes. Weights must be nonnegative and sum
    /// to 1.
    pub fn mixture(parts: &[(f64, &CorrelationBox)]) -> Result<Self> {
        let total: f64 = parts.iter().map(|(w, _)| *w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > BOX_TOL {
            return Err(Error::InvalidMixture(total));
        }
        let mut pmf = [[[[0.0; 2]; 2]; 2]; 2];
        for (w, boxed) in parts {
            for x in 0..2 {
                for y in 0..2 {
                    for a in 0..2 {
                        for b in 0..2 {
                            pmf[x][y][a][b] += w * boxed.pmf[x][y][a][b];
                        }
                    }
                }
            }
        }
        CorrelationBox::new("mixture", pmf)
    }
}

impl fmt::Display for CorrelationBox {
    /// Four-column probability table, one row per input pair.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: P(a,b|x,y)", self.label)?;
        writeln!(f, "  x y   (0,0)     (0,1)     (1,0)     (1,1)")?;
        for x in 0..2u8 {
            for y in 0..2u8 {
                write!(f, "  {x} {y}")?;
                for a in 0..2u8 {
                    for b in 0..2u8 {
                        write!(f, "  {:8.6}", self.prob(a, b, x, y))?;
                    }
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// The maximally non-local non-signaling box: outputs are uniformly random
/// bits correlated so that `a xor b = x and y` always holds.
pub fn pr_box() -> CorrelationBox {
    let mut pmf = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    if a ^ b == x & y {
                        pmf[x][y][a][b] = 0.5;
                    }
                }
            }
        }
    }
    CorrelationBox::new("pr", pmf).expect("static table is normalized")
}

/// The optimal quantum statistics: the winning condition holds with
/// probability cos²(π/8) at every input pair, with uniform marginals.
pub fn tsirelson_box() -> CorrelationBox {
    let win = (std::f64::consts::FRAC_PI_8).cos().powi(2) / 2.0;
    let lose = (std::f64::consts::FRAC_PI_8).sin().powi(2) / 2.0;
    let mut pmf = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2 {
        for y in 0..2 {
            for a in 0..2 {
                for b in 0..2 {
                    pmf[x][y][a][b] = if a ^ b == x & y { win } else { lose };
                }
            }
        }
    }
    CorrelationBox::new("tsirelson", pmf).expect("static table is normalized")
}

/// Point-mass box for a local deterministic strategy.
pub fn deterministic_box(strategy: &DeterministicStrategy) -> CorrelationBox {
    let mut pmf = [[[[0.0; 2]; 2]; 2]; 2];
    for x in 0..2usize {
        for y in 0..2usize {
            pmf[x][y][strategy.fa[x] as usize][strategy.fb[y] as usize] = 1.0;
        }
    }
    CorrelationBox::new("deterministic", pmf).expect("static table is normalized")
}

/// Probability of winning the CHSH game (`a xor b = x and y`) with
/// questions drawn uniformly.
pub fn chsh_win_probability(boxed: &CorrelationBox) -> f64 {
    let mut total = 0.0;
    for x in 0..2u8 {
        for y in 0..2u8 {
            for a in 0..2u8 {
                for b in 0..2u8 {
                    if a ^ b == x & y {
                        total += boxed.prob(a, b, x, y);
                    }
                }
            }
        }
    }
    total / 4.0
}

/// CHSH value `S = |E(0,0) + E(0,1) + E(1,0) - E(1,1)|` with outcomes
/// encoded 0 → +1, 1 → −1 in the expectations.
pub fn chsh_value(boxed: &CorrelationBox) -> f64 {
    let e = |x: u8, y: u8| -> f64 {
        let mut v = 0.0;
        for a in 0..2u8 {
            for b in 0..2u8 {
                let sign = if a ^ b == 0 { 1.0 } else { -1.0 };
                v += sign * boxed.prob(a, b, x, y);
            }
        }
        v
    };
    (e(0, 0) + e(0, 1) + e(1, 0) - e(1, 1)).abs()
}

/// Maximal CHSH win probability over all 16 deterministic strategies,
/// established by direct enumeration.
pub fn best_deterministic_win() -> (f64, DeterministicStrategy) {
    let mut best = (f64::MIN, DeterministicStrategy { fa: [0; 2], fb: [0; 2] });
    for s in DeterministicStrategy::all() {
        let w = chsh_win_probability(&deterministic_box(&s));
        if w > best.0 {
            best = (w, s);
        }
    }
    best
}
