//! Sum-rate maximization over product input distributions by gradient
//! descent constrained to two 4-D unit spheres.
//!
//! Each sender's distribution is parametrized by a unit amplitude vector
//! whose squared entries are the input probabilities. Descent steps move
//! both iterates along paired great circles: the tangent-projected
//! gradients set the direction and the per-sphere step weights, and a
//! single shared angle is chosen by a bounded 1-D line search. Restarts
//! draw independent uniform starts on the spheres from per-index RNG
//! substreams, so results are reproducible under any execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::channels::{mi_pair_nats, ChannelSpec, LogBase};
use crate::error::{Error, Result};

/// Unit-norm tolerance for amplitude vectors.
pub const UNIT_TOL: f64 = 1e-10;

/// Probabilities are clamped here before logarithms in gradient formulas.
const LOG_CLAMP: f64 = 1e-15;

/// Projected-gradient norm below which an iterate counts as stationary.
const GRAD_FLOOR: f64 = 1e-12;

/// Tangent step size used to escape a stationary point once per run.
const ESCAPE_STEP: f64 = 1e-3;

/// A 4-D unit vector; its squared entries are one sender's input
/// distribution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeVector([f64; 4]);

impl AmplitudeVector {
    pub fn new(entries: [f64; 4]) -> Result<Self> {
        let norm = dot(&entries, &entries).sqrt();
        if (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NotUnit {
                norm,
                tol: UNIT_TOL,
            });
        }
        Ok(AmplitudeVector(entries))
    }

    /// Amplitude vector whose squared entries reproduce `dist` (which must
    /// be normalized within the unit tolerance).
    pub fn from_distribution(dist: &[f64; 4]) -> Result<Self> {
        AmplitudeVector::new([
            dist[0].max(0.0).sqrt(),
            dist[1].max(0.0).sqrt(),
            dist[2].max(0.0).sqrt(),
            dist[3].max(0.0).sqrt(),
        ])
    }

    /// Uniform random point on the sphere.
    pub fn random(rng: &mut impl Rng) -> Self {
        loop {
            let v = [
                standard_normal(rng),
                standard_normal(rng),
                standard_normal(rng),
                standard_normal(rng),
            ];
            let norm = dot(&v, &v).sqrt();
            if norm > 1e-6 {
                return AmplitudeVector([v[0] / norm, v[1] / norm, v[2] / norm, v[3] / norm]);
            }
        }
    }

    pub fn entries(&self) -> &[f64; 4] {
        &self.0
    }

    /// The input distribution this point encodes.
    pub fn squared(&self) -> [f64; 4] {
        [
            self.0[0] * self.0[0],
            self.0[1] * self.0[1],
            self.0[2] * self.0[2],
            self.0[3] * self.0[3],
        ]
    }
}

fn standard_normal(rng: &mut impl Rng) -> f64 {
    // Box-Muller; one value per call keeps the stream layout simple.
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

fn normalize(v: &mut [f64; 4]) {
    let norm = dot(v, v).sqrt();
    for e in v.iter_mut() {
        *e /= norm;
    }
}

/// How the shared line-search angle is split across the two spheres.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepWeight {
    /// Squared-tangent-norm weights `|h_i|^2 / (|h_1|^2 + |h_2|^2)`.
    GradientNorm,
    /// Both spheres advance at the same angular rate.
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    /// Stop once the joint iterate displacement drops below this.
    pub tol: f64,
    pub maxiter: usize,
    pub restarts: usize,
    /// Coarse line-search grid points over the angle interval.
    pub line_search_grid: usize,
    /// Golden-section refinement iterations around the best grid point.
    pub refine_iters: usize,
    pub step_weight: StepWeight,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            tol: 1e-6,
            maxiter: 500,
            restarts: 1000,
            line_search_grid: 64,
            refine_iters: 40,
            step_weight: StepWeight::GradientNorm,
        }
    }
}

impl OptimizerConfig {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig("tol must be positive"));
        }
        if self.maxiter == 0 {
            return Err(Error::InvalidConfig("maxiter must be at least 1"));
        }
        if self.line_search_grid < 2 {
            return Err(Error::InvalidConfig("line_search_grid must be at least 2"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_vectors: (AmplitudeVector, AmplitudeVector),
    /// Maximum joint rate found, in bits.
    pub best_sum_rate: f64,
    /// Total descent iterations performed.
    pub iterations: usize,
    pub converged: bool,
}

/// Negative joint rate (bits) of the squared-entry distributions.
pub fn objective(x1: &AmplitudeVector, x2: &AmplitudeVector, spec: &ChannelSpec) -> f64 {
    objective_raw(x1.entries(), x2.entries(), spec)
}

fn objective_raw(x1: &[f64; 4], x2: &[f64; 4], spec: &ChannelSpec) -> f64 {
    let d1 = [x1[0] * x1[0], x1[1] * x1[1], x1[2] * x1[2], x1[3] * x1[3]];
    let d2 = [x2[0] * x2[0], x2[1] * x2[1], x2[2] * x2[2], x2[3] * x2[3]];
    let (i1, i2) = mi_pair_nats(spec, &d1, &d2);
    -LogBase::Bits.from_nats(i1 + i2)
}

/// Analytic gradient of [`objective`] with respect to the amplitude
/// entries (chain rule through `p_i = x_i^2`).
pub fn gradient(
    x1: &AmplitudeVector,
    x2: &AmplitudeVector,
    spec: &ChannelSpec,
) -> ([f64; 4], [f64; 4]) {
    gradient_raw(x1.entries(), x2.entries(), spec)
}

fn gradient_raw(x1: &[f64; 4], x2: &[f64; 4], spec: &ChannelSpec) -> ([f64; 4], [f64; 4]) {
    let d1 = [x1[0] * x1[0], x1[1] * x1[1], x1[2] * x1[2], x1[3] * x1[3]];
    let d2 = [x2[0] * x2[0], x2[1] * x2[1], x2[2] * x2[2], x2[3] * x2[3]];
    let (out1, out2) = spec.output_sizes();
    let all = crate::channels::InputSymbol::ALL;

    // Conditional rows for both pairs and both marginal output weights.
    let mut w1 = [[0.0f64; 3]; 4]; // W1(y | x1)
    let mut w2 = [[0.0f64; 3]; 4]; // W2(y | x2)
    let mut q1 = [0.0f64; 3];
    let mut q2 = [0.0f64; 3];
    for a in all {
        for b in all {
            for y in 0..out1 {
                w1[a.index()][y] +=
                    d2[b.index()] * spec.receiver_prob(crate::channels::Pair::First, a, b, y);
            }
            for y in 0..out2 {
                w2[b.index()][y] +=
                    d1[a.index()] * spec.receiver_prob(crate::channels::Pair::Second, a, b, y);
            }
        }
    }
    for a in all {
        for y in 0..out1 {
            q1[y] += d1[a.index()] * w1[a.index()][y];
        }
        for y in 0..out2 {
            q2[y] += d2[a.index()] * w2[a.index()][y];
        }
    }

    let ln = |v: f64| v.max(LOG_CLAMP).ln();
    let mut dp1 = [0.0f64; 4]; // d(I1+I2)/d d1(x), nats
    let mut dp2 = [0.0f64; 4];
    for a in all {
        // Own-pair term: sum_y W1 ln(W1/q1) - sum_y W1.
        let mut own = 0.0;
        for y in 0..out1 {
            let w = w1[a.index()][y];
            if w > 0.0 {
                own += w * (ln(w) - ln(q1[y]));
            }
            own -= w;
        }
        // Cross term through the other pair's weights.
        let mut cross = 0.0;
        for b in all {
            let rb = d2[b.index()];
            if rb == 0.0 {
                continue;
            }
            for y in 0..out2 {
                let p = spec.receiver_prob(crate::channels::Pair::Second, a, b, y);
                if p > 0.0 {
                    cross += rb * p * (ln(w2[b.index()][y]) - ln(q2[y]));
                }
            }
        }
        dp1[a.index()] = own + cross;
    }
    for b in all {
        let mut own = 0.0;
        for y in 0..out2 {
            let w = w2[b.index()][y];
            if w > 0.0 {
                own += w * (ln(w) - ln(q2[y]));
            }
            own -= w;
        }
        let mut cross = 0.0;
        for a in all {
            let ra = d1[a.index()];
            if ra == 0.0 {
                continue;
            }
            for y in 0..out1 {
                let p = spec.receiver_prob(crate::channels::Pair::First, a, b, y);
                if p > 0.0 {
                    cross += ra * p * (ln(w1[a.index()][y]) - ln(q1[y]));
                }
            }
        }
        dp2[b.index()] = own + cross;
    }

    // f = -(I1+I2)/ln 2 and dp/dx = 2x.
    let scale = -2.0 / std::f64::consts::LN_2;
    let mut g1 = [0.0; 4];
    let mut g2 = [0.0; 4];
    for i in 0..4 {
        g1[i] = scale * dp1[i] * x1[i];
        g2[i] = scale * dp2[i] * x2[i];
    }
    (g1, g2)
}

/// Removes the radial component: `g - (g·x) x`.
pub fn tangent_project(g: &[f64; 4], x: &AmplitudeVector) -> [f64; 4] {
    tangent_raw(g, x.entries())
}

fn tangent_raw(g: &[f64; 4], x: &[f64; 4]) -> [f64; 4] {
    let gx = dot(g, x);
    [
        g[0] - gx * x[0],
        g[1] - gx * x[1],
        g[2] - gx * x[2],
        g[3] - gx * x[3],
    ]
}

struct Curve<'a> {
    x1: [f64; 4],
    x2: [f64; 4],
    n1: [f64; 4],
    n2: [f64; 4],
    alpha1: f64,
    alpha2: f64,
    spec: &'a ChannelSpec,
}

impl Curve<'_> {
    fn point(&self, phi: f64) -> ([f64; 4], [f64; 4]) {
        let mut p1 = self.x1;
        let mut p2 = self.x2;
        if self.alpha1 > 0.0 {
            let (s, c) = (self.alpha1 * phi).sin_cos();
            for i in 0..4 {
                p1[i] = c * self.x1[i] + s * self.n1[i];
            }
        }
        if self.alpha2 > 0.0 {
            let (s, c) = (self.alpha2 * phi).sin_cos();
            for i in 0..4 {
                p2[i] = c * self.x2[i] + s * self.n2[i];
            }
        }
        (p1, p2)
    }

    fn eval(&self, phi: f64) -> f64 {
        let (p1, p2) = self.point(phi);
        objective_raw(&p1, &p2, self.spec)
    }
}

/// Coarse grid over the angle interval, then golden-section refinement
/// around the best grid point. The interval is symmetric about zero: the
/// tangent directions point uphill for the objective, so the minimizing
/// angle usually lies on the negative side, and the full pair of great
/// circles is covered either way.
fn line_search(curve: &Curve<'_>, cfg: &OptimizerConfig) -> (f64, f64) {
    let lo = -std::f64::consts::PI;
    let hi = std::f64::consts::PI;
    let grid = cfg.line_search_grid;
    let step = (hi - lo) / (grid - 1) as f64;
    let mut best_phi = 0.0;
    let mut best_f = curve.eval(0.0);
    for k in 0..grid {
        let phi = lo + step * k as f64;
        let f = curve.eval(phi);
        if f < best_f {
            best_f = f;
            best_phi = phi;
        }
    }
    // Golden-section on the bracket around the winner.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = best_phi - step;
    let mut b = best_phi + step;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = curve.eval(c);
    let mut fd = curve.eval(d);
    for _ in 0..cfg.refine_iters {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = curve.eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = curve.eval(d);
        }
    }
    let mid = 0.5 * (a + b);
    let fmid = curve.eval(mid);
    if fmid < best_f {
        (mid, fmid)
    } else {
        (best_phi, best_f)
    }
}

/// Runs the constrained descent from one starting pair.
///
/// The iterates stay unit within [`UNIT_TOL`] at every step. A run whose
/// projected gradient vanishes (or whose line search makes no progress) is
/// perturbed once by a random tangent step before convergence is declared,
/// so symmetric saddles do not end runs prematurely.
pub fn descend(
    spec: &ChannelSpec,
    start: (AmplitudeVector, AmplitudeVector),
    cfg: &OptimizerConfig,
    rng: &mut impl Rng,
) -> Result<OptResult> {
    cfg.validate()?;
    let mut x1 = *start.0.entries();
    let mut x2 = *start.1.entries();
    let mut f_cur = objective_raw(&x1, &x2, spec);
    let mut best = (f_cur, x1, x2);
    let mut perturbed = false;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < cfg.maxiter {
        iterations += 1;
        let (g1, g2) = gradient_raw(&x1, &x2, spec);
        let h1 = tangent_raw(&g1, &x1);
        let h2 = tangent_raw(&g2, &x2);
        let n1sq = dot(&h1, &h1);
        let n2sq = dot(&h2, &h2);
        let total = n1sq + n2sq;

        if total.sqrt() < GRAD_FLOOR {
            if perturbed {
                converged = true;
                break;
            }
            perturbed = true;
            escape(&mut x1, &mut x2, rng);
            f_cur = objective_raw(&x1, &x2, spec);
            if f_cur < best.0 {
                best = (f_cur, x1, x2);
            }
            continue;
        }

        let (alpha1, alpha2) = match cfg.step_weight {
            StepWeight::GradientNorm => (n1sq / total, n2sq / total),
            StepWeight::Equal => {
                let w1 = if n1sq > 0.0 { 1.0 } else { 0.0 };
                let w2 = if n2sq > 0.0 { 1.0 } else { 0.0 };
                let s = w1 + w2;
                (w1 / s, w2 / s)
            }
        };
        let unit = |h: [f64; 4], hsq: f64| -> [f64; 4] {
            if hsq > 0.0 {
                let inv = hsq.sqrt().recip();
                [h[0] * inv, h[1] * inv, h[2] * inv, h[3] * inv]
            } else {
                [0.0; 4]
            }
        };
        let curve = Curve {
            x1,
            x2,
            n1: unit(h1, n1sq),
            n2: unit(h2, n2sq),
            alpha1,
            alpha2,
            spec,
        };
        let (phi, f_new) = line_search(&curve, cfg);

        if f_new >= f_cur {
            // No descent along the whole pair of circles.
            if perturbed {
                converged = true;
                break;
            }
            perturbed = true;
            escape(&mut x1, &mut x2, rng);
            f_cur = objective_raw(&x1, &x2, spec);
            if f_cur < best.0 {
                best = (f_cur, x1, x2);
            }
            continue;
        }

        let (mut p1, mut p2) = curve.point(phi);
        normalize(&mut p1);
        normalize(&mut p2);
        let mut dxsq = 0.0;
        for i in 0..4 {
            dxsq += (p1[i] - x1[i]).powi(2) + (p2[i] - x2[i]).powi(2);
        }
        x1 = p1;
        x2 = p2;
        f_cur = objective_raw(&x1, &x2, spec);
        if f_cur < best.0 {
            best = (f_cur, x1, x2);
        }

        if dxsq.sqrt() < cfg.tol {
            if perturbed {
                converged = true;
                break;
            }
            perturbed = true;
            escape(&mut x1, &mut x2, rng);
            f_cur = objective_raw(&x1, &x2, spec);
            if f_cur < best.0 {
                best = (f_cur, x1, x2);
            }
        }
    }

    let v1 = AmplitudeVector::new(best.1).expect("iterates stay unit");
    let v2 = AmplitudeVector::new(best.2).expect("iterates stay unit");
    Ok(OptResult {
        best_vectors: (v1, v2),
        best_sum_rate: -best.0,
        iterations,
        converged,
    })
}

/// Random unit-tangent step of size [`ESCAPE_STEP`] on both spheres.
fn escape(x1: &mut [f64; 4], x2: &mut [f64; 4], rng: &mut impl Rng) {
    for x in [x1, x2] {
        let raw = [
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
            standard_normal(rng),
        ];
        let mut t = tangent_raw(&raw, x);
        let norm = dot(&t, &t).sqrt();
        if norm < 1e-12 {
            continue;
        }
        for e in t.iter_mut() {
            *e /= norm;
        }
        let (s, c) = ESCAPE_STEP.sin_cos();
        for i in 0..4 {
            x[i] = c * x[i] + s * t[i];
        }
        normalize(x);
    }
}

/// Best descent result over uniformly-random starts on the two spheres.
///
/// Restart `i` draws its start and any escape perturbations from RNG
/// stream `i` of `seed`, so the outcome is bit-identical for the
/// sequential and parallel drivers and for repeated runs.
pub fn multi_restart(spec: &ChannelSpec, cfg: &OptimizerConfig, seed: u64) -> Result<OptResult> {
    Ok(multi_restart_with_rates(spec, cfg, seed)?.0)
}

/// Like [`multi_restart`], also returning every restart's best rate in
/// restart order.
pub fn multi_restart_with_rates(
    spec: &ChannelSpec,
    cfg: &OptimizerConfig,
    seed: u64,
) -> Result<(OptResult, Vec<f64>)> {
    cfg.validate()?;
    if cfg.restarts == 0 {
        return Err(Error::InvalidConfig("restarts must be at least 1"));
    }
    let one = |i: usize| -> Result<OptResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let start = (
            AmplitudeVector::random(&mut rng),
            AmplitudeVector::random(&mut rng),
        );
        descend(spec, start, cfg, &mut rng)
    };

    #[cfg(feature = "parallel")]
    let runs: Vec<OptResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(one)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<OptResult> = (0..cfg.restarts).map(one).collect::<Result<_>>()?;

    let rates: Vec<f64> = runs.iter().map(|r| r.best_sum_rate).collect();
    let mut best_idx = 0;
    for (i, r) in runs.iter().enumerate() {
        if r.best_sum_rate > runs[best_idx].best_sum_rate {
            best_idx = i;
        }
    }
    let total_iters: usize = runs.iter().map(|r| r.iterations).sum();
    let mut best = runs.into_iter().nth(best_idx).expect("nonempty runs");
    best.iterations = total_iters;
    Ok((best, rates))
}
