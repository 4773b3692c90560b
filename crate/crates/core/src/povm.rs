//! Weighted rank-1 projector POVMs on a qubit, bipartite outcome
//! probabilities on states `α|00⟩ + β|11⟩`, and the hemisphere-based
//! classical replication of measurement outcomes.
//!
//! The point of this machinery: a measurement strategy can feed a perfect
//! code on the noiseless channel only if every positive-probability
//! encoded pair lands in one output class per message pair, with distinct
//! classes across message pairs. Classical replication picks outcome
//! indices with strictly positive quantum probability without measuring
//! anything, which turns any such perfect measurement strategy into an
//! equally perfect classical one.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boxes::CorrelationBox;
use crate::channels::{channel_one_output, InputSymbol};
use crate::error::{Error, Result};

/// Entrywise tolerance for the completeness check Σ γᵢ Pᵢ = I.
pub const COMPLETENESS_TOL: f64 = 1e-10;

/// Probabilities above this count as part of a strategy's support.
pub const SUPPORT_TOL: f64 = 1e-12;

pub type Matrix2 = [[Complex64; 2]; 2];

fn zero_matrix() -> Matrix2 {
    [[Complex64::new(0.0, 0.0); 2]; 2]
}

fn identity() -> Matrix2 {
    let mut m = zero_matrix();
    m[0][0] = Complex64::new(1.0, 0.0);
    m[1][1] = Complex64::new(1.0, 0.0);
    m
}

fn mat_add_scaled(acc: &mut Matrix2, m: &Matrix2, s: f64) {
    for i in 0..2 {
        for j in 0..2 {
            acc[i][j] += m[i][j] * s;
        }
    }
}

fn mat_mul(a: &Matrix2, b: &Matrix2) -> Matrix2 {
    let mut out = zero_matrix();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

// ── Projector parametrization ────────────────────────────────────────────

/// Angles of a rank-1 qubit projector: θ ∈ [0, π/2], φ ∈ [0, 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectorAngles {
    pub theta: f64,
    pub phi: f64,
}

impl ProjectorAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        let ok = (0.0..=std::f64::consts::FRAC_PI_2).contains(&theta)
            && (0.0..std::f64::consts::TAU).contains(&phi);
        if ok {
            Ok(ProjectorAngles { theta, phi })
        } else {
            Err(Error::InvalidAngles { theta, phi })
        }
    }
}

/// The projector `|ψ⟩⟨ψ|` for `|ψ⟩ = cos θ |0⟩ + e^{iφ} sin θ |1⟩`.
pub fn projector(angles: &ProjectorAngles) -> Matrix2 {
    let (s, c) = angles.theta.sin_cos();
    let phase = Complex64::from_polar(1.0, angles.phi);
    let mut m = zero_matrix();
    m[0][0] = Complex64::new(c * c, 0.0);
    m[1][1] = Complex64::new(s * s, 0.0);
    m[0][1] = phase.conj() * (s * c);
    m[1][0] = phase * (s * c);
    m
}

/// The projector's Bloch vector
/// `(sin 2θ cos φ, sin 2θ sin φ, cos 2θ)`.
pub fn bloch_vector(angles: &ProjectorAngles) -> [f64; 3] {
    let (s2, c2) = (2.0 * angles.theta).sin_cos();
    [s2 * angles.phi.cos(), s2 * angles.phi.sin(), c2]
}

/// A weighted rank-1 POVM element `γ P(θ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PovmElement {
    pub weight: f64,
    pub angles: ProjectorAngles,
}

impl PovmElement {
    pub fn new(weight: f64, angles: ProjectorAngles) -> Result<Self> {
        if weight < 0.0 {
            return Err(Error::NegativeWeight(weight));
        }
        Ok(PovmElement { weight, angles })
    }

    pub fn matrix(&self) -> Matrix2 {
        let mut m = projector(&self.angles);
        for row in m.iter_mut() {
            for v in row.iter_mut() {
                *v *= self.weight;
            }
        }
        m
    }
}

/// A POVM given as weighted rank-1 projectors summing to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Povm {
    elements: Vec<PovmElement>,
}

impl Povm {
    pub fn new(elements: Vec<PovmElement>) -> Result<Self> {
        let mut sum = zero_matrix();
        for e in &elements {
            if e.weight < 0.0 {
                return Err(Error::NegativeWeight(e.weight));
            }
            let m = e.matrix();
            mat_add_scaled(&mut sum, &m, 1.0);
        }
        let id = identity();
        let mut deviation = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                deviation = deviation.max((sum[i][j] - id[i][j]).norm());
            }
        }
        if deviation > COMPLETENESS_TOL {
            return Err(Error::IncompletePovm {
                deviation,
                tol: COMPLETENESS_TOL,
            });
        }
        Ok(Povm { elements })
    }

    /// The computational-basis measurement `{|0⟩⟨0|, |1⟩⟨1|}`.
    pub fn computational_basis() -> Self {
        Povm {
            elements: vec![
                PovmElement {
                    weight: 1.0,
                    angles: ProjectorAngles { theta: 0.0, phi: 0.0 },
                },
                PovmElement {
                    weight: 1.0,
                    angles: ProjectorAngles {
                        theta: std::f64::consts::FRAC_PI_2,
                        phi: 0.0,
                    },
                },
            ],
        }
    }

    pub fn elements(&self) -> &[PovmElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// The canonical two-qubit resource state `α|00⟩ + β|11⟩` with strictly
/// positive amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SharedState {
    alpha: f64,
    beta: f64,
}

impl SharedState {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if alpha <= 0.0 || beta <= 0.0 || (alpha * alpha + beta * beta - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidSharedState { alpha, beta });
        }
        Ok(SharedState { alpha, beta })
    }

    /// The maximally entangled state with α = β = 1/√2.
    pub fn maximally_entangled() -> Self {
        let v = std::f64::consts::FRAC_1_SQRT_2;
        SharedState { alpha: v, beta: v }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

// ── Outcome probabilities ────────────────────────────────────────────────

/// Probability that the senders observe this element pair:
/// `γ₁ γ₂ (a² + b² + 2abc)` with `a = α cos θ₁ cos θ₂`,
/// `b = β sin θ₁ sin θ₂`, `c = cos(φ₁ + φ₂)`.
pub fn outcome_probability(state: &SharedState, e1: &PovmElement, e2: &PovmElement) -> f64 {
    let a = state.alpha * e1.angles.theta.cos() * e2.angles.theta.cos();
    let b = state.beta * e1.angles.theta.sin() * e2.angles.theta.sin();
    let c = (e1.angles.phi + e2.angles.phi).cos();
    e1.weight * e2.weight * (a * a + b * b + 2.0 * a * b * c)
}

/// The same probability from the bilinear form
/// `⟨Ψ| (γ₁P₁) ⊗ (γ₂P₂) |Ψ⟩`, kept as an independent route for
/// cross-checking the closed form.
pub fn outcome_probability_matrix(
    state: &SharedState,
    e1: &PovmElement,
    e2: &PovmElement,
) -> f64 {
    let m1 = e1.matrix();
    let m2 = e2.matrix();
    let a = Complex64::new(state.alpha, 0.0);
    let b = Complex64::new(state.beta, 0.0);
    let v = a * a * m1[0][0] * m2[0][0]
        + a * b * (m1[0][1] * m2[0][1] + m1[1][0] * m2[1][0])
        + b * b * m1[1][1] * m2[1][1];
    v.re
}

// ── Hemisphere selection and classical replication ───────────────────────

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hemisphere {
    /// φ ∈ [0, π).
    East,
    /// φ ∈ [π, 2π).
    West,
}

impl Hemisphere {
    fn contains(self, phi: f64) -> bool {
        match self {
            Hemisphere::East => (0.0..std::f64::consts::PI).contains(&phi),
            Hemisphere::West => (std::f64::consts::PI..std::f64::consts::TAU).contains(&phi),
        }
    }
}

/// Index of the first element whose φ lies in the requested hemisphere.
pub fn hemisphere_select(povm: &Povm, hemisphere: Hemisphere) -> Result<usize> {
    povm.elements
        .iter()
        .position(|e| hemisphere.contains(e.angles.phi))
        .ok_or(Error::NoElementInHemisphere)
}

/// Picks an outcome pair with strictly positive quantum probability
/// without measuring anything.
///
/// Primary rule: sender 1 picks from the eastern hemisphere and sender 2
/// from the western one, which avoids the `a = b, c = -1` cancellation for
/// interior angles. Both the θ-degenerate case (`a = b = 0`) and boundary
/// φ values can still zero the selected pair, so the fallback scans all
/// pairs for the most probable one; the probabilities sum to 1, so it
/// always exists.
pub fn classical_replication(
    m1: u8,
    m2: u8,
    povms_1: &[Povm; 2],
    povms_2: &[Povm; 2],
    state: &SharedState,
) -> (usize, usize) {
    let p1 = &povms_1[(m1 & 1) as usize];
    let p2 = &povms_2[(m2 & 1) as usize];
    if let (Ok(i), Ok(j)) = (
        hemisphere_select(p1, Hemisphere::East),
        hemisphere_select(p2, Hemisphere::West),
    ) {
        if outcome_probability(state, &p1.elements[i], &p2.elements[j]) > SUPPORT_TOL {
            return (i, j);
        }
    }
    let mut best = (0, 0);
    let mut best_p = -1.0;
    for (i, e1) in p1.elements.iter().enumerate() {
        for (j, e2) in p2.elements.iter().enumerate() {
            let p = outcome_probability(state, e1, e2);
            if p > best_p {
                best_p = p;
                best = (i, j);
            }
        }
    }
    best
}

// ── Rank-1 refinement and random POVMs ───────────────────────────────────

/// Eigendecomposition of a Hermitian 2×2 matrix: `(λ, v)` pairs with
/// `λ₁ ≥ λ₂` and orthonormal eigenvectors.
fn eigen_hermitian(m: &Matrix2) -> [(f64, [Complex64; 2]); 2] {
    let h11 = m[0][0].re;
    let h22 = m[1][1].re;
    let z = m[0][1];
    let mean = 0.5 * (h11 + h22);
    let d = 0.5 * (h11 - h22);
    let r = (d * d + z.norm_sqr()).sqrt();
    let hi = mean + r;
    let lo = mean - r;
    if r < 1e-14 || z.norm() < 1e-14 {
        // (Nearly) diagonal: basis vectors are eigenvectors.
        let e0 = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let e1 = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        if h11 >= h22 {
            return [(h11, e0), (h22, e1)];
        }
        return [(h22, e1), (h11, e0)];
    }
    let mut v = [z, Complex64::new(hi - h11, 0.0)];
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    v[0] /= norm;
    v[1] /= norm;
    // Orthogonal complement for the low eigenvalue.
    let w = [-v[1].conj(), v[0].conj()];
    [(hi, v), (lo, w)]
}

/// Angles of the rank-1 projector `v v†`, fixing the global phase so the
/// first component is real and nonnegative.
fn angles_from_vector(v: &[Complex64; 2]) -> ProjectorAngles {
    let n0 = v[0].norm();
    let n1 = v[1].norm();
    if n0 < 1e-14 {
        return ProjectorAngles {
            theta: std::f64::consts::FRAC_PI_2,
            phi: 0.0,
        };
    }
    let phase = v[0] / n0;
    let v1 = v[1] * phase.conj();
    let theta = n1.atan2(n0).clamp(0.0, std::f64::consts::FRAC_PI_2);
    let mut phi = if n1 < 1e-14 { 0.0 } else { v1.arg() };
    if phi < 0.0 {
        phi += std::f64::consts::TAU;
    }
    if phi >= std::f64::consts::TAU {
        phi = 0.0;
    }
    ProjectorAngles { theta, phi }
}

/// Decomposes arbitrary positive semidefinite POVM elements into weighted
/// rank-1 projectors via per-element eigendecomposition.
pub fn rank_one_refinement(elements: &[Matrix2]) -> Result<Povm> {
    let mut refined = Vec::new();
    for m in elements {
        for (lambda, v) in eigen_hermitian(m) {
            if lambda < -1e-10 {
                return Err(Error::NotPositive(lambda));
            }
            if lambda > 1e-12 {
                refined.push(PovmElement {
                    weight: lambda,
                    angles: angles_from_vector(&v),
                });
            }
        }
    }
    Povm::new(refined)
}

fn random_psd(rng: &mut impl Rng) -> Matrix2 {
    let mut b = zero_matrix();
    for row in b.iter_mut() {
        for v in row.iter_mut() {
            *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
    }
    // B B† is positive semidefinite.
    let mut adj = zero_matrix();
    for i in 0..2 {
        for j in 0..2 {
            adj[i][j] = b[j][i].conj();
        }
    }
    mat_mul(&b, &adj)
}

/// A random POVM with weighted rank-1 elements: raw positive parts are
/// whitened by `S^{-1/2} · S^{-1/2}` and refined to rank 1.
pub fn random_rank_one_povm(rng: &mut impl Rng, parts: usize) -> Povm {
    assert!(parts >= 1);
    loop {
        let raw: Vec<Matrix2> = (0..parts).map(|_| random_psd(rng)).collect();
        let mut total = zero_matrix();
        for m in &raw {
            mat_add_scaled(&mut total, m, 1.0);
        }
        let eig = eigen_hermitian(&total);
        if eig[1].0 < 1e-6 {
            continue; // nearly singular sum; resample
        }
        let mut inv_sqrt = zero_matrix();
        for (lambda, v) in eig {
            let s = lambda.sqrt().recip();
            for i in 0..2 {
                for j in 0..2 {
                    inv_sqrt[i][j] += v[i] * v[j].conj() * s;
                }
            }
        }
        let whitened: Vec<Matrix2> = raw
            .iter()
            .map(|m| mat_mul(&mat_mul(&inv_sqrt, m), &inv_sqrt))
            .collect();
        match rank_one_refinement(&whitened) {
            Ok(povm) => return povm,
            Err(_) => continue,
        }
    }
}

/// A random shared state with both amplitudes bounded away from zero.
pub fn random_shared_state(rng: &mut impl Rng) -> SharedState {
    let t: f64 = rng.gen_range(0.05..(std::f64::consts::FRAC_PI_2 - 0.05));
    SharedState {
        alpha: t.cos(),
        beta: t.sin(),
    }
}

/// The projective measurements that win the CHSH game with probability
/// cos²(π/8) on the maximally entangled state; per sender, indexed by the
/// message bit, with element k reporting outcome k.
pub fn tsirelson_measurement_povms() -> ([Povm; 2], [Povm; 2]) {
    let pi = std::f64::consts::PI;
    let proj = |theta: f64, phi: f64| PovmElement {
        weight: 1.0,
        angles: ProjectorAngles { theta, phi },
    };
    // Measurement along angle χ in the x-z plane: projectors at θ = χ/2
    // (φ = 0) and θ = π/2 - χ/2 (φ = π); negative χ flips the phases.
    let basis = |chi: f64| -> Povm {
        let half = chi.abs() / 2.0;
        let (phi0, phi1) = if chi >= 0.0 { (0.0, pi) } else { (pi, 0.0) };
        let e0 = proj(half, if half == 0.0 { 0.0 } else { phi0 });
        let e1 = proj(pi / 2.0 - half, if half == pi / 2.0 { 0.0 } else { phi1 });
        Povm::new(vec![e0, e1]).expect("projective pair is complete")
    };
    let sender1 = [basis(0.0), basis(pi / 2.0)];
    let sender2 = [basis(pi / 4.0), basis(-pi / 4.0)];
    (sender1, sender2)
}

// ── Perfect-map check ────────────────────────────────────────────────────

/// A candidate entanglement-assisted coding strategy: a POVM per message
/// bit per sender plus encoder tables mapping (message, outcome index) to
/// a channel input.
#[derive(Debug, Clone)]
pub struct QuantumStrategy {
    pub state: SharedState,
    pub povms_1: [Povm; 2],
    pub povms_2: [Povm; 2],
    /// `encoders_1[m][outcome]` is sender 1's channel input.
    pub encoders_1: [Vec<InputSymbol>; 2],
    pub encoders_2: [Vec<InputSymbol>; 2],
}

impl QuantumStrategy {
    /// Concatenation encoders (message bit followed by outcome index) for
    /// two-outcome POVMs.
    pub fn with_concat_encoders(
        state: SharedState,
        povms_1: [Povm; 2],
        povms_2: [Povm; 2],
    ) -> Result<Self> {
        let table = |povm: &Povm, m: u8| -> Result<Vec<InputSymbol>> {
            if povm.len() != 2 {
                return Err(Error::EncoderMismatch {
                    message: m,
                    got: 2,
                    expected: povm.len(),
                });
            }
            Ok(vec![
                InputSymbol::from_bits(m, 0),
                InputSymbol::from_bits(m, 1),
            ])
        };
        let encoders_1 = [table(&povms_1[0], 0)?, table(&povms_1[1], 1)?];
        let encoders_2 = [table(&povms_2[0], 0)?, table(&povms_2[1], 1)?];
        Ok(QuantumStrategy {
            state,
            povms_1,
            povms_2,
            encoders_1,
            encoders_2,
        })
    }

    /// Positive-probability encoded pairs for one message pair.
    fn support(&self, m1: u8, m2: u8) -> Result<Vec<(InputSymbol, InputSymbol)>> {
        let p1 = &self.povms_1[m1 as usize];
        let p2 = &self.povms_2[m2 as usize];
        let enc1 = &self.encoders_1[m1 as usize];
        let enc2 = &self.encoders_2[m2 as usize];
        if enc1.len() != p1.len() {
            return Err(Error::EncoderMismatch {
                message: m1,
                got: enc1.len(),
                expected: p1.len(),
            });
        }
        if enc2.len() != p2.len() {
            return Err(Error::EncoderMismatch {
                message: m2,
                got: enc2.len(),
                expected: p2.len(),
            });
        }
        let mut support = Vec::new();
        for (i, e1) in p1.elements().iter().enumerate() {
            for (j, e2) in p2.elements().iter().enumerate() {
                if outcome_probability(&self.state, e1, e2) > SUPPORT_TOL {
                    support.push((enc1[i], enc2[j]));
                }
            }
        }
        Ok(support)
    }
}

/// True iff each message pair's support lands in a single output class of
/// the noiseless channel and the four classes are pairwise distinct — the
/// structure any perfect strategy must realize.
pub fn supports_form_perfect_map(supports: &[Vec<(InputSymbol, InputSymbol)>; 4]) -> bool {
    let mut classes = Vec::with_capacity(4);
    for support in supports {
        let mut class = None;
        if support.is_empty() {
            return false;
        }
        for &(x1, x2) in support {
            let out = channel_one_output(x1, x2);
            match class {
                None => class = Some(out),
                Some(c) if c != out => return false,
                Some(_) => {}
            }
        }
        classes.push(class.expect("nonempty support"));
    }
    for i in 0..4 {
        for j in (i + 1)..4 {
            if classes[i] == classes[j] {
                return false;
            }
        }
    }
    true
}

/// Applies the perfect-map check to a measurement strategy's supports.
pub fn strategy_forms_perfect_map(strategy: &QuantumStrategy) -> Result<bool> {
    let supports = [
        strategy.support(0, 0)?,
        strategy.support(0, 1)?,
        strategy.support(1, 0)?,
        strategy.support(1, 1)?,
    ];
    Ok(supports_form_perfect_map(&supports))
}

/// Applies the perfect-map check to a correlation box with concatenation
/// encoders (the statistics-level analogue; the box need not be quantum).
pub fn box_forms_perfect_map(boxed: &CorrelationBox) -> bool {
    let mut supports: [Vec<(InputSymbol, InputSymbol)>; 4] = Default::default();
    for m1 in 0..2u8 {
        for m2 in 0..2u8 {
            let support = &mut supports[(m1 * 2 + m2) as usize];
            for a in 0..2u8 {
                for b in 0..2u8 {
                    if boxed.prob(a, b, m1, m2) > SUPPORT_TOL {
                        support.push((
                            InputSymbol::from_bits(m1, a),
                            InputSymbol::from_bits(m2, b),
                        ));
                    }
                }
            }
        }
    }
    supports_form_perfect_map(&supports)
}
