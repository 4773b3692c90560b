//! Two-sender/two-receiver channels as explicit conditional distributions.
//!
//! A channel takes a two-bit codeword from each sender and delivers one
//! symbol to each receiver. Everything is stored as a dense table
//! `p(y1, y2 | x1, x2)` over small alphabets, so mutual informations for
//! product input distributions are computed exactly.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used when validating that probability tables are normalized.
pub const PMF_TOL: f64 = 1e-12;

/// Number of codewords per sender (the two-bit strings 00, 01, 10, 11).
pub const NUM_INPUTS: usize = 4;

// ── Symbols ──────────────────────────────────────────────────────────────

/// One sender's two-bit codeword, indexed 0..=3 as 00, 01, 10, 11.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct InputSymbol(u8);

impl InputSymbol {
    pub const ALL: [InputSymbol; 4] = [
        InputSymbol(0),
        InputSymbol(1),
        InputSymbol(2),
        InputSymbol(3),
    ];

    pub fn new(index: u8) -> Result<Self> {
        if index < 4 {
            Ok(InputSymbol(index))
        } else {
            Err(Error::InvalidSymbol(index))
        }
    }

    /// Builds the codeword `first second` from its two bits.
    pub fn from_bits(first: u8, second: u8) -> Self {
        debug_assert!(first < 2 && second < 2);
        InputSymbol((first << 1) | second)
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// Leading bit (the message bit in the box-assisted encodings).
    pub fn first_bit(self) -> u8 {
        self.0 >> 1
    }

    /// Trailing bit (the padding bit in the box-assisted encodings).
    pub fn second_bit(self) -> u8 {
        self.0 & 1
    }
}

impl fmt::Display for InputSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.first_bit(), self.second_bit())
    }
}

/// One receiver's symbol: a bit, or the erasure mark for channels that
/// declare an erasure alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OutputSymbol {
    Zero,
    One,
    Erased,
}

impl OutputSymbol {
    pub fn index(self) -> usize {
        match self {
            OutputSymbol::Zero => 0,
            OutputSymbol::One => 1,
            OutputSymbol::Erased => 2,
        }
    }

    pub fn from_index(index: usize) -> Self {
        match index {
            0 => OutputSymbol::Zero,
            1 => OutputSymbol::One,
            2 => OutputSymbol::Erased,
            _ => unreachable!("output index {index} out of range"),
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            OutputSymbol::Zero
        } else {
            OutputSymbol::One
        }
    }

    /// The received bit, unless erased.
    pub fn bit(self) -> Option<u8> {
        match self {
            OutputSymbol::Zero => Some(0),
            OutputSymbol::One => Some(1),
            OutputSymbol::Erased => None,
        }
    }
}

impl fmt::Display for OutputSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputSymbol::Zero => write!(f, "0"),
            OutputSymbol::One => write!(f, "1"),
            OutputSymbol::Erased => write!(f, "E"),
        }
    }
}

/// Which sender-receiver pair an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pair {
    First,
    Second,
}

impl Pair {
    pub fn index(self) -> usize {
        match self {
            Pair::First => 0,
            Pair::Second => 1,
        }
    }
}

// ── Units ────────────────────────────────────────────────────────────────

/// Logarithm base for every information quantity in the crate.
///
/// The base is explicit everywhere because the two capacity figures this
/// toolkit reproduces are only comparable once their units are pinned down.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LogBase {
    Bits,
    Nats,
}

impl LogBase {
    /// Converts a quantity measured in nats into this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Bits => nats / std::f64::consts::LN_2,
            LogBase::Nats => nats,
        }
    }

    /// Converts a quantity measured in bits into this base.
    pub fn from_bits(self, bits: f64) -> f64 {
        match self {
            LogBase::Bits => bits,
            LogBase::Nats => bits * std::f64::consts::LN_2,
        }
    }
}

impl fmt::Display for LogBase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogBase::Bits => write!(f, "bits"),
            LogBase::Nats => write!(f, "nats"),
        }
    }
}

/// Per-pair mutual informations and their sum, tagged with the log base.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
    pub log_base: LogBase,
}

impl RateReport {
    pub fn new(r1: f64, r2: f64, log_base: LogBase) -> Self {
        RateReport {
            r1,
            r2,
            sum: r1 + r2,
            log_base,
        }
    }
}

// ── Input distributions ──────────────────────────────────────────────────

/// Independent input distributions for the two senders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductDistribution {
    d1: [f64; 4],
    d2: [f64; 4],
}

fn validate_pmf(v: &[f64], context: &'static str) -> Result<()> {
    let mut sum = 0.0;
    for &p in v {
        if p < 0.0 {
            return Err(Error::NegativeProbability { context, value: p });
        }
        sum += p;
    }
    if (sum - 1.0).abs() > PMF_TOL {
        return Err(Error::NotNormalized {
            context,
            sum,
            tol: PMF_TOL,
        });
    }
    Ok(())
}

impl ProductDistribution {
    pub fn new(d1: [f64; 4], d2: [f64; 4]) -> Result<Self> {
        validate_pmf(&d1, "sender 1 distribution")?;
        validate_pmf(&d2, "sender 2 distribution")?;
        Ok(ProductDistribution { d1, d2 })
    }

    /// Both senders uniform over the full four-symbol alphabet.
    pub fn uniform() -> Self {
        ProductDistribution {
            d1: [0.25; 4],
            d2: [0.25; 4],
        }
    }

    pub fn point_mass(x1: InputSymbol, x2: InputSymbol) -> Self {
        let mut d1 = [0.0; 4];
        let mut d2 = [0.0; 4];
        d1[x1.index()] = 1.0;
        d2[x2.index()] = 1.0;
        ProductDistribution { d1, d2 }
    }

    pub fn d1(&self) -> &[f64; 4] {
        &self.d1
    }

    pub fn d2(&self) -> &[f64; 4] {
        &self.d2
    }

    pub fn sender(&self, pair: Pair) -> &[f64; 4] {
        match pair {
            Pair::First => &self.d1,
            Pair::Second => &self.d2,
        }
    }
}

// ── Channel specification ────────────────────────────────────────────────

/// A two-pair channel `p(y1, y2 | x1, x2)` over two-bit inputs and small
/// per-receiver output alphabets, stored as a dense row-stochastic table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    name: String,
    /// Output alphabet size per receiver: 2 for {0,1}, 3 for {0,1,E}.
    out1: usize,
    out2: usize,
    /// Flattened `[x1][x2][y1][y2]`.
    pmf: Vec<f64>,
    epsilon: Option<f64>,
}

impl ChannelSpec {
    /// Validates nonnegativity and row normalization (within `PMF_TOL`)
    /// before accepting the table.
    pub fn new(
        name: impl Into<String>,
        out1: usize,
        out2: usize,
        pmf: Vec<f64>,
        epsilon: Option<f64>,
    ) -> Result<Self> {
        assert!(
            (2..=3).contains(&out1) && (2..=3).contains(&out2),
            "per-receiver output alphabets are {{0,1}} or {{0,1,E}}"
        );
        assert_eq!(pmf.len(), NUM_INPUTS * NUM_INPUTS * out1 * out2);
        let spec = ChannelSpec {
            name: name.into(),
            out1,
            out2,
            pmf,
            epsilon,
        };
        for x1 in InputSymbol::ALL {
            for x2 in InputSymbol::ALL {
                let mut sum = 0.0;
                for y1 in 0..out1 {
                    for y2 in 0..out2 {
                        let p = spec.pmf[spec.offset(x1, x2, y1, y2)];
                        if p < 0.0 {
                            return Err(Error::NegativeProbability {
                                context: "channel pmf",
                                value: p,
                            });
                        }
                        sum += p;
                    }
                }
                if (sum - 1.0).abs() > PMF_TOL {
                    return Err(Error::NotNormalized {
                        context: "channel pmf row",
                        sum,
                        tol: PMF_TOL,
                    });
                }
            }
        }
        Ok(spec)
    }

    fn offset(&self, x1: InputSymbol, x2: InputSymbol, y1: usize, y2: usize) -> usize {
        ((x1.index() * NUM_INPUTS + x2.index()) * self.out1 + y1) * self.out2 + y2
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    /// Output alphabet sizes `(|Y1|, |Y2|)`.
    pub fn output_sizes(&self) -> (usize, usize) {
        (self.out1, self.out2)
    }

    pub fn has_erasures(&self) -> bool {
        self.out1 == 3 || self.out2 == 3
    }

    /// `p(y1, y2 | x1, x2)` with outputs given as indices (2 = erasure).
    pub fn prob(&self, x1: InputSymbol, x2: InputSymbol, y1: usize, y2: usize) -> f64 {
        self.pmf[self.offset(x1, x2, y1, y2)]
    }

    /// Single-receiver conditional `p(y_pair | x1, x2)`, the other output
    /// summed out.
    pub fn receiver_prob(&self, pair: Pair, x1: InputSymbol, x2: InputSymbol, y: usize) -> f64 {
        match pair {
            Pair::First => (0..self.out2).map(|y2| self.prob(x1, x2, y, y2)).sum(),
            Pair::Second => (0..self.out1).map(|y1| self.prob(x1, x2, y1, y)).sum(),
        }
    }

    /// Samples one channel use. Deterministic given the state of `rng`.
    pub fn sample_output(
        &self,
        x1: InputSymbol,
        x2: InputSymbol,
        rng: &mut impl Rng,
    ) -> (OutputSymbol, OutputSymbol) {
        let mut u: f64 = rng.gen();
        let mut last = (self.out1 - 1, self.out2 - 1);
        for y1 in 0..self.out1 {
            for y2 in 0..self.out2 {
                let p = self.prob(x1, x2, y1, y2);
                if u < p {
                    return (OutputSymbol::from_index(y1), OutputSymbol::from_index(y2));
                }
                u -= p;
                if p > 0.0 {
                    last = (y1, y2);
                }
            }
        }
        // Rounding can push u past the final positive cell; fall back to it.
        (
            OutputSymbol::from_index(last.0),
            OutputSymbol::from_index(last.1),
        )
    }

    /// Conditional pmf `p(y_i | x_i)` seen by one pair when the other
    /// sender transmits according to `dist`, one row per input symbol.
    pub fn pair_marginal(&self, dist: &ProductDistribution, pair: Pair) -> [Vec<f64>; 4] {
        let out = match pair {
            Pair::First => self.out1,
            Pair::Second => self.out2,
        };
        let other = match pair {
            Pair::First => dist.d2(),
            Pair::Second => dist.d1(),
        };
        let mut rows: [Vec<f64>; 4] = [
            vec![0.0; out],
            vec![0.0; out],
            vec![0.0; out],
            vec![0.0; out],
        ];
        for x in InputSymbol::ALL {
            for xo in InputSymbol::ALL {
                let w = other[xo.index()];
                if w == 0.0 {
                    continue;
                }
                for y in 0..out {
                    rows[x.index()][y] += w * match pair {
                        Pair::First => self.receiver_prob(Pair::First, x, xo, y),
                        Pair::Second => self.receiver_prob(Pair::Second, xo, x, y),
                    };
                }
            }
        }
        rows
    }

    /// Exact `I(X1;Y1)` and `I(X2;Y2)` for a product input distribution.
    pub fn joint_rate(&self, dist: &ProductDistribution, log_base: LogBase) -> RateReport {
        let (i1, i2) = mi_pair_nats(self, dist.d1(), dist.d2());
        RateReport::new(
            log_base.from_nats(clamp_rate(i1)),
            log_base.from_nats(clamp_rate(i2)),
            log_base,
        )
    }
}

/// Round tiny negative values (floating-point noise in `H` differences)
/// up to zero; mutual information is nonnegative.
fn clamp_rate(v: f64) -> f64 {
    if v < 0.0 && v > -1e-9 {
        0.0
    } else {
        v
    }
}

/// Shannon entropy of a pmf with the 0·log 0 = 0 convention.
pub fn entropy(pmf: &[f64], log_base: LogBase) -> f64 {
    let mut h = 0.0;
    for &p in pmf {
        if p > 0.0 {
            h -= p * p.ln();
        }
    }
    log_base.from_nats(h)
}

/// Both pair mutual informations in nats, computed from weight vectors that
/// need not be normalized.
///
/// For each pair this evaluates `sum_x d(x) sum_y W(y|x) ln W(y|x) -
/// sum_y q(y) ln q(y)` with `q(y) = sum_x d(x) W(y|x)`, which equals
/// `H(Y) - H(Y|X)` on the simplex and extends smoothly off it. The
/// off-simplex extension is what the sphere-constrained optimizer
/// differentiates, so the same expression is used for both.
pub(crate) fn mi_pair_nats(spec: &ChannelSpec, d1: &[f64; 4], d2: &[f64; 4]) -> (f64, f64) {
    let (out1, out2) = spec.output_sizes();
    let mut i = [0.0; 2];
    for pair in [Pair::First, Pair::Second] {
        let (own, other, out) = match pair {
            Pair::First => (d1, d2, out1),
            Pair::Second => (d2, d1, out2),
        };
        let mut q = [0.0f64; 3];
        let mut cond_term = 0.0;
        for x in InputSymbol::ALL {
            let dx = own[x.index()];
            let mut w = [0.0f64; 3];
            for xo in InputSymbol::ALL {
                let wo = other[xo.index()];
                if wo == 0.0 {
                    continue;
                }
                for (y, wy) in w.iter_mut().enumerate().take(out) {
                    *wy += wo * match pair {
                        Pair::First => spec.receiver_prob(Pair::First, x, xo, y),
                        Pair::Second => spec.receiver_prob(Pair::Second, xo, x, y),
                    };
                }
            }
            for &wy in w.iter().take(out) {
                if wy > 0.0 {
                    cond_term += dx * wy * wy.ln();
                }
            }
            for (y, &wy) in w.iter().enumerate().take(out) {
                q[y] += dx * wy;
            }
        }
        let mut out_term = 0.0;
        for &qy in q.iter().take(out) {
            if qy > 0.0 {
                out_term -= qy * qy.ln();
            }
        }
        i[pair.index()] = cond_term + out_term;
    }
    (i[0], i[1])
}

// ── The two channels under study ─────────────────────────────────────────

/// Channel I's deterministic output pair for each input pair.
///
/// Grid layout: `CHANNEL_ONE_OUTPUTS[x1][x2] = (y1, y2)`.
pub const CHANNEL_ONE_OUTPUTS: [[(u8, u8); 4]; 4] = [
    [(0, 0), (1, 1), (0, 1), (1, 0)],
    [(1, 1), (0, 0), (1, 0), (0, 1)],
    [(1, 0), (0, 1), (0, 0), (1, 1)],
    [(0, 1), (1, 0), (1, 1), (0, 0)],
];

/// Channel I's output pair for a given input pair.
pub fn channel_one_output(x1: InputSymbol, x2: InputSymbol) -> (u8, u8) {
    CHANNEL_ONE_OUTPUTS[x1.index()][x2.index()]
}

/// Channel II's surviving cells: the input pairs whose output is delivered
/// with probability ε (all other cells are always erased).
pub const CHANNEL_TWO_LIVE_CELLS: [((u8, u8), (u8, u8)); 8] = [
    ((0, 0), (0, 0)),
    ((0, 2), (0, 1)),
    ((1, 1), (0, 0)),
    ((1, 3), (0, 1)),
    ((2, 0), (1, 0)),
    ((2, 3), (1, 1)),
    ((3, 1), (1, 0)),
    ((3, 2), (1, 1)),
];

/// The noiseless channel that flips both receivers' bits exactly when the
/// senders' padding bits violate the AND-of-messages parity.
pub fn build_channel_one() -> ChannelSpec {
    let out = 2;
    let mut pmf = vec![0.0; NUM_INPUTS * NUM_INPUTS * out * out];
    for x1 in InputSymbol::ALL {
        for x2 in InputSymbol::ALL {
            let (y1, y2) = channel_one_output(x1, x2);
            let idx = ((x1.index() * NUM_INPUTS + x2.index()) * out + y1 as usize) * out
                + y2 as usize;
            pmf[idx] = 1.0;
        }
    }
    ChannelSpec::new("channel-one", out, out, pmf, None).expect("static table is normalized")
}

/// The erasure variant: the eight cells matched to the box-assisted
/// encoding deliver their output pair with probability `epsilon` and are
/// erased otherwise; every other cell is always erased.
pub fn build_channel_two(epsilon: f64) -> Result<ChannelSpec> {
    if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let out = 3;
    let erased = 2usize;
    let mut pmf = vec![0.0; NUM_INPUTS * NUM_INPUTS * out * out];
    let mut live = [[None; 4]; 4];
    for ((x1, x2), y) in CHANNEL_TWO_LIVE_CELLS {
        live[x1 as usize][x2 as usize] = Some(y);
    }
    for x1 in InputSymbol::ALL {
        for x2 in InputSymbol::ALL {
            let base = (x1.index() * NUM_INPUTS + x2.index()) * out * out;
            match live[x1.index()][x2.index()] {
                Some((y1, y2)) => {
                    pmf[base + y1 as usize * out + y2 as usize] = epsilon;
                    pmf[base + erased * out + erased] = 1.0 - epsilon;
                }
                None => pmf[base + erased * out + erased] = 1.0,
            }
        }
    }
    ChannelSpec::new("channel-two", out, out, pmf, Some(epsilon))
}

// ── Text serialization ───────────────────────────────────────────────────

/// Formats a real with 12 significant digits for the channel text format.
fn fmt_prob(p: f64) -> String {
    format!("{:.11e}", p)
}

impl ChannelSpec {
    /// Plain text description: one header line
    /// (`name 4 4 |Y1| |Y2| epsilon`, `-` when no epsilon), then one line
    /// per input pair listing output probabilities in lexicographic
    /// `(y1, y2)` order with symbols ordered `0 < 1 < E`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let eps = match self.epsilon {
            Some(e) => fmt_prob(e),
            None => "-".to_string(),
        };
        s.push_str(&format!(
            "{} {} {} {} {} {}\n",
            self.name, NUM_INPUTS, NUM_INPUTS, self.out1, self.out2, eps
        ));
        for x1 in InputSymbol::ALL {
            for x2 in InputSymbol::ALL {
                s.push_str(&format!("{x1} {x2}"));
                for y1 in 0..self.out1 {
                    for y2 in 0..self.out2 {
                        s.push(' ');
                        s.push_str(&fmt_prob(self.prob(x1, x2, y1, y2)));
                    }
                }
                s.push('\n');
            }
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 6 {
            return Err(Error::Parse(format!(
                "header needs 6 fields, got {}",
                fields.len()
            )));
        }
        let name = fields[0].to_string();
        let parse_usize = |s: &str, what: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::Parse(format!("bad {what}: {s}")))
        };
        let in1 = parse_usize(fields[1], "input alphabet size")?;
        let in2 = parse_usize(fields[2], "input alphabet size")?;
        if in1 != NUM_INPUTS || in2 != NUM_INPUTS {
            return Err(Error::Parse(format!(
                "input alphabets must be {NUM_INPUTS}x{NUM_INPUTS}"
            )));
        }
        let out1 = parse_usize(fields[3], "output alphabet size")?;
        let out2 = parse_usize(fields[4], "output alphabet size")?;
        if !(2..=3).contains(&out1) || !(2..=3).contains(&out2) {
            return Err(Error::Parse("output alphabet sizes must be 2 or 3".into()));
        }
        let epsilon = if fields[5] == "-" {
            None
        } else {
            Some(
                fields[5]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad epsilon: {}", fields[5])))?,
            )
        };
        let mut pmf = vec![0.0; NUM_INPUTS * NUM_INPUTS * out1 * out2];
        let parse_sym = |s: &str| -> Result<InputSymbol> {
            match s {
                "00" => Ok(InputSymbol(0)),
                "01" => Ok(InputSymbol(1)),
                "10" => Ok(InputSymbol(2)),
                "11" => Ok(InputSymbol(3)),
                _ => Err(Error::Parse(format!("bad input symbol: {s}"))),
            }
        };
        let mut seen = [[false; 4]; 4];
        for line in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 2 + out1 * out2 {
                return Err(Error::Parse(format!(
                    "row needs {} fields, got {}",
                    2 + out1 * out2,
                    fields.len()
                )));
            }
            let x1 = parse_sym(fields[0])?;
            let x2 = parse_sym(fields[1])?;
            if seen[x1.index()][x2.index()] {
                return Err(Error::Parse(format!("duplicate row {x1} {x2}")));
            }
            seen[x1.index()][x2.index()] = true;
            for (k, f) in fields[2..].iter().enumerate() {
                let p: f64 = f
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad probability: {f}")))?;
                pmf[(x1.index() * NUM_INPUTS + x2.index()) * out1 * out2 + k] = p;
            }
        }
        if seen.iter().flatten().any(|&s| !s) {
            return Err(Error::Parse("missing input-pair rows".into()));
        }
        // 12-significant-digit serialization can leave rows off by more
        // than the construction tolerance; renormalize exactly after
        // checking the looser read tolerance.
        for row in pmf.chunks_mut(out1 * out2) {
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(Error::Parse(format!("row sums to {sum}, expected 1")));
            }
            row.iter_mut().for_each(|p| *p /= sum);
        }
        ChannelSpec::new(name, out1, out2, pmf, epsilon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sym(s: &str) -> InputSymbol {
        match s {
            "00" => InputSymbol::ALL[0],
            "01" => InputSymbol::ALL[1],
            "10" => InputSymbol::ALL[2],
            "11" => InputSymbol::ALL[3],
            _ => panic!("bad symbol"),
        }
    }

    #[test]
    fn channel_one_table_cells() {
        let ch = build_channel_one();
        // Sender 1 sends 01, Sender 2 sends 10: receiver 1 gets 1, receiver 2 gets 0.
        assert_eq!(ch.prob(sym("01"), sym("10"), 1, 0), 1.0);
        assert_eq!(ch.prob(sym("00"), sym("00"), 0, 0), 1.0);
        assert_eq!(ch.prob(sym("11"), sym("11"), 0, 0), 1.0);
    }

    #[test]
    fn channel_one_formula_matches_table() {
        // On every cell the receivers get the message bits when the padding
        // bits satisfy a xor b = m1 and m2, and both flipped otherwise.
        for x1 in InputSymbol::ALL {
            for x2 in InputSymbol::ALL {
                let (m1, a) = (x1.first_bit(), x1.second_bit());
                let (m2, b) = (x2.first_bit(), x2.second_bit());
                let err = ((a ^ b) != (m1 & m2)) as u8;
                assert_eq!(channel_one_output(x1, x2), (m1 ^ err, m2 ^ err));
            }
        }
    }

    #[test]
    fn channel_two_cells() {
        let ch = build_channel_two(0.3).unwrap();
        // Dead cell: always erased.
        assert_eq!(ch.prob(sym("00"), sym("01"), 2, 2), 1.0);
        // Live cell: output with probability eps, erased otherwise.
        assert!((ch.prob(sym("00"), sym("00"), 0, 0) - 0.3).abs() < 1e-15);
        assert!((ch.prob(sym("00"), sym("00"), 2, 2) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn channel_two_degenerate_epsilon_zero() {
        let ch = build_channel_two(0.0).unwrap();
        for x1 in InputSymbol::ALL {
            for x2 in InputSymbol::ALL {
                assert_eq!(ch.prob(x1, x2, 2, 2), 1.0);
            }
        }
    }

    #[test]
    fn channel_two_rejects_bad_epsilon() {
        assert!(build_channel_two(-0.1).is_err());
        assert!(build_channel_two(1.5).is_err());
        assert!(build_channel_two(f64::NAN).is_err());
    }

    #[test]
    fn sample_output_deterministic_cells() {
        let ch1 = build_channel_one();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..32 {
            let (y1, y2) = ch1.sample_output(sym("01"), sym("10"), &mut rng);
            assert_eq!((y1, y2), (OutputSymbol::One, OutputSymbol::Zero));
        }
        let ch2 = build_channel_two(1.0).unwrap();
        let (y1, y2) = ch2.sample_output(sym("11"), sym("10"), &mut rng);
        assert_eq!((y1, y2), (OutputSymbol::One, OutputSymbol::One));
    }

    #[test]
    fn sample_output_matches_declared_pmf() {
        let ch = build_channel_two(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 100_000;
        let mut hits = 0;
        for _ in 0..n {
            let (y1, y2) = ch.sample_output(sym("10"), sym("00"), &mut rng);
            if (y1, y2) == (OutputSymbol::One, OutputSymbol::Zero) {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.01, "got {frac}");
    }

    #[test]
    fn sample_output_chi_square_sanity() {
        // Chi-square against the declared cell pmf at desk scale: cell
        // (00,00) of the erasure channel has two outcomes (eps and 1-eps).
        let eps = 0.3;
        let ch = build_channel_two(eps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let n = 50_000u32;
        let mut live = 0u32;
        for _ in 0..n {
            let (y1, _) = ch.sample_output(sym("00"), sym("00"), &mut rng);
            if y1 == OutputSymbol::Zero {
                live += 1;
            }
        }
        let expected = [eps * n as f64, (1.0 - eps) * n as f64];
        let observed = [live as f64, (n - live) as f64];
        let chi2: f64 = observed
            .iter()
            .zip(expected.iter())
            .map(|(o, e)| (o - e) * (o - e) / e)
            .sum();
        // One degree of freedom; 10.83 is the p = 0.001 cutoff.
        assert!(chi2 < 10.83, "chi-square {chi2}");
    }

    #[test]
    fn pair_marginal_uniform_is_randomizing() {
        let ch = build_channel_one();
        let rows = ch.pair_marginal(&ProductDistribution::uniform(), Pair::First);
        for row in rows {
            assert!((row[0] - 0.5).abs() < 1e-15);
            assert!((row[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn pair_marginal_point_mass_is_deterministic() {
        let ch = build_channel_one();
        let dist = ProductDistribution::new(
            [0.25; 4],
            [1.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let rows = ch.pair_marginal(&dist, Pair::First);
        for x in InputSymbol::ALL {
            let (y1, _) = channel_one_output(x, sym("00"));
            assert_eq!(rows[x.index()][y1 as usize], 1.0);
        }
    }

    #[test]
    fn pair_marginal_channel_two_rows_sum_to_one() {
        // Channel II at eps=1 under a uniform co-sender: each row keeps the
        // first receiver's own message bit on the two live cells and erases
        // the rest, so p(y1 = m1 | x1) = 1/2 and p(E | x1) = 1/2.
        let ch = build_channel_two(1.0).unwrap();
        let rows = ch.pair_marginal(&ProductDistribution::uniform(), Pair::First);
        for x in InputSymbol::ALL {
            let m1 = x.first_bit() as usize;
            assert!((rows[x.index()][m1] - 0.5).abs() < 1e-12);
            assert!((rows[x.index()][1 - m1]).abs() < 1e-12);
            assert!((rows[x.index()][2] - 0.5).abs() < 1e-12);
            assert!((rows[x.index()].iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_examples() {
        assert!((entropy(&[0.5, 0.5], LogBase::Bits) - 1.0).abs() < 1e-15);
        assert_eq!(entropy(&[1.0, 0.0], LogBase::Bits), 0.0);
        let p = [3.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0, 3.0 / 16.0, 0.25];
        assert!((entropy(&p, LogBase::Nats) - 1.602055915459).abs() < 1e-9);
    }

    #[test]
    fn joint_rate_uniform_is_zero() {
        let ch = build_channel_one();
        let rr = ch.joint_rate(&ProductDistribution::uniform(), LogBase::Bits);
        assert!(rr.r1.abs() < 1e-12 && rr.r2.abs() < 1e-12);
    }

    #[test]
    fn joint_rate_one_pair_perfect() {
        let ch = build_channel_one();
        let dist = ProductDistribution::new(
            [0.5, 0.5, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
        )
        .unwrap();
        let rr = ch.joint_rate(&dist, LogBase::Bits);
        assert!((rr.r1 - 1.0).abs() < 1e-12);
        assert!(rr.r2.abs() < 1e-12);
        assert!((rr.sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn joint_rate_second_pair_locked_at_zero() {
        let ch = build_channel_one();
        for c in [0.0, 0.123, 0.5, 0.9, 1.0] {
            let dist = ProductDistribution::new(
                [0.5, 0.5, 0.0, 0.0],
                [c, 0.0, 1.0 - c, 0.0],
            )
            .unwrap();
            let rr = ch.joint_rate(&dist, LogBase::Bits);
            assert!(rr.r2.abs() < 1e-12, "c={c} gave r2={}", rr.r2);
        }
    }

    #[test]
    fn joint_rate_monotone_in_epsilon_on_live_support() {
        // Distributions supported on surviving cells only.
        let dists = [
            ProductDistribution::new([0.5, 0.0, 0.5, 0.0], [1.0, 0.0, 0.0, 0.0]).unwrap(),
            ProductDistribution::new([1.0, 0.0, 0.0, 0.0], [0.5, 0.0, 0.5, 0.0]).unwrap(),
            ProductDistribution::new([0.7, 0.0, 0.3, 0.0], [0.2, 0.0, 0.8, 0.0]).unwrap(),
        ];
        for dist in &dists {
            let mut prev = -1.0;
            for k in 0..=10 {
                let eps = k as f64 / 10.0;
                let ch = build_channel_two(eps).unwrap();
                let sum = ch.joint_rate(dist, LogBase::Bits).sum;
                assert!(sum >= prev - 1e-12, "eps={eps}: {sum} < {prev}");
                prev = sum;
            }
        }
    }

    #[test]
    fn rates_within_alphabet_budget() {
        let ch = build_channel_one();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let mut d1 = [0.0; 4];
            let mut d2 = [0.0; 4];
            for i in 0..4 {
                d1[i] = rng.gen::<f64>();
                d2[i] = rng.gen::<f64>();
            }
            let s1: f64 = d1.iter().sum();
            let s2: f64 = d2.iter().sum();
            d1.iter_mut().for_each(|v| *v /= s1);
            d2.iter_mut().for_each(|v| *v /= s2);
            let rr = ch
                .joint_rate(&ProductDistribution::new(d1, d2).unwrap(), LogBase::Bits);
            assert!(rr.r1 >= 0.0 && rr.r2 >= 0.0);
            assert!(rr.r1 <= 2.0 + 1e-12 && rr.r2 <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn text_format_round_trip() {
        for ch in [build_channel_one(), build_channel_two(0.37).unwrap()] {
            let text = ch.to_text();
            let back = ChannelSpec::from_text(&text).unwrap();
            assert_eq!(back.name(), ch.name());
            assert_eq!(back.output_sizes(), ch.output_sizes());
            for x1 in InputSymbol::ALL {
                for x2 in InputSymbol::ALL {
                    for y1 in 0..ch.output_sizes().0 {
                        for y2 in 0..ch.output_sizes().1 {
                            let a = ch.prob(x1, x2, y1, y2);
                            let b = back.prob(x1, x2, y1, y2);
                            assert!((a - b).abs() < 1e-11);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn text_format_rejects_malformed() {
        assert!(ChannelSpec::from_text("").is_err());
        assert!(ChannelSpec::from_text("name 4 4 2 2").is_err());
        let ch = build_channel_one();
        let mut text = ch.to_text();
        text = text.lines().take(10).collect::<Vec<_>>().join("\n");
        assert!(ChannelSpec::from_text(&text).is_err());
    }

    #[test]
    fn rejects_unnormalized_pmf() {
        let mut pmf = vec![0.0; 64];
        pmf[0] = 0.9;
        assert!(ChannelSpec::new("bad", 2, 2, pmf, None).is_err());
    }
}
