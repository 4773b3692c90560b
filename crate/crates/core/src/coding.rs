//! End-to-end Monte Carlo coding experiments.
//!
//! Each trial draws message bits, encodes them into channel inputs (via a
//! shared correlation box, one bit of sender communication, or a fixed
//! input distribution), pushes them through the channel, and decodes with
//! the per-receiver identity rule. Trials use independent seeded
//! substreams per fixed-size chunk, so the parallel and sequential drivers
//! produce identical statistics for the same seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::boxes::CorrelationBox;
use crate::channels::{
    ChannelSpec, InputSymbol, LogBase, OutputSymbol, ProductDistribution, RateReport,
};
use crate::error::{Error, Result};

/// Trials per RNG substream; chunk `i` always covers global trial indices
/// `[i*CHUNK, (i+1)*CHUNK)` regardless of the execution order.
const CHUNK: u64 = 4096;

/// How the two senders coordinate their channel inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum StrategyKind {
    /// Each sender concatenates its message bit with its box outcome.
    BoxAssisted(CorrelationBox),
    /// Sender 1 duplicates her bit; sender 2, told that bit, reproduces the
    /// box correlation deterministically.
    OneBitComm,
    /// No coordination: inputs drawn independently from a fixed product
    /// distribution, message = the input symbol itself.
    FixedDistribution(ProductDistribution),
}

/// How a receiver turns its channel symbol into a message estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decoder {
    /// Erasures count as decode errors (receivers must always answer).
    Identity,
    /// Erasures are tracked separately from wrong decodes.
    ErasureAware,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub kind: StrategyKind,
    pub decoder: Decoder,
}

impl Strategy {
    pub fn box_assisted(boxed: CorrelationBox) -> Self {
        Strategy {
            kind: StrategyKind::BoxAssisted(boxed),
            decoder: Decoder::ErasureAware,
        }
    }

    pub fn one_bit_comm() -> Self {
        Strategy {
            kind: StrategyKind::OneBitComm,
            decoder: Decoder::ErasureAware,
        }
    }

    pub fn fixed(dist: ProductDistribution) -> Self {
        Strategy {
            kind: StrategyKind::FixedDistribution(dist),
            decoder: Decoder::ErasureAware,
        }
    }

    /// Number of distinct message values per pair per use: 2 for bit
    /// messages, 4 when the "message" is the raw input symbol.
    pub fn message_arity(&self) -> usize {
        match self.kind {
            StrategyKind::FixedDistribution(_) => 4,
            _ => 2,
        }
    }
}

/// Message schedule across trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageSource {
    /// Fresh uniform bits per pair per use.
    UniformRandom,
    /// Cycles (0,0), (0,1), (1,0), (1,1) by trial index.
    ExhaustiveCycle,
}

/// One receiver's decode: the estimated bit, or an erasure mark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decoded {
    Bit(u8),
    Erased,
}

/// Identity decode per receiver; the erasure symbol maps to `Erased`.
pub fn decode(y1: OutputSymbol, y2: OutputSymbol) -> (Decoded, Decoded) {
    let one = |y: OutputSymbol| match y.bit() {
        Some(b) => Decoded::Bit(b),
        None => Decoded::Erased,
    };
    (one(y1), one(y2))
}

/// Aggregated outcome counts. Merges by summation, so shards can be
/// combined in any order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialStats {
    pub n: u64,
    /// Wrong (non-erased) decodes per pair; under `Decoder::Identity`
    /// erasures are counted here as well.
    pub errors: [u64; 2],
    /// Erased receptions per pair (zero under `Decoder::Identity`).
    pub erasures: [u64; 2],
    /// Empirical joint counts `joint[pair][message][received]`, with
    /// received index 2 standing for the erasure mark.
    pub joint: [[[u64; 3]; 4]; 2],
    /// Message values per pair (2 or 4), fixed by the strategy.
    pub message_arity: usize,
}

impl TrialStats {
    fn zero(message_arity: usize) -> Self {
        TrialStats {
            n: 0,
            errors: [0; 2],
            erasures: [0; 2],
            joint: [[[0; 3]; 4]; 2],
            message_arity,
        }
    }

    pub fn merge(mut self, other: &TrialStats) -> Result<TrialStats> {
        if self.message_arity != other.message_arity {
            return Err(Error::StatsArityMismatch(
                self.message_arity,
                other.message_arity,
            ));
        }
        self.n += other.n;
        for p in 0..2 {
            self.errors[p] += other.errors[p];
            self.erasures[p] += other.erasures[p];
            for m in 0..4 {
                for y in 0..3 {
                    self.joint[p][m][y] += other.joint[p][m][y];
                }
            }
        }
        Ok(self)
    }

    pub fn error_fraction(&self, pair: usize) -> f64 {
        self.errors[pair] as f64 / self.n as f64
    }

    pub fn erasure_fraction(&self, pair: usize) -> f64 {
        self.erasures[pair] as f64 / self.n as f64
    }
}

/// Box-assisted encoding: sample `(a, b)` from the box with the message
/// bits as inputs, then send `X1 = m1 a` and `X2 = m2 b`.
pub fn encode_box(
    m1: u8,
    m2: u8,
    boxed: &CorrelationBox,
    rng: &mut impl Rng,
) -> (InputSymbol, InputSymbol) {
    let (a, b) = boxed.sample(m1, m2, rng);
    (
        InputSymbol::from_bits(m1, a),
        InputSymbol::from_bits(m2, b),
    )
}

/// One-bit-communication encoding: sender 1 duplicates her bit; sender 2,
/// knowing `m1`, pads with `b = (m1 and m2) xor m1` so that the padding
/// bits satisfy `a xor b = m1 and m2` deterministically.
pub fn encode_one_bit_comm(m1: u8, m2: u8) -> (InputSymbol, InputSymbol) {
    let b = (m1 & m2) ^ m1;
    (
        InputSymbol::from_bits(m1, m1),
        InputSymbol::from_bits(m2, b),
    )
}

fn sample_from(dist: &[f64; 4], rng: &mut impl Rng) -> InputSymbol {
    let mut u: f64 = rng.gen();
    let mut last = InputSymbol::ALL[3];
    for sym in InputSymbol::ALL {
        let p = dist[sym.index()];
        if u < p {
            return sym;
        }
        u -= p;
        if p > 0.0 {
            last = sym;
        }
    }
    last
}

fn run_chunk(
    spec: &ChannelSpec,
    strategy: &Strategy,
    source: MessageSource,
    start: u64,
    end: u64,
    seed: u64,
    chunk_index: u64,
) -> TrialStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk_index);
    let mut stats = TrialStats::zero(strategy.message_arity());
    for t in start..end {
        let (m1, m2) = match source {
            MessageSource::UniformRandom => (rng.gen_range(0..2u8), rng.gen_range(0..2u8)),
            MessageSource::ExhaustiveCycle => (((t >> 1) & 1) as u8, (t & 1) as u8),
        };
        let (x1, x2, msg) = match &strategy.kind {
            StrategyKind::BoxAssisted(boxed) => {
                let (x1, x2) = encode_box(m1, m2, boxed, &mut rng);
                (x1, x2, [m1 as usize, m2 as usize])
            }
            StrategyKind::OneBitComm => {
                let (x1, x2) = encode_one_bit_comm(m1, m2);
                (x1, x2, [m1 as usize, m2 as usize])
            }
            StrategyKind::FixedDistribution(dist) => {
                let x1 = sample_from(dist.d1(), &mut rng);
                let x2 = sample_from(dist.d2(), &mut rng);
                (x1, x2, [x1.index(), x2.index()])
            }
        };
        let (y1, y2) = spec.sample_output(x1, x2, &mut rng);
        let decoded = decode(y1, y2);
        stats.n += 1;
        for (pair, (dec, y)) in [(decoded.0, y1), (decoded.1, y2)].into_iter().enumerate() {
            stats.joint[pair][msg[pair]][y.index()] += 1;
            match dec {
                Decoded::Bit(bit) => {
                    // Wrong decodes only make sense against bit messages.
                    if strategy.message_arity() == 2 && bit as usize != msg[pair] {
                        stats.errors[pair] += 1;
                    }
                }
                Decoded::Erased => match strategy.decoder {
                    Decoder::ErasureAware => stats.erasures[pair] += 1,
                    Decoder::Identity => stats.errors[pair] += 1,
                },
            }
        }
    }
    stats
}

/// Simulates `n` channel uses. Results are identical for the sequential
/// and parallel drivers given the same seed.
pub fn run_trials(
    spec: &ChannelSpec,
    strategy: &Strategy,
    source: MessageSource,
    n: u64,
    seed: u64,
) -> Result<TrialStats> {
    #[cfg(feature = "parallel")]
    {
        run_trials_par(spec, strategy, source, n, seed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_seq(spec, strategy, source, n, seed)
    }
}

/// Single-threaded driver.
pub fn run_trials_seq(
    spec: &ChannelSpec,
    strategy: &Strategy,
    source: MessageSource,
    n: u64,
    seed: u64,
) -> Result<TrialStats> {
    if n == 0 {
        return Err(Error::EmptyRun);
    }
    let mut stats = TrialStats::zero(strategy.message_arity());
    let chunks = n.div_ceil(CHUNK);
    for c in 0..chunks {
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        let part = run_chunk(spec, strategy, source, start, end, seed, c);
        stats = stats.merge(&part)?;
    }
    Ok(stats)
}

/// Work-sharded driver; chunks are independent substreams merged by
/// summation.
#[cfg(feature = "parallel")]
pub fn run_trials_par(
    spec: &ChannelSpec,
    strategy: &Strategy,
    source: MessageSource,
    n: u64,
    seed: u64,
) -> Result<TrialStats> {
    if n == 0 {
        return Err(Error::EmptyRun);
    }
    let chunks = n.div_ceil(CHUNK);
    Ok((0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(n);
            run_chunk(spec, strategy, source, start, end, seed, c)
        })
        .reduce(
            || TrialStats::zero(strategy.message_arity()),
            |acc, part| acc.merge(&part).expect("chunks share one strategy"),
        ))
}

/// Rate accounting model for `empirical_rate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RateModel {
    /// Per pair: 1 − (empirical erasure fraction), valid only when no
    /// non-erased decode errors occurred.
    ErasureChannel,
    /// Mutual information of the empirical (message, received) joint.
    PlugInMi,
}

/// Converts trial statistics into an empirical rate report.
pub fn empirical_rate(
    stats: &TrialStats,
    model: RateModel,
    log_base: LogBase,
) -> Result<RateReport> {
    match model {
        RateModel::ErasureChannel => {
            if stats.message_arity != 2 {
                return Err(Error::RateModelMismatch {
                    arity: stats.message_arity,
                });
            }
            let total_errors = stats.errors[0] + stats.errors[1];
            if total_errors > 0 {
                return Err(Error::NonErasedErrors {
                    errors: total_errors,
                    n: stats.n,
                });
            }
            let r1 = log_base.from_bits(1.0 - stats.erasure_fraction(0));
            let r2 = log_base.from_bits(1.0 - stats.erasure_fraction(1));
            Ok(RateReport::new(r1, r2, log_base))
        }
        RateModel::PlugInMi => {
            let mut rates = [0.0; 2];
            for pair in 0..2 {
                rates[pair] = plug_in_mi_nats(&stats.joint[pair], stats.n);
            }
            Ok(RateReport::new(
                log_base.from_nats(rates[0]),
                log_base.from_nats(rates[1]),
                log_base,
            ))
        }
    }
}

fn plug_in_mi_nats(joint: &[[u64; 3]; 4], n: u64) -> f64 {
    let n = n as f64;
    let mut mi = 0.0;
    let mut row = [0.0f64; 4];
    let mut col = [0.0f64; 3];
    for (m, cells) in joint.iter().enumerate() {
        for (y, &count) in cells.iter().enumerate() {
            let q = count as f64 / n;
            row[m] += q;
            col[y] += q;
        }
    }
    for (m, cells) in joint.iter().enumerate() {
        for (y, &count) in cells.iter().enumerate() {
            if count == 0 {
                continue;
            }
            let q = count as f64 / n;
            mi += q * (q / (row[m] * col[y])).ln();
        }
    }
    mi.max(0.0)
}

// ── Transcripts ──────────────────────────────────────────────────────────

/// One fully-expanded trial, for CSV dumps and debugging.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub m1: u8,
    pub m2: u8,
    /// Box outcomes; absent for fixed-distribution strategies.
    pub a: Option<u8>,
    pub b: Option<u8>,
    pub x1: InputSymbol,
    pub x2: InputSymbol,
    pub y1: OutputSymbol,
    pub y2: OutputSymbol,
    pub mhat1: Decoded,
    pub mhat2: Decoded,
}

pub const TRANSCRIPT_HEADER: &str = "trial,m1,m2,a,b,x1,x2,y1,y2,mhat1,mhat2";

impl TrialRecord {
    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<u8>| v.map(|b| b.to_string()).unwrap_or_else(|| "-".into());
        let dec = |d: Decoded| match d {
            Decoded::Bit(b) => b.to_string(),
            Decoded::Erased => "E".into(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.trial,
            self.m1,
            self.m2,
            opt(self.a),
            opt(self.b),
            self.x1,
            self.x2,
            self.y1,
            self.y2,
            dec(self.mhat1),
            dec(self.mhat2)
        )
    }
}

/// Sequentially replays `n` trials and returns the full transcript. Uses
/// the same chunked substreams as `run_trials`, so transcripts match the
/// statistics produced for the same seed.
pub fn run_transcript(
    spec: &ChannelSpec,
    strategy: &Strategy,
    source: MessageSource,
    n: u64,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    if n == 0 {
        return Err(Error::EmptyRun);
    }
    let mut records = Vec::with_capacity(n as usize);
    let chunks = n.div_ceil(CHUNK);
    for c in 0..chunks {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let start = c * CHUNK;
        let end = (start + CHUNK).min(n);
        for t in start..end {
            let (m1, m2) = match source {
                MessageSource::UniformRandom => {
                    (rng.gen_range(0..2u8), rng.gen_range(0..2u8))
                }
                MessageSource::ExhaustiveCycle => (((t >> 1) & 1) as u8, (t & 1) as u8),
            };
            let (x1, x2, ab) = match &strategy.kind {
                StrategyKind::BoxAssisted(boxed) => {
                    let (a, b) = boxed.sample(m1, m2, &mut rng);
                    (
                        InputSymbol::from_bits(m1, a),
                        InputSymbol::from_bits(m2, b),
                        (Some(a), Some(b)),
                    )
                }
                StrategyKind::OneBitComm => {
                    let (x1, x2) = encode_one_bit_comm(m1, m2);
                    (x1, x2, (Some(x1.second_bit()), Some(x2.second_bit())))
                }
                StrategyKind::FixedDistribution(dist) => {
                    let x1 = sample_from(dist.d1(), &mut rng);
                    let x2 = sample_from(dist.d2(), &mut rng);
                    (x1, x2, (None, None))
                }
            };
            let (y1, y2) = spec.sample_output(x1, x2, &mut rng);
            let (mhat1, mhat2) = decode(y1, y2);
            records.push(TrialRecord {
                trial: t,
                m1,
                m2,
                a: ab.0,
                b: ab.1,
                x1,
                x2,
                y1,
                y2,
                mhat1,
                mhat2,
            });
        }
    }
    Ok(records)
}
