//! The six subcommands, each returning an [`Envelope`] over a serializable
//! result type.

use serde::Serialize;
use serde_json::json;

use nlchan::bounds::{
    classical_bound_channel_two, quantum_bound_channel_two, quantum_win_probability,
};
use nlchan::boxes::{
    best_deterministic_win, chsh_value, chsh_win_probability, pr_box, tsirelson_box,
    CorrelationBox,
};
use nlchan::channels::{
    build_channel_one, build_channel_two, ChannelSpec, LogBase, ProductDistribution,
};
use nlchan::coding::{
    empirical_rate, run_transcript, run_trials, MessageSource, RateModel, Strategy,
    TRANSCRIPT_HEADER,
};
use nlchan::optimizer::{multi_restart_with_rates, OptimizerConfig};
use nlchan::povm::{
    classical_replication, outcome_probability, outcome_probability_matrix,
    random_rank_one_povm, random_shared_state, tsirelson_measurement_povms, PovmElement,
    ProjectorAngles, SharedState,
};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::*;
use crate::reports::{csv_row, Envelope, Render};
use crate::CliError;

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn resolve_seed(common: &CommonArgs) -> Result<u64, CliError> {
    match (common.seed, common.output) {
        (Some(s), _) => Ok(s),
        (None, OutputArg::Human) => Ok(0),
        (None, _) => Err(CliError::Config(
            "--seed is required for json/csv output".into(),
        )),
    }
}

fn build_channel(channel: ChannelArg, epsilon: Option<f64>) -> Result<ChannelSpec, CliError> {
    match (channel, epsilon) {
        (ChannelArg::One, None) => Ok(build_channel_one()),
        (ChannelArg::One, Some(_)) => Err(CliError::Config(
            "--epsilon applies only to --channel two".into(),
        )),
        (ChannelArg::Two, Some(eps)) => {
            build_channel_two(eps).map_err(|e| CliError::Config(e.to_string()))
        }
        (ChannelArg::Two, None) => Err(CliError::Config(
            "--channel two requires --epsilon".into(),
        )),
    }
}

// ── simulate ─────────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct SimulateResults {
    pub channel: String,
    pub epsilon: Option<f64>,
    pub resource: String,
    pub trials: u64,
    pub rate_model: String,
    pub error_fraction: [f64; 2],
    pub erasure_fraction: [f64; 2],
    pub r1: f64,
    pub r2: f64,
    pub sum: f64,
    pub log_base: String,
}

impl Render for SimulateResults {
    fn human(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "channel {}  resource {}  trials {}\n",
            self.channel, self.resource, self.trials
        ));
        if let Some(eps) = self.epsilon {
            s.push_str(&format!("epsilon {eps}\n"));
        }
        s.push_str(&format!(
            "pair 1: errors {:.6}  erasures {:.6}  rate {:.6} {}\n",
            self.error_fraction[0], self.erasure_fraction[0], self.r1, self.log_base
        ));
        s.push_str(&format!(
            "pair 2: errors {:.6}  erasures {:.6}  rate {:.6} {}\n",
            self.error_fraction[1], self.erasure_fraction[1], self.r2, self.log_base
        ));
        s.push_str(&format!(
            "sum rate: {:.6} {} ({} accounting)\n",
            self.sum, self.log_base, self.rate_model
        ));
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_row(&[
            "channel".into(),
            "epsilon".into(),
            "resource".into(),
            "trials".into(),
            "err1".into(),
            "err2".into(),
            "erase1".into(),
            "erase2".into(),
            "r1".into(),
            "r2".into(),
            "sum".into(),
            "log_base".into(),
        ]);
        s.push_str(&csv_row(&[
            self.channel.clone(),
            self.epsilon.map(fmt).unwrap_or_else(|| "-".into()),
            self.resource.clone(),
            self.trials.to_string(),
            fmt(self.error_fraction[0]),
            fmt(self.error_fraction[1]),
            fmt(self.erasure_fraction[0]),
            fmt(self.erasure_fraction[1]),
            fmt(self.r1),
            fmt(self.r2),
            fmt(self.sum),
            self.log_base.clone(),
        ]));
        s
    }
}

fn resource_label(resource: ResourceArg) -> &'static str {
    match resource {
        ResourceArg::Classical => "classical",
        ResourceArg::Quantum => "quantum",
        ResourceArg::Pr => "pr",
        ResourceArg::OneBitComm => "one-bit-comm",
    }
}

pub fn run_simulate(args: &SimulateArgs) -> Result<Envelope<SimulateResults>, CliError> {
    let seed = resolve_seed(&args.common)?;
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let spec = build_channel(args.channel, args.epsilon)?;
    let (strategy, model) = match args.resource {
        ResourceArg::Pr => (Strategy::box_assisted(pr_box()), RateModel::ErasureChannel),
        ResourceArg::Quantum => (
            Strategy::box_assisted(tsirelson_box()),
            RateModel::ErasureChannel,
        ),
        ResourceArg::OneBitComm => (Strategy::one_bit_comm(), RateModel::ErasureChannel),
        ResourceArg::Classical => (
            Strategy::fixed(ProductDistribution::uniform()),
            RateModel::PlugInMi,
        ),
    };
    let log_base: LogBase = args.common.log_base.into();
    let stats = run_trials(&spec, &strategy, MessageSource::UniformRandom, args.trials, seed)
        .map_err(|e| CliError::Config(e.to_string()))?;

    if args.resource != ResourceArg::Classical && stats.errors != [0, 0] {
        return Err(CliError::Invariant(format!(
            "the {} strategy produced {} non-erased decode errors over {} trials",
            resource_label(args.resource),
            stats.errors[0] + stats.errors[1],
            stats.n
        )));
    }

    if let Some(path) = &args.transcript {
        let records =
            run_transcript(&spec, &strategy, MessageSource::UniformRandom, args.trials, seed)
                .map_err(|e| CliError::Config(e.to_string()))?;
        let mut text = String::with_capacity(records.len() * 32);
        text.push_str(TRANSCRIPT_HEADER);
        text.push('\n');
        for r in &records {
            text.push_str(&r.to_csv_row());
            text.push('\n');
        }
        std::fs::write(path, text).map_err(CliError::Io)?;
    }

    let rate = empirical_rate(&stats, model, log_base)
        .map_err(|e| CliError::Invariant(e.to_string()))?;
    let results = SimulateResults {
        channel: spec.name().to_string(),
        epsilon: spec.epsilon(),
        resource: resource_label(args.resource).to_string(),
        trials: args.trials,
        rate_model: match model {
            RateModel::ErasureChannel => "erasure-channel".into(),
            RateModel::PlugInMi => "plug-in-mi".into(),
        },
        error_fraction: [stats.error_fraction(0), stats.error_fraction(1)],
        erasure_fraction: [stats.erasure_fraction(0), stats.erasure_fraction(1)],
        r1: rate.r1,
        r2: rate.r2,
        sum: rate.sum,
        log_base: log_base.to_string(),
    };
    let config = json!({
        "channel": results.channel,
        "epsilon": results.epsilon,
        "resource": results.resource,
        "trials": args.trials,
        "log_base": results.log_base,
    });
    Ok(Envelope::new("simulate", seed, config, results))
}

// ── optimize ─────────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Serialize)]
pub struct OptimizeResults {
    pub channel: String,
    pub epsilon: Option<f64>,
    pub restarts: usize,
    pub tol: f64,
    pub maxiter: usize,
    pub best_sum_rate_bits: f64,
    pub converged: bool,
    pub total_iterations: usize,
    /// Index of the winning restart; its start is reproducible by drawing
    /// from RNG stream `best_restart` of the seed.
    pub best_restart: usize,
    pub best_x1: [f64; 4],
    pub best_x2: [f64; 4],
    pub best_d1: [f64; 4],
    pub best_d2: [f64; 4],
    pub histogram: Vec<HistogramBin>,
}

impl Render for OptimizeResults {
    fn human(&self) -> String {
        let mut s = format!(
            "channel {}  restarts {}  tol {}  maxiter {}\n\
             best sum rate: {:.6} bits (converged: {}, total iterations {}, \
             best restart {})\n\
             best d1: [{:.6}, {:.6}, {:.6}, {:.6}]\n\
             best d2: [{:.6}, {:.6}, {:.6}, {:.6}]\nrestart histogram:\n",
            self.channel,
            self.restarts,
            self.tol,
            self.maxiter,
            self.best_sum_rate_bits,
            self.converged,
            self.total_iterations,
            self.best_restart,
            self.best_d1[0],
            self.best_d1[1],
            self.best_d1[2],
            self.best_d1[3],
            self.best_d2[0],
            self.best_d2[1],
            self.best_d2[2],
            self.best_d2[3],
        );
        for bin in &self.histogram {
            s.push_str(&format!(
                "  [{:.3}, {:.3})  {:>6}\n",
                bin.lo, bin.hi, bin.count
            ));
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_row(&[
            "bin_lo".into(),
            "bin_hi".into(),
            "count".into(),
            "best_sum_rate_bits".into(),
        ]);
        for bin in &self.histogram {
            s.push_str(&csv_row(&[
                fmt(bin.lo),
                fmt(bin.hi),
                bin.count.to_string(),
                fmt(self.best_sum_rate_bits),
            ]));
        }
        s
    }
}

pub fn run_optimize(args: &OptimizeArgs) -> Result<Envelope<OptimizeResults>, CliError> {
    let seed = resolve_seed(&args.common)?;
    let spec = build_channel(args.channel, args.epsilon)?;
    let cfg = OptimizerConfig {
        restarts: args.restarts,
        tol: args.tol,
        maxiter: args.maxiter,
        ..OptimizerConfig::default()
    };
    let (best, rates) = multi_restart_with_rates(&spec, &cfg, seed)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let bin_width = 0.05;
    let mut counts = vec![0usize; (2.0 / bin_width) as usize + 1];
    for r in &rates {
        let idx = ((r / bin_width).floor() as usize).min(counts.len() - 1);
        counts[idx] += 1;
    }
    let histogram: Vec<HistogramBin> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &count)| HistogramBin {
            lo: i as f64 * bin_width,
            hi: (i + 1) as f64 * bin_width,
            count,
        })
        .collect();
    let best_restart = rates
        .iter()
        .position(|&r| r == best.best_sum_rate)
        .unwrap_or(0);
    let results = OptimizeResults {
        channel: spec.name().to_string(),
        epsilon: spec.epsilon(),
        restarts: args.restarts,
        tol: args.tol,
        maxiter: args.maxiter,
        best_sum_rate_bits: best.best_sum_rate,
        converged: best.converged,
        total_iterations: best.iterations,
        best_restart,
        best_x1: *best.best_vectors.0.entries(),
        best_x2: *best.best_vectors.1.entries(),
        best_d1: best.best_vectors.0.squared(),
        best_d2: best.best_vectors.1.squared(),
        histogram,
    };
    let config = json!({
        "channel": results.channel,
        "epsilon": results.epsilon,
        "restarts": args.restarts,
        "tol": args.tol,
        "maxiter": args.maxiter,
    });
    Ok(Envelope::new("optimize", seed, config, results))
}

// ── bounds ───────────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct BoundsRow {
    pub epsilon: f64,
    /// Closed-form classical bound in the chosen base, plus both bases
    /// explicitly (its usual quotation mixes them).
    pub classical_bound: f64,
    pub classical_bound_bits: f64,
    pub classical_bound_nats: f64,
    /// Entanglement-achievable rate 2 cos^2(pi/8) eps.
    pub quantum_lower: f64,
    pub quantum_upper: f64,
    pub super_quantum: f64,
}

#[derive(Debug, Serialize)]
pub struct BoundsResults {
    pub log_base: String,
    pub rows: Vec<BoundsRow>,
}

impl Render for BoundsResults {
    fn human(&self) -> String {
        let mut s = format!(
            "{:>8}  {:>14}  {:>14}  {:>14}  {:>14}  {:>14}  (rates in {})\n",
            "epsilon",
            "classical",
            "classical_bits",
            "quantum_low",
            "quantum_up",
            "super_quantum",
            self.log_base
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:>8.4}  {:>14.6}  {:>14.6}  {:>14.6}  {:>14.6}  {:>14.6}\n",
                r.epsilon,
                r.classical_bound,
                r.classical_bound_bits,
                r.quantum_lower,
                r.quantum_upper,
                r.super_quantum
            ));
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_row(&[
            "epsilon".into(),
            "classical_bound".into(),
            "classical_bound_bits".into(),
            "classical_bound_nats".into(),
            "quantum_lower".into(),
            "quantum_upper".into(),
            "super_quantum".into(),
            "log_base".into(),
        ]);
        for r in &self.rows {
            s.push_str(&csv_row(&[
                fmt(r.epsilon),
                fmt(r.classical_bound),
                fmt(r.classical_bound_bits),
                fmt(r.classical_bound_nats),
                fmt(r.quantum_lower),
                fmt(r.quantum_upper),
                fmt(r.super_quantum),
                self.log_base.clone(),
            ]));
        }
        s
    }
}

pub fn run_bounds(args: &BoundsArgs) -> Result<Envelope<BoundsResults>, CliError> {
    let seed = resolve_seed(&args.common)?;
    let base: LogBase = args.common.log_base.into();
    let mut rows = Vec::new();
    for &eps in &args.epsilons {
        let classical = classical_bound_channel_two(eps, base)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let quantum_upper = quantum_bound_channel_two(eps, base).expect("validated above");
        rows.push(BoundsRow {
            epsilon: eps,
            classical_bound: classical,
            classical_bound_bits: classical_bound_channel_two(eps, LogBase::Bits).unwrap(),
            classical_bound_nats: classical_bound_channel_two(eps, LogBase::Nats).unwrap(),
            quantum_lower: base.from_bits(2.0 * quantum_win_probability() * eps),
            quantum_upper,
            super_quantum: base.from_bits(2.0 * eps),
        });
    }
    let results = BoundsResults {
        log_base: base.to_string(),
        rows,
    };
    let config = json!({
        "epsilons": args.epsilons,
        "log_base": results.log_base,
    });
    Ok(Envelope::new("bounds", seed, config, results))
}

// ── chsh ─────────────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct ChshRow {
    pub resource: String,
    pub win_analytic: f64,
    pub chsh_value: f64,
    pub win_sampled: f64,
}

#[derive(Debug, Serialize)]
pub struct ChshResults {
    pub trials: u64,
    pub rows: Vec<ChshRow>,
}

impl Render for ChshResults {
    fn human(&self) -> String {
        let mut s = format!(
            "{:>18}  {:>12}  {:>12}  {:>12}   ({} samples per row)\n",
            "resource", "win", "chsh_value", "win_sampled", self.trials
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:>18}  {:>12.6}  {:>12.6}  {:>12.6}\n",
                r.resource, r.win_analytic, r.chsh_value, r.win_sampled
            ));
        }
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_row(&[
            "resource".into(),
            "win_analytic".into(),
            "chsh_value".into(),
            "win_sampled".into(),
            "trials".into(),
        ]);
        for r in &self.rows {
            s.push_str(&csv_row(&[
                r.resource.clone(),
                fmt(r.win_analytic),
                fmt(r.chsh_value),
                fmt(r.win_sampled),
                self.trials.to_string(),
            ]));
        }
        s
    }
}

fn sampled_win(boxed: &CorrelationBox, trials: u64, rng: &mut ChaCha8Rng) -> f64 {
    let mut wins = 0u64;
    for _ in 0..trials {
        let x = rng.gen_range(0..2u8);
        let y = rng.gen_range(0..2u8);
        let (a, b) = boxed.sample(x, y, rng);
        if a ^ b == x & y {
            wins += 1;
        }
    }
    wins as f64 / trials as f64
}

pub fn run_chsh(args: &ChshArgs) -> Result<Envelope<ChshResults>, CliError> {
    let seed = resolve_seed(&args.common)?;
    if args.trials == 0 {
        return Err(CliError::Config("--trials must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (det_win, det_strategy) = best_deterministic_win();
    let det_box = nlchan::boxes::deterministic_box(&det_strategy);
    let boxes = [
        ("deterministic-best", det_box),
        ("quantum", tsirelson_box()),
        ("pr", pr_box()),
    ];
    let mut rows = Vec::new();
    for (name, boxed) in &boxes {
        rows.push(ChshRow {
            resource: name.to_string(),
            win_analytic: if *name == "deterministic-best" {
                det_win
            } else {
                chsh_win_probability(boxed)
            },
            chsh_value: chsh_value(boxed),
            win_sampled: sampled_win(boxed, args.trials, &mut rng),
        });
    }
    let results = ChshResults {
        trials: args.trials,
        rows,
    };
    let config = json!({ "trials": args.trials });
    Ok(Envelope::new("chsh", seed, config, results))
}

// ── povm-check ───────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
}

#[derive(Debug, Serialize)]
pub struct PovmCheckResults {
    pub instances: u64,
    pub suites: Vec<SuiteResult>,
    pub all_passed: bool,
}

impl Render for PovmCheckResults {
    fn human(&self) -> String {
        let mut s = format!("{:>34}  {:>10}  {:>10}\n", "suite", "checked", "failures");
        for r in &self.suites {
            s.push_str(&format!(
                "{:>34}  {:>10}  {:>10}\n",
                r.name, r.checked, r.failures
            ));
        }
        s.push_str(if self.all_passed { "all passed\n" } else { "FAILURES\n" });
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_row(&["suite".into(), "checked".into(), "failures".into()]);
        for r in &self.suites {
            s.push_str(&csv_row(&[
                r.name.clone(),
                r.checked.to_string(),
                r.failures.to_string(),
            ]));
        }
        s
    }
}

pub fn run_povm_check(args: &PovmCheckArgs) -> Result<Envelope<PovmCheckResults>, CliError> {
    let seed = resolve_seed(&args.common)?;
    if args.instances == 0 {
        return Err(CliError::Config("--instances must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut suites = Vec::new();

    // Closed form vs bilinear matrix form.
    let mut failures = 0;
    for _ in 0..args.instances {
        let state = random_shared_state(&mut rng);
        let p1 = random_rank_one_povm(&mut rng, 2);
        let p2 = random_rank_one_povm(&mut rng, 2);
        let e1 = p1.elements()[0];
        let e2 = p2.elements()[0];
        let a = outcome_probability(&state, &e1, &e2);
        let b = outcome_probability_matrix(&state, &e1, &e2);
        if (a - b).abs() > 1e-10 {
            failures += 1;
        }
    }
    suites.push(SuiteResult {
        name: "formula-vs-matrix".into(),
        checked: args.instances,
        failures,
    });

    // Probabilities over all element pairs sum to 1; replication returns a
    // strictly positive pair.
    let mut sum_failures = 0;
    let mut rep_failures = 0;
    for _ in 0..args.instances {
        let state = random_shared_state(&mut rng);
        let povms_1 = [
            random_rank_one_povm(&mut rng, 2),
            random_rank_one_povm(&mut rng, 2),
        ];
        let povms_2 = [
            random_rank_one_povm(&mut rng, 2),
            random_rank_one_povm(&mut rng, 2),
        ];
        let m1 = rng.gen_range(0..2u8);
        let m2 = rng.gen_range(0..2u8);
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
        if (total - 1.0).abs() > 1e-9 {
            sum_failures += 1;
        }
        let (i, j) = classical_replication(m1, m2, &povms_1, &povms_2, &state);
        let p = outcome_probability(
            &state,
            &povms_1[m1 as usize].elements()[i],
            &povms_2[m2 as usize].elements()[j],
        );
        if p <= 1e-12 {
            rep_failures += 1;
        }
    }
    suites.push(SuiteResult {
        name: "pair-probabilities-sum-to-1".into(),
        checked: args.instances,
        failures: sum_failures,
    });
    suites.push(SuiteResult {
        name: "replication-positive".into(),
        checked: args.instances,
        failures: rep_failures,
    });

    // Constructed zero cases vanish.
    let mut zero_failures = 0;
    let zero_cases = args.instances.min(1000);
    for _ in 0..zero_cases {
        let state = random_shared_state(&mut rng);
        // a = b with phases summing to pi.
        let theta = (state.alpha() / state.beta()).sqrt().atan();
        let phi: f64 = rng.gen_range(0.0..std::f64::consts::PI);
        let e1 = PovmElement {
            weight: 1.0,
            angles: ProjectorAngles { theta, phi },
        };
        let e2 = PovmElement {
            weight: 1.0,
            angles: ProjectorAngles {
                theta,
                phi: std::f64::consts::PI - phi,
            },
        };
        if outcome_probability(&state, &e1, &e2).abs() > 1e-12 {
            zero_failures += 1;
        }
        // Theta-degenerate pair.
        let z0 = PovmElement {
            weight: 1.0,
            angles: ProjectorAngles { theta: 0.0, phi: 0.0 },
        };
        let z1 = PovmElement {
            weight: 1.0,
            angles: ProjectorAngles {
                theta: std::f64::consts::FRAC_PI_2,
                phi: 0.0,
            },
        };
        if outcome_probability(&state, &z0, &z1).abs() > 1e-12 {
            zero_failures += 1;
        }
    }
    suites.push(SuiteResult {
        name: "constructed-zeros-vanish".into(),
        checked: 2 * zero_cases,
        failures: zero_failures,
    });

    // The optimal measurement pair wins the game at the quantum value.
    let (s1, s2) = tsirelson_measurement_povms();
    let state = SharedState::maximally_entangled();
    let target = quantum_win_probability();
    let mut win_failures = 0;
    for x in 0..2usize {
        for y in 0..2usize {
            let mut win = 0.0;
            for (i, e1) in s1[x].elements().iter().enumerate() {
                for (j, e2) in s2[y].elements().iter().enumerate() {
                    if (i ^ j) as u8 == (x & y) as u8 {
                        win += outcome_probability(&state, e1, e2);
                    }
                }
            }
            if (win - target).abs() > 1e-12 {
                win_failures += 1;
            }
        }
    }
    suites.push(SuiteResult {
        name: "optimal-measurements-hit-quantum-win".into(),
        checked: 4,
        failures: win_failures,
    });

    let all_passed = suites.iter().all(|s| s.failures == 0);
    let results = PovmCheckResults {
        instances: args.instances,
        suites,
        all_passed,
    };
    let config = json!({ "instances": args.instances });
    let envelope = Envelope::new("povm-check", seed, config, results);
    if envelope.results.all_passed {
        Ok(envelope)
    } else {
        Err(CliError::Invariant(format!(
            "measurement property suites reported failures:\n{}",
            envelope.results.human()
        )))
    }
}

// ── separations ──────────────────────────────────────────────────────────

#[derive(Debug, Serialize)]
pub struct SeparationRow {
    pub epsilon: f64,
    /// Empirical classical maximum from the restart search, in bits.
    pub optimizer_classical_max_bits: f64,
    pub classical_bound_bits: f64,
    pub classical_bound_nats: f64,
    /// Entanglement-achievable rate 2 cos^2(pi/8) eps, bits.
    pub quantum_rate_bits: f64,
    pub quantum_upper_bound_bits: f64,
    /// PR-box rate 2 eps, bits.
    pub super_quantum_rate_bits: f64,
    /// True when the optimizer's empirical classical maximum sits below
    /// the quantum rate.
    pub classical_lt_quantum_certified: bool,
    /// Whether the closed-form classical bound alone would certify the
    /// same inequality in bits (it does not; see the note).
    pub classical_bound_certifies: bool,
    pub quantum_lt_super_quantum_certified: bool,
}

#[derive(Debug, Serialize)]
pub struct SeparationsResults {
    pub restarts: usize,
    pub note: String,
    pub rows: Vec<SeparationRow>,
}

impl Render for SeparationsResults {
    fn human(&self) -> String {
        let mut s = format!(
            "{:>8}  {:>12}  {:>12}  {:>12}  {:>12}  {:>12}  {:>10}  {:>10}\n",
            "epsilon",
            "opt_max",
            "cls_bound_b",
            "quantum",
            "quantum_up",
            "super_q",
            "cls<q",
            "q<super"
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:>8.4}  {:>12.6}  {:>12.6}  {:>12.6}  {:>12.6}  {:>12.6}  {:>10}  {:>10}\n",
                r.epsilon,
                r.optimizer_classical_max_bits,
                r.classical_bound_bits,
                r.quantum_rate_bits,
                r.quantum_upper_bound_bits,
                r.super_quantum_rate_bits,
                r.classical_lt_quantum_certified,
                r.quantum_lt_super_quantum_certified
            ));
        }
        s.push_str(&format!("note: {}\n", self.note));
        s
    }

    fn csv(&self) -> String {
        let mut s = csv_row(&[
            "epsilon".into(),
            "optimizer_classical_max_bits".into(),
            "classical_bound_bits".into(),
            "classical_bound_nats".into(),
            "quantum_rate_bits".into(),
            "quantum_upper_bound_bits".into(),
            "super_quantum_rate_bits".into(),
            "classical_lt_quantum_certified".into(),
            "classical_bound_certifies".into(),
            "quantum_lt_super_quantum_certified".into(),
        ]);
        for r in &self.rows {
            s.push_str(&csv_row(&[
                fmt(r.epsilon),
                fmt(r.optimizer_classical_max_bits),
                fmt(r.classical_bound_bits),
                fmt(r.classical_bound_nats),
                fmt(r.quantum_rate_bits),
                fmt(r.quantum_upper_bound_bits),
                fmt(r.super_quantum_rate_bits),
                r.classical_lt_quantum_certified.to_string(),
                r.classical_bound_certifies.to_string(),
                r.quantum_lt_super_quantum_certified.to_string(),
            ]));
        }
        s
    }
}

pub fn run_separations(
    args: &SeparationsArgs,
) -> Result<Envelope<SeparationsResults>, CliError> {
    let seed = resolve_seed(&args.common)?;
    let cfg = OptimizerConfig {
        restarts: args.restarts,
        ..OptimizerConfig::default()
    };
    let mut rows = Vec::new();
    for &eps in &args.epsilons {
        let spec = build_channel(ChannelArg::Two, Some(eps))?;
        let (best, _) = multi_restart_with_rates(&spec, &cfg, seed)
            .map_err(|e| CliError::Config(e.to_string()))?;
        let quantum_rate = 2.0 * quantum_win_probability() * eps;
        let classical_bits = classical_bound_channel_two(eps, LogBase::Bits).unwrap();
        rows.push(SeparationRow {
            epsilon: eps,
            optimizer_classical_max_bits: best.best_sum_rate,
            classical_bound_bits: classical_bits,
            classical_bound_nats: classical_bound_channel_two(eps, LogBase::Nats).unwrap(),
            quantum_rate_bits: quantum_rate,
            quantum_upper_bound_bits: quantum_bound_channel_two(eps, LogBase::Bits).unwrap(),
            super_quantum_rate_bits: 2.0 * eps,
            classical_lt_quantum_certified: best.best_sum_rate < quantum_rate,
            classical_bound_certifies: classical_bits < quantum_rate,
            quantum_lt_super_quantum_certified: quantum_bound_channel_two(eps, LogBase::Bits)
                .unwrap()
                < 2.0 * eps,
        });
    }
    let results = SeparationsResults {
        restarts: args.restarts,
        note: "the closed-form classical bound equals 1.2555*eps nats = 1.8113*eps bits, \
               which exceeds the entanglement-achievable 1.7071*eps bits, so that bound \
               alone cannot certify classical < quantum; the cls<q flag instead compares \
               the restart search's empirical classical maximum against the quantum rate"
            .into(),
        rows,
    };
    let config = json!({
        "epsilons": args.epsilons,
        "restarts": args.restarts,
    });
    Ok(Envelope::new("separations", seed, config, results))
}
