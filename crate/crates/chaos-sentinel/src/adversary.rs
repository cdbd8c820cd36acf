//! Threat models that can be evaluated at desk scale: blind path attacks,
//! a first-order observing predictor, and the chosen-key uniformity
//! experiment on the scheduler's global-state representation.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::ci_core::{ci_step, BitState, VectorialNegation};
use crate::ci_primitives::{CiGenerator, SecretKey, SplitMix};
use crate::error::{Error, Result};
use crate::field_sim::Mobility;
use crate::scheduler::{RunTrace, SchedulerPolicy};
use crate::stats::{chi_square_survival, normal_two_sided};

/// Distance at which a target-seeking intruder counts as arrived.
pub const ARRIVAL_RADIUS_M: f64 = 1.0;
/// Planning-grid resolution for the adaptive intruder.
pub const PLAN_CELL_M: f64 = 5.0;

/// Per-cell predicted coverage, from an observation model and known poses.
#[derive(Clone, Debug)]
pub struct CoverageGrid {
    cols: usize,
    rows: usize,
    cell_m: f64,
    scores: Vec<f64>,
}

impl CoverageGrid {
    /// Sum, over nodes whose sector covers a cell center, of the node's
    /// predicted activity (its weight in the observed wake-target marginal).
    pub fn build(
        model: &ObservedModel,
        poses: &[crate::field_sim::SensorPose],
        width_m: f64,
        height_m: f64,
        aov_deg: f64,
        range_m: f64,
    ) -> CoverageGrid {
        let cols = (width_m / PLAN_CELL_M).ceil().max(1.0) as usize;
        let rows = (height_m / PLAN_CELL_M).ceil().max(1.0) as usize;
        let total: u64 = model.marginal.iter().sum();
        let mut scores = vec![0.0; cols * rows];
        for row in 0..rows {
            for col in 0..cols {
                let center = (
                    (col as f64 + 0.5) * PLAN_CELL_M,
                    (row as f64 + 0.5) * PLAN_CELL_M,
                );
                let mut s = 0.0;
                for (id, pose) in poses.iter().enumerate() {
                    if crate::field_sim::in_sector(pose, center, aov_deg, range_m) {
                        let w = if total == 0 {
                            1.0 / poses.len() as f64
                        } else {
                            model.marginal[id] as f64 / total as f64
                        };
                        s += w;
                    }
                }
                scores[row * cols + col] = s;
            }
        }
        CoverageGrid { cols, rows, cell_m: PLAN_CELL_M, scores }
    }

    fn cell_of(&self, p: (f64, f64)) -> (usize, usize) {
        let col = ((p.0 / self.cell_m) as isize).clamp(0, self.cols as isize - 1) as usize;
        let row = ((p.1 / self.cell_m) as isize).clamp(0, self.rows as isize - 1) as usize;
        (col, row)
    }

    fn center(&self, col: usize, row: usize) -> (f64, f64) {
        ((col as f64 + 0.5) * self.cell_m, (row as f64 + 0.5) * self.cell_m)
    }

    fn score(&self, col: usize, row: usize) -> f64 {
        self.scores[row * self.cols + col]
    }
}

/// Intruder path engine for the blind and adaptive attack modes.
///
/// shortest_path heads straight for the target; random_walk draws a fresh
/// uniform heading per step and reflects at the borders; adaptive walks
/// toward the target through the lowest-predicted-coverage neighbor cells of
/// its planning grid. Arrival is reaching within 1 m of the target at any
/// point of the swept path.
#[derive(Clone, Debug)]
pub struct BlindWalker {
    mobility: Mobility,
    pos: (f64, f64),
    target: (f64, f64),
    speed_mps: f64,
    bounds: (f64, f64),
    rng: SplitMix,
    grid: Option<CoverageGrid>,
    arrived: bool,
}

impl BlindWalker {
    pub fn new(
        mobility: Mobility,
        start: (f64, f64),
        target: (f64, f64),
        speed_mps: f64,
        bounds: (f64, f64),
        seed: u64,
    ) -> BlindWalker {
        let mut w = BlindWalker {
            mobility,
            pos: start,
            target,
            speed_mps,
            bounds,
            rng: SplitMix::new(seed),
            grid: None,
            arrived: false,
        };
        w.arrived = w.distance_to_target() <= ARRIVAL_RADIUS_M;
        w
    }

    /// Install the planning grid used by the adaptive mobility.
    pub fn with_grid(mut self, grid: CoverageGrid) -> BlindWalker {
        self.grid = Some(grid);
        self
    }

    pub fn position(&self) -> (f64, f64) {
        self.pos
    }

    pub fn target(&self) -> (f64, f64) {
        self.target
    }

    pub fn has_arrived(&self) -> bool {
        self.arrived
    }

    fn distance_to_target(&self) -> f64 {
        let dx = self.target.0 - self.pos.0;
        let dy = self.target.1 - self.pos.1;
        (dx * dx + dy * dy).sqrt()
    }

    /// Waypoint the walker currently heads for.
    fn waypoint(&self) -> (f64, f64) {
        match (self.mobility, &self.grid) {
            (Mobility::Adaptive, Some(grid)) => {
                let (col, row) = grid.cell_of(self.pos);
                let (tcol, trow) = grid.cell_of(self.target);
                if (col, row) == (tcol, trow) {
                    return self.target;
                }
                let dist = |c: usize, r: usize| {
                    let p = grid.center(c, r);
                    let dx = p.0 - self.target.0;
                    let dy = p.1 - self.target.1;
                    dx * dx + dy * dy
                };
                let here = dist(col, row);
                let mut best: Option<(f64, f64, usize, usize)> = None;
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        if dr == 0 && dc == 0 {
                            continue;
                        }
                        let c = col as i64 + dc;
                        let r = row as i64 + dr;
                        if c < 0 || r < 0 || c >= grid.cols as i64 || r >= grid.rows as i64 {
                            continue;
                        }
                        let (c, r) = (c as usize, r as usize);
                        // keep making progress: no neighbor farther from the
                        // target than the current cell
                        if dist(c, r) > here {
                            continue;
                        }
                        let cand = (grid.score(c, r), dist(c, r), c, r);
                        let better = match &best {
                            None => true,
                            Some(b) => cand < *b,
                        };
                        if better {
                            best = Some(cand);
                        }
                    }
                }
                match best {
                    Some((_, _, c, r)) => grid.center(c, r),
                    None => self.target,
                }
            }
            _ => self.target,
        }
    }

    /// Advance by `dt_s` seconds. Returns true if the target was reached
    /// (within 1 m) during the move.
    pub fn step(&mut self, dt_s: f64) -> bool {
        if self.arrived {
            return true;
        }
        let mut budget = self.speed_mps * dt_s;
        // one fixed heading per step for the random walk
        let heading = if self.mobility == Mobility::RandomWalk {
            self.rng.next_f64() * std::f64::consts::TAU
        } else {
            0.0
        };
        // substep so arrival and reflection resolve along the swept path
        while budget > 1e-12 {
            let (dir_x, dir_y) = match self.mobility {
                Mobility::RandomWalk => (heading.cos(), heading.sin()),
                _ => {
                    let wp = self.waypoint();
                    let dx = wp.0 - self.pos.0;
                    let dy = wp.1 - self.pos.1;
                    let d = (dx * dx + dy * dy).sqrt();
                    if d < 1e-12 {
                        (0.0, 0.0)
                    } else {
                        (dx / d, dy / d)
                    }
                }
            };
            if dir_x == 0.0 && dir_y == 0.0 {
                self.arrived = self.distance_to_target() <= ARRIVAL_RADIUS_M;
                return self.arrived;
            }
            let advance = budget.min(0.5);
            self.pos.0 += dir_x * advance;
            self.pos.1 += dir_y * advance;
            budget -= advance;
            // reflect at the borders
            if self.pos.0 < 0.0 {
                self.pos.0 = -self.pos.0;
            }
            if self.pos.0 > self.bounds.0 {
                self.pos.0 = 2.0 * self.bounds.0 - self.pos.0;
            }
            if self.pos.1 < 0.0 {
                self.pos.1 = -self.pos.1;
            }
            if self.pos.1 > self.bounds.1 {
                self.pos.1 = 2.0 * self.bounds.1 - self.pos.1;
            }
            self.pos.0 = self.pos.0.clamp(0.0, self.bounds.0);
            self.pos.1 = self.pos.1.clamp(0.0, self.bounds.1);
            if self.distance_to_target() <= ARRIVAL_RADIUS_M {
                self.arrived = true;
                return true;
            }
        }
        false
    }
}

/// Outcome record for one attack experiment.
#[derive(Clone, Debug, Serialize)]
pub struct AttackOutcome {
    pub attack_kind: String,
    pub stealth_time_s: f64,
    pub reached_target: bool,
    pub predictor_accuracy: Option<f64>,
}

/// First-order empirical model of the scheduler's observable behavior:
/// per-sender wake-target counts plus the target marginal.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservedModel {
    pub n_nodes: usize,
    pub window_ticks: usize,
    pub events: u64,
    counts: Vec<BTreeMap<usize, u64>>,
    marginal: Vec<u64>,
}

impl ObservedModel {
    /// Empirical distribution of a sender's wake targets, normalized.
    pub fn target_distribution(&self, sender: usize) -> Vec<(usize, f64)> {
        let total: u64 = self.counts[sender].values().sum();
        self.counts[sender]
            .iter()
            .map(|(&t, &c)| (t, c as f64 / total.max(1) as f64))
            .collect()
    }

    pub fn sender_events(&self, sender: usize) -> u64 {
        self.counts[sender].values().sum()
    }

    /// Fold another model's counts into this one (statistics over keys and
    /// runs merge associatively).
    pub fn merge(&mut self, other: &ObservedModel) {
        assert_eq!(self.n_nodes, other.n_nodes);
        self.window_ticks += other.window_ticks;
        self.events += other.events;
        for (mine, theirs) in self.counts.iter_mut().zip(&other.counts) {
            for (&t, &c) in theirs {
                *mine.entry(t).or_insert(0) += c;
            }
        }
        for (mine, theirs) in self.marginal.iter_mut().zip(&other.marginal) {
            *mine += theirs;
        }
    }

    /// Top-1 prediction for a sender: its modal observed target, falling
    /// back to the marginal mode for unseen senders. Ties break to the
    /// smallest id so predictions are reproducible.
    pub fn predict(&self, sender: usize) -> usize {
        let mut best: Option<(u64, usize)> = None;
        for (&t, &c) in &self.counts[sender] {
            if best.map(|(bc, _)| c > bc).unwrap_or(true) {
                best = Some((c, t));
            }
        }
        if let Some((_, t)) = best {
            return t;
        }
        let mut fallback = (0u64, 0usize);
        for (t, &c) in self.marginal.iter().enumerate() {
            if c > fallback.0 {
                fallback = (c, t);
            }
        }
        fallback.1
    }
}

/// Tabulate a first-order predictor from the first `window_ticks` ticks of a
/// trace.
pub fn train_predictor(trace: &RunTrace, window_ticks: usize) -> Result<ObservedModel> {
    if window_ticks == 0 {
        return Err(Error::EmptyWindow);
    }
    if window_ticks > trace.len() {
        return Err(Error::InvalidConfig(format!(
            "training window {} exceeds trace length {}",
            window_ticks,
            trace.len()
        )));
    }
    let n_nodes = trace.n_nodes;
    let mut counts = vec![BTreeMap::new(); n_nodes];
    let mut marginal = vec![0u64; n_nodes];
    let mut events = 0u64;
    for tick in &trace.ticks[..window_ticks] {
        for &(from, to) in &tick.orders {
            *counts[from].entry(to).or_insert(0) += 1;
            marginal[to] += 1;
            events += 1;
        }
    }
    Ok(ObservedModel { n_nodes, window_ticks, events, counts, marginal })
}

/// Top-1 accuracy of the model's wake-target predictions over the ticks of
/// `holdout` starting at `from_tick` (disjoint from the training window when
/// called with the same trace).
pub fn predict_accuracy(model: &ObservedModel, holdout: &RunTrace, from_tick: usize) -> f64 {
    let mut hits = 0u64;
    let mut total = 0u64;
    for tick in &holdout.ticks[from_tick.min(holdout.len())..] {
        for &(from, to) in &tick.orders {
            total += 1;
            hits += (model.predict(from) == to) as u64;
        }
    }
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Count of holdout order events from `from_tick` on.
pub fn holdout_events(holdout: &RunTrace, from_tick: usize) -> u64 {
    holdout.ticks[from_tick.min(holdout.len())..]
        .iter()
        .map(|t| t.orders.len() as u64)
        .sum()
}

/// Parameters of the chosen-key uniformity experiment.
#[derive(Clone, Debug)]
pub struct CkaParams {
    pub n_exp: usize,
    pub keys: u64,
    pub horizon: u64,
    pub policy: SchedulerPolicy,
    /// Seed of the deterministic key family being sampled.
    pub key_seed: u64,
}

/// Report of one chosen-key uniformity run; serializes as a JSON record.
#[derive(Clone, Debug, Serialize)]
pub struct CkaReport {
    pub experiment: &'static str,
    pub n_exp: usize,
    pub keys: u64,
    pub horizon: u64,
    pub policy: &'static str,
    pub mode: &'static str,
    pub statistic: f64,
    pub dof: u64,
    pub p_value: f64,
    pub significance: f64,
    pub verdict: &'static str,
    /// Marginal mode only: worst per-bit |frequency - 1/2|.
    pub max_bit_bias: Option<f64>,
    /// Marginal mode only: worst pairwise correlation among nearby bits.
    pub max_pair_correlation: Option<f64>,
}

const CKA_SIGNIFICANCE: f64 = 0.01;

/// Run the global chaotic-iteration system for `horizon` steps per key and
/// test the distribution of the final global state over keys.
///
/// The system under test is the one the security analysis rewrites the
/// scheduler into: a global state over all nodes' cells, initialized from
/// the key-expanded secret parameters, iterated by single-cell negations at
/// exactly-uniform positions drawn from a key-derived stream independent of
/// the state. (The full protocol's wake-order dynamics make the flipped-cell
/// process depend on the state itself through self-election, which
/// measurably skews the state distribution; the proof's independence
/// premise, and hence this experiment, exclude that channel.) The periodic
/// policy doubles as the negative control: its behavior is key-independent,
/// so every uniformity test must fail on it decisively.
///
/// A global state of at most 8 bits (N <= 2) uses the exhaustive mode
/// (chi-square over all global states); larger N falls back to per-bit and
/// nearby-pair marginal bounds.
pub fn cka_experiment(params: &CkaParams) -> Result<CkaReport> {
    if !(1..=8).contains(&params.n_exp) {
        return Err(Error::InvalidConfig(format!(
            "chosen-key experiment supports N in 1..=8, got {}",
            params.n_exp
        )));
    }
    let n_nodes = 1usize << params.n_exp;
    let state_bits = params.n_exp * n_nodes;
    let exhaustive = state_bits <= 8;
    if exhaustive {
        let cells = 1u64 << state_bits;
        let required = 5 * cells;
        if params.keys < required {
            return Err(Error::InsufficientSamples { required, got: params.keys });
        }
    }

    let mut counts = vec![0u64; if exhaustive { 1 << state_bits } else { 0 }];
    let mut bit_ones = vec![0u64; state_bits];
    // pairwise counters over a sliding window of nearby bits
    let pair_window = (2 * params.n_exp).min(state_bits - 1);
    let mut pair_ones: Vec<Vec<u64>> = (0..state_bits)
        .map(|i| vec![0u64; pair_window.min(state_bits - 1 - i)])
        .collect();

    for key_index in 0..params.keys {
        let global = match params.policy {
            SchedulerPolicy::Periodic => periodic_global_state(params.n_exp, params.horizon),
            _ => {
                let key = SecretKey::derive(params.key_seed, key_index);
                chaotic_global_state(&key, params)?
            }
        };
        if exhaustive {
            counts[global.as_integer() as usize] += 1;
        }
        let bits: Vec<bool> = global.iter().collect();
        for (i, &b) in bits.iter().enumerate() {
            bit_ones[i] += b as u64;
            for (w, slot) in pair_ones[i].iter_mut().enumerate() {
                *slot += (b && bits[i + 1 + w]) as u64;
            }
        }
    }

    if exhaustive {
        let (statistic, dof, p_value) = crate::stats::chi_square_uniform_test(&counts);
        let verdict = if p_value > CKA_SIGNIFICANCE { "pass" } else { "fail" };
        return Ok(CkaReport {
            experiment: "cka_uniformity",
            n_exp: params.n_exp,
            keys: params.keys,
            horizon: params.horizon,
            policy: params.policy.name(),
            mode: "exhaustive",
            statistic,
            dof,
            p_value,
            significance: CKA_SIGNIFICANCE,
            verdict,
            max_bit_bias: None,
            max_pair_correlation: None,
        });
    }

    // marginal mode: Bonferroni-adjusted z bounds on bit frequencies and on
    // nearby-pair correlations
    let n = params.keys as f64;
    let mut max_bias = 0.0f64;
    let mut worst_z = 0.0f64;
    for &ones in &bit_ones {
        let f = ones as f64 / n;
        let bias = (f - 0.5).abs();
        max_bias = max_bias.max(bias);
        worst_z = worst_z.max(bias / (0.25 / n).sqrt());
    }
    let mut max_corr = 0.0f64;
    let mut pairs = 0u64;
    for i in 0..state_bits {
        let fi = bit_ones[i] as f64 / n;
        for (w, &ones) in pair_ones[i].iter().enumerate() {
            let j = i + 1 + w;
            let fj = bit_ones[j] as f64 / n;
            let fij = ones as f64 / n;
            let cov = fij - fi * fj;
            let denom = (fi * (1.0 - fi) * fj * (1.0 - fj)).sqrt();
            if denom > 0.0 {
                max_corr = max_corr.max((cov / denom).abs());
            }
            pairs += 1;
        }
    }
    let tests = state_bits as u64 + pairs;
    let corr_z = max_corr * n.sqrt();
    let z = worst_z.max(corr_z);
    let p_value = (normal_two_sided(z) * tests as f64).min(1.0);
    let verdict = if p_value > CKA_SIGNIFICANCE { "pass" } else { "fail" };
    Ok(CkaReport {
        experiment: "cka_uniformity",
        n_exp: params.n_exp,
        keys: params.keys,
        horizon: params.horizon,
        policy: params.policy.name(),
        mode: "marginal",
        statistic: z,
        dof: tests,
        p_value,
        significance: CKA_SIGNIFICANCE,
        verdict,
        max_bit_bias: Some(max_bias),
        max_pair_correlation: Some(max_corr),
    })
}

fn chaotic_global_state(key: &SecretKey, params: &CkaParams) -> Result<BitState> {
    let n_nodes = 1usize << params.n_exp;
    let state_bits = params.n_exp * n_nodes;
    // base case: every node's cells are the binary decomposition of its
    // secret parameter
    let mut bits = Vec::with_capacity(state_bits);
    for id in 0..n_nodes {
        let mut g = CiGenerator::from_key(key, id as u64, 0);
        bits.extend(g.next_bits(params.n_exp));
    }
    let mut global = BitState::from_bools(&bits);
    // induction step: one exactly-uniform cell negation per step, from a
    // key-derived strategy lane independent of the state
    let mut strategy = CiGenerator::from_key(key, n_nodes as u64, 1);
    for _ in 0..params.horizon {
        let s = strategy.draw_strategy_index(state_bits);
        global = ci_step(&global, s, &VectorialNegation)?;
    }
    Ok(global)
}

/// The fully deterministic baseline: states start at the binary
/// decomposition of each id, every node flips the round-robin cell each tick
/// and hands off to its successor. Key-independent by construction.
fn periodic_global_state(n_exp: usize, horizon: u64) -> BitState {
    let n_nodes = 1usize << n_exp;
    let mut states: Vec<BitState> = (0..n_nodes)
        .map(|id| BitState::from_integer(id as u64, n_exp))
        .collect();
    for tick in 1..=horizon {
        let cell = ((tick - 1) % n_exp as u64) as usize;
        for state in states.iter_mut() {
            state.flip(cell);
        }
    }
    let mut bits = Vec::with_capacity(n_exp * n_nodes);
    for s in &states {
        bits.extend(s.iter());
    }
    BitState::from_bools(&bits)
}

/// Observer-attack report: first-order predictor trained on a window of the
/// trace and scored on the rest.
#[derive(Clone, Debug, Serialize)]
pub struct PredictorReport {
    pub experiment: &'static str,
    pub policy: &'static str,
    pub window_ticks: usize,
    pub training_events: u64,
    pub holdout_events: u64,
    pub accuracy: f64,
    pub chance_level: f64,
}

/// Train on the first `window_ticks` of the trace and evaluate top-1
/// accuracy on everything after.
pub fn observer_attack(
    trace: &RunTrace,
    policy: SchedulerPolicy,
    window_ticks: usize,
) -> Result<PredictorReport> {
    let model = train_predictor(trace, window_ticks)?;
    let accuracy = predict_accuracy(&model, trace, window_ticks);
    Ok(PredictorReport {
        experiment: "observer_predictor",
        policy: policy.name(),
        window_ticks,
        training_events: model.events,
        holdout_events: holdout_events(trace, window_ticks),
        accuracy,
        chance_level: 1.0 / trace.n_nodes as f64,
    })
}

/// Chi-square survival re-exported for report builders.
pub fn survival(statistic: f64, dof: u64) -> f64 {
    chi_square_survival(statistic, dof)
}
