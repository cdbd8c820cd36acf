//! The surveillance protocol's node lifecycle: order absorption, per-tick
//! capture/flip/countdown, digest reseeding on activation, and next-node
//! selection under the chaotic scheme and the two baselines.
//!
//! Simultaneous-update semantics: all nodes read the tick-start state; wake
//! orders emitted during tick j are absorbed at the start of tick j+1.

use serde::Serialize;

use crate::ci_core::BitState;
use crate::ci_primitives::{ci_hash, BaseGenerator, CiGenerator, SecretKey, SplitMix};
use crate::error::{Error, Result};

/// Next-node selection policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerPolicy {
    /// The chaotic scheme: the order goes to the integer encoded by the
    /// sender's CI state.
    Chaotic,
    /// Standard-random baseline: uniform draw from a policy-owned generator.
    UniformRandom,
    /// Round-robin baseline, fully predictable by construction.
    Periodic,
}

impl SchedulerPolicy {
    pub fn name(self) -> &'static str {
        match self {
            SchedulerPolicy::Chaotic => "chaotic",
            SchedulerPolicy::UniformRandom => "random",
            SchedulerPolicy::Periodic => "periodic",
        }
    }
}

impl std::str::FromStr for SchedulerPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "chaotic" => Ok(SchedulerPolicy::Chaotic),
            "random" | "uniform_random" => Ok(SchedulerPolicy::UniformRandom),
            "periodic" => Ok(SchedulerPolicy::Periodic),
            other => Err(Error::InvalidConfig(format!("unknown policy {other:?}"))),
        }
    }
}

/// One sensor node's full runtime state.
#[derive(Clone, Debug)]
pub struct NodeRuntime {
    pub id: usize,
    /// The node's CI state; length equals the network's bit width.
    pub state: BitState,
    /// Remaining listening time in capture ticks; zero means asleep.
    pub listening_ticks: u32,
    /// Wake orders received since the last tick boundary.
    pub pending_orders: u32,
    pub generator: CiGenerator,
    /// Active ticks granted per wake order (T = r * T0).
    pub wake_ticks: u32,
    pub battery: u32,
    pub alive: bool,
    /// Set when the node transitions asleep -> active; cleared by the first
    /// listening tick, which reseeds and resets the CI state.
    pub just_activated: bool,
}

impl NodeRuntime {
    pub fn is_active(&self) -> bool {
        self.alive && self.listening_ticks > 0
    }
}

/// Everything observable about one network tick.
#[derive(Clone, Debug)]
pub struct ScheduleTick {
    pub tick: u64,
    /// Nodes that performed a capture this tick.
    pub active_ids: Vec<usize>,
    /// (sender, target) wake orders emitted this tick.
    pub orders: Vec<(usize, usize)>,
    /// Orders that arrived at a dead node at this tick's boundary.
    pub dropped_orders: u64,
    /// Nodes whose CI state was reset by activation this tick, with the
    /// fresh state encoded as an integer.
    pub resets: Vec<(usize, u64)>,
    /// Single-cell CI flips applied this tick as (node, cell) pairs.
    pub flips: Vec<(usize, usize)>,
    /// Detection flags filled in by the physical-world layer.
    pub detections: Vec<DetectionEvent>,
    pub battery_mean: f64,
    pub battery_stddev: f64,
    pub alive_count: usize,
}

/// A confirmed sighting of the intruder by an active node.
#[derive(Clone, Debug, Serialize)]
pub struct DetectionEvent {
    pub node_id: usize,
    pub x: f64,
    pub y: f64,
    /// Seconds the intruder had been traveling unseen.
    pub stealth_s: f64,
}

/// Scheduler construction parameters.
#[derive(Clone, Debug)]
pub struct SchedulerConfig {
    /// Bit width N; the network has 2^N nodes.
    pub n_exp: usize,
    /// Probability that a node starts active.
    pub activation_fraction: f64,
    /// Active ticks granted per wake order.
    pub wake_ticks: u32,
    pub battery_init: u32,
    pub capture_cost: u32,
    pub policy: SchedulerPolicy,
    /// Seed for the policy-owned generator of the random baseline.
    pub policy_seed: u64,
}

/// Terminal condition of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalState {
    /// Some node is still alive and orders are still circulating.
    Running,
    /// Every battery is exhausted.
    AllDead,
    /// Live nodes remain but no node is active and no order is in flight;
    /// the network can never wake again.
    IdleDeadlock,
}

/// The 2^N-node network under one scheduling policy.
pub struct Network {
    pub n_exp: usize,
    pub nodes: Vec<NodeRuntime>,
    policy: SchedulerPolicy,
    policy_rng: BaseGenerator,
    capture_cost: u32,
    pub tick: u64,
    pub dropped_orders_total: u64,
}

impl Network {
    /// Materialize 2^N nodes: each node's generator is expanded from the
    /// secret key, its CI state is set to the binary decomposition of its
    /// secret parameter (the first N bits of the key-derived stream), and it
    /// starts active with probability `activation_fraction`.
    pub fn initialize(key: &SecretKey, config: &SchedulerConfig) -> Result<Network> {
        if !(1..=16).contains(&config.n_exp) {
            return Err(Error::NodeExponentOutOfRange(config.n_exp));
        }
        if !(0.0..=1.0).contains(&config.activation_fraction) {
            return Err(Error::InvalidConfig(format!(
                "activation fraction {} outside [0, 1]",
                config.activation_fraction
            )));
        }
        if config.wake_ticks == 0 {
            return Err(Error::InvalidConfig("wake_ticks must be positive".into()));
        }
        let n_nodes = 1usize << config.n_exp;
        let mut nodes = Vec::with_capacity(n_nodes);
        for id in 0..n_nodes {
            let mut generator = CiGenerator::from_key(key, id as u64, 0);
            let state_bits = generator.next_bits(config.n_exp);
            let state = BitState::from_bools(&state_bits);
            let activate = generator.next_f64() < config.activation_fraction;
            nodes.push(NodeRuntime {
                id,
                state,
                listening_ticks: if activate { config.wake_ticks } else { 0 },
                pending_orders: 0,
                generator,
                wake_ticks: config.wake_ticks,
                battery: config.battery_init,
                alive: config.battery_init > 0,
                just_activated: activate,
            });
        }
        Ok(Network {
            n_exp: config.n_exp,
            nodes,
            policy: config.policy,
            policy_rng: BaseGenerator::new(config.policy_seed),
            capture_cost: config.capture_cost.max(1),
            tick: 0,
            dropped_orders_total: 0,
        })
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn alive_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.alive).count()
    }

    pub fn active_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_active()).count()
    }

    pub fn orders_in_flight(&self) -> u64 {
        self.nodes.iter().map(|n| n.pending_orders as u64).sum()
    }

    pub fn terminal_state(&self) -> TerminalState {
        if self.alive_count() == 0 {
            TerminalState::AllDead
        } else if self.active_count() == 0 && self.orders_in_flight() == 0 {
            TerminalState::IdleDeadlock
        } else {
            TerminalState::Running
        }
    }

    /// Concatenated node states as one global Boolean vector: node k owns
    /// cells [k*N, (k+1)*N). A per-node flip at cell s therefore lands at
    /// global index s + k*N.
    pub fn global_state(&self) -> BitState {
        let mut bits = Vec::with_capacity(self.nodes.len() * self.n_exp);
        for node in &self.nodes {
            bits.extend(node.state.iter());
        }
        BitState::from_bools(&bits)
    }

    /// Queue a wake order for absorption at the next tick boundary.
    pub fn deliver_order(&mut self, target: usize) {
        self.nodes[target].pending_orders += 1;
    }

    /// Absorb pending orders at a tick boundary: a sleeping node wakes with
    /// n*r listening ticks, an active node extends by n*r; orders addressed
    /// to dead nodes are dropped and counted.
    fn absorb_orders(&mut self) -> u64 {
        let mut dropped = 0u64;
        for node in self.nodes.iter_mut() {
            let n = node.pending_orders;
            if n == 0 {
                continue;
            }
            node.pending_orders = 0;
            if !node.alive {
                dropped += n as u64;
                continue;
            }
            if node.listening_ticks == 0 {
                node.listening_ticks = n * node.wake_ticks;
                node.just_activated = true;
            } else {
                node.listening_ticks += n * node.wake_ticks;
            }
        }
        self.dropped_orders_total += dropped;
        dropped
    }

    /// Target of the wake order a node emits when its listening time runs
    /// out, per the active policy.
    fn select_next(&mut self, node_idx: usize) -> usize {
        let n_nodes = self.nodes.len();
        match self.policy {
            SchedulerPolicy::Chaotic => self.nodes[node_idx].state.as_integer() as usize,
            SchedulerPolicy::UniformRandom => (self.policy_rng.next_u64() % n_nodes as u64) as usize,
            SchedulerPolicy::Periodic => (self.nodes[node_idx].id + 1) % n_nodes,
        }
    }

    /// Advance the whole network by one capture tick. `sensed` supplies each
    /// active node's sensed value for the tick (consumed only on a node's
    /// first listening tick after activation, when it reseeds the node).
    pub fn network_tick(&mut self, sensed: &mut dyn FnMut(usize, u64) -> u64) -> ScheduleTick {
        self.tick += 1;
        let tick = self.tick;
        let dropped = self.absorb_orders();

        let active_ids: Vec<usize> = self
            .nodes
            .iter()
            .filter(|n| n.is_active())
            .map(|n| n.id)
            .collect();

        let mut orders = Vec::new();
        let mut resets = Vec::new();
        let mut flips = Vec::new();
        for &id in &active_ids {
            // (a) first listening tick after activation: hash the sensed
            // value, reseed, and reset the CI state to the binary
            // decomposition of the fresh seed
            if self.nodes[id].just_activated {
                let reading = sensed(id, tick);
                let digest = ci_hash(&reading.to_le_bytes());
                let n_exp = self.n_exp;
                let node = &mut self.nodes[id];
                node.generator.reseed_from_digest(digest, tick);
                let bits = node.generator.next_bits(n_exp);
                node.state = BitState::from_bools(&bits);
                node.just_activated = false;
                resets.push((id, node.state.as_integer()));
            }
            // (b) one chaotic iteration of the node state
            let n_exp = self.n_exp;
            let node = &mut self.nodes[id];
            let s = node.generator.draw_strategy_index(n_exp);
            node.state.flip(s);
            flips.push((id, s));
            // (c) one capture spends battery
            node.battery = node.battery.saturating_sub(self.capture_cost);
            let dying = node.battery == 0;
            // (d) listening time runs down
            node.listening_ticks -= 1;
            // (e) at zero, pass the baton and go to sleep; a dying node
            // completes the tick but emits no order
            if node.listening_ticks == 0 && !dying {
                let target = self.select_next(id);
                orders.push((id, target));
            }
            if dying {
                let node = &mut self.nodes[id];
                node.alive = false;
                node.listening_ticks = 0;
            }
        }

        for &(_, target) in &orders {
            self.deliver_order(target);
        }

        let batteries: Vec<f64> = self.nodes.iter().map(|n| n.battery as f64).collect();
        let (battery_mean, battery_stddev) = crate::stats::mean_stddev(&batteries);
        ScheduleTick {
            tick,
            active_ids,
            orders,
            dropped_orders: dropped,
            resets,
            flips,
            detections: Vec::new(),
            battery_mean,
            battery_stddev,
            alive_count: self.alive_count(),
        }
    }
}

/// Time-indexed record of a full run; the observable the adversary and the
/// metrics layers consume.
#[derive(Clone, Debug, Default)]
pub struct RunTrace {
    /// Population size, for consumers that tabulate per-node statistics.
    pub n_nodes: usize,
    pub ticks: Vec<ScheduleTick>,
}

impl RunTrace {
    pub fn new(n_nodes: usize) -> Self {
        RunTrace { n_nodes, ticks: Vec::new() }
    }

    pub fn push(&mut self, tick: ScheduleTick) {
        self.ticks.push(tick);
    }

    pub fn len(&self) -> usize {
        self.ticks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ticks.is_empty()
    }

    /// All (sender, target) wake orders in tick order.
    pub fn order_events(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ticks.iter().flat_map(|t| t.orders.iter().copied())
    }

    /// Serialize as newline-delimited JSON, one event object per tick.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for tick in &self.ticks {
            let event = NdjsonTick {
                tick: tick.tick,
                active_ids: &tick.active_ids,
                orders: &tick.orders,
                detections: &tick.detections,
                battery_summary: BatterySummary {
                    mean: tick.battery_mean,
                    stddev: tick.battery_stddev,
                    alive: tick.alive_count,
                    dropped_orders: tick.dropped_orders,
                },
            };
            out.push_str(&serde_json::to_string(&event).expect("trace serialization"));
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize)]
struct NdjsonTick<'a> {
    tick: u64,
    active_ids: &'a [usize],
    orders: &'a [(usize, usize)],
    detections: &'a [DetectionEvent],
    battery_summary: BatterySummary,
}

#[derive(Serialize)]
struct BatterySummary {
    mean: f64,
    stddev: f64,
    alive: usize,
    dropped_orders: u64,
}

/// A sensed-value source that mixes a per-run noise stream with the tick and
/// node id; used where no physical world is simulated.
pub fn synthetic_sensed(seed: u64) -> impl FnMut(usize, u64) -> u64 {
    let mut noise = SplitMix::new(seed);
    move |node_id, tick| {
        crate::ci_primitives::mix64(noise.next_u64() ^ crate::ci_primitives::mix64(tick ^ ((node_id as u64) << 32)))
    }
}
