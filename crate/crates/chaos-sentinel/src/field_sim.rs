//! Physical-world model: deployment geometry, directional sensing, intruder
//! mobility, energy accounting, and the run metrics (stealth time, active
//! fraction, energy dispersion).

use serde::{Deserialize, Serialize};

use crate::adversary::{BlindWalker, CoverageGrid};
use crate::ci_primitives::{mix64, SecretKey, SplitMix};
use crate::error::{Error, Result};
use crate::scheduler::{
    DetectionEvent, Network, RunTrace, SchedulerConfig, SchedulerPolicy, TerminalState,
};

/// Intruder movement model.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mobility {
    /// Constant-velocity horizontal sweep to the right.
    ScanLine,
    /// Uniform fresh heading each step, reflecting at borders, aiming for a
    /// target location.
    RandomWalk,
    /// Straight line to a target location.
    ShortestPath,
    /// Plans through low-predicted-coverage grid cells (needs a trained
    /// observation model; see the adversary module).
    Adaptive,
}

/// Geometry, timing, energy and population parameters of one run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldConfig {
    pub width_m: f64,
    pub height_m: f64,
    /// Bit width N; the network has 2^N nodes.
    pub n_exp: usize,
    /// Angular width of a sensor's sector, degrees.
    pub aov_deg: f64,
    pub sensing_range_m: f64,
    /// Capture period T0, seconds; one scheduler tick.
    pub t0_s: f64,
    /// Active period T granted per wake order, seconds; r = T / T0 must be a
    /// positive integer.
    pub t_active_s: f64,
    pub battery_init: u32,
    pub capture_cost: u32,
    pub intruder_speed_mps: f64,
    pub first_intrusion_s: f64,
    pub activation_fraction: f64,
    pub mobility: Mobility,
    pub policy: SchedulerPolicy,
    pub sim_seed: u64,
    /// Safety cap on scheduler ticks.
    pub max_ticks: u64,
}

impl FieldConfig {
    /// The 128-node reference setup: 75 m x 75 m, 36 degree sectors, 25 m
    /// range, 0.2 fps capture (T0 = 5 s), T = 20 s, battery 100 units,
    /// scan-line intruder at 5 m/s entering at 10 s, half the nodes active
    /// initially.
    pub fn reference_preset() -> Self {
        FieldConfig {
            width_m: 75.0,
            height_m: 75.0,
            n_exp: 7,
            aov_deg: 36.0,
            sensing_range_m: 25.0,
            t0_s: 5.0,
            t_active_s: 20.0,
            battery_init: 100,
            capture_cost: 1,
            intruder_speed_mps: 5.0,
            first_intrusion_s: 10.0,
            activation_fraction: 0.5,
            mobility: Mobility::ScanLine,
            policy: SchedulerPolicy::Chaotic,
            sim_seed: 0,
            max_ticks: 100_000,
        }
    }

    /// Active ticks per wake order (r = T / T0).
    pub fn wake_ticks(&self) -> Result<u32> {
        let ratio = self.t_active_s / self.t0_s;
        let r = ratio.round();
        if !(ratio.is_finite() && r >= 1.0 && (ratio - r).abs() < 1e-9) {
            return Err(Error::InvalidConfig(format!(
                "T/T0 = {ratio} is not a positive integer"
            )));
        }
        Ok(r as u32)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width_m <= 0.0 || self.height_m <= 0.0 {
            return Err(Error::InvalidConfig("field dimensions must be positive".into()));
        }
        if !(self.aov_deg > 0.0 && self.aov_deg <= 360.0) {
            return Err(Error::InvalidConfig(format!(
                "angle of view {} outside (0, 360]",
                self.aov_deg
            )));
        }
        if self.sensing_range_m <= 0.0 {
            return Err(Error::InvalidConfig("sensing range must be positive".into()));
        }
        if self.t0_s <= 0.0 {
            return Err(Error::InvalidConfig("capture period must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.activation_fraction) {
            return Err(Error::InvalidConfig("activation fraction outside [0, 1]".into()));
        }
        if !(self.intruder_speed_mps.is_finite() && self.intruder_speed_mps >= 0.0) {
            return Err(Error::InvalidConfig("intruder speed must be finite and >= 0".into()));
        }
        if !(self.first_intrusion_s.is_finite() && self.first_intrusion_s >= 0.0) {
            return Err(Error::InvalidConfig("first intrusion time must be finite and >= 0".into()));
        }
        self.wake_ticks()?;
        if !(1..=16).contains(&self.n_exp) {
            return Err(Error::NodeExponentOutOfRange(self.n_exp));
        }
        Ok(())
    }

    pub(crate) fn scheduler_config(&self) -> Result<SchedulerConfig> {
        Ok(SchedulerConfig {
            n_exp: self.n_exp,
            activation_fraction: self.activation_fraction,
            wake_ticks: self.wake_ticks()?,
            battery_init: self.battery_init,
            capture_cost: self.capture_cost,
            policy: self.policy,
            policy_seed: mix64(self.sim_seed ^ 0x7061_6C69_6379_7267), // policy lane
        })
    }
}

/// Position and facing of one deployed sensor.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SensorPose {
    pub x: f64,
    pub y: f64,
    /// Facing, degrees in [0, 360).
    pub orientation_deg: f64,
}

/// Positions i.i.d. uniform over the field, orientations i.i.d. uniform over
/// [0, 360), from a simulation-owned stream distinct from node secrets.
pub fn deploy(config: &FieldConfig, sim_seed: u64) -> Vec<SensorPose> {
    let mut rng = SplitMix::new(mix64(sim_seed ^ 0x6465_706C_6F79_3A31)); // deploy lane
    (0..1usize << config.n_exp)
        .map(|_| SensorPose {
            x: rng.next_f64() * config.width_m,
            y: rng.next_f64() * config.height_m,
            orientation_deg: rng.next_f64() * 360.0,
        })
        .collect()
}

fn wrap_half_turn(deg: f64) -> f64 {
    // into (-180, 180]
    let r = deg.rem_euclid(360.0);
    if r > 180.0 {
        r - 360.0
    } else {
        r
    }
}

/// Closed-sector containment: within range and within +/- aov/2 of the
/// facing (boundary included). A point at the sensor's own position counts.
pub fn in_sector(pose: &SensorPose, point: (f64, f64), aov_deg: f64, range_m: f64) -> bool {
    let dx = point.0 - pose.x;
    let dy = point.1 - pose.y;
    let d2 = dx * dx + dy * dy;
    if d2 > range_m * range_m {
        return false;
    }
    if d2 == 0.0 {
        return true;
    }
    let bearing = dy.atan2(dx).to_degrees();
    wrap_half_turn(bearing - pose.orientation_deg).abs() <= aov_deg / 2.0
}

/// The one moving threat of a run.
#[derive(Clone, Debug)]
pub struct Intruder {
    pub x: f64,
    pub y: f64,
    pub entry_time_s: f64,
    walker: Option<BlindWalker>,
}

impl Intruder {
    fn spawn(
        config: &FieldConfig,
        rng: &mut SplitMix,
        now_s: f64,
        grid: Option<&CoverageGrid>,
    ) -> Intruder {
        let x = rng.next_f64() * config.width_m;
        let y = rng.next_f64() * config.height_m;
        let walker = match config.mobility {
            Mobility::ScanLine => None,
            Mobility::RandomWalk | Mobility::ShortestPath | Mobility::Adaptive => {
                let tx = rng.next_f64() * config.width_m;
                let ty = rng.next_f64() * config.height_m;
                let mut w = BlindWalker::new(
                    config.mobility,
                    (x, y),
                    (tx, ty),
                    config.intruder_speed_mps,
                    (config.width_m, config.height_m),
                    rng.next_u64(),
                );
                if let Some(g) = grid {
                    w = w.with_grid(g.clone());
                }
                Some(w)
            }
        };
        Intruder { x, y, entry_time_s: now_s, walker }
    }

    /// Advance by `dt_s`. Returns true when a target-seeking intruder came
    /// within arrival distance of its goal during the move.
    fn advance(&mut self, config: &FieldConfig, rng: &mut SplitMix, dt_s: f64) -> bool {
        match &mut self.walker {
            None => {
                self.x += config.intruder_speed_mps * dt_s;
                if self.x > config.width_m {
                    // undetected exit on the right: respawn on the entry
                    // edge, stealth clock keeps running
                    self.x = 0.0;
                    self.y = rng.next_f64() * config.height_m;
                }
                false
            }
            Some(walker) => {
                let arrived = walker.step(dt_s);
                let (x, y) = walker.position();
                self.x = x;
                self.y = y;
                arrived
            }
        }
    }

    pub fn is_target_seeking(&self) -> bool {
        self.walker.is_some()
    }
}

/// One energy/activity snapshot, taken every 10 simulated seconds.
#[derive(Clone, Debug, Serialize)]
pub struct Snapshot {
    pub time_s: f64,
    pub active_pct: f64,
    pub energy_mean: f64,
    pub energy_stddev: f64,
    pub alive: usize,
}

/// One recorded detection with its stealth time.
#[derive(Clone, Debug, Serialize)]
pub struct StealthEvent {
    pub time_s: f64,
    pub stealth_s: f64,
}

/// Outcome of one intrusion attempt under a target-seeking mobility.
#[derive(Clone, Debug, Serialize)]
pub struct AttackAttempt {
    pub start_s: f64,
    pub end_s: f64,
    pub reached_target: bool,
    pub stealth_s: f64,
}

/// Length of the sliding stealth filter.
pub const STEALTH_WINDOW: usize = 20;
/// Seconds between metric snapshots.
pub const SNAPSHOT_PERIOD_S: f64 = 10.0;

/// Per-run series behind the four reference figures.
#[derive(Clone, Debug, Default, Serialize)]
pub struct MetricsSeries {
    pub snapshots: Vec<Snapshot>,
    pub stealth_events: Vec<StealthEvent>,
    /// Trailing mean of the last up-to-20 stealth values, one point per
    /// detection.
    pub stealth_window: Vec<StealthEvent>,
    pub attack_attempts: Vec<AttackAttempt>,
}

impl MetricsSeries {
    pub fn mean_stealth(&self) -> Option<f64> {
        if self.stealth_events.is_empty() {
            return None;
        }
        Some(
            self.stealth_events.iter().map(|e| e.stealth_s).sum::<f64>()
                / self.stealth_events.len() as f64,
        )
    }
}

/// Everything a single run produces.
#[derive(Debug)]
pub struct SimResult {
    pub trace: RunTrace,
    pub metrics: MetricsSeries,
    pub terminal: TerminalState,
    pub ticks_run: u64,
    pub hit_tick_cap: bool,
    /// Sensing range echoed for reporting (the range is not part of the
    /// reference parameter set, so every result carries it).
    pub sensing_range_m: f64,
}

/// Run the scheduler and the physical world in lockstep on the T0 grid until
/// every battery is exhausted, the network deadlocks idle, or the tick cap
/// hits. Identical (config, key) pairs give identical results.
pub fn run_simulation(config: &FieldConfig, key: &SecretKey) -> Result<SimResult> {
    run_simulation_with_grid(config, key, None)
}

/// `run_simulation` with a coverage grid installed on every spawned
/// intruder; the adaptive mobility plans through it.
pub fn run_simulation_with_grid(
    config: &FieldConfig,
    key: &SecretKey,
    grid: Option<&CoverageGrid>,
) -> Result<SimResult> {
    config.validate()?;
    let poses = deploy(config, config.sim_seed);
    let mut network = Network::initialize(key, &config.scheduler_config()?)?;
    let mut intruder_rng = SplitMix::new(mix64(config.sim_seed ^ 0x696E_7472_7564_6572)); // intruder lane
    let mut noise_rng = SplitMix::new(mix64(config.sim_seed ^ 0x6E6F_6973_653A_3332)); // sensed-noise lane
    let mut trace = RunTrace::new(network.node_count());
    let mut metrics = MetricsSeries::default();
    let mut intruder: Option<Intruder> = None;
    let mut hit_tick_cap = false;

    loop {
        match network.terminal_state() {
            TerminalState::Running => {}
            terminal @ (TerminalState::AllDead | TerminalState::IdleDeadlock) => {
                return Ok(SimResult {
                    trace,
                    metrics,
                    terminal,
                    ticks_run: network.tick,
                    hit_tick_cap,
                    sensing_range_m: config.sensing_range_m,
                });
            }
        }
        if network.tick >= config.max_ticks {
            hit_tick_cap = true;
            return Ok(SimResult {
                trace,
                metrics,
                terminal: TerminalState::Running,
                ticks_run: network.tick,
                hit_tick_cap,
                sensing_range_m: config.sensing_range_m,
            });
        }

        let tick = network.tick + 1;
        let now_s = tick as f64 * config.t0_s;

        // world first: the intruder moves through (t_{j-1}, t_j], captures
        // sample its position at t_j
        let mut arrived = false;
        if now_s >= config.first_intrusion_s {
            match &mut intruder {
                None => intruder = Some(Intruder::spawn(config, &mut intruder_rng, now_s, grid)),
                Some(i) => arrived = i.advance(config, &mut intruder_rng, config.t0_s),
            }
        }
        if arrived {
            let i = intruder.take().expect("intruder present");
            metrics.attack_attempts.push(AttackAttempt {
                start_s: i.entry_time_s,
                end_s: now_s,
                reached_target: true,
                stealth_s: now_s - i.entry_time_s,
            });
            intruder = Some(Intruder::spawn(config, &mut intruder_rng, now_s, grid));
        }

        let intruder_pos = intruder.as_ref().map(|i| (i.x, i.y));
        let mut sensed = |node_id: usize, _tick: u64| -> u64 {
            let presence = intruder_pos
                .map(|p| in_sector(&poses[node_id], p, config.aov_deg, config.sensing_range_m))
                .unwrap_or(false);
            mix64(
                noise_rng.next_u64()
                    ^ mix64(tick ^ ((node_id as u64) << 32) ^ ((presence as u64) << 63)),
            )
        };
        let mut tick_record = network.network_tick(&mut sensed);

        // detection: first active node (by id) whose sector holds the intruder
        if let (Some(pos), Some(i)) = (intruder_pos, intruder.as_ref()) {
            let seer = tick_record
                .active_ids
                .iter()
                .copied()
                .find(|&id| in_sector(&poses[id], pos, config.aov_deg, config.sensing_range_m));
            if let Some(node_id) = seer {
                let stealth_s = now_s - i.entry_time_s;
                tick_record.detections.push(DetectionEvent {
                    node_id,
                    x: pos.0,
                    y: pos.1,
                    stealth_s,
                });
                metrics.stealth_events.push(StealthEvent { time_s: now_s, stealth_s });
                let window = &metrics.stealth_events
                    [metrics.stealth_events.len().saturating_sub(STEALTH_WINDOW)..];
                let mean =
                    window.iter().map(|e| e.stealth_s).sum::<f64>() / window.len() as f64;
                metrics.stealth_window.push(StealthEvent { time_s: now_s, stealth_s: mean });
                if i.is_target_seeking() {
                    metrics.attack_attempts.push(AttackAttempt {
                        start_s: i.entry_time_s,
                        end_s: now_s,
                        reached_target: false,
                        stealth_s,
                    });
                }
                // a fresh intrusion appears at another random position
                intruder = Some(Intruder::spawn(config, &mut intruder_rng, now_s, grid));
            }
        }

        if (now_s / SNAPSHOT_PERIOD_S).fract().abs() < 1e-9 {
            metrics.snapshots.push(Snapshot {
                time_s: now_s,
                active_pct: 100.0 * tick_record.active_ids.len() as f64
                    / network.node_count() as f64,
                energy_mean: tick_record.battery_mean,
                energy_stddev: tick_record.battery_stddev,
                alive: tick_record.alive_count,
            });
        }

        trace.push(tick_record);
    }
}

/// Grouped-maximum envelope check: split `values` into consecutive groups of
/// `window` and require the group maxima to be non-increasing.
pub fn envelope_non_increasing(values: &[f64], window: usize) -> bool {
    assert!(window >= 1);
    let maxima: Vec<f64> = values
        .chunks(window)
        .map(|c| c.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    maxima.windows(2).all(|w| w[1] <= w[0])
}
