//! The observing adversary: record the network for a while, build the
//! first-order wake-target model, and try to predict the future schedule.
//! Fully predictable on the round-robin baseline, chance-level on the
//! chaotic scheme.
//!
//! ```bash
//! cargo run --example observer_attack
//! ```

use chaos_sentinel::adversary::observer_attack;
use chaos_sentinel::ci_primitives::SecretKey;
use chaos_sentinel::scheduler::{
    synthetic_sensed, Network, RunTrace, SchedulerConfig, SchedulerPolicy,
};

fn trace_for(policy: SchedulerPolicy, ticks: usize) -> chaos_sentinel::Result<RunTrace> {
    let key = SecretKey::derive(99, 0);
    let cfg = SchedulerConfig {
        n_exp: 7,
        activation_fraction: 0.5,
        wake_ticks: 4,
        battery_init: u32::MAX,
        capture_cost: 1,
        policy,
        policy_seed: 4,
    };
    let mut net = Network::initialize(&key, &cfg)?;
    let mut sensed = synthetic_sensed(555);
    let mut trace = RunTrace::new(net.node_count());
    for _ in 0..ticks {
        trace.push(net.network_tick(&mut sensed));
    }
    Ok(trace)
}

fn main() -> chaos_sentinel::Result<()> {
    for policy in [
        SchedulerPolicy::Periodic,
        SchedulerPolicy::UniformRandom,
        SchedulerPolicy::Chaotic,
    ] {
        let trace = trace_for(policy, 800)?;
        let report = observer_attack(&trace, policy, 400)?;
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    println!("chance level for 128 nodes is {:.4}", 1.0 / 128.0);
    Ok(())
}
