//! A four-node network traced tick by tick, with the global-state mirror
//! showing that the per-node protocol is one chaotic iteration system.
//!
//! ```bash
//! cargo run --example small_network_trace
//! ```

use chaos_sentinel::ci_core::{ci_step, BitState, VectorialNegation};
use chaos_sentinel::ci_primitives::SecretKey;
use chaos_sentinel::scheduler::{
    synthetic_sensed, Network, RunTrace, SchedulerConfig, SchedulerPolicy,
};

fn main() -> chaos_sentinel::Result<()> {
    let key = SecretKey::from_parts(0xC0FFEE, 0xBEEF);
    let cfg = SchedulerConfig {
        n_exp: 2,
        activation_fraction: 0.5,
        wake_ticks: 4,
        battery_init: 100,
        capture_cost: 1,
        policy: SchedulerPolicy::Chaotic,
        policy_seed: 0,
    };
    let mut net = Network::initialize(&key, &cfg)?;
    let mut sensed = synthetic_sensed(0xF1E1D);
    let mut trace = RunTrace::new(net.node_count());

    let mut mirror = net.global_state();
    println!("initial global state: {mirror:?}");
    for _ in 0..10 {
        let t = net.network_tick(&mut sensed);
        // replay this tick's resets and flips on the 8-cell global mirror
        for &(node, encoded) in &t.resets {
            let fresh = BitState::from_integer(encoded, net.n_exp);
            for j in 0..net.n_exp {
                mirror.set(node * net.n_exp + j, fresh.get(j));
            }
        }
        for &(node, cell) in &t.flips {
            mirror = ci_step(&mirror, node * net.n_exp + cell, &VectorialNegation)?;
        }
        println!(
            "tick {:>2}: active {:?} orders {:?} | mirror agrees: {}",
            t.tick,
            t.active_ids,
            t.orders,
            mirror == net.global_state()
        );
        trace.push(t);
    }

    println!("\nNDJSON trace:");
    print!("{}", trace.to_ndjson());
    Ok(())
}
