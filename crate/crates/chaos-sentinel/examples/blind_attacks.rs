//! Blind and adaptive intrusion paths: straight-line, random walk, and the
//! coverage-aware planner, run against the live network.
//!
//! ```bash
//! cargo run --example blind_attacks
//! ```

use chaos_sentinel::adversary::{train_predictor, BlindWalker, CoverageGrid};
use chaos_sentinel::experiment::{run_batch, AttackKind, ExperimentSpec};
use chaos_sentinel::field_sim::{deploy, FieldConfig, Mobility};

fn main() -> chaos_sentinel::Result<()> {
    // a straight path across the diagonal takes 75 * sqrt(2) / 5 seconds
    let mut direct = BlindWalker::new(
        Mobility::ShortestPath,
        (0.0, 0.0),
        (75.0, 75.0),
        5.0,
        (75.0, 75.0),
        1,
    );
    let mut t = 0.0;
    while !direct.step(0.5) {
        t += 0.5;
    }
    println!("shortest path reached the target after {t:.1} s unopposed");

    // full attack experiments against the reference network
    let mut config = FieldConfig::reference_preset();
    config.n_exp = 5;
    config.battery_init = 60;
    config.sim_seed = 31;
    for attack in [AttackKind::ShortestPath, AttackKind::RandomWalk] {
        let dir = tempfile::tempdir().map_err(chaos_sentinel::Error::from)?;
        let mut spec = ExperimentSpec::new(config.clone(), dir.path().to_path_buf());
        spec.runs = 3;
        spec.key_seed = 8;
        spec.attack = attack;
        spec.policies = vec![chaos_sentinel::scheduler::SchedulerPolicy::Chaotic];
        let outcome = run_batch(&spec)?;
        let s = &outcome.summaries["chaotic"];
        println!(
            "{attack:?}: {} detections, mean stealth {:.1} s over {} runs",
            s.detections_total, s.mean_stealth_s, s.runs
        );
    }

    // the adaptive planner grades the field by predicted coverage
    let poses = deploy(&config, config.sim_seed);
    let trace = {
        use chaos_sentinel::ci_primitives::SecretKey;
        use chaos_sentinel::scheduler::{synthetic_sensed, Network, RunTrace, SchedulerConfig};
        let cfg = SchedulerConfig {
            n_exp: 5,
            activation_fraction: 0.5,
            wake_ticks: 4,
            battery_init: u32::MAX,
            capture_cost: 1,
            policy: chaos_sentinel::scheduler::SchedulerPolicy::Chaotic,
            policy_seed: 0,
        };
        let mut net = Network::initialize(&SecretKey::derive(8, 0), &cfg)?;
        let mut sensed = synthetic_sensed(31);
        let mut trace = RunTrace::new(net.node_count());
        for _ in 0..400 {
            trace.push(net.network_tick(&mut sensed));
        }
        trace
    };
    let model = train_predictor(&trace, 400)?;
    let grid = CoverageGrid::build(&model, &poses, 75.0, 75.0, config.aov_deg, config.sensing_range_m);
    let mut adaptive = BlindWalker::new(
        Mobility::Adaptive,
        (0.0, 37.5),
        (74.0, 37.5),
        5.0,
        (75.0, 75.0),
        2,
    )
    .with_grid(grid);
    let mut t = 0.0;
    for _ in 0..400 {
        if adaptive.step(0.5) {
            break;
        }
        t += 0.5;
    }
    println!(
        "adaptive planner crossed the field in {t:.1} s (arrived: {})",
        adaptive.has_arrived()
    );
    Ok(())
}
