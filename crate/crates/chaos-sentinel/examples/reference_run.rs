//! The full 128-node reference experiment: ten runs per policy, CSV series
//! for active percentage, stealth time (raw and window-20), and energy
//! dispersion, written to ./out/reference.
//!
//! ```bash
//! cargo run --release --example reference_run
//! ```

use chaos_sentinel::experiment::{run_batch, ExperimentSpec};
use chaos_sentinel::field_sim::FieldConfig;

fn main() -> chaos_sentinel::Result<()> {
    let mut config = FieldConfig::reference_preset();
    config.sim_seed = 1337;
    let out = std::path::PathBuf::from("out/reference");
    let mut spec = ExperimentSpec::new(config, out.clone());
    spec.runs = 10;
    spec.key_seed = 42;

    let outcome = run_batch(&spec)?;
    println!("wrote {} files to {}", outcome.files.len(), out.display());
    for s in outcome.summaries.values() {
        println!(
            "{:>8}: mean stealth {:.1} s ({} detections), lifetime {:.0} s, half-active {:.0} s",
            s.policy, s.mean_stealth_s, s.detections_total, s.mean_lifetime_s, s.mean_half_active_s
        );
    }
    let c = &outcome.summaries["chaotic"];
    let r = &outcome.summaries["random"];
    let n = c.energy_stddev_curve.len().min(r.energy_stddev_curve.len());
    let favorable = (0..n)
        .filter(|&i| c.energy_stddev_curve[i] <= r.energy_stddev_curve[i])
        .count();
    println!(
        "energy dispersion: chaotic <= random at {favorable}/{n} snapshots ({:.0}%)",
        100.0 * favorable as f64 / n as f64
    );
    Ok(())
}
