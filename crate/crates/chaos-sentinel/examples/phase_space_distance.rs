//! The phase-space distance and the desk-scale dynamics experiments:
//! sensitivity to the first strategy term and exhaustive reachability.
//!
//! ```bash
//! cargo run --example phase_space_distance
//! ```

use chaos_sentinel::chaos_metrics::{
    de_distance, distance, ds_distance, reachability_check, sensitivity_experiment, PhasePoint,
};
use chaos_sentinel::ci_core::BitState;

fn main() -> chaos_sentinel::Result<()> {
    let a = PhasePoint::new(vec![0, 2, 1], BitState::from_integer(0b0110, 4))?;
    let b = PhasePoint::new(vec![0, 3, 1], BitState::from_integer(0b1110, 4))?;
    let de = de_distance(a.state(), b.state())?;
    let ds = ds_distance(a.prefix(), b.prefix(), 4)?;
    let d = distance(&a, &b)?;
    println!("state distance     de = {de}");
    println!("strategy distance  ds = {ds}");
    println!("total              d  = {d}  (floor recovers de: {})", d.floor() as usize == de);

    // orbits from the same state whose strategies differ in the first term
    // split apart after a single step
    let sensitivity = sensitivity_experiment(8, 1_000, 1)?;
    println!("{}", serde_json::to_string_pretty(&sensitivity)?);

    // every ordered state pair is connected by a prefix of at most L terms
    let reachability = reachability_check(3)?;
    println!("{}", serde_json::to_string_pretty(&reachability)?);
    Ok(())
}
