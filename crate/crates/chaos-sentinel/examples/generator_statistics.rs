//! Statistical behavior of the CI(X,Y) generator: bit balance, byte-block
//! uniformity, and exactly-uniform strategy-index drawing.
//!
//! ```bash
//! cargo run --example generator_statistics
//! ```

use chaos_sentinel::ci_primitives::{CiGenerator, SecretKey};
use chaos_sentinel::stats::chi_square_uniform_test;

fn main() {
    let key = SecretKey::derive(2024, 0);
    let mut generator = CiGenerator::from_key(&key, 0, 0);

    let bits = 1_000_000usize;
    let ones: usize = (0..bits).map(|_| generator.next_bit() as usize).sum();
    println!("ones fraction over {bits} bits: {:.6}", ones as f64 / bits as f64);

    let mut counts = vec![0u64; 256];
    for _ in 0..100_000 {
        counts[generator.next_bits_u64(8) as usize] += 1;
    }
    let (stat, dof, p) = chi_square_uniform_test(&counts);
    println!("byte blocks: chi2 = {stat:.1} ({dof} dof), p = {p:.4}");

    // a 7-way index draw uses rejection sampling, so it is exactly uniform
    let mut index_counts = [0u64; 7];
    let draws = 700_000u64;
    for _ in 0..draws {
        index_counts[generator.draw_strategy_index(7)] += 1;
    }
    let (stat, dof, p) = chi_square_uniform_test(&index_counts);
    println!("strategy indices over {draws} draws: chi2 = {stat:.2} ({dof} dof), p = {p:.4}");
    for (i, &c) in index_counts.iter().enumerate() {
        println!("  index {i}: frequency {:.5}", c as f64 / draws as f64);
    }
}
