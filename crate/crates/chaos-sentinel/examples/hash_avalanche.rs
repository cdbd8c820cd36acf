//! Avalanche behavior of the chaotic-iteration digest: flipping any single
//! input bit rewrites about half the output bits.
//!
//! ```bash
//! cargo run --example hash_avalanche
//! ```

use chaos_sentinel::ci_primitives::{ci_hash, SplitMix};

fn main() {
    println!("digest of empty message: {:#018x}", ci_hash(b""));
    println!("digest of \"sentinel\":   {:#018x}", ci_hash(b"sentinel"));
    println!("digest of \"sentinem\":   {:#018x}", ci_hash(b"sentinem"));

    let mut rng = SplitMix::new(7);
    let trials = 10_000u64;
    let mut histogram = [0u64; 65];
    let mut total = 0u64;
    for _ in 0..trials {
        let len = 1 + rng.next_below(64) as usize;
        let mut msg: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
        let before = ci_hash(&msg);
        let flip = rng.next_below(8 * len as u64) as usize;
        msg[flip / 8] ^= 1 << (flip % 8);
        let flipped = (before ^ ci_hash(&msg)).count_ones() as usize;
        histogram[flipped] += 1;
        total += flipped as u64;
    }
    println!(
        "mean output bits flipped per single input-bit flip: {:.3} of 64",
        total as f64 / trials as f64
    );
    println!("distance histogram (bits flipped -> trials):");
    for (distance, &count) in histogram.iter().enumerate() {
        if count > 0 {
            println!("  {distance:>2}: {}", "#".repeat((count as usize / 20).max(1)));
        }
    }
}
