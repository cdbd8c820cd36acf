//! Chaotic iterations from first principles: states, strategies, single-cell
//! updates, and the phase-space map.
//!
//! ```bash
//! cargo run --example ci_walkthrough
//! ```

use chaos_sentinel::ci_core::{
    ci_iterate, ci_step, gf_step, vectorial_negation, BitState, CyclicStrategy, PrefixStrategy,
    VectorialNegation,
};

fn main() -> chaos_sentinel::Result<()> {
    // a 3-cell system; bit j is the j-th least-significant bit
    let x = BitState::from_integer(0b110, 3);
    println!("x            = {x:?} (integer {})", x.as_integer());
    println!("negation(x)  = {:?}", vectorial_negation(&x));

    // one chaotic iteration touches exactly the selected cell
    let y = ci_step(&x, 0, &VectorialNegation)?;
    println!("flip cell 0  = {y:?} (Hamming distance {})", x.hamming(&y)?);

    // iterating a strategy prefix: (0, 1, 0) from (0,0) lands on (0,1)
    let x0 = BitState::from_integer(0, 2);
    let mut strategy = PrefixStrategy::new(vec![0, 1, 0], 2)?;
    let x3 = ci_iterate(&x0, &mut strategy, &VectorialNegation, 3)?;
    println!("(0,0) under strategy 0,1,0 -> {x3:?}");

    // the phase-space map advances the strategy and updates the state in one
    // step; cycling every cell twice returns to the start
    let e0 = BitState::from_integer(0b0101, 4);
    let mut s = CyclicStrategy::new((0..4).collect(), 4)?;
    let mut e = e0.clone();
    for _ in 0..8 {
        let (s2, e2) = gf_step(s, &e, &VectorialNegation)?;
        s = s2;
        e = e2;
    }
    println!("two full cycles of G on {e0:?} -> {e:?} (back to start: {})", e == e0);
    Ok(())
}
