//! Randomness and digest services: key expansion, the base 64-bit generator,
//! the CI-driven pseudo-random generator, exact-uniform index drawing, and
//! the avalanche hash. Everything here is deterministic from its seeds; a
//! replayed trace reproduces every random decision bit for bit.

use crate::ci_core::{BitState, StrategyStream};

/// 2^64 / phi, the splitmix increment.
const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
/// xorshift64* output multiplier.
const XS_MULT: u64 = 0x2545_F491_4F6C_DD1D;
/// Replacement for a derived all-zero generator state.
const NONZERO_FALLBACK: u64 = 0x6A09_E667_F3BC_C908;
/// Initial hash state.
const HASH_IV: u64 = GOLDEN;
/// Cells in a CI generator's internal state.
pub const CI_STATE_LEN: usize = 64;
/// Rejection-sampling redraw cap; exceeding it means the bit source is broken.
const REJECTION_CAP: u32 = 10_000;

/// Splitmix-style finalizer: shift-xor-multiply with fixed odd constants.
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    z
}

/// Counter-based stream of mixed words; the seed-expansion workhorse and the
/// simulation-owned randomness source (kept distinct from node secrets).
#[derive(Clone, Debug)]
pub struct SplitMix {
    state: u64,
}

impl SplitMix {
    pub fn new(seed: u64) -> Self {
        SplitMix { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix64(self.state)
    }

    /// Uniform in [0, 1) from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Uniform in [0, bound) by widening multiply (bias < 2^-32 for the
    /// bounds used here).
    pub fn next_below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// 128-bit secret parameter seeding a node's generators.
///
/// Deliberately opaque: its value never appears in traces or debug output.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct SecretKey {
    hi: u64,
    lo: u64,
}

impl std::fmt::Debug for SecretKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "SecretKey(<redacted>)")
    }
}

impl SecretKey {
    pub fn from_parts(hi: u64, lo: u64) -> Self {
        SecretKey { hi, lo }
    }

    pub fn from_u128(v: u128) -> Self {
        SecretKey { hi: (v >> 64) as u64, lo: v as u64 }
    }

    /// Key number `index` of the deterministic family rooted at `seed`.
    pub fn derive(seed: u64, index: u64) -> Self {
        let mut sm = SplitMix::new(seed ^ mix64(index));
        SecretKey { hi: sm.next_u64(), lo: sm.next_u64() }
    }
}

/// xorshift64*-style generator: the xorshift triple permutes the nonzero
/// 64-bit states (full period), the multiply whitens the output.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseGenerator {
    state: u64,
}

impl BaseGenerator {
    /// A zero seed is replaced by a fixed nonzero constant.
    pub fn new(seed: u64) -> Self {
        BaseGenerator { state: if seed == 0 { NONZERO_FALLBACK } else { seed } }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// One step: state <- xorshift(state), output = state * XS_MULT.
    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        self.state = s;
        s.wrapping_mul(XS_MULT)
    }
}

/// The output map of the base generator applied as a mixing permutation
/// (used by the hash between message bytes and at finalization).
fn base_mix(x: u64) -> u64 {
    let mut s = x;
    s ^= s << 13;
    s ^= s >> 7;
    s ^= s << 17;
    s.wrapping_mul(XS_MULT)
}

/// Expand a secret key into a node's two base-generator seeds and an
/// initial CI state of `state_len` cells. Distinct (node_id, tag) pairs give
/// unrelated outputs.
pub fn expand_key(
    key: &SecretKey,
    node_id: u64,
    domain_tag: u8,
    state_len: usize,
) -> (BaseGenerator, BaseGenerator, BitState) {
    let z0 = mix64(key.lo ^ node_id ^ ((domain_tag as u64) << 56));
    let z1 = mix64(z0 ^ key.hi);
    let mut sm = SplitMix::new(z1);
    let x = BaseGenerator::new(sm.next_u64());
    let y = BaseGenerator::new(sm.next_u64());
    let mut bits = Vec::with_capacity(state_len);
    while bits.len() < state_len {
        let word = sm.next_u64();
        for j in 0..64 {
            if bits.len() == state_len {
                break;
            }
            bits.push((word >> j) & 1 == 1);
        }
    }
    (x, y, BitState::from_bools(&bits))
}

/// The CI(X, Y) generator: the X stream supplies strategy indices for
/// chaotic iterations under the vectorial negation on a 64-cell internal
/// state, and the Y stream selects which orbit states are published.
///
/// A published state sits k*(L+1) single-cell iterations after the previous
/// one, k in {1,2,3} from Y: a full mixing pass of the hypercube walk per
/// published word, with an odd step total so the state's overall parity
/// decorrelates too. Strategy indices come from the upper bits of the X
/// output (the xorshift-multiply construction's low bits are a weak linear
/// subsequence and must not drive the walk).
#[derive(Clone, Debug)]
pub struct CiGenerator {
    x_gen: BaseGenerator,
    y_gen: BaseGenerator,
    internal: BitState,
    buffer: Vec<bool>,
    buffer_pos: usize,
}

impl CiGenerator {
    pub fn new(x_gen: BaseGenerator, y_gen: BaseGenerator, internal: BitState) -> Self {
        CiGenerator { x_gen, y_gen, internal, buffer: Vec::new(), buffer_pos: 0 }
    }

    /// Node generator derived from a secret key.
    pub fn from_key(key: &SecretKey, node_id: u64, domain_tag: u8) -> Self {
        let (x, y, internal) = expand_key(key, node_id, domain_tag, CI_STATE_LEN);
        CiGenerator::new(x, y, internal)
    }

    /// Re-key from a sensed-value digest and the tick it was captured at.
    /// The pending bit buffer is discarded.
    pub fn reseed_from_digest(&mut self, digest: u64, tick: u64) {
        let z = mix64(digest ^ mix64(tick));
        let mut sm = SplitMix::new(z);
        self.x_gen = BaseGenerator::new(sm.next_u64());
        self.y_gen = BaseGenerator::new(sm.next_u64());
        let mut bits = Vec::with_capacity(CI_STATE_LEN);
        let word = sm.next_u64();
        for j in 0..CI_STATE_LEN {
            bits.push((word >> j) & 1 == 1);
        }
        self.internal = BitState::from_bools(&bits);
        self.buffer.clear();
        self.buffer_pos = 0;
    }

    fn publish_round(&mut self) {
        let l = self.internal.len();
        let k = 1 + (self.y_gen.next_u64() % 3) as usize;
        for _ in 0..k * (l + 1) {
            let idx = ((self.x_gen.next_u64() >> 32) % l as u64) as usize;
            self.internal.flip(idx);
        }
        self.buffer.clear();
        self.buffer_pos = 0;
        self.buffer.extend(self.internal.iter());
    }

    /// Next published bit.
    pub fn next_bit(&mut self) -> bool {
        if self.buffer_pos >= self.buffer.len() {
            self.publish_round();
        }
        let b = self.buffer[self.buffer_pos];
        self.buffer_pos += 1;
        b
    }

    /// Next `n` published bits, oldest first.
    pub fn next_bits(&mut self, n: usize) -> Vec<bool> {
        (0..n).map(|_| self.next_bit()).collect()
    }

    /// Next `n <= 64` published bits packed least-significant first.
    pub fn next_bits_u64(&mut self, n: usize) -> u64 {
        assert!(n <= 64);
        let mut v = 0u64;
        for j in 0..n {
            v |= (self.next_bit() as u64) << j;
        }
        v
    }

    /// Uniform f64 in [0, 1) from 53 published bits.
    pub fn next_f64(&mut self) -> f64 {
        self.next_bits_u64(53) as f64 / (1u64 << 53) as f64
    }

    /// Fill a byte slice with published bits, LSB-first within each byte.
    pub fn fill_bytes(&mut self, out: &mut [u8]) {
        for byte in out.iter_mut() {
            *byte = self.next_bits_u64(8) as u8;
        }
    }

    /// Exactly uniform cell index in [0, len): draw ceil(log2 len) bits,
    /// reject values >= len, redraw. Panics after a hard redraw cap, which
    /// only a broken bit source can reach.
    pub fn draw_strategy_index(&mut self, len: usize) -> usize {
        assert!(len >= 1);
        if len == 1 {
            return 0;
        }
        let bits = usize::BITS as usize - (len - 1).leading_zeros() as usize;
        for _ in 0..REJECTION_CAP {
            let v = self.next_bits_u64(bits) as usize;
            if v < len {
                return v;
            }
        }
        panic!("draw_strategy_index: {REJECTION_CAP} consecutive rejections; generator is broken");
    }
}

/// A CI generator's exact-uniform index draws exposed as a strategy stream,
/// so pseudo-random orbits run through the same interface as explicit
/// prefixes.
#[derive(Clone, Debug)]
pub struct GeneratorStrategy {
    generator: CiGenerator,
    len: usize,
    head: usize,
}

impl GeneratorStrategy {
    pub fn new(mut generator: CiGenerator, len: usize) -> Self {
        let head = generator.draw_strategy_index(len);
        GeneratorStrategy { generator, len, head }
    }
}

impl StrategyStream for GeneratorStrategy {
    fn peek(&self) -> usize {
        self.head
    }

    fn advance(&mut self) {
        self.head = self.generator.draw_strategy_index(self.len);
    }
}

/// 64-bit digest with avalanche behavior, built from chaotic iterations.
///
/// The message is consumed bit by bit as strategy indices (input bit b at
/// overall position i flips cell (7i + 31b) mod 64); the base generator's
/// mixing permutation runs after every byte; finalization absorbs the bit
/// length and applies two further mixing rounds.
pub fn ci_hash(message: &[u8]) -> u64 {
    let mut state = HASH_IV;
    let mut bit_index: u64 = 0;
    for &byte in message {
        for j in 0..8 {
            let b = (byte >> j) & 1;
            let idx = (bit_index.wrapping_mul(7) + (b as u64) * 31) % 64;
            state ^= 1u64 << idx;
            bit_index += 1;
        }
        state = base_mix(state);
    }
    state ^= bit_index;
    state = base_mix(state);
    base_mix(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{chi_square_uniform_test, serial_correlation};

    #[test]
    fn base_next_single_step_oracle() {
        // hand evaluation of the three shifts and multiply from state 1
        let mut g = BaseGenerator::new(1);
        let out = g.next_u64();
        assert_eq!(g.state(), 0x4082_2041);
        assert_eq!(out, 0xBAFA_CF62_4F01_C45D);
    }

    #[test]
    fn base_generator_state_never_zero() {
        assert_eq!(BaseGenerator::new(0).state(), NONZERO_FALLBACK);
        let mut g = BaseGenerator::new(0xDEAD_BEEF);
        for _ in 0..100_000 {
            g.next_u64();
            assert_ne!(g.state(), 0);
        }
    }

    #[test]
    fn base_generator_has_no_short_cycles() {
        // the xorshift triple is a bijection on nonzero states, so a state
        // can never recur within a window far below the full period
        let mut g = BaseGenerator::new(0xFEED_F00D);
        let mut seen = std::collections::HashSet::with_capacity(100_000);
        for _ in 0..100_000 {
            assert!(seen.insert(g.state()), "state recurred");
            g.next_u64();
        }
    }

    #[test]
    fn base_generator_serial_correlation_is_small() {
        let mut g = BaseGenerator::new(0x1234_5678_9ABC_DEF0);
        let samples: Vec<f64> = (0..100_000)
            .map(|_| g.next_u64() as f64 / u64::MAX as f64)
            .collect();
        let rho = serial_correlation(&samples);
        assert!(rho.abs() < 0.01, "rho = {rho}");
    }

    #[test]
    fn expand_key_is_deterministic_and_tag_sensitive() {
        let key = SecretKey::from_parts(0xAA, 0xBB);
        let (x1, y1, s1) = expand_key(&key, 3, 0, 16);
        let (x2, y2, s2) = expand_key(&key, 3, 0, 16);
        assert_eq!(x1.state(), x2.state());
        assert_eq!(y1.state(), y2.state());
        assert_eq!(s1, s2);
        let (x3, y3, _) = expand_key(&key, 3, 1, 16);
        assert_ne!(x1.state(), x3.state());
        assert_ne!(y1.state(), y3.state());
        let (x4, _, _) = expand_key(&key, 4, 0, 16);
        assert_ne!(x1.state(), x4.state());
    }

    #[test]
    fn expand_key_seed_bits_are_balanced() {
        // per-bit frequency of both seeds over 1e5 keys stays within 1% of 1/2
        let keys = 100_000u64;
        let mut counts = [[0u64; 64]; 4];
        for i in 0..keys {
            let key = SecretKey::derive(0xFEED, i);
            for (slot, node_id) in [(0usize, 0u64), (2, 9)] {
                let (x, y, _) = expand_key(&key, node_id, 0, 8);
                for (j, seed) in [x.state(), y.state()].into_iter().enumerate() {
                    for (bit, slot_count) in counts[slot + j].iter_mut().enumerate() {
                        *slot_count += (seed >> bit) & 1;
                    }
                }
            }
        }
        for lane in &counts {
            for &c in lane {
                let f = c as f64 / keys as f64;
                assert!((0.49..=0.51).contains(&f), "bit frequency {f}");
            }
        }
    }

    #[test]
    fn ci_generator_streams_are_deterministic() {
        let key = SecretKey::from_parts(7, 9);
        let mut a = CiGenerator::from_key(&key, 5, 0);
        let mut b = CiGenerator::from_key(&key, 5, 0);
        assert_eq!(a.next_bits(1000), b.next_bits(1000));
    }

    #[test]
    fn ci_generator_stream_is_granularity_independent() {
        // reading bit by bit, in 13-bit gulps, or byte-packed yields one and
        // the same underlying stream
        let key = SecretKey::from_parts(31, 41);
        let mut bitwise = CiGenerator::from_key(&key, 2, 0);
        let mut chunked = CiGenerator::from_key(&key, 2, 0);
        let mut packed = CiGenerator::from_key(&key, 2, 0);
        let reference: Vec<bool> = (0..1040).map(|_| bitwise.next_bit()).collect();
        let mut from_chunks = Vec::new();
        for _ in 0..80 {
            let v = chunked.next_bits_u64(13);
            for j in 0..13 {
                from_chunks.push((v >> j) & 1 == 1);
            }
        }
        assert_eq!(reference, from_chunks);
        let mut bytes = [0u8; 130];
        packed.fill_bytes(&mut bytes);
        let from_bytes: Vec<bool> = bytes
            .iter()
            .flat_map(|b| (0..8).map(move |j| (b >> j) & 1 == 1))
            .collect();
        assert_eq!(reference, from_bytes);
    }

    #[test]
    fn ci_generator_ones_fraction() {
        let key = SecretKey::from_parts(0x0123_4567_89AB_CDEF, 0xFEDC_BA98_7654_3210);
        let mut g = CiGenerator::from_key(&key, 0, 0);
        let n = 1_000_000usize;
        let ones: usize = (0..n).map(|_| g.next_bit() as usize).sum();
        let f = ones as f64 / n as f64;
        assert!((0.499..=0.501).contains(&f), "ones fraction {f}");
    }

    #[test]
    fn ci_generator_block_chi_square() {
        let key = SecretKey::from_parts(0xCAFE, 0xF00D);
        let mut g = CiGenerator::from_key(&key, 1, 0);
        let mut counts = vec![0u64; 256];
        for _ in 0..100_000 {
            counts[g.next_bits_u64(8) as usize] += 1;
        }
        let (stat, dof, p) = chi_square_uniform_test(&counts);
        assert_eq!(dof, 255);
        assert!(p > 0.01, "chi2 = {stat}, p = {p}");
    }

    #[test]
    fn draw_strategy_index_degenerate_and_power_of_two() {
        let key = SecretKey::from_parts(1, 2);
        let mut g = CiGenerator::from_key(&key, 0, 0);
        for _ in 0..100 {
            assert_eq!(g.draw_strategy_index(1), 0);
        }
        // L = 8 uses exactly 3 bits and can never reject: the bit stream
        // advances by exactly 3 per draw
        let mut a = CiGenerator::from_key(&key, 3, 0);
        let mut b = CiGenerator::from_key(&key, 3, 0);
        let mut drawn = Vec::new();
        for _ in 0..1000 {
            drawn.push(a.draw_strategy_index(8));
        }
        let raw = b.next_bits(3000);
        for (i, &d) in drawn.iter().enumerate() {
            let v = raw[3 * i] as usize | (raw[3 * i + 1] as usize) << 1 | (raw[3 * i + 2] as usize) << 2;
            assert_eq!(d, v);
        }
    }

    #[test]
    fn draw_strategy_index_uniform_l7() {
        let key = SecretKey::from_parts(11, 13);
        let mut g = CiGenerator::from_key(&key, 2, 0);
        let draws = 700_000u64;
        let mut counts = [0u64; 7];
        for _ in 0..draws {
            counts[g.draw_strategy_index(7)] += 1;
        }
        for &c in &counts {
            let f = c as f64 / draws as f64;
            assert!((f - 1.0 / 7.0).abs() < 0.005, "frequency {f}");
        }
        let (_, _, p) = chi_square_uniform_test(&counts);
        assert!(p > 0.01, "p = {p}");
    }

    #[test]
    fn generator_strategy_matches_direct_draws() {
        let key = SecretKey::from_parts(61, 67);
        let mut direct = CiGenerator::from_key(&key, 4, 0);
        let mut stream = GeneratorStrategy::new(CiGenerator::from_key(&key, 4, 0), 5);
        for _ in 0..500 {
            assert_eq!(stream.next_index(), direct.draw_strategy_index(5));
        }
    }

    #[test]
    fn generator_strategy_drives_chaotic_iterations() {
        use crate::ci_core::{ci_iterate, BitState, VectorialNegation};
        let key = SecretKey::from_parts(71, 73);
        let mut strategy = GeneratorStrategy::new(CiGenerator::from_key(&key, 0, 0), 6);
        let x0 = BitState::from_integer(0b101010, 6);
        let x = ci_iterate(&x0, &mut strategy, &VectorialNegation, 64).unwrap();
        // parity oracle against an independent replay of the same draws
        let mut replay = CiGenerator::from_key(&key, 0, 0);
        let mut counts = [0usize; 6];
        for _ in 0..64 {
            counts[replay.draw_strategy_index(6)] += 1;
        }
        for (j, &c) in counts.iter().enumerate() {
            assert_eq!(x.get(j), x0.get(j) ^ (c % 2 == 1), "cell {j}");
        }
    }

    #[test]
    fn reseed_changes_stream_and_clears_buffer() {
        let key = SecretKey::from_parts(21, 22);
        let mut a = CiGenerator::from_key(&key, 0, 0);
        let mut b = CiGenerator::from_key(&key, 0, 0);
        a.next_bits(13); // partially consumed buffer
        a.reseed_from_digest(0x1111, 5);
        b.reseed_from_digest(0x1111, 5);
        assert_eq!(a.next_bits(500), b.next_bits(500));
        // equal digests at different ticks still give distinct seeds
        let mut c = CiGenerator::from_key(&key, 0, 0);
        c.reseed_from_digest(0x1111, 6);
        assert_ne!(b.next_bits(64), c.next_bits(64));
    }

    #[test]
    fn hash_is_deterministic() {
        assert_eq!(ci_hash(b"abc"), ci_hash(b"abc"));
        assert_ne!(ci_hash(b"abc"), ci_hash(b"abd"));
    }

    #[test]
    fn hash_empty_message_finalization_oracle() {
        // finalization of the IV alone, computed independently by hand:
        // state = IV, absorb zero length, two mixing rounds
        assert_eq!(ci_hash(b""), 0x12F0_FCAC_5A03_F58A);
        // single zero byte: eight index flips (7i mod 64), one byte mix,
        // absorb length 8, two mixing rounds
        assert_eq!(ci_hash(&[0u8]), 0x0B52_B996_4928_8FBC);
    }

    #[test]
    fn hash_length_extension_of_zero_bits_changes_digest() {
        assert_ne!(ci_hash(&[0u8]), ci_hash(&[0u8, 0u8]));
    }

    #[test]
    fn hash_avalanche() {
        let mut rng = SplitMix::new(0xA5A5_5A5A);
        let trials = 10_000u64;
        let mut total_distance = 0u64;
        let mut per_bit = [0u64; 64];
        for _ in 0..trials {
            let len = 1 + (rng.next_below(64)) as usize;
            let mut msg: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
            let before = ci_hash(&msg);
            let flip = rng.next_below(8 * len as u64) as usize;
            msg[flip / 8] ^= 1 << (flip % 8);
            let diff = before ^ ci_hash(&msg);
            total_distance += diff.count_ones() as u64;
            for (j, slot) in per_bit.iter_mut().enumerate() {
                *slot += (diff >> j) & 1;
            }
        }
        let mean = total_distance as f64 / trials as f64;
        assert!((mean - 32.0).abs() <= 1.5, "mean digest distance {mean}");
        for &c in &per_bit {
            let f = c as f64 / trials as f64;
            assert!((0.45..=0.55).contains(&f), "per-bit flip probability {f}");
        }
    }
}
