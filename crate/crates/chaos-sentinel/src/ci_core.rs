//! Chaotic iterations on Boolean vectors: the single-cell update rule, the
//! vectorial negation, and the topological maps `F` / `G` built from them.
//!
//! A system of `L` Boolean cells evolves by updating, at each step, only the
//! cell named by the strategy; with the vectorial negation as update function
//! this dynamical system is the one the rest of the crate builds on.

use crate::error::{Error, Result};

/// Fixed-length ordered vector of Boolean cells.
///
/// Bit `j` is the j-th least-significant bit of the integer encoding, so
/// `BitState::from_bools(&[false, true, true])` encodes the integer 6.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitState {
    bits: Vec<bool>,
}

impl std::fmt::Debug for BitState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BitState(")?;
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        write!(f, ")")
    }
}

impl BitState {
    /// State of `len` cells, all zero.
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BitState needs at least one cell");
        BitState { bits: vec![false; len] }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        assert!(!bits.is_empty(), "BitState needs at least one cell");
        BitState { bits: bits.to_vec() }
    }

    /// Binary decomposition of `value` as `len` cells, least-significant first.
    pub fn from_integer(value: u64, len: usize) -> Self {
        assert!((1..=64).contains(&len));
        BitState {
            bits: (0..len).map(|j| (value >> j) & 1 == 1).collect(),
        }
    }

    /// Integer whose binary decomposition is this state (inverse of
    /// `from_integer` for lengths up to 64).
    pub fn as_integer(&self) -> u64 {
        assert!(self.bits.len() <= 64, "state too long for integer encoding");
        self.bits
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &b)| acc | ((b as u64) << j))
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        false // length is >= 1 by construction
    }

    pub fn get(&self, j: usize) -> bool {
        self.bits[j]
    }

    pub fn set(&mut self, j: usize, v: bool) {
        self.bits[j] = v;
    }

    pub fn flip(&mut self, j: usize) {
        self.bits[j] = !self.bits[j];
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        self.bits.iter().copied()
    }

    /// Number of cells in which the two states differ.
    pub fn hamming(&self, other: &BitState) -> Result<usize> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count())
    }
}

/// Cell-index source driving chaotic iterations.
///
/// `peek` exposes the first term of the sequence and `advance` shifts the
/// sequence by one, so a stream is the pair (initial-term map, shift map)
/// packaged as a cursor.
pub trait StrategyStream {
    /// First term of the remaining sequence.
    fn peek(&self) -> usize;
    /// Drop the first term (shift).
    fn advance(&mut self);
    /// Read the first term and shift past it.
    fn next_index(&mut self) -> usize {
        let t = self.peek();
        self.advance();
        t
    }
}

/// Strategy backed by a finite list of terms; panics if read past the end.
#[derive(Clone, Debug)]
pub struct PrefixStrategy {
    terms: Vec<usize>,
    pos: usize,
}

impl PrefixStrategy {
    /// All terms must be valid cell indices for a state of length `len`.
    pub fn new(terms: Vec<usize>, len: usize) -> Result<Self> {
        for &t in &terms {
            if t >= len {
                return Err(Error::IndexOutOfRange { index: t, len });
            }
        }
        Ok(PrefixStrategy { terms, pos: 0 })
    }

    pub fn remaining(&self) -> usize {
        self.terms.len() - self.pos
    }
}

impl StrategyStream for PrefixStrategy {
    fn peek(&self) -> usize {
        self.terms[self.pos]
    }
    fn advance(&mut self) {
        assert!(self.pos < self.terms.len(), "strategy prefix exhausted");
        self.pos += 1;
    }
}

/// Strategy cycling forever through a finite list of terms.
#[derive(Clone, Debug)]
pub struct CyclicStrategy {
    terms: Vec<usize>,
    pos: usize,
}

impl CyclicStrategy {
    pub fn new(terms: Vec<usize>, len: usize) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidConfig("cyclic strategy needs terms".into()));
        }
        for &t in &terms {
            if t >= len {
                return Err(Error::IndexOutOfRange { index: t, len });
            }
        }
        Ok(CyclicStrategy { terms, pos: 0 })
    }
}

impl StrategyStream for CyclicStrategy {
    fn peek(&self) -> usize {
        self.terms[self.pos]
    }
    fn advance(&mut self) {
        self.pos = (self.pos + 1) % self.terms.len();
    }
}

/// Total map on Boolean vectors, evaluated one component at a time.
pub trait UpdateFunction {
    /// Component `i` of `f(x)`.
    fn component(&self, x: &BitState, i: usize) -> bool;

    /// Full image `f(x)`.
    fn apply(&self, x: &BitState) -> BitState {
        BitState::from_bools(
            &(0..x.len())
                .map(|i| self.component(x, i))
                .collect::<Vec<_>>(),
        )
    }
}

/// The vectorial negation: every component complemented.
#[derive(Clone, Copy, Debug, Default)]
pub struct VectorialNegation;

impl UpdateFunction for VectorialNegation {
    fn component(&self, x: &BitState, i: usize) -> bool {
        !x.get(i)
    }
}

/// Componentwise complement of a state.
pub fn vectorial_negation(x: &BitState) -> BitState {
    VectorialNegation.apply(x)
}

/// One chaotic iteration: every cell keeps its value except cell `s`,
/// which becomes component `s` of `f(x)`.
pub fn ci_step(x: &BitState, s: usize, f: &impl UpdateFunction) -> Result<BitState> {
    if s >= x.len() {
        return Err(Error::IndexOutOfRange { index: s, len: x.len() });
    }
    let mut out = x.clone();
    out.set(s, f.component(x, s));
    Ok(out)
}

/// `n` successive chaotic iterations consuming the first `n` strategy terms.
pub fn ci_iterate(
    x0: &BitState,
    strategy: &mut impl StrategyStream,
    f: &impl UpdateFunction,
    n: usize,
) -> Result<BitState> {
    let mut x = x0.clone();
    for _ in 0..n {
        let s = strategy.next_index();
        x = ci_step(&x, s, f)?;
    }
    Ok(x)
}

/// The map F_f(k, E): cell j keeps E_j when j != k and takes f(E)_k at j = k,
/// written literally with the discrete Boolean metric as Boolean algebra.
///
/// This is a second code path for the same update as `ci_step`; the two are
/// cross-checked in tests.
pub fn ff_map(k: usize, e: &BitState, f: &impl UpdateFunction) -> Result<BitState> {
    if k >= e.len() {
        return Err(Error::IndexOutOfRange { index: k, len: e.len() });
    }
    let fk = f.component(e, k);
    let bits: Vec<bool> = (0..e.len())
        .map(|j| {
            let delta = k != j; // discrete Boolean metric: 0 iff equal
            (e.get(j) && delta) || (fk && !delta)
        })
        .collect();
    Ok(BitState::from_bools(&bits))
}

/// One step of the phase-space map G_f: returns (shifted strategy,
/// F_f(first term, state)).
pub fn gf_step<S: StrategyStream>(
    mut s: S,
    e: &BitState,
    f: &impl UpdateFunction,
) -> Result<(S, BitState)> {
    let k = s.next_index();
    let e2 = ff_map(k, e, f)?;
    Ok((s, e2))
}
