//! Phase-space distance on (strategy, state) points and desk-scale empirical
//! experiments for sensitivity and reachability of the negation dynamics.
//!
//! The distance splits into an integer part counting differing cells and a
//! fractional part comparing strategy prefixes digit by digit; both halves
//! and their interaction are exercised by the metric property checks.

use serde::Serialize;

use crate::ci_core::{ci_step, gf_step, BitState, PrefixStrategy, VectorialNegation};
use crate::ci_primitives::SplitMix;
use crate::error::{Error, Result};

/// Default truncation length for strategy prefixes. Terms beyond this depth
/// contribute less than 10^-60 to the distance, far below any tolerance used
/// in this crate.
pub const DEFAULT_PREFIX_LEN: usize = 64;

/// A point of the phase space: a finite strategy prefix together with a state.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    prefix: Vec<usize>,
    state: BitState,
}

impl PhasePoint {
    /// Prefixes longer than [`DEFAULT_PREFIX_LEN`] are truncated: terms that
    /// deep contribute less than 10^-60 to any distance.
    pub fn new(mut prefix: Vec<usize>, state: BitState) -> Result<Self> {
        if prefix.is_empty() {
            return Err(Error::InvalidConfig("strategy prefix must be non-empty".into()));
        }
        prefix.truncate(DEFAULT_PREFIX_LEN);
        for &t in &prefix {
            if t >= state.len() {
                return Err(Error::IndexOutOfRange { index: t, len: state.len() });
            }
        }
        Ok(PhasePoint { prefix, state })
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn state(&self) -> &BitState {
        &self.state
    }
}

/// Hamming distance between two equal-length states (the state half of the
/// phase-space distance).
pub fn de_distance(e1: &BitState, e2: &BitState) -> Result<usize> {
    e1.hamming(e2)
}

/// Strategy half of the distance: (9/L) * sum |s1_k - s2_k| / 10^k over the
/// common prefix, terms beyond the prefix treated as equal. Lies in [0, 1).
///
/// L = 1 is rejected: the only strategy is constant zero and the fractional
/// digits carry no information.
pub fn ds_distance(s1: &[usize], s2: &[usize], len: usize) -> Result<f64> {
    if len < 2 {
        return Err(Error::DegenerateLength(len));
    }
    assert_eq!(s1.len(), s2.len(), "prefixes must have equal length");
    for &t in s1.iter().chain(s2) {
        assert!(t < len, "strategy term out of range");
    }
    let mut sum = 0.0;
    let mut scale = 1.0;
    for (a, b) in s1.iter().zip(s2) {
        scale /= 10.0;
        sum += (*a as f64 - *b as f64).abs() * scale;
    }
    Ok(sum * 9.0 / len as f64)
}

/// Full phase-space distance: differing-cell count plus the strategy
/// fraction. Its floor is exactly the Hamming distance of the states.
pub fn distance(p1: &PhasePoint, p2: &PhasePoint) -> Result<f64> {
    if p1.prefix.len() != p2.prefix.len() {
        return Err(Error::LengthMismatch {
            expected: p1.prefix.len(),
            got: p2.prefix.len(),
        });
    }
    let de = de_distance(&p1.state, &p2.state)?;
    let ds = ds_distance(&p1.prefix, &p2.prefix, p1.state.len())?;
    Ok(de as f64 + ds)
}

/// Outcome of the sensitivity experiment: orbits started from the same state
/// whose strategies differ in their first term.
#[derive(Clone, Debug, Serialize)]
pub struct SensitivityReport {
    pub experiment: &'static str,
    pub state_len: usize,
    pub trials: u64,
    /// Smallest step at which the two orbits' states differ, over all trials.
    pub min_divergence_step: usize,
    pub max_divergence_step: usize,
    /// State distance observed at the first divergence step, min over trials.
    pub min_de_at_divergence: usize,
}

/// For random pairs with equal states and strategies differing in the first
/// term, iterate both orbits and record when their states first differ.
///
/// With the vectorial negation the two one-step images differ in exactly the
/// two distinct flipped cells, so divergence is always at step 1.
pub fn sensitivity_experiment(state_len: usize, trials: u64, seed: u64) -> Result<SensitivityReport> {
    if !(2..=16).contains(&state_len) {
        return Err(Error::InvalidConfig(format!(
            "sensitivity experiment is desk-scale: need 2 <= L <= 16, got {state_len}"
        )));
    }
    let mut rng = SplitMix::new(seed);
    let mut min_step = usize::MAX;
    let mut max_step = 0usize;
    let mut min_de = usize::MAX;
    let horizon = 4 * state_len;
    for _ in 0..trials {
        let state = BitState::from_integer(rng.next_u64() & ((1 << state_len) - 1), state_len);
        let mut tail: Vec<usize> = (0..horizon)
            .map(|_| (rng.next_u64() % state_len as u64) as usize)
            .collect();
        let first_a = (rng.next_u64() % state_len as u64) as usize;
        // force a different first term
        let first_b = (first_a + 1 + (rng.next_u64() % (state_len as u64 - 1)) as usize) % state_len;
        let mut terms_a = vec![first_a];
        terms_a.append(&mut tail.clone());
        let mut terms_b = vec![first_b];
        terms_b.append(&mut tail);
        let mut sa = PrefixStrategy::new(terms_a, state_len)?;
        let mut sb = PrefixStrategy::new(terms_b, state_len)?;
        let mut ea = state.clone();
        let mut eb = state;
        for step in 1..=horizon {
            let (sa2, ea2) = gf_step(sa, &ea, &VectorialNegation)?;
            let (sb2, eb2) = gf_step(sb, &eb, &VectorialNegation)?;
            sa = sa2;
            sb = sb2;
            ea = ea2;
            eb = eb2;
            let de = de_distance(&ea, &eb)?;
            if de >= 1 {
                min_step = min_step.min(step);
                max_step = max_step.max(step);
                min_de = min_de.min(de);
                break;
            }
        }
    }
    Ok(SensitivityReport {
        experiment: "sensitivity",
        state_len,
        trials,
        min_divergence_step: min_step,
        max_divergence_step: max_step,
        min_de_at_divergence: min_de,
    })
}

/// Outcome of the exhaustive reachability check on B^L.
#[derive(Clone, Debug, Serialize)]
pub struct ReachabilityReport {
    pub experiment: &'static str,
    pub state_len: usize,
    pub ordered_pairs: u64,
    pub all_reachable: bool,
    /// Longest strategy prefix any pair required.
    pub max_prefix_len: usize,
}

/// Constructive strategy from `from` to `to`: flip the differing cells in
/// ascending index order.
pub fn steering_strategy(from: &BitState, to: &BitState) -> Result<Vec<usize>> {
    if from.len() != to.len() {
        return Err(Error::LengthMismatch { expected: from.len(), got: to.len() });
    }
    Ok((0..from.len()).filter(|&j| from.get(j) != to.get(j)).collect())
}

/// Verify that every ordered state pair of B^L is connected by a strategy
/// prefix of length at most L under the negation dynamics.
pub fn reachability_check(state_len: usize) -> Result<ReachabilityReport> {
    if !(1..=8).contains(&state_len) {
        return Err(Error::InvalidConfig(format!(
            "reachability check is desk-scale: need 1 <= L <= 8, got {state_len}"
        )));
    }
    let n = 1u64 << state_len;
    let mut max_len = 0usize;
    for a in 0..n {
        for b in 0..n {
            let from = BitState::from_integer(a, state_len);
            let to = BitState::from_integer(b, state_len);
            let plan = steering_strategy(&from, &to)?;
            let mut x = from;
            for &s in &plan {
                x = ci_step(&x, s, &VectorialNegation)?;
            }
            if x != to {
                return Ok(ReachabilityReport {
                    experiment: "reachability",
                    state_len,
                    ordered_pairs: n * n,
                    all_reachable: false,
                    max_prefix_len: max_len,
                });
            }
            max_len = max_len.max(plan.len());
        }
    }
    Ok(ReachabilityReport {
        experiment: "reachability",
        state_len,
        ordered_pairs: n * n,
        all_reachable: true,
        max_prefix_len: max_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ci_core::{vectorial_negation, StrategyStream};
    use std::collections::VecDeque;

    fn bs(bits: &[u8]) -> BitState {
        BitState::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn de_examples() {
        assert_eq!(de_distance(&bs(&[0, 1, 1, 0]), &bs(&[1, 1, 0, 0])).unwrap(), 2);
        let x = bs(&[1, 0, 1]);
        assert_eq!(de_distance(&x, &x).unwrap(), 0);
        assert_eq!(de_distance(&x, &vectorial_negation(&x)).unwrap(), 3);
        assert!(de_distance(&bs(&[0, 1]), &bs(&[0, 1, 1])).is_err());
    }

    #[test]
    fn ds_direct_evaluation() {
        // L=4: agree at term 1, differ by 1 at term 2, agree after:
        // 9/4 * 1/100 = 0.0225
        let d = ds_distance(&[0, 2, 1], &[0, 3, 1], 4).unwrap();
        assert!((d - 0.0225).abs() < 1e-15, "{d}");
        assert_eq!(ds_distance(&[1, 2], &[1, 2], 4).unwrap(), 0.0);
    }

    #[test]
    fn ds_rejects_degenerate_length() {
        assert!(matches!(ds_distance(&[0], &[0], 1), Err(Error::DegenerateLength(1))));
    }

    #[test]
    fn ds_prefix_property() {
        // strictly below 10^-k iff the first k terms agree
        let mut rng = SplitMix::new(7);
        let l = 9usize;
        for _ in 0..500 {
            let k_agree = (rng.next_u64() % 12) as usize;
            let depth = k_agree + 1 + (rng.next_u64() % 4) as usize;
            let mut a = Vec::new();
            let mut b = Vec::new();
            for i in 0..depth {
                let t = (rng.next_u64() % l as u64) as usize;
                a.push(t);
                if i < k_agree {
                    b.push(t);
                } else if i == k_agree {
                    b.push((t + 1 + (rng.next_u64() % (l as u64 - 1)) as usize) % l);
                } else {
                    b.push((rng.next_u64() % l as u64) as usize);
                }
            }
            let d = ds_distance(&a, &b, l).unwrap();
            for k in 0..=depth {
                let first_k_equal = a[..k] == b[..k];
                assert_eq!(d < 10f64.powi(-(k as i32)), first_k_equal || d == 0.0,
                    "k={k} a={a:?} b={b:?} d={d}");
            }
        }
    }

    #[test]
    fn ds_digitwise_property_small_alphabet() {
        // for L <= 10 each per-term difference is a single decimal digit, so
        // the k-th digit of ds/(9/L) is exactly |a_k - b_k|: nonzero digits
        // pinpoint differing terms
        let mut rng = SplitMix::new(11);
        let l = 8usize;
        for _ in 0..200 {
            let depth = 6;
            let a: Vec<usize> = (0..depth).map(|_| (rng.next_u64() % l as u64) as usize).collect();
            let b: Vec<usize> = (0..depth).map(|_| (rng.next_u64() % l as u64) as usize).collect();
            let mut frac = ds_distance(&a, &b, l).unwrap() * l as f64 / 9.0;
            for k in 0..depth {
                frac *= 10.0;
                let digit = (frac + 1e-9).floor();
                frac -= digit;
                assert_eq!(digit as usize, a[k].abs_diff(b[k]), "digit {}", k + 1);
                if digit != 0.0 {
                    assert_ne!(a[k], b[k]);
                }
            }
        }
    }

    #[test]
    fn distance_floor_is_hamming() {
        let mut rng = SplitMix::new(3);
        for _ in 0..10_000 {
            let l = 2 + (rng.next_u64() % 9) as usize;
            let depth = 1 + (rng.next_u64() % 8) as usize;
            let pa = random_point(&mut rng, l, depth);
            let pb = random_point(&mut rng, l, depth);
            let d = distance(&pa, &pb).unwrap();
            let de = de_distance(pa.state(), pb.state()).unwrap();
            assert_eq!(d.floor() as usize, de);
            let ds = ds_distance(pa.prefix(), pb.prefix(), l).unwrap();
            assert!((d - d.floor() - ds).abs() < 1e-12);
        }
    }

    fn random_point(rng: &mut SplitMix, l: usize, depth: usize) -> PhasePoint {
        let state = BitState::from_integer(rng.next_u64() & ((1 << l) - 1), l);
        let prefix = (0..depth).map(|_| (rng.next_u64() % l as u64) as usize).collect();
        PhasePoint::new(prefix, state).unwrap()
    }

    #[test]
    fn metric_axioms_on_random_triples() {
        let mut rng = SplitMix::new(5);
        for _ in 0..10_000 {
            let l = 2 + (rng.next_u64() % 7) as usize;
            let depth = 1 + (rng.next_u64() % 6) as usize;
            let a = random_point(&mut rng, l, depth);
            let b = random_point(&mut rng, l, depth);
            let c = random_point(&mut rng, l, depth);
            let dab = distance(&a, &b).unwrap();
            let dba = distance(&b, &a).unwrap();
            let dac = distance(&a, &c).unwrap();
            let dcb = distance(&c, &b).unwrap();
            assert_eq!(dab, dba, "symmetry");
            assert_eq!(distance(&a, &a).unwrap(), 0.0, "identity");
            assert!((a == b) == (dab == 0.0), "separation");
            assert!(dab <= dac + dcb + 1e-12, "triangle: {dab} > {dac} + {dcb}");
        }
    }

    #[test]
    fn sensitivity_diverges_at_step_one() {
        let report = sensitivity_experiment(8, 500, 99).unwrap();
        assert_eq!(report.min_divergence_step, 1);
        assert_eq!(report.max_divergence_step, 1);
        assert!(report.min_de_at_divergence >= 1);
    }

    #[test]
    fn sensitivity_two_cell_example() {
        // equal state, strategies (0,2,2,...) vs (1,2,2,...): the one-step
        // images differ in cells 0 and 1
        let e = bs(&[0, 1, 0]);
        let sa = PrefixStrategy::new(vec![0, 2, 2], 3).unwrap();
        let sb = PrefixStrategy::new(vec![1, 2, 2], 3).unwrap();
        let (_, ea) = gf_step(sa, &e, &VectorialNegation).unwrap();
        let (_, eb) = gf_step(sb, &e, &VectorialNegation).unwrap();
        assert_eq!(de_distance(&ea, &eb).unwrap(), 2);
    }

    #[test]
    fn identical_strategies_never_diverge() {
        let e = bs(&[1, 0, 1, 1]);
        let mut sa = CyclicReplay(VecDeque::from(vec![2, 0, 1, 3]));
        let mut sb = CyclicReplay(VecDeque::from(vec![2, 0, 1, 3]));
        let mut ea = e.clone();
        let mut eb = e;
        for _ in 0..32 {
            ea = ci_step(&ea, sa.next_index(), &VectorialNegation).unwrap();
            eb = ci_step(&eb, sb.next_index(), &VectorialNegation).unwrap();
            assert_eq!(de_distance(&ea, &eb).unwrap(), 0);
        }
    }

    struct CyclicReplay(VecDeque<usize>);
    impl StrategyStream for CyclicReplay {
        fn peek(&self) -> usize { *self.0.front().unwrap() }
        fn advance(&mut self) { let t = self.0.pop_front().unwrap(); self.0.push_back(t); }
    }

    #[test]
    fn sensitivity_exhaustive_at_l3() {
        // exhaustively: all states, all ordered pairs of distinct first terms
        let l = 3;
        for state_bits in 0..8u64 {
            let e = BitState::from_integer(state_bits, l);
            for a in 0..l {
                for b in 0..l {
                    if a == b { continue; }
                    let sa = PrefixStrategy::new(vec![a, 0], l).unwrap();
                    let sb = PrefixStrategy::new(vec![b, 0], l).unwrap();
                    let (_, ea) = gf_step(sa, &e, &VectorialNegation).unwrap();
                    let (_, eb) = gf_step(sb, &e, &VectorialNegation).unwrap();
                    assert!(de_distance(&ea, &eb).unwrap() >= 1);
                }
            }
        }
    }

    #[test]
    fn reachability_exhaustive_small() {
        let report = reachability_check(3).unwrap();
        assert!(report.all_reachable);
        assert_eq!(report.ordered_pairs, 64);
        assert_eq!(report.max_prefix_len, 3);
    }

    #[test]
    fn reachability_identity_and_negation_extremes() {
        let x = bs(&[1, 0, 1, 0]);
        assert!(steering_strategy(&x, &x).unwrap().is_empty());
        assert_eq!(steering_strategy(&x, &vectorial_negation(&x)).unwrap().len(), 4);
    }

    /// Independent oracle: breadth-first search over the state graph confirms
    /// the constructive strategy's maximum length is optimal.
    #[test]
    fn reachability_bfs_oracle() {
        let l = 4usize;
        let n = 1usize << l;
        for start in 0..n {
            // BFS from `start` flipping one bit per edge
            let mut dist = vec![usize::MAX; n];
            dist[start] = 0;
            let mut queue = VecDeque::from(vec![start]);
            while let Some(u) = queue.pop_front() {
                for j in 0..l {
                    let v = u ^ (1 << j);
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            for (goal, &want) in dist.iter().enumerate() {
                let plan = steering_strategy(
                    &BitState::from_integer(start as u64, l),
                    &BitState::from_integer(goal as u64, l),
                ).unwrap();
                assert_eq!(plan.len(), want, "constructive plan is shortest");
            }
        }
    }

    #[test]
    fn deep_prefixes_truncate_to_the_documented_cap() {
        let p = PhasePoint::new(vec![0; 1000], BitState::from_integer(0, 4)).unwrap();
        assert_eq!(p.prefix().len(), DEFAULT_PREFIX_LEN);
    }

    #[test]
    fn reports_serialize_as_json_records() {
        let report = reachability_check(2).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"experiment\":\"reachability\""));
        assert!(json.contains("\"state_len\":2"));
    }
}
