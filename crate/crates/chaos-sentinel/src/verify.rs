//! The self-check suite behind `chaos-sentinel verify`: uniformity,
//! avalanche, metric properties, chosen-key uniformity with its negative
//! control, and the small-instance scheduler consistency checks. Each check
//! returns a structured result so the CLI can print one pass/fail line per
//! property.

use serde::Serialize;

use crate::adversary::{cka_experiment, CkaParams};
use crate::chaos_metrics::{de_distance, distance, ds_distance, PhasePoint};
use crate::ci_core::{ci_step, BitState, VectorialNegation};
use crate::ci_primitives::{ci_hash, CiGenerator, SecretKey, SplitMix};
use crate::scheduler::{synthetic_sensed, Network, SchedulerConfig, SchedulerPolicy};
use crate::stats::chi_square_uniform_test;

/// Outcome of one verification check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, pass: bool, detail: String) -> Self {
        CheckResult { name, pass, detail }
    }
}

/// Run every check; all of them are deterministic.
pub fn run_all() -> Vec<CheckResult> {
    vec![
        prng_ones_fraction(),
        prng_block_uniformity(),
        strategy_index_uniformity(),
        hash_avalanche(),
        metric_floor_property(),
        metric_axioms(),
        ds_prefix_property(),
        cka_uniformity(),
        cka_negative_control(),
        selection_coverage(),
        scheduler_lockstep(),
        trace_determinism(),
    ]
}

pub fn prng_ones_fraction() -> CheckResult {
    let key = SecretKey::derive(0x0B17, 0);
    let mut g = CiGenerator::from_key(&key, 0, 0);
    let n = 1_000_000usize;
    let ones: usize = (0..n).map(|_| g.next_bit() as usize).sum();
    let f = ones as f64 / n as f64;
    CheckResult::new(
        "prng_ones_fraction",
        (0.499..=0.501).contains(&f),
        format!("ones fraction {f:.6} over {n} bits (want within [0.499, 0.501])"),
    )
}

pub fn prng_block_uniformity() -> CheckResult {
    let key = SecretKey::derive(0xB10C, 1);
    let mut g = CiGenerator::from_key(&key, 0, 0);
    let mut counts = vec![0u64; 256];
    for _ in 0..100_000 {
        counts[g.next_bits_u64(8) as usize] += 1;
    }
    let (stat, dof, p) = chi_square_uniform_test(&counts);
    CheckResult::new(
        "prng_block_uniformity",
        p > 0.01,
        format!("chi2 {stat:.1} ({dof} dof) over 1e5 byte blocks, p = {p:.4} (want > 0.01)"),
    )
}

pub fn strategy_index_uniformity() -> CheckResult {
    let key = SecretKey::derive(0x1D7, 2);
    let mut g = CiGenerator::from_key(&key, 0, 0);
    let draws = 700_000u64;
    let mut counts = [0u64; 7];
    for _ in 0..draws {
        counts[g.draw_strategy_index(7)] += 1;
    }
    let worst = counts
        .iter()
        .map(|&c| (c as f64 / draws as f64 - 1.0 / 7.0).abs())
        .fold(0.0, f64::max);
    let (stat, _, p) = chi_square_uniform_test(&counts);
    CheckResult::new(
        "strategy_index_uniformity",
        worst < 0.005 && p > 0.01,
        format!("7-way draw: worst |freq - 1/7| = {worst:.5}, chi2 {stat:.1}, p = {p:.4}"),
    )
}

pub fn hash_avalanche() -> CheckResult {
    let mut rng = SplitMix::new(0xA5A5_5A5A);
    let trials = 10_000u64;
    let mut total = 0u64;
    let mut per_bit = [0u64; 64];
    for _ in 0..trials {
        let len = 1 + rng.next_below(64) as usize;
        let mut msg: Vec<u8> = (0..len).map(|_| rng.next_u64() as u8).collect();
        let before = ci_hash(&msg);
        let flip = rng.next_below(8 * len as u64) as usize;
        msg[flip / 8] ^= 1 << (flip % 8);
        let diff = before ^ ci_hash(&msg);
        total += diff.count_ones() as u64;
        for (j, slot) in per_bit.iter_mut().enumerate() {
            *slot += (diff >> j) & 1;
        }
    }
    let mean = total as f64 / trials as f64;
    let (lo, hi) = per_bit.iter().fold((1.0f64, 0.0f64), |(lo, hi), &c| {
        let f = c as f64 / trials as f64;
        (lo.min(f), hi.max(f))
    });
    CheckResult::new(
        "hash_avalanche",
        (mean - 32.0).abs() <= 1.5 && lo >= 0.45 && hi <= 0.55,
        format!("mean digest distance {mean:.3}/64 (want 32 +/- 1.5); per-bit flip prob in [{lo:.3}, {hi:.3}] (want within [0.45, 0.55])"),
    )
}

fn random_point(rng: &mut SplitMix, l: usize, depth: usize) -> PhasePoint {
    let state = BitState::from_integer(rng.next_u64() & ((1 << l) - 1), l);
    let prefix = (0..depth).map(|_| (rng.next_u64() % l as u64) as usize).collect();
    PhasePoint::new(prefix, state).expect("valid point")
}

pub fn metric_floor_property() -> CheckResult {
    let mut rng = SplitMix::new(0xF100);
    let mut violations = 0u64;
    let trials = 10_000u64;
    for _ in 0..trials {
        let l = 2 + (rng.next_u64() % 9) as usize;
        let depth = 1 + (rng.next_u64() % 8) as usize;
        let a = random_point(&mut rng, l, depth);
        let b = random_point(&mut rng, l, depth);
        let d = distance(&a, &b).expect("compatible");
        let de = de_distance(a.state(), b.state()).expect("equal lengths");
        if d.floor() as usize != de {
            violations += 1;
        }
    }
    CheckResult::new(
        "metric_floor_property",
        violations == 0,
        format!("floor(d) = Hamming distance on {trials} random pairs, {violations} violations"),
    )
}

pub fn metric_axioms() -> CheckResult {
    let mut rng = SplitMix::new(0xA110);
    let mut violations = 0u64;
    let trials = 10_000u64;
    for _ in 0..trials {
        let l = 2 + (rng.next_u64() % 7) as usize;
        let depth = 1 + (rng.next_u64() % 6) as usize;
        let a = random_point(&mut rng, l, depth);
        let b = random_point(&mut rng, l, depth);
        let c = random_point(&mut rng, l, depth);
        let dab = distance(&a, &b).unwrap();
        let dba = distance(&b, &a).unwrap();
        let dac = distance(&a, &c).unwrap();
        let dcb = distance(&c, &b).unwrap();
        let daa = distance(&a, &a).unwrap();
        if dab != dba || daa != 0.0 || dab > dac + dcb + 1e-12 || ((a == b) != (dab == 0.0)) {
            violations += 1;
        }
    }
    CheckResult::new(
        "metric_axioms",
        violations == 0,
        format!("symmetry/identity/triangle on {trials} random triples, {violations} violations"),
    )
}

pub fn ds_prefix_property() -> CheckResult {
    let mut rng = SplitMix::new(0xD5);
    let l = 9usize;
    let mut violations = 0u64;
    let mut checks = 0u64;
    for _ in 0..2_000 {
        let k_agree = (rng.next_u64() % 13) as usize;
        let depth = k_agree + 1 + (rng.next_u64() % 3) as usize;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..depth {
            let t = (rng.next_u64() % l as u64) as usize;
            a.push(t);
            b.push(if i < k_agree {
                t
            } else if i == k_agree {
                (t + 1 + (rng.next_u64() % (l as u64 - 1)) as usize) % l
            } else {
                (rng.next_u64() % l as u64) as usize
            });
        }
        let d = ds_distance(&a, &b, l).expect("valid");
        for k in 0..=depth.min(12) {
            checks += 1;
            let first_k_equal = a[..k] == b[..k];
            if (d < 10f64.powi(-(k as i32))) != first_k_equal {
                violations += 1;
            }
        }
    }
    CheckResult::new(
        "ds_prefix_property",
        violations == 0,
        format!("ds < 10^-k iff k-prefix equality, {checks} checks up to k = 12, {violations} violations"),
    )
}

pub fn cka_uniformity() -> CheckResult {
    let mut detail = String::new();
    let mut pass = true;
    for &horizon in &[1u64, 2, 4, 8] {
        let report = cka_experiment(&CkaParams {
            n_exp: 2,
            keys: 100_000,
            horizon,
            policy: SchedulerPolicy::Chaotic,
            key_seed: 0xCCAA,
        })
        .expect("valid params");
        pass &= report.verdict == "pass";
        detail.push_str(&format!("h{horizon}: p = {:.4}; ", report.p_value));
    }
    detail.push_str("(want all > 0.01)");
    CheckResult::new("cka_uniformity", pass, detail)
}

pub fn cka_negative_control() -> CheckResult {
    let report = cka_experiment(&CkaParams {
        n_exp: 2,
        keys: 100_000,
        horizon: 8,
        policy: SchedulerPolicy::Periodic,
        key_seed: 0xCCAB,
    })
    .expect("valid params");
    CheckResult::new(
        "cka_negative_control",
        report.verdict == "fail" && report.p_value < 1e-6,
        format!("periodic control p = {:.3e} (want < 1e-6)", report.p_value),
    )
}

pub fn selection_coverage() -> CheckResult {
    let cfg = SchedulerConfig {
        n_exp: 7,
        activation_fraction: 0.5,
        wake_ticks: 4,
        battery_init: u32::MAX,
        capture_cost: 1,
        policy: SchedulerPolicy::Chaotic,
        policy_seed: 0,
    };
    let mut counts = vec![0u64; 128];
    let mut total = 0u64;
    let mut key_index = 0u64;
    while total < 100_000 {
        let key = SecretKey::derive(0xC0FFEE, key_index);
        key_index += 1;
        let mut net = Network::initialize(&key, &cfg).expect("valid config");
        let mut sensed = synthetic_sensed(key_index);
        for _ in 0..60 {
            let t = net.network_tick(&mut sensed);
            for &(_, target) in &t.orders {
                counts[target] += 1;
                total += 1;
            }
        }
    }
    let (stat, dof, p) = chi_square_uniform_test(&counts);
    CheckResult::new(
        "selection_coverage",
        p > 0.01,
        format!("{total} wake selections over {key_index} keys: chi2 {stat:.1} ({dof} dof), p = {p:.4} (want > 0.01)"),
    )
}

pub fn scheduler_lockstep() -> CheckResult {
    // the per-node protocol and its global-state encoding stay in lockstep
    let key = SecretKey::from_parts(0x0DDB, 0xA11);
    let cfg = SchedulerConfig {
        n_exp: 2,
        activation_fraction: 0.5,
        wake_ticks: 4,
        battery_init: 100,
        capture_cost: 1,
        policy: SchedulerPolicy::Chaotic,
        policy_seed: 1,
    };
    let mut net = Network::initialize(&key, &cfg).expect("valid config");
    let mut sensed = synthetic_sensed(42);
    let mut mirror = net.global_state();
    let mut agreed = true;
    for _ in 0..10 {
        let t = net.network_tick(&mut sensed);
        for &(node, encoded) in &t.resets {
            let fresh = BitState::from_integer(encoded, net.n_exp);
            for j in 0..net.n_exp {
                mirror.set(node * net.n_exp + j, fresh.get(j));
            }
        }
        for &(node, cell) in &t.flips {
            mirror = ci_step(&mirror, node * net.n_exp + cell, &VectorialNegation).expect("in range");
        }
        agreed &= mirror == net.global_state();
    }
    CheckResult::new(
        "scheduler_lockstep",
        agreed,
        "global-state encoding reproduces 10 protocol ticks at N=2".to_string(),
    )
}

pub fn trace_determinism() -> CheckResult {
    let key = SecretKey::from_parts(0xDE7, 0xE12);
    let cfg = SchedulerConfig {
        n_exp: 3,
        activation_fraction: 0.5,
        wake_ticks: 4,
        battery_init: 50,
        capture_cost: 1,
        policy: SchedulerPolicy::Chaotic,
        policy_seed: 3,
    };
    let run = || {
        let mut net = Network::initialize(&key, &cfg).expect("valid config");
        let mut sensed = synthetic_sensed(7);
        let mut trace = crate::scheduler::RunTrace::new(net.node_count());
        for _ in 0..80 {
            trace.push(net.network_tick(&mut sensed));
        }
        trace.to_ndjson()
    };
    let a = run();
    let b = run();
    CheckResult::new(
        "trace_determinism",
        a == b,
        "identical seeds reproduce the trace byte for byte".to_string(),
    )
}
