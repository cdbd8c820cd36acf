//! Experiment presets, batch running, and result emission: per-run and
//! aggregated CSV series, NDJSON traces, and attack reports. Every file
//! embeds the resolved configuration so results are reproducible from the
//! artifact alone.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::adversary::{
    cka_experiment, observer_attack, train_predictor, AttackOutcome, CkaParams, CoverageGrid,
    PredictorReport,
};
use crate::ci_primitives::{CiGenerator, SecretKey};
use crate::error::{Error, Result};
use crate::field_sim::{deploy, run_simulation_with_grid, FieldConfig, Mobility, SimResult};
use crate::scheduler::SchedulerPolicy;

/// Attack mode attached to a batch run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    /// Plain surveillance run (scan-line intrusions).
    None,
    ScanLine,
    RandomWalk,
    ShortestPath,
    Adaptive,
    /// Train the first-order predictor on each trace and report accuracy.
    Observer,
    /// Chosen-key uniformity experiment (no field runs).
    Cka,
}

impl std::str::FromStr for AttackKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(AttackKind::None),
            "scanline" => Ok(AttackKind::ScanLine),
            "random" => Ok(AttackKind::RandomWalk),
            "shortest" => Ok(AttackKind::ShortestPath),
            "adaptive" => Ok(AttackKind::Adaptive),
            "observer" => Ok(AttackKind::Observer),
            "cka" => Ok(AttackKind::Cka),
            other => Err(Error::InvalidConfig(format!("unknown attack {other:?}"))),
        }
    }
}

/// A fully resolved batch: which configuration, how many runs, which
/// policies, where results go.
#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub config: FieldConfig,
    pub runs: u32,
    pub key_seed: u64,
    pub policies: Vec<SchedulerPolicy>,
    pub attack: AttackKind,
    pub out_dir: PathBuf,
    /// Also write the full NDJSON trace of every run.
    pub write_traces: bool,
}

impl ExperimentSpec {
    pub fn new(config: FieldConfig, out_dir: PathBuf) -> Self {
        ExperimentSpec {
            config,
            runs: 10,
            key_seed: 42,
            policies: vec![SchedulerPolicy::Chaotic, SchedulerPolicy::UniformRandom],
            attack: AttackKind::None,
            out_dir,
            write_traces: false,
        }
    }
}

/// Everything the config header of an emitted file records.
#[derive(Serialize)]
struct FileHeader<'a> {
    version: &'static str,
    config: &'a FieldConfig,
    policy: &'a str,
    runs: u32,
    key_seed: u64,
    attack: AttackKind,
}

/// Per-policy summary used by callers and written as JSON.
#[derive(Clone, Debug, Serialize)]
pub struct PolicySummary {
    pub policy: String,
    pub runs: u32,
    pub mean_stealth_s: f64,
    pub per_run_mean_stealth_s: Vec<f64>,
    pub mean_lifetime_s: f64,
    pub per_run_lifetime_s: Vec<f64>,
    pub mean_half_active_s: f64,
    pub detections_total: u64,
    /// Mean over runs of the energy-stddev snapshot curve.
    pub energy_stddev_curve: Vec<f64>,
    /// Mean over runs of the active-percentage snapshot curve.
    pub active_pct_curve: Vec<f64>,
    pub snapshot_times_s: Vec<f64>,
    pub deadlocked_runs: u32,
}

/// Batch outcome: summaries per policy plus every file written.
#[derive(Debug, Default)]
pub struct BatchOutcome {
    pub summaries: BTreeMap<String, PolicySummary>,
    pub files: Vec<PathBuf>,
    pub reports: Vec<String>,
}

fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn csv_with_header(header_line: &str, header: &FileHeader<'_>, rows: &[String]) -> Result<String> {
    let mut out = String::new();
    out.push_str(header_line);
    out.push('\n');
    out.push_str("# ");
    out.push_str(&serde_json::to_string(header)?);
    out.push('\n');
    for row in rows {
        out.push_str(row);
        out.push('\n');
    }
    Ok(out)
}

fn fmt_f64(v: f64) -> String {
    // shortest roundtrip formatting keeps files byte-stable across runs
    format!("{v}")
}

/// Seconds until the active percentage first drops to half its initial
/// value; falls back to the run's end when it never does.
pub fn half_active_time_s(result: &SimResult, t0_s: f64) -> f64 {
    let snaps = &result.metrics.snapshots;
    if snaps.is_empty() {
        return 0.0;
    }
    let target = snaps[0].active_pct / 2.0;
    snaps
        .iter()
        .find(|s| s.active_pct <= target)
        .map(|s| s.time_s)
        .unwrap_or(result.ticks_run as f64 * t0_s)
}

/// Run `spec.runs` simulations per policy and write per-run plus aggregated
/// CSV series (active %, stealth raw and window-20, energy stddev), traces
/// on request, and the attack reports.
pub fn run_batch(spec: &ExperimentSpec) -> Result<BatchOutcome> {
    spec.config.validate()?;
    if spec.runs == 0 {
        return Err(Error::InvalidConfig("need at least one run".into()));
    }
    fs::create_dir_all(&spec.out_dir)?;
    let mut outcome = BatchOutcome::default();

    if spec.attack == AttackKind::Cka {
        // exhaustive state enumeration up to N=2; marginal bounds above,
        // with the key budget scaled to keep the run interactive
        let keys = if spec.config.n_exp <= 2 { 100_000 } else { 20_000 };
        for policy in &spec.policies {
            let report = cka_experiment(&CkaParams {
                n_exp: spec.config.n_exp,
                keys,
                horizon: 8,
                policy: *policy,
                key_seed: spec.key_seed,
            })?;
            let path = spec.out_dir.join(format!("cka_{}.json", policy.name()));
            write_report(&path, &report, &mut outcome)?;
        }
        return Ok(outcome);
    }

    let mobility = match spec.attack {
        AttackKind::RandomWalk => Mobility::RandomWalk,
        AttackKind::ShortestPath => Mobility::ShortestPath,
        AttackKind::Adaptive => Mobility::Adaptive,
        _ => spec.config.mobility,
    };

    for policy in &spec.policies {
        let mut config = spec.config.clone();
        config.policy = *policy;
        config.mobility = mobility;
        let mut results = Vec::with_capacity(spec.runs as usize);
        for run_index in 0..spec.runs {
            let mut run_config = config.clone();
            run_config.sim_seed = config.sim_seed.wrapping_add(run_index as u64);
            let key = SecretKey::derive(spec.key_seed, run_index as u64);
            // the adaptive attacker first observes the network under the
            // plain scan-line run, then plans through the coverage it
            // learned (poses are known under the open-design assumption)
            let grid = if spec.attack == AttackKind::Adaptive {
                let mut observe = run_config.clone();
                observe.mobility = Mobility::ScanLine;
                observe.sim_seed = run_config.sim_seed ^ 0x0B5E_57ED;
                let observed = run_simulation_with_grid(&observe, &key, None)?;
                if observed.trace.is_empty() {
                    None
                } else {
                    let model = train_predictor(&observed.trace, observed.trace.len())?;
                    let poses = deploy(&run_config, run_config.sim_seed);
                    Some(CoverageGrid::build(
                        &model,
                        &poses,
                        run_config.width_m,
                        run_config.height_m,
                        run_config.aov_deg,
                        run_config.sensing_range_m,
                    ))
                }
            } else {
                None
            };
            let result = run_simulation_with_grid(&run_config, &key, grid.as_ref())?;
            emit_run_files(spec, &run_config, policy.name(), run_index, &result, &mut outcome)?;
            results.push(result);
        }
        if matches!(
            spec.attack,
            AttackKind::RandomWalk | AttackKind::ShortestPath | AttackKind::Adaptive
        ) {
            let report = blind_attack_report(spec.attack, policy.name(), &results);
            let path = spec
                .out_dir
                .join(format!("attack_{}_{}.json", attack_kind_name(spec.attack), policy.name()));
            write_report(&path, &report, &mut outcome)?;
        }
        let summary = summarize_policy(policy.name(), spec, &results);
        emit_aggregates(spec, &config, policy.name(), &results, &summary, &mut outcome)?;

        if spec.attack == AttackKind::Observer {
            // train on the first half of each run's trace, score on the rest
            for (run_index, result) in results.iter().enumerate() {
                let window = result.trace.len() / 2;
                if window == 0 {
                    continue;
                }
                let report: PredictorReport =
                    observer_attack(&result.trace, *policy, window)?;
                let path = spec
                    .out_dir
                    .join(format!("observer_{}_run{run_index}.json", policy.name()));
                write_report(&path, &report, &mut outcome)?;
            }
        }
        outcome.summaries.insert(policy.name().to_string(), summary);
    }
    Ok(outcome)
}

fn attack_kind_name(kind: AttackKind) -> &'static str {
    match kind {
        AttackKind::None => "none",
        AttackKind::ScanLine => "scanline",
        AttackKind::RandomWalk => "random_walk",
        AttackKind::ShortestPath => "shortest_path",
        AttackKind::Adaptive => "adaptive",
        AttackKind::Observer => "observer",
        AttackKind::Cka => "cka",
    }
}

/// Attempt-level outcomes of a target-seeking attack batch.
#[derive(Serialize)]
struct BlindAttackReport {
    experiment: &'static str,
    kind: &'static str,
    policy: String,
    attempts: u64,
    reached_target: u64,
    detected: u64,
    mean_stealth_s: f64,
    outcomes: Vec<AttackOutcome>,
}

fn blind_attack_report(kind: AttackKind, policy: &str, results: &[SimResult]) -> BlindAttackReport {
    let name = attack_kind_name(kind);
    let mut outcomes = Vec::new();
    for r in results {
        for a in &r.metrics.attack_attempts {
            outcomes.push(AttackOutcome {
                attack_kind: name.to_string(),
                stealth_time_s: a.stealth_s,
                reached_target: a.reached_target,
                predictor_accuracy: None,
            });
        }
    }
    let attempts = outcomes.len() as u64;
    let reached = outcomes.iter().filter(|o| o.reached_target).count() as u64;
    let mean = if outcomes.is_empty() {
        0.0
    } else {
        outcomes.iter().map(|o| o.stealth_time_s).sum::<f64>() / outcomes.len() as f64
    };
    BlindAttackReport {
        experiment: "blind_attack",
        kind: name,
        policy: policy.to_string(),
        attempts,
        reached_target: reached,
        detected: attempts - reached,
        mean_stealth_s: mean,
        outcomes,
    }
}

fn write_report<T: Serialize>(path: &Path, report: &T, outcome: &mut BatchOutcome) -> Result<()> {
    let json = serde_json::to_string_pretty(report)?;
    atomic_write(path, &json)?;
    outcome.files.push(path.to_path_buf());
    outcome.reports.push(json);
    Ok(())
}

fn emit_run_files(
    spec: &ExperimentSpec,
    config: &FieldConfig,
    policy: &str,
    run_index: u32,
    result: &SimResult,
    outcome: &mut BatchOutcome,
) -> Result<()> {
    let header = FileHeader {
        version: env!("CARGO_PKG_VERSION"),
        config,
        policy,
        runs: spec.runs,
        key_seed: spec.key_seed,
        attack: spec.attack,
    };
    let base = |name: &str| spec.out_dir.join(format!("{policy}_run{run_index}_{name}"));

    let rows: Vec<String> = result
        .metrics
        .snapshots
        .iter()
        .map(|s| format!("{},{}", fmt_f64(s.time_s), fmt_f64(s.active_pct)))
        .collect();
    let path = base("active.csv");
    atomic_write(&path, &csv_with_header("time_s,active_pct", &header, &rows)?)?;
    outcome.files.push(path);

    let rows: Vec<String> = result
        .metrics
        .snapshots
        .iter()
        .map(|s| {
            format!(
                "{},{},{}",
                fmt_f64(s.time_s),
                fmt_f64(s.energy_mean),
                fmt_f64(s.energy_stddev)
            )
        })
        .collect();
    let path = base("energy.csv");
    atomic_write(&path, &csv_with_header("time_s,energy_mean,energy_stddev", &header, &rows)?)?;
    outcome.files.push(path);

    let rows: Vec<String> = result
        .metrics
        .stealth_events
        .iter()
        .map(|e| format!("{},{}", fmt_f64(e.time_s), fmt_f64(e.stealth_s)))
        .collect();
    let path = base("stealth.csv");
    atomic_write(&path, &csv_with_header("time_s,stealth_s", &header, &rows)?)?;
    outcome.files.push(path);

    let rows: Vec<String> = result
        .metrics
        .stealth_window
        .iter()
        .map(|e| format!("{},{}", fmt_f64(e.time_s), fmt_f64(e.stealth_s)))
        .collect();
    let path = base("stealth_window20.csv");
    atomic_write(&path, &csv_with_header("time_s,stealth_window20_s", &header, &rows)?)?;
    outcome.files.push(path);

    if spec.write_traces {
        let path = base("trace.ndjson");
        atomic_write(&path, &result.trace.to_ndjson())?;
        outcome.files.push(path);
    }
    Ok(())
}

fn summarize_policy(policy: &str, spec: &ExperimentSpec, results: &[SimResult]) -> PolicySummary {
    let t0 = spec.config.t0_s;
    let per_run_mean_stealth: Vec<f64> = results
        .iter()
        .map(|r| r.metrics.mean_stealth().unwrap_or(0.0))
        .collect();
    let per_run_lifetime: Vec<f64> = results.iter().map(|r| r.ticks_run as f64 * t0).collect();
    let half: Vec<f64> = results.iter().map(|r| half_active_time_s(r, t0)).collect();
    let detections: u64 = results.iter().map(|r| r.metrics.stealth_events.len() as u64).sum();
    let deadlocked = results
        .iter()
        .filter(|r| r.terminal == crate::scheduler::TerminalState::IdleDeadlock)
        .count() as u32;

    // snapshot-index-aligned means over runs that reached each index
    let max_snaps = results.iter().map(|r| r.metrics.snapshots.len()).max().unwrap_or(0);
    let mut energy_curve = Vec::with_capacity(max_snaps);
    let mut active_curve = Vec::with_capacity(max_snaps);
    let mut times = Vec::with_capacity(max_snaps);
    for i in 0..max_snaps {
        let at: Vec<&crate::field_sim::Snapshot> = results
            .iter()
            .filter_map(|r| r.metrics.snapshots.get(i))
            .collect();
        let n = at.len() as f64;
        energy_curve.push(at.iter().map(|s| s.energy_stddev).sum::<f64>() / n);
        active_curve.push(at.iter().map(|s| s.active_pct).sum::<f64>() / n);
        times.push((i as f64 + 1.0) * crate::field_sim::SNAPSHOT_PERIOD_S);
    }

    let mean = |v: &[f64]| if v.is_empty() { 0.0 } else { v.iter().sum::<f64>() / v.len() as f64 };
    PolicySummary {
        policy: policy.to_string(),
        runs: spec.runs,
        mean_stealth_s: mean(&per_run_mean_stealth),
        per_run_mean_stealth_s: per_run_mean_stealth,
        mean_lifetime_s: mean(&per_run_lifetime),
        per_run_lifetime_s: per_run_lifetime,
        mean_half_active_s: mean(&half),
        detections_total: detections,
        energy_stddev_curve: energy_curve,
        active_pct_curve: active_curve,
        snapshot_times_s: times,
        deadlocked_runs: deadlocked,
    }
}

fn emit_aggregates(
    spec: &ExperimentSpec,
    config: &FieldConfig,
    policy: &str,
    results: &[SimResult],
    summary: &PolicySummary,
    outcome: &mut BatchOutcome,
) -> Result<()> {
    let header = FileHeader {
        version: env!("CARGO_PKG_VERSION"),
        config,
        policy,
        runs: spec.runs,
        key_seed: spec.key_seed,
        attack: spec.attack,
    };

    // aggregated curves: mean and stddev across runs per snapshot index
    let max_snaps = summary.snapshot_times_s.len();
    let mut active_rows = Vec::with_capacity(max_snaps);
    let mut energy_rows = Vec::with_capacity(max_snaps);
    for i in 0..max_snaps {
        let at: Vec<&crate::field_sim::Snapshot> = results
            .iter()
            .filter_map(|r| r.metrics.snapshots.get(i))
            .collect();
        let n_runs = at.len();
        let actives: Vec<f64> = at.iter().map(|s| s.active_pct).collect();
        let stddevs: Vec<f64> = at.iter().map(|s| s.energy_stddev).collect();
        let (am, asd) = crate::stats::mean_stddev(&actives);
        let (em, esd) = crate::stats::mean_stddev(&stddevs);
        let t = summary.snapshot_times_s[i];
        active_rows.push(format!(
            "{},{},{},{n_runs}",
            fmt_f64(t),
            fmt_f64(am),
            fmt_f64(asd)
        ));
        energy_rows.push(format!(
            "{},{},{},{n_runs}",
            fmt_f64(t),
            fmt_f64(em),
            fmt_f64(esd)
        ));
    }
    let path = spec.out_dir.join(format!("{policy}_active_aggregate.csv"));
    atomic_write(
        &path,
        &csv_with_header("time_s,active_pct_mean,active_pct_stddev,n_runs", &header, &active_rows)?,
    )?;
    outcome.files.push(path);
    let path = spec.out_dir.join(format!("{policy}_energy_stddev_aggregate.csv"));
    atomic_write(
        &path,
        &csv_with_header(
            "time_s,energy_stddev_mean,energy_stddev_stddev,n_runs",
            &header,
            &energy_rows,
        )?,
    )?;
    outcome.files.push(path);

    // stealth aggregated by detection index (raw and window-20)
    let max_events = results
        .iter()
        .map(|r| r.metrics.stealth_events.len())
        .max()
        .unwrap_or(0);
    let mut stealth_rows = Vec::with_capacity(max_events);
    let mut window_rows = Vec::with_capacity(max_events);
    for i in 0..max_events {
        let raw: Vec<f64> = results
            .iter()
            .filter_map(|r| r.metrics.stealth_events.get(i).map(|e| e.stealth_s))
            .collect();
        let win: Vec<f64> = results
            .iter()
            .filter_map(|r| r.metrics.stealth_window.get(i).map(|e| e.stealth_s))
            .collect();
        let (rm, rs) = crate::stats::mean_stddev(&raw);
        let (wm, ws) = crate::stats::mean_stddev(&win);
        stealth_rows.push(format!("{i},{},{},{}", fmt_f64(rm), fmt_f64(rs), raw.len()));
        window_rows.push(format!("{i},{},{},{}", fmt_f64(wm), fmt_f64(ws), win.len()));
    }
    let path = spec.out_dir.join(format!("{policy}_stealth_aggregate.csv"));
    atomic_write(
        &path,
        &csv_with_header("detection_index,stealth_mean_s,stealth_stddev_s,n_runs", &header, &stealth_rows)?,
    )?;
    outcome.files.push(path);
    let path = spec.out_dir.join(format!("{policy}_stealth_window20_aggregate.csv"));
    atomic_write(
        &path,
        &csv_with_header(
            "detection_index,stealth_window20_mean_s,stealth_window20_stddev_s,n_runs",
            &header,
            &window_rows,
        )?,
    )?;
    outcome.files.push(path);

    let path = spec.out_dir.join(format!("{policy}_summary.json"));
    let json = serde_json::to_string_pretty(summary)?;
    atomic_write(&path, &json)?;
    outcome.files.push(path);
    Ok(())
}

/// Stream `count` raw generator bytes to `out` (the external-battery feed).
pub fn dump_bits(key_seed: u64, count: u64, out: &mut dyn std::io::Write) -> Result<()> {
    let key = SecretKey::derive(key_seed, 0);
    let mut generator = CiGenerator::from_key(&key, 0, 0);
    let mut buf = [0u8; 4096];
    let mut remaining = count;
    while remaining > 0 {
        let chunk = buf.len().min(remaining as usize);
        generator.fill_bytes(&mut buf[..chunk]);
        out.write_all(&buf[..chunk])?;
        remaining -= chunk as u64;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec(dir: &Path) -> ExperimentSpec {
        let mut config = FieldConfig::reference_preset();
        config.n_exp = 3;
        config.battery_init = 30;
        config.sim_seed = 11;
        let mut spec = ExperimentSpec::new(config, dir.to_path_buf());
        spec.runs = 2;
        spec.key_seed = 7;
        spec
    }

    #[test]
    fn batch_writes_per_run_and_aggregate_files() {
        let dir = tempfile::tempdir().unwrap();
        let spec = small_spec(dir.path());
        let outcome = run_batch(&spec).unwrap();
        for policy in ["chaotic", "random"] {
            for run in 0..2 {
                for name in ["active.csv", "energy.csv", "stealth.csv", "stealth_window20.csv"] {
                    let p = dir.path().join(format!("{policy}_run{run}_{name}"));
                    assert!(p.exists(), "{p:?}");
                }
            }
            for name in [
                "active_aggregate.csv",
                "energy_stddev_aggregate.csv",
                "stealth_aggregate.csv",
                "stealth_window20_aggregate.csv",
                "summary.json",
            ] {
                let p = dir.path().join(format!("{policy}_{name}"));
                assert!(p.exists(), "{p:?}");
            }
        }
        assert_eq!(outcome.summaries.len(), 2);
        // self-describing: header line then a config comment
        let active = fs::read_to_string(dir.path().join("chaotic_run0_active.csv")).unwrap();
        let mut lines = active.lines();
        assert_eq!(lines.next().unwrap(), "time_s,active_pct");
        let config_line = lines.next().unwrap();
        assert!(config_line.starts_with("# {"));
        assert!(config_line.contains("\"n_exp\":3"));
    }

    #[test]
    fn reruns_are_byte_identical() {
        let dir_a = tempfile::tempdir().unwrap();
        let dir_b = tempfile::tempdir().unwrap();
        let mut spec_a = small_spec(dir_a.path());
        let mut spec_b = small_spec(dir_b.path());
        spec_a.write_traces = true;
        spec_b.write_traces = true;
        run_batch(&spec_a).unwrap();
        run_batch(&spec_b).unwrap();
        let mut names: Vec<_> = fs::read_dir(dir_a.path())
            .unwrap()
            .map(|e| e.unwrap().file_name())
            .collect();
        names.sort();
        assert!(!names.is_empty());
        for name in names {
            let a = fs::read(dir_a.path().join(&name)).unwrap();
            let b = fs::read(dir_b.path().join(&name)).unwrap();
            assert_eq!(a, b, "{name:?} differs between reruns");
        }
    }

    #[test]
    fn observer_attack_emits_reports() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = small_spec(dir.path());
        spec.attack = AttackKind::Observer;
        spec.policies = vec![SchedulerPolicy::Periodic];
        let outcome = run_batch(&spec).unwrap();
        assert!(outcome
            .files
            .iter()
            .any(|p| p.file_name().unwrap().to_str().unwrap().starts_with("observer_periodic")));
        let report = outcome.reports.iter().find(|r| r.contains("observer_predictor")).unwrap();
        assert!(report.contains("\"accuracy\": 1.0"), "{report}");
    }

    #[test]
    fn cka_attack_mode_writes_reports_without_field_runs() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = small_spec(dir.path());
        spec.attack = AttackKind::Cka;
        spec.policies = vec![SchedulerPolicy::Periodic];
        let outcome = run_batch(&spec).unwrap();
        assert_eq!(outcome.files.len(), 1);
        assert!(outcome.reports[0].contains("\"verdict\": \"fail\""));
    }

    #[test]
    fn dump_bits_streams_the_requested_count() {
        let mut buf = Vec::new();
        dump_bits(5, 10_000, &mut buf).unwrap();
        assert_eq!(buf.len(), 10_000);
        let ones: u32 = buf.iter().map(|b| b.count_ones()).sum();
        let f = ones as f64 / 80_000.0;
        assert!((0.48..0.52).contains(&f), "ones fraction {f}");
        // determinism
        let mut again = Vec::new();
        dump_bits(5, 10_000, &mut again).unwrap();
        assert_eq!(buf, again);
    }

    #[test]
    fn blind_attack_modes_emit_outcome_reports() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = small_spec(dir.path());
        spec.attack = AttackKind::ShortestPath;
        spec.policies = vec![SchedulerPolicy::Chaotic];
        spec.runs = 1;
        run_batch(&spec).unwrap();
        let report: serde_json::Value = serde_json::from_str(
            &fs::read_to_string(dir.path().join("attack_shortest_path_chaotic.json")).unwrap(),
        )
        .unwrap();
        assert_eq!(report["experiment"], "blind_attack");
        let attempts = report["attempts"].as_u64().unwrap();
        assert!(attempts > 0);
        assert_eq!(
            report["reached_target"].as_u64().unwrap() + report["detected"].as_u64().unwrap(),
            attempts
        );
        assert_eq!(report["outcomes"].as_array().unwrap().len() as u64, attempts);
    }

    #[test]
    fn adaptive_attack_trains_then_plans() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = small_spec(dir.path());
        spec.attack = AttackKind::Adaptive;
        spec.policies = vec![SchedulerPolicy::Chaotic];
        spec.runs = 1;
        run_batch(&spec).unwrap();
        let report = fs::read_to_string(dir.path().join("attack_adaptive_chaotic.json")).unwrap();
        assert!(report.contains("\"kind\": \"adaptive\""));
    }
}
