use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chaos_sentinel::experiment::{dump_bits, run_batch, AttackKind, ExperimentSpec};
use chaos_sentinel::field_sim::FieldConfig;
use chaos_sentinel::scheduler::SchedulerPolicy;
use chaos_sentinel::verify;

/// Chaos-based duty-cycle scheduling for wireless video sensor networks:
/// batch simulation, self-verification, and raw generator output.
#[derive(Parser)]
#[command(name = "chaos-sentinel", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run simulation batches and write CSV/NDJSON results.
    Run(RunArgs),
    /// Execute the property suite and print one pass/fail line per check.
    Verify,
    /// Stream raw generator bytes to standard output (for external
    /// statistical batteries).
    DumpBits(DumpArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Named parameter preset; `reference` is the 128-node reference setup.
    #[arg(long, default_value = "reference")]
    preset: String,
    /// JSON configuration file (the same flat document every result file
    /// embeds); explicit flags below override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Restrict to one policy (chaotic|random|periodic); default runs
    /// chaotic and random.
    #[arg(long)]
    policy: Option<String>,
    /// Simulation runs per policy.
    #[arg(long, default_value_t = 10)]
    runs: u32,
    /// Seed of the secret-key family (one key per run).
    #[arg(long, default_value_t = 42)]
    key_seed: u64,
    /// Base seed of the simulated world (incremented per run).
    #[arg(long, default_value_t = 1337)]
    sim_seed: u64,
    /// Output directory; the CHAOS_SENTINEL_OUT environment variable
    /// overrides this flag.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Attack mode: none|scanline|random|shortest|adaptive|observer|cka.
    #[arg(long, default_value = "none")]
    attack: String,
    /// Network size exponent N (2^N nodes).
    #[arg(long)]
    nodes_exp: Option<usize>,
    /// Sensing range in meters.
    #[arg(long)]
    sensing_range: Option<f64>,
    /// Capture period T0 in seconds.
    #[arg(long)]
    t0: Option<f64>,
    /// Active period T granted per wake order, seconds.
    #[arg(long)]
    t_active: Option<f64>,
    /// Also write the full NDJSON trace of every run.
    #[arg(long, default_value_t = false)]
    traces: bool,
}

#[derive(Args)]
struct DumpArgs {
    /// Seed of the generator key.
    #[arg(long, default_value_t = 42)]
    key_seed: u64,
    /// Number of bytes to emit.
    #[arg(long, default_value_t = 1_048_576)]
    count: u64,
}

fn build_spec(args: &RunArgs) -> Result<ExperimentSpec, String> {
    let mut config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            serde_json::from_str::<FieldConfig>(&text)
                .map_err(|e| format!("invalid config {}: {e}", path.display()))?
        }
        None => match args.preset.as_str() {
            "reference" => FieldConfig::reference_preset(),
            "small" => {
                let mut c = FieldConfig::reference_preset();
                c.n_exp = 4;
                c.battery_init = 60;
                c
            }
            other => return Err(format!("unknown preset {other:?} (expected reference|small)")),
        },
    };
    if let Some(n) = args.nodes_exp {
        config.n_exp = n;
    }
    if let Some(r) = args.sensing_range {
        config.sensing_range_m = r;
    }
    if let Some(t0) = args.t0 {
        config.t0_s = t0;
    }
    if let Some(t) = args.t_active {
        config.t_active_s = t;
    }
    config.sim_seed = args.sim_seed;
    config.validate().map_err(|e| e.to_string())?;

    let out_dir = std::env::var_os("CHAOS_SENTINEL_OUT")
        .map(PathBuf::from)
        .unwrap_or_else(|| args.out.clone());

    let mut spec = ExperimentSpec::new(config, out_dir);
    spec.runs = args.runs;
    spec.key_seed = args.key_seed;
    spec.write_traces = args.traces;
    spec.attack = args.attack.parse::<AttackKind>().map_err(|e| e.to_string())?;
    if let Some(p) = &args.policy {
        let policy: SchedulerPolicy =
            p.parse().map_err(|e: chaos_sentinel::Error| e.to_string())?;
        spec.policies = vec![policy];
    } else if spec.attack == AttackKind::Observer || spec.attack == AttackKind::Cka {
        spec.policies = vec![
            SchedulerPolicy::Chaotic,
            SchedulerPolicy::UniformRandom,
            SchedulerPolicy::Periodic,
        ];
    }
    Ok(spec)
}

fn cmd_run(args: &RunArgs) -> Result<(), String> {
    let spec = build_spec(args)?;
    let outcome = run_batch(&spec).map_err(|e| e.to_string())?;
    println!(
        "wrote {} files to {}",
        outcome.files.len(),
        spec.out_dir.display()
    );
    for summary in outcome.summaries.values() {
        println!(
            "policy {:>8}: mean stealth {:.1} s over {} detections, mean lifetime {:.0} s, half-active {:.0} s{}",
            summary.policy,
            summary.mean_stealth_s,
            summary.detections_total,
            summary.mean_lifetime_s,
            summary.mean_half_active_s,
            if summary.deadlocked_runs > 0 {
                format!(" ({} runs ended idle-deadlocked)", summary.deadlocked_runs)
            } else {
                String::new()
            }
        );
    }
    for report in &outcome.reports {
        println!("{report}");
    }
    Ok(())
}

fn cmd_verify() -> bool {
    let results = verify::run_all();
    let mut all_pass = true;
    println!("{:<28} {:<6} detail", "check", "result");
    for r in &results {
        all_pass &= r.pass;
        println!(
            "{:<28} {:<6} {}",
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
    }
    println!(
        "{} of {} checks passed",
        results.iter().filter(|r| r.pass).count(),
        results.len()
    );
    all_pass
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match cmd_run(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Command::Verify => {
            if cmd_verify() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::DumpBits(args) => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            match dump_bits(args.key_seed, args.count, &mut lock) {
                Ok(()) => {
                    let _ = lock.flush();
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
