//! `triage-lab`: generate scenarios, train ADP policies, evaluate and compare
//! them, emit figure data and solve tiny instances exactly.

mod rundir;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;

use triage_core::domain::{initial_due, BugAttr, ScenarioProfile};
use triage_core::environment::EpisodeLog;
use triage_core::metrics::{emit_plot_data, PlotKind, PolicySummary, RunData, SUMMARY_HEADER};
use triage_core::oracle::{evaluate_policy_exact, solve_exact, OracleEntry};
use triage_core::policies::{myopic_decide, Policy};
use triage_core::scenario::{self, GeneratorSpec};
use triage_core::stepsize::StepRule;
use triage_core::trainer::{evaluate, train, Probe, TrainConfig};
use triage_core::value_store::{InitMode, ValueStore};
use triage_core::TriageError;

use rundir::{RunDir, RunInfo, RunKind};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  usage error (unknown flag, missing or malformed argument)
  3  I/O error (missing file, unreadable or unwritable path)
  4  validation error (invalid profile, store, configuration or document)
  5  instance exceeds the exact oracle's size caps
  6  runtime failure during simulation, training or solving

Errors are printed to standard error as one line:
  triage-lab: error[<category>]: <message>
Set TRIAGE_LOG (error, warn, info, debug, trace) for progress logging.";

#[derive(Debug, Parser)]
#[command(name = "triage-lab", version, about = "Bug-triage ADP laboratory", after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic scenario profile.
    #[command(after_help = EXIT_CODES)]
    Generate(GenerateArgs),
    /// Train an ADP policy and write a run directory.
    #[command(after_help = EXIT_CODES)]
    Train(TrainArgs),
    /// Simulate a fixed policy and write a run directory.
    #[command(after_help = EXIT_CODES)]
    Evaluate(EvaluateArgs),
    /// Tabulate metrics of several run directories.
    #[command(after_help = EXIT_CODES)]
    Compare(CompareArgs),
    /// Write figure data from run directories as CSV.
    #[command(name = "emit-plots", after_help = EXIT_CODES)]
    EmitPlots(EmitPlotsArgs),
    /// Solve a tiny profile exactly by backward induction.
    #[command(after_help = EXIT_CODES)]
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Preset: eclipse-like, gcc-like, mozilla-like or custom.
    #[arg(long)]
    preset: String,
    /// Generator seed.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Override the arrival load of the preset.
    #[arg(long)]
    load: Option<f64>,
    /// Output profile path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Scenario profile (JSON).
    #[arg(long)]
    profile: PathBuf,
    /// Step-size rule: constant, harmonic or bakf.
    #[arg(long, default_value = "bakf")]
    stepsize: String,
    /// Training iterations N.
    #[arg(long, default_value_t = 20_000)]
    iterations: u64,
    /// Evaluate the frozen policy every M iterations.
    #[arg(long, default_value_t = 100)]
    eval_every: u64,
    /// Epochs per evaluation episode O.
    #[arg(long, default_value_t = 30)]
    eval_epochs: u32,
    /// Episodes per evaluation point.
    #[arg(long, default_value_t = 30)]
    eval_replications: usize,
    /// Rejection probability during training.
    #[arg(long, default_value_t = 0.75)]
    epsilon: f64,
    /// Discount factor.
    #[arg(long, default_value_t = 0.99)]
    gamma: f64,
    /// Value initialization: postponement-penalty, zeros or big-m.
    #[arg(long, default_value = "postponement-penalty")]
    init: String,
    /// Training seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Seed of the evaluation episodes.
    #[arg(long, default_value_t = 1)]
    eval_seed: u64,
    /// Value cell to trace, as EPOCH:TYPE:DUE; repeatable.
    #[arg(long = "probe", value_parser = parse_probe)]
    probes: Vec<Probe>,
    /// Output run directory.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    /// Scenario profile (JSON).
    #[arg(long)]
    profile: PathBuf,
    /// Policy: myopic, random, adp:STORE.json or adp:RUN-DIR.
    #[arg(long)]
    policy: String,
    /// Epochs per episode.
    #[arg(long, default_value_t = 30)]
    epochs: u32,
    /// Number of episodes.
    #[arg(long, default_value_t = 30)]
    replications: usize,
    /// Evaluation seed; the same seed gives every policy the same exogenous paths.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Label written to run.json and metric tables.
    #[arg(long)]
    label: Option<String>,
    /// Output run directory.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Scenario profile used for accuracy and discounting.
    #[arg(long)]
    profile: PathBuf,
    /// Run directories to compare.
    #[arg(long, num_args = 1.., required = true)]
    runs: Vec<PathBuf>,
    /// Output CSV table.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct EmitPlotsArgs {
    /// Run directory; repeatable.
    #[arg(long = "run", required = true)]
    runs: Vec<PathBuf>,
    /// Data kind: convergence, fixing-time-box, due-date-box or value-trace.
    #[arg(long)]
    kind: String,
    /// Output CSV.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct OracleArgs {
    /// Tiny scenario profile.
    #[arg(long)]
    profile: PathBuf,
    /// Output solution document.
    #[arg(short, long)]
    output: PathBuf,
}

fn parse_probe(text: &str) -> std::result::Result<Probe, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let [epoch, type_id, due] = parts.as_slice() else {
        return Err(format!("expected EPOCH:TYPE:DUE, got `{text}`"));
    };
    let bad = |what: &str| format!("bad {what} in probe `{text}`");
    Ok(Probe {
        epoch: epoch.parse().map_err(|_| bad("epoch"))?,
        bug: BugAttr::new(
            type_id.parse().map_err(|_| bad("type"))?,
            due.parse().map_err(|_| bad("due"))?,
        ),
    })
}

fn load_profile(path: &Path) -> Result<ScenarioProfile> {
    scenario::load(path).with_context(|| format!("loading profile {}", path.display()))
}

fn summary(
    label: &str,
    logs: &[EpisodeLog],
    profile: &ScenarioProfile,
    gamma: f64,
) -> Result<PolicySummary> {
    PolicySummary::from_logs(label, logs, profile, gamma)
        .with_context(|| format!("summarizing {label}"))
}

fn write_summary(dir: &RunDir, row: &PolicySummary) -> Result<()> {
    PolicySummary::write_csv(std::slice::from_ref(row), dir.writer(rundir::SUMMARY)?)?;
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<()> {
    let mut spec = GeneratorSpec::preset(&args.preset)?;
    if let Some(load) = args.load {
        spec.load = load;
    }
    let profile = scenario::generate(&spec, args.seed)?;
    scenario::save(&profile, &args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    info!(
        "wrote {} ({} classes, {} types)",
        args.output.display(),
        profile.n_dev_classes(),
        profile.n_bug_types
    );
    Ok(())
}

fn default_probes(profile: &ScenarioProfile) -> Vec<Probe> {
    (0..profile.n_bug_types)
        .map(|k| Probe {
            epoch: 1,
            bug: BugAttr::new(k, initial_due(1, profile)),
        })
        .collect()
}

fn train_cmd(args: TrainArgs) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let stepsize = StepRule::by_name(&args.stepsize).ok_or_else(|| {
        TriageError::InvalidConfig(format!(
            "unknown step size `{}` (expected constant, harmonic or bakf)",
            args.stepsize
        ))
    })?;
    let init = InitMode::by_name(&args.init).ok_or_else(|| {
        TriageError::InvalidConfig(format!(
            "unknown init mode `{}` (expected postponement-penalty, zeros or big-m)",
            args.init
        ))
    })?;
    let probes = if args.probes.is_empty() {
        default_probes(&profile)
    } else {
        args.probes
    };
    let config = TrainConfig {
        iterations: args.iterations,
        eval_every: args.eval_every,
        eval_epochs: args.eval_epochs,
        eval_replications: args.eval_replications,
        stepsize,
        epsilon: args.epsilon,
        gamma: args.gamma,
        init,
        seed: args.seed,
        eval_seed: args.eval_seed,
        probes,
    };
    info!(
        "training {} for {} iterations",
        stepsize.name(),
        config.iterations
    );
    let out = train(&profile, &config)?;
    let label = out.report.label.clone();
    if let Some(last) = out.report.eval.last() {
        info!(
            "final evaluation cost {:.3} ± {:.3}",
            last.mean, last.stderr
        );
    }

    let dir = RunDir::create(&args.output)?;
    dir.write_json(
        rundir::RUN,
        &RunInfo {
            kind: RunKind::Train,
            label: label.clone(),
        },
    )?;
    dir.write_json(rundir::PROFILE, &profile)?;
    dir.write_json(rundir::CONFIG, &config)?;
    dir.write_json(rundir::REPORT, &out.report)?;
    out.store.save(&dir.path(rundir::STORE))?;
    let run = RunData {
        label: &label,
        report: Some(&out.report),
        logs: &[],
    };
    emit_plot_data(
        std::slice::from_ref(&run),
        PlotKind::Convergence,
        &profile,
        dir.writer(rundir::METRICS)?,
    )?;
    emit_plot_data(
        std::slice::from_ref(&run),
        PlotKind::ValueTrace,
        &profile,
        dir.writer(rundir::VALUE_TRACE)?,
    )?;

    // Final frozen-policy episodes on the evaluation seed, under the trained discount.
    let mut acting = profile.clone();
    acting.discount = config.gamma;
    let logs = evaluate(
        &acting,
        &Policy::Adp(out.store),
        config.eval_epochs,
        config.eval_replications,
        config.eval_seed,
    )?;
    dir.write_episodes(&logs)?;
    write_summary(&dir, &summary(&label, &logs, &profile, config.gamma)?)?;
    info!("wrote run directory {}", args.output.display());
    Ok(())
}

#[derive(Serialize)]
struct EvaluateConfig<'a> {
    policy: &'a str,
    epochs: u32,
    replications: usize,
    seed: u64,
}

fn load_policy(spec: &str, profile: &ScenarioProfile) -> Result<Policy> {
    match spec {
        "myopic" => Ok(Policy::Myopic),
        "random" => Ok(Policy::Random),
        other => {
            let Some(path) = other.strip_prefix("adp:") else {
                bail!(TriageError::InvalidConfig(format!(
                    "unknown policy `{other}` (expected myopic, random or adp:PATH)"
                )));
            };
            let mut path = PathBuf::from(path);
            if path.is_dir() {
                path = path.join(rundir::STORE);
            }
            let store = ValueStore::load(&path)
                .with_context(|| format!("loading store {}", path.display()))?;
            store.check_compatible(profile)?;
            Ok(Policy::Adp(store))
        }
    }
}

fn evaluate_cmd(args: EvaluateArgs) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let policy = load_policy(&args.policy, &profile)?;
    if args.replications == 0 || args.epochs == 0 {
        bail!(TriageError::InvalidConfig(
            "epochs and replications must be positive".into()
        ));
    }
    let label = args.label.unwrap_or_else(|| policy.label());
    info!(
        "evaluating {label}: {} episodes of {} epochs",
        args.replications, args.epochs
    );
    let logs = evaluate(&profile, &policy, args.epochs, args.replications, args.seed)?;

    let dir = RunDir::create(&args.output)?;
    dir.write_json(
        rundir::RUN,
        &RunInfo {
            kind: RunKind::Evaluate,
            label: label.clone(),
        },
    )?;
    dir.write_json(rundir::PROFILE, &profile)?;
    dir.write_json(
        rundir::CONFIG,
        &EvaluateConfig {
            policy: &args.policy,
            epochs: args.epochs,
            replications: args.replications,
            seed: args.seed,
        },
    )?;
    dir.write_episodes(&logs)?;
    write_summary(&dir, &summary(&label, &logs, &profile, profile.discount)?)?;
    Ok(())
}

fn compare_cmd(args: CompareArgs) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let mut rows = Vec::new();
    for root in &args.runs {
        let dir = RunDir::open(root)?;
        let info = dir.info()?;
        let logs = dir.episodes()?;
        rows.push(summary(&info.label, &logs, &profile, profile.discount)?);
    }
    let file = std::fs::File::create(&args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    PolicySummary::write_csv(&rows, file)?;
    print_table(&rows);
    Ok(())
}

fn print_table(rows: &[PolicySummary]) {
    let shown = [0usize, 2, 4, 6, 9, 10];
    let header: Vec<&str> = shown.iter().map(|&i| SUMMARY_HEADER[i]).collect();
    println!("{}", header.join("\t"));
    for r in rows {
        println!(
            "{}\t{:.3}\t{:.3}\t{:.1}\t{:.3}\t{:.3}",
            r.policy,
            r.discounted_cost_mean,
            r.fixing_time_mean,
            r.top1,
            r.due_mean,
            r.due_variance
        );
    }
}

fn emit_plots_cmd(args: EmitPlotsArgs) -> Result<()> {
    let kind = PlotKind::by_name(&args.kind)?;
    let mut loaded = Vec::new();
    for root in &args.runs {
        let dir = RunDir::open(root)?;
        let info = dir.info()?;
        let report = dir.report()?;
        let logs = if dir.has(rundir::EPISODES) {
            dir.episodes()?
        } else {
            Vec::new()
        };
        loaded.push((info.label, report, logs, dir.profile()?));
    }
    let profile = &loaded[0].3;
    for (label, _, _, p) in &loaded[1..] {
        if p.dev_classes != profile.dev_classes {
            bail!(TriageError::InvalidConfig(format!(
                "run `{label}` uses a different cost matrix than the first run"
            )));
        }
    }
    let runs: Vec<RunData<'_>> = loaded
        .iter()
        .map(|(label, report, logs, _)| RunData {
            label,
            report: report.as_ref(),
            logs,
        })
        .collect();
    let file = std::fs::File::create(&args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    let rows = emit_plot_data(&runs, kind, profile, file)?;
    info!("wrote {rows} rows to {}", args.output.display());
    Ok(())
}

#[derive(Serialize)]
struct OracleDocument {
    initial_value: f64,
    myopic_value: f64,
    states: usize,
    entries: Vec<OracleEntry>,
}

fn oracle_cmd(args: OracleArgs) -> Result<()> {
    let profile = load_profile(&args.profile)?;
    let solution = solve_exact(&profile)?;
    let myopic = evaluate_policy_exact(&profile, |s| myopic_decide(s, &profile))?;
    let entries = solution.entries()?;
    info!(
        "optimal {:.6}, myopic {:.6}, {} states",
        solution.initial_value,
        myopic.initial_value,
        entries.len()
    );
    let doc = OracleDocument {
        initial_value: solution.initial_value,
        myopic_value: myopic.initial_value,
        states: entries.len(),
        entries,
    };
    let file = std::fs::File::create(&args.output)
        .with_context(|| format!("writing {}", args.output.display()))?;
    serde_json::to_writer_pretty(std::io::BufWriter::new(file), &doc)?;
    Ok(())
}

/// Exit code and category of an error chain.
fn classify(err: &anyhow::Error) -> (u8, &'static str) {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<TriageError>() {
            return classify_triage(e);
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return (3, "io");
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return (4, "validation");
        }
    }
    (6, "runtime")
}

fn classify_triage(e: &TriageError) -> (u8, &'static str) {
    match e {
        TriageError::Io(_) | TriageError::Csv(_) => (3, "io"),
        TriageError::InvalidProfile { .. }
        | TriageError::SchemaVersion { .. }
        | TriageError::InvalidConfig(_)
        | TriageError::Json(_) => (4, "validation"),
        TriageError::TooLarge(_) => (5, "cap"),
        TriageError::Training { source, .. } => match classify_triage(source) {
            (3, c) => (3, c),
            _ => (6, "runtime"),
        },
        _ => (6, "runtime"),
    }
}

fn one_line(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate(a) => generate(a),
        Command::Train(a) => train_cmd(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Compare(a) => compare_cmd(a),
        Command::EmitPlots(a) => emit_plots_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("TRIAGE_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                let _ = e.print();
                return ExitCode::from(2);
            }
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!(
                "triage-lab: error[usage]: {}",
                one_line(first.trim_start_matches("error: "))
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let (code, category) = classify(&err);
            eprintln!(
                "triage-lab: error[{category}]: {}",
                one_line(&format!("{err:#}"))
            );
            ExitCode::from(code)
        }
    }
}
