// Copyright (c) The lexsimp Contributors
// SPDX-License-Identifier: Apache-2.0

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lexsimp::config::StatusLevel;
use lexsimp::pipeline::render_trace;
use lexsimp::pos::parse_module_list;
use lexsimp::{
    evaluate_files, parse_dataset_tsv, run_dataset, run_instance, write_run_tsv, AppConfig, Inflector, Instance,
    LexiconTagger, MetricConfig, ModuleId, PipelineConfig, Resources, RunSummary, UnigramScorer,
};

/// Exit status: clean run.
const EXIT_OK: u8 = 0;
/// Completed, but some instances or resources reported problems.
const EXIT_DEGRADED: u8 = 1;
const EXIT_FATAL: u8 = 2;

#[derive(Parser)]
#[command(name = "lexsimp", version, about = "Lexical simplification pipeline and evaluator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate substitutes for every instance of a dataset.
    Run(RunArgs),
    /// Score a run file against a gold file.
    Eval(EvalArgs),
    /// Trace the pipeline on a single sentence.
    Inspect(InspectArgs),
    /// Resource maintenance.
    Resources {
        #[command(subcommand)]
        command: ResourcesCommand,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Input TSV: `sentence \t target [\t ...]`.
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long)]
    config: PathBuf,
    /// Run file to write.
    #[arg(long)]
    output: PathBuf,
    /// Comma-separated module filter, e.g. `ppdb,mlm`.
    #[arg(long)]
    modules: Option<String>,
    #[arg(long)]
    top_n: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    gold: PathBuf,
    #[arg(long)]
    pred: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct InspectArgs {
    #[arg(long)]
    sentence: String,
    #[arg(long)]
    word: String,
    /// Without a config only the built-in resources are available.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum ResourcesCommand {
    /// Check every resource the configured modules need.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Inspect(args) => cmd_inspect(args),
        Command::Resources {
            command: ResourcesCommand::Validate { config },
        } => cmd_validate(config.as_deref()),
    };
    ExitCode::from(code.unwrap_or_else(|msg| {
        eprintln!("error: {msg}");
        EXIT_FATAL
    }))
}

type CmdResult = Result<u8, String>;

fn load_config(path: Option<&Path>) -> Result<AppConfig, String> {
    match path {
        Some(p) => AppConfig::load(p).map_err(|e| e.to_string()),
        None => {
            let mut cfg = AppConfig::default();
            cfg.apply_env();
            Ok(cfg)
        }
    }
}

fn cmd_run(args: RunArgs) -> CmdResult {
    let mut cfg = load_config(Some(&args.config))?;
    if let Some(m) = &args.modules {
        let list = parse_module_list(m)?;
        cfg.run.modules = Some(list.iter().map(|m| m.as_str().to_string()).collect());
    }
    if let Some(n) = args.top_n {
        cfg.run.top_n = n;
    }
    if let Some(w) = args.workers {
        cfg.run.workers = w;
    }
    let pipeline = cfg.pipeline_config().map_err(|e| e.to_string())?;
    let active = cfg.active_modules().map_err(|e| e.to_string())?;
    let resources = cfg.load_resources(&active).map_err(|e| e.to_string())?;

    let file = File::open(&args.dataset).map_err(|e| format!("{}: {e}", args.dataset.display()))?;
    let instances =
        parse_dataset_tsv(BufReader::new(file)).map_err(|e| format!("{}: {e}", args.dataset.display()))?;

    let outcomes = run_dataset(&instances, &resources, &pipeline).map_err(|e| e.to_string())?;
    let records: Vec<_> = outcomes.iter().map(|o| o.record.clone()).collect();
    let out = File::create(&args.output).map_err(|e| format!("{}: {e}", args.output.display()))?;
    let mut sink = BufWriter::new(out);
    write_run_tsv(&records, &mut sink)
        .and_then(|_| sink.flush())
        .map_err(|e| format!("{}: {e}", args.output.display()))?;

    for (i, o) in outcomes.iter().enumerate() {
        for issue in o.issues() {
            log::warn!("instance {}: {issue}", i + 1);
        }
    }
    let summary = RunSummary::from_outcomes(&outcomes);
    eprint!("{}", summary.render());
    Ok(if summary.with_issues > 0 { EXIT_DEGRADED } else { EXIT_OK })
}

fn cmd_eval(args: EvalArgs) -> CmdResult {
    let report = evaluate_files(&args.gold, &args.pred, &MetricConfig::default()).map_err(|e| e.to_string())?;
    match args.format {
        Format::Json => println!("{}", report.to_json()),
        Format::Table => print!("{}", report.to_table()),
    }
    Ok(EXIT_OK)
}

/// Built-in tagger, inflector and stub scorer; no lexical sources.
fn builtin_resources() -> Resources {
    let inflector = Inflector::bundled();
    Resources::new(Arc::new(LexiconTagger::bundled()), inflector, Arc::new(UnigramScorer::bundled()))
}

fn cmd_inspect(args: InspectArgs) -> CmdResult {
    let instance = Instance::new(args.sentence.as_str(), args.word.as_str()).map_err(|e| e.to_string())?;
    let (resources, pipeline) = match &args.config {
        Some(path) => {
            let cfg = load_config(Some(path))?;
            let pipeline = cfg.pipeline_config().map_err(|e| e.to_string())?;
            let active = cfg.active_modules().map_err(|e| e.to_string())?;
            (cfg.load_resources(&active).map_err(|e| e.to_string())?, pipeline)
        }
        None => (builtin_resources(), PipelineConfig::default()),
    };
    let outcome = run_instance(&instance, &resources, &pipeline);
    print!("{}", render_trace(&outcome));
    let issues = outcome.issues();
    for issue in &issues {
        eprintln!("warning: {issue}");
    }
    Ok(if issues.is_empty() { EXIT_OK } else { EXIT_DEGRADED })
}

fn cmd_validate(config: Option<&Path>) -> CmdResult {
    let cfg = load_config(config)?;
    let active: BTreeSet<ModuleId> = cfg.active_modules().map_err(|e| e.to_string())?;
    let names: Vec<&str> = active.iter().map(|m| m.as_str()).collect();
    let statuses = cfg.check_resources().map_err(|e| e.to_string())?;
    let mut out = io::stdout().lock();
    let _ = writeln!(out, "active modules: {}", names.join(", "));
    for s in &statuses {
        let _ = writeln!(out, "{s}");
    }
    let failed = statuses.iter().any(|s| s.level == StatusLevel::Error);
    Ok(if failed { EXIT_DEGRADED } else { EXIT_OK })
}
