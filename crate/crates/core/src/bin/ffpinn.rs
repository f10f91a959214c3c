use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ffpinn::experiments::{self, ExperimentConfig, ExperimentRecord, RunStatus, Task};
use ffpinn::Error;

#[derive(Parser)]
#[command(name = "ffpinn", version, about = "Fourier-feature PINN experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment a config or preset describes.
    Run(RunArgs),
    /// Eigen-decompose the NTK of the configured architecture over a scale sweep.
    AnalyzeNtk(RunArgs),
    /// Solve Gray-Scott and write the observation dataset.
    GenerateDataset(RunArgs),
    /// List benchmarks and presets.
    List,
    /// Show a benchmark's equation and defaults.
    Describe { id: String },
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in preset name (see `ffpinn list`).
    #[arg(long)]
    preset: Option<String>,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: the config's, else runs/<name>).
    #[arg(long)]
    out: Option<PathBuf>,
    /// No progress lines.
    #[arg(long, short)]
    quiet: bool,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Validation(_) | Error::SchemaVersion { .. } | Error::TooLarge { .. } => 2,
        e if e.is_numerical() => 3,
        _ => 1,
    }
}

fn load(args: &RunArgs) -> Result<ExperimentConfig, Error> {
    let cfg = match (&args.config, &args.preset) {
        (Some(p), _) => ExperimentConfig::load(p)?,
        (None, Some(name)) => experiments::preset(name)?,
        (None, None) => unreachable!("clap requires one"),
    };
    Ok(match args.seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn execute(args: &RunArgs, task: Option<Task>) -> Result<(ExperimentRecord, PathBuf), Error> {
    let mut cfg = load(args)?;
    if let Some(t) = task {
        cfg.task = t;
    }
    let out = cfg.output_dir(args.out.as_deref());
    let mut print = |s: &str| eprintln!("{s}");
    let progress: experiments::Progress<'_> = if args.quiet { None } else { Some(&mut print) };
    let rec = experiments::run(&cfg, &out, progress)?;
    Ok((rec, out))
}

fn report(rec: &ExperimentRecord, out: &Path) {
    for (k, v) in &rec.metrics {
        println!("{k} = {v}");
    }
    println!("record: {}", out.join(experiments::RECORD_FILE).display());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::List => {
            print!("{}", experiments::list());
            println!();
            println!("presets:");
            for p in experiments::preset_names() {
                println!("  {p}");
            }
            return ExitCode::SUCCESS;
        }
        Command::Describe { id } => match experiments::describe(id) {
            Ok(text) => {
                print!("{text}");
                return ExitCode::SUCCESS;
            }
            Err(e) => Err(e),
        },
        Command::Run(a) => execute(a, None),
        Command::AnalyzeNtk(a) => execute(a, Some(Task::Ntk)),
        Command::GenerateDataset(a) => execute(a, Some(Task::Dataset)),
    };
    match result {
        Ok((rec, out)) => {
            report(&rec, &out);
            if rec.status == RunStatus::Failed {
                eprintln!("error: run failed: {}", rec.error.as_deref().unwrap_or("unknown"));
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            match &e {
                Error::Validation(items) => {
                    eprintln!("error: invalid configuration");
                    for i in items {
                        eprintln!("  {i}");
                    }
                }
                _ => eprintln!("error: {e}"),
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
