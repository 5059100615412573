use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};

use langinduct::runner::{self, ExperimentId, Profile, RunConfig};

#[derive(Parser)]
#[command(
    name = "langinduct",
    version,
    about = "Learn generative programs for formal languages from example strings"
)]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long, short, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    profile: Option<ProfileArg>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Extra `key=value` settings, applied after the config file.
    #[arg(long = "set", short = 's', global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProfileArg {
    Desk,
    Paper,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    Infinite,
    Lai,
    Gomez,
    English,
}

#[derive(Subcommand)]
enum Command {
    /// Run inference on one dataset and write the hypothesis store.
    Induce,
    /// Learning curve over the configured data schedule.
    Curve,
    /// Run one of the canned experiments.
    Experiment {
        #[arg(value_enum)]
        id: ExperimentArg,
    },
    /// Print the best hypotheses of a store file.
    Inspect {
        store: PathBuf,
        #[arg(long, default_value_t = 10)]
        top: usize,
    },
}

fn load_config(cli: &Cli) -> anyhow::Result<RunConfig> {
    let profile = cli.profile.map(|p| match p {
        ProfileArg::Desk => Profile::Desk,
        ProfileArg::Paper => Profile::Paper,
    });
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
        None => String::new(),
    };
    let mut config = RunConfig::parse(&text, profile)?;
    for kv in &cli.set {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("--set expects KEY=VALUE, got {kv:?}"))?;
        config.set(k.trim(), v.trim())?;
    }
    if let Some(seed) = cli.seed {
        config = config.with_seed(seed);
    }
    if let Some(out) = &cli.out {
        config.out = out.clone();
    }
    config.validate()?;
    Ok(config)
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let report = match &cli.command {
        Command::Inspect { store, top } => {
            print!("{}", runner::cmd_inspect(store, *top)?);
            return Ok(());
        }
        Command::Induce => runner::cmd_induce(&load_config(cli)?)?,
        Command::Curve => runner::cmd_learning_curve(&load_config(cli)?)?,
        Command::Experiment { id } => {
            let id = match id {
                ExperimentArg::Infinite => ExperimentId::Infinite,
                ExperimentArg::Lai => ExperimentId::Lai,
                ExperimentArg::Gomez => ExperimentId::Gomez,
                ExperimentArg::English => ExperimentId::English,
            };
            runner::cmd_experiment(id, &load_config(cli)?)?
        }
    };
    for f in &report.files {
        println!("{}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
