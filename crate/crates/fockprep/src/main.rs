//! Thin command-line front end over [`fockprep::experiment`]: load or build
//! a config, apply flag overrides, run it, print the summary.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fockprep::experiment::{self, ExperimentConfig, OutputFormat};

#[derive(Parser)]
#[command(
    name = "fockprep",
    version,
    about = "Prepare cavity-field Fock states by streaming two-level atoms through a cavity",
    after_help = "Experiments are described by JSON configs (see the README for the schema).\n\
                  Outputs land in --out, else the config's \"out\", else $FOCKPREP_OUT_DIR, else ./out."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate a filter function (config kind "filter-dump")
    Filter(RunArgs),
    /// Evolve the unrecorded ensemble distribution (kind "ensemble")
    Ensemble(RunArgs),
    /// Sample recorded measurement trajectories (kind "trajectories")
    Trajectories(RunArgs),
    /// Average all outcome records exhaustively (kind "brute-force")
    BruteForce(RunArgs),
    /// Closed-form adiabatic pumping distribution (kind "binomial")
    Binomial(RunArgs),
    /// Velocity schedules toward a trapped Fock state (kind "trap-schedule")
    TrapSchedule(RunArgs),
    /// Sweep the closed-form filter against the integrated propagator
    /// (kind "validate-oracle"; runs with defaults when no config is given)
    Validate(RunArgs),
    /// Run a ready-made experiment: fig1 (resonant pumping of a bright
    /// coherent state) or fig2 (velocity schedules toward |10>)
    Preset(PresetArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Override the config's master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the tabular output format
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment config; its "kind" must match the subcommand
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct PresetArgs {
    /// Preset name: fig1 | fig2
    name: String,
    /// Number of atoms
    #[arg(long)]
    atoms: Option<usize>,
    /// Photon-number truncation override
    #[arg(long)]
    nmax: Option<usize>,
    /// Noise realizations (fig2 noisy curves)
    #[arg(long)]
    realizations: Option<usize>,
    /// Print the fully expanded config as JSON and exit
    #[arg(long)]
    print_config: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        }
    }
}

fn load_config(args: &RunArgs, expected_kind: &str) -> Result<ExperimentConfig, String> {
    let config = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
            experiment::parse_config(&text).map_err(|e| e.to_string())?
        }
        None if expected_kind == "validate-oracle" => {
            experiment::parse_config(r#"{"kind":"validate-oracle"}"#)
                .map_err(|e| e.to_string())?
        }
        None => return Err(format!("the {expected_kind} experiment needs --config PATH")),
    };
    if config.kind_name() != expected_kind {
        return Err(format!(
            "config kind \"{}\" does not match the {expected_kind} subcommand",
            config.kind_name()
        ));
    }
    Ok(config)
}

fn real_main() -> Result<ExitCode, String> {
    let cli = Cli::parse();
    let (mut config, common) = match &cli.command {
        Command::Filter(a) => (load_config(a, "filter-dump")?, &a.common),
        Command::Ensemble(a) => (load_config(a, "ensemble")?, &a.common),
        Command::Trajectories(a) => (load_config(a, "trajectories")?, &a.common),
        Command::BruteForce(a) => (load_config(a, "brute-force")?, &a.common),
        Command::Binomial(a) => (load_config(a, "binomial")?, &a.common),
        Command::TrapSchedule(a) => (load_config(a, "trap-schedule")?, &a.common),
        Command::Validate(a) => (load_config(a, "validate-oracle")?, &a.common),
        Command::Preset(a) => {
            let config =
                experiment::preset_with(&a.name, a.atoms, a.nmax, a.realizations)
                    .map_err(|e| e.to_string())?;
            if a.print_config {
                let text = serde_json::to_string_pretty(&config)
                    .map_err(|e| e.to_string())?;
                println!("{text}");
                return Ok(ExitCode::SUCCESS);
            }
            (config, &a.common)
        }
    };

    if let Some(seed) = common.seed {
        config.common_mut().seed = seed;
    }
    if let Some(format) = common.format {
        config.common_mut().format = format.into();
    }
    let out_dir = common
        .out
        .clone()
        .or_else(|| config.common().out.clone())
        .or_else(|| std::env::var_os("FOCKPREP_OUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));

    let report = experiment::run(&config, &out_dir).map_err(|e| e.to_string())?;
    for line in &report.summary {
        println!("{line}");
    }
    for file in &report.files {
        println!("wrote {}", file.display());
    }
    // Exit 2 signals a failed oracle validation, distinct from usage errors.
    Ok(if report.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::FAILURE
        }
    }
}
