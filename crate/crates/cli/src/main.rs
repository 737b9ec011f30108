use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ergstab::erg::CircuitSource;
use ergstab::Limits;
use ergstab_cli::{run_and_write, Command, Format, RunConfig};

/// Exact checks of stabilizer models and their renormalization steps.
#[derive(Parser)]
#[command(name = "ergkit", version)]
struct Cli {
    #[command(subcommand)]
    command: Top,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value_t = FormatArg::Json, global = true)]
    format: FormatArg,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = Limits::default().max_qubits, global = true)]
    max_qubits: usize,
    #[arg(long, default_value_t = Limits::default().max_configs, global = true)]
    max_configs: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum CircuitArg {
    Paper,
    General,
}

#[derive(Subcommand)]
enum Top {
    /// Build a model, compute its ground-state degeneracy, or shift it to the dual lattice.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Fit log2 GSD over a grid of sizes.
    Scan {
        /// Bare model spec, e.g. "[0,1,2,3]".
        spec: String,
        /// "a..b", "a,b,c", or one such set per axis joined by 'x'.
        #[arg(long)]
        sizes: String,
    },
    /// Check one renormalization step.
    #[command(subcommand)]
    Erg(ErgCmd),
    /// Check the toric-code coarse-graining by enumeration.
    #[command(subcommand)]
    Coarse(CoarseCmd),
}

#[derive(Subcommand)]
enum ModelCmd {
    Build { instance: String },
    Gsd { instance: String },
    Dualize { instance: String },
}

#[derive(Args)]
struct ErgArgs {
    /// Model on a lattice, e.g. "[0,1,2,3]@2x2x2:pbc".
    instance: String,
    #[arg(long, value_enum, default_value_t = CircuitArg::Paper)]
    circuit: CircuitArg,
    /// Grown axis, 1-based; defaults to the last.
    #[arg(long)]
    axis: Option<usize>,
}

#[derive(Subcommand)]
enum ErgCmd {
    Verify(ErgArgs),
    Circuit(ErgArgs),
    Classify(ErgArgs),
}

#[derive(Subcommand)]
enum CoarseCmd {
    Verify {
        #[arg(long = "L")]
        l: usize,
    },
}

fn config(cli: Cli) -> RunConfig {
    let mut cfg = match cli.command {
        Top::Model(m) => {
            let (command, instance) = match m {
                ModelCmd::Build { instance } => (Command::ModelBuild, instance),
                ModelCmd::Gsd { instance } => (Command::ModelGsd, instance),
                ModelCmd::Dualize { instance } => (Command::ModelDualize, instance),
            };
            let mut cfg = RunConfig::new(command);
            cfg.instance = Some(instance);
            cfg
        }
        Top::Scan { spec, sizes } => {
            let mut cfg = RunConfig::new(Command::Scan);
            cfg.instance = Some(spec);
            cfg.sizes = Some(sizes);
            cfg
        }
        Top::Erg(e) => {
            let (command, args) = match e {
                ErgCmd::Verify(a) => (Command::ErgVerify, a),
                ErgCmd::Circuit(a) => (Command::ErgCircuit, a),
                ErgCmd::Classify(a) => (Command::ErgClassify, a),
            };
            let mut cfg = RunConfig::new(command);
            cfg.instance = Some(args.instance);
            cfg.axis = args.axis;
            cfg.circuit = match args.circuit {
                CircuitArg::Paper => CircuitSource::Paper,
                CircuitArg::General => CircuitSource::General,
            };
            cfg
        }
        Top::Coarse(CoarseCmd::Verify { l }) => {
            let mut cfg = RunConfig::new(Command::CoarseVerify);
            cfg.coarse_l = Some(l);
            cfg
        }
    };
    cfg.format = match cli.common.format {
        FormatArg::Json => Format::Json,
        FormatArg::Csv => Format::Csv,
    };
    cfg.out = cli.common.out;
    cfg.limits = Limits { max_qubits: cli.common.max_qubits, max_configs: cli.common.max_configs };
    cfg
}

fn main() -> ExitCode {
    let cfg = config(Cli::parse());
    match run_and_write(&cfg) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
