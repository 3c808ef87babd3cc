use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use adoption_index::{ShapePreset, Sidedness};
use adoption_index_cli::commands::DEFAULT_SIGNIFICANCE;
use adoption_index_cli::{execute, render, CliError, Command, Format, RunConfig};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "adoption-index",
    version,
    about = "Technology adoption index estimation and testing"
)]
struct Cli {
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sided {
    Two,
    Greater,
    Less,
}

impl From<Sided> for Sidedness {
    fn from(s: Sided) -> Self {
        match s {
            Sided::Two => Sidedness::TwoSided,
            Sided::Greater => Sidedness::Greater,
            Sided::Less => Sidedness::Less,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Scores, sub-indices, global index, variance and a 95% interval.
    Compute {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        data: PathBuf,
    },
    /// Compare one corporation with the rest of its industry.
    TestOne {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Row id of the corporation to compare with the rest.
        #[arg(
            long,
            required_unless_present = "reference",
            conflicts_with = "reference"
        )]
        row: Option<String>,
        /// Compare the whole industry with this index value instead.
        #[arg(long)]
        reference: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE)]
        alpha_level: f64,
        #[arg(long, value_enum, default_value_t = Sided::Two)]
        sided: Sided,
    },
    /// Compare the indices of two industries.
    TestTwo {
        #[arg(long)]
        spec: PathBuf,
        /// Spec for the second file, if it differs from --spec.
        #[arg(long)]
        spec_b: Option<PathBuf>,
        #[arg(long)]
        data_a: PathBuf,
        #[arg(long)]
        data_b: PathBuf,
        #[arg(long, default_value_t = DEFAULT_SIGNIFICANCE)]
        alpha_level: f64,
        #[arg(long, value_enum, default_value_t = Sided::Two)]
        sided: Sided,
    },
    /// Run a Monte Carlo study described by a plan file.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        /// Overrides the plan's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Global index over a grid of scores for a two-model study.
    Surface {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 11)]
        resolution: usize,
        /// linear, concave, convex or s-shaped; applied to both models.
        #[arg(long, value_parser = parse_preset)]
        preset: Option<ShapePreset>,
    },
}

fn parse_preset(s: &str) -> Result<ShapePreset, String> {
    s.parse().map_err(|e: adoption_index::Error| e.to_string())
}

fn config(cli: Cli) -> RunConfig {
    let (spec, command) = match cli.command {
        Cmd::Compute { spec, data } => (spec, Command::Compute { data }),
        Cmd::TestOne {
            spec,
            data,
            row,
            reference,
            alpha_level,
            sided,
        } => (
            spec,
            Command::TestOne {
                data,
                row,
                reference,
                significance: alpha_level,
                sidedness: sided.into(),
            },
        ),
        Cmd::TestTwo {
            spec,
            spec_b,
            data_a,
            data_b,
            alpha_level,
            sided,
        } => (
            spec,
            Command::TestTwo {
                data_a,
                data_b,
                spec_b,
                significance: alpha_level,
                sidedness: sided.into(),
            },
        ),
        Cmd::Simulate { spec, plan, seed } => (spec, Command::Simulate { plan, seed }),
        Cmd::Surface {
            spec,
            resolution,
            preset,
        } => (spec, Command::Surface { resolution, preset }),
    };
    RunConfig {
        spec,
        command,
        out: cli.out,
        format: cli.format,
    }
}

fn run(config: &RunConfig) -> Result<(), CliError> {
    let report = execute(config)?;
    let text = render(&report, config.format);
    match &config.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        }),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io {
                path: "<stdout>".into(),
                source: e,
            }),
    }
}

fn main() -> ExitCode {
    let config = config(Cli::parse());
    match run(&config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
