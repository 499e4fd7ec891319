use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use tvgp::posterior::Scheme;
use tvgp::units::UnitConstants;
use tvgp_cli::config::{RunConfig, OUTPUT_DIR_ENV};
use tvgp_cli::{cmd_analyze, cmd_convert_units, cmd_fit, cmd_predict, cmd_simulate};

/// Tensor-variate Gaussian process modelling and inverse learning of a
/// low-dimensional input by posterior sampling.
#[derive(Parser)]
#[command(name = "tvgp", version, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FitSchemeArg {
    /// GP parameters from training data alone.
    TrainOnly,
    /// GP parameters and the test input jointly, given the augmented data.
    Joint,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic training set over a polar design grid.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sample a posterior over the GP parameters (and optionally the test
    /// input) and report 95% HPD intervals.
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// Which posterior to sample; overrides the config `scheme` key.
        #[arg(long, value_enum)]
        scheme: Option<FitSchemeArg>,
    },
    /// Sample the posterior predictive of the test input at modal GP
    /// parameters from a previous train-only fit.
    Predict {
        #[arg(long)]
        config: PathBuf,
    },
    /// Recompute HPD intervals and histograms from a stored trace CSV.
    Analyze {
        trace: PathBuf,
        #[arg(long, default_value_t = 50)]
        bins: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Convert the s1/s2 rows of a report to bar pattern speed (km/s/kpc)
    /// and bar-Sun angle (degrees).
    ConvertUnits {
        report: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 8.0)]
        r_sun_kpc: f64,
        #[arg(long, default_value_t = 220.0)]
        v0_kms: f64,
    },
}

fn output_override(dir: PathBuf) -> PathBuf {
    std::env::var(OUTPUT_DIR_ENV).map_or(dir, PathBuf::from)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { config } => {
            cmd_simulate(&RunConfig::from_file(config)?)?;
        }
        Command::Fit { config, scheme } => {
            let cfg = RunConfig::from_file(config)?;
            let scheme = match scheme {
                Some(FitSchemeArg::TrainOnly) => Scheme::TrainOnly,
                Some(FitSchemeArg::Joint) => Scheme::Joint,
                None => cfg.scheme.ok_or_else(|| {
                    anyhow::anyhow!(
                        "pass --scheme train-only|joint or set `scheme` in the config"
                    )
                })?,
            };
            cmd_fit(&cfg, scheme)?;
        }
        Command::Predict { config } => {
            cmd_predict(&RunConfig::from_file(config)?)?;
        }
        Command::Analyze { trace, bins, out } => {
            cmd_analyze(&trace, bins, &output_override(out))?;
        }
        Command::ConvertUnits {
            report,
            out,
            r_sun_kpc,
            v0_kms,
        } => {
            let consts = UnitConstants { r_sun_kpc, v0_kms };
            cmd_convert_units(&report, &output_override(out), &consts)?;
        }
    }
    Ok(())
}
