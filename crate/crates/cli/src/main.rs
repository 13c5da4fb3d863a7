use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use faircca_cli::config::{load_json, FitConfig, TransformConfig};
use faircca_cli::error::{CliError, Result};
use faircca_cli::report::OutputFormat;
use faircca_cli::{config, data, report};
use faircca_core::{
    center_sensitive, fit_cca, fit_frcca, project, CanonicalModel, FairCanonicalModel, Side,
    SynthConfig,
};

#[derive(Parser)]
#[command(
    name = "faircca",
    version,
    about = "Fair representation CCA: synthetic data, model fitting, multi-seed experiments and paired hypothesis tests"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic two-view dataset (x.csv, y.csv, z.csv,
    /// labels.csv, manifest.json)
    Synth {
        /// Generator config JSON; defaults apply when omitted
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a model from CSV inputs and write it as JSON
    Fit {
        #[arg(long)]
        config: PathBuf,
        /// Override the configured method (cca|frcca)
        #[arg(long)]
        method: Option<String>,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long)]
        ridge: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Project a CSV dataset through a fitted model
    Transform {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Multi-seed experiment: runs.jsonl, summary.json, deltas.tsv, timing.json
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Paired FR-CCA vs baseline hypothesis suite: hypotest.json
    Hypotest {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "json")]
        format: String,
        /// Override the first evaluation seed
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Print the version
    Version,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { config, seed, out } => {
            let mut synth: SynthConfig = match config {
                Some(path) => load_json(&path)?,
                None => SynthConfig::default(),
            };
            if let Some(s) = seed {
                synth.seed = s;
            }
            let dataset = faircca_core::generate_dataset(&synth)?;
            dataset.write_to_dir(&out)?;
            println!(
                "wrote {} samples ({} x-features, {} y-features) to {}",
                dataset.x.n_samples(),
                dataset.x.n_features(),
                dataset.y.n_features(),
                out.display()
            );
            Ok(())
        }
        Command::Fit {
            config,
            method,
            rank,
            ridge,
            out,
        } => {
            let mut fit: FitConfig = load_json(&config)?;
            if let Some(m) = method {
                fit.method = m.parse()?;
            }
            if let Some(r) = rank {
                fit.rank = r;
            }
            if let Some(r) = ridge {
                fit.ridge = r;
            }
            let x = data::read_matrix_csv(&fit.x)?;
            let y = data::read_matrix_csv(&fit.y)?;
            let json = match fit.method {
                config::Method::Cca => fit_cca(&x, &y, fit.rank, fit.ridge)?.to_json(),
                config::Method::Frcca => {
                    let z_path = fit
                        .z
                        .as_ref()
                        .ok_or_else(|| CliError::Config("frcca requires a z column path".into()))?;
                    let groups: Vec<u8> = data::read_binary_column(z_path)?
                        .iter()
                        .map(|g| g - 1)
                        .collect();
                    let z = center_sensitive(&groups)?;
                    fit_frcca(&x, &y, &z, fit.rank, fit.ridge)?.to_json()
                }
                config::Method::Raw => {
                    return Err(CliError::Config("fit expects method cca or frcca".into()))
                }
            };
            std::fs::write(&out, json)?;
            println!("wrote model to {}", out.display());
            Ok(())
        }
        Command::Transform { config, out } => {
            let t: TransformConfig = load_json(&config)?;
            let side = match t.side.as_str() {
                "x" => Side::X,
                "y" => Side::Y,
                other => {
                    return Err(CliError::Config(format!(
                        "side must be 'x' or 'y', got '{other}'"
                    )))
                }
            };
            let text = std::fs::read_to_string(&t.model)?;
            let model = load_any_model(&text)?;
            let x = data::read_matrix_csv(&t.data)?;
            let projected = project(&x, &model, side)?;
            report::write_projection_csv(&out, &projected)?;
            println!(
                "wrote {} projected rows to {}",
                projected.n_samples(),
                out.display()
            );
            Ok(())
        }
        Command::Experiment {
            config,
            out,
            format,
        } => {
            let format: OutputFormat = format.parse()?;
            let exp: config::ExperimentConfig = load_json(&config)?;
            let output = faircca_cli::run_experiment(&exp)?;
            report::write_experiment(&output, &out, format)?;
            println!(
                "{} runs ({} failures) written to {}",
                output.runs.len(),
                output.failures.len(),
                out.display()
            );
            Ok(())
        }
        Command::Hypotest {
            config,
            out,
            format,
            seed,
        } => {
            let format: OutputFormat = format.parse()?;
            let mut hyp: config::HypothesisConfig = load_json(&config)?;
            if let Some(s) = seed {
                hyp.seed_start = s;
            }
            let output = faircca_cli::run_hypothesis_suite(&hyp)?;
            report::write_hypothesis(&output, &out, format)?;
            for report in &output.reports {
                println!(
                    "{} {}: p={:.4e} -> {}",
                    report.metric,
                    report.modality,
                    report.p_value,
                    match report.decision {
                        faircca_core::stats::Decision::RejectH0 => "reject_H0",
                        faircca_core::stats::Decision::NotRejectH0 => "not_reject_H0",
                    }
                );
            }
            Ok(())
        }
        Command::Version => {
            println!("faircca {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}

/// Model JSON dispatch: frcca documents carry `"method":"frcca"`; plain
/// documents parse as the base schema. Either way the lifted projection pair
/// is what transform needs.
fn load_any_model(text: &str) -> Result<CanonicalModel> {
    if text.contains("\"method\":\"frcca\"") {
        let fair = FairCanonicalModel::from_json(text)?;
        Ok(fair.as_canonical().clone())
    } else {
        Ok(CanonicalModel::from_json(text)?)
    }
}
