//! `bisar`: simulate acquisitions, form images and measure resolution
//! from a TOML experiment file or a built-in preset.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bisar::experiment::{self, presets, ExperimentConfig, RunManifest};
use bisar::imaging::Estimator;
use bisar::Error;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "bisar", version, about = "Bandwidth-independent Doppler imaging of rotating scenes")]
struct Cli {
    /// Cap the number of worker threads (outputs do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Source {
    /// Experiment file.
    #[arg(long, short, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,

    /// Built-in experiment: box, four-cylinders, worked-example, psf or sweep.
    #[arg(long, short)]
    preset: Option<String>,

    /// Output directory, overriding the one in the configuration.
    #[arg(long, short)]
    out: Option<PathBuf>,

    /// Override the configured seed.
    #[arg(long)]
    seed: Option<u64>,
}

impl Source {
    fn load(&self) -> bisar::Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path)?,
            (None, Some(name)) => presets::preset(name)?,
            (None, None) => unreachable!("clap requires one source"),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &ExperimentConfig) -> PathBuf {
        self.out.clone().unwrap_or_else(|| cfg.output_dir.clone())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize the echo cube for the configured scene.
    Simulate(Source),
    /// Form an energy image from a cube written by `simulate`.
    Image {
        #[command(flatten)]
        source: Source,
        /// Cube file; defaults to cube.bin in the output directory.
        #[arg(long)]
        cube: Option<PathBuf>,
        /// Spectral estimator, overriding the configuration.
        #[arg(long)]
        estimator: Option<Estimator>,
    },
    /// Numerical point spread function at the configured probes.
    Psf(Source),
    /// Two-point resolution sweep.
    ResolutionSweep(Source),
    /// Compare Doppler association with filtered back projection and coherent summation.
    CompareBaselines(Source),
    /// Check a configuration and print derived quantities.
    ValidateConfig {
        #[command(flatten)]
        source: Source,
        /// Also print the configuration as TOML.
        #[arg(long)]
        emit: bool,
    },
}

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 4,
        e if e.is_numerical() => 3,
        _ => 2,
    }
}

fn report(manifest: &RunManifest, dir: &Path) {
    for file in &manifest.outputs {
        println!("{}", dir.join(&file.path).display());
    }
}

fn run(cli: Cli) -> bisar::Result<()> {
    match cli.command {
        Command::Simulate(src) => {
            let cfg = src.load()?;
            let dir = src.out_dir(&cfg);
            report(&experiment::simulate(&cfg, Some(&dir))?, &dir);
        }
        Command::Image { source, cube, estimator } => {
            let mut cfg = source.load()?;
            if let Some(est) = estimator {
                cfg.imaging.estimator = est;
            }
            let dir = source.out_dir(&cfg);
            let cube = cube.unwrap_or_else(|| dir.join(experiment::CUBE_FILE));
            report(&experiment::image(&cfg, &cube, Some(&dir))?, &dir);
        }
        Command::Psf(src) => {
            let cfg = src.load()?;
            let dir = src.out_dir(&cfg);
            report(&experiment::psf(&cfg, Some(&dir))?, &dir);
        }
        Command::ResolutionSweep(src) => {
            let cfg = src.load()?;
            let dir = src.out_dir(&cfg);
            report(&experiment::resolution_sweep(&cfg, Some(&dir))?, &dir);
        }
        Command::CompareBaselines(src) => {
            let cfg = src.load()?;
            let dir = src.out_dir(&cfg);
            report(&experiment::compare_baselines(&cfg, Some(&dir))?, &dir);
        }
        Command::ValidateConfig { source, emit } => {
            let cfg = source.load()?;
            let summary = experiment::validate_config(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if emit {
                print!("{}", cfg.to_toml());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("bisar: could not size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("bisar: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
