use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blaschke_lab::{Complex64, DiskPoint, RngSeed};
use blaschke_lab_cli::config::{ExperimentConfig, Kind, SequenceFile, SequenceSource, TargetSpec};
use blaschke_lab_cli::{emit, init_threads, run, CliError, CliResult, Format};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "blaschke-lab",
    version,
    about = "Experiments with finite Blaschke products and model-space interpolation"
)]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Base sample count of the circle grid.
    #[arg(long, global = true)]
    grid_size: Option<usize>,
    /// Output directory (`gen`: output file). Prints to stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Residual tolerance for interpolation checks and the nearby iteration.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Generator {
    FrostmanExample,
    Radial,
    Random,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a generated zero sequence as a sequence file.
    Gen {
        #[arg(value_enum)]
        generator: Generator,
        #[arg(long)]
        n: usize,
        /// Radial ratio.
        #[arg(long, default_value_t = 0.5)]
        q: f64,
        /// Radial direction.
        #[arg(long, default_value_t = 0.0)]
        arg: f64,
        #[arg(long, default_value_t = 0.1)]
        min_sep: f64,
        #[arg(long, default_value_t = 0.9)]
        max_modulus: f64,
    },
    /// Evaluate every criterion on a sequence file (and a paired one).
    Check {
        sequence: PathBuf,
        #[arg(long)]
        z: Option<PathBuf>,
    },
    /// Interpolate targets at the points of a sequence file.
    Interpolate {
        sequence: PathBuf,
        /// JSON array of `[re, im]` pairs; all ones when omitted.
        #[arg(long)]
        targets: Option<PathBuf>,
    },
    /// Interpolate on the union of two sequences.
    Union { a: PathBuf, z: PathBuf },
    /// Run the nearby-sequence iteration.
    Nearby {
        sequence: PathBuf,
        /// Perturbed sequence; sampled at radius `fraction/(2M)` when omitted.
        #[arg(long)]
        z: Option<PathBuf>,
        #[arg(long, default_value_t = 0.5)]
        fraction: f64,
        #[arg(long, default_value_t = 60)]
        max_iter: usize,
    },
    /// Monte Carlo check of the perturbation inequalities.
    Perturb {
        sequence: PathBuf,
        #[arg(long = "radius", default_values_t = vec![0.3, 0.5, 0.7])]
        radii: Vec<f64>,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Zeros of the Frostman shift `φ_a ∘ B`.
    Shift {
        sequence: PathBuf,
        #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        im: f64,
    },
    /// Run an experiment config file (TOML or JSON).
    Run { config: PathBuf },
}

fn file(path: PathBuf) -> SequenceSource {
    SequenceSource::File { path }
}

fn read_targets(path: &Path) -> CliResult<TargetSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let values: Vec<Complex64> = serde_json::from_str(&text)
        .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    Ok(TargetSpec::Values { values })
}

fn apply_globals(config: &mut ExperimentConfig, cli: &Cli) {
    if let Some(seed) = cli.seed {
        config.seed = RngSeed(seed);
    }
    if let Some(n) = cli.grid_size {
        config.grid.base_count = n;
    }
    if let Some(tol) = cli.tol {
        config.tolerances.interpolation = tol;
        config.tolerances.nearby = tol;
    }
}

fn generate(
    cli: &Cli,
    generator: Generator,
    n: usize,
    q: f64,
    arg: f64,
    min_sep: f64,
    max_modulus: f64,
) -> CliResult<()> {
    let source = match generator {
        Generator::FrostmanExample => SequenceSource::FrostmanExample { n: Some(n) },
        Generator::Radial => SequenceSource::Radial { q, n: Some(n), arg },
        Generator::Random => SequenceSource::Random {
            n: Some(n),
            min_sep,
            max_modulus,
            seed: Some(cli.seed.unwrap_or(0)),
        },
    };
    let seq = source.load(Path::new("."), n, RngSeed(cli.seed.unwrap_or(0)))?;
    let file = SequenceFile::from_sequence(&seq, source.meta());
    match &cli.out {
        Some(path) => file.write(path),
        None => {
            print!("{}", file.to_json());
            Ok(())
        }
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    init_threads()?;
    let (mut config, base) = match &cli.command {
        Command::Gen {
            generator,
            n,
            q,
            arg,
            min_sep,
            max_modulus,
        } => return generate(cli, *generator, *n, *q, *arg, *min_sep, *max_modulus),
        Command::Run { config } => ExperimentConfig::read(config)?,
        Command::Check { sequence, z } => {
            let seq = SequenceFile::read(sequence)?;
            let mut c = ExperimentConfig::new(Kind::Criteria);
            c.n_schedule = vec![seq.points.len()];
            c.inputs.a = Some(file(sequence.clone()));
            c.inputs.z = z.clone().map(file);
            (c, PathBuf::new())
        }
        Command::Interpolate { sequence, targets } => {
            let mut c = ExperimentConfig::new(Kind::Interpolate);
            c.inputs.a = Some(file(sequence.clone()));
            c.inputs.alpha = targets.as_deref().map(read_targets).transpose()?;
            (c, PathBuf::new())
        }
        Command::Union { a, z } => {
            let mut c = ExperimentConfig::new(Kind::Union);
            c.inputs.a = Some(file(a.clone()));
            c.inputs.z = Some(file(z.clone()));
            (c, PathBuf::new())
        }
        Command::Nearby {
            sequence,
            z,
            fraction,
            max_iter,
        } => {
            let mut c = ExperimentConfig::new(Kind::Nearby);
            c.inputs.a = Some(file(sequence.clone()));
            c.inputs.z = z.clone().map(file);
            c.params.nearness_fraction = *fraction;
            c.params.max_iter = *max_iter;
            (c, PathBuf::new())
        }
        Command::Perturb {
            sequence,
            radii,
            trials,
        } => {
            let mut c = ExperimentConfig::new(Kind::Perturb);
            c.inputs.a = Some(file(sequence.clone()));
            c.params.radii = radii.clone();
            c.params.trials = *trials;
            (c, PathBuf::new())
        }
        Command::Shift { sequence, re, im } => {
            let mut c = ExperimentConfig::new(Kind::Shift);
            c.inputs.a = Some(file(sequence.clone()));
            c.inputs.shift =
                Some(DiskPoint::new(*re, *im).map_err(|e| CliError::config(e.to_string()))?);
            (c, PathBuf::new())
        }
    };
    apply_globals(&mut config, cli);
    let bundle = run(&config, &base)?;
    emit(&bundle, cli.format, cli.out.as_deref())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
