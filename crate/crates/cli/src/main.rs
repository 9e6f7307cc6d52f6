//! `mol`: simulate processes, estimate orders and ranges, run sweeps.
//!
//! Exit codes: 0 success, 1 usage or parse errors, 2 degenerate data.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mol_core::io::{self, Format, Sample};
use mol_core::model_spec::{lattice_from_toml, ChainSpec};
use mol_core::{
    run_experiment, sample_lattice, sample_markov, theoretical_entropies, Error, Execution, ExperimentPlan, Method,
    MethodConfig, Sequence,
};

#[derive(Parser)]
#[command(name = "mol", version, about = "Markov order and random-field range estimation")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Draw a sample from a chain or lattice model file.
    Simulate(SimulateArgs),
    /// Run one estimator on a sample file and print the report as JSON.
    Estimate(EstimateArgs),
    /// Run an experiment plan and write the CSV.
    Experiment(ExperimentArgs),
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["model", "lattice"]))]
struct SimulateArgs {
    /// Chain model file (TOML).
    #[arg(long)]
    model: Option<PathBuf>,
    /// Lattice field model file (TOML).
    #[arg(long)]
    lattice: Option<PathBuf>,
    /// Sequence length.
    #[arg(long, requires = "model")]
    n: Option<usize>,
    /// Lattice side.
    #[arg(long, requires = "lattice")]
    side: Option<usize>,
    /// Seed; defaults to MOL_SEED, then 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Write the binary format instead of text.
    #[arg(long)]
    binary: bool,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    method: Method,
    /// Method settings as JSON or TOML; unset fields keep their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Read whitespace-separated labels instead of a sequence file.
    #[arg(long)]
    text: bool,
    input: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    plan: PathBuf,
    /// Overrides the plan's output path; `-` for stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Core(e.into())
    }
}

type Res<T> = Result<T, Failure>;

fn env_seed() -> Res<Option<u64>> {
    match std::env::var("MOL_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Failure::Usage(format!("MOL_SEED must be an unsigned integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

fn read_text(path: &Path) -> Res<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn simulate(args: SimulateArgs) -> Res<()> {
    let seed = match args.seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(0),
    };
    let format = if args.binary { Format::Binary } else { Format::Text };
    if let Some(path) = &args.model {
        let n = args.n.ok_or_else(|| Failure::Usage("--model needs --n".into()))?;
        let model = ChainSpec::from_toml(&read_text(path)?)?.build()?;
        let x = sample_markov(&model, n, seed)?;
        io::write_sequence(&args.out, &x, format)?;
        let h = theoretical_entropies(&model, model.order() + 2)?;
        println!("k\tH_k (nats)");
        for (k, v) in h.iter().enumerate() {
            println!("{k}\t{v:.6}");
        }
    } else if let Some(path) = &args.lattice {
        let side = args
            .side
            .ok_or_else(|| Failure::Usage("--lattice needs --side".into()))?;
        let model = lattice_from_toml(&read_text(path)?)?;
        io::write_lattice(&args.out, &sample_lattice(&model, side, seed)?, format)?;
    }
    Ok(())
}

fn estimate(args: EstimateArgs, exec: Execution) -> Res<()> {
    let config = match &args.config {
        Some(p) => MethodConfig::parse_settings(args.method, &read_text(p)?)?,
        None => MethodConfig::default_for(args.method),
    };
    let report = if args.text {
        let text = read_text(&args.input)?;
        let (x, labels) = Sequence::from_labels(text.split_whitespace())?;
        let mut r = config.run_sequence(&x, exec)?;
        r.symbols = Some(labels);
        r
    } else {
        match io::read_sample(&args.input)? {
            Sample::Sequence(x) => config.run_sequence(&x, exec)?,
            Sample::Lattice(x) => config.run_lattice(&x, exec)?,
        }
    };
    println!("{}", report.to_json());
    Ok(())
}

fn experiment(args: ExperimentArgs, exec: Execution) -> Res<()> {
    let mut plan = ExperimentPlan::from_file(&args.plan)?;
    if let Some(seed) = env_seed()? {
        plan.base_seed = seed;
    }
    let out = match args.out {
        Some(p) => Some(p),
        // The plan's own path is relative to the plan file.
        None => plan
            .output
            .as_ref()
            .map(|p| args.plan.parent().unwrap_or(Path::new(".")).join(p)),
    };
    let csv = run_experiment(&plan, exec)?.to_csv();
    match out {
        Some(p) if p != Path::new("-") => std::fs::write(p, csv)?,
        _ => print!("{csv}"),
    }
    Ok(())
}

fn set_threads(threads: Option<usize>) -> Res<()> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
    Ok(())
}

fn run(cli: Cli) -> Res<()> {
    set_threads(cli.threads)?;
    let exec = Execution::Parallel;
    match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a, exec),
        Command::Experiment(a) => experiment(a, exec),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_degenerate() { 2 } else { 1 })
        }
    }
}
