use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ionheat::{parse_config, preset, run_scenario, RunError, RunOptions};

#[derive(Parser)]
#[command(name = "ionheat", version, about = "Heating of a trapped ion coupled to an Ohmic reservoir")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a preset (fig1, fig2, fig3) or a scenario file.
    Run(RunArgs),
}

#[derive(clap::Args)]
struct RunArgs {
    /// Preset name or path to a `key = value` scenario file.
    #[arg(long)]
    scenario: String,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Number of trajectories (0 drops the ensemble).
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Fock-space truncation.
    #[arg(long)]
    dim: Option<usize>,
    /// Worker threads for the ensemble.
    #[arg(long, env = "IONHEAT_WORKERS")]
    workers: Option<usize>,
    /// Use paper-scale trajectory counts for the presets.
    #[arg(long)]
    paper_scale: bool,
    /// Only report errors.
    #[arg(long)]
    quiet: bool,
}

fn load(args: &RunArgs) -> Result<ionheat::Scenario, RunError> {
    if let Some(s) = preset(&args.scenario, args.paper_scale) {
        return Ok(s);
    }
    let path = Path::new(&args.scenario);
    let text = std::fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("scenario");
    Ok(parse_config(&text, stem)?)
}

fn run(args: RunArgs) -> Result<i32, RunError> {
    let mut scenario = load(&args)?;
    if let Some(n) = args.trajectories {
        scenario.sim.n_traj = n;
        if n == 0 {
            scenario.engines.retain(|e| *e != ionheat::Engine::Mcwf);
        }
    }
    if let Some(seed) = args.seed {
        scenario.sim.seed = seed;
    }
    if args.dim.is_some() {
        scenario.sim.dim = args.dim;
    }
    let opts = RunOptions {
        out_dir: args.out,
        workers: ionheat::parallel::resolve_workers(args.workers),
        progress: !args.quiet,
    };
    let outcome = run_scenario(&scenario, &opts)?;
    if !args.quiet {
        print!("{}", outcome.report.summary_text());
        for f in &outcome.files {
            println!("wrote {}", f.display());
        }
    }
    Ok(outcome.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let Command::Run(args) = cli.command;
    let level = if args.quiet { "error" } else { "info" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(RunError::EXIT_CODE as u8)
        }
    }
}
