//! `gaussopt`: build states and channels, evaluate functionals, run verifiers and sweeps.
//!
//! Exit codes: 0 when every report passes or probes, 1 when any report fails, 2 on
//! configuration errors (bad flags, malformed files, unknown verifier IDs).

mod config;
mod sweep;
mod tools;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use gaussopt::harness::{self, Status, VerifyParams};

use config::{resolve, Resolved, UsageError};

#[derive(Parser)]
#[command(name = "gaussopt", version, about = "Gaussian-optimizer checks on truncated Fock spaces")]
struct Cli {
    /// JSON run configuration; command-line flags take precedence over it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// RNG seed. Falls back to GAUSSOPT_SEED, then the config file, then a fresh random seed.
    #[arg(long, global = true, env = "GAUSSOPT_SEED")]
    seed: Option<u64>,
    /// Worker threads for trials and sweep rows.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Internal cutoff multiplier for photon-number-raising operators.
    #[arg(long, global = true)]
    guard: Option<usize>,
    /// Largest truncation defect a channel or state may carry.
    #[arg(long, global = true)]
    leakage_max: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one verifier and emit its JSON report.
    Verify(VerifyArgs),
    /// Run a verifier over a parameter grid and emit a CSV matrix.
    Sweep(SweepArgs),
    /// Evaluate g, entropies, norms or the thinning map.
    Eval {
        #[command(subcommand)]
        what: tools::EvalCmd,
    },
    /// Write a density matrix as JSON.
    State {
        #[command(subcommand)]
        what: tools::StateCmd,
    },
    /// Build a channel, optionally applying it to a state file.
    Channel {
        #[command(subcommand)]
        what: tools::ChannelCmd,
    },
}

#[derive(Args)]
struct VerifyArgs {
    /// Verifier ID.
    #[arg(required_unless_present = "list")]
    id: Option<String>,
    /// List the verifier IDs and exit.
    #[arg(long)]
    list: bool,
    #[command(flatten)]
    params: ParamFlags,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// Sweep description: `{"theorem": ID, "params": {...}, "grid": {"key": [values]}}`.
    spec: PathBuf,
    /// Write the CSV here instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

/// Verifier parameters; each mirrors a field of `params` in the config file.
#[derive(Args, Default)]
pub struct ParamFlags {
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
    #[arg(long)]
    env_energy: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    modes: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    r: Option<f64>,
    /// Finite-difference step.
    #[arg(long)]
    h: Option<f64>,
    /// Gauss-Hermite order of the heat semigroup.
    #[arg(long)]
    order: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    t_list: Option<Vec<f64>>,
    #[arg(long)]
    energy_a: Option<f64>,
    #[arg(long)]
    energy_b: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    leakage_target: Option<f64>,
    /// Optimizer restarts for probes and norm searches.
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    local_steps: Option<usize>,
}

impl ParamFlags {
    fn apply(&self, p: &mut VerifyParams) {
        macro_rules! some {
            ($($field:ident),*) => {$(
                if self.$field.is_some() {
                    p.$field = self.$field.clone();
                }
            )*};
        }
        some!(lambda, kappa, dim, trials, p, q, r, h, order, t_list, energy_a, energy_b, tolerance, leakage_target);
        if let Some(e) = self.env_energy {
            p.env_energy = e;
        }
        if let Some(m) = self.modes {
            p.modes = m;
        }
        if let Some(n) = self.restarts {
            p.optimizer.restarts = n;
        }
        if let Some(n) = self.local_steps {
            p.optimizer.local_steps = n;
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, UsageError> {
    let run = resolve(cli.config.as_deref(), cli.seed, cli.jobs, cli.guard, cli.leakage_max)?;
    if let Some(jobs) = run.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| UsageError(format!("cannot start {jobs} workers: {e}")))?;
    }
    match cli.command {
        Command::Verify(args) => verify(args, run),
        Command::Sweep(args) => sweep::run(&args.spec, args.output.or(run.output.clone()), &run),
        Command::Eval { what } => tools::eval(what, &run),
        Command::State { what } => tools::state(what, &run),
        Command::Channel { what } => tools::channel(what, &run),
    }
}

fn verify(args: VerifyArgs, run: Resolved) -> Result<ExitCode, UsageError> {
    if args.list {
        for (id, about) in harness::VERIFIERS {
            println!("{id:<14} {about}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let id = args.id.unwrap_or_default();
    if !harness::verifier_ids().contains(&id.as_str()) {
        return Err(UsageError(format!("unknown verifier '{id}'; known IDs: {}", harness::verifier_ids().join(", "))));
    }
    let mut params = run.params.clone();
    args.params.apply(&mut params);
    params.seed = run.seed();
    let report = harness::run(&id, &params, &run.global)?;
    config::emit(&report.to_json_string(), args.output.or(run.output).as_deref())?;
    Ok(exit_for(&[report.status]))
}

fn exit_for(statuses: &[Status]) -> ExitCode {
    if statuses.contains(&Status::Fail) {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
