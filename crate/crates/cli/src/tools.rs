use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Subcommand};
use gaussopt::channels::{heat_semigroup, transpose_channel};
use gaussopt::fock::{fock_state, thermal_state};
use gaussopt::harness::sampling::{random_state, trial_rng};
use gaussopt::spectra::{g_func, g_inv, shannon_entropy, spectrum};
use gaussopt::thinning::thin;
use gaussopt::{ChannelKind, ChannelRep, Cutoffs, DensityMatrix, FockSpace, ProbVector};
use serde_json::json;

use crate::config::{emit, Resolved, UsageError};

#[derive(Subcommand)]
pub enum EvalCmd {
    /// Thermal entropy g(E).
    G {
        #[arg(long)]
        energy: f64,
    },
    /// Mean photon number of the thermal state with the given entropy.
    GInverse {
        #[arg(long)]
        entropy: f64,
    },
    /// Von Neumann entropy, or the Renyi entropy of order `--renyi`.
    Entropy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        renyi: Option<f64>,
    },
    /// Schatten p-norm of a state.
    Norm {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        p: f64,
    },
    /// Thinned distribution, or its Shannon entropy with `--entropy`.
    Thin {
        /// JSON array of probabilities.
        #[arg(long)]
        dist: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        entropy: bool,
    },
}

#[derive(Subcommand)]
pub enum StateCmd {
    Thermal {
        #[arg(long)]
        energy: f64,
        #[arg(long)]
        dim: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    Fock {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    Vacuum {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        modes: usize,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Random state from the global seed; full rank unless `--rank` is given.
    Random {
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 1)]
        modes: usize,
        #[arg(long)]
        rank: Option<usize>,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
pub enum ChannelCmd {
    /// Attenuator; quantum-limited unless `--energy` is positive.
    Attenuator {
        #[arg(long)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0)]
        energy: f64,
        #[command(flatten)]
        io: ChannelIo,
    },
    /// Amplifier; quantum-limited unless `--energy` is positive.
    Amplifier {
        #[arg(long)]
        kappa: f64,
        #[arg(long, default_value_t = 0.0)]
        energy: f64,
        #[command(flatten)]
        io: ChannelIo,
    },
    /// Heat semigroup N_t.
    Heat {
        #[arg(long)]
        t: f64,
        /// Gauss-Hermite order per quadrature.
        #[arg(long, default_value_t = 15)]
        order: usize,
        #[command(flatten)]
        io: ChannelIo,
    },
    Transpose {
        #[command(flatten)]
        io: ChannelIo,
    },
}

#[derive(Args)]
pub struct ChannelIo {
    #[arg(long)]
    dim_in: usize,
    /// Output cutoff; chosen to meet the leakage bound when omitted.
    #[arg(long)]
    dim_out: Option<usize>,
    /// State file to push through the channel.
    #[arg(long)]
    apply: Option<PathBuf>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

pub fn eval(cmd: EvalCmd, run: &Resolved) -> Result<ExitCode, UsageError> {
    let cfg = &run.global;
    let value = match cmd {
        EvalCmd::G { energy } => json!(g_func(energy)?),
        EvalCmd::GInverse { entropy } => json!(g_inv(entropy)?),
        EvalCmd::Entropy { state, renyi } => {
            let sp = spectrum(&load_state(&state, run)?, cfg)?;
            json!(match renyi {
                Some(p) => sp.renyi(p),
                None => sp.entropy(),
            })
        }
        EvalCmd::Norm { state, p } => {
            if !(p >= 1.0) {
                return Err(UsageError(format!("norm order must be >= 1, got {p}")));
            }
            json!(spectrum(&load_state(&state, run)?, cfg)?.norm(p))
        }
        EvalCmd::Thin { dist, lambda, entropy } => {
            let text = std::fs::read_to_string(&dist).map_err(|e| UsageError(format!("{}: {e}", dist.display())))?;
            let p = ProbVector::new(serde_json::from_str(&text)?, cfg)?;
            let out = thin(&p, lambda)?;
            if entropy {
                json!(shannon_entropy(&out))
            } else {
                serde_json::to_value(&out)?
            }
        }
    };
    emit(&value.to_string(), None)?;
    Ok(ExitCode::SUCCESS)
}

pub fn state(cmd: StateCmd, run: &Resolved) -> Result<ExitCode, UsageError> {
    let cfg = &run.global;
    let (rho, output) = match cmd {
        StateCmd::Thermal { energy, dim, output } => {
            let t = thermal_state(energy, &FockSpace::single(dim)?, cfg)?;
            eprintln!("leakage: {:e}", t.leakage);
            (t.value, output)
        }
        StateCmd::Fock { n, dim, output } => (fock_state(n, &FockSpace::single(dim)?)?, output),
        StateCmd::Vacuum { dim, modes, output } => (DensityMatrix::vacuum(&FockSpace::new(vec![dim; modes])?), output),
        StateCmd::Random { dim, modes, rank, output } => {
            let space = FockSpace::new(vec![dim; modes])?;
            if rank == Some(0) {
                return Err(UsageError("rank must be at least 1".into()));
            }
            (random_state(&space, rank, &mut trial_rng(run.seed(), 0)), output)
        }
    };
    emit(&serde_json::to_string(&rho.to_json())?, output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

pub fn channel(cmd: ChannelCmd, run: &Resolved) -> Result<ExitCode, UsageError> {
    let cfg = &run.global;
    let guard = cfg.guard_factor;
    let (rep, io) = match cmd {
        ChannelCmd::Attenuator { lambda, energy, io } => {
            let kind = if energy > 0.0 {
                ChannelKind::AttenuatorThermal { lambda, energy }
            } else {
                ChannelKind::AttenuatorQl { lambda }
            };
            (build(kind, &io, io.dim_in, run)?, io)
        }
        ChannelCmd::Amplifier { kappa, energy, io } => {
            let kind = if energy > 0.0 {
                ChannelKind::AmplifierThermal { kappa, energy }
            } else {
                ChannelKind::AmplifierQl { kappa }
            };
            (build(kind, &io, io.dim_in, run)?, io)
        }
        ChannelCmd::Heat { t, order, io } => {
            let rep = match io.dim_out {
                Some(d) => heat_semigroup(t, order, Cutoffs::new(io.dim_in, d).with_guard(guard), cfg)?,
                None => build(ChannelKind::HeatSemigroup { t, order }, &io, io.dim_in + 1, run)?,
            };
            (rep, io)
        }
        ChannelCmd::Transpose { io } => {
            if io.dim_out.is_some_and(|d| d != io.dim_in) {
                return Err(UsageError("transpose keeps the cutoff: dim-out must equal dim-in".into()));
            }
            (transpose_channel(io.dim_in, cfg)?, io)
        }
    };
    let text = match &io.apply {
        Some(path) => {
            let rho = load_state(path, run)?;
            let out = rep.apply(&rho, cfg)?;
            eprintln!("leakage: {:e}", out.leakage);
            serde_json::to_string(&out.value.to_json())?
        }
        None => serde_json::to_string_pretty(&json!({
            "spec": rep.spec(),
            "kraus_operators": rep.n_kraus(),
            "leakage": rep.leakage(),
        }))?,
    };
    emit(&text, io.output.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn build(kind: ChannelKind, io: &ChannelIo, min_out: usize, run: &Resolved) -> Result<ChannelRep, UsageError> {
    let cfg = &run.global;
    let base = Cutoffs::new(io.dim_in, io.dim_out.unwrap_or(min_out)).with_guard(cfg.guard_factor);
    Ok(match io.dim_out {
        Some(_) => ChannelRep::new(kind, base, cfg)?,
        None => ChannelRep::with_auto_output(kind, base, cfg)?,
    })
}

fn load_state(path: &Path, run: &Resolved) -> Result<DensityMatrix, UsageError> {
    DensityMatrix::load(path, &run.global).map_err(|e| UsageError(format!("{}: {e}", path.display())))
}
