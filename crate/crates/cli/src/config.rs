use std::cell::OnceCell;
use std::fmt;
use std::path::{Path, PathBuf};

use gaussopt::harness::VerifyParams;
use gaussopt::GlobalConfig;
use serde::Deserialize;

/// Anything that maps to exit code 2.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

macro_rules! usage_from {
    ($($t:ty),*) => {$(
        impl From<$t> for UsageError {
            fn from(e: $t) -> Self {
                UsageError(e.to_string())
            }
        }
    )*};
}

usage_from!(gaussopt::Error, std::io::Error, serde_json::Error, csv::Error);

/// On-disk run configuration. Every command-line flag has a field here.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunFile {
    pub seed: Option<u64>,
    pub jobs: Option<usize>,
    pub global: GlobalConfig,
    pub params: VerifyParams,
    pub output: Option<PathBuf>,
}

/// Configuration after applying flag > environment > file > default.
#[derive(Debug, Clone)]
pub struct Resolved {
    seed: OnceCell<u64>,
    pub jobs: Option<usize>,
    pub global: GlobalConfig,
    pub params: VerifyParams,
    pub output: Option<PathBuf>,
}

pub fn resolve(
    path: Option<&Path>,
    seed: Option<u64>,
    jobs: Option<usize>,
    guard: Option<usize>,
    leakage_max: Option<f64>,
) -> Result<Resolved, UsageError> {
    let file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| UsageError(format!("{}: {e}", p.display())))?;
            serde_json::from_str::<RunFile>(&text).map_err(|e| UsageError(format!("{}: {e}", p.display())))?
        }
        None => RunFile::default(),
    };
    // clap has already folded GAUSSOPT_SEED into `seed`
    let seed = seed.or(file.seed).map(OnceCell::from).unwrap_or_default();
    let mut global = file.global;
    if let Some(g) = guard {
        global.guard_factor = g;
    }
    if let Some(l) = leakage_max {
        global.leakage_max = l;
    }
    global.validate()?;
    if jobs == Some(0) || (jobs.is_none() && file.jobs == Some(0)) {
        return Err(UsageError("jobs must be at least 1".into()));
    }
    Ok(Resolved { seed, jobs: jobs.or(file.jobs), global, params: file.params, output: file.output })
}

impl Resolved {
    /// The configured seed, or a fresh one echoed to stderr on first use.
    pub fn seed(&self) -> u64 {
        *self.seed.get_or_init(|| {
            let s = rand::random::<u64>();
            eprintln!("seed: {s}");
            s
        })
    }
}

/// Writes `text` to `path`, or stdout when no path is given.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), UsageError> {
    match path {
        Some(p) => std::fs::write(p, format!("{text}\n")).map_err(|e| UsageError(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}
