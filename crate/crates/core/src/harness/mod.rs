//! Executable checks of the entropic and norm inequalities.
//!
//! Every inequality is written as `LHS - RHS >= 0` and a verifier reports the worst signed
//! gap over its trials. Proven inequalities are asserted ([`Status::Pass`] or
//! [`Status::Fail`]); conjectures are only probed, and states that come close to violating
//! them are attached to the report instead of failing it.

mod calculus;
mod duality;
mod entropy_power;
pub mod families;
mod minimum_entropy;
mod norms;
pub mod optimizer;
pub mod report;
pub mod sampling;
mod thinning_checks;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::GlobalConfig;
use crate::error::{Error, Result};

pub use families::GaussianChannel;
pub use optimizer::OptimizerConfig;
pub use report::{Candidate, Mode, Status, VerificationReport};

/// Gap below which a probed conjecture dumps the offending state.
pub const CANDIDATE_GAP: f64 = -1e-4;
/// Candidates are only dumped when truncation cannot explain them.
pub const CANDIDATE_LEAKAGE: f64 = 1e-6;

/// Parameters shared by all verifiers; each verifier reads the fields it needs and falls
/// back to its own defaults for the rest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyParams {
    pub lambda: Option<f64>,
    pub kappa: Option<f64>,
    pub env_energy: f64,
    pub dim: Option<usize>,
    pub modes: usize,
    pub trials: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    /// Finite-difference step.
    pub h: Option<f64>,
    /// Gauss–Hermite order of the heat semigroup.
    pub order: Option<usize>,
    pub t_list: Option<Vec<f64>>,
    pub energy_a: Option<f64>,
    pub energy_b: Option<f64>,
    pub tolerance: Option<f64>,
    /// Target truncation defect for automatically sized output cutoffs.
    pub leakage_target: Option<f64>,
    pub seed: u64,
    pub optimizer: OptimizerConfig,
}

impl Default for VerifyParams {
    fn default() -> Self {
        Self {
            lambda: None,
            kappa: None,
            env_energy: 0.0,
            dim: None,
            modes: 1,
            trials: None,
            p: None,
            q: None,
            r: None,
            h: None,
            order: None,
            t_list: None,
            energy_a: None,
            energy_b: None,
            tolerance: None,
            leakage_target: None,
            seed: 0,
            optimizer: OptimizerConfig::default(),
        }
    }
}

impl VerifyParams {
    /// Amplifier when `kappa` is set, otherwise attenuator with `lambda` (default 0.5).
    pub fn channel(&self) -> Result<GaussianChannel> {
        let ch = match (self.kappa, self.lambda) {
            (Some(_), Some(_)) => return Err(Error::Domain("give either lambda or kappa, not both".into())),
            (Some(k), None) => GaussianChannel::amplifier(k, self.env_energy),
            (None, l) => GaussianChannel::attenuator(l.unwrap_or(0.5), self.env_energy),
        };
        ch.validate()?;
        Ok(ch)
    }

    /// Beam-splitter transmissivity or squeezing parameter for two-input verifiers.
    pub fn mixing(&self) -> Result<f64> {
        match (self.kappa, self.lambda) {
            (Some(_), Some(_)) => Err(Error::Domain("give either lambda or kappa, not both".into())),
            (Some(k), None) if k >= 1.0 => Ok(k),
            (None, Some(l)) if (0.0..=1.0).contains(&l) => Ok(l),
            (None, None) => Ok(0.5),
            (k, l) => Err(Error::Domain(format!("invalid mixing parameter lambda={l:?} kappa={k:?}"))),
        }
    }

    fn dim_or(&self, default: usize) -> Result<usize> {
        let d = self.dim.unwrap_or(default);
        if d < 2 {
            return Err(Error::Domain(format!("cutoff must be at least 2, got {d}")));
        }
        Ok(d)
    }

    fn modes_in(&self, allowed: &[usize]) -> Result<usize> {
        if !allowed.contains(&self.modes) {
            return Err(Error::Domain(format!("modes must be one of {allowed:?}, got {}", self.modes)));
        }
        Ok(self.modes)
    }

    fn leakage_target(&self) -> f64 {
        self.leakage_target.unwrap_or(1e-10)
    }

    fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig { seed: self.seed, ..self.optimizer }
    }

    fn step(&self, default: f64) -> Result<f64> {
        let h = self.h.unwrap_or(default);
        if !(h > 0.0 && h < 0.5) {
            return Err(Error::Domain(format!("finite-difference step must lie in (0, 0.5), got {h}")));
        }
        Ok(h)
    }
}

type Verifier = fn(&VerifyParams, &GlobalConfig) -> Result<VerificationReport>;

/// Verifier IDs with a one-line description.
pub const VERIFIERS: &[(&str, &str)] = &[
    ("moe", "vacuum minimizes the output entropy of attenuators and amplifiers"),
    ("maj", "the vacuum output majorizes every other output"),
    ("maj2", "passive rearrangement majorizes the output (one mode; two modes probed)"),
    ("purity", "only the vacuum keeps a pure output through a lossy attenuator"),
    ("one-to-p", "the vacuum achieves the 1->p norm"),
    ("cmoe", "thermal inputs minimize output entropy at fixed input entropy"),
    ("pq", "thermal inputs achieve the p->q norm"),
    ("infty", "p->p norm bound by Phi(I) and its dual"),
    ("duality", "trace pairing and the amplifier dual identity"),
    ("duality-norms", "p->q norm duality on random channels"),
    ("pq-bridge", "Renyi-entropy rewriting of the amplifier p->q norm"),
    ("epni", "entropy photon-number inequality (probe)"),
    ("qepi", "quantum entropy power inequality"),
    ("qcepi", "conditional entropy power inequality on zero-CMI states"),
    ("young", "sharp Young constant for the beam splitter (probe)"),
    ("iso", "isoperimetric inequality for the quantum-limited attenuator"),
    ("logsob", "logarithmic Sobolev inequality for the quantum-limited attenuator"),
    ("debruijn", "two estimators of the Fisher information agree"),
    ("stam", "Stam inequality for the Fisher information"),
    ("scaling", "entropy growth along the heat semigroup (probe)"),
    ("thin-att", "thinning equals the attenuator on diagonal states"),
    ("thin-ent", "geometric inputs minimize thinned entropy"),
    ("thin-norm", "geometric inputs achieve the thinning p->q norm"),
    ("thin-maj", "decreasing rearrangement majorizes the thinned output"),
];

fn lookup(id: &str) -> Option<Verifier> {
    Some(match id {
        "moe" => minimum_entropy::verify_moe,
        "maj" => minimum_entropy::verify_maj,
        "maj2" => minimum_entropy::verify_maj2,
        "purity" => minimum_entropy::verify_purity,
        "one-to-p" => minimum_entropy::verify_one_to_p,
        "cmoe" => minimum_entropy::verify_constrained_moe,
        "pq" => norms::norm_pq_estimate,
        "infty" => norms::verify_infty_bound,
        "duality" => duality::verify_duality,
        "duality-norms" => duality::verify_duality_norms,
        "pq-bridge" => norms::pq_to_entropy_bridge,
        "epni" => entropy_power::epni_gap,
        "qepi" => entropy_power::qepi_gap,
        "qcepi" => entropy_power::qcepi_gap,
        "young" => entropy_power::young_c1_estimate,
        "iso" => calculus::iso_derivative_check,
        "logsob" => calculus::log_sobolev_check,
        "debruijn" => calculus::fisher_de_bruijn_check,
        "stam" => calculus::stam_check,
        "scaling" => calculus::entropy_scaling_probe,
        "thin-att" => thinning_checks::verify_thinning_attenuator,
        "thin-ent" => thinning_checks::thinning_entropy_check,
        "thin-norm" => thinning_checks::thinning_norm_estimate,
        "thin-maj" => thinning_checks::verify_thinning_majorization,
        _ => return None,
    })
}

pub fn verifier_ids() -> Vec<&'static str> {
    VERIFIERS.iter().map(|(id, _)| *id).collect()
}

/// Runs the verifier `id`. Unknown IDs are a domain error listing the known ones.
pub fn run(id: &str, params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let verifier = lookup(id)
        .ok_or_else(|| Error::Domain(format!("unknown verifier '{id}'; known: {}", verifier_ids().join(", "))))?;
    cfg.validate()?;
    params.optimizer.validate()?;
    verifier(params, cfg)
}

/// Outcome of one trial.
pub(crate) struct Trial {
    pub gap: f64,
    pub leakage: f64,
    pub candidate: Option<Candidate>,
}

impl Trial {
    pub fn new(gap: f64, leakage: f64) -> Self {
        Self { gap, leakage, candidate: None }
    }
}

/// Runs `f` on trial indices `0..n` in parallel; results come back in index order.
pub(crate) fn run_trials<T: Send>(n: usize, f: impl Fn(usize) -> Result<T> + Sync + Send) -> Result<Vec<T>> {
    (0..n).into_par_iter().map(f).collect()
}

pub(crate) fn fold_trials(report: &mut VerificationReport, trials: Vec<Trial>) {
    for t in trials {
        report.record(t.gap, t.leakage);
        if let Some(c) = t.candidate {
            report.candidates.push(c);
        }
    }
}

/// Whether a probe result should be dumped for manual inspection.
pub(crate) fn is_candidate(gap: f64, leakage: f64) -> bool {
    gap < CANDIDATE_GAP && leakage < CANDIDATE_LEAKAGE
}

/// Ranks cycle through pure, rank two and full rank.
pub(crate) fn sweep_rank(trial: usize) -> Option<usize> {
    match trial % 4 {
        0 => Some(1),
        1 => Some(2),
        _ => None,
    }
}
