//! Thinning: agreement with the attenuator, entropy and norm optimality of geometric
//! inputs, and majorization by the decreasing rearrangement.

use crate::config::GlobalConfig;
use crate::error::Result;
use crate::majorization::{decreasing_rearrangement, majorizes_weights};
use crate::spectra::{lp_norm, ProbVector};
use crate::thinning::{check_thinning_attenuator, thin, thinning_entropy_gap};

use super::families::{check_exponent, ln_thermal_norm};
use super::optimizer::search_factors;
use super::report::{finite_or_label, Mode, VerificationReport};
use super::sampling::{random_distribution, trial_rng};
use super::{fold_trials, run_trials, Trial, VerifyParams};

fn thinning_lambda(params: &VerifyParams) -> Result<Option<f64>> {
    match params.lambda {
        Some(l) if !(0.0..=1.0).contains(&l) => Err(crate::Error::Domain(format!("lambda must lie in [0,1], got {l}"))),
        l => Ok(l),
    }
}

/// Lambdas cycled through when none is given.
const LAMBDA_CYCLE: [f64; 3] = [0.2, 0.5, 0.8];

fn lambda_for(fixed: Option<f64>, trial: usize) -> f64 {
    fixed.unwrap_or(LAMBDA_CYCLE[trial % LAMBDA_CYCLE.len()])
}

fn max_deviation(a: &ProbVector, b: &ProbVector) -> f64 {
    a.weights().iter().zip(b.weights()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Largest deviation of the Fock diagonal of `E_{lambda,0}(diag p)` from `T_lambda p`.
pub(crate) fn verify_thinning_attenuator(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let lambda = thinning_lambda(params)?.unwrap_or(0.5);
    let d = params.dim_or(40)?;
    let trials = params.trials.unwrap_or(100);
    let tol = params.tolerance.unwrap_or(1e-10);
    let mut report = VerificationReport::new("thin-att", params.seed, tol)
        .param("lambda", lambda)
        .param("dim", d)
        .param("trials", trials);
    let results = run_trials(trials, |i| {
        let p = random_distribution(d, &mut trial_rng(params.seed, i as u64));
        Ok(Trial::new(-check_thinning_attenuator(&p, lambda, d, cfg)?, 0.0))
    })?;
    fold_trials(&mut report, results);

    let p = random_distribution(d, &mut trial_rng(params.seed, u64::MAX));
    let mu = 0.7;
    let semigroup = max_deviation(&thin(&thin(&p, lambda)?, mu)?, &thin(&p, lambda * mu)?);
    let len = 400;
    let e = params.energy_a.unwrap_or(1.0);
    let geometric = max_deviation(&thin(&ProbVector::geometric(e, len)?, lambda)?, &ProbVector::geometric(lambda * e, len)?);
    report.detail("semigroup_deviation", semigroup);
    report.detail("geometric_deviation", geometric);
    report.record(-semigroup.max(geometric), 0.0);
    Ok(report.finish(Mode::Assert))
}

/// `S(T_lambda p) - g(lambda g^{-1}(S(p)))` on random distributions. Without an explicit
/// lambda the trials cycle through 0.2, 0.5 and 0.8.
pub(crate) fn thinning_entropy_check(params: &VerifyParams, _cfg: &GlobalConfig) -> Result<VerificationReport> {
    let fixed = thinning_lambda(params)?;
    let d = params.dim_or(20)?;
    let trials = params.trials.unwrap_or(500);
    let tol = params.tolerance.unwrap_or(1e-8);
    let mut report = VerificationReport::new("thin-ent", params.seed, tol)
        .param("lambda", fixed.map(|l| vec![l]).unwrap_or(LAMBDA_CYCLE.to_vec()))
        .param("dim", d)
        .param("trials", trials);
    let e = params.energy_a.unwrap_or(1.0);
    report.detail("geometric_gap", thinning_entropy_gap(&ProbVector::geometric(e, 400)?, lambda_for(fixed, 0))?);
    let results = run_trials(trials, |i| {
        let mut rng = trial_rng(params.seed, i as u64);
        // supports of every length, so sparse inputs are covered too
        let len = 1 + i % d;
        let p = random_distribution(len, &mut rng);
        Ok(Trial::new(thinning_entropy_gap(&p, lambda_for(fixed, i))?, 0.0))
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// Exponent pairs checked when none is given.
const NORM_PAIRS: [(f64, f64); 3] = [(1.0, 2.0), (2.0, 3.0), (1.5, 2.5)];

/// Geometric-family value of `||T_lambda||_{p->q}` minus a restart search over nonnegative
/// vectors on `dim` sites (exact, since thinning does not enlarge the support).
pub(crate) fn thinning_norm_estimate(params: &VerifyParams, _cfg: &GlobalConfig) -> Result<VerificationReport> {
    let lambda = thinning_lambda(params)?.unwrap_or(0.5);
    let d = params.dim_or(12)?;
    let tol = params.tolerance.unwrap_or(1e-5);
    let opt = params.optimizer();
    let pairs: Vec<(f64, f64)> = match (params.p, params.q) {
        (None, None) => NORM_PAIRS.to_vec(),
        (p, q) => vec![(p.unwrap_or(1.0), q.unwrap_or(2.0))],
    };
    for &(p, q) in &pairs {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
    }
    let mut report = VerificationReport::new("thin-norm", params.seed, tol)
        .param("lambda", lambda)
        .param("pairs", &pairs)
        .param("dim", d)
        .param("restarts", opt.restarts);
    let mut rows = Vec::new();
    for &(p, q) in &pairs {
        let family = |e: f64| ln_thermal_norm(lambda * e, q) - ln_thermal_norm(e, p);
        let sup = super::optimizer::sup_over_energy(family, &opt);
        let diverges = q < p && sup.regime == super::optimizer::Regime::Increasing;
        let geometric = if diverges { f64::INFINITY } else { sup.value.exp() };
        let ratio = |w: Vec<f64>| -> f64 {
            let x = ProbVector::from_raw(w).normalized();
            let num = thin(&x, lambda).and_then(|y| lp_norm(&y, q));
            match (num, lp_norm(&x, p)) {
                (Ok(a), Ok(b)) => a / b,
                _ => f64::NEG_INFINITY,
            }
        };
        let results = search_factors(&[(d, 1)], &opt, |f| ratio(f[0].iter().map(|z| z.norm_sqr()).collect()));
        let best = results.iter().map(|r| r.value).fold(f64::NEG_INFINITY, f64::max);
        for r in &results {
            report.record(geometric - r.value, 0.0);
        }
        rows.push(serde_json::json!({ "p": p, "q": q, "geometric": finite_or_label(geometric), "search": best }));
    }
    report.detail("pairs", rows);
    Ok(report.finish(Mode::Assert))
}

/// Partial-sum gap of `T_lambda(p_decreasing) ≻ T_lambda(p)`.
pub(crate) fn verify_thinning_majorization(params: &VerifyParams, _cfg: &GlobalConfig) -> Result<VerificationReport> {
    let fixed = thinning_lambda(params)?;
    let d = params.dim_or(20)?;
    let trials = params.trials.unwrap_or(200);
    let tol = params.tolerance.unwrap_or(1e-9);
    let mut report = VerificationReport::new("thin-maj", params.seed, tol)
        .param("lambda", fixed.map(|l| vec![l]).unwrap_or(LAMBDA_CYCLE.to_vec()))
        .param("dim", d)
        .param("trials", trials);
    let results = run_trials(trials, |i| {
        let p = random_distribution(d, &mut trial_rng(params.seed, i as u64));
        let lambda = lambda_for(fixed, i);
        let sorted = thin(&decreasing_rearrangement(&p), lambda)?;
        let plain = thin(&p, lambda)?;
        Ok(Trial::new(majorizes_weights(sorted.weights(), plain.weights(), 1.0)?.worst_partial_sum_gap, 0.0))
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}
