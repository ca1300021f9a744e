//! Vacuum and thermal optimality of attenuator and amplifier outputs.

use crate::channels::{ChannelRep, ThermalKind};
use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::fock::{thermal_required_dim, thermal_state, DensityMatrix, FockSpace, Tensor};
use crate::majorization::{majorizes_weights, passive_rearrangement};
use crate::spectra::{g, g_inverse, spectrum, Spectrum};

use super::families::{check_exponent, ln_thermal_norm, GaussianChannel};
use super::optimizer::search_factors;
use super::report::{Candidate, Mode, VerificationReport};
use super::sampling::{random_state, state_from_factor, trial_rng};
use super::{fold_trials, is_candidate, run_trials, sweep_rank, Trial, VerifyParams};

fn n_fold(rep: &ChannelRep, rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<(Spectrum, f64)> {
    let out = rep.apply_tensor_power(rho, cfg)?;
    Ok((spectrum(&out.value, cfg)?, out.leakage))
}

struct Sweep {
    channel: GaussianChannel,
    rep: ChannelRep,
    space: FockSpace,
    vacuum: Spectrum,
    vacuum_leakage: f64,
}

fn setup(p: &VerifyParams, default_dim: usize, cfg: &GlobalConfig) -> Result<Sweep> {
    let channel = p.channel()?;
    let n = p.modes_in(&[1, 2])?;
    let d = p.dim_or(default_dim)?;
    let rep = channel.build(d, p.leakage_target(), cfg)?;
    let space = FockSpace::new(vec![d; n])?;
    let (vacuum, vacuum_leakage) = n_fold(&rep, &DensityMatrix::vacuum(&space), cfg)?;
    Ok(Sweep { channel, rep, space, vacuum, vacuum_leakage })
}

fn base_report(id: &str, p: &VerifyParams, s: &Sweep, tol: f64) -> VerificationReport {
    VerificationReport::new(id, p.seed, tol)
        .param("channel", s.channel)
        .param("dim_in", s.rep.dim_in())
        .param("dim_out", s.rep.dim_out())
        .param("modes", s.space.n_modes())
}

/// Minimum over random inputs of `S(Phi^n(rho)) - S(Phi^n(vacuum))`.
pub(crate) fn verify_moe(p: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let s = setup(p, 10, cfg)?;
    let n = s.space.n_modes();
    let trials = p.trials.unwrap_or(if n == 1 { 500 } else { 200 });
    let tol = p.tolerance.unwrap_or(if n == 1 { 1e-8 } else { 1e-7 });
    let s_vac = s.vacuum.entropy();
    let mut report = base_report("moe", p, &s, tol).param("trials", trials);
    report.detail("vacuum_output_entropy", s_vac);
    report.detail("vacuum_closed_form_error", (s_vac - n as f64 * s.channel.thermal_output_entropy(0.0)).abs());
    report.record(0.0, s.vacuum_leakage);
    let results = run_trials(trials, |i| {
        let rho = random_state(&s.space, sweep_rank(i), &mut trial_rng(p.seed, i as u64));
        let (sp, leak) = n_fold(&s.rep, &rho, cfg)?;
        Ok(Trial::new(sp.entropy() - s_vac, leak))
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// Worst partial-sum gap of `spectrum(Phi^n(vacuum)) ≻ spectrum(Phi^n(rho))`.
pub(crate) fn verify_maj(p: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let s = setup(p, 10, cfg)?;
    let n = s.space.n_modes();
    let trials = p.trials.unwrap_or(if n == 1 { 500 } else { 200 });
    let tol = p.tolerance.unwrap_or(1e-9);
    let mut report = base_report("maj", p, &s, tol).param("trials", trials);
    let results = run_trials(trials, |i| {
        let rho = random_state(&s.space, sweep_rank(i), &mut trial_rng(p.seed, i as u64));
        let (sp, leak) = n_fold(&s.rep, &rho, cfg)?;
        let v = majorizes_weights(s.vacuum.values(), sp.values(), 1.0)?;
        Ok(Trial::new(v.worst_partial_sum_gap, leak))
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// Multi-mode passive state: eigenvalues in descending order on Fock states sorted by
/// total photon number (ties by flat index).
fn multimode_passive(rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<DensityMatrix> {
    let space = rho.space();
    let mut order: Vec<usize> = (0..space.total_dim()).collect();
    order.sort_by_key(|&k| space.unflatten(k).iter().sum::<usize>());
    let sp = spectrum(rho, cfg)?;
    let mut diag = vec![0.0; space.total_dim()];
    for (slot, &v) in order.iter().zip(sp.values()) {
        diag[*slot] = v;
    }
    DensityMatrix::from_diagonal(space.clone(), &diag, cfg)
}

/// `Phi(rho_passive) ≻ Phi(rho)`. Asserted for one mode; for two modes the passive state
/// sorts Fock states by total photon number and the result is only probed.
pub(crate) fn verify_maj2(p: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let s = setup(p, 10, cfg)?;
    let n = s.space.n_modes();
    let trials = p.trials.unwrap_or(200);
    let tol = p.tolerance.unwrap_or(1e-9);
    let mut report = base_report("maj2", p, &s, tol).param("trials", trials);
    let results = run_trials(trials, |i| {
        let rho = random_state(&s.space, sweep_rank(i), &mut trial_rng(p.seed, i as u64));
        let passive = if n == 1 { passive_rearrangement(&rho, cfg)? } else { multimode_passive(&rho, cfg)? };
        let (sp, leak) = n_fold(&s.rep, &rho, cfg)?;
        let (sp_passive, leak_passive) = n_fold(&s.rep, &passive, cfg)?;
        let gap = majorizes_weights(sp_passive.values(), sp.values(), 1.0)?.worst_partial_sum_gap;
        let leakage = leak.max(leak_passive);
        let mut t = Trial::new(gap, leakage);
        if n > 1 && is_candidate(gap, leakage) {
            t.candidate = Some(Candidate::new(i, gap, leakage, &[&rho]));
        }
        Ok(t)
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(if n == 1 { Mode::Assert } else { Mode::Probe }))
}

/// Purity-loss witness: `S(E_{lambda,0}(psi)) - 1e-6` over random pure non-vacuum inputs.
pub(crate) fn verify_purity(p: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let channel = p.channel()?;
    if channel.kind != ThermalKind::Attenuator || !channel.is_quantum_limited() || !(channel.param < 1.0 && channel.param > 0.0) {
        return Err(Error::Domain("the purity witness needs a quantum-limited attenuator with 0 < lambda < 1".into()));
    }
    let d = p.dim_or(10)?;
    let trials = p.trials.unwrap_or(200);
    let threshold = 1e-6;
    let rep = channel.build(d, p.leakage_target(), cfg)?;
    let space = FockSpace::single(d)?;
    let mut report = VerificationReport::new("purity", p.seed, p.tolerance.unwrap_or(1e-12))
        .param("channel", channel)
        .param("dim", d)
        .param("trials", trials)
        .param("entropy_threshold", threshold);
    let (vac, _) = n_fold(&rep, &DensityMatrix::vacuum(&space), cfg)?;
    report.detail("vacuum_output_entropy", vac.entropy());
    let results = run_trials(trials, |i| {
        let psi = random_state(&space, Some(1), &mut trial_rng(p.seed, i as u64));
        let (sp, leak) = n_fold(&rep, &psi, cfg)?;
        Ok(Trial::new(sp.entropy() - threshold, leak))
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// `||Phi^n(vacuum)||_p - sup_rho ||Phi^n(rho)||_p` with the supremum searched from random
/// restarts; the vacuum value is the closed form `||omega(E_out)||_p^n`.
pub(crate) fn verify_one_to_p(p: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let exponent = p.p.unwrap_or(2.0);
    check_exponent("p", exponent)?;
    let s = setup(p, if p.modes == 2 { 4 } else { 10 }, cfg)?;
    let n = s.space.n_modes();
    let tol = p.tolerance.unwrap_or(1e-6);
    let opt = p.optimizer();
    let vac_closed = (n as f64 * ln_thermal_norm(s.channel.output_energy(0.0), exponent)).exp();
    let mut report = base_report("one-to-p", p, &s, tol).param("p", exponent).param("restarts", opt.restarts);
    report.detail("vacuum_value", vac_closed);
    report.detail("vacuum_numeric_error", (s.vacuum.norm(exponent) - vac_closed).abs());
    let dim = s.space.total_dim();
    let results = search_factors(&[(dim, dim)], &opt, |f| {
        let rho = state_from_factor(&s.space, &f[0]);
        n_fold(&s.rep, &rho, cfg).map(|(sp, _)| sp.norm(exponent)).unwrap_or(f64::NEG_INFINITY)
    });
    let mut best = f64::NEG_INFINITY;
    for r in &results {
        let rho = state_from_factor(&s.space, &r.factors[0]);
        let (_, leak) = n_fold(&s.rep, &rho, cfg)?;
        report.record(vac_closed - r.value, leak);
        best = best.max(r.value);
    }
    report.detail("best_search_value", best);
    Ok(report.finish(Mode::Assert))
}

/// `S(Phi^n(rho)) - n g(out(g^{-1}(S(rho)/n)))`: asserted for one mode, probed for two.
pub(crate) fn verify_constrained_moe(p: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let s = setup(p, if p.modes == 2 { 4 } else { 10 }, cfg)?;
    let n = s.space.n_modes();
    let nf = n as f64;
    let tol = p.tolerance.unwrap_or(1e-7);
    let ch = s.channel;
    let rhs = |s_in: f64| nf * g(ch.output_energy(g_inverse(s_in / nf)));
    let gap_of = |rho: &DensityMatrix| -> Result<(f64, f64)> {
        let s_in = spectrum(rho, cfg)?.entropy();
        let (sp, leak) = n_fold(&s.rep, rho, cfg)?;
        Ok((sp.entropy() - rhs(s_in), leak))
    };
    let mut report = base_report("cmoe", p, &s, tol);
    let (thermal_numeric, thermal_closed) = thermal_equality(p, &ch, n, cfg)?;
    report.detail("thermal_gap", thermal_numeric - thermal_closed);
    report.detail("thermal_output_entropy", thermal_numeric);
    report.detail("thermal_closed_form", thermal_closed);
    if n == 1 {
        let trials = p.trials.unwrap_or(500);
        let d = s.space.total_dim();
        report = report.param("trials", trials);
        let results = run_trials(trials, |i| {
            let rho = random_state(&s.space, Some(1 + i % d), &mut trial_rng(p.seed, i as u64));
            let (gap, leak) = gap_of(&rho)?;
            Ok(Trial::new(gap, leak))
        })?;
        fold_trials(&mut report, results);
        return Ok(report.finish(Mode::Assert));
    }
    let opt = p.optimizer();
    report = report.param("restarts", opt.restarts);
    let d = s.space.total_dim();
    let ranks = [1, 2, d / 2, d];
    for (k, &rank) in ranks.iter().enumerate() {
        let share = super::OptimizerConfig {
            restarts: (opt.restarts / ranks.len()).max(1),
            seed: opt.seed.wrapping_add(k as u64),
            ..opt
        };
        let results = search_factors(&[(d, rank)], &share, |f| {
            gap_of(&state_from_factor(&s.space, &f[0])).map(|(gap, _)| -gap).unwrap_or(f64::NEG_INFINITY)
        });
        for r in results {
            let rho = state_from_factor(&s.space, &r.factors[0]);
            let (gap, leak) = gap_of(&rho)?;
            report.record(gap, leak);
            if is_candidate(gap, leak) {
                report.candidates.push(Candidate::new(r.restart, gap, leak, &[&rho]));
            }
        }
    }
    Ok(report.finish(Mode::Probe))
}

/// Output entropy of a thermal input (tensor power for two modes) at a cutoff holding all
/// but `1e-13` of its weight, and the closed form it should equal.
fn thermal_equality(p: &VerifyParams, ch: &GaussianChannel, n: usize, cfg: &GlobalConfig) -> Result<(f64, f64)> {
    let e_in = p.energy_a.unwrap_or(0.5);
    let d = thermal_required_dim(e_in, 1e-13).max(2);
    let target = if n == 1 { 1e-12 } else { 1e-10 };
    let rep = ch.build(d, target, cfg)?;
    let one = thermal_state(e_in, &FockSpace::single(d)?, cfg)?.value;
    let rho = if n == 1 { one } else { one.tensor(&one) };
    let (sp, _) = n_fold(&rep, &rho, cfg)?;
    let s_in = spectrum(&rho, cfg)?.entropy();
    Ok((sp.entropy(), n as f64 * g(ch.output_energy(g_inverse(s_in / n as f64)))))
}
