//! Finite-difference checks: isoperimetric and log-Sobolev inequalities of the attenuator,
//! the de Bruijn identity, the Stam inequality and entropy growth along the heat semigroup.

use rand::Rng;

use crate::channels::{heat_semigroup, kraus_attenuator_ql, ChannelRep, Cutoffs};
use crate::config::GlobalConfig;
use crate::error::Result;
use crate::fock::{thermal_required_dim, thermal_state, DensityMatrix, FockSpace, Tensor};
use crate::linalg::{self, cr, CMat};
use crate::spectra::{g, g_inverse, g_prime, spectrum, ProbVector};

use super::entropy_power::mixer_rep;
use super::families::{d_ln_thermal_norm, energy_of_power_normalized};
use super::report::{Mode, VerificationReport};
use super::sampling::{ginibre, random_fock_diagonal, state_from_factor, trial_rng};
use super::{run_trials, Trial, VerifyParams};

/// One-sided second-order derivative at `x = 1` from values at `1, 1-h, 1-2h`.
fn backward_derivative(f0: f64, f1: f64, f2: f64, h: f64) -> f64 {
    (3.0 * f0 - 4.0 * f1 + f2) / (2.0 * h)
}

/// Same stencil forward from `t = 0`.
fn forward_derivative(f0: f64, f1: f64, f2: f64, h: f64) -> f64 {
    -backward_derivative(f0, f1, f2, h)
}

/// `f(E_{lambda,0}(rho))` at `lambda = 1, 1-h, 1-2h`. The attenuator maps the cutoff into
/// itself, so there is no truncation.
fn along_attenuator(rho: &DensityMatrix, h: f64, cfg: &GlobalConfig, f: impl Fn(&DensityMatrix) -> Result<f64>) -> Result<[f64; 3]> {
    let d = rho.dim();
    let mut out = [0.0; 3];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = if k == 0 {
            f(rho)?
        } else {
            let ch = kraus_attenuator_ql(1.0 - k as f64 * h, Cutoffs::square(d), cfg)?;
            f(&ch.apply(rho, cfg)?.value)?
        };
    }
    Ok(out)
}

fn iso_sides(rho: &DensityMatrix, h: f64, cfg: &GlobalConfig) -> Result<(f64, f64)> {
    let [f0, f1, f2] = along_attenuator(rho, h, cfg, |s| Ok(spectrum(s, cfg)?.entropy()))?;
    let energy = g_inverse(f0);
    Ok((backward_derivative(f0, f1, f2, h), energy * g_prime(energy)))
}

/// `E g'(E) - d/dlambda S(E_{lambda,0}(rho))|_1` with `E = g^{-1}(S(rho))`, on random
/// Fock-diagonal states.
pub(crate) fn iso_derivative_check(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let d = params.dim_or(12)?;
    let h = params.step(1e-4)?;
    let trials = params.trials.unwrap_or(100);
    let tol = params.tolerance.unwrap_or(1e-3);
    let mut report = VerificationReport::new("iso", params.seed, tol)
        .param("dim", d)
        .param("h", h)
        .param("trials", trials);
    let e_th = params.energy_a.unwrap_or(0.5);
    let d_th = thermal_required_dim(e_th, 1e-14);
    let omega = thermal_state(e_th, &FockSpace::single(d_th)?, cfg)?.value;
    let (lhs, rhs) = iso_sides(&omega, h, cfg)?;
    report.detail("thermal_gap", rhs - lhs);
    let results = run_trials(trials, |i| {
        let rho = random_fock_diagonal(d, &mut trial_rng(params.seed, i as u64), cfg)?;
        let (lhs, rhs) = iso_sides(&rho, h, cfg)?;
        Ok(Trial::new(rhs - lhs, 0.0))
    })?;
    super::fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

fn ln_norm(rho: &DensityMatrix, p: f64, cfg: &GlobalConfig) -> Result<f64> {
    Ok(spectrum(rho, cfg)?.norm(p).ln())
}

/// Mean photon number of the thermal state matched to `rho` at exponent `p`: the entropy of
/// `omega^p / Tr omega^p` equals that of `rho^p / Tr rho^p`.
pub fn log_sobolev_matched_energy(rho: &DensityMatrix, p: f64, cfg: &GlobalConfig) -> Result<f64> {
    let powered: Vec<f64> = spectrum(rho, cfg)?.values().iter().map(|v| v.max(0.0).powf(p)).collect();
    let tilted = ProbVector::from_raw(powered).normalized();
    let s = crate::spectra::shannon_entropy(&tilted);
    Ok(energy_of_power_normalized(g_inverse(s), p))
}

fn logsob_sides(rho: &DensityMatrix, p: f64, h: f64, cfg: &GlobalConfig) -> Result<(f64, f64)> {
    let [f0, f1, f2] = along_attenuator(rho, h, cfg, |s| ln_norm(s, p, cfg))?;
    let energy = log_sobolev_matched_energy(rho, p, cfg)?;
    // E_{lambda,0}(omega(E)) = omega(lambda E)
    Ok((backward_derivative(f0, f1, f2, h), energy * d_ln_thermal_norm(energy, p)))
}

/// `d/dlambda ln ||E_{lambda,0}(rho)||_p|_1` minus the same for the matched thermal state.
/// Without an explicit `p` the trials cycle through `p = 1.5, 2, 3`.
pub(crate) fn log_sobolev_check(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let d = params.dim_or(12)?;
    let h = params.step(1e-4)?;
    let trials = params.trials.unwrap_or(100);
    let tol = params.tolerance.unwrap_or(1e-3);
    let exponents: Vec<f64> = match params.p {
        Some(p) => {
            super::families::check_exponent("p", p)?;
            vec![p]
        }
        None => vec![1.5, 2.0, 3.0],
    };
    let mut report = VerificationReport::new("logsob", params.seed, tol)
        .param("dim", d)
        .param("h", h)
        .param("p", &exponents)
        .param("trials", trials);
    let e_th = params.energy_a.unwrap_or(0.5);
    let d_th = thermal_required_dim(e_th, 1e-14);
    let omega = thermal_state(e_th, &FockSpace::single(d_th)?, cfg)?.value;
    let (lhs, rhs) = logsob_sides(&omega, exponents[0], h, cfg)?;
    report.detail("thermal_gap", lhs - rhs);
    let vacuum = DensityMatrix::vacuum(&FockSpace::single(d)?);
    let (lhs, rhs) = logsob_sides(&vacuum, exponents[0], h, cfg)?;
    report.detail("vacuum_sides", [lhs, rhs]);
    let results = run_trials(trials, |i| {
        let rho = random_fock_diagonal(d, &mut trial_rng(params.seed, i as u64), cfg)?;
        let p = exponents[i % exponents.len()];
        let (lhs, rhs) = logsob_sides(&rho, p, h, cfg)?;
        Ok(Trial::new(lhs - rhs, 0.0))
    })?;
    super::fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// Random state whose Fock weights decay geometrically with ratio in `[0.15, 0.3]`, so the
/// top of the cutoff carries negligible weight. States with weight up to the cutoff have
/// infinite Fisher information, since the heat semigroup fills the first empty level at
/// rate `-t ln t`.
fn smooth_state<R: Rng>(d: usize, rng: &mut R) -> DensityMatrix {
    let ratio: f64 = rng.random_range(0.15..0.3);
    let mut factor = ginibre(d, d, rng);
    for n in 0..d {
        let s = cr(ratio.powf(n as f64 / 2.0));
        factor.row_mut(n).iter_mut().for_each(|z| *z *= s);
    }
    state_from_factor(&FockSpace::single(d).expect("positive cutoff"), &factor)
}

/// Heat-semigroup samples of one state at `t = 0, h, 2h`.
struct HeatSamples {
    /// `S(N_t rho)`.
    entropy: [f64; 3],
    /// Quadrature-register mutual information `I(A:Z)` at the same times.
    mutual: [f64; 3],
    leakage: f64,
}

/// Heat semigroup at `h` and `2h` on `dim` levels, padded by `pad` output levels.
fn heat_pair(dim: usize, h: f64, order: usize, pad: usize, cfg: &GlobalConfig) -> Result<[ChannelRep; 2]> {
    let loose = cfg.with_leakage_max(1e-4);
    let at = |t: f64| heat_semigroup(t, order, Cutoffs::new(dim, dim + pad).with_guard(cfg.guard_factor), &loose);
    Ok([at(h)?, at(2.0 * h)?])
}

fn heat_samples(rho: &DensityMatrix, heat: &[ChannelRep; 2], cfg: &GlobalConfig) -> Result<HeatSamples> {
    let s0 = spectrum(rho, cfg)?.entropy();
    let mut out = HeatSamples { entropy: [s0; 3], mutual: [0.0; 3], leakage: 0.0 };
    let loose = cfg.with_leakage_max(1e-4);
    for (k, ch) in (1..3).zip(heat) {
        let image = ch.apply(rho, &loose)?;
        let s = spectrum(&image.value, cfg)?.entropy();
        let mut conditional = 0.0;
        for kraus in ch.kraus_matrices() {
            let branch: CMat = &kraus * rho.matrix() * kraus.adjoint();
            let w = linalg::trace(&branch).re;
            if w > 0.0 {
                let vals = linalg::eigvalsh(&branch);
                conditional -= vals.iter().filter(|v| **v > 0.0).map(|v| v * (v / w).ln()).sum::<f64>();
            }
        }
        out.entropy[k] = s;
        out.mutual[k] = s - conditional;
        out.leakage = out.leakage.max(image.leakage).max(ch.leakage());
    }
    Ok(out)
}

fn fisher(samples: &HeatSamples, h: f64) -> (f64, f64) {
    let [e0, e1, e2] = samples.entropy;
    let [m0, m1, m2] = samples.mutual;
    (forward_derivative(e0, e1, e2, h), forward_derivative(m0, m1, m2, h))
}

/// Relative disagreement between the entropy-rate and mutual-information estimates of the
/// Fisher information, over random states with decaying Fock tails.
pub(crate) fn fisher_de_bruijn_check(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let d = params.dim_or(14)?;
    let h = params.step(1e-3)?;
    let order = params.order.unwrap_or(20);
    let trials = params.trials.unwrap_or(20);
    let tol = params.tolerance.unwrap_or(5e-2);
    let pad = 10;
    let mut report = VerificationReport::new("debruijn", params.seed, tol)
        .param("dim", d)
        .param("dim_out", d + pad)
        .param("h", h)
        .param("order", order)
        .param("trials", trials);
    let e_th = params.energy_a.unwrap_or(0.3);
    let omega = thermal_state(e_th, &FockSpace::single(d)?, cfg)?.value;
    let heat = heat_pair(d, h, order, pad, cfg)?;
    let (j_entropy, j_mutual) = fisher(&heat_samples(&omega, &heat, cfg)?, h);
    report.detail("thermal_estimates", [j_entropy, j_mutual]);
    report.detail("thermal_closed_form", g_prime(e_th));
    let results = run_trials(trials, |i| {
        let rho = smooth_state(d, &mut trial_rng(params.seed, i as u64));
        let s = heat_samples(&rho, &heat, cfg)?;
        let (a, b) = fisher(&s, h);
        let rel = (a - b).abs() / a.abs().max(b.abs());
        Ok(Trial::new(if rel.is_finite() { -rel } else { f64::NEG_INFINITY }, s.leakage))
    })?;
    super::fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// `1/J(C) - lambda/J(A) - |1-lambda|/J(B)` on random product pairs, with `J` the
/// entropy-rate estimate. Without an explicit mixing parameter the trials cycle through
/// `lambda = 0.3, 0.5, 0.8`.
pub(crate) fn stam_check(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    params.modes_in(&[1])?;
    let d = params.dim_or(14)?;
    let h = params.step(1e-3)?;
    let order = params.order.unwrap_or(20);
    let trials = params.trials.unwrap_or(20);
    let tol = params.tolerance.unwrap_or(1e-3);
    let mixing: Vec<f64> = if params.lambda.is_some() || params.kappa.is_some() { vec![params.mixing()?] } else { vec![0.3, 0.5, 0.8] };
    let pad = 10;
    let reps = mixing.iter().map(|&m| mixer_rep(m, d, d, params.leakage_target(), cfg)).collect::<Result<Vec<_>>>()?;
    let heat_in = heat_pair(d, h, order, pad, cfg)?;
    let heat_out = reps
        .iter()
        .map(|r| heat_pair(r.dim_out(), h, order, pad, cfg))
        .collect::<Result<Vec<_>>>()?;
    let mut report = VerificationReport::new("stam", params.seed, tol)
        .param("dim", d)
        .param("mixing", &mixing)
        .param("h", h)
        .param("order", order)
        .param("trials", trials);
    let results = run_trials(trials, |i| {
        let mut rng = trial_rng(params.seed, i as u64);
        let (a, b) = (smooth_state(d, &mut rng), smooth_state(d, &mut rng));
        let k = i % mixing.len();
        let out = reps[k].apply(&a.tensor(&b), cfg)?;
        let j = |rho: &DensityMatrix, heat: &[ChannelRep; 2]| -> Result<(f64, f64)> {
            let s = heat_samples(rho, heat, cfg)?;
            Ok((fisher(&s, h).0, s.leakage))
        };
        let ((ja, la), (jb, lb), (jc, lc)) = (j(&a, &heat_in)?, j(&b, &heat_in)?, j(&out.value, &heat_out[k])?);
        let m = mixing[k];
        let gap = 1.0 / jc - m / ja - (1.0 - m).abs() / jb;
        Ok(Trial::new(gap, la.max(lb).max(lc).max(out.leakage)))
    })?;
    super::fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// `S(N_t rho)` for two random states and a thermal state over `t_list`; reports
/// `S - ln t - 1` and the entropy difference of the two states. Probe only.
pub(crate) fn entropy_scaling_probe(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let e_th = params.energy_a.unwrap_or(0.3);
    let d = params.dim_or(8)?.max(thermal_required_dim(e_th, 1e-10));
    let order = params.order.unwrap_or(20);
    let t_list = params.t_list.clone().unwrap_or_else(|| vec![0.25, 0.5, 1.0, 2.0, 4.0]);
    if t_list.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(crate::Error::Domain(format!("times must be finite and nonnegative, got {t_list:?}")));
    }
    let mut rng = trial_rng(params.seed, 0);
    let states = [
        smooth_state(d, &mut rng),
        smooth_state(d, &mut rng),
        thermal_state(e_th, &FockSpace::single(d)?, cfg)?.value,
    ];
    let loose = cfg.with_leakage_max(1e-2);
    let rows = run_trials(t_list.len(), |k| {
        let t = t_list[k];
        let d_out = d + thermal_required_dim(t + e_th, 1e-9);
        let ch = heat_semigroup(t, order, Cutoffs::new(d, d_out).with_guard(cfg.guard_factor), &loose)?;
        let mut entropies = [0.0; 3];
        let mut leakage = ch.leakage();
        for (slot, rho) in entropies.iter_mut().zip(&states) {
            let out = ch.apply(rho, &loose)?;
            leakage = leakage.max(out.leakage);
            *slot = spectrum(&out.value, cfg)?.entropy();
        }
        Ok((t, entropies, leakage))
    })?;
    let mut report = VerificationReport::new("scaling", params.seed, 0.0)
        .param("dim", d)
        .param("order", order)
        .param("t_list", &t_list);
    let mut table = Vec::new();
    let mut thermal_error = 0.0f64;
    let mut t0_error = 0.0f64;
    let mut differences = Vec::new();
    for (t, s, leak) in rows {
        let diff = (s[0] - s[1]).abs();
        report.record(-diff, leak);
        differences.push(diff);
        thermal_error = thermal_error.max((s[2] - g(e_th + t)).abs());
        if t == 0.0 {
            for (k, rho) in states.iter().enumerate() {
                t0_error = t0_error.max((s[k] - spectrum(rho, cfg)?.entropy()).abs());
            }
        }
        let excess = if t > 0.0 { Some(s[0] - t.ln() - 1.0) } else { None };
        table.push(serde_json::json!({ "t": t, "entropies": s, "excess_over_ln_t_plus_1": excess, "leakage": leak }));
    }
    report.detail("rows", table);
    report.detail("thermal_error", thermal_error);
    report.detail("t0_error", t0_error);
    report.detail("difference_shrinking", differences.windows(2).all(|w| w[1] <= w[0]));
    Ok(report.finish(Mode::Probe))
}
