//! Two-input inequalities for the beam splitter and the two-mode squeezer: the entropy
//! photon-number inequality, the entropy power inequalities and the sharp Young constant.

use crate::channels::{zero_cmi_state, ChannelKind, ChannelRep, Cutoffs, ZeroCmiBlock};
use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::fock::{thermal_required_dim, thermal_state, thermal_weights, DensityMatrix, FockSpace, Tensor};
use crate::linalg::{self, CMat};
use crate::spectra::{cond_mutual_information, conditional_entropy, g, g_inverse, psd_norm, spectrum, Spectrum};

use super::families::{check_exponent, ln_thermal_norm, mixer_output_energy, GaussianChannel};
use super::norms::thermal_pq_sup;
use super::optimizer::{nelder_mead_max, search_factors, OptimizerConfig};
use super::report::{finite_or_label, Candidate, Mode, VerificationReport};
use super::sampling::{random_distribution, random_state, trial_rng};
use super::{fold_trials, is_candidate, run_trials, sweep_rank, Trial, VerifyParams};

/// `Tr_B U (. ) U^dagger` on `dim x dim_env` inputs. The beam splitter conserves photon
/// number, so its output is exact at `dim + dim_env - 1` levels; the squeezer output
/// cutoff is grown until the trace defect is below `leakage_target`.
pub(crate) fn mixer_rep(param: f64, dim: usize, dim_env: usize, leakage_target: f64, cfg: &GlobalConfig) -> Result<ChannelRep> {
    let cutoffs = Cutoffs::new(dim, dim + dim_env - 1).with_env(dim_env).with_guard(cfg.guard_factor);
    if param <= 1.0 {
        ChannelRep::new(ChannelKind::BeamSplitterReduce { lambda: param }, cutoffs, cfg)
    } else {
        ChannelRep::with_auto_output(ChannelKind::SqueezerReduce { kappa: param }, cutoffs, &cfg.with_leakage_max(leakage_target))
    }
}

/// Weights of `e^{S_A}` and `e^{S_B}` in the entropy power inequalities.
fn power_weights(param: f64) -> (f64, f64) {
    (param, (1.0 - param).abs())
}

fn epni_rhs(param: f64, s_a: f64, s_b: f64) -> f64 {
    g(mixer_output_energy(param, g_inverse(s_a), g_inverse(s_b)))
}

fn pair_entropies(a: &DensityMatrix, b: &DensityMatrix, cfg: &GlobalConfig) -> Result<(f64, f64)> {
    Ok((spectrum(a, cfg)?.entropy(), spectrum(b, cfg)?.entropy()))
}

fn output_entropy(rep: &ChannelRep, a: &DensityMatrix, b: &DensityMatrix, cfg: &GlobalConfig) -> Result<(f64, f64)> {
    let out = rep.apply(&a.tensor(b), cfg)?;
    Ok((spectrum(&out.value, cfg)?.entropy(), out.leakage))
}

/// Cutoff carrying a thermal input of mean `energy` up to `1e-9`.
fn thermal_dim(energy: f64) -> usize {
    thermal_required_dim(energy, 1e-9).max(2)
}

/// Truncated thermal weights of a pair and the diagonal of their image under the mixer.
/// Both mixers conserve `n_a +- n_b`, so a diagonal input leaves a diagonal output.
struct ThermalPair {
    w_a: Vec<f64>,
    w_b: Vec<f64>,
    out: Vec<f64>,
}

impl ThermalPair {
    fn new(param: f64, e_a: f64, e_b: f64, cfg: &GlobalConfig) -> Result<Self> {
        let (d_a, d_b) = (thermal_dim(e_a), thermal_dim(e_b));
        let rep = mixer_rep(param, d_a, d_b, 1e-10, &cfg.with_leakage_max(1e-6))?;
        let (w_a, w_b) = (thermal_weights(e_a, d_a), thermal_weights(e_b, d_b));
        let probs: Vec<f64> = w_a.iter().flat_map(|&x| w_b.iter().map(move |&y| x * y)).collect();
        let out = rep.output_diagonal(&probs)?;
        Ok(ThermalPair { w_a, w_b, out })
    }

    fn output_entropy(&self) -> f64 {
        let mass: f64 = self.out.iter().sum();
        Spectrum::from_values(self.out.iter().map(|v| v / mass).collect()).entropy()
    }
}

fn two_input_params(params: &VerifyParams, default_bs: usize, default_sq: usize) -> Result<(f64, usize)> {
    params.modes_in(&[1])?;
    let param = params.mixing()?;
    let d = params.dim_or(if param <= 1.0 { default_bs } else { default_sq })?;
    Ok((param, d))
}

/// `S(B(rho_A (x) rho_B)) - g(lambda g^{-1}(S_A) + (1-lambda) g^{-1}(S_B))` (squeezer
/// analogue for `kappa > 1`) over random pairs and a restart search. Always a probe.
pub(crate) fn epni_gap(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let (param, d) = two_input_params(params, 6, 4)?;
    let trials = params.trials.unwrap_or(500);
    let opt = params.optimizer();
    let tol = params.tolerance.unwrap_or(1e-6);
    let loose = cfg.with_leakage_max(1e-4);
    let rep = mixer_rep(param, d, d, params.leakage_target(), &loose)?;
    let space = FockSpace::single(d)?;
    let gap_of = |a: &DensityMatrix, b: &DensityMatrix| -> Result<(f64, f64)> {
        let (s_a, s_b) = pair_entropies(a, b, cfg)?;
        let (s_c, leak) = output_entropy(&rep, a, b, &loose)?;
        Ok((s_c - epni_rhs(param, s_a, s_b), leak))
    };

    let mut report = VerificationReport::new("epni", params.seed, tol)
        .param("mixing", param)
        .param("dim_in", d)
        .param("dim_out", rep.dim_out())
        .param("trials", trials)
        .param("restarts", opt.restarts);

    let (e_a, e_b) = (params.energy_a.unwrap_or(0.3), params.energy_b.unwrap_or(0.6));
    let pair = ThermalPair::new(param, e_a, e_b, cfg)?;
    report.detail("thermal_gap", pair.output_entropy() - g(mixer_output_energy(param, e_a, e_b)));

    // with a thermal second input the gap is the constrained minimum-entropy gap of the
    // thermal attenuator or amplifier
    let rho_a = random_state(&space, None, &mut trial_rng(params.seed, u64::MAX));
    let d_b = thermal_dim(e_b);
    let w_b = thermal_state(e_b, &FockSpace::single(d_b)?, cfg)?.value;
    let rep_env = mixer_rep(param, d, d_b, 1e-10, &cfg.with_leakage_max(1e-6))?;
    let (s_mix, _) = output_entropy(&rep_env, &rho_a, &w_b, cfg)?;
    let ch = if param <= 1.0 { GaussianChannel::attenuator(param, e_b) } else { GaussianChannel::amplifier(param, e_b) };
    let single = ch.build(d, 1e-10, &cfg.with_leakage_max(1e-6))?;
    let out = single.apply(&rho_a, &cfg.with_leakage_max(1e-6))?;
    report.detail("thermal_environment_route_mismatch", (spectrum(&out.value, cfg)?.entropy() - s_mix).abs());

    let random = run_trials(trials, |i| {
        let mut rng = trial_rng(params.seed, i as u64);
        let a = random_state(&space, sweep_rank(i), &mut rng);
        let b = random_state(&space, sweep_rank(i / 4), &mut rng);
        let (gap, leak) = gap_of(&a, &b)?;
        let mut t = Trial::new(gap, leak);
        if is_candidate(gap, leak) {
            t.candidate = Some(Candidate::new(i, gap, leak, &[&a, &b]));
        }
        Ok(t)
    })?;
    fold_trials(&mut report, random);
    search_pairs(&mut report, &space, &opt, trials, |a, b| gap_of(a, b))?;
    Ok(report.finish(Mode::Probe))
}

/// Restart search minimizing a two-input gap; results are recorded after the random
/// trials, with candidate indices offset by `offset`.
fn search_pairs(
    report: &mut VerificationReport,
    space: &FockSpace,
    opt: &OptimizerConfig,
    offset: usize,
    gap_of: impl Fn(&DensityMatrix, &DensityMatrix) -> Result<(f64, f64)> + Sync,
) -> Result<()> {
    let d = space.total_dim();
    let from = |f: &[CMat]| (super::sampling::state_from_factor(space, &f[0]), super::sampling::state_from_factor(space, &f[1]));
    let results = search_factors(&[(d, d), (d, d)], opt, |f| {
        let (a, b) = from(f);
        gap_of(&a, &b).map(|(gap, _)| -gap).unwrap_or(f64::NEG_INFINITY)
    });
    for r in results {
        let (a, b) = from(&r.factors);
        let (gap, leak) = gap_of(&a, &b)?;
        report.record(gap, leak);
        if is_candidate(gap, leak) {
            report.candidates.push(Candidate::new(offset + r.restart, gap, leak, &[&a, &b]));
        }
    }
    Ok(())
}

/// `e^{S(C)} - lambda e^{S_A} - |1-lambda| e^{S_B}` on random product pairs.
pub(crate) fn qepi_gap(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let (param, d) = two_input_params(params, 6, 4)?;
    let trials = params.trials.unwrap_or(500);
    let tol = params.tolerance.unwrap_or(1e-7);
    let rep = mixer_rep(param, d, d, params.leakage_target(), cfg)?;
    let space = FockSpace::single(d)?;
    let (w_a, w_b) = power_weights(param);
    let gap_of = |s_c: f64, s_a: f64, s_b: f64| s_c.exp() - w_a * s_a.exp() - w_b * s_b.exp();

    let mut report = VerificationReport::new("qepi", params.seed, tol)
        .param("mixing", param)
        .param("dim_in", d)
        .param("dim_out", rep.dim_out())
        .param("trials", trials);
    let vac = DensityMatrix::vacuum(&space);
    let (s_vac, _) = output_entropy(&rep, &vac, &vac, cfg)?;
    report.detail("vacuum_gap", gap_of(s_vac, 0.0, 0.0));
    let (e_a, e_b) = (params.energy_a.unwrap_or(0.3), params.energy_b.unwrap_or(0.6));
    let s_th = ThermalPair::new(param, e_a, e_b, cfg)?.output_entropy();
    report.detail("thermal_gap", gap_of(s_th, g(e_a), g(e_b)));

    let results = run_trials(trials, |i| {
        let mut rng = trial_rng(params.seed, i as u64);
        let a = random_state(&space, sweep_rank(i), &mut rng);
        let b = random_state(&space, sweep_rank(i / 4), &mut rng);
        let (s_a, s_b) = pair_entropies(&a, &b, cfg)?;
        let (s_c, leak) = output_entropy(&rep, &a, &b, cfg)?;
        Ok(Trial::new(gap_of(s_c, s_a, s_b), leak))
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

fn random_block<R: rand::Rng>(d: usize, memory: usize, rank: Option<usize>, rng: &mut R) -> Result<DensityMatrix> {
    let space = if memory == 1 { FockSpace::single(d)? } else { FockSpace::new(vec![d, memory])? };
    Ok(random_state(&space, rank, rng))
}

/// Conditional entropy power inequality on random states of `A B M` with `I(A:B|M) = 0`:
/// `e^{S(C|M)} - lambda e^{S(A|M)} - |1-lambda| e^{S(B|M)}` with the mixer acting on `A B`.
pub(crate) fn qcepi_gap(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let (param, d) = two_input_params(params, 3, 3)?;
    let trials = params.trials.unwrap_or(50);
    let tol = params.tolerance.unwrap_or(1e-6);
    let rep = mixer_rep(param, d, d, params.leakage_target(), cfg)?;
    let (w_a, w_b) = power_weights(param);
    let mut report = VerificationReport::new("qcepi", params.seed, tol)
        .param("mixing", param)
        .param("dim_in", d)
        .param("dim_out", rep.dim_out())
        .param("trials", trials);
    let results = run_trials(trials, |i| {
        let mut rng = trial_rng(params.seed, i as u64);
        let n_blocks = 1 + i % 3;
        let weights = random_distribution(n_blocks, &mut rng);
        let blocks = (0..n_blocks)
            .map(|k| {
                let (m_a, m_b) = (1 + (i + k) % 2, 1 + (i / 2 + k) % 2);
                Ok(ZeroCmiBlock {
                    weight: weights.weights()[k],
                    rho_a: random_block(d, m_a, sweep_rank(i + k), &mut rng)?,
                    rho_b: random_block(d, m_b, sweep_rank(i / 4 + k), &mut rng)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let rho = zero_cmi_state(&blocks, cfg)?;
        let cmi = cond_mutual_information(&rho, &[0], &[1], &[2], cfg)?;
        if cmi > 1e-9 {
            return Err(Error::Domain(format!("input conditional mutual information {cmi:.3e} exceeds 1e-9")));
        }
        let out = rep.apply_to_modes(&rho, 0, cfg)?;
        let s_c = conditional_entropy(&out.value, &[0], &[1], cfg)?;
        let s_a = conditional_entropy(&rho, &[0], &[2], cfg)?;
        let s_b = conditional_entropy(&rho, &[1], &[2], cfg)?;
        Ok(Trial::new(s_c.exp() - w_a * s_a.exp() - w_b * s_b.exp(), out.leakage))
    })?;
    fold_trials(&mut report, results);
    Ok(report.finish(Mode::Assert))
}

/// Best point of `f(E_A, E_B)`: log grid (plus the zero energies) and Nelder–Mead in log
/// coordinates from the best grid point and from every seed.
pub(crate) fn sup_over_pairs(f: impl Fn(f64, f64) -> f64, seeds: &[(f64, f64)], opt: &OptimizerConfig) -> (f64, f64, f64) {
    let steps = (opt.grid_steps / 2).max(8);
    let (lo, hi) = (opt.grid_lo.ln(), opt.grid_hi.ln());
    let mut axis: Vec<f64> = (0..steps).map(|i| (lo + (hi - lo) * i as f64 / (steps - 1) as f64).exp()).collect();
    axis.insert(0, 0.0);
    let mut best = (0.0, 0.0, f64::NEG_INFINITY);
    for &a in &axis {
        for &b in &axis {
            let v = f(a, b);
            if v > best.2 {
                best = (a, b, v);
            }
        }
    }
    let mut starts = vec![(best.0, best.1)];
    starts.extend_from_slice(seeds);
    let to_log = |e: f64| e.max(opt.grid_lo).ln();
    let clamp = |u: f64| u.min(hi + 10.0).exp();
    for &(a, b) in &starts {
        let v = f(a, b);
        if v > best.2 {
            best = (a, b, v);
        }
        let (x, v) = nelder_mead_max(|x| f(clamp(x[0]), clamp(x[1])), &[to_log(a), to_log(b)], 0.5, opt.refine_iters * 3);
        if v > best.2 {
            best = (clamp(x[0]), clamp(x[1]), v);
        }
    }
    best
}

/// `ln ||B(omega(E_A) (x) omega(E_B))||_r - ln ||omega(E_A)||_p - ln ||omega(E_B)||_q`.
fn ln_young_ratio(param: f64, p: f64, q: f64, r: f64, e_a: f64, e_b: f64) -> f64 {
    ln_thermal_norm(mixer_output_energy(param, e_a, e_b), r) - ln_thermal_norm(e_a, p) - ln_thermal_norm(e_b, q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Finiteness {
    Attained,
    Asymptotic,
    Divergent,
}

impl Finiteness {
    fn of(p: f64, q: f64, r: f64) -> Self {
        let lhs = 1.0 / p + 1.0 / q;
        let rhs = 1.0 + 1.0 / r;
        if (lhs - rhs).abs() <= 1e-12 {
            Finiteness::Asymptotic
        } else if lhs > rhs {
            Finiteness::Attained
        } else {
            Finiteness::Divergent
        }
    }

    fn label(self) -> &'static str {
        match self {
            Finiteness::Attained => "finite_attained",
            Finiteness::Asymptotic => "finite_asymptotic",
            Finiteness::Divergent => "divergent",
        }
    }
}

/// Thermal-pair value of `ln C_1(p, q, r, param)`; `+inf` in the divergent regime.
pub fn ln_young_thermal(param: f64, p: f64, q: f64, r: f64, seeds: &[(f64, f64)], opt: &OptimizerConfig) -> f64 {
    if Finiteness::of(p, q, r) == Finiteness::Divergent {
        return f64::INFINITY;
    }
    sup_over_pairs(|a, b| ln_young_ratio(param, p, q, r, a, b), seeds, opt).2
}

/// `p(r, alpha) = r / (r + alpha - alpha r)`.
fn tilted_exponent(r: f64, alpha: f64) -> f64 {
    r / (r + alpha - alpha * r)
}

/// Entropy lower bound `sup_{alpha,beta} alpha S_A + beta S_B - d/dr ln C_1(p(r,alpha), q(r,beta), r)|_{r=1}`,
/// with the derivative taken as the `r -> 1` limit of the thermal ratio:
/// `sup_{E_A,E_B} alpha g(E_A) + beta g(E_B) - g(mixed energy)`.
fn young_entropy_bound(param: f64, s_a: f64, s_b: f64, opt: &OptimizerConfig) -> (f64, f64, f64) {
    let (e_a, e_b) = (g_inverse(s_a), g_inverse(s_b));
    let slope = |alpha: f64, beta: f64| {
        sup_over_pairs(|a, b| alpha * g(a) + beta * g(b) - g(mixer_output_energy(param, a, b)), &[(e_a, e_b)], opt).2
    };
    let objective = |x: &[f64]| {
        let (alpha, beta) = (x[0].abs(), x[1].abs());
        alpha * s_a + beta * s_b - slope(alpha, beta)
    };
    let (x, v) = nelder_mead_max(objective, &[0.3, 0.3], 0.1, 60);
    (v, x[0].abs(), x[1].abs())
}

/// Thermal-pair supremum of the Young ratio against a restart search over positive
/// `X`, `Y`. Also reports the derived `p->q` bound, the Rényi entropy bound on random pairs and
/// the entropy bound on a thermal pair. Always a probe.
pub(crate) fn young_c1_estimate(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let (param, d) = two_input_params(params, 4, 3)?;
    let p = params.p.unwrap_or(1.2);
    let q = params.q.unwrap_or(1.2);
    let r = params.r.unwrap_or(2.0);
    for (name, v) in [("p", p), ("q", q), ("r", r)] {
        check_exponent(name, v)?;
    }
    let opt = params.optimizer();
    let tol = params.tolerance.unwrap_or(1e-6);
    let finiteness = Finiteness::of(p, q, r);
    let (e_a, e_b) = (params.energy_a.unwrap_or(0.3), params.energy_b.unwrap_or(0.6));
    let ln_c1 = ln_young_thermal(param, p, q, r, &[(e_a, e_b)], &opt);
    let c1 = ln_c1.exp();

    let rep = mixer_rep(param, d, d, params.leakage_target(), &cfg.with_leakage_max(1e-4))?;
    let ratio = |x: &CMat, y: &CMat| -> Result<f64> {
        let out = rep.apply_operator(&linalg::kron(x, y))?;
        Ok(psd_norm(&out, r) / (psd_norm(x, p) * psd_norm(y, q)))
    };
    let results = search_factors(&[(d, d), (d, d)], &opt, |f| {
        ratio(&(&f[0] * f[0].adjoint()), &(&f[1] * f[1].adjoint())).unwrap_or(f64::NEG_INFINITY)
    });

    let mut report = VerificationReport::new("young", params.seed, tol)
        .param("mixing", param)
        .param("p", p)
        .param("q", q)
        .param("r", r)
        .param("dim_in", d)
        .param("dim_out", rep.dim_out())
        .param("restarts", opt.restarts);
    report.detail("thermal_value", finite_or_label(c1));
    report.detail("finiteness", finiteness.label());

    // thermal pair through the truncated operators against the closed form
    let pair = ThermalPair::new(param, e_a, e_b, cfg)?;
    let norm = |w: &[f64], p: f64| Spectrum::from_values(w.to_vec()).norm(p);
    let numeric = norm(&pair.out, r) / (norm(&pair.w_a, p) * norm(&pair.w_b, q));
    report.detail("thermal_pair_mismatch", (numeric - ln_young_ratio(param, p, q, r, e_a, e_b).exp()).abs());

    let space = FockSpace::single(d)?;
    let mut best = f64::NEG_INFINITY;
    for res in &results {
        let (x, y) = (&res.factors[0] * res.factors[0].adjoint(), &res.factors[1] * res.factors[1].adjoint());
        let value = ratio(&x, &y)?;
        best = best.max(value);
        let gap = c1 - value;
        report.record(gap, rep.leakage());
        if is_candidate(gap, rep.leakage()) {
            let a = super::sampling::state_from_factor(&space, &res.factors[0]);
            let b = super::sampling::state_from_factor(&space, &res.factors[1]);
            report.candidates.push(Candidate::new(res.restart, gap, rep.leakage(), &[&a, &b]));
        }
    }
    report.detail("best_search_value", best);

    if param <= 1.0 {
        // p->q norm of the attenuator with environment energy E_B from Young constants
        let ch = GaussianChannel::attenuator(param, e_b);
        let pq_thermal = thermal_pq_sup(&ch, p, r, &opt).value;
        let bound = [1.0, 1.1, 1.25, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0]
            .iter()
            .map(|&s| ln_young_thermal(param, p, s, r, &[], &opt) + ln_thermal_norm(e_b, s))
            .fold(f64::INFINITY, f64::min);
        report.detail("pq_thermal", pq_thermal.exp());
        report.detail("pq_young_bound", finite_or_label(bound.exp()));
    }

    if r > 1.0 && ln_c1.is_finite() {
        let coeff = r / (r - 1.0);
        let src = run_trials(50, |i| {
            let mut rng = trial_rng(params.seed ^ 0x5eed, i as u64);
            let a = random_state(&space, sweep_rank(i), &mut rng);
            let b = random_state(&space, sweep_rank(i / 4), &mut rng);
            let out = rep.apply(&a.tensor(&b), &cfg.with_leakage_max(1e-4))?;
            let s_r = spectrum(&out.value, cfg)?.renyi(r);
            let (sa, sb) = (spectrum(&a, cfg)?.renyi(p), spectrum(&b, cfg)?.renyi(q));
            Ok(s_r - coeff * ((p - 1.0) / p * sa + (q - 1.0) / q * sb - ln_c1))
        })?;
        report.detail("renyi_bound_min_gap", src.into_iter().fold(f64::INFINITY, f64::min));
    }

    let (s_a, s_b) = (g(e_a), g(e_b));
    let (bound, alpha, beta) = young_entropy_bound(param, s_a, s_b, &opt);
    let epni = epni_rhs(param, s_a, s_b);
    report.detail("entropy_bound", bound);
    report.detail("entropy_bound_multipliers", [alpha, beta]);
    report.detail("entropy_bound_excess_over_epni", bound - epni);
    let (lo_p, lo_q) = (tilted_exponent(1.0 + 1e-4, alpha), tilted_exponent(1.0 + 1e-4, beta));
    let fd = ln_young_thermal(param, lo_p, lo_q, 1.0 + 1e-4, &[(e_a, e_b)], &opt) / 1e-4;
    report.detail("entropy_bound_finite_difference", alpha * s_a + beta * s_b - fd);
    Ok(report.finish(Mode::Probe))
}
