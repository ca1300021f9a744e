//! The twelve acceptance criteria at their stated tolerances, one line per criterion.
//! Runs without the libtest harness so the lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use gaussopt::channels::{kraus_amplifier_ql, kraus_attenuator_ql, DilationRep};
use gaussopt::fock::{thermal_required_dim, thermal_state};
use gaussopt::harness::{self, GaussianChannel, Status, VerificationReport, VerifyParams};
use gaussopt::linalg::{max_abs_diff, CMat};
use gaussopt::spectra::{g, spectrum};
use gaussopt::{Complex64, Cutoffs, DensityMatrix, FockSpace, GlobalConfig, Result};

struct Outcome {
    passed: bool,
    summary: String,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into() }
    }
}

fn params() -> VerifyParams {
    VerifyParams::default()
}

fn run(id: &str, p: VerifyParams) -> Result<VerificationReport> {
    harness::run(id, &p, &GlobalConfig::default())
}

/// Asserted reports must pass outright; a probe status means truncation was too large.
fn all_pass(reports: &[VerificationReport]) -> Outcome {
    let bad: Vec<String> = reports
        .iter()
        .filter(|r| r.status != Status::Pass)
        .map(|r| format!("{} {:?} gap {:.3e} leak {:.1e}", r.theorem_id, r.status, r.gap, r.leakage))
        .collect();
    let worst = reports.iter().map(|r| r.gap + r.tolerance).fold(f64::INFINITY, f64::min);
    if bad.is_empty() {
        Outcome::new(true, format!("{} reports, smallest margin over tolerance {worst:.3e}", reports.len()))
    } else {
        Outcome::new(false, bad.join("; "))
    }
}

fn within_time(mut o: Outcome, elapsed: Duration, limit: Duration) -> Outcome {
    if elapsed > limit {
        o.passed = false;
        o.summary = format!("{} (took {:.0} s, limit {:.0} s)", o.summary, elapsed.as_secs_f64(), limit.as_secs_f64());
    }
    o
}

fn unit(d: usize, i: usize, j: usize) -> CMat {
    let mut m = CMat::zeros(d, d);
    m[(i, j)] = Complex64::new(1.0, 0.0);
    m
}

fn dilation_image(kraus: &[CMat], x: &CMat) -> CMat {
    kraus.iter().fold(CMat::zeros(kraus[0].nrows(), kraus[0].nrows()), |acc, k| acc + k * x * k.adjoint())
}

fn kraus_vs_dilation() -> Result<Outcome> {
    let cfg = GlobalConfig::default();
    let d = 12;
    let guard = 3;
    let vacuum = DensityMatrix::vacuum(&FockSpace::single(1)?);
    let mut worst = 0.0f64;
    let mut defect = 0.0f64;
    for lambda in [0.3, 0.7] {
        let ch = kraus_attenuator_ql(lambda, Cutoffs::square(d).with_guard(guard), &cfg)?;
        let dil = DilationRep::attenuator(lambda, d, vacuum.clone())?.kraus(d);
        for i in 0..d {
            for j in 0..d {
                let x = unit(d, i, j);
                worst = worst.max(max_abs_diff(&ch.apply_operator(&x)?, &dilation_image(&dil, &x)));
            }
        }
    }
    for kappa in [1.1, 1.4] {
        let d_out = guard * d;
        let ch = kraus_amplifier_ql(kappa, Cutoffs::new(d, d_out).with_guard(guard), &cfg)?;
        let rep = DilationRep::amplifier(kappa, d, vacuum.clone(), guard)?;
        defect = defect.max(rep.leakage);
        let dil = rep.kraus(d_out);
        for i in 0..d {
            for j in 0..d {
                let x = unit(d, i, j);
                worst = worst.max(max_abs_diff(&ch.apply_operator(&x)?, &dilation_image(&dil, &x)));
            }
        }
    }
    Ok(Outcome::new(worst <= 1e-6, format!("max entrywise error {worst:.3e}, squeezer truncation defect {defect:.1e}")))
}

fn thermal_closed_forms() -> Result<Outcome> {
    let cfg = GlobalConfig::default();
    let energies = [0.0, 0.5, 1.0, 2.0];
    let mut channels = Vec::new();
    for e in energies {
        for lambda in [0.25, 0.5, 0.75] {
            channels.push(GaussianChannel::attenuator(lambda, e));
        }
        for kappa in [1.1, 1.3] {
            channels.push(GaussianChannel::amplifier(kappa, e));
        }
    }
    let (mut worst, mut leak) = (0.0f64, 0.0f64);
    for ch in &channels {
        for e_in in energies {
            let d = thermal_required_dim(e_in, 1e-10).max(2);
            let rep = ch.build(d, 1e-10, &cfg)?;
            let input = thermal_state(e_in, &FockSpace::single(d)?, &cfg)?;
            let out = rep.apply(&input.value, &cfg)?;
            let s = spectrum(&out.value, &cfg)?.entropy();
            worst = worst.max((s - g(ch.output_energy(e_in))).abs());
            leak = leak.max(out.leakage).max(input.leakage);
        }
    }
    Ok(Outcome::new(
        worst <= 1e-6 && leak < 1e-7,
        format!("{} channel/input pairs, max |S - g| {worst:.3e}, leakage {leak:.1e}", channels.len() * energies.len()),
    ))
}

fn channel_params(lambda: Option<f64>, kappa: Option<f64>) -> VerifyParams {
    VerifyParams { lambda, kappa, ..params() }
}

fn minimum_output_entropy() -> Result<Outcome> {
    let mut reports = Vec::new();
    // two-mode amplifier outputs at kappa 1.5 need a 51^2-dimensional eigensolve per trial
    for (modes, trials, kappa) in [(1, 500, 1.5), (2, 200, 1.1)] {
        for (lambda, kappa) in [(Some(0.5), None), (None, Some(kappa))] {
            let base = VerifyParams { modes, trials: Some(trials), dim: Some(10), ..channel_params(lambda, kappa) };
            reports.push(run("moe", VerifyParams { tolerance: Some(1e-7), ..base.clone() })?);
            reports.push(run("maj", VerifyParams { tolerance: Some(1e-9), ..base })?);
        }
    }
    Ok(all_pass(&reports))
}

fn passive_majorization() -> Result<Outcome> {
    let mut reports = Vec::new();
    for (lambda, kappa) in [(Some(0.5), None), (None, Some(1.5))] {
        reports.push(run("maj2", VerifyParams { trials: Some(200), tolerance: Some(1e-9), ..channel_params(lambda, kappa) })?);
    }
    reports.push(run("thin-maj", VerifyParams { trials: Some(200), tolerance: Some(1e-9), ..params() })?);
    Ok(all_pass(&reports))
}

fn thinning_attenuator() -> Result<Outcome> {
    let r = run("thin-att", VerifyParams { dim: Some(40), trials: Some(100), tolerance: Some(1e-10), ..params() })?;
    let mut o = all_pass(std::slice::from_ref(&r));
    o.summary = format!("{}; details {}", o.summary, serde_json::to_string(&r.details).unwrap_or_default());
    Ok(o)
}

fn thinning_inequalities() -> Result<Outcome> {
    let ent = run("thin-ent", VerifyParams { trials: Some(500), tolerance: Some(1e-8), ..params() })?;
    let mut reports = vec![ent];
    for (p, q) in [(1.0, 2.0), (2.0, 3.0), (1.5, 2.5)] {
        reports.push(run("thin-norm", VerifyParams { lambda: Some(0.5), p: Some(p), q: Some(q), tolerance: Some(1e-5), ..params() })?);
    }
    Ok(all_pass(&reports))
}

fn entropy_power() -> Result<Outcome> {
    let mut reports = Vec::new();
    for (lambda, kappa) in [(Some(0.3), None), (Some(0.5), None), (Some(0.8), None), (None, Some(1.2))] {
        reports.push(run("qepi", VerifyParams { trials: Some(500), tolerance: Some(1e-7), ..channel_params(lambda, kappa) })?);
    }
    let leak = reports.iter().map(|r| r.leakage).fold(0.0, f64::max);
    reports.push(run("qcepi", VerifyParams { trials: Some(50), tolerance: Some(1e-6), ..params() })?);
    let mut o = all_pass(&reports);
    if leak >= 1e-7 {
        o.passed = false;
    }
    o.summary = format!("{}, qEPI leakage {leak:.1e}", o.summary);
    Ok(o)
}

fn infty_and_duality() -> Result<Outcome> {
    let mut reports = Vec::new();
    for (lambda, kappa) in [(Some(0.5), None), (None, Some(1.5))] {
        for p in [1.5, 2.0, 4.0] {
            reports.push(run("infty", VerifyParams { p: Some(p), tolerance: Some(1e-6), ..channel_params(lambda, kappa) })?);
        }
    }
    reports.push(run("duality", VerifyParams { tolerance: Some(1e-8), ..params() })?);
    Ok(all_pass(&reports))
}

fn finite_differences() -> Result<Outcome> {
    let base = VerifyParams { trials: Some(100), h: Some(1e-4), tolerance: Some(1e-3), ..params() };
    Ok(all_pass(&[run("iso", base.clone())?, run("logsob", base)?]))
}

fn fisher_information() -> Result<Outcome> {
    let base = VerifyParams { trials: Some(20), order: Some(20), dim: Some(14), ..params() };
    let debruijn = run("debruijn", VerifyParams { tolerance: Some(5e-2), ..base.clone() })?;
    let stam = run("stam", base)?;
    Ok(all_pass(&[debruijn, stam]))
}

fn detail(r: &VerificationReport, key: &str) -> f64 {
    r.details.get(key).and_then(|v| v.as_f64()).unwrap_or(f64::NAN)
}

fn conjecture_probes() -> Result<Outcome> {
    let mut wide = params();
    wide.optimizer.restarts = 1000;
    let epni = run("epni", wide.clone())?;
    let young = run("young", wide.clone())?;
    let pq = run("pq", VerifyParams { modes: 2, p: Some(2.0), q: Some(3.0), ..wide.clone() })?;
    let cmoe = run("cmoe", VerifyParams { modes: 2, ..wide })?;
    let equality = [
        ("epni", detail(&epni, "thermal_gap").abs()),
        ("young", detail(&young, "thermal_pair_mismatch")),
        ("pq", detail(&pq, "thermal_input_mismatch")),
        ("cmoe", detail(&cmoe, "thermal_gap").abs()),
    ];
    let worst_equality = equality.iter().map(|e| e.1).fold(0.0, f64::max);
    let reports = [epni, young, pq, cmoe];
    let mut dumped = Vec::new();
    for r in &reports {
        if !r.candidates.is_empty() {
            let path = std::env::temp_dir().join(format!("gaussopt-candidates-{}.json", r.theorem_id));
            std::fs::write(&path, r.to_json_string()).ok();
            dumped.push(format!("{} candidates of {} in {}", r.candidates.len(), r.theorem_id, path.display()));
        }
    }
    let statuses_ok = reports.iter().all(|r| r.status == Status::Probe);
    let passed = worst_equality <= 1e-6 && worst_equality.is_finite() && dumped.is_empty() && statuses_ok;
    let mut summary = format!(
        "Gaussian equality cases within {worst_equality:.1e}; smallest probe gap {:.3e}",
        reports.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min)
    );
    if !dumped.is_empty() {
        summary = format!("{summary}; {}", dumped.join("; "));
    }
    Ok(Outcome::new(passed, summary))
}

fn reproducibility() -> Result<Outcome> {
    let mut mismatched = Vec::new();
    let cases = [
        ("moe", VerifyParams { seed: 7, modes: 2, ..params() }),
        ("epni", VerifyParams { seed: 11, ..params() }),
        ("pq", VerifyParams { seed: 3, p: Some(2.0), q: Some(3.0), ..params() }),
        ("thin-norm", VerifyParams { seed: 5, ..params() }),
    ];
    for (id, p) in &cases {
        let first = run(id, p.clone())?.to_json_string();
        let second = run(id, p.clone())?.to_json_string();
        if first != second {
            mismatched.push(*id);
        }
    }
    let other_seed = run("moe", VerifyParams { seed: 8, modes: 2, ..params() })?.to_json_string();
    let seed_matters = other_seed != run("moe", cases[0].1.clone())?.to_json_string();
    Ok(Outcome::new(
        mismatched.is_empty() && seed_matters,
        if mismatched.is_empty() {
            format!("{} verifiers give identical JSON per seed; different seeds differ: {seed_matters}", cases.len())
        } else {
            format!("differing JSON for {mismatched:?}")
        },
    ))
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Option<u64>);

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("Kraus vs dilation oracle", kraus_vs_dilation, Some(60)),
        ("thermal closed forms", thermal_closed_forms, None),
        ("minimum output entropy and vacuum majorization", minimum_output_entropy, Some(600)),
        ("passive and thinning majorization", passive_majorization, None),
        ("thinning equals the attenuator", thinning_attenuator, None),
        ("thinning entropy and norms", thinning_inequalities, None),
        ("quantum and conditional entropy power inequalities", entropy_power, None),
        ("p->p bound and duality", infty_and_duality, None),
        ("isoperimetric and log-Sobolev derivatives", finite_differences, None),
        ("de Bruijn and Stam", fisher_information, Some(900)),
        ("conjecture probes", conjecture_probes, None),
        ("reproducibility", reproducibility, None),
    ];
    let mut failures = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = match check() {
            Ok(o) => o,
            Err(e) => Outcome::new(false, format!("error: {e}")),
        };
        let elapsed = start.elapsed();
        let outcome = match limit {
            Some(s) => within_time(outcome, elapsed, Duration::from_secs(*s)),
            None => outcome,
        };
        if !outcome.passed {
            failures += 1;
        }
        println!(
            "acceptance {:>2} {} {name}: {} [{:.1} s]",
            k + 1,
            if outcome.passed { "PASS" } else { "FAIL" },
            outcome.summary,
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
