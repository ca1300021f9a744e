//! Channel duality: the trace pairing, the amplifier/attenuator dual identity, and
//! the duality of p->q norms.

use crate::channels::{kraus_amplifier_ql, kraus_attenuator_ql, Cutoffs};
use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, cr, CMat};

use super::report::{Mode, VerificationReport};
use super::sampling::{ginibre, random_kraus, trial_rng};
use super::{run_trials, VerifyParams};

fn forward(kraus: &[CMat], x: &CMat) -> CMat {
    kraus.iter().map(|k| k * x * k.adjoint()).fold(CMat::zeros(kraus[0].nrows(), kraus[0].nrows()), |acc, m| acc + m)
}

fn backward(kraus: &[CMat], y: &CMat) -> CMat {
    kraus.iter().map(|k| k.adjoint() * y * k).fold(CMat::zeros(kraus[0].ncols(), kraus[0].ncols()), |acc, m| acc + m)
}

fn pairing_defect(a: &CMat, phi_a: &CMat, b: &CMat, dual_b: &CMat) -> f64 {
    let lhs = linalg::trace(&(b * phi_a));
    let rhs = linalg::trace(&(dual_b * a));
    (lhs - rhs).norm() / (a.norm() * b.norm())
}

/// Worst relative defect of `Tr[B Phi(A)] = Tr[Phi^dagger(B) A]` on random Kraus channels and
/// on the truncated amplifier, and of `A_kappa^dagger = (1/kappa) E_{1/kappa}` on random
/// operators. The gap is minus the worst defect.
pub(crate) fn verify_duality(params: &VerifyParams, cfg: &GlobalConfig) -> Result<VerificationReport> {
    let trials = params.trials.unwrap_or(50);
    let kappa = params.kappa.unwrap_or(1.5);
    if !(kappa >= 1.0) {
        return Err(Error::Domain(format!("kappa must be >= 1, got {kappa}")));
    }
    let d = params.dim_or(8)?;
    let tol = params.tolerance.unwrap_or(1e-8);
    let d_out = 3 * d;
    let amp = kraus_amplifier_ql(kappa, Cutoffs::new(d, d_out), cfg)?;
    let amp_dual = amp.dual();
    let att = kraus_attenuator_ql(1.0 / kappa, Cutoffs::new(d_out, d), cfg)?;

    let defects = run_trials(trials, |i| {
        let mut rng = trial_rng(params.seed, i as u64);
        let (din, dout) = (2 + i % 4, 2 + (i / 4) % 4);
        let kraus = random_kraus(din, dout, 1 + i % 3, &mut rng);
        let a = ginibre(din, din, &mut rng);
        let b = ginibre(dout, dout, &mut rng);
        let random_pairing = pairing_defect(&a, &forward(&kraus, &a), &b, &backward(&kraus, &b));

        let x = ginibre(d, d, &mut rng);
        let y = ginibre(d_out, d_out, &mut rng);
        let dual_y = amp_dual.apply_operator(&y)?;
        let amp_pairing = pairing_defect(&x, &amp.apply_operator(&x)?, &y, &dual_y);
        let scaled = att.apply_operator(&y)? * cr(1.0 / kappa);
        let identity = linalg::max_abs_diff(&dual_y, &scaled) / y.norm();
        Ok([random_pairing, amp_pairing, identity])
    })?;

    let mut report = VerificationReport::new("duality", params.seed, tol)
        .param("kappa", kappa)
        .param("dim_in", d)
        .param("dim_out", d_out)
        .param("trials", trials);
    let mut worst = [0.0f64; 3];
    for t in &defects {
        for (w, v) in worst.iter_mut().zip(t) {
            *w = w.max(*v);
        }
        report.record(-t.iter().cloned().fold(0.0, f64::max), 0.0);
    }
    report.detail("random_kraus_pairing", worst[0]);
    report.detail("amplifier_pairing", worst[1]);
    report.detail("amplifier_dual_identity", worst[2]);
    Ok(report.finish(Mode::Assert))
}

/// Column-stacking superoperator `sum_k K (x) conj(K)`.
fn superoperator(kraus: &[CMat]) -> CMat {
    kraus.iter().map(|k| linalg::kron(k, &k.map(|z| z.conj()))).fold(
        CMat::zeros(kraus[0].nrows().pow(2), kraus[0].ncols().pow(2)),
        |acc, m| acc + m,
    )
}

fn top_vector(m: &CMat) -> CMat {
    let (_, vecs) = linalg::eigh(m);
    vecs.columns(0, 1).into_owned()
}

fn projector(v: &CMat) -> CMat {
    v * v.adjoint()
}

/// `max_{psi, phi} <phi| Phi(|psi><psi|) |phi>` by alternating top eigenvectors of the map
/// and of the map given as `first`, starting from random vectors of the input of `first`.
fn one_to_inf<R: rand::Rng>(first: &[CMat], second: &[CMat], starts: usize, rng: &mut R) -> f64 {
    let dim = first[0].ncols();
    let mut best = 0.0f64;
    for _ in 0..starts {
        let mut v = ginibre(dim, 1, rng);
        v /= cr(v.norm());
        let mut value = 0.0;
        for _ in 0..200 {
            let image = forward(first, &projector(&v));
            let w = top_vector(&image);
            let next = top_vector(&forward(second, &projector(&w)));
            let new_value = (w.adjoint() * &image * &w)[(0, 0)].re;
            v = next;
            if (new_value - value).abs() < 1e-15 {
                value = new_value;
                break;
            }
            value = new_value;
        }
        best = best.max(value);
    }
    best
}

/// `||Phi||_{p->q} = ||Phi^dagger||_{q'->p'}` at `(2,2)` (largest singular value of the
/// superoperator and of its dual) and at `(1,inf)` (alternating eigenvector search started
/// from the input side of either map). The gap is minus the worst mismatch.
pub(crate) fn verify_duality_norms(params: &VerifyParams, _cfg: &GlobalConfig) -> Result<VerificationReport> {
    let trials = params.trials.unwrap_or(20);
    let tol = params.tolerance.unwrap_or(1e-6);
    let defects = run_trials(trials, |i| {
        let mut rng = trial_rng(params.seed, i as u64);
        let (din, dout) = (2 + i % 3, 2 + (i / 3) % 3);
        let kraus = random_kraus(din, dout, 1 + i % 3, &mut rng);
        let adj: Vec<CMat> = kraus.iter().map(|k| k.adjoint()).collect();
        let two = linalg::singular_values(&superoperator(&kraus))[0];
        let two_dual = linalg::singular_values(&superoperator(&adj))[0];
        let one_inf = one_to_inf(&kraus, &adj, 20, &mut rng);
        let one_inf_dual = one_to_inf(&adj, &kraus, 20, &mut rng);
        Ok(((two - two_dual).abs(), (one_inf - one_inf_dual).abs()))
    })?;
    let mut report = VerificationReport::new("duality-norms", params.seed, tol).param("trials", trials);
    let (mut w22, mut w1i) = (0.0f64, 0.0f64);
    for (a, b) in defects {
        w22 = w22.max(a);
        w1i = w1i.max(b);
        report.record(-a.max(b), 0.0);
    }
    report.detail("two_two_mismatch", w22);
    report.detail("one_inf_mismatch", w1i);
    Ok(report.finish(Mode::Assert))
}
