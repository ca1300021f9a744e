//! Spectra, Schatten norms, entropies and the information quantities built from them.

use serde::{Deserialize, Serialize};

use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, LinearOperator};
use crate::linalg;

/// Eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum {
    values: Vec<f64>,
}

/// Weights of a distribution on `{0, .., L-1}`; the missing mass `1 - sum` is the tail deficit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ProbVector {
    weights: Vec<f64>,
}

/// Anything that can be compared under majorization.
pub trait Weights {
    fn weights(&self) -> &[f64];
}

impl Weights for Spectrum {
    fn weights(&self) -> &[f64] {
        &self.values
    }
}

impl Weights for ProbVector {
    fn weights(&self) -> &[f64] {
        &self.weights
    }
}

fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}

fn power_sum(values: &[f64], p: f64) -> f64 {
    values.iter().filter(|&&v| v > 0.0).map(|v| v.powf(p)).sum()
}

impl Spectrum {
    /// Sorts the values in descending order.
    pub fn from_values(mut values: Vec<f64>) -> Self {
        values.sort_by(|a, b| b.total_cmp(a));
        Self { values }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        0.0 - self.values.iter().map(|&v| xlogx(v)).sum::<f64>()
    }

    /// `(sum v^p)^(1/p)`; `p = inf` gives the largest value.
    pub fn norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.values.first().copied().unwrap_or(0.0).max(0.0);
        }
        power_sum(&self.values, p).powf(1.0 / p)
    }

    /// `p/(1-p) ln ||.||_p`, with the von Neumann limit at `p = 1` and the min-entropy at `p = inf`.
    pub fn renyi(&self, p: f64) -> f64 {
        if p == 1.0 {
            return self.entropy();
        }
        if p.is_infinite() {
            return -self.norm(p).ln();
        }
        power_sum(&self.values, p).ln() / (1.0 - p)
    }
}

impl ProbVector {
    pub fn new(weights: Vec<f64>, cfg: &GlobalConfig) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidState(format!("negative or non-finite weight {w}")));
        }
        let sum: f64 = weights.iter().sum();
        if sum > 1.0 + cfg.tol_trace {
            return Err(Error::InvalidState(format!("weights sum to {sum} > 1")));
        }
        Ok(Self { weights })
    }

    pub(crate) fn from_raw(weights: Vec<f64>) -> Self {
        Self { weights }
    }

    /// Geometric weights `(1/(E+1)) (E/(E+1))^n`, `n < len`.
    pub fn geometric(energy: f64, len: usize) -> Result<Self> {
        if !(energy >= 0.0) {
            return Err(Error::Domain(format!("energy must be >= 0, got {energy}")));
        }
        Ok(Self { weights: crate::fock::thermal_weights(energy, len) })
    }

    pub fn point_mass(n: usize, len: usize) -> Result<Self> {
        if n >= len {
            return Err(Error::OutOfRange { index: n, dim: len });
        }
        let mut weights = vec![0.0; len];
        weights[n] = 1.0;
        Ok(Self { weights })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::Domain("uniform distribution needs a nonempty support".into()));
        }
        Ok(Self { weights: vec![1.0 / len as f64; len] })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn deficit(&self) -> f64 {
        1.0 - self.mass()
    }

    pub fn mean(&self) -> f64 {
        self.weights.iter().enumerate().map(|(n, w)| n as f64 * w).sum()
    }

    /// Rescaled to unit mass.
    pub fn normalized(&self) -> Self {
        let m = self.mass();
        Self { weights: self.weights.iter().map(|w| w / m).collect() }
    }
}

/// Descending eigenvalues of a state; eigenvalues in `[-tol_psd, 0)` are clamped to zero
/// and the result renormalized, larger negative values are rejected.
pub fn spectrum(rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<Spectrum> {
    let raw = if rho.max_off_diagonal() == 0.0 { rho.diagonal() } else { linalg::eigvalsh(rho.matrix()) };
    spectrum_from_eigenvalues(raw, cfg)
}

pub(crate) fn spectrum_from_eigenvalues(raw: Vec<f64>, cfg: &GlobalConfig) -> Result<Spectrum> {
    if raw.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("eigensolver produced non-finite eigenvalues".into()));
    }
    let mut values = raw;
    for v in values.iter_mut() {
        if *v < 0.0 {
            if *v < -cfg.tol_psd {
                return Err(Error::InvalidState(format!("eigenvalue {v:.3e} below -tol_psd")));
            }
            *v = 0.0;
        }
    }
    let sum: f64 = values.iter().sum();
    if !(sum > 0.0) {
        return Err(Error::InvalidState("state has zero trace".into()));
    }
    Ok(Spectrum::from_values(values.into_iter().map(|v| v / sum).collect()))
}

/// Schatten `p`-norm from singular values; `p = f64::INFINITY` is the operator norm.
pub fn schatten_norm(x: &LinearOperator, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("Schatten exponent must be >= 1, got {p}")));
    }
    if !x.is_square() {
        return Err(Error::Shape("Schatten norm needs a square operator".into()));
    }
    let sv = linalg::singular_values(x.matrix());
    Ok(Spectrum::from_values(sv).norm(p))
}

/// Schatten norm of a positive semidefinite matrix via its eigenvalues.
pub(crate) fn psd_norm(m: &linalg::CMat, p: f64) -> f64 {
    let vals: Vec<f64> = linalg::eigvalsh(m).into_iter().map(|v| v.max(0.0)).collect();
    Spectrum::from_values(vals).norm(p)
}

pub fn von_neumann_entropy(rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<f64> {
    Ok(spectrum(rho, cfg)?.entropy())
}

/// `S_p = p/(1-p) ln ||rho||_p` for `p > 1` (including `p = inf`).
pub fn renyi_entropy(rho: &DensityMatrix, p: f64, cfg: &GlobalConfig) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("Renyi entropy needs p > 1, got {p}")));
    }
    Ok(spectrum(rho, cfg)?.renyi(p))
}

/// Entropy of the thermal state with mean photon number `energy`:
/// `(E+1) ln(E+1) - E ln E`. Returns NaN for negative input.
pub fn g(energy: f64) -> f64 {
    if energy < 0.0 || energy.is_nan() {
        return f64::NAN;
    }
    if energy == 0.0 {
        return 0.0;
    }
    // ln(1+1/E) form keeps precision for large E
    (energy + 1.0) * energy.ln_1p() - energy * energy.ln()
}

/// Derivative `ln((E+1)/E)` of [`g`].
pub fn g_prime(energy: f64) -> f64 {
    (1.0 / energy).ln_1p()
}

pub fn g_func(energy: f64) -> Result<f64> {
    if !(energy >= 0.0) {
        return Err(Error::Domain(format!("g needs E >= 0, got {energy}")));
    }
    Ok(g(energy))
}

/// Inverse of [`g`] by bisection on `[0, e^s]`.
pub fn g_inv(entropy: f64) -> Result<f64> {
    if !(entropy >= 0.0) || !entropy.is_finite() {
        return Err(Error::Domain(format!("g_inv needs s >= 0, got {entropy}")));
    }
    Ok(g_inverse(entropy))
}

pub(crate) fn g_inverse(entropy: f64) -> f64 {
    if entropy <= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, entropy.exp());
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if g(mid) < entropy {
            lo = mid;
        } else {
            hi = mid;
        }
        if mid == lo && mid == hi {
            break;
        }
    }
    0.5 * (lo + hi)
}

pub fn shannon_entropy(p: &ProbVector) -> f64 {
    0.0 - p.weights.iter().map(|&w| xlogx(w)).sum::<f64>()
}

pub fn lp_norm(p: &ProbVector, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return Err(Error::Domain(format!("l^r norm needs r >= 1, got {r}")));
    }
    if r.is_infinite() {
        return Ok(p.weights.iter().copied().fold(0.0, f64::max));
    }
    Ok(power_sum(&p.weights, r).powf(1.0 / r))
}

fn check_groups(rho: &DensityMatrix, groups: &[&[usize]]) -> Result<()> {
    let m = rho.space().n_modes();
    let mut seen = vec![false; m];
    for group in groups {
        for &k in *group {
            if k >= m {
                return Err(Error::Domain(format!("mode {k} out of range for {m} modes")));
            }
            if seen[k] {
                return Err(Error::Domain(format!("mode {k} appears in more than one subsystem")));
            }
            seen[k] = true;
        }
    }
    Ok(())
}

fn joint(groups: &[&[usize]]) -> Vec<usize> {
    groups.iter().flat_map(|g| g.iter().copied()).collect()
}

fn reduced_entropy(rho: &DensityMatrix, modes: &[usize], cfg: &GlobalConfig) -> Result<f64> {
    if modes.is_empty() {
        return Ok(0.0);
    }
    von_neumann_entropy(&rho.partial_trace(modes)?, cfg)
}

/// `S(AM) - S(M)`; modes outside `a` and `m` are traced out.
pub fn conditional_entropy(rho: &DensityMatrix, a: &[usize], m: &[usize], cfg: &GlobalConfig) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Domain("conditional entropy needs a nonempty system".into()));
    }
    check_groups(rho, &[a, m])?;
    Ok(reduced_entropy(rho, &joint(&[a, m]), cfg)? - reduced_entropy(rho, m, cfg)?)
}

/// `S(A) + S(B) - S(AB)`.
pub fn mutual_information(rho: &DensityMatrix, a: &[usize], b: &[usize], cfg: &GlobalConfig) -> Result<f64> {
    cond_mutual_information(rho, a, b, &[], cfg)
}

/// `S(A|M) + S(B|M) - S(AB|M)`.
pub fn cond_mutual_information(
    rho: &DensityMatrix,
    a: &[usize],
    b: &[usize],
    m: &[usize],
    cfg: &GlobalConfig,
) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("mutual information needs two nonempty subsystems".into()));
    }
    check_groups(rho, &[a, b, m])?;
    let s_am = reduced_entropy(rho, &joint(&[a, m]), cfg)?;
    let s_bm = reduced_entropy(rho, &joint(&[b, m]), cfg)?;
    let s_abm = reduced_entropy(rho, &joint(&[a, b, m]), cfg)?;
    let s_m = reduced_entropy(rho, m, cfg)?;
    Ok(s_am + s_bm - s_abm - s_m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_state, thermal_state, FockSpace, Tensor};
    use crate::linalg::{c, cr, CMat};

    fn cfg() -> GlobalConfig {
        GlobalConfig::default()
    }

    #[test]
    fn pure_state_spectrum() {
        let s = FockSpace::single(4).unwrap();
        let sp = spectrum(&fock_state(2, &s).unwrap(), &cfg()).unwrap();
        assert_eq!(sp.values(), &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(sp.entropy(), 0.0);
    }

    #[test]
    fn thermal_spectrum_before_renormalization() {
        let w = crate::fock::thermal_weights(1.0, 8);
        assert_eq!(w[0], 0.5);
        assert_eq!(w[1], 0.25);
        assert_eq!(w[7], 0.5f64.powi(8));
    }

    #[test]
    fn planted_eigenvalues_recovered() {
        // unitary from a real rotation mixed with phases
        let n = 4;
        let planted = [0.4, 0.3, 0.2, 0.1];
        let theta = 0.37f64;
        let mut u = crate::linalg::identity(n);
        for k in 0..n - 1 {
            let mut r = crate::linalg::identity(n);
            r[(k, k)] = cr(theta.cos());
            r[(k + 1, k + 1)] = cr(theta.cos());
            r[(k, k + 1)] = c(0.0, theta.sin());
            r[(k + 1, k)] = c(0.0, theta.sin());
            u = r * u;
        }
        let d = CMat::from_diagonal(&nalgebra::DVector::from_iterator(n, planted.iter().map(|&x| cr(x))));
        let m = &u * d * u.adjoint();
        let rho = DensityMatrix::new(FockSpace::single(n).unwrap(), m, &cfg()).unwrap();
        let sp = spectrum(&rho, &cfg()).unwrap();
        for (a, b) in sp.values().iter().zip(planted) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn schatten_basics() {
        let s = FockSpace::single(4).unwrap();
        let id = LinearOperator::identity(&s);
        assert!((schatten_norm(&id, 2.0).unwrap() - 2.0).abs() < 1e-14);
        assert!((schatten_norm(&id, f64::INFINITY).unwrap() - 1.0).abs() < 1e-14);
        assert!(schatten_norm(&id, 0.5).is_err());
        let rho = thermal_state(0.5, &FockSpace::single(40).unwrap(), &cfg()).unwrap().value;
        let as_op = LinearOperator::square(rho.space().clone(), rho.matrix().clone()).unwrap();
        assert!((schatten_norm(&as_op, 1.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn thermal_norm_closed_form() {
        // ||w(E)||_p = (E+1)^-1 (1 - x^p)^(-1/p), x = E/(E+1)
        for &energy in &[0.3, 1.0, 2.0] {
            for &p in &[1.5, 2.0, 3.0] {
                let len = 400;
                let sp = Spectrum::from_values(crate::fock::thermal_weights(energy, len));
                let x: f64 = energy / (energy + 1.0);
                let closed = (1.0 - x.powf(p)).powf(-1.0 / p) / (energy + 1.0);
                assert!((sp.norm(p) - closed).abs() < 1e-10, "E={energy} p={p}");
            }
        }
    }

    #[test]
    fn g_values() {
        assert_eq!(g(0.0), 0.0);
        assert!((g(1.0) - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!(g_func(-1.0).is_err());
        assert!(g_inv(-0.1).is_err());
        for &e in &[0.1, 1.0, 5.0] {
            assert!((g_inv(g(e)).unwrap() - e).abs() < 1e-10);
        }
        assert_eq!(g_inv(0.0).unwrap(), 0.0);
    }

    #[test]
    fn g_inverse_on_wide_range() {
        for k in 0..=500 {
            let e = k as f64 * 0.1;
            assert!((g_inverse(g(e)) - e).abs() < 1e-10 * e.max(1.0), "E={e}");
        }
    }

    #[test]
    fn thermal_entropy_is_g() {
        for &e in &[0.0, 0.5, 1.0, 2.0] {
            let d = crate::fock::thermal_required_dim(e, 1e-14) + 2;
            let rho = thermal_state(e, &FockSpace::single(d).unwrap(), &cfg()).unwrap().value;
            assert!((von_neumann_entropy(&rho, &cfg()).unwrap() - g(e)).abs() < 1e-8);
        }
    }

    #[test]
    fn renyi_domain_and_limit() {
        let rho = thermal_state(0.7, &FockSpace::single(60).unwrap(), &cfg()).unwrap().value;
        assert!(renyi_entropy(&rho, 1.0, &cfg()).is_err());
        let s = von_neumann_entropy(&rho, &cfg()).unwrap();
        assert!((renyi_entropy(&rho, 1.001, &cfg()).unwrap() - s).abs() < 1e-2);
        assert!(renyi_entropy(&rho, 2.0, &cfg()).unwrap() <= s);
    }

    #[test]
    fn discrete_functionals() {
        let delta = ProbVector::point_mass(3, 5).unwrap();
        assert_eq!(shannon_entropy(&delta), 0.0);
        assert_eq!(lp_norm(&delta, 2.5).unwrap(), 1.0);
        let u = ProbVector::uniform(4).unwrap();
        assert!((shannon_entropy(&u) - 4f64.ln()).abs() < 1e-15);
        let geo = ProbVector::geometric(1.5, 200).unwrap();
        assert!(geo.deficit() < 1e-30);
        assert!((shannon_entropy(&geo) - g(1.5)).abs() < 1e-12);
        assert!(ProbVector::new(vec![0.6, 0.6], &cfg()).is_err());
        assert!(ProbVector::new(vec![-0.1, 0.6], &cfg()).is_err());
    }

    #[test]
    fn conditional_entropy_product_and_pure() {
        let s = FockSpace::single(3).unwrap();
        let ra = DensityMatrix::from_diagonal(s.clone(), &[0.5, 0.3, 0.2], &cfg()).unwrap();
        let rm = DensityMatrix::from_diagonal(s.clone(), &[0.9, 0.1, 0.0], &cfg()).unwrap();
        let joint = ra.tensor(&rm);
        let h = conditional_entropy(&joint, &[0], &[1], &cfg()).unwrap();
        assert!((h - von_neumann_entropy(&ra, &cfg()).unwrap()).abs() < 1e-12);
        // Schmidt state sum_n sqrt(c_n) |n>|n>
        let coeffs = [0.6f64, 0.3, 0.1];
        let two = FockSpace::new(vec![3, 3]).unwrap();
        let mut psi = vec![cr(0.0); 9];
        for (n, w) in coeffs.iter().enumerate() {
            psi[n * 3 + n] = cr(w.sqrt());
        }
        let pure = DensityMatrix::pure(two, &psi).unwrap();
        let s_m = -coeffs.iter().map(|w| w * w.ln()).sum::<f64>();
        assert!((conditional_entropy(&pure, &[0], &[1], &cfg()).unwrap() + s_m).abs() < 1e-10);
        assert!(conditional_entropy(&pure, &[0], &[0], &cfg()).is_err());
        assert!(conditional_entropy(&pure, &[0], &[4], &cfg()).is_err());
    }

    #[test]
    fn classical_quantum_conditional_entropy_is_average() {
        // rho = sum_x p_x |x><x| (memory) tensor rho_x
        let s = FockSpace::single(2).unwrap();
        let cfgv = cfg();
        let px = [0.3, 0.7];
        let states = [
            DensityMatrix::from_diagonal(s.clone(), &[0.8, 0.2], &cfgv).unwrap(),
            DensityMatrix::from_diagonal(s.clone(), &[0.5, 0.5], &cfgv).unwrap(),
        ];
        let mut m = CMat::zeros(4, 4);
        for x in 0..2 {
            let proj = fock_state(x, &s).unwrap();
            let term = states[x].tensor(&proj);
            m += term.matrix().scale(px[x]);
        }
        let rho = DensityMatrix::new(FockSpace::new(vec![2, 2]).unwrap(), m, &cfgv).unwrap();
        let avg: f64 = (0..2).map(|x| px[x] * von_neumann_entropy(&states[x], &cfgv).unwrap()).sum();
        assert!((conditional_entropy(&rho, &[0], &[1], &cfgv).unwrap() - avg).abs() < 1e-10);
    }

    #[test]
    fn mutual_information_of_product_is_zero() {
        let s = FockSpace::single(3).unwrap();
        let ra = DensityMatrix::from_diagonal(s.clone(), &[0.5, 0.3, 0.2], &cfg()).unwrap();
        let joint = ra.tensor(&ra).tensor(&ra);
        assert!(mutual_information(&joint, &[0], &[1], &cfg()).unwrap().abs() < 1e-12);
        assert!(cond_mutual_information(&joint, &[0], &[1], &[2], &cfg()).unwrap().abs() < 1e-12);
    }
}
