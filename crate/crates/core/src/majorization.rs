//! Majorization preorder through descending partial sums.

use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::fock::DensityMatrix;
use crate::spectra::{spectrum, ProbVector, Weights};

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorizationVerdict {
    pub holds: bool,
    /// Smallest value of `sum_{i<=k} a_i - sum_{i<=k} b_i` over `k` (both sorted descending).
    pub worst_partial_sum_gap: f64,
    /// The `k` (zero-based) attaining the smallest gap.
    pub index_of_worst: usize,
}

/// `a ≻ b` by the partial-sum criterion; the shorter vector is padded with zeros.
pub fn majorizes<W: Weights + ?Sized>(a: &W, b: &W, tol: f64) -> Result<MajorizationVerdict> {
    majorizes_weights(a.weights(), b.weights(), tol)
}

pub fn majorizes_weights(a: &[f64], b: &[f64], tol: f64) -> Result<MajorizationVerdict> {
    let (sa, sb): (f64, f64) = (a.iter().sum(), b.iter().sum());
    if (sa - sb).abs() > tol {
        return Err(Error::Domain(format!("total masses differ: {sa} vs {sb}")));
    }
    let sorted = |v: &[f64]| {
        let mut v = v.to_vec();
        v.sort_by(|x, y| y.total_cmp(x));
        v
    };
    let (a, b) = (sorted(a), sorted(b));
    let n = a.len().max(b.len());
    let (mut pa, mut pb) = (0.0, 0.0);
    let mut worst = f64::INFINITY;
    let mut index = 0;
    for k in 0..n {
        pa += a.get(k).copied().unwrap_or(0.0);
        pb += b.get(k).copied().unwrap_or(0.0);
        if pa - pb < worst {
            worst = pa - pb;
            index = k;
        }
    }
    if n == 0 {
        worst = 0.0;
    }
    Ok(MajorizationVerdict { holds: worst >= -tol, worst_partial_sum_gap: worst, index_of_worst: index })
}

/// Fock-diagonal state carrying the eigenvalues of `rho` in descending order on ascending photon number.
pub fn passive_rearrangement(rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<DensityMatrix> {
    rho.space().single_dim()?;
    let sp = spectrum(rho, cfg)?;
    DensityMatrix::from_diagonal(rho.space().clone(), sp.values(), cfg)
}

/// Weights sorted in descending order (stable, so ties keep their original order).
pub fn decreasing_rearrangement(p: &ProbVector) -> ProbVector {
    let mut w = p.weights().to_vec();
    w.sort_by(|x, y| y.total_cmp(x));
    ProbVector::from_raw(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{fock_state, number_operator, thermal_state, FockSpace};
    use crate::spectra::{shannon_entropy, Spectrum};

    #[test]
    fn hand_example() {
        let v = majorizes_weights(&[0.5, 0.3, 0.2], &[0.4, 0.35, 0.25], DEFAULT_TOL).unwrap();
        assert!(v.holds);
        assert!((v.worst_partial_sum_gap - 0.0).abs() < 1e-15);
        let r = majorizes_weights(&[0.4, 0.35, 0.25], &[0.5, 0.3, 0.2], DEFAULT_TOL).unwrap();
        assert!(!r.holds);
        assert!((r.worst_partial_sum_gap + 0.1).abs() < 1e-15);
        assert_eq!(r.index_of_worst, 0);
    }

    #[test]
    fn pure_and_uniform_extremes() {
        let pure = Spectrum::from_values(vec![1.0, 0.0, 0.0, 0.0]);
        let uniform = Spectrum::from_values(vec![0.25; 4]);
        let other = Spectrum::from_values(vec![0.7, 0.1, 0.1, 0.1]);
        assert!(majorizes(&pure, &other, DEFAULT_TOL).unwrap().holds);
        assert!(majorizes(&other, &uniform, DEFAULT_TOL).unwrap().holds);
        // padding with zeros
        assert!(majorizes_weights(&[1.0], &[0.5, 0.5], DEFAULT_TOL).unwrap().holds);
        assert!(majorizes_weights(&[1.0], &[0.5, 0.4], DEFAULT_TOL).is_err());
    }

    #[test]
    fn passive_rearrangements() {
        let s = FockSpace::single(7).unwrap();
        let cfg = GlobalConfig::default();
        let out = passive_rearrangement(&fock_state(5, &s).unwrap(), &cfg).unwrap();
        assert_eq!(out.diagonal()[0], 1.0);
        let th = thermal_state(0.0, &s, &cfg).unwrap().value;
        assert_eq!(passive_rearrangement(&th, &cfg).unwrap(), th);
        let p = ProbVector::from_raw(vec![0.2, 0.5, 0.3]);
        let q = decreasing_rearrangement(&p);
        assert_eq!(q.weights(), &[0.5, 0.3, 0.2]);
        assert!((shannon_entropy(&p) - shannon_entropy(&q)).abs() < 1e-15);
        let rho = DensityMatrix::from_diagonal(FockSpace::single(3).unwrap(), &[0.2, 0.5, 0.3], &cfg).unwrap();
        let down = passive_rearrangement(&rho, &cfg).unwrap();
        let n = number_operator(rho.space());
        assert!(crate::fock::expectation(&n, &down, &cfg).unwrap() <= crate::fock::expectation(&n, &rho, &cfg).unwrap());
    }
}
