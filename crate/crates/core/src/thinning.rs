//! The thinning map on distributions over the natural numbers.

use crate::channels::{kraus_attenuator_ql, Cutoffs};
use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::linalg::{cr, CMat};
use crate::spectra::{g, g_inverse, shannon_entropy, ProbVector};
use crate::special::{ln_binomial, ln_factorials};

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("lambda must lie in [0,1], got {lambda}")));
    }
    Ok(())
}

/// `[T p]_n = sum_{k>=n} C(k,n) lambda^n (1-lambda)^(k-n) p_k` on the support of `p`.
pub fn thin(p: &ProbVector, lambda: f64) -> Result<ProbVector> {
    check_lambda(lambda)?;
    let w = p.weights();
    let len = w.len();
    let table = ln_factorials(len);
    let mut out = vec![0.0; len];
    for (k, &pk) in w.iter().enumerate() {
        if pk == 0.0 {
            continue;
        }
        for (n, slot) in out.iter_mut().enumerate().take(k + 1) {
            let coeff = ln_binomial(&table, k, n).exp() * lambda.powi(n as i32) * (1.0 - lambda).powi((k - n) as i32);
            *slot += coeff * pk;
        }
    }
    Ok(ProbVector::from_raw(out))
}

/// Largest deviation between the Fock diagonal of `E_{lambda,0}(diag p)` and `T_lambda(p)`,
/// with the state on `dim >= len(p)` levels.
pub fn check_thinning_attenuator(p: &ProbVector, lambda: f64, dim: usize, cfg: &GlobalConfig) -> Result<f64> {
    if dim < p.len() {
        return Err(Error::Shape(format!("cutoff {dim} shorter than the distribution ({})", p.len())));
    }
    let channel = kraus_attenuator_ql(lambda, Cutoffs::square(dim), cfg)?;
    let mut x = CMat::zeros(dim, dim);
    for (n, &w) in p.weights().iter().enumerate() {
        x[(n, n)] = cr(w);
    }
    let out = channel.apply_operator(&x)?;
    let thinned = thin(p, lambda)?;
    let mut worst = 0.0f64;
    for n in 0..dim {
        let expected = thinned.weights().get(n).copied().unwrap_or(0.0);
        worst = worst.max((out[(n, n)].re - expected).abs());
    }
    Ok(worst)
}

/// `S(T_lambda p) - g(lambda g^{-1}(S(p)))`, nonnegative for every distribution.
pub fn thinning_entropy_gap(p: &ProbVector, lambda: f64) -> Result<f64> {
    let p = p.normalized();
    let lhs = shannon_entropy(&thin(&p, lambda)?);
    let rhs = g(lambda * g_inverse(shannon_entropy(&p)));
    Ok(lhs - rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_point_mass() {
        let p = ProbVector::from_raw(vec![0.1, 0.2, 0.7]);
        assert_eq!(thin(&p, 1.0).unwrap(), p);
        let out = thin(&ProbVector::point_mass(1, 2).unwrap(), 0.3).unwrap();
        assert!((out.weights()[0] - 0.7).abs() < 1e-15);
        assert!((out.weights()[1] - 0.3).abs() < 1e-15);
        assert!(thin(&p, 1.1).is_err());
    }

    #[test]
    fn geometric_maps_to_geometric() {
        let len = 200;
        let out = thin(&ProbVector::geometric(1.5, len).unwrap(), 0.4).unwrap();
        let want = ProbVector::geometric(0.6, len).unwrap();
        for (a, b) in out.weights().iter().zip(want.weights()).take(60) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn attenuator_diagonal_is_thinning() {
        let cfg = GlobalConfig::default();
        let p = ProbVector::geometric(1.0, 40).unwrap().normalized();
        assert!(check_thinning_attenuator(&p, 0.5, 40, &cfg).unwrap() <= 1e-10);
        assert_eq!(check_thinning_attenuator(&p, 1.0, 40, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn entropy_gap_cases() {
        let geo = ProbVector::geometric(0.8, 300).unwrap();
        assert!(thinning_entropy_gap(&geo, 0.5).unwrap().abs() < 1e-8);
        let delta = ProbVector::point_mass(4, 6).unwrap();
        assert!(thinning_entropy_gap(&delta, 0.5).unwrap() >= 0.0);
    }
}
