//! Closed-form Kraus operators of the quantum-limited attenuator and amplifier
//! and of their complementary channels.
//!
//! With the environment in the vacuum, the beam splitter sends
//! `|n,0> -> sum_l c(n,l) |n-l, l>` and the squeezer sends
//! `|n,0> -> sum_l d(n,l) |n+l, l>`, where
//!
//! ```text
//! c(n,l) = (-1)^l sqrt(C(n,l)) lambda^((n-l)/2) (1-lambda)^(l/2)
//! d(n,l) = sqrt(C(n+l,l)) kappa^(-(n+1)/2) ((kappa-1)/kappa)^(l/2)
//! ```
//!
//! Projecting the environment onto `|l>` gives the channel Kraus operators,
//! projecting the system instead gives the complementary ones.

use crate::linalg::{cr, CMat};
use crate::special::{ln_binomial, ln_factorials};

fn attenuator_amplitude(table: &[f64], lambda: f64, n: usize, l: usize) -> f64 {
    let magnitude = (0.5 * ln_binomial(table, n, l)).exp() * lambda.sqrt().powi((n - l) as i32) * (1.0 - lambda).sqrt().powi(l as i32);
    if l % 2 == 1 {
        -magnitude
    } else {
        magnitude
    }
}

fn amplifier_amplitude(table: &[f64], kappa: f64, n: usize, l: usize) -> f64 {
    let ratio = (kappa - 1.0) / kappa;
    if l > 0 && ratio <= 0.0 {
        return 0.0;
    }
    let log = 0.5 * ln_binomial(table, n + l, l) - 0.5 * (n as f64 + 1.0) * kappa.ln()
        + if l > 0 { 0.5 * l as f64 * ratio.ln() } else { 0.0 };
    log.exp()
}

pub(crate) fn attenuator_ql(lambda: f64, dim_in: usize, dim_out: usize) -> Vec<CMat> {
    let table = ln_factorials(dim_in);
    (0..dim_in)
        .map(|l| {
            let mut k = CMat::zeros(dim_out, dim_in);
            for n in l..dim_in {
                if n - l < dim_out {
                    k[(n - l, n)] = cr(attenuator_amplitude(&table, lambda, n, l));
                }
            }
            k
        })
        .collect()
}

pub(crate) fn attenuator_ql_complementary(lambda: f64, dim_in: usize, dim_env: usize) -> Vec<CMat> {
    let table = ln_factorials(dim_in);
    (0..dim_in)
        .map(|k| {
            let mut m = CMat::zeros(dim_env, dim_in);
            for n in k..dim_in {
                let l = n - k;
                if l < dim_env {
                    m[(l, n)] = cr(attenuator_amplitude(&table, lambda, n, l));
                }
            }
            m
        })
        .collect()
}

pub(crate) fn amplifier_ql(kappa: f64, dim_in: usize, dim_out: usize) -> Vec<CMat> {
    let table = ln_factorials(dim_in + dim_out);
    (0..dim_out)
        .map(|l| {
            let mut k = CMat::zeros(dim_out, dim_in);
            for n in 0..dim_in {
                if n + l < dim_out {
                    k[(n + l, n)] = cr(amplifier_amplitude(&table, kappa, n, l));
                }
            }
            k
        })
        .collect()
}

/// Kraus operators `<m|_A U |.,0>` for system outputs `m < dim_in + dim_env - 1`.
pub(crate) fn amplifier_ql_complementary(kappa: f64, dim_in: usize, dim_env: usize) -> Vec<CMat> {
    let table = ln_factorials(dim_in + dim_env);
    (0..dim_in + dim_env - 1)
        .map(|m| {
            let mut k = CMat::zeros(dim_env, dim_in);
            for n in 0..dim_in.min(m + 1) {
                let l = m - n;
                if l < dim_env {
                    k[(l, n)] = cr(amplifier_amplitude(&table, kappa, n, l));
                }
            }
            k
        })
        .collect()
}

/// Parameters `(tau, kappa')` with `E_{lambda,E} = A_{kappa',0} o E_{tau,0}`.
pub fn attenuator_decomposition(lambda: f64, energy: f64) -> (f64, f64) {
    let kappa = 1.0 + (1.0 - lambda) * energy;
    (lambda / kappa, kappa)
}

/// Parameters `(tau, kappa')` with `A_{kappa,E} = A_{kappa',0} o E_{tau,0}`.
pub fn amplifier_decomposition(kappa: f64, energy: f64) -> (f64, f64) {
    let outer = 1.0 + (kappa - 1.0) * (energy + 1.0);
    (kappa / outer, outer)
}
