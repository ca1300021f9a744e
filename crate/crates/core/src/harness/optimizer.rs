//! Derivative-free maximizers: grid plus golden section in one dimension, Nelder–Mead in
//! a few dimensions, and a (1+1) evolution strategy over Ginibre factors for state search.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::linalg::CMat;

use super::sampling::{ginibre, trial_rng};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    /// Energy grid `[grid_lo, grid_hi]`, log-spaced, plus the point `E = 0`.
    pub grid_lo: f64,
    pub grid_hi: f64,
    pub grid_steps: usize,
    pub refine_iters: usize,
    pub restarts: usize,
    /// Evolution-strategy steps after each random restart.
    pub local_steps: usize,
    /// Initial relative step of the evolution strategy.
    pub perturbation: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_lo: 1e-4,
            grid_hi: 1e3,
            grid_steps: 64,
            refine_iters: 80,
            restarts: 200,
            local_steps: 100,
            perturbation: 0.3,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.grid_lo > 0.0
            && self.grid_hi > self.grid_lo
            && self.grid_steps >= 2
            && self.refine_iters >= 1
            && self.restarts >= 1
            && self.perturbation > 0.0;
        if !ok {
            return Err(crate::Error::Domain(format!("invalid optimizer configuration {self:?}")));
        }
        Ok(())
    }
}

/// Golden-section search for a maximum of a unimodal function on `[a, b]`.
pub fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Where a one-parameter family attains its supremum on the searched range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Maximum at a finite interior energy (or at zero).
    Attained,
    /// Largest value at the top of the grid, with the family still increasing.
    Increasing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergySup {
    pub energy: f64,
    pub value: f64,
    pub regime: Regime,
}

/// Supremum of `f(E)` over `E >= 0`: log grid, then golden section between the
/// neighbours of the best grid point.
pub fn sup_over_energy(f: impl Fn(f64) -> f64, cfg: &OptimizerConfig) -> EnergySup {
    let n = cfg.grid_steps;
    let (lo, hi) = (cfg.grid_lo.ln(), cfg.grid_hi.ln());
    let grid: Vec<f64> = (0..n).map(|i| (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp()).collect();
    let mut best = (0.0, f(0.0));
    let mut best_idx = None;
    for (i, &e) in grid.iter().enumerate() {
        let v = f(e);
        if v > best.1 {
            best = (e, v);
            best_idx = Some(i);
        }
    }
    let top = n - 1;
    let regime = if best_idx == Some(top) && f(grid[top]) > f(grid[top - 1]) { Regime::Increasing } else { Regime::Attained };
    if let Some(i) = best_idx {
        if i < top {
            let a = if i == 0 { 0.0 } else { grid[i - 1] };
            let (e, v) = golden_max(&f, a, grid[i + 1], cfg.refine_iters);
            if v > best.1 {
                best = (e, v);
            }
        }
    } else {
        let (e, v) = golden_max(&f, 0.0, grid[0], cfg.refine_iters);
        if v > best.1 {
            best = (e, v);
        }
    }
    EnergySup { energy: best.0, value: best.1, regime }
}

/// Nelder–Mead maximization from `x0` with initial simplex edge `step`.
pub fn nelder_mead_max(f: impl Fn(&[f64]) -> f64, x0: &[f64], step: f64, iters: usize) -> (Vec<f64>, f64) {
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += step;
        let v = f(&x);
        simplex.push((x, v));
    }
    let by_value = |a: &(Vec<f64>, f64), b: &(Vec<f64>, f64)| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal);
    for _ in 0..iters {
        simplex.sort_by(by_value);
        let centroid: Vec<f64> = (0..n).map(|j| simplex[..n].iter().map(|p| p.0[j]).sum::<f64>() / n as f64).collect();
        let worst = simplex[n].clone();
        let towards = |t: f64| -> Vec<f64> { (0..n).map(|j| centroid[j] + t * (worst.0[j] - centroid[j])).collect() };
        let xr = towards(-1.0);
        let fr = f(&xr);
        if fr > simplex[0].1 {
            let xe = towards(-2.0);
            let fe = f(&xe);
            simplex[n] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let xc = towards(0.5);
            let fc = f(&xc);
            if fc > worst.1 {
                simplex[n] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for p in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = (0..n).map(|j| best[j] + 0.5 * (p.0[j] - best[j])).collect();
                    let v = f(&x);
                    *p = (x, v);
                }
            }
        }
    }
    simplex.sort_by(by_value);
    simplex.swap_remove(0)
}

fn taper(mut g: CMat, ratio: f64) -> CMat {
    for n in 0..g.nrows() {
        let s = crate::linalg::cr(ratio.powf(n as f64 / 2.0));
        g.row_mut(n).iter_mut().for_each(|z| *z *= s);
    }
    g
}

/// Best point found from one random restart.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub restart: usize,
    pub value: f64,
    pub factors: Vec<CMat>,
}

/// Maximizes `objective` over tuples of Ginibre factors with the given shapes. Each
/// restart draws a random start from its own stream and runs `cfg.local_steps` steps of a
/// (1+1) evolution strategy with a success-based step size. Odd restarts taper the rows of
/// the start by `x^(n/2)` with a random `x < 0.9`, so `G G^dagger` starts near a state with
/// decaying photon-number weights. Results are in restart order.
pub fn search_factors<F>(shapes: &[(usize, usize)], cfg: &OptimizerConfig, objective: F) -> Vec<SearchResult>
where
    F: Fn(&[CMat]) -> f64 + Sync,
{
    (0..cfg.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = trial_rng(cfg.seed, restart as u64);
            let mut current: Vec<CMat> = shapes
                .iter()
                .map(|&(r, c)| {
                    let g = ginibre(r, c, &mut rng);
                    if restart % 2 == 1 {
                        taper(g, 0.9 * rng.random::<f64>())
                    } else {
                        g
                    }
                })
                .collect();
            let mut value = objective(&current);
            let mut sigma = cfg.perturbation;
            for _ in 0..cfg.local_steps {
                let trial: Vec<CMat> = current
                    .iter()
                    .map(|g| {
                        let scale = sigma * g.norm() / ((g.nrows() * g.ncols()) as f64).sqrt();
                        g + ginibre(g.nrows(), g.ncols(), &mut rng) * crate::linalg::cr(scale)
                    })
                    .collect();
                let v = objective(&trial);
                if v > value {
                    current = trial;
                    value = v;
                    sigma *= 1.5;
                } else {
                    sigma *= 0.9;
                }
            }
            SearchResult { restart, value, factors: current }
        })
        .collect()
}
