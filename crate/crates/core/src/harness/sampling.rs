//! Random states, distributions and channels for sweeps.
//!
//! Every trial draws from its own ChaCha stream, selected by the trial index, so results
//! do not depend on how trials are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::config::GlobalConfig;
use crate::error::Result;
use crate::fock::{DensityMatrix, FockSpace};
use crate::linalg::{self, c, CMat};
use crate::spectra::ProbVector;

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

/// `G G^dagger / Tr` for a Ginibre matrix with `rank` columns (full rank when `None`).
pub fn random_state<R: Rng + ?Sized>(space: &FockSpace, rank: Option<usize>, rng: &mut R) -> DensityMatrix {
    let d = space.total_dim();
    let g = ginibre(d, rank.unwrap_or(d).clamp(1, d), rng);
    state_from_factor(space, &g)
}

pub fn random_pure<R: Rng + ?Sized>(space: &FockSpace, rng: &mut R) -> DensityMatrix {
    random_state(space, Some(1), rng)
}

/// `G G^dagger` normalized; `G` may be any matrix with `space.total_dim()` rows.
pub fn state_from_factor(space: &FockSpace, g: &CMat) -> DensityMatrix {
    let m = g * g.adjoint();
    let tr = linalg::trace(&m).re;
    let m = linalg::hermitian_part(&m.unscale(tr));
    DensityMatrix::from_raw(space.clone(), m)
}

/// Symmetric Dirichlet(1) weights.
pub fn random_distribution<R: Rng + ?Sized>(len: usize, rng: &mut R) -> ProbVector {
    let raw: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let sum: f64 = raw.iter().sum();
    ProbVector::from_raw(raw.into_iter().map(|w| w / sum).collect())
}

pub fn random_fock_diagonal<R: Rng + ?Sized>(dim: usize, rng: &mut R, cfg: &GlobalConfig) -> Result<DensityMatrix> {
    let p = random_distribution(dim, rng);
    DensityMatrix::from_diagonal(FockSpace::single(dim)?, p.weights(), cfg)
}

/// Kraus operators of a random channel: a Haar-like isometry `din -> dout * n_kraus`
/// cut into blocks.
pub fn random_kraus<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, n_kraus: usize, rng: &mut R) -> Vec<CMat> {
    let g = ginibre(dim_out * n_kraus, dim_in, rng);
    let gram = g.adjoint() * &g;
    let v = &g * linalg::hermitian_fn(&gram, |x| 1.0 / x.sqrt());
    (0..n_kraus).map(|k| v.rows(k * dim_out, dim_out).into_owned()).collect()
}
