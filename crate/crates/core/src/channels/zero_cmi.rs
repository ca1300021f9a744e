//! States of `A B M` with vanishing conditional mutual information `I(A:B|M)`.

use num_complex::Complex64;

use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockSpace, Tensor};
use crate::linalg::CMat;

/// One direct-sum block `p_n rho_{A M_A} (x) rho_{B M_B}`. A single-mode state stands for
/// a block with a one-dimensional memory factor.
#[derive(Debug, Clone)]
pub struct ZeroCmiBlock {
    pub weight: f64,
    pub rho_a: DensityMatrix,
    pub rho_b: DensityMatrix,
}

fn split(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.space().mode_dims() {
        [d] => Ok((*d, 1)),
        [d, m] => Ok((*d, *m)),
        dims => Err(Error::Domain(format!("block states must have one or two modes, got {dims:?}"))),
    }
}

/// `sum_n p_n rho_{A M_A}^n (x) rho_{B M_B}^n` with the memory `M = (+)_n M_A^n (x) M_B^n`
/// placed block-diagonally in one register. Output modes are `(A, B, M)`.
pub fn zero_cmi_state(blocks: &[ZeroCmiBlock], cfg: &GlobalConfig) -> Result<DensityMatrix> {
    if blocks.is_empty() {
        return Err(Error::Domain("at least one block is required".into()));
    }
    let total: f64 = blocks.iter().map(|b| b.weight).sum();
    if blocks.iter().any(|b| !(b.weight >= 0.0)) || (total - 1.0).abs() > cfg.tol_trace {
        return Err(Error::Domain(format!("block weights must be a probability vector (sum {total})")));
    }
    let (da, _) = split(&blocks[0].rho_a)?;
    let (db, _) = split(&blocks[0].rho_b)?;
    let mut mems = Vec::with_capacity(blocks.len());
    for b in blocks {
        let (a, ma) = split(&b.rho_a)?;
        let (bb, mb) = split(&b.rho_b)?;
        if a != da || bb != db {
            return Err(Error::Domain(format!("system cutoffs differ between blocks: ({a},{bb}) vs ({da},{db})")));
        }
        mems.push((ma, mb));
    }
    let m_total: usize = mems.iter().map(|(a, b)| a * b).sum();
    let n = da * db * m_total;
    let mut out = CMat::zeros(n, n);
    let mut offset = 0;
    for (block, &(ma, mb)) in blocks.iter().zip(&mems) {
        // (A, M_A, B, M_B) -> (A, B, M_A, M_B)
        let product = block.rho_a.tensor(&block.rho_b);
        let (ka, kb) = (block.rho_a.space().n_modes(), block.rho_b.space().n_modes());
        let mut perm = vec![0, ka];
        if ka == 2 {
            perm.push(1);
        }
        if kb == 2 {
            perm.push(ka + 1);
        }
        let product = product.permute_modes(&perm)?;
        let mblock = ma * mb;
        let index = |flat: usize| {
            let (ab, m) = (flat / mblock, flat % mblock);
            ab * m_total + offset + m
        };
        let src = product.matrix();
        for i in 0..src.nrows() {
            for j in 0..src.ncols() {
                let v = src[(i, j)];
                if v != Complex64::ZERO {
                    out[(index(i), index(j))] += v * block.weight;
                }
            }
        }
        offset += mblock;
    }
    DensityMatrix::new(FockSpace::new(vec![da, db, m_total])?, out, cfg)
}
