//! Two-mode beam-splitter and squeezer unitaries and the dilation oracle built on them.
//!
//! The beam splitter conserves `n_a + n_b` and the squeezer conserves `n_a - n_b`, so
//! both are exponentiated one conserved sector at a time.

use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockSpace, LinearOperator, Truncated};
use crate::linalg::{self, cr, CMat};
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Mixer {
    BeamSplitter { theta: f64 },
    Squeezer { theta: f64 },
}

impl Mixer {
    fn from_param(param: f64) -> Result<Self> {
        if !(param >= 0.0) || !param.is_finite() {
            return Err(Error::Domain(format!("mixing parameter must be >= 0, got {param}")));
        }
        Ok(if param <= 1.0 {
            Mixer::BeamSplitter { theta: param.sqrt().acos() }
        } else {
            Mixer::Squeezer { theta: param.sqrt().acosh() }
        })
    }
}

/// Flat indices of each conserved sector and the exponentiated block on it.
struct Sectors {
    dims: (usize, usize),
    blocks: Vec<(Vec<usize>, CMat)>,
    /// flat index -> (block, position inside the block)
    index: Vec<(usize, usize)>,
}

fn sector_members(mixer: Mixer, la: usize, lb: usize) -> Vec<Vec<(usize, usize)>> {
    match mixer {
        Mixer::BeamSplitter { .. } => (0..la + lb - 1)
            .map(|n| (0..la).filter(|&a| a <= n && n - a < lb).map(|a| (a, n - a)).collect())
            .collect(),
        Mixer::Squeezer { .. } => {
            let (la, lb) = (la as i64, lb as i64);
            (-(lb - 1)..la)
                .map(|s| (0..lb).filter(|&b| b + s >= 0 && b + s < la).map(|b| ((b + s) as usize, b as usize)).collect())
                .collect()
        }
    }
}

/// Exponentiates the sectors that meet the columns `a < used.0, b < used.1`; entries of
/// the other sectors read as zero.
fn sectors(mixer: Mixer, la: usize, lb: usize, used: (usize, usize)) -> Result<Sectors> {
    let mut blocks = Vec::new();
    let mut index = vec![(usize::MAX, 0); la * lb];
    for members in sector_members(mixer, la, lb) {
        if !members.iter().any(|&(a, b)| a < used.0 && b < used.1) {
            continue;
        }
        let coupling: Vec<f64> = members
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0].0 as f64, w[0].1 as f64);
                match mixer {
                    // (a^dag b - b^dag a) theta, members ordered by increasing a
                    Mixer::BeamSplitter { theta } => theta * ((a + 1.0) * b).sqrt(),
                    // (a^dag b^dag - a b) theta, members ordered by increasing b
                    Mixer::Squeezer { theta } => theta * ((a + 1.0) * (b + 1.0)).sqrt(),
                }
            })
            .collect();
        let needed: Vec<usize> = (0..members.len()).filter(|&j| members[j].0 < used.0 && members[j].1 < used.1).collect();
        let block = linalg::chain_exp(&coupling, &needed);
        let flat: Vec<usize> = members.iter().map(|&(a, b)| a * lb + b).collect();
        for (pos, &f) in flat.iter().enumerate() {
            index[f] = (blocks.len(), pos);
        }
        blocks.push((flat, block));
    }
    Ok(Sectors { dims: (la, lb), blocks, index })
}

impl Sectors {
    /// `U[row, col]` by flat two-mode indices.
    fn entry(&self, row: usize, col: usize) -> Complex64 {
        let (br, pr) = self.index[row];
        let (bc, pc) = self.index[col];
        if br == bc && bc != usize::MAX {
            self.blocks[bc].1[(pr, pc)]
        } else {
            cr(0.0)
        }
    }

    fn dense(&self) -> CMat {
        let n = self.dims.0 * self.dims.1;
        let mut u = CMat::zeros(n, n);
        for (flat, block) in &self.blocks {
            for (j, &cj) in flat.iter().enumerate() {
                for (i, &ri) in flat.iter().enumerate() {
                    u[(ri, cj)] = block[(i, j)];
                }
            }
        }
        u
    }
}

/// Largest entry change of the columns `a < cols.0, b < cols.1` on the rows with
/// `a < rows_a` when the per-mode cutoffs are doubled.
fn squeezer_defect(mixer: Mixer, la: usize, lb: usize, cols: (usize, usize), rows_a: usize) -> Result<f64> {
    let small = sectors(mixer, la, lb, cols)?;
    let big = sectors(mixer, 2 * la, 2 * lb, cols)?;
    let big_lb = 2 * lb;
    let mut worst = 0.0f64;
    for (flat, block) in &big.blocks {
        for (j, &cj) in flat.iter().enumerate() {
            let (a, b) = (cj / big_lb, cj % big_lb);
            if a >= cols.0 || b >= cols.1 {
                continue;
            }
            for (i, &ri) in flat.iter().enumerate() {
                let (a2, b2) = (ri / big_lb, ri % big_lb);
                if a2 >= rows_a {
                    continue;
                }
                let reference = if a2 < la && b2 < lb { small.entry(a2 * lb + b2, a * lb + b) } else { cr(0.0) };
                // entries outside the window only count when the small unitary would have to carry them
                if a2 < la && b2 < lb {
                    worst = worst.max((block[(i, j)] - reference).norm());
                } else {
                    worst = worst.max(block[(i, j)].norm_sqr());
                }
            }
        }
    }
    Ok(worst)
}

/// `exp((a^dag b - b^dag a) arccos sqrt(lambda))` on a two-mode space. Exact on every
/// total-photon-number sector that fits inside both cutoffs.
pub fn beam_splitter_unitary(lambda: f64, space: &FockSpace) -> Result<LinearOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Domain(format!("transmissivity must lie in [0,1], got {lambda}")));
    }
    let (la, lb) = two_mode_dims(space)?;
    let u = sectors(Mixer::from_param(lambda)?, la, lb, (la, lb))?.dense();
    Ok(LinearOperator::square(space.clone(), u).expect("shape"))
}

/// `exp((a^dag b^dag - a b) arccosh sqrt(kappa))` on a two-mode space. The leakage is the
/// largest change of the columns inside `retained` when the cutoffs are doubled.
pub fn squeezer_unitary(kappa: f64, space: &FockSpace, retained: (usize, usize)) -> Result<Truncated<LinearOperator>> {
    if !(kappa >= 1.0) || !kappa.is_finite() {
        return Err(Error::Domain(format!("squeezing parameter must be >= 1, got {kappa}")));
    }
    let (la, lb) = two_mode_dims(space)?;
    let mixer = Mixer::from_param(kappa)?;
    let u = sectors(mixer, la, lb, (la, lb))?.dense();
    let leakage = if kappa > 1.0 { squeezer_defect(mixer, la, lb, retained, la)? } else { 0.0 };
    Ok(Truncated { value: LinearOperator::square(space.clone(), u).expect("shape"), leakage })
}

/// Dispatches on the parameter: `param <= 1` is a beam splitter, `param > 1` a squeezer
/// whose defect is measured on the columns inside `1/guard` of each cutoff.
pub fn two_mode_unitary(param: f64, space: &FockSpace, guard: usize) -> Result<Truncated<LinearOperator>> {
    if param <= 1.0 {
        return beam_splitter_unitary(param, space).map(Truncated::exact);
    }
    let (la, lb) = two_mode_dims(space)?;
    let g = guard.max(1);
    squeezer_unitary(param, space, ((la / g).max(1), (lb / g).max(1)))
}

fn two_mode_dims(space: &FockSpace) -> Result<(usize, usize)> {
    match space.mode_dims() {
        [a, b] => Ok((*a, *b)),
        dims => Err(Error::Shape(format!("expected a two-mode space, got {dims:?}"))),
    }
}

/// Kraus operators `<k|_traced cols` where the columns of `cols` are two-mode vectors on
/// cutoffs `l`; the kept mode is cut to `dim_out` levels.
fn reduction_kraus(cols: &CMat, l: (usize, usize), dim_out: usize, traced_mode: usize) -> Vec<CMat> {
    let (la, lb) = l;
    let (traced_len, kept_len) = if traced_mode == 1 { (lb, la) } else { (la, lb) };
    (0..traced_len)
        .map(|k| {
            CMat::from_fn(dim_out, cols.ncols(), |row, col| {
                if row >= kept_len {
                    return cr(0.0);
                }
                let flat = if traced_mode == 1 { row * lb + k } else { k * lb + row };
                cols[(flat, col)]
            })
        })
        .collect()
}

/// Kraus set of the reduction of a two-mode input `(dim_a, dim_b)` to mode A through
/// the beam splitter (`param <= 1`) or squeezer (`param > 1`).
pub(crate) fn mixer_reduction_kraus(
    param: f64,
    dim_a: usize,
    dim_b: usize,
    dim_out: usize,
    guard: usize,
) -> Result<(Vec<CMat>, f64)> {
    let mixer = Mixer::from_param(param)?;
    let (l, defect) = match mixer {
        Mixer::BeamSplitter { .. } => {
            let l = dim_a + dim_b - 1;
            ((l, l), 0.0)
        }
        Mixer::Squeezer { .. } => {
            // n_a - n_b is conserved, so the kept rows a < dim_out only meet b < dim_out + dim_b
            let l = dim_out + guard.max(1) * dim_a.max(dim_b);
            ((l, l), squeezer_defect(mixer, l, l, (dim_a, dim_b), dim_out)?)
        }
    };
    let sec = sectors(mixer, l.0, l.1, (dim_a, dim_b))?;
    let kept = dim_out.min(l.0);
    let kraus = (0..l.1)
        .map(|k| {
            CMat::from_fn(dim_out, dim_a * dim_b, |row, col| {
                if row >= kept {
                    return cr(0.0);
                }
                sec.entry(row * l.1 + k, (col / dim_b) * l.1 + col % dim_b)
            })
        })
        .collect();
    Ok((kraus, defect))
}

/// A channel written as a two-mode unitary acting on the input (mode 0) and a fixed
/// environment state (mode 1), followed by tracing out `traced_mode`.
#[derive(Debug, Clone)]
pub struct DilationRep {
    pub unitary: LinearOperator,
    pub env_state: DensityMatrix,
    pub traced_mode: usize,
    /// Truncation defect of the unitary on the columns actually used.
    pub leakage: f64,
    dim_in: usize,
}

impl DilationRep {
    /// Beam splitter with environment `env`; per-mode cutoff `dim_in + dim_env - 1` is exact.
    pub fn attenuator(lambda: f64, dim_in: usize, env: DensityMatrix) -> Result<Self> {
        let dim_env = env.space().single_dim()?;
        let l = dim_in + dim_env - 1;
        let u = beam_splitter_unitary(lambda, &FockSpace::new(vec![l, l])?)?;
        Ok(Self { unitary: u, env_state: env, traced_mode: 1, leakage: 0.0, dim_in })
    }

    /// Squeezer with environment `env`, built at per-mode cutoff `guard * max(dim_in, dim_env)`.
    pub fn amplifier(kappa: f64, dim_in: usize, env: DensityMatrix, guard: usize) -> Result<Self> {
        let dim_env = env.space().single_dim()?;
        let l = guard.max(1) * dim_in.max(dim_env);
        let u = squeezer_unitary(kappa, &FockSpace::new(vec![l, l])?, (dim_in, dim_env))?;
        Ok(Self { unitary: u.value, env_state: env, traced_mode: 1, leakage: u.leakage, dim_in })
    }

    /// Same dilation with the system traced out instead of the environment.
    pub fn complementary(mut self) -> Self {
        self.traced_mode = 0;
        self
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    /// Kraus operators `sqrt(s_k) <j|_traced U |., e_k>` onto the first `dim_out` levels of the kept mode.
    pub fn kraus(&self, dim_out: usize) -> Vec<CMat> {
        let dims = self.unitary.space_in().mode_dims();
        let (la, lb) = (dims[0], dims[1]);
        let env = self.env_state.matrix();
        let dim_env = env.nrows();
        let (weights, vectors) = if self.env_state.max_off_diagonal() == 0.0 {
            (self.env_state.diagonal(), linalg::identity(dim_env))
        } else {
            linalg::eigh(env)
        };
        // columns of U acting on |n> (x) e_k
        let u = self.unitary.matrix();
        let mut out = Vec::new();
        for (k, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            let mut cols = CMat::zeros(la * lb, self.dim_in);
            for n in 0..self.dim_in {
                for e in 0..dim_env {
                    let coeff = vectors[(e, k)];
                    if coeff != cr(0.0) {
                        let src = u.column(n * lb + e);
                        let mut dst = cols.column_mut(n);
                        dst.axpy(coeff, &src, cr(1.0));
                    }
                }
            }
            let restricted = reduction_kraus(&cols, (la, lb), dim_out, self.traced_mode);
            for m in restricted {
                out.push(m.scale(w.sqrt()));
            }
        }
        out
    }

    /// Image of an arbitrary input operator, truncated to `dim_out` output levels.
    pub fn apply_operator(&self, x: &CMat, dim_out: usize) -> CMat {
        let mut out = CMat::zeros(dim_out, dim_out);
        for k in self.kraus(dim_out) {
            out += &k * x * k.adjoint();
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix, dim_out: usize, cfg: &GlobalConfig) -> Result<Truncated<DensityMatrix>> {
        if rho.dim() != self.dim_in {
            return Err(Error::Shape(format!("state dimension {} but dilation input {}", rho.dim(), self.dim_in)));
        }
        let out = self.apply_operator(rho.matrix(), dim_out);
        let t = DensityMatrix::from_unnormalized(FockSpace::single(dim_out)?, out)?;
        let leakage = t.leakage.max(self.leakage);
        if leakage > cfg.leakage_max {
            return Err(Error::Truncation { leakage, bound: cfg.leakage_max, required_dim: None });
        }
        Ok(Truncated { value: t.value, leakage })
    }
}

