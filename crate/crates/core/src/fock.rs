//! Truncated multi-mode Fock spaces, operators and density matrices.
//!
//! Mode `k` of a [`FockSpace`] keeps photon numbers `0..mode_dims[k]`. Multi-mode
//! bases are row-major with the first mode as the most significant index.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::linalg::{self, c, cr, CMat};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    mode_dims: Vec<usize>,
}

impl FockSpace {
    pub fn new(mode_dims: Vec<usize>) -> Result<Self> {
        if mode_dims.is_empty() {
            return Err(Error::Domain("a Fock space needs at least one mode".into()));
        }
        if mode_dims.contains(&0) {
            return Err(Error::Domain(format!("mode dimensions must be >= 1, got {mode_dims:?}")));
        }
        Ok(Self { mode_dims })
    }

    /// One mode keeping photon numbers `0..dim`.
    pub fn single(dim: usize) -> Result<Self> {
        Self::new(vec![dim])
    }

    pub fn mode_dims(&self) -> &[usize] {
        &self.mode_dims
    }

    pub fn n_modes(&self) -> usize {
        self.mode_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.mode_dims.iter().product()
    }

    pub fn tensor(&self, other: &FockSpace) -> FockSpace {
        let mut dims = self.mode_dims.clone();
        dims.extend_from_slice(&other.mode_dims);
        FockSpace { mode_dims: dims }
    }

    /// Subspace made of the listed modes, in the order given.
    pub fn select(&self, modes: &[usize]) -> Result<FockSpace> {
        let dims = modes
            .iter()
            .map(|&m| self.mode_dims.get(m).copied().ok_or(Error::OutOfRange { index: m, dim: self.n_modes() }))
            .collect::<Result<Vec<_>>>()?;
        FockSpace::new(dims)
    }

    /// Cutoff of a single-mode space; errors on multi-mode spaces.
    pub fn single_dim(&self) -> Result<usize> {
        match self.mode_dims.as_slice() {
            [d] => Ok(*d),
            dims => Err(Error::Shape(format!("expected a single-mode space, got mode_dims {dims:?}"))),
        }
    }

    /// Multi-index (one photon number per mode) of a flat basis index.
    pub fn unflatten(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.n_modes()];
        for (k, &d) in self.mode_dims.iter().enumerate().rev() {
            out[k] = index % d;
            index /= d;
        }
        out
    }

    pub fn flatten(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.mode_dims).fold(0, |acc, (&n, &d)| acc * d + n)
    }
}

/// Common interface of the Kronecker product on states and operators.
pub trait Tensor: Sized {
    fn tensor(&self, other: &Self) -> Self;
}

pub fn tensor<T: Tensor>(a: &T, b: &T) -> T {
    a.tensor(b)
}

/// Dense operator between two truncated Fock spaces.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    space_in: FockSpace,
    space_out: FockSpace,
    matrix: CMat,
}

impl LinearOperator {
    pub fn new(space_in: FockSpace, space_out: FockSpace, matrix: CMat) -> Result<Self> {
        if matrix.shape() != (space_out.total_dim(), space_in.total_dim()) {
            return Err(Error::Shape(format!(
                "matrix shape {:?} does not match spaces {:?} -> {:?}",
                matrix.shape(),
                space_in.mode_dims(),
                space_out.mode_dims()
            )));
        }
        Ok(Self { space_in, space_out, matrix })
    }

    pub fn square(space: FockSpace, matrix: CMat) -> Result<Self> {
        Self::new(space.clone(), space, matrix)
    }

    pub fn identity(space: &FockSpace) -> Self {
        let n = space.total_dim();
        Self { space_in: space.clone(), space_out: space.clone(), matrix: linalg::identity(n) }
    }

    pub fn space_in(&self) -> &FockSpace {
        &self.space_in
    }

    pub fn space_out(&self) -> &FockSpace {
        &self.space_out
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn adjoint(&self) -> Self {
        Self { space_in: self.space_out.clone(), space_out: self.space_in.clone(), matrix: self.matrix.adjoint() }
    }

    /// `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &LinearOperator) -> Result<Self> {
        if rhs.space_out != self.space_in {
            return Err(Error::Shape("operator spaces do not chain".into()));
        }
        Ok(Self { space_in: rhs.space_in.clone(), space_out: self.space_out.clone(), matrix: &self.matrix * &rhs.matrix })
    }

    pub fn is_square(&self) -> bool {
        self.space_in == self.space_out
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        linalg::hermiticity_defect(&self.matrix)
    }
}

impl Tensor for LinearOperator {
    fn tensor(&self, other: &Self) -> Self {
        Self {
            space_in: self.space_in.tensor(&other.space_in),
            space_out: self.space_out.tensor(&other.space_out),
            matrix: linalg::kron(&self.matrix, &other.matrix),
        }
    }
}

/// A value produced by a lossy truncated computation together with the weight it lost.
#[derive(Debug, Clone)]
pub struct Truncated<T> {
    pub value: T,
    pub leakage: f64,
}

impl<T> Truncated<T> {
    pub fn exact(value: T) -> Self {
        Self { value, leakage: 0.0 }
    }

    pub fn map<U>(self, f: impl FnOnce(T) -> U) -> Truncated<U> {
        Truncated { value: f(self.value), leakage: self.leakage }
    }
}

/// Positive unit-trace operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    space: FockSpace,
    matrix: CMat,
}

impl DensityMatrix {
    /// Validating constructor: Hermitian, positive and unit trace within `cfg`.
    pub fn new(space: FockSpace, matrix: CMat, cfg: &GlobalConfig) -> Result<Self> {
        let n = space.total_dim();
        if matrix.shape() != (n, n) {
            return Err(Error::Shape(format!("density matrix must be {n}x{n}, got {:?}", matrix.shape())));
        }
        let rho = Self { space, matrix };
        rho.validate(cfg)?;
        Ok(rho)
    }

    /// Skips validation; callers guarantee positivity and unit trace up to roundoff.
    pub(crate) fn from_raw(space: FockSpace, matrix: CMat) -> Self {
        debug_assert_eq!(matrix.nrows(), space.total_dim());
        Self { space, matrix }
    }

    /// Normalizes a positive semidefinite matrix and records the missing trace as leakage.
    pub(crate) fn from_unnormalized(space: FockSpace, matrix: CMat) -> Result<Truncated<Self>> {
        let tr = linalg::trace(&matrix).re;
        if !(tr > 0.0) || !tr.is_finite() {
            return Err(Error::InvalidState(format!("cannot normalize operator with trace {tr}")));
        }
        let matrix = linalg::hermitian_part(&matrix).unscale(tr);
        Ok(Truncated { value: Self { space, matrix }, leakage: 1.0 - tr })
    }

    pub fn validate(&self, cfg: &GlobalConfig) -> Result<()> {
        let herm = linalg::hermiticity_defect(&self.matrix);
        if herm > cfg.tol_herm {
            return Err(Error::InvalidState(format!("hermiticity defect {herm:.3e} exceeds {:.1e}", cfg.tol_herm)));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > cfg.tol_trace {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1 by more than {:.1e}", cfg.tol_trace)));
        }
        let min_eig = linalg::eigvalsh(&self.matrix).last().copied().unwrap_or(0.0);
        if min_eig < -cfg.tol_psd {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(())
    }

    /// Diagonal state in the Fock basis; weights must sum to one within `tol_trace`.
    pub fn from_diagonal(space: FockSpace, weights: &[f64], cfg: &GlobalConfig) -> Result<Self> {
        if weights.len() != space.total_dim() {
            return Err(Error::Shape(format!("{} weights for dimension {}", weights.len(), space.total_dim())));
        }
        let diag = nalgebra::DVector::from_iterator(weights.len(), weights.iter().map(|&w| cr(w)));
        Self::new(space, CMat::from_diagonal(&diag), cfg)
    }

    /// Projector onto a normalized copy of `psi`.
    pub fn pure(space: FockSpace, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != space.total_dim() {
            return Err(Error::Shape(format!("vector of length {} for dimension {}", psi.len(), space.total_dim())));
        }
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::InvalidState("zero vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(psi.len(), psi.iter().map(|z| z / norm));
        Ok(Self { space, matrix: &v * v.adjoint() })
    }

    /// Vacuum on every mode of `space`.
    pub fn vacuum(space: &FockSpace) -> Self {
        let n = space.total_dim();
        let mut m = CMat::zeros(n, n);
        m[(0, 0)] = cr(1.0);
        Self { space: space.clone(), matrix: m }
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn trace(&self) -> f64 {
        linalg::trace(&self.matrix).re
    }

    /// Real parts of the Fock-basis diagonal.
    pub fn diagonal(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.matrix[(i, j)].norm());
                }
            }
        }
        worst
    }

    /// Reduced state on the listed modes (sorted, duplicates removed).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() {
            return Err(Error::Domain("partial trace must keep at least one mode".into()));
        }
        let m = self.space.n_modes();
        if let Some(&bad) = keep.iter().find(|&&k| k >= m) {
            return Err(Error::OutOfRange { index: bad, dim: m });
        }
        if keep.len() == m {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..m).filter(|k| !keep.contains(k)).collect();
        let kept_space = self.space.select(&keep)?;
        let traced_space = self.space.select(&traced)?;
        let (dk, dt) = (kept_space.total_dim(), traced_space.total_dim());
        // flat index of (kept, traced) pair
        let mut table = vec![0usize; dk * dt];
        let mut multi = vec![0usize; m];
        for a in 0..dk {
            let ka = kept_space.unflatten(a);
            for (slot, &mode) in keep.iter().enumerate() {
                multi[mode] = ka[slot];
            }
            for b in 0..dt {
                let tb = traced_space.unflatten(b);
                for (slot, &mode) in traced.iter().enumerate() {
                    multi[mode] = tb[slot];
                }
                table[a * dt + b] = self.space.flatten(&multi);
            }
        }
        let mut out = CMat::zeros(dk, dk);
        for a in 0..dk {
            for b in 0..dk {
                let mut acc = Complex64::ZERO;
                for t in 0..dt {
                    acc += self.matrix[(table[a * dt + t], table[b * dt + t])];
                }
                out[(a, b)] = acc;
            }
        }
        Ok(DensityMatrix { space: kept_space, matrix: out })
    }

    /// Reorders the tensor factors: output mode `k` is input mode `perm[k]`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<DensityMatrix> {
        let m = self.space.n_modes();
        let mut seen = perm.to_vec();
        seen.sort_unstable();
        if seen != (0..m).collect::<Vec<_>>() {
            return Err(Error::Domain(format!("{perm:?} is not a permutation of {m} modes")));
        }
        let new_space = self.space.select(perm)?;
        let n = self.dim();
        let map: Vec<usize> = (0..n)
            .map(|i| {
                let new_multi = new_space.unflatten(i);
                let mut old = vec![0; m];
                for (k, &p) in perm.iter().enumerate() {
                    old[p] = new_multi[k];
                }
                self.space.flatten(&old)
            })
            .collect();
        let matrix = CMat::from_fn(n, n, |i, j| self.matrix[(map[i], map[j])]);
        Ok(DensityMatrix { space: new_space, matrix })
    }

    /// Embeds the state into a space with larger (or equal) cutoffs on every mode.
    pub fn embed(&self, target: &FockSpace) -> Result<DensityMatrix> {
        if target.n_modes() != self.space.n_modes()
            || target.mode_dims().iter().zip(self.space.mode_dims()).any(|(t, s)| t < s)
        {
            return Err(Error::Shape(format!(
                "cannot embed {:?} into {:?}",
                self.space.mode_dims(),
                target.mode_dims()
            )));
        }
        let n = self.dim();
        let map: Vec<usize> = (0..n).map(|i| target.flatten(&self.space.unflatten(i))).collect();
        let big = target.total_dim();
        let mut matrix = CMat::zeros(big, big);
        for i in 0..n {
            for j in 0..n {
                matrix[(map[i], map[j])] = self.matrix[(i, j)];
            }
        }
        Ok(DensityMatrix { space: target.clone(), matrix })
    }

    /// Fock-basis transpose (also the complex conjugate, the state being Hermitian).
    pub fn transpose(&self) -> DensityMatrix {
        DensityMatrix { space: self.space.clone(), matrix: self.matrix.transpose() }
    }

    pub fn to_json(&self) -> StateJson {
        StateJson {
            mode_dims: self.space.mode_dims().to_vec(),
            matrix: self.matrix.row_iter().map(|row| row.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }

    pub fn from_json(json: &StateJson, cfg: &GlobalConfig) -> Result<Self> {
        let space = FockSpace::new(json.mode_dims.clone())?;
        let n = space.total_dim();
        if json.matrix.len() != n || json.matrix.iter().any(|r| r.len() != n) {
            return Err(Error::Shape(format!("state matrix must be {n}x{n}")));
        }
        let matrix = CMat::from_fn(n, n, |i, j| {
            let [re, im] = json.matrix[i][j];
            c(re, im)
        });
        Self::new(space, matrix, cfg)
    }

    pub fn load(path: impl AsRef<Path>, cfg: &GlobalConfig) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let json: StateJson = serde_json::from_str(&text)?;
        Self::from_json(&json, cfg)
    }
}

impl Tensor for DensityMatrix {
    fn tensor(&self, other: &Self) -> Self {
        Self { space: self.space.tensor(&other.space), matrix: linalg::kron(&self.matrix, &other.matrix) }
    }
}

/// On-disk state format: `{"mode_dims": [...], "matrix": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub mode_dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

/// Annihilation operator: `a|n> = sqrt(n)|n-1>`.
pub fn ladder(space: &FockSpace) -> Result<LinearOperator> {
    let d = space.single_dim()?;
    Ok(LinearOperator::square(space.clone(), ladder_matrix(d)).expect("shape"))
}

pub(crate) fn ladder_matrix(d: usize) -> CMat {
    let mut a = CMat::zeros(d, d);
    for n in 1..d {
        a[(n - 1, n)] = cr((n as f64).sqrt());
    }
    a
}

pub fn creation(space: &FockSpace) -> Result<LinearOperator> {
    Ok(ladder(space)?.adjoint())
}

/// Photon-number operator, summed over all modes of `space`.
pub fn number_operator(space: &FockSpace) -> LinearOperator {
    let n = space.total_dim();
    let diag = nalgebra::DVector::from_iterator(n, (0..n).map(|i| cr(space.unflatten(i).iter().sum::<usize>() as f64)));
    LinearOperator::square(space.clone(), CMat::from_diagonal(&diag)).expect("shape")
}

/// `|n><n|` on a single mode.
pub fn fock_state(n: usize, space: &FockSpace) -> Result<DensityMatrix> {
    let d = space.single_dim()?;
    if n >= d {
        return Err(Error::OutOfRange { index: n, dim: d });
    }
    let mut m = CMat::zeros(d, d);
    m[(n, n)] = cr(1.0);
    Ok(DensityMatrix::from_raw(space.clone(), m))
}

/// Geometric weights `(1/(E+1)) (E/(E+1))^n` for `n < dim`, not renormalized.
pub fn thermal_weights(energy: f64, dim: usize) -> Vec<f64> {
    let ratio = energy / (energy + 1.0);
    let head = 1.0 / (energy + 1.0);
    (0..dim).map(|n| head * ratio.powi(n as i32)).collect()
}

/// Smallest cutoff whose discarded thermal tail `(E/(E+1))^D` is at most `leakage`.
pub fn thermal_required_dim(energy: f64, leakage: f64) -> usize {
    if energy <= 0.0 {
        return 1;
    }
    let ratio = energy / (energy + 1.0);
    (leakage.ln() / ratio.ln()).ceil().max(1.0) as usize
}

/// Thermal state of mean photon number `energy`, renormalized on the cutoff.
/// The reported leakage is the discarded tail mass.
pub fn thermal_state(energy: f64, space: &FockSpace, cfg: &GlobalConfig) -> Result<Truncated<DensityMatrix>> {
    if !(energy >= 0.0) || !energy.is_finite() {
        return Err(Error::Domain(format!("thermal energy must be >= 0, got {energy}")));
    }
    let d = space.single_dim()?;
    let w = thermal_weights(energy, d);
    let mass: f64 = w.iter().sum();
    let tail = 1.0 - mass;
    if tail > cfg.leakage_max {
        return Err(Error::Truncation {
            leakage: tail,
            bound: cfg.leakage_max,
            required_dim: Some(thermal_required_dim(energy, cfg.leakage_max)),
        });
    }
    let w: Vec<f64> = w.iter().map(|x| x / mass).collect();
    let diag = nalgebra::DVector::from_iterator(d, w.iter().map(|&x| cr(x)));
    Ok(Truncated { value: DensityMatrix::from_raw(space.clone(), CMat::from_diagonal(&diag)), leakage: tail.max(0.0) })
}

/// Truncation diagnostics of a displacement operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisplacementDefect {
    /// Largest entry of `V^dagger V - I` over the retained input columns of the guard-space exponential.
    pub unitarity: f64,
    /// Largest change of the returned block when the guard cutoff is doubled.
    pub truncation: f64,
}

impl DisplacementDefect {
    pub fn worst(&self) -> f64 {
        self.unitarity.max(self.truncation)
    }
}

/// `D(r)` for real `r >= 0` restricted to `dim_out x dim_in`, built at cutoff `guard_dim`.
pub(crate) fn real_displacement_block(r: f64, dim_in: usize, dim_out: usize, guard_dim: usize) -> Result<(CMat, DisplacementDefect)> {
    // r (a^dag - a) is a real antisymmetric chain with couplings r sqrt(n + 1)
    let cols: Vec<usize> = (0..dim_in).collect();
    let big = |l: usize| -> Result<CMat> {
        let coupling: Vec<f64> = (1..l).map(|n| r * (n as f64).sqrt()).collect();
        Ok(linalg::chain_exp(&coupling, &cols))
    };
    let l = guard_dim.max(dim_in).max(dim_out);
    let u = big(l)?;
    let cols = u.columns(0, dim_in).into_owned();
    let gram = cols.adjoint() * &cols;
    let unitarity = linalg::max_abs_diff(&gram, &linalg::identity(dim_in));
    let block = u.view((0, 0), (dim_out, dim_in)).into_owned();
    let u2 = big(2 * l)?;
    let block2 = u2.view((0, 0), (dim_out, dim_in)).into_owned();
    let truncation = linalg::max_abs_diff(&block, &block2);
    Ok((block, DisplacementDefect { unitarity, truncation }))
}

/// Conjugates a real-amplitude displacement by the phase rotation `exp(i phi N)`.
pub(crate) fn rotate_displacement(block: &CMat, phase: f64) -> CMat {
    let (rows, cols) = block.shape();
    CMat::from_fn(rows, cols, |m, n| block[(m, n)] * Complex64::from_polar(1.0, phase * (m as f64 - n as f64)))
}

/// Displacement operator `exp(z a^dagger - conj(z) a)` computed at the guard cutoff
/// `guard_factor * D` and projected back to the `D x D` block.
pub fn displacement(z: Complex64, space: &FockSpace, cfg: &GlobalConfig) -> Result<Truncated<LinearOperator>> {
    let d = space.single_dim()?;
    let (op, defect) = displacement_between(z, d, d, cfg)?;
    Ok(Truncated { value: LinearOperator::square(space.clone(), op).expect("shape"), leakage: defect.worst() })
}

/// Displacement block from `dim_in` to `dim_out`; fails when the defect exceeds `leakage_max`.
pub fn displacement_between(z: Complex64, dim_in: usize, dim_out: usize, cfg: &GlobalConfig) -> Result<(CMat, DisplacementDefect)> {
    let guard = cfg.guard_factor * dim_in.max(dim_out);
    let (block, defect) = real_displacement_block(z.norm(), dim_in, dim_out, guard)?;
    if defect.worst() > cfg.leakage_max {
        return Err(Error::Truncation { leakage: defect.worst(), bound: cfg.leakage_max, required_dim: None });
    }
    Ok((rotate_displacement(&block, z.arg()), defect))
}

/// `Tr[obs rho]` for a Hermitian observable.
pub fn expectation(obs: &LinearOperator, rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<f64> {
    if obs.space_in() != rho.space() || obs.space_out() != rho.space() {
        return Err(Error::Shape("observable and state live on different spaces".into()));
    }
    let defect = obs.hermiticity_defect();
    if defect > cfg.tol_herm {
        return Err(Error::Domain(format!("observable is not Hermitian (defect {defect:.3e})")));
    }
    let v = linalg::trace(&(obs.matrix() * rho.matrix()));
    Ok(v.re)
}
