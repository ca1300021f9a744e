//! Quantum channels as Kraus sums between truncated Fock spaces.
//!
//! Quantum-limited attenuators and amplifiers use closed-form Kraus operators; thermal
//! channels are the composition `A_{kappa',0} o E_{tau,0}`. The two-mode dilations in
//! [`dilation`] are kept as an independent route for cross-checks.

mod apply;
pub mod dilation;
mod heat;
mod kraus;
pub mod zero_cmi;

use serde::{Deserialize, Serialize};

use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::fock::{DensityMatrix, FockSpace, LinearOperator, Truncated};
use crate::linalg::{self, CMat};

use apply::{BlockLayout, KrausOp};

pub use dilation::{beam_splitter_unitary, squeezer_unitary, two_mode_unitary, DilationRep};
pub use kraus::{amplifier_decomposition, attenuator_decomposition};
pub use zero_cmi::{zero_cmi_state, ZeroCmiBlock};

/// Channel family and parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ChannelKind {
    AttenuatorQl { lambda: f64 },
    AmplifierQl { kappa: f64 },
    AttenuatorThermal { lambda: f64, energy: f64 },
    AmplifierThermal { kappa: f64, energy: f64 },
    /// Two-mode input `(A, env)` mixed on a beam splitter, output mode A.
    BeamSplitterReduce { lambda: f64 },
    /// Two-mode input `(A, env)` mixed by a two-mode squeezer, output mode A.
    SqueezerReduce { kappa: f64 },
    HeatSemigroup { t: f64, order: usize },
    Transpose,
    Dual { inner: Box<ChannelKind> },
    Complementary { inner: Box<ChannelKind> },
}

fn check_range(name: &str, value: f64, lo: f64, hi: f64) -> Result<()> {
    if !(value >= lo && value <= hi) {
        return Err(Error::Domain(format!("{name} must lie in [{lo}, {hi}], got {value}")));
    }
    Ok(())
}

impl ChannelKind {
    pub fn validate(&self) -> Result<()> {
        let inf = f64::INFINITY;
        match self {
            ChannelKind::AttenuatorQl { lambda } | ChannelKind::BeamSplitterReduce { lambda } => check_range("lambda", *lambda, 0.0, 1.0),
            ChannelKind::AmplifierQl { kappa } | ChannelKind::SqueezerReduce { kappa } => check_range("kappa", *kappa, 1.0, f64::MAX),
            ChannelKind::AttenuatorThermal { lambda, energy } => {
                check_range("lambda", *lambda, 0.0, 1.0)?;
                check_range("energy", *energy, 0.0, f64::MAX)
            }
            ChannelKind::AmplifierThermal { kappa, energy } => {
                check_range("kappa", *kappa, 1.0, f64::MAX)?;
                check_range("energy", *energy, 0.0, f64::MAX)
            }
            ChannelKind::HeatSemigroup { t, order } => {
                if *order == 0 {
                    return Err(Error::Domain("quadrature order must be >= 1".into()));
                }
                check_range("t", *t, 0.0, inf)
            }
            ChannelKind::Transpose => Ok(()),
            ChannelKind::Dual { inner } | ChannelKind::Complementary { inner } => inner.validate(),
        }
    }

    /// Whether the channel can move weight to higher photon numbers.
    pub fn raises_photon_number(&self) -> bool {
        match self {
            ChannelKind::AttenuatorQl { .. } | ChannelKind::Transpose => false,
            ChannelKind::AttenuatorThermal { energy, .. } => *energy > 0.0,
            ChannelKind::AmplifierQl { kappa } | ChannelKind::SqueezerReduce { kappa } => *kappa > 1.0,
            ChannelKind::HeatSemigroup { t, .. } => *t > 0.0,
            ChannelKind::AmplifierThermal { .. } | ChannelKind::BeamSplitterReduce { .. } => true,
            ChannelKind::Dual { inner } | ChannelKind::Complementary { inner } => inner.raises_photon_number(),
        }
    }
}

fn default_guard() -> usize {
    2
}

/// Input/output cutoffs of a channel; `guard` multiplies cutoffs for internal
/// computations (squeezer sectors, displacement exponentials), `dim_env` is the
/// cutoff of the second input mode of the two-mode reductions or the environment
/// output of a complementary channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cutoffs {
    pub dim_in: usize,
    pub dim_out: usize,
    #[serde(default = "default_guard")]
    pub guard: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim_env: Option<usize>,
}

impl Cutoffs {
    pub fn new(dim_in: usize, dim_out: usize) -> Self {
        Self { dim_in, dim_out, guard: default_guard(), dim_env: None }
    }

    pub fn square(dim: usize) -> Self {
        Self::new(dim, dim)
    }

    pub fn with_guard(mut self, guard: usize) -> Self {
        self.guard = guard;
        self
    }

    pub fn with_env(mut self, dim_env: usize) -> Self {
        self.dim_env = Some(dim_env);
        self
    }

    fn validate(&self) -> Result<()> {
        if self.dim_in == 0 || self.dim_out == 0 || self.guard == 0 || self.dim_env == Some(0) {
            return Err(Error::Domain(format!("cutoffs must be positive: {self:?}")));
        }
        Ok(())
    }
}

/// Serialized form of a channel: the Kraus operators are rebuilt on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub cutoffs: Cutoffs,
}

/// A channel as a finite Kraus set between truncated Fock spaces.
#[derive(Debug, Clone)]
pub struct ChannelRep {
    kind: ChannelKind,
    cutoffs: Cutoffs,
    space_in: FockSpace,
    space_out: FockSpace,
    kraus: Vec<KrausOp>,
    transpose: bool,
    leakage: f64,
}

struct Built {
    space_in: FockSpace,
    space_out: FockSpace,
    kraus: Vec<KrausOp>,
    transpose: bool,
    extra_defect: f64,
}

fn ops(ms: Vec<CMat>) -> Vec<KrausOp> {
    ms.iter().map(KrausOp::from_matrix).filter(|k| !k.is_zero()).collect()
}

fn compose(first: &[KrausOp], second: &[KrausOp]) -> Vec<KrausOp> {
    let mut out = Vec::with_capacity(first.len() * second.len());
    for b in second {
        for a in first {
            let prod = b.after(a);
            if !prod.is_zero() {
                out.push(prod);
            }
        }
    }
    out
}

fn build(kind: &ChannelKind, c: &Cutoffs) -> Result<Built> {
    let single = |d: usize| FockSpace::single(d);
    let (di, d_out) = (c.dim_in, c.dim_out);
    let plain = |kraus: Vec<KrausOp>| -> Result<Built> {
        Ok(Built { space_in: single(di)?, space_out: single(d_out)?, kraus, transpose: false, extra_defect: 0.0 })
    };
    match kind {
        ChannelKind::AttenuatorQl { lambda } => plain(ops(kraus::attenuator_ql(*lambda, di, d_out))),
        ChannelKind::AmplifierQl { kappa } => plain(ops(kraus::amplifier_ql(*kappa, di, d_out))),
        ChannelKind::AttenuatorThermal { lambda, energy } => {
            let (tau, outer) = attenuator_decomposition(*lambda, *energy);
            let first = ops(kraus::attenuator_ql(tau, di, di));
            let second = ops(kraus::amplifier_ql(outer, di, d_out));
            plain(compose(&first, &second))
        }
        ChannelKind::AmplifierThermal { kappa, energy } => {
            let (tau, outer) = amplifier_decomposition(*kappa, *energy);
            let first = ops(kraus::attenuator_ql(tau, di, di));
            let second = ops(kraus::amplifier_ql(outer, di, d_out));
            plain(compose(&first, &second))
        }
        ChannelKind::BeamSplitterReduce { lambda: param } | ChannelKind::SqueezerReduce { kappa: param } => {
            let de = c.dim_env.unwrap_or(di);
            let (ks, defect) = dilation::mixer_reduction_kraus(*param, di, de, d_out, c.guard)?;
            Ok(Built {
                space_in: FockSpace::new(vec![di, de])?,
                space_out: single(d_out)?,
                kraus: ops(ks),
                transpose: false,
                extra_defect: defect,
            })
        }
        ChannelKind::HeatSemigroup { t, order } => {
            let (ks, defect) = heat::heat_kraus(*t, *order, di, d_out, c.guard)?;
            Ok(Built { space_in: single(di)?, space_out: single(d_out)?, kraus: ops(ks), transpose: false, extra_defect: defect })
        }
        ChannelKind::Transpose => {
            if di != d_out {
                return Err(Error::Shape("transpose needs equal input and output cutoffs".into()));
            }
            Ok(Built { space_in: single(di)?, space_out: single(di)?, kraus: Vec::new(), transpose: true, extra_defect: 0.0 })
        }
        ChannelKind::Dual { inner } => {
            let b = build(inner, c)?;
            Ok(Built {
                space_in: b.space_out,
                space_out: b.space_in,
                kraus: b.kraus.iter().map(KrausOp::adjoint).collect(),
                transpose: b.transpose,
                extra_defect: b.extra_defect,
            })
        }
        ChannelKind::Complementary { inner } => {
            let de = c.dim_env.unwrap_or(d_out);
            let ks = match inner.as_ref() {
                ChannelKind::AttenuatorQl { lambda } => kraus::attenuator_ql_complementary(*lambda, di, de),
                ChannelKind::AmplifierQl { kappa } => kraus::amplifier_ql_complementary(*kappa, di, de),
                other => {
                    return Err(Error::Unsupported(format!(
                        "complementary channel needs a pure environment; {other:?} is not quantum-limited"
                    )))
                }
            };
            Ok(Built { space_in: single(di)?, space_out: single(de)?, kraus: ops(ks), transpose: false, extra_defect: 0.0 })
        }
    }
}

impl ChannelRep {
    pub fn new(kind: ChannelKind, cutoffs: Cutoffs, cfg: &GlobalConfig) -> Result<Self> {
        kind.validate()?;
        cutoffs.validate()?;
        let built = build(&kind, &cutoffs)?;
        let mut rep = ChannelRep {
            kind,
            cutoffs,
            space_in: built.space_in,
            space_out: built.space_out,
            kraus: built.kraus,
            transpose: built.transpose,
            leakage: 0.0,
        };
        rep.leakage = rep.trace_defect().max(built.extra_defect);
        if matches!(rep.kind, ChannelKind::AttenuatorQl { .. }) && cutoffs.dim_out >= cutoffs.dim_in && rep.leakage > cfg.tol_trace {
            return Err(Error::Construction(format!("attenuator Kraus set incomplete by {:.3e}", rep.leakage)));
        }
        Ok(rep)
    }

    pub fn from_spec(spec: &ChannelSpec, cfg: &GlobalConfig) -> Result<Self> {
        Self::new(spec.kind.clone(), spec.cutoffs, cfg)
    }

    pub fn spec(&self) -> ChannelSpec {
        ChannelSpec { kind: self.kind.clone(), cutoffs: self.cutoffs }
    }

    /// Like [`ChannelRep::new`] with the smallest output cutoff (grown geometrically from
    /// an estimate, never below `base.dim_out`) whose worst-case trace defect is within
    /// `cfg.leakage_max`.
    pub fn with_auto_output(kind: ChannelKind, base: Cutoffs, cfg: &GlobalConfig) -> Result<Self> {
        let (di, de) = (base.dim_in, base.dim_env.unwrap_or(base.dim_in));
        let estimate = match &kind {
            ChannelKind::BeamSplitterReduce { .. } => di + de - 1,
            // mean output photon number of the top input column
            ChannelKind::SqueezerReduce { kappa } => (kappa * di as f64 + (kappa - 1.0) * de as f64) as usize,
            _ => di,
        };
        let mut dim_out = base.dim_out.max(estimate).max(1);
        loop {
            let rep = Self::new(kind.clone(), Cutoffs { dim_out, ..base }, cfg)?;
            if rep.leakage <= cfg.leakage_max || !kind.raises_photon_number() {
                return Ok(rep);
            }
            if dim_out > 64 * di.max(de) + 256 {
                return Err(Error::Truncation { leakage: rep.leakage, bound: cfg.leakage_max, required_dim: None });
            }
            dim_out += (dim_out / 4).max(2);
        }
    }

    /// Diagonal of `Phi(diag(probs))` in the Fock basis of the output.
    pub fn output_diagonal(&self, probs: &[f64]) -> Result<Vec<f64>> {
        if probs.len() != self.dim_in() {
            return Err(Error::Shape(format!("expected {} input weights, got {}", self.dim_in(), probs.len())));
        }
        if self.transpose {
            return Ok(probs.to_vec());
        }
        let mut out = vec![0.0; self.dim_out()];
        for k in &self.kraus {
            for &(i, j, z) in &k.entries {
                out[i] += probs[j] * z.norm_sqr();
            }
        }
        Ok(out)
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    pub fn cutoffs(&self) -> &Cutoffs {
        &self.cutoffs
    }

    pub fn space_in(&self) -> &FockSpace {
        &self.space_in
    }

    pub fn space_out(&self) -> &FockSpace {
        &self.space_out
    }

    pub fn dim_in(&self) -> usize {
        self.space_in.total_dim()
    }

    pub fn dim_out(&self) -> usize {
        self.space_out.total_dim()
    }

    /// Worst-case truncation defect of the Kraus set (trace defect on the input block,
    /// or unitality defect for duals) including internal exponential defects.
    pub fn leakage(&self) -> f64 {
        self.leakage
    }

    pub fn is_trace_preserving(&self) -> bool {
        !matches!(self.kind, ChannelKind::Dual { .. })
    }

    pub fn n_kraus(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus_matrices(&self) -> Vec<CMat> {
        self.kraus.iter().map(KrausOp::matrix).collect()
    }

    pub fn kraus_operators(&self) -> Vec<LinearOperator> {
        self.kraus
            .iter()
            .map(|k| LinearOperator::new(self.space_in.clone(), self.space_out.clone(), k.matrix()).expect("shape"))
            .collect()
    }

    /// `sum K^dagger K`.
    pub fn completeness_matrix(&self) -> CMat {
        apply::completeness(&self.kraus, self.dim_in())
    }

    /// `sum K K^dagger`.
    pub fn unitality_matrix(&self) -> CMat {
        let adj: Vec<KrausOp> = self.kraus.iter().map(KrausOp::adjoint).collect();
        apply::completeness(&adj, self.dim_out())
    }

    fn trace_defect(&self) -> f64 {
        if self.transpose {
            return 0.0;
        }
        match self.kind {
            ChannelKind::Dual { .. } => linalg::max_abs_diff(&self.unitality_matrix(), &linalg::identity(self.dim_out())),
            _ => linalg::max_abs_diff(&self.completeness_matrix(), &linalg::identity(self.dim_in())),
        }
    }

    /// The dual channel: Kraus adjoints.
    pub fn dual(&self) -> ChannelRep {
        let kind = match &self.kind {
            ChannelKind::Dual { inner } => (**inner).clone(),
            other => ChannelKind::Dual { inner: Box::new(other.clone()) },
        };
        ChannelRep {
            kind,
            cutoffs: self.cutoffs,
            space_in: self.space_out.clone(),
            space_out: self.space_in.clone(),
            kraus: self.kraus.iter().map(KrausOp::adjoint).collect(),
            transpose: self.transpose,
            leakage: self.leakage,
        }
    }

    fn layout_for(&self, space: &FockSpace, first_mode: usize) -> Result<(BlockLayout, FockSpace)> {
        let dims = space.mode_dims();
        let k = self.space_in.n_modes();
        if first_mode + k > dims.len() || dims[first_mode..first_mode + k] != *self.space_in.mode_dims() {
            return Err(Error::Shape(format!(
                "channel input {:?} does not match modes {first_mode}.. of {:?}",
                self.space_in.mode_dims(),
                dims
            )));
        }
        let left: usize = dims[..first_mode].iter().product();
        let right: usize = dims[first_mode + k..].iter().product();
        let mut out_dims = dims[..first_mode].to_vec();
        out_dims.push(self.dim_out());
        out_dims.extend_from_slice(&dims[first_mode + k..]);
        let layout = BlockLayout { left, dim_in: self.dim_in(), dim_out: self.dim_out(), right };
        Ok((layout, FockSpace::new(out_dims)?))
    }

    fn apply_block(&self, x: &CMat, layout: BlockLayout) -> CMat {
        if self.transpose {
            apply::apply_transpose(x, layout)
        } else {
            apply::apply_kraus(&self.kraus, x, layout)
        }
    }

    /// Image of an arbitrary operator on the full input space (no renormalization).
    pub fn apply_operator(&self, x: &CMat) -> Result<CMat> {
        if x.shape() != (self.dim_in(), self.dim_in()) {
            return Err(Error::Shape(format!("operator is {:?}, channel input dimension {}", x.shape(), self.dim_in())));
        }
        Ok(self.apply_block(x, BlockLayout::single(self.dim_in(), self.dim_out())))
    }

    fn finish(&self, out: CMat, space: FockSpace, cfg: &GlobalConfig) -> Result<Truncated<DensityMatrix>> {
        if !self.is_trace_preserving() {
            return Err(Error::Unsupported("dual channels map observables, not states".into()));
        }
        let t = DensityMatrix::from_unnormalized(space, out)?;
        let leakage = t.leakage.max(0.0);
        if leakage > cfg.leakage_max {
            return Err(Error::Truncation { leakage, bound: cfg.leakage_max, required_dim: None });
        }
        Ok(Truncated { value: t.value, leakage })
    }

    /// Output state, renormalized; the leakage is the trace lost to the output cutoff.
    pub fn apply(&self, rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<Truncated<DensityMatrix>> {
        self.apply_to_modes(rho, 0, cfg)
    }

    /// Applies the channel to the modes `first_mode..first_mode + n_in` of a multi-mode state
    /// and the identity elsewhere.
    pub fn apply_to_modes(&self, rho: &DensityMatrix, first_mode: usize, cfg: &GlobalConfig) -> Result<Truncated<DensityMatrix>> {
        if !self.is_trace_preserving() {
            return Err(Error::Unsupported("dual channels map observables, not states".into()));
        }
        let (layout, out_space) = self.layout_for(rho.space(), first_mode)?;
        let out = self.apply_block(rho.matrix(), layout);
        self.finish(out, out_space, cfg)
    }

    /// `Phi^{(x) n}` for a single-mode channel acting on every mode of `rho`.
    pub fn apply_tensor_power(&self, rho: &DensityMatrix, cfg: &GlobalConfig) -> Result<Truncated<DensityMatrix>> {
        if self.space_in.n_modes() != 1 {
            return Err(Error::Shape("tensor powers need a single-mode channel".into()));
        }
        let mut x = rho.matrix().clone();
        let mut space = rho.space().clone();
        for mode in 0..space.n_modes() {
            let (layout, next) = self.layout_for(&space, mode)?;
            x = self.apply_block(&x, layout);
            space = next;
        }
        self.finish(x, space, cfg)
    }
}

/// Quantum-limited attenuator `E_{lambda,0}` with closed-form Kraus operators.
pub fn kraus_attenuator_ql(lambda: f64, cutoffs: Cutoffs, cfg: &GlobalConfig) -> Result<ChannelRep> {
    ChannelRep::new(ChannelKind::AttenuatorQl { lambda }, cutoffs, cfg)
}

/// Quantum-limited amplifier `A_{kappa,0}` with closed-form Kraus operators.
pub fn kraus_amplifier_ql(kappa: f64, cutoffs: Cutoffs, cfg: &GlobalConfig) -> Result<ChannelRep> {
    ChannelRep::new(ChannelKind::AmplifierQl { kappa }, cutoffs, cfg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThermalKind {
    Attenuator,
    Amplifier,
}

/// Thermal attenuator `E_{lambda,E}` or amplifier `A_{kappa,E}`.
pub fn thermal_channel(kind: ThermalKind, param: f64, energy: f64, cutoffs: Cutoffs, cfg: &GlobalConfig) -> Result<ChannelRep> {
    let kind = match kind {
        ThermalKind::Attenuator => ChannelKind::AttenuatorThermal { lambda: param, energy },
        ThermalKind::Amplifier => ChannelKind::AmplifierThermal { kappa: param, energy },
    };
    ChannelRep::new(kind, cutoffs, cfg)
}

pub fn dual_channel(c: &ChannelRep) -> ChannelRep {
    c.dual()
}

/// Complementary channel of a quantum-limited attenuator or amplifier. The environment
/// output keeps `dim_in` levels for the attenuator (exact) and `dim_out` for the amplifier.
pub fn complementary_ql(c: &ChannelRep, cfg: &GlobalConfig) -> Result<ChannelRep> {
    let cut = c.cutoffs();
    let env = match c.kind() {
        ChannelKind::AttenuatorQl { .. } => cut.dim_in,
        _ => cut.dim_out,
    };
    let cutoffs = Cutoffs { dim_in: cut.dim_in, dim_out: env, guard: cut.guard, dim_env: Some(env) };
    ChannelRep::new(ChannelKind::Complementary { inner: Box::new(c.kind().clone()) }, cutoffs, cfg)
}

/// Heat semigroup `N_t` on a Gauss–Hermite grid of `order x order` displacements.
pub fn heat_semigroup(t: f64, order: usize, cutoffs: Cutoffs, cfg: &GlobalConfig) -> Result<ChannelRep> {
    ChannelRep::new(ChannelKind::HeatSemigroup { t, order }, cutoffs, cfg)
}

/// Fock-basis transpose on a single mode.
pub fn transpose_channel(dim: usize, cfg: &GlobalConfig) -> Result<ChannelRep> {
    ChannelRep::new(ChannelKind::Transpose, Cutoffs::square(dim), cfg)
}

/// `Tr_B[U rho_AB U^dagger]` with a beam splitter (`param <= 1`) or a squeezer (`param > 1`).
/// The beam-splitter output is exact at `dim_a + dim_b - 1` levels; for the squeezer the
/// output keeps `dim_out` levels (default `guard * (dim_a + dim_b)`).
pub fn apply_b(rho_ab: &DensityMatrix, param: f64, dim_out: Option<usize>, cfg: &GlobalConfig) -> Result<Truncated<DensityMatrix>> {
    let dims = rho_ab.space().mode_dims();
    let [da, db] = dims else {
        return Err(Error::Shape(format!("expected a two-mode state, got {dims:?}")));
    };
    let (kind, default_out) = if param <= 1.0 {
        (ChannelKind::BeamSplitterReduce { lambda: param }, da + db - 1)
    } else {
        (ChannelKind::SqueezerReduce { kappa: param }, cfg.guard_factor * (da + db))
    };
    let cutoffs = Cutoffs::new(*da, dim_out.unwrap_or(default_out)).with_env(*db).with_guard(cfg.guard_factor);
    ChannelRep::new(kind, cutoffs, cfg)?.apply(rho_ab, cfg)
}

#[cfg(test)]
mod tests;
