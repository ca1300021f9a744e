//! Gaussian channel parameters and closed forms on thermal inputs.

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, ChannelRep, Cutoffs, ThermalKind};
use crate::config::GlobalConfig;
use crate::error::{Error, Result};
use crate::spectra::g;

/// Attenuator `E_{lambda,E}` or amplifier `A_{kappa,E}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianChannel {
    pub kind: ThermalKind,
    pub param: f64,
    pub energy: f64,
}

impl GaussianChannel {
    pub fn attenuator(lambda: f64, energy: f64) -> Self {
        Self { kind: ThermalKind::Attenuator, param: lambda, energy }
    }

    pub fn amplifier(kappa: f64, energy: f64) -> Self {
        Self { kind: ThermalKind::Amplifier, param: kappa, energy }
    }

    pub fn is_quantum_limited(&self) -> bool {
        self.energy == 0.0
    }

    pub fn channel_kind(&self) -> ChannelKind {
        match (self.kind, self.is_quantum_limited()) {
            (ThermalKind::Attenuator, true) => ChannelKind::AttenuatorQl { lambda: self.param },
            (ThermalKind::Amplifier, true) => ChannelKind::AmplifierQl { kappa: self.param },
            (ThermalKind::Attenuator, false) => ChannelKind::AttenuatorThermal { lambda: self.param, energy: self.energy },
            (ThermalKind::Amplifier, false) => ChannelKind::AmplifierThermal { kappa: self.param, energy: self.energy },
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.channel_kind().validate()
    }

    /// Mean photon number of the output on a thermal input of mean `e_in`.
    pub fn output_energy(&self, e_in: f64) -> f64 {
        mixer_output_energy(self.mixing_param(), e_in, self.energy)
    }

    fn mixing_param(&self) -> f64 {
        match self.kind {
            ThermalKind::Attenuator => self.param.min(1.0),
            ThermalKind::Amplifier => self.param.max(1.0),
        }
    }

    /// `S(Phi(omega(E')))`.
    pub fn thermal_output_entropy(&self, e_in: f64) -> f64 {
        g(self.output_energy(e_in))
    }

    /// Kraus representation on `dim_in` levels with the smallest output cutoff whose
    /// worst-case trace defect is below `leakage_target`.
    pub fn build(&self, dim_in: usize, leakage_target: f64, cfg: &GlobalConfig) -> Result<ChannelRep> {
        self.validate()?;
        if matches!(self.channel_kind(), ChannelKind::AttenuatorQl { .. }) {
            return ChannelRep::new(self.channel_kind(), Cutoffs::square(dim_in), cfg);
        }
        let auto = cfg.with_leakage_max(leakage_target);
        ChannelRep::with_auto_output(self.channel_kind(), Cutoffs::square(dim_in).with_guard(cfg.guard_factor), &auto)
    }
}

/// Output energy of a beam splitter (`param <= 1`) or squeezer (`param > 1`) on thermal
/// inputs of means `e_a` (transmitted mode) and `e_b`.
pub fn mixer_output_energy(param: f64, e_a: f64, e_b: f64) -> f64 {
    if param <= 1.0 {
        param * e_a + (1.0 - param) * e_b
    } else {
        param * e_a + (param - 1.0) * (e_b + 1.0)
    }
}

/// `ln ||omega(E)||_p` in closed form; `p = inf` gives `-ln(1+E)`.
pub fn ln_thermal_norm(energy: f64, p: f64) -> f64 {
    if energy <= 0.0 || p == 1.0 {
        return 0.0;
    }
    let head = -energy.ln_1p();
    if p.is_infinite() {
        return head;
    }
    // 1 - x^p with x = E/(E+1)
    let ln_x = -(1.0 / energy).ln_1p();
    head - (-(p * ln_x).exp_m1()).ln() / p
}

/// `d/dE ln ||omega(E)||_p`.
pub fn d_ln_thermal_norm(energy: f64, p: f64) -> f64 {
    if p == 1.0 {
        return 0.0;
    }
    let e1 = energy + 1.0;
    if p.is_infinite() || energy <= 0.0 {
        return -1.0 / e1;
    }
    let x = energy / e1;
    let ln_x = x.ln();
    let xp1 = ((p - 1.0) * ln_x).exp();
    -1.0 / e1 + xp1 / (e1 * e1 * (-(p * ln_x).exp_m1()))
}

/// Rényi entropy `S_p` of `omega(E)`, with `S_1` the von Neumann entropy.
pub fn thermal_renyi(energy: f64, p: f64) -> f64 {
    if p == 1.0 {
        return g(energy);
    }
    if p.is_infinite() {
        return -ln_thermal_norm(energy, p);
    }
    p / (1.0 - p) * ln_thermal_norm(energy, p)
}

/// Mean photon number `E'` such that `omega(E')^p / Tr omega(E')^p = omega(E)`, i.e. the
/// inverse of the map that raises the geometric ratio to the power `p`.
pub fn energy_of_power_normalized(target: f64, p: f64) -> f64 {
    if target <= 0.0 {
        return 0.0;
    }
    // ratio of the target is y = E/(E+1); the base ratio is y^(1/p)
    let ln_y = -(1.0 / target).ln_1p();
    let ln_x = ln_y / p;
    let x = ln_x.exp();
    x / -ln_x.exp_m1()
}

pub(crate) fn check_exponent(name: &str, p: f64) -> Result<()> {
    if !(p >= 1.0) {
        return Err(Error::Domain(format!("exponent {name} must be >= 1, got {p}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::thermal_weights;

    fn direct_norm(e: f64, p: f64) -> f64 {
        thermal_weights(e, 4000).iter().map(|w| w.powf(p)).sum::<f64>().powf(1.0 / p)
    }

    #[test]
    fn closed_norms_match_sums() {
        for &e in &[0.0, 0.3, 2.0, 7.5] {
            for &p in &[1.0, 1.5, 2.0, 4.0] {
                assert!((ln_thermal_norm(e, p) - direct_norm(e, p).ln()).abs() < 1e-12, "{e} {p}");
            }
            assert!((ln_thermal_norm(e, f64::INFINITY) + (1.0f64 + e).ln()).abs() < 1e-14);
        }
    }

    #[test]
    fn derivative_matches_difference() {
        let h = 1e-6;
        for &e in &[0.2, 1.0, 5.0] {
            for &p in &[1.5, 3.0] {
                let fd = (ln_thermal_norm(e + h, p) - ln_thermal_norm(e - h, p)) / (2.0 * h);
                assert!((fd - d_ln_thermal_norm(e, p)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn power_normalization_inverts() {
        for &e in &[0.1, 1.0, 4.0] {
            let p = 2.5;
            let base = energy_of_power_normalized(e, p);
            let x = base / (base + 1.0);
            let y = x.powf(p);
            assert!((y / (1.0 - y) - e).abs() < 1e-10 * e.max(1.0));
        }
    }

    #[test]
    fn output_energies() {
        assert_eq!(GaussianChannel::attenuator(0.5, 0.3).output_energy(1.0), 0.5 + 0.15);
        assert!((GaussianChannel::amplifier(1.5, 0.2).output_energy(1.0) - (1.5 + 0.5 * 1.2)).abs() < 1e-15);
    }
}
