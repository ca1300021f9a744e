use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical tolerances shared by every constructor and check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlobalConfig {
    pub tol_herm: f64,
    pub tol_psd: f64,
    pub tol_trace: f64,
    /// Largest trace or unitarity defect a truncated operation may introduce.
    pub leakage_max: f64,
    /// Internal cutoff multiplier for photon-number-raising operators.
    pub guard_factor: usize,
}

impl Default for GlobalConfig {
    fn default() -> Self {
        Self {
            tol_herm: 1e-10,
            tol_psd: 1e-10,
            tol_trace: 1e-10,
            leakage_max: 1e-6,
            guard_factor: 2,
        }
    }
}

impl GlobalConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [self.tol_herm, self.tol_psd, self.tol_trace, self.leakage_max];
        if tols.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(Error::Domain("all tolerances must be positive and finite".into()));
        }
        if self.leakage_max >= 1.0 {
            return Err(Error::Domain("leakage_max must be below 1".into()));
        }
        if self.guard_factor < 1 {
            return Err(Error::Domain("guard_factor must be at least 1".into()));
        }
        Ok(())
    }

    pub fn with_leakage_max(mut self, leakage_max: f64) -> Self {
        self.leakage_max = leakage_max;
        self
    }

    pub fn with_guard(mut self, guard_factor: usize) -> Self {
        self.guard_factor = guard_factor;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        GlobalConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let mut c = GlobalConfig::default();
        c.leakage_max = 1.0;
        assert!(c.validate().is_err());
        let mut c = GlobalConfig::default();
        c.tol_psd = 0.0;
        assert!(c.validate().is_err());
        assert!(GlobalConfig::default().with_guard(0).validate().is_err());
    }

    #[test]
    fn partial_json_fills_defaults() {
        let c: GlobalConfig = serde_json::from_str(r#"{"guard_factor": 3}"#).unwrap();
        assert_eq!(c.guard_factor, 3);
        assert_eq!(c.tol_herm, 1e-10);
    }
}
