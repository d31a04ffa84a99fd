use serde::{Deserialize, Serialize};

use crate::{Error, Limits, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tree,
    Diamond,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tree" => Ok(Mode::Tree),
            "diamond" => Ok(Mode::Diamond),
            _ => Err(Error::param(format!("unknown mode {s:?}"))),
        }
    }
}

/// Parameters of a certification run. `constant` is `C_U` in tree mode and
/// `C_D` in diamond mode.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifierConfig {
    pub mode: Mode,
    pub p: f64,
    pub constant: f64,
    /// Overrides the master constant `C`.
    pub master: Option<f64>,
    /// Overrides `gamma = 2 / (C K^p)`.
    pub gamma: Option<f64>,
    /// Runs the extraction pipeline even when the bound branch applies or the
    /// sizes are below the thresholds.
    pub force_pipeline: bool,
    pub limits: Limits,
}

impl CertifierConfig {
    pub fn tree(p: f64, c_u: f64) -> Self {
        CertifierConfig {
            mode: Mode::Tree,
            p,
            constant: c_u,
            master: None,
            gamma: None,
            force_pipeline: false,
            limits: Limits::default(),
        }
    }

    pub fn diamond(p: f64, c_d: f64) -> Self {
        CertifierConfig {
            mode: Mode::Diamond,
            ..Self::tree(p, c_d)
        }
    }

    pub fn forced(mut self) -> Self {
        self.force_pipeline = true;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0 && self.p.is_finite()) {
            return Err(Error::param(format!("p must be finite and at least 1, got {}", self.p)));
        }
        if !(self.constant >= 1.0 && self.constant.is_finite()) {
            return Err(Error::param("the inequality constant must be at least 1"));
        }
        if let Some(c) = self.master {
            if !(c >= 1.0 && c.is_finite()) {
                return Err(Error::param("the master constant C must be at least 1"));
            }
        }
        if let Some(g) = self.gamma {
            if !(g > 0.0 && g.is_finite()) {
                return Err(Error::param("gamma must be positive"));
            }
        }
        Ok(())
    }

    /// `C = 14 (6 c)^p`, with `c` dropped when `c^p < 1 / (7 * 6^p)`.
    pub fn master_constant(&self) -> f64 {
        if let Some(c) = self.master {
            return c;
        }
        let p = self.p;
        if self.constant.powf(p) < 1.0 / (7.0 * 6f64.powf(p)) {
            14.0 * 6f64.powf(p)
        } else {
            14.0 * (6.0 * self.constant).powf(p)
        }
    }

    /// `gamma = 2 / (C K^p)`; in tree mode with the default `C` this is
    /// `1 / (7 (6 C_U)^p K^p)`.
    pub fn gamma_for(&self, k: f64) -> f64 {
        self.gamma
            .unwrap_or_else(|| 2.0 / (self.master_constant() * k.powf(self.p)))
    }

    /// Distance-bound threshold of the trivial branch: tree
    /// `(log2 h)^{1/p} / (56^{1/p} 6 C_U)`, diamond `(n / (4C))^{1/p}`.
    pub fn trivial_bound(&self, size: usize) -> f64 {
        let p = self.p;
        match self.mode {
            Mode::Tree => {
                (size as f64).log2().max(0.0).powf(1.0 / p) / (56f64.powf(1.0 / p) * 6.0 * self.constant)
            }
            Mode::Diamond => (size as f64 / (4.0 * self.master_constant())).powf(1.0 / p),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_constants() {
        let c = CertifierConfig::tree(2.0, 1.5);
        assert_eq!(c.master_constant(), 14.0 * 81.0);
        let g = c.gamma_for(2.0);
        assert!((g - 1.0 / (7.0 * 81.0 * 4.0)).abs() < 1e-15);
        let b = c.trivial_bound(16);
        assert!((b - 2.0 / (56f64.sqrt() * 9.0)).abs() < 1e-15);
        assert_eq!(c.trivial_bound(1), 0.0);
    }

    #[test]
    fn diamond_constants() {
        let c = CertifierConfig::diamond(1.0, 1.0);
        assert_eq!(c.master_constant(), 84.0);
        assert!((c.trivial_bound(3) - 3.0 / 336.0).abs() < 1e-15);
    }

    #[test]
    fn validation() {
        assert!(CertifierConfig::tree(0.5, 1.0).validate().is_err());
        assert!(CertifierConfig::tree(2.0, 0.5).validate().is_err());
        let mut c = CertifierConfig::tree(2.0, 1.0);
        c.gamma = Some(0.0);
        assert!(c.validate().is_err());
        assert!("diamond".parse::<Mode>().is_ok() && "x".parse::<Mode>().is_err());
    }
}
