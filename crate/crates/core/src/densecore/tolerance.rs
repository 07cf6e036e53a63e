use crate::error::{Error, Result};

/// Numerical tolerances shared by every module.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Relative singular-value cutoff; the absolute threshold is
    /// `rank_rel_tol · max(rows, cols) · σ_max`.
    pub rank_rel_tol: f64,
    /// Scale factor for the Penrose-condition residual test.
    pub penrose_tol: f64,
    /// Acceptance band for range membership and orthogonality checks.
    pub subspace_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            rank_rel_tol: 1e-10,
            penrose_tol: 1e-8,
            subspace_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn new(rank_rel_tol: f64, penrose_tol: f64, subspace_tol: f64) -> Result<Self> {
        let cfg = ToleranceConfig {
            rank_rel_tol,
            penrose_tol,
            subspace_tol,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("rank_rel_tol", self.rank_rel_tol),
            ("penrose_tol", self.penrose_tol),
            ("subspace_tol", self.subspace_tol),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(Error::Tolerance { name, value });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let d = ToleranceConfig::default();
        assert!(d.validate().is_ok());
        assert_eq!(d.rank_rel_tol, 1e-10);
        assert_eq!(d.penrose_tol, 1e-8);
        assert_eq!(d.subspace_tol, 1e-8);
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(ToleranceConfig::new(0.0, 1e-8, 1e-8).is_err());
        assert!(ToleranceConfig::new(1e-10, 1.0, 1e-8).is_err());
        assert!(ToleranceConfig::new(1e-10, 1e-8, f64::NAN).is_err());
        assert!(ToleranceConfig::new(1e-10, 1e-8, -1e-3).is_err());
    }
}
