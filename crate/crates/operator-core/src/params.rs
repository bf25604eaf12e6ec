//! Scenario parameters: the single source of truth for one physical setup.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("rate `{name}` must be nonnegative, got {value}")]
    NegativeRate { name: &'static str, value: f64 },
    #[error("Fock truncation n_max must be at least 1, got {n_max}")]
    InvalidTruncation { n_max: usize },
    #[error("impedance-matched flag set but gamma = {gamma} != 2*kappa = {two_kappa}")]
    ImpedanceMismatch { gamma: f64, two_kappa: f64 },
}

/// Physical rates, drive, detuning, and Fock truncation for one scenario.
///
/// All rates are raw angular frequencies (rad/time); the CLI layer converts
/// from kappa-relative ratios before constructing this. `delta_omega_d` is
/// signed: the tuned multiphoton operating points sit at positive detuning,
/// where the steady quadrature mean at theta = pi/4 comes out positive.
/// Flipping the sign mirrors the steady field phase and leaves photon
/// statistics unchanged.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Atom-cavity coupling rate g.
    pub g: f64,
    /// Cavity field half-width kappa.
    pub kappa: f64,
    /// Atomic spontaneous-emission rate gamma.
    pub gamma: f64,
    /// Coherent drive amplitude eps_d.
    pub eps_d: f64,
    /// Drive detuning from the bare resonance, omega_d - omega_0.
    pub delta_omega_d: f64,
    /// Fock-space truncation: cavity levels 0..=n_max are kept.
    pub n_max: usize,
    /// Marks scenarios that promise gamma = 2*kappa exactly.
    pub impedance_matched: bool,
}

impl SystemParams {
    pub fn new(
        g: f64,
        kappa: f64,
        gamma: f64,
        eps_d: f64,
        delta_omega_d: f64,
        n_max: usize,
    ) -> Result<Self, ParamError> {
        let p = Self {
            g,
            kappa,
            gamma,
            eps_d,
            delta_omega_d,
            n_max,
            impedance_matched: false,
        };
        p.validate()?;
        Ok(p)
    }

    /// Constructor for the gamma = 2*kappa operating regime; sets the flag and
    /// fills gamma so the equality holds exactly.
    pub fn impedance_matched(
        g: f64,
        kappa: f64,
        eps_d: f64,
        delta_omega_d: f64,
        n_max: usize,
    ) -> Result<Self, ParamError> {
        let p = Self {
            g,
            kappa,
            gamma: 2.0 * kappa,
            eps_d,
            delta_omega_d,
            n_max,
            impedance_matched: true,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        for (name, value) in [
            ("g", self.g),
            ("kappa", self.kappa),
            ("gamma", self.gamma),
            ("eps_d", self.eps_d),
        ] {
            if !(value >= 0.0) || !value.is_finite() {
                return Err(ParamError::NegativeRate { name, value });
            }
        }
        if self.n_max < 1 {
            return Err(ParamError::InvalidTruncation { n_max: self.n_max });
        }
        if self.impedance_matched && self.gamma != 2.0 * self.kappa {
            return Err(ParamError::ImpedanceMismatch {
                gamma: self.gamma,
                two_kappa: 2.0 * self.kappa,
            });
        }
        Ok(())
    }

    /// Cavity-space dimension, n_max + 1.
    pub fn cavity_dim(&self) -> usize {
        self.n_max + 1
    }

    /// Composite-space dimension, 2 * (n_max + 1).
    pub fn dim(&self) -> usize {
        2 * (self.n_max + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_physical_params() {
        let p = SystemParams::new(200.0, 1.0, 2.0, 16.0, -143.2, 14).unwrap();
        assert_eq!(p.dim(), 30);
        assert_eq!(p.cavity_dim(), 15);
    }

    #[test]
    fn rejects_negative_rates() {
        let err = SystemParams::new(-1.0, 1.0, 2.0, 0.0, 0.0, 14).unwrap_err();
        assert!(matches!(err, ParamError::NegativeRate { name: "g", .. }));
        let err = SystemParams::new(1.0, 1.0, f64::NAN, 0.0, 0.0, 14).unwrap_err();
        assert!(matches!(err, ParamError::NegativeRate { name: "gamma", .. }));
    }

    #[test]
    fn rejects_zero_truncation() {
        let err = SystemParams::new(1.0, 1.0, 2.0, 0.0, 0.0, 0).unwrap_err();
        assert_eq!(err, ParamError::InvalidTruncation { n_max: 0 });
    }

    #[test]
    fn impedance_matching_is_exact() {
        let p = SystemParams::impedance_matched(200.0, 0.7, 16.0, -143.2, 14).unwrap();
        assert_eq!(p.gamma, 1.4);
        assert!(p.impedance_matched);

        let mut broken = p;
        broken.gamma = 1.4000001;
        assert!(matches!(
            broken.validate(),
            Err(ParamError::ImpedanceMismatch { .. })
        ));
    }

    #[test]
    fn negative_detuning_allowed() {
        assert!(SystemParams::new(1.0, 1.0, 2.0, 0.0, -5.0, 3).is_ok());
    }
}
