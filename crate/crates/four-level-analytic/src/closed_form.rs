//! Closed-form intensity cross-correlations of the four-state model.
//!
//! `g2_ab_analytic` is the forward/side photon cross-correlation at the
//! two-photon peak. It is manifestly time-asymmetric: the two branches share
//! the envelope rates gamma and 2*gamma and the frequencies 2*Omega and nu,
//! but carry different weights, because detecting a cavity photon first and
//! an atomic one second probes a different conditioned path than the reverse
//! order. `g2_ab_resonant` is the corresponding weak-drive result directly on
//! atomic resonance, where a single vacuum Rabi oscillation dominates and the
//! asymmetry reduces to an odd sin(g*tau) term.

use crate::params::FourLevelParams;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FourLevelError {
    /// The cross-correlation divides by Omega; an undriven model has no
    /// two-photon cycle to correlate.
    #[error("effective coupling Omega = 0: cross-correlation is undefined without a drive")]
    SingularOmega,
}

/// Time-asymmetric cross-correlation between a forward (cavity) and a side
/// (atomic) emission, as a function of the signed delay from the forward
/// click to the side click.
///
/// Both branches evaluate to 8/15 + (2/15)(gamma/Omega)^2 at tau = 0 and
/// relax to 1 for |tau| -> infinity.
pub fn g2_ab_analytic(fp: &FourLevelParams, tau: f64) -> Result<f64, FourLevelError> {
    if fp.omega == 0.0 {
        return Err(FourLevelError::SingularOmega);
    }
    let g_over_o = fp.gamma / fp.omega;
    let at = tau.abs();
    let slow = (-fp.gamma * at).exp();
    let ring = 2.0 * fp.omega * at;
    // The beat phase is written with signed tau in both branches; cos is even
    // so only the sign conventions of the sin terms matter.
    let beat = (fp.nu * tau).cos();

    let value = if tau >= 0.0 {
        1.0 + (-2.0 * fp.gamma * at).exp() / 15.0
            - 7.0 / 15.0 * g_over_o * slow * ring.sin()
            + (3.0 * g_over_o * g_over_o - 4.0) / 15.0 * slow * ring.cos()
            - (g_over_o * g_over_o + 4.0) / 15.0 * slow * beat
    } else {
        1.0 + (-2.0 * fp.gamma * at).exp() / 15.0
            - 7.0 / 15.0 * g_over_o * slow * ring.sin()
            + (g_over_o * g_over_o - 12.0) / 15.0 * slow * ring.cos()
            + (g_over_o * g_over_o + 4.0) / 15.0 * slow * beat
    };
    Ok(value)
}

/// Zero-delay value shared by both branches, 8/15 + (2/15)(gamma/Omega)^2.
pub fn g2_ab_zero_delay(fp: &FourLevelParams) -> Result<f64, FourLevelError> {
    if fp.omega == 0.0 {
        return Err(FourLevelError::SingularOmega);
    }
    let r = fp.gamma / fp.omega;
    Ok(8.0 / 15.0 + 2.0 / 15.0 * r * r)
}

/// Both published forms of the resonant weak-drive cross-correlation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonantCross {
    /// Full bracket: {1 + e^(-gamma|tau|/2)[cos(g tau)
    /// - (2g/gamma - (gamma/2g) sgn(tau)) sin(g tau)]}^2.
    pub full: f64,
    /// Dominant-term approximation [1 - e^(-gamma|tau|/2)(2g/gamma) sin(g tau)]^2,
    /// valid for g >> gamma where the odd high-amplitude term swamps the rest.
    pub approximate: f64,
}

/// Cross-correlation for resonant weak driving, exposing the full bracketed
/// form alongside its large-g/gamma approximation.
///
/// The oscillation envelope peaks at (2g/gamma)^2 near zero delay and the
/// function dips to zero close to tau = m*pi/g.
pub fn g2_ab_resonant(g: f64, gamma: f64, tau: f64) -> ResonantCross {
    let env = (-gamma * tau.abs() / 2.0).exp();
    let (s, c) = (g * tau).sin_cos();
    // signum(0.0) is +1 in IEEE terms; the odd correction must vanish at 0.
    let sgn = if tau == 0.0 { 0.0 } else { tau.signum() };
    let amp = 2.0 * g / gamma;
    let full_bracket = 1.0 + env * (c - (amp - gamma / (2.0 * g) * sgn) * s);
    let approx_bracket = 1.0 - env * amp * s;
    ResonantCross {
        full: full_bracket * full_bracket,
        approximate: approx_bracket * approx_bracket,
    }
}
