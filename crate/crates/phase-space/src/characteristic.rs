//! Symmetrically ordered characteristic function of the cavity state and the
//! direct Fourier route from it back to the quasiprobability.

use std::f64::consts::PI;

use operator_core::{c64, C64, DensityMatrix};

use crate::kernel::{displacement, trace_product};

/// `tr[rho exp(i (mu + i nu) a^+ + i (mu - i nu) a)]`.
///
/// The exponent is `beta a^+ - beta* a` with `beta = -nu + i mu`, so this is
/// a displacement expectation and inherits the exactness of the Fock-basis
/// elements. The argument pair is a coordinate choice, unrelated to any
/// oscillation frequency elsewhere in the workspace.
pub fn characteristic_function(rho: &DensityMatrix, mu: f64, nu: f64) -> C64 {
    let d = displacement(c64(-nu, mu), rho.dim());
    trace_product(&rho.mat, &d)
}

/// Slow oracle for the quasiprobability: trapezoid quadrature of
///
/// `W(x, y) = (1 / pi^2) integral chi_S(mu, nu) exp(-2 i (x mu + y nu))`
///
/// over `[-half_width, half_width]^2` with `n + 1` points per axis. The
/// integrand decays like a Gaussian, so modest windows converge fast; the
/// displaced-parity path should agree within the quadrature error.
pub fn wigner_via_transform(
    rho: &DensityMatrix,
    x: f64,
    y: f64,
    half_width: f64,
    n: usize,
) -> f64 {
    let h = 2.0 * half_width / n as f64;
    let mut acc = c64(0.0, 0.0);
    for i in 0..=n {
        let mu = -half_width + i as f64 * h;
        let wi = if i == 0 || i == n { 0.5 } else { 1.0 };
        for j in 0..=n {
            let nu = -half_width + j as f64 * h;
            let wj = if j == 0 || j == n { 0.5 } else { 1.0 };
            let phase = C64::from_polar(1.0, -2.0 * (x * mu + y * nu));
            acc += characteristic_function(rho, mu, nu) * phase * (wi * wj);
        }
    }
    (acc * h * h).re / (PI * PI)
}
