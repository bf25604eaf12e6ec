//! States of the four-level model conditioned on a first photon emission.
//!
//! A click projects the steady state down the ladder: part of the weight lands
//! in the ground state (from de-exciting an intermediate level) and part lands
//! in a fixed superposition of the two intermediate states (from de-exciting
//! the target level). The interference of that superposition's two components,
//! split by nu, is the quantum beat seen in the cross-correlations.

use ndarray::Array2;
use operator_core::{c64, C64, DensityMatrix, StateVector};

/// Basis size of the reduced model.
pub const DIM4: usize = 4;

/// The intermediate-couplet superposition prepared by de-exciting the target
/// state: sqrt(2/3) [ (sqrt2+1)/2 |xi1> + (sqrt2-1)/2 |xi2> ].
pub fn quantum_beat_superposition() -> StateVector {
    let root = std::f64::consts::SQRT_2;
    let scale = (2.0f64 / 3.0).sqrt();
    let mut amps = ndarray::Array1::zeros(DIM4);
    amps[1] = c64(scale * (root + 1.0) / 2.0, 0.0);
    amps[2] = c64(scale * (root - 1.0) / 2.0, 0.0);
    StateVector { amps }
}

fn ground_projector() -> Array2<C64> {
    let mut m = Array2::zeros((DIM4, DIM4));
    m[[0, 0]] = c64(1.0, 0.0);
    m
}

/// States conditioned on the first photon emission: forward (cavity) click
/// first, then side (atomic) click.
///
/// Forward: (2/5)|xi0><xi0| + (3/5)|psi><psi|; side: (2/3)|xi0><xi0| +
/// (1/3)|psi><psi|, with |psi> the quantum-beat superposition. The resulting
/// population contrasts are Sigma(0) = -2/5 and -2/3 respectively.
pub fn conditioned_states() -> (DensityMatrix, DensityMatrix) {
    let psi = quantum_beat_superposition();
    let beat = psi.outer();
    let ground = ground_projector();

    let mix = |w_ground: f64, w_beat: f64| -> DensityMatrix {
        let mat = ground.mapv(|v| v * w_ground) + beat.mat.mapv(|v| v * w_beat);
        DensityMatrix { mat }
    };

    (mix(2.0 / 5.0, 3.0 / 5.0), mix(2.0 / 3.0, 1.0 / 3.0))
}

/// Population contrast Sigma = rho_33 - rho_00 between target and ground
/// state, the quantity whose relaxation drives the slow part of the
/// cross-correlations.
pub fn population_contrast(rho: &DensityMatrix) -> f64 {
    (rho.mat[[3, 3]] - rho.mat[[0, 0]]).re
}
