//! The four-level model as a concrete Lindblad generator on a 4-dim space.
//!
//! This is the numerical counterpart of the closed forms: project the photon
//! and atom lowering operators onto the resonant manifold, keep the shifted
//! level energies and the two-photon coupling, and build the 16x16 generator.
//! Integrating it independently cross-checks every coefficient of the
//! analytic cross-correlation, and it also retains the couplet coherences
//! that the secular closed forms drop.
//!
//! Basis ordering: |0> ground, |1> the closer intermediate state (larger
//! photon matrix element, shifted energy near -g(1-1/sqrt2)), |2> the farther
//! intermediate state (near +g(1+1/sqrt2)), |3> the two-photon target state,
//! degenerate with the ground state in the frame of the corrected drive.

use crate::params::{effective_params, FourLevelParams, ModelWarning};
use ndarray::Array2;
use operator_core::superop::{dissipator, spost, spre};
use operator_core::{c64, C64, SystemParams};
use std::f64::consts::SQRT_2;

use crate::conditioned::DIM4;

/// Effective model with its generator and the projected channel operators.
#[derive(Debug, Clone)]
pub struct FourLevelGenerator {
    pub params: FourLevelParams,
    /// 4x4 effective Hamiltonian in the drive frame on resonance.
    pub hamiltonian: Array2<C64>,
    /// Projected photon lowering operator; cavity emission rate is
    /// 2*kappa*<a4' a4>.
    pub photon_op: Array2<C64>,
    /// Projected atomic lowering operator; side emission rate is
    /// gamma*<s4' s4>.
    pub atom_op: Array2<C64>,
    /// 16x16 Lindblad generator acting on column-stacked density matrices.
    pub matrix: Array2<C64>,
    pub kappa: f64,
    pub gamma_atom: f64,
}

/// Photon lowering operator projected on the four-level basis.
pub fn projected_photon_op() -> Array2<C64> {
    let mut a4 = Array2::zeros((DIM4, DIM4));
    a4[[0, 1]] = c64(1.0 / SQRT_2, 0.0);
    a4[[0, 2]] = c64(1.0 / SQRT_2, 0.0);
    a4[[1, 3]] = c64((SQRT_2 + 1.0) / 2.0, 0.0);
    a4[[2, 3]] = c64((SQRT_2 - 1.0) / 2.0, 0.0);
    a4
}

/// Atom lowering operator projected on the four-level basis. The relative
/// signs follow from the symmetric/antisymmetric structure of the couplet.
pub fn projected_atom_op() -> Array2<C64> {
    let mut s4 = Array2::zeros((DIM4, DIM4));
    s4[[0, 1]] = c64(-1.0 / SQRT_2, 0.0);
    s4[[0, 2]] = c64(1.0 / SQRT_2, 0.0);
    s4[[1, 3]] = c64(-0.5, 0.0);
    s4[[2, 3]] = c64(-0.5, 0.0);
    s4
}

/// Photon number operator within the manifold: populations weighted
/// 0, 1/2, 1/2, 3/2, plus a 1/2 cross term between the two intermediate
/// states. The cross term is what makes photon counting sensitive to the
/// couplet coherence, i.e. to the quantum beat.
pub fn manifold_photon_number() -> Array2<C64> {
    let a4 = projected_photon_op();
    let a4_dag = a4.t().mapv(|v| v.conj());
    a4_dag.dot(&a4)
}

/// Atomic excitation within the manifold: populations weighted
/// 0, 1/2, 1/2, 1/2, with a -1/2 cross term between the intermediates
/// (opposite in sign to the photon one, so the two detection channels read
/// the beat with opposite phase).
pub fn manifold_atom_excitation() -> Array2<C64> {
    let s4 = projected_atom_op();
    let s4_dag = s4.t().mapv(|v| v.conj());
    s4_dag.dot(&s4)
}

/// Build the effective generator for the given full-system parameters,
/// pinned to the corrected two-photon resonance regardless of the detuning
/// stored in `p` (the reduction only makes sense on resonance).
pub fn build_generator(p: &SystemParams) -> (FourLevelGenerator, Vec<ModelWarning>) {
    let (fp, warnings) = effective_params(p);

    let mut h = Array2::zeros((DIM4, DIM4));
    // Ground and target are degenerate at zero by the resonance condition;
    // the intermediates keep their shifted detunings.
    h[[1, 1]] = c64(-p.g * (1.0 - 1.0 / SQRT_2) + fp.delta1, 0.0);
    h[[2, 2]] = c64(p.g * (1.0 + 1.0 / SQRT_2) + fp.delta2, 0.0);
    h[[0, 3]] = c64(fp.omega, 0.0);
    h[[3, 0]] = c64(fp.omega, 0.0);

    let a4 = projected_photon_op();
    let s4 = projected_atom_op();

    let mut matrix = (spre(&h) - spost(&h)).mapv(|v| v * c64(0.0, -1.0));
    matrix = matrix + dissipator(&a4).mapv(|v| v * p.kappa) + dissipator(&s4).mapv(|v| v * (p.gamma / 2.0));

    (
        FourLevelGenerator {
            params: fp,
            hamiltonian: h,
            photon_op: a4,
            atom_op: s4,
            matrix,
            kappa: p.kappa,
            gamma_atom: p.gamma,
        },
        warnings,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use ndarray::Array1;

    fn point(eps_over_g: f64) -> SystemParams {
        let g = 200.0;
        SystemParams::new(g, 1.0, 2.0, eps_over_g * g, 0.0, 14).unwrap()
    }

    #[test]
    fn generator_annihilates_the_trace() {
        let (gen, _) = build_generator(&point(0.08));
        // Row vector of the trace functional: picks entries (i,i) of vec(rho).
        let mut worst = 0.0f64;
        for col in 0..DIM4 * DIM4 {
            let mut s = c64(0.0, 0.0);
            for i in 0..DIM4 {
                s += gen.matrix[[i * DIM4 + i, col]];
            }
            worst = worst.max(s.norm());
        }
        assert!(worst < 1e-12, "trace leakage {worst}");
    }

    #[test]
    fn cascade_rates_appear_in_the_population_drains() {
        let (gen, _) = build_generator(&point(0.08));
        let fp = &gen.params;
        // Population flow out of the target state: diagonal element of L for
        // the (3,3) component is -(gamma31 + gamma32).
        let idx33 = 3 * DIM4 + 3;
        assert_relative_eq!(
            gen.matrix[[idx33, idx33]].re,
            -(fp.gamma31 + fp.gamma32),
            epsilon = 1e-12
        );
        // Feeding of each intermediate population from the target state.
        let idx11 = DIM4 + 1;
        let idx22 = 2 * DIM4 + 2;
        assert_relative_eq!(gen.matrix[[idx11, idx33]].re, fp.gamma31, epsilon = 1e-12);
        assert_relative_eq!(gen.matrix[[idx22, idx33]].re, fp.gamma32, epsilon = 1e-12);
        // Intermediate states drain to ground at the common rate.
        assert_relative_eq!(gen.matrix[[idx11, idx11]].re, -fp.gamma, epsilon = 1e-12);
        assert_relative_eq!(gen.matrix[[idx22, idx22]].re, -fp.gamma, epsilon = 1e-12);
    }

    #[test]
    fn manifold_observables_have_the_expected_structure() {
        let n4 = manifold_photon_number();
        let s4 = manifold_atom_excitation();
        let n_diag = [0.0, 0.5, 0.5, 1.5];
        let s_diag = [0.0, 0.5, 0.5, 0.5];
        for i in 0..DIM4 {
            assert_relative_eq!(n4[[i, i]].re, n_diag[i], epsilon = 1e-14);
            assert_relative_eq!(s4[[i, i]].re, s_diag[i], epsilon = 1e-14);
        }
        // The only off-diagonal entries link the two intermediate states,
        // with opposite signs for the two channels.
        assert_relative_eq!(n4[[1, 2]].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(n4[[2, 1]].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(s4[[1, 2]].re, -0.5, epsilon = 1e-14);
        assert_relative_eq!(s4[[2, 1]].re, -0.5, epsilon = 1e-14);
        for (i, j) in [(0, 1), (0, 2), (0, 3), (1, 3), (2, 3)] {
            assert!(n4[[i, j]].norm() < 1e-14);
            assert!(n4[[j, i]].norm() < 1e-14);
            assert!(s4[[i, j]].norm() < 1e-14);
            assert!(s4[[j, i]].norm() < 1e-14);
        }
    }

    #[test]
    fn rate_equation_balance_holds_for_populations() {
        // Feed the generator a diagonal state and read back the rate
        // equations of the cascade.
        let (gen, _) = build_generator(&point(0.08));
        let fp = &gen.params;
        let pops = [0.4, 0.2, 0.1, 0.3];
        let mut v: Array1<C64> = Array1::zeros(DIM4 * DIM4);
        for i in 0..DIM4 {
            v[i * DIM4 + i] = c64(pops[i], 0.0);
        }
        let dv = gen.matrix.dot(&v);
        // Ground gains what both intermediates lose; coherent terms vanish on
        // diagonal input.
        assert_relative_eq!(
            dv[0].re,
            fp.gamma * (pops[1] + pops[2]),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            dv[3 * DIM4 + 3].re,
            -(fp.gamma31 + fp.gamma32) * pops[3],
            epsilon = 1e-12
        );
    }

    #[test]
    fn beat_splitting_matches_nu() {
        let (gen, _) = build_generator(&point(0.08));
        let split = gen.hamiltonian[[2, 2]].re - gen.hamiltonian[[1, 1]].re;
        assert_relative_eq!(split, gen.params.nu, epsilon = 1e-10);
    }
}
