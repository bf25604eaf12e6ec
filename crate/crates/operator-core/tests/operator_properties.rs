//! Property tests for the operator layer: structural identities that must
//! hold for every truncation and parameter set, not just the tuned examples.

use operator_core::{
    basis_state, build_cavity_ops, build_jc_hamiltonian, c64, dressed_by_index, excitation_number,
    partial_trace_atom, trace_distance, DensityMatrix, OperatorMatrix, SystemParams, C64,
};
use proptest::prelude::*;

fn frobenius(m: &ndarray::Array2<C64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncated_commutator_holds_for_all_truncations(n_max in 1usize..12) {
        let (a, a_dag) = build_cavity_ops(n_max).unwrap();
        let comm = a.mat.dot(&a_dag.mat) - a_dag.mat.dot(&a.mat);
        let cdim = n_max + 1;
        let mut expect = ndarray::Array2::eye(2 * cdim);
        for s in 0..2 {
            expect[[s * cdim + n_max, s * cdim + n_max]] = c64(-(n_max as f64), 0.0);
        }
        prop_assert!(frobenius(&(comm - expect)) < 1e-13);
    }

    #[test]
    fn hamiltonian_hermitian_for_any_params(
        g in 0.0..500.0f64,
        eps in 0.0..50.0f64,
        delta in -500.0..500.0f64,
        n_max in 1usize..10,
    ) {
        let p = SystemParams::new(g, 1.0, 2.0, eps, delta, n_max).unwrap();
        let h = build_jc_hamiltonian(&p);
        prop_assert!(h.is_hermitian(1e-12 * (1.0 + frobenius(&h.mat))));
    }

    #[test]
    fn excitation_number_conserved_without_drive(
        g in 0.0..500.0f64,
        delta in -500.0..500.0f64,
        n_max in 1usize..10,
    ) {
        let p = SystemParams::new(g, 1.0, 2.0, 0.0, delta, n_max).unwrap();
        let h = build_jc_hamiltonian(&p);
        let nx = excitation_number(n_max);
        let comm = h.mat.dot(&nx.mat) - nx.mat.dot(&h.mat);
        prop_assert!(frobenius(&comm) < 1e-12 * (1.0 + frobenius(&h.mat)));
    }

    #[test]
    fn dressed_ladder_is_orthonormal(n_max in 1usize..12) {
        let states: Vec<_> = (0..=2 * n_max)
            .map(|k| dressed_by_index(k, n_max).unwrap())
            .collect();
        for (i, xi) in states.iter().enumerate() {
            prop_assert!((xi.norm() - 1.0).abs() < 1e-12);
            for xj in &states[i + 1..] {
                prop_assert!(xi.braket(xj).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_is_trace_preserving_and_positive(
        n_max in 1usize..8,
        k1 in 0usize..16,
        k2 in 0usize..16,
        w in 0.0..1.0f64,
    ) {
        let k1 = k1 % (2 * n_max + 1);
        let k2 = k2 % (2 * n_max + 1);
        let rho_a = dressed_by_index(k1, n_max).unwrap().outer();
        let rho_b = dressed_by_index(k2, n_max).unwrap().outer();
        let mixed = DensityMatrix::new(
            &rho_a.mat * c64(w, 0.0) + &rho_b.mat * c64(1.0 - w, 0.0),
        );
        let reduced = partial_trace_atom(&mixed).unwrap();
        prop_assert!((reduced.trace().re - mixed.trace().re).abs() < 1e-12);
        prop_assert!(reduced.validate().is_ok());
    }

    #[test]
    fn trace_distance_metric_properties(
        n_max in 1usize..6,
        k1 in 0usize..12,
        k2 in 0usize..12,
    ) {
        let k1 = k1 % (2 * n_max + 1);
        let k2 = k2 % (2 * n_max + 1);
        let rho1 = dressed_by_index(k1, n_max).unwrap().outer();
        let rho2 = dressed_by_index(k2, n_max).unwrap().outer();
        let d12 = trace_distance(&rho1, &rho2);
        let d21 = trace_distance(&rho2, &rho1);
        prop_assert!((d12 - d21).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&d12));
        if k1 == k2 {
            prop_assert!(d12 < 1e-12);
        }
    }
}

#[test]
fn dressed_splitting_tracks_coupling() {
    // energies scale linearly in g, so ratios between rungs are sqrt(n) exact
    for g in [0.5, 7.0, 950.0] {
        let p = SystemParams::new(g, 1.0, 2.0, 0.0, 0.0, 5).unwrap();
        let h = build_jc_hamiltonian(&p);
        for n in 1..=5usize {
            let low = dressed_by_index(2 * n - 1, 5).unwrap();
            let e = low.expect(&h).re;
            assert!((e + g * (n as f64).sqrt()).abs() < 1e-9 * (1.0 + g));
        }
    }
}

#[test]
fn operator_matrix_apply_matches_matmul() {
    let (a, _) = build_cavity_ops(4).unwrap();
    let psi = basis_state(true, 3, 4);
    let direct = a.mat.dot(&psi.amps);
    let via = a.apply(&psi);
    assert_eq!(direct, via.amps);
    assert_eq!(a.dim(), 10);
    assert_eq!(OperatorMatrix::eye(10).apply(&psi).amps, psi.amps);
}
