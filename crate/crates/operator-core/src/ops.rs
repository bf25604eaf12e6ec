//! Canonical operators on the truncated composite space.

use ndarray::{linalg::kron, Array2};

use crate::{c64, params::ParamError, states::StateVector, SystemParams, C64};

/// Dense complex operator on the composite atom-cavity space.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub mat: Array2<C64>,
}

impl OperatorMatrix {
    pub fn new(mat: Array2<C64>) -> Self {
        assert!(
            mat.is_square(),
            "OperatorMatrix::new: matrix must be square, got {:?}",
            mat.shape()
        );
        Self { mat }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: Array2::zeros((dim, dim)),
        }
    }

    pub fn eye(dim: usize) -> Self {
        Self {
            mat: Array2::eye(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self {
            mat: self.mat.t().mapv(|z| z.conj()),
        }
    }

    pub fn apply(&self, psi: &StateVector) -> StateVector {
        StateVector {
            amps: self.mat.dot(&psi.amps),
        }
    }

    /// Frobenius norm of `self - other`; handy for operator-identity tests.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.distance(&self.dagger()) <= tol
    }
}

/// Lowering operator on the cavity space alone: `a|n> = sqrt(n)|n-1>`.
pub fn cavity_annihilator(n_max: usize) -> Array2<C64> {
    let cdim = n_max + 1;
    let mut a = Array2::zeros((cdim, cdim));
    for n in 1..cdim {
        a[[n - 1, n]] = c64((n as f64).sqrt(), 0.0);
    }
    a
}

/// Cavity lowering and raising operators lifted to the composite space.
pub fn build_cavity_ops(n_max: usize) -> Result<(OperatorMatrix, OperatorMatrix), ParamError> {
    if n_max < 1 {
        return Err(ParamError::InvalidTruncation { n_max });
    }
    let a = OperatorMatrix::new(kron(&Array2::eye(2), &cavity_annihilator(n_max)));
    let a_dag = a.dagger();
    Ok((a, a_dag))
}

/// Atomic lowering operator `sigma_- = |-><+|` on the composite space.
pub fn sigma_minus(n_max: usize) -> OperatorMatrix {
    let mut sm = Array2::zeros((2, 2));
    sm[[0, 1]] = c64(1.0, 0.0);
    OperatorMatrix::new(kron(&sm, &Array2::eye(n_max + 1)))
}

pub fn sigma_plus(n_max: usize) -> OperatorMatrix {
    sigma_minus(n_max).dagger()
}

/// Photon-number operator `a^+ a` on the composite space.
pub fn number_op(n_max: usize) -> OperatorMatrix {
    let cdim = n_max + 1;
    let mut n = Array2::zeros((cdim, cdim));
    for k in 0..cdim {
        n[[k, k]] = c64(k as f64, 0.0);
    }
    OperatorMatrix::new(kron(&Array2::eye(2), &n))
}

/// Total excitation number `a^+ a + sigma_+ sigma_-`.
pub fn excitation_number(n_max: usize) -> OperatorMatrix {
    let mut m = number_op(n_max).mat;
    let cdim = n_max + 1;
    for k in 0..cdim {
        // the |+, n> block sits in the second atom sector
        m[[cdim + k, cdim + k]] += c64(1.0, 0.0);
    }
    OperatorMatrix::new(m)
}

/// Quadrature operator `A_theta = (e^{i theta} a^+ + e^{-i theta} a) / 2`.
///
/// Normalized so the vacuum variance is 1/4; `theta = 0` gives the in-phase
/// quadrature.
pub fn quadrature_op(theta: f64, n_max: usize) -> OperatorMatrix {
    let (a, a_dag) = build_cavity_ops(n_max).expect("quadrature_op: n_max < 1");
    let phase = C64::from_polar(1.0, theta);
    OperatorMatrix::new((&a_dag.mat * phase + &a.mat * phase.conj()) * c64(0.5, 0.0))
}

/// Driven Jaynes-Cummings Hamiltonian in the frame rotating at the drive:
/// `H = -delta_omega_d (sigma_+ sigma_- + a^+ a) + g (a sigma_+ + a^+ sigma_-)
///  + eps_d (a + a^+)`.
pub fn build_jc_hamiltonian(p: &SystemParams) -> OperatorMatrix {
    let (a, a_dag) = build_cavity_ops(p.n_max).expect("build_jc_hamiltonian: n_max < 1");
    let sm = sigma_minus(p.n_max);
    let sp = sigma_plus(p.n_max);

    let mut h = number_op(p.n_max).mat;
    h += &sp.mat.dot(&sm.mat);
    h *= c64(-p.delta_omega_d, 0.0);
    h += &((a.mat.dot(&sp.mat) + a_dag.mat.dot(&sm.mat)) * c64(p.g, 0.0));
    h += &((&a.mat + &a_dag.mat) * c64(p.eps_d, 0.0));
    OperatorMatrix::new(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::basis_state;
    use approx::assert_abs_diff_eq;
    use ndarray_linalg::Eigh;

    #[test]
    fn ladder_matrix_elements() {
        let (a, a_dag) = build_cavity_ops(5).unwrap();
        let one = basis_state(false, 1, 5);
        let zero = basis_state(false, 0, 5);
        // <0|a|1> = 1
        let amp = zero.braket(&a.apply(&one));
        assert_abs_diff_eq!(amp.re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(amp.im, 0.0, epsilon = 0.0);
        // <2|a|3> = sqrt(3)
        let two = basis_state(false, 2, 5);
        let three = basis_state(false, 3, 5);
        let amp = two.braket(&a.apply(&three));
        assert_abs_diff_eq!(amp.re, 3f64.sqrt(), epsilon = 0.0);
        // a|0> = 0
        assert_eq!(a.apply(&zero).norm(), 0.0);
        // a^+ really is the conjugate transpose
        assert_eq!(a_dag.mat, a.dagger().mat);
    }

    #[test]
    fn number_op_is_diagonal_count() {
        let n_max = 6;
        let n = number_op(n_max);
        let aa = {
            let (a, a_dag) = build_cavity_ops(n_max).unwrap();
            a_dag.mat.dot(&a.mat)
        };
        assert!(n.distance(&OperatorMatrix::new(aa)) < 1e-14);
        for s in [false, true] {
            for k in 0..=n_max {
                let psi = basis_state(s, k, n_max);
                assert_abs_diff_eq!(psi.expect(&n).re, k as f64, epsilon = 0.0);
            }
        }
    }

    #[test]
    fn truncated_commutator_identity() {
        // [a, a^+] = I - (n_max + 1) |n_max><n_max| on the truncated space
        let n_max = 9;
        let (a, a_dag) = build_cavity_ops(n_max).unwrap();
        let comm = a.mat.dot(&a_dag.mat) - a_dag.mat.dot(&a.mat);
        let mut expect = Array2::eye(2 * (n_max + 1));
        let cdim = n_max + 1;
        for s in 0..2 {
            let idx = s * cdim + n_max;
            expect[[idx, idx]] = c64(-(n_max as f64), 0.0);
        }
        // sqrt(n) * sqrt(n) rounds, so "exact" means machine precision here
        assert!(OperatorMatrix::new(comm).distance(&OperatorMatrix::new(expect)) < 1e-13);
    }

    #[test]
    fn hamiltonian_is_hermitian() {
        let p = SystemParams::new(200.0, 1.0, 2.0, 16.0, -143.23, 14).unwrap();
        let h = build_jc_hamiltonian(&p);
        assert!(h.is_hermitian(1e-12));
    }

    #[test]
    fn undriven_spectrum_pairs() {
        // eps_d = 0, delta = 0: nonzero eigenvalues come in pairs +-g sqrt(n)
        let n_max = 8;
        let g = 3.7;
        let p = SystemParams::new(g, 0.0, 0.0, 0.0, 0.0, n_max).unwrap();
        let h = build_jc_hamiltonian(&p);
        let (evals, _) = h.mat.eigh(ndarray_linalg::UPLO::Lower).unwrap();
        let mut expected: Vec<f64> = vec![0.0, 0.0]; // |0,-> and the uncoupled |n_max,+>
        for n in 1..=n_max {
            expected.push(-g * (n as f64).sqrt());
            expected.push(g * (n as f64).sqrt());
        }
        // |n_max, +> couples to |n_max + 1, -> which is truncated away, so it
        // stays at zero energy alongside the ground state.
        let mut got: Vec<f64> = evals.to_vec();
        got.sort_by(|x, y| x.partial_cmp(y).unwrap());
        expected.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (g_i, e_i) in got.iter().zip(&expected) {
            assert_abs_diff_eq!(g_i, e_i, epsilon = 1e-12);
        }
    }

    #[test]
    fn decoupled_spectrum() {
        // eps_d = 0, g = 0: eigenvalues are -delta * (n + s)
        let n_max = 4;
        let delta = 2.5;
        let p = SystemParams::new(0.0, 0.0, 0.0, 0.0, delta, n_max).unwrap();
        let h = build_jc_hamiltonian(&p);
        for s in [false, true] {
            for n in 0..=n_max {
                let psi = basis_state(s, n, n_max);
                let e = psi.expect(&h).re;
                assert_abs_diff_eq!(e, -delta * (n as f64 + s as u8 as f64), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn excitation_conserved_without_drive() {
        let p = SystemParams::new(5.0, 0.0, 0.0, 0.0, 1.3, 7).unwrap();
        let h = build_jc_hamiltonian(&p);
        let nx = excitation_number(p.n_max);
        let comm = h.mat.dot(&nx.mat) - nx.mat.dot(&h.mat);
        let norm: f64 = comm.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm < 1e-12, "commutator norm {norm}");
    }

    #[test]
    fn quadrature_rotation() {
        let n_max = 5;
        let x = quadrature_op(0.0, n_max);
        let y = quadrature_op(std::f64::consts::FRAC_PI_2, n_max);
        assert!(x.is_hermitian(1e-14));
        assert!(y.is_hermitian(1e-14));
        // A_{theta+pi} = -A_theta
        let x_pi = quadrature_op(std::f64::consts::PI, n_max);
        let neg = OperatorMatrix::new(x.mat.mapv(|z| -z));
        assert!(x_pi.distance(&neg) < 1e-15);
    }
}
