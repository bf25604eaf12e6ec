//! Spectral decomposition of the generator, steady-state extraction, and the
//! solved operating point shared by every correlation routine.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Inverse, Solve};
use operator_core::{
    quadrature_op,
    superop::{unvec_rho, vec_rho},
    C64, DensityMatrix, OperatorMatrix, StateError, SystemParams,
};
use thiserror::Error;

use crate::liouvillian::{JcOps, Liouvillian};

/// Eigenvalue magnitudes below this count as stationary. Internal rates are
/// kappa-scaled (order 1 to 1e3), so the cutoff sits far above eigensolver
/// noise and far below the slowest physical decay.
pub const ZERO_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("dense linear-algebra routine failed: {0}")]
    Linalg(#[from] ndarray_linalg::error::LinalgError),
    #[error(
        "steady state is not unique: {count} stationary eigenvalues (second smallest magnitude {second:.3e})"
    )]
    AmbiguousSteadyState { count: usize, second: f64 },
    #[error("no stationary mode: smallest eigenvalue magnitude is {smallest:.3e}")]
    NoZeroMode { smallest: f64 },
    #[error("steady-state residual {residual:.3e} exceeds 1e-9")]
    SteadyStateResidual { residual: f64 },
    #[error("normalization `{which}` vanishes (value {value:.3e})")]
    VanishingNormalization { which: &'static str, value: f64 },
    #[error("invalid state: {0}")]
    State(#[from] StateError),
}

/// Full eigen-decomposition `M = R diag(lambda) R^{-1}` of a generator.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    pub eigenvalues: Array1<C64>,
    /// Right eigenvectors, one per column.
    pub right: Array2<C64>,
    /// Inverse of the eigenvector matrix; row i is the matching left form.
    pub left_inv: Array2<C64>,
}

/// Decomposes an arbitrary square generator matrix.
pub fn decompose_matrix(mat: &Array2<C64>) -> Result<SpectralDecomp, SolveError> {
    let (eigenvalues, right) = mat.eig()?;
    let left_inv = right.inv()?;
    Ok(SpectralDecomp {
        eigenvalues,
        right,
        left_inv,
    })
}

impl SpectralDecomp {
    /// Expansion coefficients of `v` over the eigenbasis.
    pub fn weights(&self, v: &Array1<C64>) -> Array1<C64> {
        self.left_inv.dot(v)
    }

    /// `e^{M t} v` through the eigenbasis.
    pub fn evolve_vec(&self, v: &Array1<C64>, t: f64) -> Array1<C64> {
        let mut w = self.weights(v);
        for (wi, li) in w.iter_mut().zip(self.eigenvalues.iter()) {
            *wi *= (li * t).exp();
        }
        self.right.dot(&w)
    }

    pub fn stationary_indices(&self) -> Vec<usize> {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, l)| l.norm() < ZERO_TOL)
            .map(|(i, _)| i)
            .collect()
    }

    /// Smallest nonzero decay rate `-Re lambda`; sets the slowest transient.
    pub fn slowest_decay_rate(&self) -> f64 {
        self.eigenvalues
            .iter()
            .filter(|l| l.norm() >= ZERO_TOL)
            .map(|l| -l.re)
            .fold(f64::INFINITY, f64::min)
    }

    /// Relative error of reconstructing `v` from its eigenbasis expansion;
    /// large values signal an ill-conditioned eigenvector matrix.
    pub fn reconstruction_residual(&self, v: &Array1<C64>) -> f64 {
        let back = self.right.dot(&self.weights(v));
        let num = (&back - v).iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let den = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}

/// Stationary solution with its quality measures.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    /// Norm of `L vec(rho)` after hermitization and normalization.
    pub residual: f64,
    /// Population of the highest Fock level, summed over atomic sectors.
    pub truncation_weight: f64,
    /// Set when the truncation weight reaches 1e-6 and results are suspect.
    pub truncation_flagged: bool,
}

/// Solves `L rho = 0` with unit trace by replacing the first diagonal row of
/// the generator with the trace functional. The diagonal rows of any
/// trace-preserving generator sum to zero, so dropping one loses no
/// information and the bordered system is square and nonsingular whenever the
/// stationary state is unique.
pub fn steady_state(l: &Liouvillian) -> Result<SteadyState, SolveError> {
    let d = l.dim();
    let n2 = d * d;
    let mut m = l.mat.clone();
    for c in 0..n2 {
        m[[0, c]] = C64::new(0.0, 0.0);
    }
    for i in 0..d {
        m[[0, i * d + i]] = C64::new(1.0, 0.0);
    }
    let mut rhs: Array1<C64> = Array1::zeros(n2);
    rhs[0] = C64::new(1.0, 0.0);
    let x = m.solve_into(rhs)?;

    let mut rho = DensityMatrix::new(unvec_rho(&x));
    rho.hermitize();
    rho.normalize();

    let res_vec = l.mat.dot(&vec_rho(&rho.mat));
    let residual = res_vec.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if residual > 1e-9 {
        return Err(SolveError::SteadyStateResidual { residual });
    }
    rho.validate()?;

    let cdim = d / 2;
    let truncation_weight = rho.mat[[cdim - 1, cdim - 1]].re + rho.mat[[d - 1, d - 1]].re;
    Ok(SteadyState {
        rho,
        residual,
        truncation_weight,
        truncation_flagged: truncation_weight >= 1e-6,
    })
}

/// One fully solved operating point: generator, spectrum, and steady state.
/// Correlation routines borrow this immutably, so evaluations for different
/// delays or phases can run concurrently.
#[derive(Debug, Clone)]
pub struct MasterSolution {
    pub params: SystemParams,
    pub ops: JcOps,
    pub liouvillian: Liouvillian,
    pub decomp: SpectralDecomp,
    pub steady: SteadyState,
}

impl MasterSolution {
    pub fn solve(p: &SystemParams) -> Result<Self, SolveError> {
        p.validate().expect("params validated before solve");
        let liouvillian = Liouvillian::build(p);
        let decomp = decompose_matrix(&liouvillian.mat)?;

        let stationary = decomp.stationary_indices();
        match stationary.len() {
            0 => {
                let smallest = decomp
                    .eigenvalues
                    .iter()
                    .map(|l| l.norm())
                    .fold(f64::INFINITY, f64::min);
                return Err(SolveError::NoZeroMode { smallest });
            }
            1 => {}
            count => {
                let mut mags: Vec<f64> =
                    stationary.iter().map(|&i| decomp.eigenvalues[i].norm()).collect();
                mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
                return Err(SolveError::AmbiguousSteadyState {
                    count,
                    second: mags[1],
                });
            }
        }

        let steady = steady_state(&liouvillian)?;
        Ok(Self {
            params: p.clone(),
            ops: JcOps::build(p),
            liouvillian,
            decomp,
            steady,
        })
    }

    /// tr(rho_ss M).
    pub fn expect_ss(&self, op: &OperatorMatrix) -> C64 {
        self.steady.rho.expect(op)
    }

    /// Steady intracavity photon number.
    pub fn photon_number(&self) -> f64 {
        self.expect_ss(&self.ops.n_op).re
    }

    /// Steady atomic excited-state population.
    pub fn atom_excitation(&self) -> f64 {
        let ee = self.ops.sp.mat.dot(&self.ops.sm.mat);
        self.steady.rho.expect(&OperatorMatrix::new(ee)).re
    }

    /// Steady mean of the quadrature `A_theta`.
    pub fn quadrature_mean(&self, theta: f64) -> f64 {
        self.expect_ss(&quadrature_op(theta, self.params.n_max)).re
    }
}
