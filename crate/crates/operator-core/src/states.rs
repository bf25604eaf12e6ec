//! Pure states, density matrices, and the dressed-state ladder.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use thiserror::Error;

use crate::{c64, ops::OperatorMatrix, C64};

#[derive(Debug, Error, PartialEq)]
pub enum StateError {
    #[error("state norm is {norm}, expected 1 within 1e-12")]
    NotNormalized { norm: f64 },
    #[error("density matrix deviates from Hermitian by {deviation:.3e}")]
    NotHermitian { deviation: f64 },
    #[error("density matrix trace is {trace}, expected 1 within 1e-10")]
    BadTrace { trace: f64 },
    #[error("density matrix has eigenvalue {min_eigenvalue:.3e} below -1e-8")]
    NotPositive { min_eigenvalue: f64 },
    #[error("dressed excitation {n} outside 1..={n_max}")]
    BadExcitation { n: usize, n_max: usize },
    #[error("dimension {got} does not match expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
}

/// Pure state on the composite space, stored as amplitudes over
/// `|s, n> -> s * (n_max + 1) + n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amps: Array1<C64>,
}

impl StateVector {
    pub fn new(amps: Array1<C64>) -> Self {
        Self { amps }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            amps: Array1::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.mapv_inplace(|z| z / n);
        }
    }

    pub fn validate(&self) -> Result<(), StateError> {
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(())
    }

    /// `<self|other>`.
    pub fn braket(&self, other: &Self) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<self|M|self>`; real for Hermitian `M`.
    pub fn expect(&self, op: &OperatorMatrix) -> C64 {
        self.braket(&op.apply(self))
    }

    /// `|self><self|` as a density matrix (not validated; normalize first).
    pub fn outer(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut mat = Array2::zeros((dim, dim));
        for (i, ai) in self.amps.iter().enumerate() {
            for (j, aj) in self.amps.iter().enumerate() {
                mat[[i, j]] = ai * aj.conj();
            }
        }
        DensityMatrix { mat }
    }
}

/// Mixed state as a dense Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub mat: Array2<C64>,
}

impl DensityMatrix {
    pub fn new(mat: Array2<C64>) -> Self {
        assert!(mat.is_square(), "DensityMatrix::new: matrix must be square");
        Self { mat }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.mat.diag().sum()
    }

    /// tr(rho M).
    pub fn expect(&self, op: &OperatorMatrix) -> C64 {
        self.mat.dot(&op.mat).diag().sum()
    }

    pub fn purity(&self) -> f64 {
        self.mat.dot(&self.mat).diag().sum().re
    }

    /// Checks Hermiticity (1e-10), unit trace (1e-10), and positivity up to
    /// -1e-8 on the lowest eigenvalue.
    pub fn validate(&self) -> Result<(), StateError> {
        let dev = (&self.mat - &self.mat.t().mapv(|z| z.conj()))
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt();
        if dev > 1e-10 {
            return Err(StateError::NotHermitian { deviation: dev });
        }
        let tr = self.trace();
        if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
            return Err(StateError::BadTrace { trace: tr.re });
        }
        let (evals, _) = self
            .mat
            .eigh(UPLO::Lower)
            .expect("DensityMatrix::validate: eigh failed");
        let min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
        if min < -1e-8 {
            return Err(StateError::NotPositive {
                min_eigenvalue: min,
            });
        }
        Ok(())
    }

    /// Rescales so the trace is exactly 1 (no-op on a traceless matrix).
    pub fn normalize(&mut self) {
        let tr = self.trace().re;
        if tr != 0.0 {
            self.mat.mapv_inplace(|z| z / tr);
        }
    }

    /// Replaces rho by (rho + rho^+) / 2.
    pub fn hermitize(&mut self) {
        let herm = (&self.mat + &self.mat.t().mapv(|z| z.conj())) * c64(0.5, 0.0);
        self.mat = herm;
    }
}

/// Half of a dressed doublet: `Lower` has energy `-g sqrt(n)` at resonance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Lower,
    Upper,
}

/// Composite basis state `|s, n>`; `excited` selects the atomic sector.
pub fn basis_state(excited: bool, n: usize, n_max: usize) -> StateVector {
    let cdim = n_max + 1;
    assert!(n < cdim, "basis_state: photon number {n} > n_max {n_max}");
    let mut psi = StateVector::zeros(2 * cdim);
    psi.amps[excited as usize * cdim + n] = c64(1.0, 0.0);
    psi
}

/// Joint ground state `|0, ->`.
pub fn ground_state(n_max: usize) -> StateVector {
    basis_state(false, 0, n_max)
}

/// Dressed state of the undriven resonant ladder:
/// `(|n, -> -+ |n - 1, +>) / sqrt(2)` with energy `-+ g sqrt(n)`.
pub fn dressed_state(n: usize, branch: Branch, n_max: usize) -> Result<StateVector, StateError> {
    if n < 1 || n > n_max {
        return Err(StateError::BadExcitation { n, n_max });
    }
    let cdim = n_max + 1;
    let mut psi = StateVector::zeros(2 * cdim);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    psi.amps[n] = c64(s, 0.0);
    psi.amps[cdim + n - 1] = match branch {
        Branch::Lower => c64(-s, 0.0),
        Branch::Upper => c64(s, 0.0),
    };
    Ok(psi)
}

/// Dressed ladder by flat index: 0 is the ground state, `2n - 1` the lower and
/// `2n` the upper member of the n-th doublet.
pub fn dressed_by_index(k: usize, n_max: usize) -> Result<StateVector, StateError> {
    if k == 0 {
        return Ok(ground_state(n_max));
    }
    let n = k.div_ceil(2);
    let branch = if k % 2 == 1 { Branch::Lower } else { Branch::Upper };
    dressed_state(n, branch, n_max)
}

/// Truncated coherent state `|alpha>` in the cavity, atom in the ground
/// state, renormalized so the truncation never leaves a deficient norm.
pub fn coherent_state(alpha: C64, n_max: usize) -> StateVector {
    let cdim = n_max + 1;
    let mut psi = StateVector::zeros(2 * cdim);
    let mut amp = c64(1.0, 0.0);
    for n in 0..cdim {
        psi.amps[n] = amp;
        amp *= alpha / c64(((n + 1) as f64).sqrt(), 0.0);
    }
    psi.normalize();
    psi
}

/// Reduced cavity state: sums the two atomic sectors of the composite matrix.
pub fn partial_trace_atom(rho: &DensityMatrix) -> Result<DensityMatrix, StateError> {
    let dim = rho.dim();
    if dim % 2 != 0 {
        return Err(StateError::DimensionMismatch {
            got: dim,
            expected: dim + 1,
        });
    }
    let cdim = dim / 2;
    let mut out = Array2::zeros((cdim, cdim));
    for s in 0..2 {
        for i in 0..cdim {
            for j in 0..cdim {
                out[[i, j]] += rho.mat[[s * cdim + i, s * cdim + j]];
            }
        }
    }
    Ok(DensityMatrix { mat: out })
}

/// `(1/2) tr |rho1 - rho2|` via the spectrum of the Hermitian difference.
pub fn trace_distance(rho1: &DensityMatrix, rho2: &DensityMatrix) -> f64 {
    assert_eq!(rho1.dim(), rho2.dim(), "trace_distance: dimension mismatch");
    let diff = &rho1.mat - &rho2.mat;
    let (evals, _) = diff
        .eigh(UPLO::Lower)
        .expect("trace_distance: eigh failed");
    0.5 * evals.iter().map(|l| l.abs()).sum::<f64>()
}
