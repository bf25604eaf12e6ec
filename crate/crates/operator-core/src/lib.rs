//! Truncated atom-cavity Hilbert space: canonical operators, the driven
//! Jaynes-Cummings Hamiltonian, dressed states, and superoperator plumbing.
//!
//! Everything downstream (master-equation solvers, trajectory unravelings,
//! phase-space transforms) builds on the dense complex matrices constructed
//! here. The composite space is atom (2) tensor cavity (`n_max + 1`) with the
//! atom index slowest, so basis state `|s, n>` sits at index
//! `s * (n_max + 1) + n`. All constructors are pure functions returning
//! immutable values; `hbar = 1` throughout.

pub mod ops;
pub mod params;
pub mod states;
pub mod superop;

pub use num_complex::Complex64 as C64;

pub use ops::{
    build_cavity_ops, build_jc_hamiltonian, cavity_annihilator, excitation_number, number_op,
    quadrature_op, sigma_minus, sigma_plus, OperatorMatrix,
};
pub use params::{ParamError, SystemParams};
pub use states::{
    basis_state, coherent_state, dressed_by_index, dressed_state, ground_state,
    partial_trace_atom, trace_distance, Branch, DensityMatrix, StateError, StateVector,
};

/// One-liner for `C64::new(re, im)`.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}
