//! Lindblad master equation for the driven Jaynes-Cummings system: Liouvillian
//! construction, spectral decomposition, steady states, propagation, and
//! two-time correlation functions via the quantum regression formula.

pub mod correlate;
pub mod expm;
pub mod liouvillian;
pub mod propagate;
pub mod series;
pub mod spectral;
