//! Effective four-level description of the two-photon resonance: closed-form
//! correlation functions, conditioned intracavity states, and the reduced
//! dressed-basis generator they follow from.

pub mod closed_form;
pub mod conditioned;
pub mod generator;
pub mod params;

pub use closed_form::{g2_ab_analytic, g2_ab_resonant, g2_ab_zero_delay, FourLevelError, ResonantCross};
pub use conditioned::{conditioned_states, population_contrast, quantum_beat_superposition, DIM4};
pub use generator::{build_generator, FourLevelGenerator};
pub use params::{
    cascade_ratio_cavity_only, cascade_ratio_matched, effective_detuning, effective_params,
    FourLevelParams, ModelWarning,
};
