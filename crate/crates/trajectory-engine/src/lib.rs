//! Stochastic unravelings of the cavity output field: photon-counting
//! trajectories, the wave-particle correlator with a weak local oscillator,
//! heterodyne tomography of the free decay, and deterministic seeded ensembles.

pub mod config;
pub mod diffusive;
pub mod direct;
pub mod ensemble;
pub mod record;
pub mod sampling;
pub mod tomography;

use thiserror::Error;

pub use config::{
    auto_dt, beat_resolving_dt, ConfigError, Schedule, Scheme, SdeIntegrator, UnravelingConfig,
};
pub use diffusive::{
    run_heterodyne, run_wave_particle, DiffusiveStep, HeterodyneStepper, WaveParticleStepper,
};
pub use direct::{run_direct, ConditionedState, DirectStepper, StepOutcome};
pub use ensemble::{run_ensemble, EnsembleResult};
pub use record::{parse_record, Channel, RecordError, TrajectoryRecord};
pub use sampling::{
    ks_p_value, ks_statistic, sample_h_ensemble, sample_h_operational, sample_h_shuffled,
    time_averaged_state, waiting_histogram, HSample, WaitingHistogram,
};
pub use tomography::{charge_histogram, free_decay_tomography, ChargeHistogram, TomographyResult};

#[derive(Debug, Error)]
pub enum TrajectoryError {
    #[error(transparent)]
    Config(#[from] config::ConfigError),
    #[error("operation expects a {expected} record, got {got}")]
    SchemeMismatch { expected: &'static str, got: &'static str },
    #[error("total jump probability {p} at t = {t} exceeds 0.1; shrink dt")]
    JumpProbabilityTooLarge { t: f64, p: f64 },
    #[error("initial state has dimension {got}, parameters give {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("record holds no APD clicks to start samples from")]
    NoClicks,
    #[error("channel has {found} clicks, need at least {need}")]
    TooFewClicks { found: usize, need: usize },
    #[error("record was run without state snapshots")]
    NoSnapshots,
    #[error("no snapshots fall inside the window [{lo}, {hi}]")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("density matrix has nonpositive trace {trace}")]
    BadDensity { trace: f64 },
    #[error("ensemble statistics need at least two trajectories, got {n}")]
    EmptyEnsemble { n: usize },
}
