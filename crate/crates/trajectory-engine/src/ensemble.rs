//! Seeded trajectory ensembles with per-trajectory RNG streams and
//! order-independent aggregation of checkpoint observables.

use crate::config::{Scheme, UnravelingConfig};
use crate::diffusive::{HeterodyneStepper, WaveParticleStepper};
use crate::direct::DirectStepper;
use crate::record::{Channel, TrajectoryRecord};
use crate::TrajectoryError;
use operator_core::{c64, StateVector, SystemParams, C64};
use rayon::prelude::*;

/// Per-checkpoint means and standard errors of the conditioned observables
/// `<a^+a>`, `<sigma_+sigma_->` and `<A_theta>` over the ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointStats {
    /// Checkpoint times, rounded to the step grid.
    pub times: Vec<f64>,
    pub mean_photon: Vec<f64>,
    pub se_photon: Vec<f64>,
    pub mean_atom: Vec<f64>,
    pub se_atom: Vec<f64>,
    pub mean_quadrature: Vec<f64>,
    pub se_quadrature: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub stats: CheckpointStats,
    pub n_traj: usize,
    /// Total clicks on each channel across the whole ensemble.
    pub cavity_clicks: usize,
    pub spontaneous_clicks: usize,
    pub records: Vec<TrajectoryRecord>,
}

/// Scheme dispatch for a single stepping trajectory.
enum AnyStepper {
    Direct(DirectStepper),
    WaveParticle(WaveParticleStepper),
    Heterodyne(HeterodyneStepper),
}

struct StepView {
    t: f64,
    jumped: Option<Channel>,
    current: C64,
}

impl AnyStepper {
    fn new(
        p: &SystemParams,
        cfg: &UnravelingConfig,
        psi0: &StateVector,
        stream: u64,
    ) -> Result<Self, TrajectoryError> {
        match cfg.scheme {
            Scheme::Direct => Ok(Self::Direct(DirectStepper::new(p, cfg, psi0, stream)?)),
            Scheme::WaveParticle => Ok(Self::WaveParticle(WaveParticleStepper::new(
                p, cfg, psi0, stream,
            )?)),
            Scheme::Heterodyne => Ok(Self::Heterodyne(HeterodyneStepper::new(
                p, cfg, psi0, stream,
            )?)),
            Scheme::FreeDecay => Err(TrajectoryError::SchemeMismatch {
                expected: "direct, wave_particle or heterodyne",
                got: cfg.scheme.as_str(),
            }),
        }
    }

    fn step(&mut self) -> Result<StepView, TrajectoryError> {
        match self {
            Self::Direct(s) => {
                let o = s.step()?;
                Ok(StepView {
                    t: o.t,
                    jumped: o.jumped,
                    current: c64(0.0, 0.0),
                })
            }
            Self::WaveParticle(s) => {
                let o = s.step()?;
                Ok(StepView {
                    t: o.t,
                    jumped: o.jumped,
                    current: o.current,
                })
            }
            Self::Heterodyne(s) => {
                let o = s.step()?;
                Ok(StepView {
                    t: o.t,
                    jumped: o.jumped,
                    current: o.current,
                })
            }
        }
    }

    fn observables(&self) -> (f64, f64, f64) {
        match self {
            Self::Direct(s) => s.observables(),
            Self::WaveParticle(s) => s.observables(),
            Self::Heterodyne(s) => s.observables(),
        }
    }

    fn psi(&self) -> &StateVector {
        match self {
            Self::Direct(s) => &s.state.psi,
            Self::WaveParticle(s) => &s.state.psi,
            Self::Heterodyne(s) => &s.state.psi,
        }
    }

    fn t(&self) -> f64 {
        match self {
            Self::Direct(s) => s.t,
            Self::WaveParticle(s) => s.t,
            Self::Heterodyne(s) => s.t,
        }
    }
}

/// Step one trajectory, sampling observables at the given step indices
/// (sorted) and assembling its record along the way.
fn one_trajectory(
    p: &SystemParams,
    cfg: &UnravelingConfig,
    psi0: &StateVector,
    stream: u64,
    check_idx: &[usize],
) -> Result<(Vec<(f64, f64, f64)>, TrajectoryRecord), TrajectoryError> {
    let mut stepper = AnyStepper::new(p, cfg, psi0, stream)?;
    let n_steps = cfg.n_steps();
    let cadence = cfg.current_cadence();
    let keep_current = cfg.scheme.has_current();
    let mut record = TrajectoryRecord {
        jumps: Vec::new(),
        current_samples: Vec::new(),
        state_snapshots: Vec::new(),
        config: cfg.clone(),
        params: p.clone(),
    };
    if cfg.snapshot_stride.is_some() {
        record.state_snapshots.push((0.0, stepper.psi().clone()));
    }
    let mut samples = Vec::with_capacity(check_idx.len());
    let mut next = 0;
    for k in 0..=n_steps {
        while next < check_idx.len() && check_idx[next] == k {
            samples.push(stepper.observables());
            next += 1;
        }
        if k == n_steps {
            break;
        }
        let sv = stepper.step()?;
        if let Some(channel) = sv.jumped {
            record.jumps.push((sv.t, channel));
        }
        if keep_current && (k + 1) % cadence == 0 {
            record.current_samples.push((sv.t, sv.current));
        }
        if let Some(stride) = cfg.snapshot_stride {
            if (k + 1) % stride == 0 {
                record.state_snapshots.push((stepper.t(), stepper.psi().clone()));
            }
        }
    }
    Ok((samples, record))
}

/// Run `n_traj` trajectories from the same initial state with streams
/// `0..n_traj` and aggregate observables at the requested checkpoint times.
/// The result is independent of how rayon schedules the work.
pub fn run_ensemble(
    p: &SystemParams,
    cfg: &UnravelingConfig,
    psi0: &StateVector,
    n_traj: usize,
    checkpoints: &[f64],
) -> Result<EnsembleResult, TrajectoryError> {
    if n_traj < 2 {
        return Err(TrajectoryError::EmptyEnsemble { n: n_traj });
    }
    let n_steps = cfg.n_steps();
    let mut idx: Vec<usize> = checkpoints
        .iter()
        .map(|t| ((t / cfg.dt).round() as usize).min(n_steps))
        .collect();
    idx.sort_unstable();
    let times: Vec<f64> = idx.iter().map(|&k| k as f64 * cfg.dt).collect();

    let per: Vec<(Vec<(f64, f64, f64)>, TrajectoryRecord)> = (0..n_traj)
        .into_par_iter()
        .map(|i| one_trajectory(p, cfg, psi0, i as u64, &idx))
        .collect::<Result<_, _>>()?;

    let n = n_traj as f64;
    let mut stats = CheckpointStats {
        times,
        mean_photon: vec![0.0; idx.len()],
        se_photon: vec![0.0; idx.len()],
        mean_atom: vec![0.0; idx.len()],
        se_atom: vec![0.0; idx.len()],
        mean_quadrature: vec![0.0; idx.len()],
        se_quadrature: vec![0.0; idx.len()],
    };
    for j in 0..idx.len() {
        let column = |pick: fn(&(f64, f64, f64)) -> f64| -> (f64, f64) {
            let mean = per.iter().map(|(s, _)| pick(&s[j])).sum::<f64>() / n;
            let var = per
                .iter()
                .map(|(s, _)| (pick(&s[j]) - mean).powi(2))
                .sum::<f64>()
                / (n - 1.0);
            (mean, (var / n).sqrt())
        };
        (stats.mean_photon[j], stats.se_photon[j]) = column(|s| s.0);
        (stats.mean_atom[j], stats.se_atom[j]) = column(|s| s.1);
        (stats.mean_quadrature[j], stats.se_quadrature[j]) = column(|s| s.2);
    }
    let cavity_clicks = per
        .iter()
        .map(|(_, r)| r.click_count(Channel::Cavity))
        .sum();
    let spontaneous_clicks = per
        .iter()
        .map(|(_, r)| r.click_count(Channel::Spontaneous))
        .sum();
    Ok(EnsembleResult {
        stats,
        n_traj,
        cavity_clicks,
        spontaneous_clicks,
        records: per.into_iter().map(|(_, r)| r).collect(),
    })
}
