//! Photon-counting unraveling and the shared single-step machinery.
//!
//! Between jumps the un-normalized state evolves under the non-Hermitian
//! `H' = H - i kappa a^+a - i (gamma/2) sigma_+ sigma_-`, applied through an
//! exact matrix exponential per step. A jump replaces the step it falls in:
//! probabilities are first order in `dt`, and the step-size invariant keeps
//! the per-step total below 0.1.

use crate::config::{Scheme, UnravelingConfig};
use crate::record::{Channel, TrajectoryRecord};
use crate::TrajectoryError;
use master_equation::expm::expm;
use ndarray::{Array1, Array2, ArrayView1};
use operator_core::{build_jc_hamiltonian, c64, StateVector, SystemParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Normalized conditioned state plus the running log-norm of the
/// un-normalized wavefunction since the last jump.
#[derive(Debug, Clone)]
pub struct ConditionedState {
    pub psi: StateVector,
    /// `ln ||psi_bar||` accumulated between jumps; reset to 0 at each jump.
    pub log_norm: f64,
}

impl ConditionedState {
    pub fn new(mut psi: StateVector) -> Self {
        psi.normalize();
        Self { psi, log_norm: 0.0 }
    }

    /// Swallow an un-normalized update, returning its norm.
    pub(crate) fn absorb(&mut self, raw: Array1<C64>) -> f64 {
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        self.psi.amps = raw / c64(norm, 0.0);
        self.log_norm += norm.ln();
        norm
    }

    pub(crate) fn collapse(&mut self, raw: Array1<C64>) {
        let norm = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        self.psi.amps = raw / c64(norm, 0.0);
        self.log_norm = 0.0;
    }
}

// Sparse applications of the two collapse operators on the flat
// |s, n> -> s*(n_max+1) + n layout; the dense matrices only earn their keep
// inside the exponentials.

pub(crate) fn apply_lowering(amps: ArrayView1<C64>, n_max: usize) -> Array1<C64> {
    let cdim = n_max + 1;
    let mut out = Array1::zeros(2 * cdim);
    for s in 0..2 {
        for n in 1..cdim {
            out[s * cdim + n - 1] = amps[s * cdim + n] * (n as f64).sqrt();
        }
    }
    out
}

pub(crate) fn apply_sigma_minus(amps: ArrayView1<C64>, n_max: usize) -> Array1<C64> {
    let cdim = n_max + 1;
    let mut out = Array1::zeros(2 * cdim);
    for n in 0..cdim {
        out[n] = amps[cdim + n];
    }
    out
}

pub(crate) fn norm_sqr(amps: ArrayView1<C64>) -> f64 {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

/// `<a^+a>` over the squared norm; safe on un-normalized vectors.
pub(crate) fn photon_expectation(amps: ArrayView1<C64>, n_max: usize) -> f64 {
    let cdim = n_max + 1;
    let mut num = 0.0;
    for s in 0..2 {
        for n in 1..cdim {
            num += n as f64 * amps[s * cdim + n].norm_sqr();
        }
    }
    num / norm_sqr(amps)
}

pub(crate) fn atom_expectation(amps: ArrayView1<C64>, n_max: usize) -> f64 {
    let cdim = n_max + 1;
    let mut num = 0.0;
    for n in 0..cdim {
        num += amps[cdim + n].norm_sqr();
    }
    num / norm_sqr(amps)
}

/// `<a>` over the squared norm.
pub(crate) fn amp_expectation(amps: ArrayView1<C64>, n_max: usize) -> C64 {
    let cdim = n_max + 1;
    let mut num = C64::new(0.0, 0.0);
    for s in 0..2 {
        for n in 1..cdim {
            num += amps[s * cdim + n - 1].conj() * amps[s * cdim + n] * (n as f64).sqrt();
        }
    }
    num / norm_sqr(amps)
}

/// `<A_theta> = Re[e^{-i theta} <a>]`.
pub(crate) fn quadrature_expectation(amps: ArrayView1<C64>, theta: f64, n_max: usize) -> f64 {
    let a = amp_expectation(amps, n_max);
    (C64::from_polar(1.0, -theta) * a).re
}

/// Exact step propagator `exp(-i H' dt)` with a cheap path for drive-detuning
/// ramps: `H'` depends on the schedule only through `-delta (a^+a + s_+s_-)`,
/// whose exponential is diagonal, so small excursions from the cached
/// reference are applied as a symmetric diagonal-phase sandwich and the full
/// exponential is rebuilt only when the accumulated phase error could reach
/// the integrator's own order.
pub(crate) struct CachedPropagator {
    p: SystemParams,
    dt: f64,
    delta_ref: f64,
    u: Array2<C64>,
    /// Diagonal of `a^+a + sigma_+ sigma_-` on the flat layout.
    ntot: Vec<f64>,
}

// Largest per-step detuning-excursion phase before a rebuild; the sandwich
// error is second order in this number.
const REBUILD_PHASE: f64 = 2e-4;

impl CachedPropagator {
    pub(crate) fn new(p: &SystemParams, dt: f64, delta0: f64) -> Self {
        let cdim = p.n_max + 1;
        let mut ntot = vec![0.0; 2 * cdim];
        for s in 0..2 {
            for n in 0..cdim {
                ntot[s * cdim + n] = (n + s) as f64;
            }
        }
        let mut prop = Self {
            p: p.clone(),
            dt,
            delta_ref: f64::NAN,
            u: Array2::zeros((2 * cdim, 2 * cdim)),
            ntot,
        };
        prop.rebuild(delta0);
        prop
    }

    fn rebuild(&mut self, delta: f64) {
        let mut p = self.p.clone();
        p.delta_omega_d = delta;
        let mut h = build_jc_hamiltonian(&p).mat;
        let cdim = p.n_max + 1;
        for s in 0..2 {
            for n in 0..cdim {
                let idx = s * cdim + n;
                h[[idx, idx]] -=
                    c64(0.0, p.kappa * n as f64 + 0.5 * p.gamma * s as f64);
            }
        }
        self.u = expm(&(h * c64(0.0, -self.dt)));
        self.delta_ref = delta;
    }

    /// `exp(-i H'(delta) dt) psi`.
    pub(crate) fn apply(&mut self, amps: ArrayView1<C64>, delta: f64) -> Array1<C64> {
        let d = delta - self.delta_ref;
        if d == 0.0 {
            return self.u.dot(&amps);
        }
        if (d * self.dt).abs() > REBUILD_PHASE {
            self.rebuild(delta);
            return self.u.dot(&amps);
        }
        // exp(+i d ntot dt/2) U_ref exp(+i d ntot dt/2): H' shifts by -d*ntot
        let half = |v: &Array1<C64>| -> Array1<C64> {
            let mut out = v.clone();
            for (k, z) in out.iter_mut().enumerate() {
                *z *= C64::from_polar(1.0, 0.5 * d * self.dt * self.ntot[k]);
            }
            out
        };
        let inner = half(&amps.to_owned());
        half(&self.u.dot(&inner))
    }
}

/// What a single step did.
#[derive(Debug, Clone, Copy)]
pub struct StepOutcome {
    /// Time after the step.
    pub t: f64,
    pub jumped: Option<Channel>,
    /// Squared norm of the propagated state for a no-jump step, 1 otherwise.
    pub survival: f64,
    pub p_cavity: f64,
    pub p_spontaneous: f64,
}

/// Stepper for the photon-counting unraveling; drives one trajectory and
/// exposes the conditioned state for ensemble and bookkeeping tests.
pub struct DirectStepper {
    pub params: SystemParams,
    pub config: UnravelingConfig,
    pub state: ConditionedState,
    pub t: f64,
    pub step_index: usize,
    prop: CachedPropagator,
    rng: ChaCha8Rng,
}

impl DirectStepper {
    pub fn new(
        p: &SystemParams,
        cfg: &UnravelingConfig,
        psi0: &StateVector,
        stream: u64,
    ) -> Result<Self, TrajectoryError> {
        cfg.validate(p)?;
        let dim = 2 * (p.n_max + 1);
        if psi0.dim() != dim {
            return Err(TrajectoryError::DimensionMismatch {
                got: psi0.dim(),
                expected: dim,
            });
        }
        let delta0 = delta_at(p, cfg, 0.5 * cfg.dt);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(stream);
        Ok(Self {
            params: p.clone(),
            config: cfg.clone(),
            state: ConditionedState::new(psi0.clone()),
            t: 0.0,
            step_index: 0,
            prop: CachedPropagator::new(p, cfg.dt, delta0),
            rng,
        })
    }

    /// Cavity-output fraction feeding the counting channel: everything for
    /// direct detection, `r` for the wave-particle correlator.
    fn counting_fraction(&self) -> f64 {
        match self.config.scheme {
            Scheme::Direct => 1.0,
            _ => self.config.r,
        }
    }

    pub fn observables(&self) -> (f64, f64, f64) {
        let amps = self.state.psi.amps.view();
        let theta = self.config.theta.value_at(self.t);
        (
            photon_expectation(amps, self.params.n_max),
            atom_expectation(amps, self.params.n_max),
            quadrature_expectation(amps, theta, self.params.n_max),
        )
    }

    pub fn step(&mut self) -> Result<StepOutcome, TrajectoryError> {
        let dt = self.config.dt;
        let n_max = self.params.n_max;
        let amps = self.state.psi.amps.view();
        let p_cavity =
            2.0 * self.params.kappa * self.counting_fraction() * photon_expectation(amps, n_max)
                * dt;
        let p_spontaneous = self.params.gamma * atom_expectation(amps, n_max) * dt;
        let p_tot = p_cavity + p_spontaneous;
        if p_tot > 0.1 {
            return Err(TrajectoryError::JumpProbabilityTooLarge { t: self.t, p: p_tot });
        }
        let u: f64 = self.rng.random();
        let mut outcome = StepOutcome {
            t: self.t + dt,
            jumped: None,
            survival: 1.0,
            p_cavity,
            p_spontaneous,
        };
        if u < p_cavity {
            let raw = apply_lowering(self.state.psi.amps.view(), n_max);
            self.state.collapse(raw);
            outcome.jumped = Some(Channel::Cavity);
        } else if u < p_tot {
            let raw = apply_sigma_minus(self.state.psi.amps.view(), n_max);
            self.state.collapse(raw);
            outcome.jumped = Some(Channel::Spontaneous);
        } else {
            let delta = delta_at(&self.params, &self.config, self.t + 0.5 * dt);
            let raw = self.prop.apply(self.state.psi.amps.view(), delta);
            let norm = self.state.absorb(raw);
            outcome.survival = norm * norm;
        }
        self.t += dt;
        self.step_index += 1;
        Ok(outcome)
    }
}

/// Scheduled drive detuning, falling back to the fixed parameter value.
pub(crate) fn delta_at(p: &SystemParams, cfg: &UnravelingConfig, t: f64) -> f64 {
    match &cfg.delta_schedule {
        Some(s) => s.value_at(t),
        None => p.delta_omega_d,
    }
}

/// Run one photon-counting trajectory to `cfg.duration`.
pub fn run_direct(
    p: &SystemParams,
    cfg: &UnravelingConfig,
    psi0: &StateVector,
) -> Result<TrajectoryRecord, TrajectoryError> {
    if cfg.scheme != Scheme::Direct {
        return Err(TrajectoryError::SchemeMismatch {
            expected: "direct",
            got: cfg.scheme.as_str(),
        });
    }
    let mut stepper = DirectStepper::new(p, cfg, psi0, 0)?;
    let mut record = TrajectoryRecord {
        jumps: Vec::new(),
        current_samples: Vec::new(),
        state_snapshots: Vec::new(),
        config: cfg.clone(),
        params: p.clone(),
    };
    let n_steps = cfg.n_steps();
    if let Some(_stride) = cfg.snapshot_stride {
        record.state_snapshots.push((0.0, stepper.state.psi.clone()));
    }
    for k in 0..n_steps {
        let outcome = stepper.step()?;
        if let Some(channel) = outcome.jumped {
            record.jumps.push((outcome.t, channel));
        }
        if let Some(stride) = cfg.snapshot_stride {
            if (k + 1) % stride == 0 {
                record
                    .state_snapshots
                    .push((stepper.t, stepper.state.psi.clone()));
            }
        }
    }
    Ok(record)
}
