//! Diffusive unravelings: the homodyne branch of the wave-particle
//! correlator and heterodyne detection of the full cavity output.
//!
//! Both schemes split each step into an exact half-step propagation under the
//! non-Hermitian `H'`, a stochastic substep carrying only the measurement
//! drift and noise, and a second exact half-step. The stochastic substep is
//! the explicit weak order-2.0 scheme of Kloeden and Platen by default, with
//! Euler-Maruyama kept as a cross-check. The filtered photocurrent uses the
//! exact exponential-decay update and is driven by the same noise increment
//! as the state, which is what the record-replay invariants test.

use crate::config::{Scheme, SdeIntegrator, UnravelingConfig};
use crate::direct::{
    amp_expectation, apply_lowering, apply_sigma_minus, atom_expectation, delta_at,
    photon_expectation, quadrature_expectation, CachedPropagator, ConditionedState,
};
use crate::record::{Channel, TrajectoryRecord};
use crate::TrajectoryError;
use ndarray::Array1;
use operator_core::{c64, StateVector, SystemParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Everything one step of a diffusive scheme did; enough to reconstruct the
/// noise from the current record and replay the state update.
#[derive(Debug, Clone, Copy)]
pub struct DiffusiveStep {
    /// Time after the step.
    pub t: f64,
    pub jumped: Option<Channel>,
    /// Wiener increment: real `dW` for wave-particle, complex `dZ` for
    /// heterodyne.
    pub noise: C64,
    /// Pre-step conditioned signal entering the current filter, in current
    /// units: the quadrature drift for wave-particle, `2 kappa <a^+>` for
    /// heterodyne.
    pub signal: C64,
    /// Filtered current after the step.
    pub current: C64,
}

/// `y + s * dir`, the only vector primitive the stochastic substeps need.
fn add_scaled(base: &Array1<C64>, dir: &Array1<C64>, s: C64) -> Array1<C64> {
    let mut out = base.clone();
    for (o, d) in out.iter_mut().zip(dir.iter()) {
        *o += s * *d;
    }
    out
}

/// One explicit weak order-2.0 substep for `dy = alpha(y) b(y) dt + b(y) dM`
/// with linear `b`. `noise_mean_square` is `E[dM^2]`: `dt` for a real Wiener
/// increment, `0` for the isotropic complex one, which turns the final
/// difference term into the right Milstein correction in either case.
pub(crate) fn weak_order_two(
    y: &Array1<C64>,
    b: &impl Fn(&Array1<C64>) -> Array1<C64>,
    alpha: &impl Fn(&Array1<C64>) -> C64,
    dm: C64,
    noise_mean_square: f64,
    dt: f64,
) -> Array1<C64> {
    let sq = dt.sqrt();
    let b0 = b(y);
    let alpha0 = alpha(y);
    let a0 = b0.mapv(|z| z * alpha0);
    let drifted = add_scaled(y, &a0, c64(dt, 0.0));
    let y_bar = add_scaled(&drifted, &b0, dm);
    let y_plus = add_scaled(&drifted, &b0, c64(sq, 0.0));
    let y_minus = add_scaled(&drifted, &b0, c64(-sq, 0.0));
    let a_bar = {
        let scale = alpha(&y_bar);
        b(&y_bar).mapv(|z| z * scale)
    };
    let b_plus = b(&y_plus);
    let b_minus = b(&y_minus);
    let corr = (dm * dm - c64(noise_mean_square, 0.0)) * (0.25 / sq);
    let mut out = y.clone();
    for i in 0..out.len() {
        out[i] += (a_bar[i] + a0[i]) * (0.5 * dt)
            + (b_plus[i] + b_minus[i] + b0[i] * 2.0) * dm * 0.25
            + (b_plus[i] - b_minus[i]) * corr;
    }
    out
}

fn euler_maruyama(
    y: &Array1<C64>,
    b: &impl Fn(&Array1<C64>) -> Array1<C64>,
    alpha: &impl Fn(&Array1<C64>) -> C64,
    dm: C64,
    dt: f64,
) -> Array1<C64> {
    let b0 = b(y);
    let alpha0 = alpha(y);
    add_scaled(&add_scaled(y, &b0, alpha0 * dt), &b0, dm)
}

/// Exact one-step update of the RC filter `di = -B (i dt - d(record))`:
/// `i <- i e^{-B dt} + B * increment`, `increment = signal dt + noise`.
pub(crate) fn filter_update(i: C64, bandwidth_b: f64, dt: f64, increment: C64) -> C64 {
    i * (-bandwidth_b * dt).exp() + increment * bandwidth_b
}

/// Stepper for the wave-particle correlator: APD counting on a fraction `r`
/// of the cavity output, balanced homodyne detection of the rest.
pub struct WaveParticleStepper {
    pub params: SystemParams,
    pub config: UnravelingConfig,
    pub state: ConditionedState,
    pub t: f64,
    pub step_index: usize,
    /// Filtered homodyne difference current.
    pub current: f64,
    half: CachedPropagator,
    rng: ChaCha8Rng,
}

impl WaveParticleStepper {
    pub fn new(
        p: &SystemParams,
        cfg: &UnravelingConfig,
        psi0: &StateVector,
        stream: u64,
    ) -> Result<Self, TrajectoryError> {
        if cfg.scheme != Scheme::WaveParticle {
            return Err(TrajectoryError::SchemeMismatch {
                expected: "wave_particle",
                got: cfg.scheme.as_str(),
            });
        }
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
            current: 0.0,
            half: CachedPropagator::new(p, 0.5 * cfg.dt, delta0),
            rng,
        })
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

    /// Deterministic no-jump update for one step given the Wiener increment:
    /// half-step under `H'`, stochastic substep, half-step. Public so a
    /// record's reconstructed noise can be replayed against snapshots.
    pub fn apply_state_update(&mut self, psi: &StateVector, dw: f64, t: f64) -> Array1<C64> {
        let dt = self.config.dt;
        let n_max = self.params.n_max;
        let delta = delta_at(&self.params, &self.config, t + 0.5 * dt);
        let theta = self.config.theta.value_at(t + 0.5 * dt);
        let gain = (2.0 * self.params.kappa * (1.0 - self.config.r)).sqrt();
        let phase = C64::from_polar(gain, -theta);
        let b = |y: &Array1<C64>| -> Array1<C64> {
            let mut v = apply_lowering(y.view(), n_max);
            for z in v.iter_mut() {
                *z *= phase;
            }
            v
        };
        // drift = sqrt(8 kappa (1-r)) <A_theta> * b(y); expectations are
        // normalized quotients, so un-normalized inputs are fine
        let alpha = |y: &Array1<C64>| -> C64 {
            c64(
                2.0 * gain * quadrature_expectation(y.view(), theta, n_max),
                0.0,
            )
        };
        let mid = self.half.apply(psi.amps.view(), delta);
        let pushed = match self.config.integrator {
            SdeIntegrator::WeakOrderTwo => weak_order_two(&mid, &b, &alpha, c64(dw, 0.0), dt, dt),
            SdeIntegrator::EulerMaruyama => euler_maruyama(&mid, &b, &alpha, c64(dw, 0.0), dt),
        };
        self.half.apply(pushed.view(), delta)
    }

    pub fn step(&mut self) -> Result<DiffusiveStep, TrajectoryError> {
        let dt = self.config.dt;
        let p = self.params.clone();
        let n_max = p.n_max;
        let amps = self.state.psi.amps.view();
        let theta = self.config.theta.value_at(self.t);
        let signal = (8.0 * p.kappa * (1.0 - self.config.r)).sqrt()
            * quadrature_expectation(amps, theta, n_max);
        let p_cavity = 2.0 * p.kappa * self.config.r * photon_expectation(amps, n_max) * dt;
        let p_spontaneous = p.gamma * atom_expectation(amps, n_max) * dt;
        let p_tot = p_cavity + p_spontaneous;
        if p_tot > 0.1 {
            return Err(TrajectoryError::JumpProbabilityTooLarge { t: self.t, p: p_tot });
        }
        // fixed draw order per step keeps the stream aligned across branches
        let dw = dt.sqrt() * self.rng.sample::<f64, _>(StandardNormal);
        let u: f64 = self.rng.random();
        let mut jumped = None;
        if u < p_cavity {
            let raw = apply_lowering(self.state.psi.amps.view(), n_max);
            self.state.collapse(raw);
            jumped = Some(Channel::Cavity);
        } else if u < p_tot {
            let raw = apply_sigma_minus(self.state.psi.amps.view(), n_max);
            self.state.collapse(raw);
            jumped = Some(Channel::Spontaneous);
        } else {
            let psi = self.state.psi.clone();
            let raw = self.apply_state_update(&psi, dw, self.t);
            self.state.absorb(raw);
        }
        // the homodyne port integrates regardless of the APD's verdict, and
        // its increment carries the same dW that drove the state
        self.current = filter_update(
            c64(self.current, 0.0),
            self.config.bandwidth_b,
            dt,
            c64(signal * dt + dw, 0.0),
        )
        .re;
        self.t += dt;
        self.step_index += 1;
        Ok(DiffusiveStep {
            t: self.t,
            jumped,
            noise: c64(dw, 0.0),
            signal: c64(signal, 0.0),
            current: c64(self.current, 0.0),
        })
    }
}

/// Stepper for heterodyne detection: the whole cavity output beats against a
/// detuned local oscillator, leaving spontaneous emission as the only jump
/// channel and a complex current record.
pub struct HeterodyneStepper {
    pub params: SystemParams,
    pub config: UnravelingConfig,
    pub state: ConditionedState,
    pub t: f64,
    pub step_index: usize,
    /// Filtered complex heterodyne current.
    pub current: C64,
    half: CachedPropagator,
    rng: ChaCha8Rng,
}

impl HeterodyneStepper {
    pub fn new(
        p: &SystemParams,
        cfg: &UnravelingConfig,
        psi0: &StateVector,
        stream: u64,
    ) -> Result<Self, TrajectoryError> {
        if cfg.scheme != Scheme::Heterodyne {
            return Err(TrajectoryError::SchemeMismatch {
                expected: "heterodyne",
                got: cfg.scheme.as_str(),
            });
        }
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
            current: c64(0.0, 0.0),
            half: CachedPropagator::new(p, 0.5 * cfg.dt, delta0),
            rng,
        })
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

    /// No-jump update for one step given the complex increment `dZ`.
    pub fn apply_state_update(&mut self, psi: &StateVector, dz: C64, t: f64) -> Array1<C64> {
        let dt = self.config.dt;
        let n_max = self.params.n_max;
        let delta = delta_at(&self.params, &self.config, t + 0.5 * dt);
        let gain = (2.0 * self.params.kappa).sqrt();
        let b = |y: &Array1<C64>| -> Array1<C64> {
            let mut v = apply_lowering(y.view(), n_max);
            for z in v.iter_mut() {
                *z *= gain;
            }
            v
        };
        // drift = 2 kappa <a^+> a y = (sqrt(2 kappa) <a^+>) b(y)
        let alpha =
            |y: &Array1<C64>| -> C64 { amp_expectation(y.view(), n_max).conj() * gain };
        let mid = self.half.apply(psi.amps.view(), delta);
        let pushed = match self.config.integrator {
            SdeIntegrator::WeakOrderTwo => weak_order_two(&mid, &b, &alpha, dz, 0.0, dt),
            SdeIntegrator::EulerMaruyama => euler_maruyama(&mid, &b, &alpha, dz, dt),
        };
        self.half.apply(pushed.view(), delta)
    }

    pub fn step(&mut self) -> Result<DiffusiveStep, TrajectoryError> {
        let dt = self.config.dt;
        let p = self.params.clone();
        let n_max = p.n_max;
        let amps = self.state.psi.amps.view();
        let signal = amp_expectation(amps, n_max).conj() * (2.0 * p.kappa);
        let p_spontaneous = p.gamma * atom_expectation(amps, n_max) * dt;
        if p_spontaneous > 0.1 {
            return Err(TrajectoryError::JumpProbabilityTooLarge {
                t: self.t,
                p: p_spontaneous,
            });
        }
        let nx: f64 = self.rng.sample(StandardNormal);
        let ny: f64 = self.rng.sample(StandardNormal);
        let u: f64 = self.rng.random();
        // dZ = (dW_x + i dW_y)/sqrt(2), so E[|dZ|^2] = dt and E[dZ^2] = 0
        let dz = c64(nx, ny) * (0.5 * dt).sqrt();
        let increment = signal * dt + dz * (2.0 * p.kappa).sqrt();
        let mut jumped = None;
        if u < p_spontaneous {
            let raw = apply_sigma_minus(self.state.psi.amps.view(), n_max);
            self.state.collapse(raw);
            jumped = Some(Channel::Spontaneous);
        } else {
            let psi = self.state.psi.clone();
            let raw = self.apply_state_update(&psi, dz, self.t);
            self.state.absorb(raw);
        }
        self.current = filter_update(self.current, self.config.bandwidth_b, dt, increment);
        self.t += dt;
        self.step_index += 1;
        Ok(DiffusiveStep {
            t: self.t,
            jumped,
            noise: dz,
            signal,
            current: self.current,
        })
    }
}

/// Shared record-assembly loop for the two diffusive schemes.
trait DiffusiveScheme {
    fn advance(&mut self) -> Result<DiffusiveStep, TrajectoryError>;
    fn psi(&self) -> &StateVector;
    fn t(&self) -> f64;
}

impl DiffusiveScheme for WaveParticleStepper {
    fn advance(&mut self) -> Result<DiffusiveStep, TrajectoryError> {
        self.step()
    }
    fn psi(&self) -> &StateVector {
        &self.state.psi
    }
    fn t(&self) -> f64 {
        self.t
    }
}

impl DiffusiveScheme for HeterodyneStepper {
    fn advance(&mut self) -> Result<DiffusiveStep, TrajectoryError> {
        self.step()
    }
    fn psi(&self) -> &StateVector {
        &self.state.psi
    }
    fn t(&self) -> f64 {
        self.t
    }
}

fn run_diffusive<S: DiffusiveScheme>(
    mut stepper: S,
    p: &SystemParams,
    cfg: &UnravelingConfig,
) -> Result<TrajectoryRecord, TrajectoryError> {
    let cadence = cfg.current_cadence();
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
    for k in 0..cfg.n_steps() {
        let step = stepper.advance()?;
        if let Some(channel) = step.jumped {
            record.jumps.push((step.t, channel));
        }
        if (k + 1) % cadence == 0 {
            record.current_samples.push((step.t, step.current));
        }
        if let Some(stride) = cfg.snapshot_stride {
            if (k + 1) % stride == 0 {
                record.state_snapshots.push((stepper.t(), stepper.psi().clone()));
            }
        }
    }
    Ok(record)
}

/// Run one wave-particle trajectory to `cfg.duration`.
pub fn run_wave_particle(
    p: &SystemParams,
    cfg: &UnravelingConfig,
    psi0: &StateVector,
) -> Result<TrajectoryRecord, TrajectoryError> {
    run_diffusive(WaveParticleStepper::new(p, cfg, psi0, 0)?, p, cfg)
}

/// Run one heterodyne trajectory to `cfg.duration`.
pub fn run_heterodyne(
    p: &SystemParams,
    cfg: &UnravelingConfig,
    psi0: &StateVector,
) -> Result<TrajectoryRecord, TrajectoryError> {
    run_diffusive(HeterodyneStepper::new(p, cfg, psi0, 0)?, p, cfg)
}
