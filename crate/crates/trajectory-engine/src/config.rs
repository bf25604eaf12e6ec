//! Unraveling configuration: measurement scheme, detector settings, step
//! control and optional time dependence of the drive detuning and LO phase.

use operator_core::SystemParams;
use std::f64::consts::PI;
use thiserror::Error;

/// Which measurement record conditions the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Photon counting on both output channels.
    Direct,
    /// APD on a fraction `r` of the cavity output, balanced homodyne
    /// detection on the rest.
    WaveParticle,
    /// All of the cavity output heterodyned; complex current.
    Heterodyne,
    /// Undriven, uncoupled cavity decay under mode-matched homodyne
    /// detection; used for charge tomography.
    FreeDecay,
}

impl Scheme {
    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Direct => "direct",
            Scheme::WaveParticle => "wave_particle",
            Scheme::Heterodyne => "heterodyne",
            Scheme::FreeDecay => "free_decay",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "direct" => Some(Scheme::Direct),
            "wave_particle" => Some(Scheme::WaveParticle),
            "heterodyne" => Some(Scheme::Heterodyne),
            "free_decay" => Some(Scheme::FreeDecay),
            _ => None,
        }
    }

    /// Does the record carry a filtered photocurrent?
    pub fn has_current(self) -> bool {
        matches!(self, Scheme::WaveParticle | Scheme::Heterodyne)
    }

    pub fn complex_current(self) -> bool {
        matches!(self, Scheme::Heterodyne)
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Stochastic integrator for the diffusive schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SdeIntegrator {
    /// Explicit weak order 2.0 scheme of Kloeden and Platen, wrapped in a
    /// Strang sandwich of exact half-step drift propagators.
    #[default]
    WeakOrderTwo,
    /// Euler-Maruyama on the stochastic part, same drift sandwich; kept for
    /// cross-validation at halved step size.
    EulerMaruyama,
}

impl SdeIntegrator {
    pub fn as_str(self) -> &'static str {
        match self {
            SdeIntegrator::WeakOrderTwo => "weak2",
            SdeIntegrator::EulerMaruyama => "euler",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "weak2" => Some(SdeIntegrator::WeakOrderTwo),
            "euler" => Some(SdeIntegrator::EulerMaruyama),
            _ => None,
        }
    }
}

/// Piecewise-linear control curve; constant before the first and after the
/// last breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule {
    pub points: Vec<(f64, f64)>,
}

impl Schedule {
    pub fn constant(v: f64) -> Self {
        Self { points: vec![(0.0, v)] }
    }

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, ConfigError> {
        if points.is_empty() {
            return Err(ConfigError::EmptySchedule);
        }
        for (i, w) in points.windows(2).enumerate() {
            if !(w[1].0 > w[0].0) {
                return Err(ConfigError::UnorderedSchedule { index: i + 1 });
            }
        }
        Ok(Self { points })
    }

    /// Linear ramp over `[0, duration]`, the shape used by detuning scans.
    pub fn ramp(from: f64, to: f64, duration: f64) -> Result<Self, ConfigError> {
        Self::new(vec![(0.0, from), (duration, to)])
    }

    pub fn is_constant(&self) -> bool {
        self.points.iter().all(|(_, v)| *v == self.points[0].1)
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        if t >= pts[pts.len() - 1].0 {
            return pts[pts.len() - 1].1;
        }
        let k = pts.partition_point(|(tp, _)| *tp <= t);
        let (t0, v0) = pts[k - 1];
        let (t1, v1) = pts[k];
        v0 + (v1 - v0) * (t - t0) / (t1 - t0)
    }
}

/// Everything a single trajectory needs besides the system parameters and
/// the initial state. A `(config, seed)` pair pins the record bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnravelingConfig {
    pub scheme: Scheme,
    /// Fraction of the cavity output flux sent to the APD.
    pub r: f64,
    /// Local-oscillator phase; a single breakpoint means a fixed phase.
    pub theta: Schedule,
    /// Detector bandwidth of the current filter.
    pub bandwidth_b: f64,
    pub dt: f64,
    pub seed: u64,
    pub duration: f64,
    /// Optional drive-detuning ramp; `None` keeps `SystemParams` untouched.
    pub delta_schedule: Option<Schedule>,
    /// Store every `stride`-th conditioned state; `None` keeps none.
    pub snapshot_stride: Option<usize>,
    pub integrator: SdeIntegrator,
}

/// Step bound that resolves the quantum beat at `2g`.
pub fn beat_resolving_dt(p: &SystemParams) -> f64 {
    if p.g > 0.0 {
        PI / (40.0 * p.g)
    } else {
        f64::INFINITY
    }
}

/// Largest step obeying every stability bound: the beat at `2g`, the filter
/// product `B dt <= 0.1`, and twenty steps per cavity lifetime.
pub fn auto_dt(p: &SystemParams, bandwidth_b: f64) -> f64 {
    let mut dt = beat_resolving_dt(p);
    if bandwidth_b > 0.0 {
        dt = dt.min(0.1 / bandwidth_b);
    }
    if p.kappa > 0.0 {
        dt = dt.min(0.05 / p.kappa);
    }
    dt
}

impl UnravelingConfig {
    /// Direct photodetection with a beat-resolving step and no extras.
    pub fn direct(p: &SystemParams, duration: f64, seed: u64) -> Self {
        Self {
            scheme: Scheme::Direct,
            r: 1.0,
            theta: Schedule::constant(0.0),
            bandwidth_b: 0.0,
            dt: auto_dt(p, 0.0),
            seed,
            duration,
            delta_schedule: None,
            snapshot_stride: None,
            integrator: SdeIntegrator::default(),
        }
    }

    pub fn wave_particle(
        p: &SystemParams,
        r: f64,
        theta: f64,
        bandwidth_b: f64,
        duration: f64,
        seed: u64,
    ) -> Self {
        Self {
            scheme: Scheme::WaveParticle,
            r,
            theta: Schedule::constant(theta),
            bandwidth_b,
            dt: auto_dt(p, bandwidth_b),
            seed,
            duration,
            delta_schedule: None,
            snapshot_stride: None,
            integrator: SdeIntegrator::default(),
        }
    }

    pub fn heterodyne(p: &SystemParams, bandwidth_b: f64, duration: f64, seed: u64) -> Self {
        Self {
            scheme: Scheme::Heterodyne,
            r: 0.0,
            theta: Schedule::constant(0.0),
            bandwidth_b,
            dt: auto_dt(p, bandwidth_b),
            seed,
            duration,
            delta_schedule: None,
            snapshot_stride: None,
            integrator: SdeIntegrator::default(),
        }
    }

    /// Number of integrator steps covering `duration`.
    pub fn n_steps(&self) -> usize {
        (self.duration / self.dt).ceil() as usize
    }

    /// Steps between stored current samples: at least four samples per
    /// filter time constant, and never sparser than the step itself.
    pub fn current_cadence(&self) -> usize {
        if self.bandwidth_b <= 0.0 {
            return usize::MAX;
        }
        (((1.0 / self.bandwidth_b) / (4.0 * self.dt)).floor() as usize).max(1)
    }

    pub fn validate(&self, p: &SystemParams) -> Result<(), ConfigError> {
        if !(0.0..=1.0).contains(&self.r) || !self.r.is_finite() {
            return Err(ConfigError::BranchingOutOfRange { r: self.r });
        }
        if !(self.dt > 0.0) {
            return Err(ConfigError::NonpositiveStep { dt: self.dt });
        }
        if !(self.duration > 0.0) {
            return Err(ConfigError::NonpositiveDuration {
                duration: self.duration,
            });
        }
        let max_dt = beat_resolving_dt(p);
        // tiny slack so dt = pi/(40g) written through a decimal round-trips
        if self.dt > max_dt * (1.0 + 1e-12) {
            return Err(ConfigError::StepTooCoarse {
                dt: self.dt,
                max: max_dt,
            });
        }
        if self.scheme.has_current() {
            let product = self.bandwidth_b * self.dt;
            if !(self.bandwidth_b > 0.0) {
                return Err(ConfigError::NonpositiveBandwidth {
                    bandwidth_b: self.bandwidth_b,
                });
            }
            if product > 0.1 * (1.0 + 1e-12) {
                return Err(ConfigError::FilterUnstable { product });
            }
        }
        if self.scheme == Scheme::FreeDecay && (p.eps_d != 0.0 || p.g != 0.0) {
            return Err(ConfigError::DriveOnDuringDecay {
                eps_d: p.eps_d,
                g: p.g,
            });
        }
        Schedule::new(self.theta.points.clone())?;
        if let Some(s) = &self.delta_schedule {
            Schedule::new(s.points.clone())?;
        }
        if self.snapshot_stride == Some(0) {
            return Err(ConfigError::ZeroSnapshotStride);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("APD branching fraction r = {r} outside [0, 1]")]
    BranchingOutOfRange { r: f64 },
    #[error("dt = {dt} must be positive")]
    NonpositiveStep { dt: f64 },
    #[error("duration = {duration} must be positive")]
    NonpositiveDuration { duration: f64 },
    #[error("dt = {dt} exceeds the beat-resolving bound pi/(40 g) = {max}")]
    StepTooCoarse { dt: f64, max: f64 },
    #[error("filter product B dt = {product} exceeds the stability bound 0.1")]
    FilterUnstable { product: f64 },
    #[error("current filter needs a positive bandwidth, got {bandwidth_b}")]
    NonpositiveBandwidth { bandwidth_b: f64 },
    #[error("free decay requires eps_d = g = 0, got eps_d = {eps_d}, g = {g}")]
    DriveOnDuringDecay { eps_d: f64, g: f64 },
    #[error("schedule needs at least one breakpoint")]
    EmptySchedule,
    #[error("schedule times must increase strictly (breakpoint {index})")]
    UnorderedSchedule { index: usize },
    #[error("snapshot stride must be at least 1")]
    ZeroSnapshotStride,
}
