//! Operational estimators over trajectory records: click-triggered current
//! sampling, waiting-time histograms, time-averaged states, and two-sample
//! Kolmogorov-Smirnov helpers for comparing click statistics.

use crate::config::{Scheme, UnravelingConfig};
use crate::record::{Channel, TrajectoryRecord};
use crate::TrajectoryError;
use master_equation::series::{CorrelationKind, CorrelationSeries};
use ndarray::Array2;
use operator_core::{DensityMatrix, StateVector, SystemParams, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Click-triggered average of the filtered current, the operational stand-in
/// for the quadrature-intensity correlator.
#[derive(Debug, Clone)]
pub struct HSample {
    pub series: CorrelationSeries,
    /// Number of start times that entered the average.
    pub n_starts: usize,
    /// Residual noise level of the average, `sqrt(B / (2 N_s))`: the filter
    /// passes shot noise of variance `B/2` and the starts average it down.
    pub noise_scale: f64,
}

/// Density-normalized histogram of inter-click intervals.
#[derive(Debug, Clone)]
pub struct WaitingHistogram {
    pub series: CorrelationSeries,
    /// Number of intervals binned.
    pub count: usize,
    pub mean: f64,
    /// Sample variance of the intervals.
    pub variance: f64,
    pub bin_width: f64,
}

fn note(p: &SystemParams, cfg: &UnravelingConfig) -> String {
    format!(
        "g={}, kappa={}, gamma={}, eps_d={}, delta_omega_d={}, r={}, B={}, seed={}",
        p.g, p.kappa, p.gamma, p.eps_d, p.delta_omega_d, cfg.r, cfg.bandwidth_b, cfg.seed
    )
}

fn check_wave_particle(record: &TrajectoryRecord) -> Result<(), TrajectoryError> {
    if record.config.scheme != Scheme::WaveParticle {
        return Err(TrajectoryError::SchemeMismatch {
            expected: "wave_particle",
            got: record.config.scheme.as_str(),
        });
    }
    if !(record.config.r > 0.0 && record.config.r < 1.0) {
        return Err(TrajectoryError::SchemeMismatch {
            expected: "APD fraction strictly inside (0, 1)",
            got: "boundary r",
        });
    }
    Ok(())
}

fn grid_bounds(tau_grid: &[f64]) -> (f64, f64) {
    let lo = tau_grid.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tau_grid.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 0.0)
    }
}

/// APD clicks whose whole delay window stays inside the current record.
fn interior_starts(record: &TrajectoryRecord, tau_lo: f64, tau_hi: f64) -> Vec<f64> {
    let samples = &record.current_samples;
    if samples.is_empty() {
        return Vec::new();
    }
    let span = (samples[0].0, samples[samples.len() - 1].0);
    record
        .clicks(Channel::Cavity)
        .filter(|t| t + tau_lo >= span.0 && t + tau_hi <= span.1)
        .collect()
}

fn averaged_current(
    pairs: &[(&TrajectoryRecord, Vec<f64>)],
    tau_grid: &[f64],
) -> (Vec<f64>, usize) {
    let mut values = vec![0.0; tau_grid.len()];
    let mut n = 0;
    for (record, starts) in pairs {
        for t0 in starts {
            for (k, tau) in tau_grid.iter().enumerate() {
                // starts are pre-filtered so every t0 + tau interpolates
                values[k] += record.current_at(t0 + tau).unwrap().re;
            }
        }
        n += starts.len();
    }
    for v in &mut values {
        *v /= n as f64;
    }
    (values, n)
}

fn h_sample(
    tau_grid: &[f64],
    values: Vec<f64>,
    n_starts: usize,
    record: &TrajectoryRecord,
    how: &str,
) -> HSample {
    let b = record.config.bandwidth_b;
    HSample {
        series: CorrelationSeries {
            tau: tau_grid.to_vec(),
            values,
            values_imag: None,
            kind: CorrelationKind::HTheta,
            theta: Some(record.config.theta.value_at(0.0)),
            normalization: format!(
                "mean filtered current over {how}; carries the gain sqrt(8 kappa (1-r)) \
                 relative to <A_theta>"
            ),
            params_note: note(&record.params, &record.config),
        },
        n_starts,
        noise_scale: (b / (2.0 * n_starts as f64)).sqrt(),
    }
}

/// Average the current record at delays from each APD click of a single
/// realization, the estimator a bench experiment would run.
pub fn sample_h_operational(
    record: &TrajectoryRecord,
    tau_grid: &[f64],
) -> Result<HSample, TrajectoryError> {
    check_wave_particle(record)?;
    let (tau_lo, tau_hi) = grid_bounds(tau_grid);
    let starts = interior_starts(record, tau_lo, tau_hi);
    if starts.is_empty() {
        return Err(TrajectoryError::NoClicks);
    }
    let pairs = [(record, starts)];
    let (values, n) = averaged_current(&pairs, tau_grid);
    Ok(h_sample(tau_grid, values, n, record, "click-triggered starts"))
}

/// Pool the click-triggered averages of many records; start count and noise
/// scale reflect the whole pool.
pub fn sample_h_ensemble(
    records: &[TrajectoryRecord],
    tau_grid: &[f64],
) -> Result<HSample, TrajectoryError> {
    let (tau_lo, tau_hi) = grid_bounds(tau_grid);
    let mut pairs = Vec::new();
    for record in records {
        check_wave_particle(record)?;
        let starts = interior_starts(record, tau_lo, tau_hi);
        if !starts.is_empty() {
            pairs.push((record, starts));
        }
    }
    if pairs.is_empty() {
        return Err(TrajectoryError::NoClicks);
    }
    let (values, n) = averaged_current(&pairs, tau_grid);
    Ok(h_sample(tau_grid, values, n, pairs[0].0, "pooled click-triggered starts"))
}

/// Same average with uniform random start times instead of clicks; the
/// conditioning disappears and the series estimates the unconditioned mean
/// current.
pub fn sample_h_shuffled(
    record: &TrajectoryRecord,
    n_starts: usize,
    tau_grid: &[f64],
    seed: u64,
) -> Result<HSample, TrajectoryError> {
    check_wave_particle(record)?;
    if n_starts == 0 {
        return Err(TrajectoryError::NoClicks);
    }
    let samples = &record.current_samples;
    if samples.is_empty() {
        return Err(TrajectoryError::EmptyWindow { lo: 0.0, hi: 0.0 });
    }
    let (tau_lo, tau_hi) = grid_bounds(tau_grid);
    let lo = samples[0].0 - tau_lo;
    let hi = samples[samples.len() - 1].0 - tau_hi;
    if !(hi > lo) {
        return Err(TrajectoryError::EmptyWindow { lo, hi });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let starts: Vec<f64> = (0..n_starts)
        .map(|_| lo + (hi - lo) * rng.random::<f64>())
        .collect();
    let pairs = [(record, starts)];
    let (values, n) = averaged_current(&pairs, tau_grid);
    Ok(h_sample(tau_grid, values, n, record, "uniform random starts"))
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[hi] * frac
}

/// Histogram of inter-click intervals pooled over records, density-normalized
/// so the bins integrate to one. Bin width follows the Freedman-Diaconis rule
/// capped at 400 bins.
pub fn waiting_histogram(
    records: &[TrajectoryRecord],
    channel: Channel,
) -> Result<WaitingHistogram, TrajectoryError> {
    let mut intervals = Vec::new();
    let mut clicks = 0;
    for record in records {
        clicks += record.click_count(channel);
        intervals.extend(record.waiting_intervals(channel));
    }
    if intervals.is_empty() {
        return Err(TrajectoryError::TooFewClicks {
            found: clicks,
            need: 2,
        });
    }
    intervals.sort_by(f64::total_cmp);
    let n = intervals.len() as f64;
    let mean = intervals.iter().sum::<f64>() / n;
    let variance = if intervals.len() > 1 {
        intervals.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    let max = *intervals.last().unwrap();
    let iqr = quantile(&intervals, 0.75) - quantile(&intervals, 0.25);
    let raw_width = if iqr > 0.0 {
        2.0 * iqr / n.cbrt()
    } else {
        max.max(f64::MIN_POSITIVE) / 16.0
    };
    let n_bins = ((max / raw_width).ceil() as usize).clamp(1, 400);
    let width = max / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for x in &intervals {
        let idx = ((x / width) as usize).min(n_bins - 1);
        counts[idx] += 1;
    }
    let values: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let tau: Vec<f64> = (0..n_bins).map(|k| (k as f64 + 0.5) * width).collect();
    let first = &records[0];
    Ok(WaitingHistogram {
        series: CorrelationSeries {
            tau,
            values,
            values_imag: None,
            kind: match channel {
                Channel::Cavity => CorrelationKind::WaitForward,
                Channel::Spontaneous => CorrelationKind::WaitSide,
            },
            theta: None,
            normalization: format!("density per unit time over {} intervals", intervals.len()),
            params_note: note(&first.params, &first.config),
        },
        count: intervals.len(),
        mean,
        variance,
        bin_width: width,
    })
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`, with ties
/// resolved by evaluating only after both empirical CDFs pass each value.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(f64::total_cmp);
    ys.sort_by(f64::total_cmp);
    let (n, m) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d: f64 = 0.0;
    while i < xs.len() && j < ys.len() {
        let v = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= v {
            i += 1;
        }
        while j < ys.len() && ys[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sided p-value for the two-sample KS statistic, using the
/// Kolmogorov distribution with the standard small-sample correction
/// `lambda = (sqrt(ne) + 0.12 + 0.11/sqrt(ne)) d`, `ne = n m / (n + m)`.
pub fn ks_p_value(d: f64, n: usize, m: usize) -> f64 {
    let ne = (n as f64 * m as f64) / ((n + m) as f64);
    let sqne = ne.sqrt();
    let lambda = (sqne + 0.12 + 0.11 / sqne) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let term = (-2.0 * (j as f64 * lambda).powi(2)).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn add_outer(acc: &mut Array2<C64>, psi: &StateVector, w: f64) {
    for i in 0..psi.dim() {
        let ai = psi.amps[i];
        for j in 0..psi.dim() {
            acc[[i, j]] += ai * psi.amps[j].conj() * w;
        }
    }
}

/// Trapezoid average of the pure-state projectors over the snapshots inside
/// the window; a zero-length window picks the nearest snapshot.
pub fn time_averaged_state(
    record: &TrajectoryRecord,
    window: (f64, f64),
) -> Result<DensityMatrix, TrajectoryError> {
    let snaps = &record.state_snapshots;
    if snaps.is_empty() {
        return Err(TrajectoryError::NoSnapshots);
    }
    let (lo, hi) = window;
    if !(hi >= lo) {
        return Err(TrajectoryError::EmptyWindow { lo, hi });
    }
    let dim = snaps[0].1.dim();
    if hi == lo {
        let nearest = snaps
            .iter()
            .min_by(|a, b| (a.0 - lo).abs().total_cmp(&(b.0 - lo).abs()))
            .unwrap();
        let mut acc = Array2::zeros((dim, dim));
        add_outer(&mut acc, &nearest.1, 1.0);
        return Ok(DensityMatrix::new(acc));
    }
    let slack = 1e-9 * (1.0 + hi.abs());
    let inside: Vec<&(f64, StateVector)> = snaps
        .iter()
        .filter(|(t, _)| *t >= lo - slack && *t <= hi + slack)
        .collect();
    if inside.is_empty() {
        return Err(TrajectoryError::EmptyWindow { lo, hi });
    }
    let mut acc = Array2::zeros((dim, dim));
    if inside.len() == 1 {
        add_outer(&mut acc, &inside[0].1, 1.0);
        return Ok(DensityMatrix::new(acc));
    }
    let mut total = 0.0;
    for (k, (t, psi)) in inside.iter().enumerate() {
        let left = if k == 0 { *t } else { inside[k - 1].0 };
        let right = if k + 1 == inside.len() {
            *t
        } else {
            inside[k + 1].0
        };
        let w = 0.5 * (right - left);
        add_outer(&mut acc, psi, w);
        total += w;
    }
    acc.mapv_inplace(|z| z / total);
    Ok(DensityMatrix::new(acc))
}
