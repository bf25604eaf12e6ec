//! Charge tomography of the cavity field by mode-matched homodyne detection
//! of its free decay.
//!
//! The drive and the coupling are off, so the atom factors out: the cavity
//! part of the input state decays alone under `kappa`, conditioned on the
//! homodyne record. Each sample draws a pure state from the eigenbasis of
//! the reduced cavity density matrix, integrates the conditional decay, and
//! accumulates the exponentially weighted charge
//! `Q = sqrt(kappa/2) * sum e^{-kappa (t_k + dt/2)} dq_k` with
//! `dq = sqrt(8 kappa) <A_theta>_REC dt + dW`. The resulting `Q` histogram
//! estimates the quadrature marginal of the field's Wigner function: a
//! vacuum input gives charges of variance exactly 1/4 and a coherent input
//! shifts the mean to `Re(alpha e^{-i theta})`, both up to the 1e-4 photon
//! fraction left at the fixed integration horizon.

use crate::diffusive::weak_order_two;
use crate::TrajectoryError;
use ndarray::Array1;
use ndarray_linalg::{Eigh, UPLO};
use operator_core::{c64, partial_trace_atom, DensityMatrix, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Integration step in cavity lifetimes; the charge weights are midpoint
/// sampled, so the quadrature error is second order in this number.
const KAPPA_DT: f64 = 2e-3;

/// Decay horizon: residual photon fraction `e^{-2 kappa T} = 1e-4`.
const KAPPA_T: f64 = 4.605170185988091;

/// Normalized histogram of charges on uniform bins; samples outside the
/// window are counted in the total, so the density stays comparable to a
/// distribution over the whole line.
#[derive(Debug, Clone, PartialEq)]
pub struct ChargeHistogram {
    /// Bin edges, length one more than `density`.
    pub edges: Vec<f64>,
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
}

/// Bin `samples` into `n_bins` uniform bins over `[lo, hi]`.
pub fn charge_histogram(samples: &[f64], lo: f64, hi: f64, n_bins: usize) -> ChargeHistogram {
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0usize; n_bins];
    for &q in samples {
        if q >= lo && q <= hi {
            let idx = (((q - lo) / width) as usize).min(n_bins - 1);
            counts[idx] += 1;
        }
    }
    let norm = samples.len() as f64 * width;
    ChargeHistogram {
        edges: (0..=n_bins).map(|k| lo + k as f64 * width).collect(),
        centers: (0..n_bins).map(|k| lo + (k as f64 + 0.5) * width).collect(),
        density: counts.iter().map(|&c| c as f64 / norm).collect(),
    }
}

#[derive(Debug, Clone)]
pub struct TomographyResult {
    pub samples: Vec<f64>,
    pub mean: f64,
    /// Sample variance of the charges.
    pub variance: f64,
    pub theta: f64,
    /// Auto-binned view of the samples, four standard deviations wide.
    pub histogram: ChargeHistogram,
}

// Cavity-only sparse helpers; the flat two-block layout of the full system
// does not apply here.

fn lower(amps: &Array1<C64>) -> Array1<C64> {
    let mut out = Array1::zeros(amps.len());
    for n in 1..amps.len() {
        out[n - 1] = amps[n] * (n as f64).sqrt();
    }
    out
}

fn amp_quotient(amps: &Array1<C64>) -> C64 {
    let mut num = c64(0.0, 0.0);
    let mut den = 0.0;
    for n in 0..amps.len() {
        den += amps[n].norm_sqr();
        if n > 0 {
            num += amps[n - 1].conj() * amps[n] * (n as f64).sqrt();
        }
    }
    num / den
}

/// Integrate one conditional free decay and return the accumulated charge.
fn one_charge(psi0: &Array1<C64>, theta: f64, rng: &mut ChaCha8Rng) -> f64 {
    let dt = KAPPA_DT;
    let n_steps = (KAPPA_T / dt).ceil() as usize;
    let cdim = psi0.len();
    // exp(-kappa n dt / 2) on the number basis
    let half: Vec<f64> = (0..cdim).map(|n| (-(n as f64) * dt / 2.0).exp()).collect();
    let phase = C64::from_polar(2.0_f64.sqrt(), -theta);
    let b = |y: &Array1<C64>| -> Array1<C64> {
        let mut v = lower(y);
        for z in v.iter_mut() {
            *z *= phase;
        }
        v
    };
    let alpha = |y: &Array1<C64>| -> C64 {
        let quad = (C64::from_polar(1.0, -theta) * amp_quotient(y)).re;
        c64(8.0_f64.sqrt() * quad, 0.0)
    };
    let mut psi = psi0.clone();
    let mut weighted = 0.0;
    for k in 0..n_steps {
        let t = k as f64 * dt;
        let quad_pre = (C64::from_polar(1.0, -theta) * amp_quotient(&psi)).re;
        let dw = dt.sqrt() * rng.sample::<f64, _>(StandardNormal);
        let dq = 8.0_f64.sqrt() * quad_pre * dt + dw;
        weighted += (-(t + 0.5 * dt)).exp() * dq;
        let mut mid = psi.clone();
        for (z, h) in mid.iter_mut().zip(half.iter()) {
            *z *= *h;
        }
        let mut out = weak_order_two(&mid, &b, &alpha, c64(dw, 0.0), dt, dt);
        for (z, h) in out.iter_mut().zip(half.iter()) {
            *z *= *h;
        }
        let norm = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        psi = out.mapv(|z| z / norm);
    }
    0.5_f64.sqrt() * weighted
}

/// Sample the charge distribution of the free decay of `rho` (a full-system
/// state; the atom is traced out first). Time is measured in cavity
/// lifetimes, which fixes the charge scale: the result depends only on the
/// field state and `theta`.
pub fn free_decay_tomography(
    rho: &DensityMatrix,
    theta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<TomographyResult, TrajectoryError> {
    if n_samples < 2 {
        return Err(TrajectoryError::EmptyEnsemble { n: n_samples });
    }
    let cavity = partial_trace_atom(rho).map_err(|_| TrajectoryError::DimensionMismatch {
        got: rho.dim(),
        expected: rho.dim() + 1,
    })?;
    let (raw_vals, vecs) = cavity
        .mat
        .eigh(UPLO::Lower)
        .expect("free_decay_tomography: eigh failed");
    // clip the tiny negative weights a trajectory average can leave behind
    let weights: Vec<f64> = raw_vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(TrajectoryError::BadDensity { trace: total });
    }
    let samples: Vec<f64> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let mut pick = rng.random::<f64>() * total;
            let mut k = weights.len() - 1;
            for (j, w) in weights.iter().enumerate() {
                if pick < *w {
                    k = j;
                    break;
                }
                pick -= w;
            }
            // eigh returns conjugated columns for complex Hermitian input;
            // undo that so H psi0 = vals[k] psi0 holds.
            let psi0 = vecs.column(k).mapv(|z| z.conj());
            one_charge(&psi0, theta, &mut rng)
        })
        .collect();
    let n = n_samples as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let variance = samples.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let sd = variance.sqrt().max(1e-6);
    let histogram = charge_histogram(&samples, mean - 4.0 * sd, mean + 4.0 * sd, 40);
    Ok(TomographyResult {
        samples,
        mean,
        variance,
        theta,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::Array2;
    use operator_core::{basis_state, coherent_state};

    fn pure_density(excited: bool, n: usize, n_max: usize) -> DensityMatrix {
        basis_state(excited, n, n_max).outer()
    }

    #[test]
    fn vacuum_charges_are_centered_with_quarter_variance() {
        let rho = pure_density(false, 0, 1);
        let out = free_decay_tomography(&rho, 0.3, 1000, 11).unwrap();
        let se_mean = 0.5 / 1000.0_f64.sqrt();
        assert!(out.mean.abs() < 3.0 * se_mean, "mean = {}", out.mean);
        let se_var = 0.25 * (2.0 / 999.0_f64).sqrt();
        assert!(
            (out.variance - 0.25).abs() < 3.0 * se_var + 1e-3,
            "variance = {}",
            out.variance
        );
    }

    #[test]
    fn coherent_input_shifts_the_mean_to_the_projected_amplitude() {
        let alpha = c64(0.6, 0.3);
        let theta = 0.7;
        let rho = coherent_state(alpha, 8).outer();
        let out = free_decay_tomography(&rho, theta, 1000, 5).unwrap();
        let expected = (alpha * C64::from_polar(1.0, -theta)).re;
        let se = (out.variance / 1000.0).sqrt();
        assert!(
            (out.mean - expected).abs() < 3.0 * se,
            "mean = {}, expected = {}",
            out.mean,
            expected
        );
        // conditioning does not squeeze a coherent state
        assert!((out.variance - 0.25).abs() < 0.04);
    }

    #[test]
    fn degenerate_inputs_are_rejected() {
        let rho = pure_density(false, 0, 1);
        assert!(matches!(
            free_decay_tomography(&rho, 0.0, 1, 1),
            Err(TrajectoryError::EmptyEnsemble { n: 1 })
        ));
        let odd = DensityMatrix::new(Array2::eye(3).mapv(|v| c64(v, 0.0)));
        assert!(matches!(
            free_decay_tomography(&odd, 0.0, 10, 1),
            Err(TrajectoryError::DimensionMismatch { .. })
        ));
        let zero = DensityMatrix::new(Array2::zeros((4, 4)));
        assert!(matches!(
            free_decay_tomography(&zero, 0.0, 10, 1),
            Err(TrajectoryError::BadDensity { .. })
        ));
    }

    #[test]
    fn histogram_mass_counts_only_the_window() {
        let samples = [-2.0, -0.5, 0.0, 0.5, 2.0];
        let h = charge_histogram(&samples, -1.0, 1.0, 4);
        let mass: f64 = h.density.iter().map(|d| d * 0.5).sum();
        assert!((mass - 3.0 / 5.0).abs() < 1e-12);
        assert_eq!(h.edges.len(), 5);
        assert_eq!(h.centers.len(), 4);
    }
}
