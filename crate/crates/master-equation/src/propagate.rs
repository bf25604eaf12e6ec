//! Transient solutions of the master equation on a time grid.

use std::collections::HashMap;

use ndarray::Array1;
use operator_core::{
    superop::{unvec_rho, vec_rho},
    C64, DensityMatrix,
};

use crate::expm::expm;
use crate::liouvillian::Liouvillian;
use crate::spectral::{decompose_matrix, SolveError, SpectralDecomp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PropagationMethod {
    /// Eigenbasis expansion; one decomposition, then closed-form in `t`.
    Spectral,
    /// Dense `e^{L dt}` per distinct step; slower but immune to a poorly
    /// conditioned eigenbasis.
    ScalingSquaring,
}

#[derive(Debug)]
pub struct Propagation {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub method: PropagationMethod,
}

fn check_grid(t_grid: &[f64]) {
    assert!(
        t_grid.windows(2).all(|w| w[0] <= w[1]) && t_grid.first().is_none_or(|t| *t >= 0.0),
        "time grid must be nondecreasing and nonnegative"
    );
}

/// Spectral route when the eigenbasis reconstructs the initial state to
/// 1e-8, otherwise scaling-and-squaring; the result reports which ran.
pub fn propagate(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Propagation, SolveError> {
    match decompose_matrix(&l.mat) {
        Ok(decomp) => propagate_with(&decomp, l, rho0, t_grid),
        Err(_) => Ok(propagate_expm(l, rho0, t_grid)),
    }
}

/// Spectral propagation over a precomputed decomposition, with the same
/// conditioning guard and fallback as [`propagate`].
pub fn propagate_with(
    decomp: &SpectralDecomp,
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t_grid: &[f64],
) -> Result<Propagation, SolveError> {
    check_grid(t_grid);
    let v0 = vec_rho(&rho0.mat);
    if decomp.reconstruction_residual(&v0) > 1e-8 {
        return Ok(propagate_expm(l, rho0, t_grid));
    }
    let states = t_grid
        .iter()
        .map(|&t| {
            if t == 0.0 {
                rho0.clone()
            } else {
                DensityMatrix::new(unvec_rho(&decomp.evolve_vec(&v0, t)))
            }
        })
        .collect();
    Ok(Propagation {
        times: t_grid.to_vec(),
        states,
        method: PropagationMethod::Spectral,
    })
}

/// Stepwise dense-exponential route; one `e^{L dt}` per distinct increment.
pub fn propagate_expm(l: &Liouvillian, rho0: &DensityMatrix, t_grid: &[f64]) -> Propagation {
    check_grid(t_grid);
    let mut cache: HashMap<u64, ndarray::Array2<C64>> = HashMap::new();
    let mut v: Array1<C64> = vec_rho(&rho0.mat);
    let mut t_prev = 0.0;
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let dt = t - t_prev;
        if dt > 0.0 {
            let step = cache
                .entry(dt.to_bits())
                .or_insert_with(|| expm(&l.mat.mapv(|z| z * dt)));
            v = step.dot(&v);
            t_prev = t;
        }
        states.push(if t == 0.0 {
            rho0.clone()
        } else {
            DensityMatrix::new(unvec_rho(&v))
        });
    }
    Propagation {
        times: t_grid.to_vec(),
        states,
        method: PropagationMethod::ScalingSquaring,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::MasterSolution;
    use approx::assert_abs_diff_eq;
    use operator_core::{basis_state, trace_distance, SystemParams};

    #[test]
    fn zero_time_returns_initial_state_exactly() {
        let p = SystemParams::impedance_matched(10.0, 1.0, 0.5, -7.0, 4).unwrap();
        let sol = MasterSolution::solve(&p).unwrap();
        let rho0 = basis_state(false, 2, p.n_max).outer();
        let run = propagate_with(&sol.decomp, &sol.liouvillian, &rho0, &[0.0, 0.1]).unwrap();
        assert_eq!(run.method, PropagationMethod::Spectral);
        assert_eq!(run.states[0].mat, rho0.mat);
    }

    #[test]
    fn bare_cavity_decay_is_exponential() {
        let p = SystemParams::new(0.0, 1.0, 2.0, 0.0, 0.0, 4).unwrap();
        let l = Liouvillian::build(&p);
        let rho0 = basis_state(false, 1, p.n_max).outer();
        let grid: Vec<f64> = (0..=20).map(|k| 0.15 * k as f64).collect();
        let run = propagate(&l, &rho0, &grid).unwrap();
        let n_op = operator_core::number_op(p.n_max);
        for (t, rho) in grid.iter().zip(run.states.iter()) {
            let n = rho.expect(&n_op).re;
            assert_abs_diff_eq!(n, (-2.0 * p.kappa * t).exp(), epsilon = 1e-9);
        }
    }

    #[test]
    fn late_snapshots_reach_the_steady_state() {
        let p = SystemParams::impedance_matched(10.0, 1.0, 0.5, -7.0, 4).unwrap();
        let sol = MasterSolution::solve(&p).unwrap();
        let rho0 = basis_state(false, 0, p.n_max).outer();
        let horizon = 30.0 / sol.decomp.slowest_decay_rate();
        let run =
            propagate_with(&sol.decomp, &sol.liouvillian, &rho0, &[horizon / 2.0, horizon])
                .unwrap();
        let dist = trace_distance(run.states.last().unwrap(), &sol.steady.rho);
        assert!(dist < 1e-6, "distance to steady state {dist}");
    }

    #[test]
    fn snapshots_stay_physical() {
        let p = SystemParams::impedance_matched(10.0, 1.0, 0.5, -7.0, 4).unwrap();
        let l = Liouvillian::build(&p);
        let rho0 = basis_state(true, 1, p.n_max).outer();
        let grid: Vec<f64> = (0..=10).map(|k| 0.4 * k as f64).collect();
        let run = propagate(&l, &rho0, &grid).unwrap();
        for rho in &run.states {
            assert!((rho.trace().re - 1.0).abs() < 1e-9);
            assert!(rho.trace().im.abs() < 1e-9);
            rho.validate().unwrap();
        }
    }

    #[test]
    fn expm_route_matches_spectral_route() {
        let p = SystemParams::impedance_matched(10.0, 1.0, 0.5, -7.0, 4).unwrap();
        let sol = MasterSolution::solve(&p).unwrap();
        let rho0 = basis_state(false, 1, p.n_max).outer();
        let grid = [0.0, 0.3, 0.6, 1.2, 2.4];
        let spectral = propagate_with(&sol.decomp, &sol.liouvillian, &rho0, &grid).unwrap();
        let stepped = propagate_expm(&sol.liouvillian, &rho0, &grid);
        assert_eq!(stepped.method, PropagationMethod::ScalingSquaring);
        for (a, b) in spectral.states.iter().zip(stepped.states.iter()) {
            assert!(trace_distance(a, b) < 1e-9);
        }
    }
}
