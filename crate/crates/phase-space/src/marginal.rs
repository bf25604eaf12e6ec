//! Quadrature distributions obtained by integrating the Wigner function
//! along one phase-space direction.

use operator_core::c64;

use crate::wigner::{wigner_point, WignerGrid};
use crate::PhaseSpaceError;

/// Coarsest spacing for which the line quadrature still resolves the
/// oscillations of low-lying Fock superpositions.
pub const MAX_SPACING: f64 = 0.125;

/// Distribution of the quadrature `(e^{i theta} a^+ + e^{-i theta} a) / 2`
/// sampled on `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub theta: f64,
    pub axis: Vec<f64>,
    pub density: Vec<f64>,
}

impl Marginal {
    fn step(&self) -> f64 {
        self.axis[1] - self.axis[0]
    }

    /// Trapezoid mass over the sampled axis.
    pub fn total_mass(&self) -> f64 {
        trapezoid(&self.density) * self.step()
    }

    pub fn mean(&self) -> f64 {
        let weighted: Vec<f64> = self
            .axis
            .iter()
            .zip(&self.density)
            .map(|(q, p)| q * p)
            .collect();
        trapezoid(&weighted) * self.step()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let weighted: Vec<f64> = self
            .axis
            .iter()
            .zip(&self.density)
            .map(|(q, p)| (q - mean) * (q - mean) * p)
            .collect();
        trapezoid(&weighted) * self.step()
    }

    /// Probability in `[lo, hi]`, treating the sampled density as piecewise
    /// linear and clamping to the axis window.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        let (first, last) = (self.axis[0], self.axis[self.axis.len() - 1]);
        let lo = lo.max(first);
        let hi = hi.min(last);
        if hi <= lo {
            return 0.0;
        }
        let h = self.step();
        let n_seg = self.axis.len() - 1;
        let i_lo = (((lo - first) / h).floor() as usize).min(n_seg - 1);
        let i_hi = (((hi - first) / h).floor() as usize).min(n_seg - 1);
        let mut mass = 0.0;
        for i in i_lo..=i_hi {
            let seg_lo = first + i as f64 * h;
            let s = lo.max(seg_lo);
            let e = hi.min(seg_lo + h);
            if e <= s {
                continue;
            }
            let lerp = |q: f64| {
                let frac = (q - seg_lo) / h;
                self.density[i] * (1.0 - frac) + self.density[i + 1] * frac
            };
            mass += 0.5 * (lerp(s) + lerp(e)) * (e - s);
        }
        mass
    }

    /// Two-column CSV `q,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("q,density\n");
        for (q, p) in self.axis.iter().zip(&self.density) {
            out.push_str(&format!("{q},{p}\n"));
        }
        out
    }
}

fn trapezoid(values: &[f64]) -> f64 {
    let inner: f64 = values[1..values.len() - 1].iter().sum();
    inner + 0.5 * (values[0] + values[values.len() - 1])
}

/// Integrates `W` along the direction orthogonal to `theta`. The integration
/// re-evaluates the source state on rotated lines, so the result carries
/// quadrature error only, not lattice interpolation error.
pub fn marginal(w: &WignerGrid, theta: f64) -> Result<Marginal, PhaseSpaceError> {
    let (hx, hy) = w.spacing();
    if hx > MAX_SPACING || hy > MAX_SPACING {
        return Err(PhaseSpaceError::UnderResolved {
            spacing: hx.max(hy),
        });
    }
    let phase = c64(theta.cos(), theta.sin());
    let density: Vec<f64> = w
        .x_grid
        .iter()
        .map(|&q| {
            let line: Vec<f64> = w
                .y_grid
                .iter()
                .map(|&p| wigner_point(&w.source, phase * c64(q, p)))
                .collect();
            trapezoid(&line) * hy
        })
        .collect();
    Ok(Marginal {
        theta,
        axis: w.x_grid.to_vec(),
        density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wigner::{wigner, GridSpec};
    use ndarray::Array2;
    use operator_core::DensityMatrix;
    use std::f64::consts::PI;

    fn fock_grid(n: usize) -> WignerGrid {
        let mut mat = Array2::zeros((8, 8));
        mat[[n, n]] = c64(1.0, 0.0);
        wigner(&DensityMatrix::new(mat), &GridSpec::default()).unwrap()
    }

    #[test]
    fn vacuum_marginal_is_the_quarter_variance_gaussian() {
        let m = marginal(&fock_grid(0), 0.4).unwrap();
        for (q, p) in m.axis.iter().zip(&m.density) {
            let expect = (2.0 / PI).sqrt() * (-2.0 * q * q).exp();
            assert!((p - expect).abs() < 1e-6, "q = {q}: {p} vs {expect}");
        }
        assert!((m.total_mass() - 1.0).abs() < 1e-6);
        assert!((m.variance() - 0.25).abs() < 1e-6);
    }

    #[test]
    fn vacuum_marginal_ignores_the_phase() {
        let w = fock_grid(0);
        let a = marginal(&w, 0.0).unwrap();
        let b = marginal(&w, 1.234).unwrap();
        for (pa, pb) in a.density.iter().zip(&b.density) {
            assert!((pa - pb).abs() < 1e-8);
        }
    }

    #[test]
    fn single_photon_marginal_is_double_humped_with_a_node() {
        let m = marginal(&fock_grid(1), 0.0).unwrap();
        for (q, p) in m.axis.iter().zip(&m.density) {
            let expect = 4.0 * q * q * (2.0 / PI).sqrt() * (-2.0 * q * q).exp();
            assert!((p - expect).abs() < 1e-6, "q = {q}: {p} vs {expect}");
        }
        let origin = m.axis.iter().position(|&q| q.abs() < 1e-9).unwrap();
        assert!(m.density[origin].abs() < 1e-3);
        assert!((m.variance() - 0.75).abs() < 1e-6);
        assert!((m.total_mass() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn masses_between_cuts_add_up() {
        let m = marginal(&fock_grid(0), 0.0).unwrap();
        let whole = m.mass_between(-3.5, 3.5);
        assert!((whole - m.total_mass()).abs() < 1e-12);
        let split = m.mass_between(-3.5, 0.37) + m.mass_between(0.37, 3.5);
        assert!((split - whole).abs() < 1e-12);
        // symmetric state, symmetric halves
        let left = m.mass_between(-3.5, 0.0);
        let right = m.mass_between(0.0, 3.5);
        assert!((left - right).abs() < 1e-10);
        assert_eq!(m.mass_between(1.0, 0.5), 0.0);
    }

    #[test]
    fn coarse_grids_are_rejected() {
        let mut mat = Array2::zeros((4, 4));
        mat[[0, 0]] = c64(1.0, 0.0);
        let spec = GridSpec {
            x_min: -3.0,
            x_max: 3.0,
            y_min: -3.0,
            y_max: 3.0,
            nx: 21,
            ny: 21,
        };
        let w = wigner(&DensityMatrix::new(mat), &spec).unwrap();
        assert!(matches!(
            marginal(&w, 0.0),
            Err(PhaseSpaceError::UnderResolved { .. })
        ));
    }
}
