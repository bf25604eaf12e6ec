//! Wigner quasiprobability of a cavity-only state on a rectangular grid.

use std::f64::consts::{FRAC_2_PI, PI};

use ndarray::{Array1, Array2};
use operator_core::{c64, C64, DensityMatrix};

use crate::kernel::{displaced_parity, trace_product};
use crate::PhaseSpaceError;

/// Population of the highest kept Fock state above which grid values carry an
/// accuracy warning.
pub const TRUNCATION_TOL: f64 = 1e-6;

/// Rectangular evaluation window; `nx` columns sample `[x_min, x_max]`
/// inclusive, and likewise for rows.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl GridSpec {
    /// Square window centered on the origin with the default 0.05 spacing.
    pub fn centered(half_width: f64) -> Self {
        let n = (2.0 * half_width / 0.05).round() as usize + 1;
        Self {
            x_min: -half_width,
            x_max: half_width,
            y_min: -half_width,
            y_max: half_width,
            nx: n,
            ny: n,
        }
    }

    pub fn validate(&self) -> Result<(), PhaseSpaceError> {
        if self.nx < 2
            || self.ny < 2
            || !(self.x_max > self.x_min)
            || !(self.y_max > self.y_min)
        {
            return Err(PhaseSpaceError::BadGrid {
                nx: self.nx,
                ny: self.ny,
            });
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> Self {
        // 141 x 141 over [-3.5, 3.5]^2
        Self::centered(3.5)
    }
}

/// Sampled quasiprobability with its axes and the state it came from. The
/// source matrix is kept so that marginals can re-evaluate the distribution
/// along rotated lines instead of interpolating the lattice.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_grid: Array1<f64>,
    pub y_grid: Array1<f64>,
    /// `values[[iy, ix]] = W(x_grid[ix], y_grid[iy])`, rows scan y.
    pub values: Array2<f64>,
    pub cell_area: f64,
    /// Cavity state behind the samples.
    pub source: DensityMatrix,
    /// Population of the highest kept Fock state.
    pub truncation_weight: f64,
    pub truncation_flagged: bool,
}

impl WignerGrid {
    /// Riemann mass of the sampled window; 1 for a normalized state on a
    /// wide enough grid.
    pub fn total_mass(&self) -> f64 {
        self.values.sum() * self.cell_area
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `(dx, dy)` lattice spacings.
    pub fn spacing(&self) -> (f64, f64) {
        (
            self.x_grid[1] - self.x_grid[0],
            self.y_grid[1] - self.y_grid[0],
        )
    }

    /// CSV matrix with axis header lines; rows scan y ascending.
    pub fn to_csv(&self) -> String {
        let fmt_axis = |axis: &Array1<f64>| {
            axis.iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = String::new();
        out.push_str(&format!("# x,{}\n", fmt_axis(&self.x_grid)));
        out.push_str(&format!("# y,{}\n", fmt_axis(&self.y_grid)));
        for row in self.values.rows() {
            let line = row
                .iter()
                .map(|v| format!("{v}"))
                .collect::<Vec<_>>()
                .join(",");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// `W(alpha)` of a cavity state by tracing against the displaced parity
/// kernel; exact for states supported on the kept Fock block.
pub fn wigner_point(rho: &DensityMatrix, alpha: C64) -> f64 {
    let k = displaced_parity(alpha, rho.dim());
    FRAC_2_PI * trace_product(&rho.mat, &k).re
}

/// Samples `W` over `spec`. The state must be cavity-only, so its dimension
/// is the number of kept Fock states.
pub fn wigner(rho: &DensityMatrix, spec: &GridSpec) -> Result<WignerGrid, PhaseSpaceError> {
    spec.validate()?;
    let x_grid = Array1::linspace(spec.x_min, spec.x_max, spec.nx);
    let y_grid = Array1::linspace(spec.y_min, spec.y_max, spec.ny);
    let mut values = Array2::zeros((spec.ny, spec.nx));
    for (iy, &y) in y_grid.iter().enumerate() {
        for (ix, &x) in x_grid.iter().enumerate() {
            values[[iy, ix]] = wigner_point(rho, c64(x, y));
        }
    }
    let truncation_weight = rho.mat[[rho.dim() - 1, rho.dim() - 1]].re;
    Ok(WignerGrid {
        cell_area: (x_grid[1] - x_grid[0]) * (y_grid[1] - y_grid[0]),
        x_grid,
        y_grid,
        values,
        source: rho.clone(),
        truncation_weight,
        truncation_flagged: truncation_weight > TRUNCATION_TOL,
    })
}

/// Starts from the default window and widens it until the sampled mass
/// matches the trace within 1e-4, keeping the 0.05 spacing.
pub fn wigner_auto(rho: &DensityMatrix) -> Result<WignerGrid, PhaseSpaceError> {
    let target = rho.trace().re;
    let mut half_width = 3.5;
    loop {
        let grid = wigner(rho, &GridSpec::centered(half_width))?;
        let mass = grid.total_mass();
        if (mass - target).abs() <= 1e-4 {
            return Ok(grid);
        }
        half_width += 1.0;
        if half_width > 10.5 {
            return Err(PhaseSpaceError::NormalizationFailed { mass });
        }
    }
}

/// Closed-form vacuum profile, handy as a reference in callers and tests.
pub fn vacuum_wigner(x: f64, y: f64) -> f64 {
    FRAC_2_PI * (-2.0 * (x * x + y * y)).exp()
}
