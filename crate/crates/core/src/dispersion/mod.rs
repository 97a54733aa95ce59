//! Dispersion relations of the `(m, alpha)` lattice family, their
//! frequency-localized kernels, oscillatory integrals and decay fits.

mod fit;
mod oscillatory;

pub use fit::{fit_after_first_decade, fit_decay_exponent, log_spaced, DecayFit, MIN_FIT_POINTS};
pub use oscillatory::{
    conjecture_scan, oscillatory_integral, oscillatory_integral_certified, sup_over_velocities, Certified,
    ConjectureRow, OscillatoryValue, PhaseSpec, QuadratureRule, VelocitySup, Window,
};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ComplexField;
use crate::grid::GridSpec;
use crate::spectral::{idft, lattice_symbol, LpCutoffs, SpectralField};

/// `omega_h(xi) = (m^2 + (4/h^2) sum sin^2(h xi_j / 2))^{alpha/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionSpec {
    pub mass: f64,
    pub alpha: u8,
    pub step: f64,
    pub dim: usize,
}

impl DispersionSpec {
    pub fn new(mass: f64, alpha: u8, step: f64, dim: usize) -> Result<Self> {
        if !(mass.is_finite() && mass >= 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be >= 0, got {mass}")));
        }
        if alpha != 1 && alpha != 2 {
            return Err(Error::InvalidParameter(format!("alpha must be 1 or 2, got {alpha}")));
        }
        if !(step.is_finite() && step > 0.0) || !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!("bad lattice (h = {step}, d = {dim})")));
        }
        Ok(Self { mass, alpha, step, dim })
    }

    pub fn wave(step: f64, dim: usize) -> Self {
        Self { mass: 0.0, alpha: 1, step, dim }
    }

    pub fn schrodinger(step: f64, dim: usize) -> Self {
        Self { mass: 0.0, alpha: 2, step, dim }
    }

    pub fn klein_gordon(step: f64, dim: usize) -> Self {
        Self { mass: 1.0, alpha: 1, step, dim }
    }

    pub fn name(&self) -> &'static str {
        match (self.mass == 0.0, self.alpha) {
            (true, 1) => "wave",
            (true, 2) => "schrodinger",
            (false, 1) if self.mass == 1.0 => "klein-gordon",
            _ => "custom",
        }
    }

    /// True when the symbol vanishes at `xi = 0`.
    pub fn is_massless(&self) -> bool {
        self.mass == 0.0
    }

    pub fn omega(&self, xi: &[f64]) -> f64 {
        let base = self.mass * self.mass + lattice_symbol(xi, self.step);
        match self.alpha {
            1 => base.sqrt(),
            _ => base,
        }
    }

    /// Bound on `|d omega / d xi_j|` along any single axis.
    pub fn axis_speed_bound(&self) -> f64 {
        match self.alpha {
            // sin(h xi) / (h omega) <= 1 since omega >= (2/h)|sin(h xi / 2)|.
            1 => 1.0,
            _ => 2.0 / self.step,
        }
    }

    pub fn ensure_matches(&self, grid: &GridSpec) -> Result<()> {
        if grid.dim() != self.dim || (grid.step() - self.step).abs() > 1e-12 * self.step {
            return Err(Error::GridMismatch(format!(
                "dispersion (h = {}, d = {}) vs grid (h = {}, d = {})",
                self.step,
                self.dim,
                grid.step(),
                grid.dim()
            )));
        }
        Ok(())
    }

    /// Shortest box side keeping the kernel clear of its periodic images up
    /// to time `t_max`: `2 (1.05 v t_max + 16 h)`.
    pub fn minimal_box_length(&self, t_max: f64) -> f64 {
        2.0 * (1.05 * self.axis_speed_bound() * t_max.abs() + 16.0 * self.step)
    }

    /// Smallest power-of-two point count meeting [`Self::minimal_box_length`].
    pub fn minimal_points(&self, t_max: f64) -> usize {
        let need = (self.minimal_box_length(t_max) / self.step).ceil() as usize;
        need.next_power_of_two().max(4)
    }

    pub fn grid(&self, points: usize) -> Result<GridSpec> {
        GridSpec::new(self.dim, self.step, points)
    }
}

/// Frequency window applied to the kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum KernelWindow {
    Full,
    /// `eta(h xi / N)` for a dyadic `N <= 1`.
    LittlewoodPaley(f64),
}

/// Kernel of `U_h(t)`: inverse transform of `exp(-i t omega_h) w`.
///
/// With `w = 1` and `t = 0` this is the lattice delta `h^{-d}` at the origin.
pub fn linear_kernel(
    spec: &DispersionSpec,
    points: usize,
    t: f64,
    window: KernelWindow,
    cutoffs: &LpCutoffs,
) -> Result<ComplexField> {
    let grid = spec.grid(points)?;
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    let weights = match window {
        KernelWindow::Full => SpectralField::from_fn(grid, |xi| Complex64::from_polar(1.0, -t * spec.omega(xi))),
        KernelWindow::LittlewoodPaley(scale) => {
            let lp = cutoffs.projection_multiplier(&grid, scale)?;
            let phase = SpectralField::from_fn(grid, |xi| Complex64::from_polar(1.0, -t * spec.omega(xi)));
            phase.multiply(&lp)
        }
    };
    Ok(idft(&weights))
}

/// `(t, ||kernel(t)||_inf)` along an increasing time grid.
pub fn kernel_decay_series(
    spec: &DispersionSpec,
    window: KernelWindow,
    cutoffs: &LpCutoffs,
    t_grid: &[f64],
    points: usize,
) -> Result<Vec<(f64, f64)>> {
    if t_grid.is_empty() || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("time grid must be non-empty and increasing".into()));
    }
    let t_max = t_grid.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    let minimal = spec.minimal_box_length(t_max);
    let length = spec.step * points as f64;
    if length < minimal {
        return Err(Error::Wraparound { length, minimal, minimal_points: spec.minimal_points(t_max), step: spec.step });
    }
    t_grid.iter().map(|&t| Ok((t, linear_kernel(spec, points, t, window, cutoffs)?.max_abs()))).collect()
}
