use std::f64::consts::PI;

use num_complex::Complex64;

use super::{apply_multiplier, SpectralField};
use crate::error::{Error, Result};
use crate::field::{LatticeField, Scalar};
use crate::grid::GridSpec;

/// Smooth radial cutoffs for the dyadic decomposition.
///
/// `psi(r) = 1` for `r <= pi`, `0` for `r >= 2 pi`, and `S((2 pi - r) / pi)`
/// in between, with `S(x) = s(x) / (s(x) + s(1 - x))`, `s(x) = exp(-1/x)`.
/// `eta(r) = psi(r) - psi(2 r)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LpCutoffs;

#[inline]
fn smooth_step_base(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// C-infinity step rising from 0 at `x <= 0` to 1 at `x >= 1`.
#[inline]
pub fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let a = smooth_step_base(x);
        a / (a + smooth_step_base(1.0 - x))
    }
}

impl LpCutoffs {
    pub fn psi(&self, r: f64) -> f64 {
        let r = r.abs();
        if r <= PI {
            1.0
        } else if r >= 2.0 * PI {
            0.0
        } else {
            smooth_step((2.0 * PI - r) / PI)
        }
    }

    pub fn eta(&self, r: f64) -> f64 {
        self.psi(r) - self.psi(2.0 * r)
    }

    /// Weight of `P_N` at frequency `xi` on a lattice of step `h`.
    pub fn projection_weight(&self, xi: &[f64], h: f64, scale: f64) -> f64 {
        let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
        self.eta(h * r / scale)
    }

    /// Multiplier of `P_N` on the frequency grid.
    pub fn projection_multiplier(&self, grid: &GridSpec, scale: f64) -> Result<SpectralField> {
        check_dyadic(scale)?;
        let h = grid.step();
        Ok(SpectralField::from_fn(*grid, |xi| Complex64::new(self.projection_weight(xi, h, scale), 0.0)))
    }

    /// `max |sum_{N = 2^-J}^{1} eta(h|xi|/N) - 1|` over grid frequencies with
    /// `0 < h|xi| <= pi`, the inscribed ball of the Brillouin zone.
    pub fn partition_defect(&self, grid: &GridSpec, depth: u32) -> f64 {
        let h = grid.step();
        let d = grid.dim();
        (0..grid.len())
            .map(|i| grid.frequency(i))
            .filter_map(|xi| {
                let r = h * xi[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
                (r > 0.0 && r <= PI + 1e-12).then(|| {
                    let sum: f64 = (0..=depth).map(|j| self.eta(r * f64::powi(2.0, j as i32))).sum();
                    (sum - 1.0).abs()
                })
            })
            .fold(0.0, f64::max)
    }
}

/// Smallest `J` with `2^-J` below the lowest nonzero grid frequency scale.
pub fn minimal_lp_depth(grid: &GridSpec) -> u32 {
    // The lowest nonzero h|xi| is 2 pi / m; coverage needs pi 2^-J <= 2 pi / m.
    let m = grid.points() as f64;
    (m / 2.0).log2().ceil().max(0.0) as u32
}

pub(crate) fn check_dyadic(scale: f64) -> Result<()> {
    let e = scale.log2();
    if !(scale > 0.0 && scale <= 1.0 && (e - e.round()).abs() < 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "Littlewood-Paley scale must be a dyadic number <= 1, got {scale}"
        )));
    }
    Ok(())
}

/// `P_N u = F^{-1} eta(h xi / N) F u`.
pub fn littlewood_paley_project<T: Scalar>(
    u: &LatticeField<T>,
    scale: f64,
    cutoffs: &LpCutoffs,
) -> Result<LatticeField<T>> {
    let weights = cutoffs.projection_multiplier(u.grid(), scale)?;
    Ok(apply_multiplier(u, &weights))
}
