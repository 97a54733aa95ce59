use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic truncation of the lattice `hZ^d`.
///
/// Sites carry integer offsets `k` in `[-m/2, m/2)` per axis and sit at
/// `a = h k`. Storage is row-major with each axis in wrapped (FFT) order:
/// index `i < m/2` holds `k = i`, index `i >= m/2` holds `k = i - m`.
/// Frequencies use the same convention, `xi_k = 2 pi k / (m h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    step: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, step: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension must be 1, 2 or 3, got {dim}")));
        }
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!("step must be positive, got {step}")));
        }
        if points < 4 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("points per axis must be even and >= 4, got {points}")));
        }
        Ok(Self { dim, step, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of sites, `m^d`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Side length `L = h m` of the periodic box.
    pub fn box_length(&self) -> f64 {
        self.step * self.points as f64
    }

    /// `h^d`, the weight of one site in discrete sums.
    pub fn cell_volume(&self) -> f64 {
        self.step.powi(self.dim as i32)
    }

    /// `L^d`.
    pub fn box_volume(&self) -> f64 {
        self.box_length().powi(self.dim as i32)
    }

    /// Spacing of the frequency grid, `2 pi / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.box_length()
    }

    /// Distance between consecutive entries along `axis` in the flat layout.
    pub fn stride(&self, axis: usize) -> usize {
        self.points.pow((self.dim - 1 - axis) as u32)
    }

    /// Signed offset `k` stored at per-axis index `i`.
    pub fn wrapped(&self, i: usize) -> i64 {
        let m = self.points;
        if i < m / 2 {
            i as i64
        } else {
            i as i64 - m as i64
        }
    }

    /// Per-axis storage index of the signed offset `k` (taken modulo `m`).
    pub fn unwrapped(&self, k: i64) -> usize {
        k.rem_euclid(self.points as i64) as usize
    }

    pub fn multi_index(&self, flat: usize) -> [usize; 3] {
        let m = self.points;
        let mut idx = [0usize; 3];
        let mut rest = flat;
        for axis in (0..self.dim).rev() {
            idx[axis] = rest % m;
            rest /= m;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().take(self.dim).fold(0, |acc, &i| acc * self.points + i)
    }

    /// Flat index of the site with signed offsets `k`.
    pub fn flat_from_offsets(&self, k: &[i64]) -> usize {
        k.iter().take(self.dim).fold(0, |acc, &ki| acc * self.points + self.unwrapped(ki))
    }

    /// Physical coordinates `a = h k` of a site; unused axes are zero.
    pub fn site(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = self.step * self.wrapped(idx[axis]) as f64;
        }
        x
    }

    /// Frequency `xi_k` attached to a flat index; unused axes are zero.
    pub fn frequency(&self, flat: usize) -> [f64; 3] {
        let idx = self.multi_index(flat);
        let dk = self.frequency_step();
        let mut xi = [0.0; 3];
        for axis in 0..self.dim {
            xi[axis] = dk * self.wrapped(idx[axis]) as f64;
        }
        xi
    }

    /// Per-axis frequencies in storage order.
    pub fn axis_frequencies(&self) -> Vec<f64> {
        let dk = self.frequency_step();
        (0..self.points).map(|i| dk * self.wrapped(i) as f64).collect()
    }

    /// Grid with step `h / r` covering the same box.
    pub fn refine(&self, factor: usize) -> Result<Self> {
        if factor == 0 {
            return Err(Error::InvalidParameter("refinement factor must be >= 1".into()));
        }
        Self::new(self.dim, self.step / factor as f64, self.points * factor)
    }

    /// Same box and dimension up to a relative tolerance on the step.
    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.dim == other.dim
            && self.points == other.points
            && (self.step - other.step).abs() <= 1e-12 * self.step.max(other.step)
    }

    pub fn ensure_same(&self, other: &GridSpec) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}
