use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;

/// Scalar type a lattice field can carry.
pub trait Scalar:
    Copy
    + Send
    + Sync
    + Debug
    + Default
    + PartialEq
    + Add<Output = Self>
    + Sub<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + 'static
{
    fn to_complex(self) -> Complex64;
    /// Real scalars keep the real part.
    fn from_complex(z: Complex64) -> Self;
    fn modulus(self) -> f64;
    fn is_finite(self) -> bool;
}

impl Scalar for f64 {
    fn to_complex(self) -> Complex64 {
        Complex64::new(self, 0.0)
    }
    fn from_complex(z: Complex64) -> Self {
        z.re
    }
    fn modulus(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl Scalar for Complex64 {
    fn to_complex(self) -> Complex64 {
        self
    }
    fn from_complex(z: Complex64) -> Self {
        z
    }
    fn modulus(self) -> f64 {
        self.norm()
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
}

/// Values of a grid function on a periodic lattice box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawField<T>", bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct LatticeField<T: Scalar = f64> {
    grid: GridSpec,
    values: Vec<T>,
}

#[derive(Deserialize)]
struct RawField<T> {
    grid: GridSpec,
    values: Vec<T>,
}

impl<T: Scalar> TryFrom<RawField<T>> for LatticeField<T> {
    type Error = Error;
    fn try_from(raw: RawField<T>) -> Result<Self> {
        Self::new(raw.grid, raw.values)
    }
}

pub type ComplexField = LatticeField<Complex64>;

impl<T: Scalar> LatticeField<T> {
    pub fn new(grid: GridSpec, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite value at site {i}")));
        }
        Ok(Self { grid, values })
    }

    /// Skips the finiteness scan; callers guarantee the invariant.
    pub(crate) fn from_parts(grid: GridSpec, values: Vec<T>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self::from_parts(grid, vec![T::default(); grid.len()])
    }

    pub fn constant(grid: GridSpec, c: T) -> Self {
        Self::from_parts(grid, vec![c; grid.len()])
    }

    /// Field with value `c` at the site of signed offsets `k`, zero elsewhere.
    pub fn impulse(grid: GridSpec, k: &[i64], c: T) -> Self {
        let mut f = Self::zeros(grid);
        let at = grid.flat_from_offsets(k);
        f.values[at] = c;
        f
    }

    /// Samples `f` at the site coordinates `a = h k`.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> T + Sync,
    {
        let d = grid.dim();
        let values: Vec<T> = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let x = grid.site(i);
                f(&x[..d])
            })
            .collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    /// Value at signed site offsets `k`.
    pub fn at(&self, k: &[i64]) -> T {
        self.values[self.grid.flat_from_offsets(k)]
    }

    pub fn map<U: Scalar, F: Fn(T) -> U + Sync>(&self, f: F) -> LatticeField<U> {
        LatticeField::from_parts(self.grid, self.values.par_iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with<F: Fn(T, T) -> T + Sync>(&self, other: &Self, f: F) -> Self {
        assert!(self.grid.same_as(&other.grid), "field grids differ: {:?} vs {:?}", self.grid, other.grid);
        let values = self.values.par_iter().zip(other.values.par_iter()).map(|(&a, &b)| f(a, b)).collect();
        Self::from_parts(self.grid, values)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b * c)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    /// Discrete inner product `h^d sum u conj(v)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.grid.ensure_same(&other.grid).expect("inner product of mismatched fields");
        let s = ordered_sum_complex(
            self.values.par_iter().zip(other.values.par_iter()).map(|(a, b)| a.to_complex() * b.to_complex().conj()),
        );
        s * self.grid.cell_volume()
    }

    /// Cyclic translation: result(a) = self(a + offset h e_axis).
    pub fn shift(&self, axis: usize, offset: i64) -> Self {
        assert!(axis < self.grid.dim());
        let m = self.grid.points();
        let s = self.grid.stride(axis);
        let shift = offset.rem_euclid(m as i64) as usize;
        let mut out = vec![T::default(); self.values.len()];
        out.par_chunks_mut(m * s).zip(self.values.par_chunks(m * s)).for_each(|(dst, src)| {
            for r in 0..m {
                let from = (r + shift) % m;
                dst[r * s..(r + 1) * s].copy_from_slice(&src[from * s..(from + 1) * s]);
            }
        });
        Self::from_parts(self.grid, out)
    }

    pub fn to_complex(&self) -> ComplexField {
        self.map(|v| v.to_complex())
    }
}

impl ComplexField {
    pub fn re(&self) -> LatticeField<f64> {
        self.map(|z| z.re)
    }

    pub fn im(&self) -> LatticeField<f64> {
        self.map(|z| z.im)
    }
}

impl<T: Scalar> Add for &LatticeField<T> {
    type Output = LatticeField<T>;
    fn add(self, rhs: Self) -> LatticeField<T> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: Scalar> Sub for &LatticeField<T> {
    type Output = LatticeField<T>;
    fn sub(self, rhs: Self) -> LatticeField<T> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl<T: Scalar> Neg for &LatticeField<T> {
    type Output = LatticeField<T>;
    fn neg(self) -> LatticeField<T> {
        self.map(|v| -v)
    }
}

impl Mul for &LatticeField<f64> {
    type Output = LatticeField<f64>;
    fn mul(self, rhs: Self) -> LatticeField<f64> {
        self.zip_with(rhs, |a, b| a * b)
    }
}

const SUM_CHUNK: usize = 4096;

/// Sum with a fixed reduction tree, independent of thread scheduling.
pub(crate) fn ordered_sum<I>(items: I) -> f64
where
    I: IndexedParallelIterator<Item = f64>,
{
    let partial: Vec<f64> = items.chunks(SUM_CHUNK).map(|c| c.into_iter().sum::<f64>()).collect();
    partial.into_iter().sum()
}

pub(crate) fn ordered_sum_complex<I>(items: I) -> Complex64
where
    I: IndexedParallelIterator<Item = Complex64>,
{
    let partial: Vec<Complex64> = items.chunks(SUM_CHUNK).map(|c| c.into_iter().sum::<Complex64>()).collect();
    partial.into_iter().sum()
}
