//! Lattice Fourier transform on the frequency torus, discrete Sobolev norms,
//! Fourier multipliers and Littlewood-Paley projections.

pub(crate) mod fft;
pub(crate) mod lp;

pub use lp::{littlewood_paley_project, minimal_lp_depth, LpCutoffs};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::dispersion::DispersionSpec;
use crate::error::{Error, Result};
use crate::field::{ordered_sum, ComplexField, LatticeField, Scalar};
use crate::grid::GridSpec;

/// Coefficients `g^(xi_k)` on the frequency grid of a [`GridSpec`], stored in
/// the same wrapped order as the sites.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn new(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        Ok(Self { grid, coeffs })
    }

    pub(crate) fn from_parts(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        Self { grid, coeffs }
    }

    /// Fills coefficients from a function of the frequency vector.
    pub fn from_fn<F>(grid: GridSpec, f: F) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let d = grid.dim();
        let coeffs = (0..grid.len()).into_par_iter().map(|i| f(&grid.frequency(i)[..d])).collect();
        Self { grid, coeffs }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at signed frequency offsets `k`.
    pub fn at(&self, k: &[i64]) -> Complex64 {
        self.coeffs[self.grid.flat_from_offsets(k)]
    }

    /// Pointwise product with a multiplier on the same grid.
    pub fn multiply(&self, weights: &SpectralField) -> SpectralField {
        assert!(self.grid.same_as(&weights.grid), "multiplier grid mismatch");
        let coeffs = self.coeffs.par_iter().zip(weights.coeffs.par_iter()).map(|(a, b)| a * b).collect();
        Self::from_parts(self.grid, coeffs)
    }

    /// Multiplies each coefficient by `w(xi)`.
    pub fn map_with_frequency<F>(&self, w: F) -> SpectralField
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let d = self.grid.dim();
        let grid = self.grid;
        let coeffs = self.coeffs.par_iter().enumerate().map(|(i, c)| c * w(&grid.frequency(i)[..d])).collect();
        Self::from_parts(self.grid, coeffs)
    }

    /// `sqrt((2 pi)^{-d} sum_k w(xi_k) |g^(xi_k)|^2 dxi)`, the trapezoid rule on
    /// the frequency grid.
    pub fn weighted_norm<F>(&self, w: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        let d = self.grid.dim();
        let grid = self.grid;
        let s = ordered_sum(self.coeffs.par_iter().enumerate().map(|(i, c)| w(&grid.frequency(i)[..d]) * c.norm_sqr()));
        (s / self.grid.box_volume()).sqrt()
    }
}

/// `g^(xi) = h^d sum_a g(a) e^{-i a . xi}` on the frequency grid.
pub fn dft<T: Scalar>(u: &LatticeField<T>) -> SpectralField {
    let grid = *u.grid();
    let mut data: Vec<Complex64> = u.values().par_iter().map(|v| v.to_complex()).collect();
    fft::forward(&mut data, &grid);
    let hd = grid.cell_volume();
    data.par_iter_mut().for_each(|c| *c *= hd);
    SpectralField::from_parts(grid, data)
}

/// Inverse of [`dft`]: `g(a) = (2 pi)^{-d} sum_k g^(xi_k) e^{i a . xi_k} dxi`.
pub fn idft(g: &SpectralField) -> ComplexField {
    let grid = *g.grid();
    let mut data = g.coeffs.clone();
    fft::inverse(&mut data, &grid);
    let scale = 1.0 / grid.box_volume();
    data.par_iter_mut().for_each(|c| *c *= scale);
    LatticeField::from_parts(grid, data)
}

/// Real part of [`idft`]; exact for Hermitian-symmetric spectra.
pub fn idft_real(g: &SpectralField) -> LatticeField<f64> {
    idft(g).re()
}

/// Lattice symbol of `-Delta_h`: `(4/h^2) sum_j sin^2(h xi_j / 2)`.
#[inline]
pub fn lattice_symbol(xi: &[f64], h: f64) -> f64 {
    let s: f64 = xi.iter().map(|x| (0.5 * h * x).sin().powi(2)).sum();
    4.0 * s / (h * h)
}

/// Discrete `H^s_h` norm with the exact lattice weight `(1 + symbol)^s`.
pub fn sobolev_norm<T: Scalar>(u: &LatticeField<T>, s: f64) -> f64 {
    let h = u.grid().step();
    dft(u).weighted_norm(|xi| (1.0 + lattice_symbol(xi, h)).powf(s))
}

/// Which linear propagator a multiplier realizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierKind {
    /// `sin(t w) / w`, `w = sqrt(1 - Delta_h)`.
    K,
    /// `cos(t w)`.
    Kdot,
    /// `exp(-i t omega_h)` for the given dispersion relation.
    U(DispersionSpec),
}

/// Klein-Gordon frequency `sqrt(1 + symbol)` of the lattice.
#[inline]
pub fn kg_frequency(xi: &[f64], h: f64) -> f64 {
    (1.0 + lattice_symbol(xi, h)).sqrt()
}

/// Per-frequency weights of the chosen propagator at time `t`.
pub fn kg_multiplier(grid: &GridSpec, kind: MultiplierKind, t: f64) -> Result<SpectralField> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    let h = grid.step();
    let weights = match kind {
        MultiplierKind::K => SpectralField::from_fn(*grid, |xi| {
            let w = kg_frequency(xi, h);
            Complex64::new((t * w).sin() / w, 0.0)
        }),
        MultiplierKind::Kdot => {
            SpectralField::from_fn(*grid, |xi| Complex64::new((t * kg_frequency(xi, h)).cos(), 0.0))
        }
        MultiplierKind::U(spec) => {
            spec.ensure_matches(grid)?;
            SpectralField::from_fn(*grid, |xi| Complex64::from_polar(1.0, -t * spec.omega(xi)))
        }
    };
    Ok(weights)
}

/// Applies a multiplier: `F^{-1}(weights . F u)`. Real fields keep the real
/// part, which is exact for even real weights.
pub fn apply_multiplier<T: Scalar>(u: &LatticeField<T>, weights: &SpectralField) -> LatticeField<T> {
    let out = idft(&dft(u).multiply(weights));
    out.map(T::from_complex)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{discrete_laplacian, forward_gradient, gradient_norm_sq, l2_norm_sq};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_field(grid: GridSpec, seed: u64) -> LatticeField<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        LatticeField::new(grid, v).unwrap()
    }

    #[test]
    fn impulse_transforms_to_one() {
        let g = GridSpec::new(1, 1.0, 16).unwrap();
        let hat = dft(&LatticeField::impulse(g, &[0], 1.0));
        assert!(hat.coeffs().iter().all(|c| (c - 1.0).norm() < 1e-15));
        let back = idft(&SpectralField::from_fn(g, |_| Complex64::new(1.0, 0.0)));
        assert!((back.at(&[0]) - 1.0).norm() < 1e-14);
        assert!(back.values()[1..].iter().all(|c| c.norm() < 1e-14));
    }

    #[test]
    fn plane_wave_is_orthogonal() {
        let g = GridSpec::new(2, 0.5, 8).unwrap();
        let k0 = [3i64, -2];
        let xi0 = [k0[0] as f64 * g.frequency_step(), k0[1] as f64 * g.frequency_step()];
        let u: ComplexField =
            LatticeField::from_fn(g, |a| Complex64::from_polar(1.0, xi0[0] * a[0] + xi0[1] * a[1])).unwrap();
        let hat = dft(&u);
        let big = g.box_volume();
        for i in 0..g.len() {
            let expect = if i == g.flat_from_offsets(&k0) { big } else { 0.0 };
            assert!((hat.coeffs()[i] - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn zero_coefficients_give_zero_field() {
        let g = GridSpec::new(2, 0.5, 8).unwrap();
        let z = idft(&SpectralField::from_fn(g, |_| Complex64::default()));
        assert_eq!(z.max_abs(), 0.0);
    }

    #[test]
    fn round_trip_random_coefficients() {
        let g = GridSpec::new(2, 0.3, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let coeffs = (0..g.len()).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let hat = SpectralField::new(g, coeffs).unwrap();
        let again = dft(&idft(&hat));
        for (a, b) in hat.coeffs().iter().zip(again.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn hermitian_symmetry_of_real_field() {
        let g = GridSpec::new(2, 0.4, 8).unwrap();
        let hat = dft(&random_field(g, 9));
        for kx in -3i64..4 {
            for ky in -3i64..4 {
                let a = hat.at(&[kx, ky]);
                let b = hat.at(&[-kx, -ky]);
                assert!((a - b.conj()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sobolev_s0_is_l2() {
        let g = GridSpec::new(2, 0.25, 16).unwrap();
        let u = random_field(g, 2);
        assert_relative_eq!(sobolev_norm(&u, 0.0), l2_norm_sq(&u).sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn sobolev_of_impulse_is_sqrt3() {
        // (1/2pi) int (1 + 4 sin^2(xi/2)) dxi = 3; a 4096-point midpoint sum
        // of the same integrand is the independent check.
        let n = 4096;
        let quad: f64 = (0..n)
            .map(|i| {
                let xi = -PI + (i as f64 + 0.5) * 2.0 * PI / n as f64;
                1.0 + 4.0 * (xi / 2.0).sin().powi(2)
            })
            .sum::<f64>()
            / n as f64;
        assert_relative_eq!(quad, 3.0, max_relative = 1e-12);
        let g = GridSpec::new(1, 1.0, 64).unwrap();
        let u = LatticeField::impulse(g, &[0], 1.0);
        assert_relative_eq!(sobolev_norm(&u, 1.0), 3f64.sqrt(), max_relative = 1e-12);
    }

    #[test]
    fn h1_identity_matches_real_space() {
        let g = GridSpec::new(3, 0.5, 8).unwrap();
        let u = random_field(g, 4);
        let real = l2_norm_sq(&u) + gradient_norm_sq(&forward_gradient(&u));
        assert_relative_eq!(sobolev_norm(&u, 1.0).powi(2), real, max_relative = 1e-10);
    }

    #[test]
    fn sobolev_monotone_in_s() {
        let g = GridSpec::new(1, 0.2, 32).unwrap();
        let u = random_field(g, 7);
        let norms: Vec<f64> = [-1.0, 0.0, 0.5, 1.0, 2.0].iter().map(|&s| sobolev_norm(&u, s)).collect();
        assert!(norms.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn kg_multiplier_values() {
        let g = GridSpec::new(1, 1.0, 8).unwrap();
        let k0 = kg_multiplier(&g, MultiplierKind::K, 0.0).unwrap();
        let kd0 = kg_multiplier(&g, MultiplierKind::Kdot, 0.0).unwrap();
        assert!(k0.coeffs().iter().all(|c| c.norm() == 0.0));
        assert!(kd0.coeffs().iter().all(|c| (c - 1.0).norm() == 0.0));
        let t = 1.7;
        let k = kg_multiplier(&g, MultiplierKind::K, t).unwrap();
        let kd = kg_multiplier(&g, MultiplierKind::Kdot, t).unwrap();
        assert_relative_eq!(k.at(&[0]).re, t.sin(), max_relative = 1e-15);
        assert_relative_eq!(kd.at(&[0]).re, t.cos(), max_relative = 1e-15);
        // Nyquist index sits at xi = -pi: omega = sqrt(1 + 4) = sqrt 5.
        let w = 5f64.sqrt();
        assert_relative_eq!(k.at(&[-4]).re, (w * t).sin() / w, max_relative = 1e-14);
        assert_relative_eq!(kd.at(&[-4]).re, (w * t).cos(), max_relative = 1e-14);
    }

    #[test]
    fn unitary_flow_preserves_l2() {
        let g = GridSpec::new(2, 0.5, 16).unwrap();
        let u = random_field(g, 1).to_complex();
        for spec in
            [DispersionSpec::wave(0.5, 2), DispersionSpec::schrodinger(0.5, 2), DispersionSpec::klein_gordon(0.5, 2)]
        {
            let w = kg_multiplier(&g, MultiplierKind::U(spec), 3.3).unwrap();
            assert!(w.coeffs().iter().all(|c| (c.norm() - 1.0).abs() < 1e-15));
            let out = apply_multiplier(&u, &w);
            assert_relative_eq!(l2_norm_sq(&out), l2_norm_sq(&u), max_relative = 1e-12);
        }
    }

    #[test]
    fn multipliers_commute_with_laplacian() {
        let g = GridSpec::new(2, 0.3, 16).unwrap();
        let u = random_field(g, 8);
        let k = kg_multiplier(&g, MultiplierKind::K, 0.9).unwrap();
        let kd = kg_multiplier(&g, MultiplierKind::Kdot, 2.1).unwrap();
        let a = apply_multiplier(&discrete_laplacian(&u), &k);
        let b = discrete_laplacian(&apply_multiplier(&u, &k));
        assert!((&a - &b).max_abs() <= 1e-12 * (1.0 + a.max_abs()));
        let ab = apply_multiplier(&apply_multiplier(&u, &k), &kd);
        let ba = apply_multiplier(&apply_multiplier(&u, &kd), &k);
        assert!((&ab - &ba).max_abs() < 1e-12);
    }

    #[test]
    fn laplacian_symbol_matches_spectral_weight() {
        let g = GridSpec::new(2, 0.7, 8).unwrap();
        let u = random_field(g, 12);
        let h = g.step();
        let spectral = idft_real(&dft(&u).map_with_frequency(|xi| Complex64::new(-lattice_symbol(xi, h), 0.0)));
        let direct = discrete_laplacian(&u);
        assert!((&spectral - &direct).max_abs() < 1e-11);
    }
}
