use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::LatticeField;
use crate::grid::GridSpec;
use crate::spectral::dft;

/// Real functions on `R^d` with closed-form values and Fourier transforms
/// `F phi(xi) = int e^{-i x.xi} phi(x) dx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ContinuousFunction {
    Zero,
    Constant(f64),
    /// `offset + slope . x`.
    Affine {
        offset: f64,
        slope: Vec<f64>,
    },
    /// `A exp(-|x - c|^2 / (2 sigma^2))`.
    Gaussian {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// `A exp(-|x - c|^2 / (2 sigma^2)) cos(k.(x - c) + theta)`.
    ModulatedGaussian {
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
        wavevector: Vec<f64>,
        phase: f64,
    },
    Sum(Vec<ContinuousFunction>),
    /// Band-limited periodic extension of a lattice field.
    BandLimited(LatticeField<f64>),
}

impl ContinuousFunction {
    pub fn gaussian(amplitude: f64, center: Vec<f64>, width: f64) -> Self {
        Self::Gaussian { amplitude, center, width }
    }

    /// Dimension fixed by the descriptor, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            Self::Zero | Self::Constant(_) => None,
            Self::Affine { slope, .. } => Some(slope.len()),
            Self::Gaussian { center, .. } | Self::ModulatedGaussian { center, .. } => Some(center.len()),
            Self::Sum(terms) => terms.iter().find_map(|t| t.dim()),
            Self::BandLimited(u) => Some(u.grid().dim()),
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParameter(format!("{what} in a {dim}-dimensional function")));
        match self {
            Self::Zero => Ok(()),
            Self::Constant(c) if !c.is_finite() => bad("non-finite constant"),
            Self::Constant(_) => Ok(()),
            Self::Affine { offset, slope } => {
                if slope.len() != dim || !offset.is_finite() || slope.iter().any(|s| !s.is_finite()) {
                    return bad("bad affine coefficients");
                }
                Ok(())
            }
            Self::Gaussian { amplitude, center, width } => {
                if center.len() != dim || !amplitude.is_finite() || !(width.is_finite() && *width > 0.0) {
                    return bad("bad Gaussian parameters");
                }
                Ok(())
            }
            Self::ModulatedGaussian { amplitude, center, width, wavevector, phase } => {
                if center.len() != dim
                    || wavevector.len() != dim
                    || !amplitude.is_finite()
                    || !phase.is_finite()
                    || !(width.is_finite() && *width > 0.0)
                {
                    return bad("bad modulated Gaussian parameters");
                }
                Ok(())
            }
            Self::Sum(terms) => terms.iter().try_for_each(|t| t.validate(dim)),
            Self::BandLimited(u) if u.grid().dim() != dim => bad("band-limited field of another dimension"),
            Self::BandLimited(_) => Ok(()),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::Affine { offset, slope } => offset + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
            Self::Gaussian { amplitude, center, width } => amplitude * gauss(x, center, *width),
            Self::ModulatedGaussian { amplitude, center, width, wavevector, phase } => {
                let kx: f64 = wavevector.iter().zip(x.iter().zip(center)).map(|(k, (a, c))| k * (a - c)).sum();
                amplitude * gauss(x, center, *width) * (kx + phase).cos()
            }
            Self::Sum(terms) => terms.iter().map(|t| t.eval(x)).sum(),
            Self::BandLimited(u) => band_limited_value(u, x),
        }
    }

    /// Continuous Fourier transform. Band-limited fields return their
    /// Fourier-series coefficient at frequencies of their grid.
    pub fn fourier(&self, xi: &[f64]) -> Result<Complex64> {
        let zero = Complex64::new(0.0, 0.0);
        match self {
            Self::Zero => Ok(zero),
            Self::Constant(_) | Self::Affine { .. } => {
                Err(Error::Unsupported("Fourier transform of a non-decaying function".into()))
            }
            Self::Gaussian { amplitude, center, width } => {
                Ok(gaussian_transform(*amplitude, *width, xi) * shift_phase(center, xi))
            }
            Self::ModulatedGaussian { amplitude, center, width, wavevector, phase } => {
                let minus: Vec<f64> = xi.iter().zip(wavevector).map(|(x, k)| x - k).collect();
                let plus: Vec<f64> = xi.iter().zip(wavevector).map(|(x, k)| x + k).collect();
                let up = gaussian_transform(*amplitude, *width, &minus) * Complex64::from_polar(0.5, *phase);
                let down = gaussian_transform(*amplitude, *width, &plus) * Complex64::from_polar(0.5, -phase);
                Ok((up + down) * shift_phase(center, xi))
            }
            Self::Sum(terms) => terms.iter().map(|t| t.fourier(xi)).sum(),
            Self::BandLimited(u) => {
                let grid = u.grid();
                let dxi = grid.frequency_step();
                let m = grid.points() as i64;
                let mut k = [0i64; 3];
                for (j, x) in xi.iter().enumerate() {
                    let q = x / dxi;
                    if (q - q.round()).abs() > 1e-9 * q.abs().max(1.0) {
                        return Err(Error::Unsupported(format!(
                            "frequency {x} is off the lattice of the band-limited field"
                        )));
                    }
                    k[j] = q.round() as i64;
                    if k[j] < -m / 2 || k[j] >= m / 2 {
                        return Ok(zero);
                    }
                }
                Ok(dft(u).at(&k[..xi.len()]))
            }
        }
    }

    /// Point values at the grid sites.
    pub fn sample_on(&self, grid: &GridSpec) -> Result<LatticeField<f64>> {
        self.validate(grid.dim())?;
        if let Self::BandLimited(u) = self {
            return super::resample(u, grid);
        }
        LatticeField::from_fn(*grid, |x| self.eval(x))
    }
}

fn gauss(x: &[f64], center: &[f64], width: f64) -> f64 {
    let r2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
    (-r2 / (2.0 * width * width)).exp()
}

/// Transform of `A exp(-|x|^2 / (2 sigma^2))`.
fn gaussian_transform(amplitude: f64, width: f64, xi: &[f64]) -> Complex64 {
    let d = xi.len() as i32;
    let r2: f64 = xi.iter().map(|x| x * x).sum();
    let value = amplitude * (2.0 * PI * width * width).powf(0.5 * d as f64) * (-0.5 * width * width * r2).exp();
    Complex64::new(value, 0.0)
}

fn shift_phase(center: &[f64], xi: &[f64]) -> Complex64 {
    let cx: f64 = center.iter().zip(xi).map(|(c, x)| c * x).sum();
    Complex64::from_polar(1.0, -cx)
}

/// Trigonometric interpolant of `u` at an arbitrary point, by direct summation.
fn band_limited_value(u: &LatticeField<f64>, x: &[f64]) -> f64 {
    let grid = u.grid();
    let d = grid.dim();
    let spectrum = dft(u);
    let total: Complex64 = (0..grid.len())
        .map(|i| {
            let xi = grid.frequency(i);
            let phase: f64 = (0..d).map(|j| xi[j] * x[j]).sum();
            spectrum.coeffs()[i] * Complex64::from_polar(1.0, phase)
        })
        .sum();
    total.re / grid.box_volume()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_values() {
        let g = ContinuousFunction::gaussian(2.0, vec![1.0, 0.0], 0.5);
        assert_eq!(g.eval(&[1.0, 0.0]), 2.0);
        assert!((g.eval(&[1.5, 0.0]) - 2.0 * (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(g.dim(), Some(2));
        assert!(g.validate(1).is_err());
        assert!(ContinuousFunction::gaussian(1.0, vec![0.0], 0.0).validate(1).is_err());
    }

    /// Direct trapezoid quadrature of the transform integral.
    fn fourier_oracle(f: &ContinuousFunction, xi: f64) -> Complex64 {
        let (a, n) = (20.0, 40000);
        let dx = 2.0 * a / n as f64;
        (0..n)
            .map(|k| {
                let x = -a + k as f64 * dx;
                Complex64::from_polar(f.eval(&[x]) * dx, -x * xi)
            })
            .sum()
    }

    #[test]
    fn transforms_match_quadrature() {
        let family = [
            ContinuousFunction::gaussian(1.3, vec![0.7], 1.1),
            ContinuousFunction::ModulatedGaussian {
                amplitude: 0.8,
                center: vec![-0.4],
                width: 0.9,
                wavevector: vec![2.5],
                phase: 0.3,
            },
            ContinuousFunction::Sum(vec![
                ContinuousFunction::gaussian(1.0, vec![1.0], 0.6),
                ContinuousFunction::gaussian(-0.5, vec![-2.0], 1.4),
            ]),
        ];
        for f in &family {
            for xi in [0.0, 0.37, -1.9, 4.2] {
                let diff = (f.fourier(&[xi]).unwrap() - fourier_oracle(f, xi)).norm();
                assert!(diff < 1e-10, "{f:?} at {xi}: {diff}");
            }
        }
    }

    #[test]
    fn non_decaying_functions_have_no_transform() {
        assert!(ContinuousFunction::Constant(1.0).fourier(&[0.0]).is_err());
        assert_eq!(ContinuousFunction::Zero.fourier(&[1.0]).unwrap(), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn band_limited_round_trip() {
        let grid = GridSpec::new(1, 0.5, 16).unwrap();
        let u = LatticeField::from_fn(grid, |x| (2.0 * PI * x[0] / 8.0).cos() + 0.25).unwrap();
        let f = ContinuousFunction::BandLimited(u.clone());
        assert!((f.eval(&[0.5]) - u.at(&[1])).abs() < 1e-13);
        // Between sites the interpolant is the continuous cosine.
        assert!((f.eval(&[0.3]) - ((2.0 * PI * 0.3 / 8.0).cos() + 0.25)).abs() < 1e-13);
        let c0 = f.fourier(&[0.0]).unwrap();
        assert!((c0.re - 0.25 * 8.0).abs() < 1e-13);
        assert_eq!(f.fourier(&[100.0 * grid.frequency_step()]).unwrap(), Complex64::new(0.0, 0.0));
        assert!(f.fourier(&[0.1]).is_err());
    }
}
