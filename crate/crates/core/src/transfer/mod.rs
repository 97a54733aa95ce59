//! Passing between continuous functions and lattice fields: mean projection,
//! Shannon interpolation and continuous Sobolev errors.

mod function;

pub use function::ContinuousFunction;

use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use libm::{erf, erfc};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{LatticeField, Scalar};
use crate::grid::GridSpec;
use crate::spectral::{dft, idft, SpectralField};

/// Absolute tolerance on the estimated error of a cell mean.
pub const CELL_TOLERANCE: f64 = 1e-12;
const MAX_SUBDIVISIONS: usize = 64;

/// `sin(x) / x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

fn check_refinement(r: usize) -> Result<()> {
    if r == 0 || !r.is_power_of_two() {
        return Err(Error::InvalidParameter(format!("refinement must be a power of two, got {r}")));
    }
    Ok(())
}

/// Mean of `e^{-(x - c)^2 / (2 sigma^2)}` over `[a - h/2, a + h/2]`.
fn gaussian_cell_mean(a: f64, h: f64, c: f64, sigma: f64) -> f64 {
    let s = sigma * std::f64::consts::SQRT_2;
    let lo = (a - 0.5 * h - c) / s;
    let hi = (a + 0.5 * h - c) / s;
    let diff = if lo >= 0.0 {
        erfc(lo) - erfc(hi)
    } else if hi <= 0.0 {
        erfc(-hi) - erfc(-lo)
    } else {
        erf(hi) - erf(lo)
    };
    sigma * (0.5 * std::f64::consts::PI).sqrt() / h * diff
}

fn rules() -> &'static (GaussLegendre, GaussLegendre) {
    static RULES: OnceLock<(GaussLegendre, GaussLegendre)> = OnceLock::new();
    RULES.get_or_init(|| {
        let order = |n: usize| GaussLegendre::new(n.try_into().expect("nonzero order"));
        (order(8), order(6))
    })
}

/// Composite Gauss-Legendre mean of `f` over `[a - h/2, a + h/2]`, order 8
/// checked against order 6 and subdivided until they agree.
fn cell_mean<F: Fn(f64) -> Complex64>(f: &F, a: f64, h: f64, cell: usize) -> Result<Complex64> {
    let (q8, q6) = rules();
    let mut pieces = 1;
    loop {
        let dx = h / pieces as f64;
        let (mut hi, mut lo) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        for p in 0..pieces {
            let start = a - 0.5 * h + p as f64 * dx;
            for (x, w) in q8.iter() {
                hi += f(start + 0.5 * dx * (x + 1.0)) * (0.5 * dx * w);
            }
            for (x, w) in q6.iter() {
                lo += f(start + 0.5 * dx * (x + 1.0)) * (0.5 * dx * w);
            }
        }
        let estimate = (hi - lo).norm() / h;
        if estimate <= CELL_TOLERANCE {
            return Ok(hi / h);
        }
        if pieces >= MAX_SUBDIVISIONS {
            return Err(Error::Quadrature { estimate, tolerance: CELL_TOLERANCE, cell });
        }
        pieces *= 2;
    }
}

/// Tensor product of per-axis factor tables, in storage order.
fn separable(grid: &GridSpec, factors: &[Vec<Complex64>]) -> Vec<Complex64> {
    let d = grid.dim();
    (0..grid.len())
        .into_par_iter()
        .map(|flat| {
            let idx = grid.multi_index(flat);
            (0..d).map(|j| factors[j][idx[j]]).product()
        })
        .collect()
}

fn axis_sites(grid: &GridSpec) -> Vec<f64> {
    (0..grid.points()).map(|i| grid.wrapped(i) as f64 * grid.step()).collect()
}

/// Cell averages `pi_h phi(a) = h^{-d} int_{a + [-h/2, h/2)^d} phi`.
pub fn mean_project(phi: &ContinuousFunction, grid: &GridSpec) -> Result<LatticeField<f64>> {
    phi.validate(grid.dim())?;
    let h = grid.step();
    let d = grid.dim();
    let sites = axis_sites(grid);
    match phi {
        ContinuousFunction::Zero => Ok(LatticeField::zeros(*grid)),
        ContinuousFunction::Constant(c) => Ok(LatticeField::constant(*grid, *c)),
        ContinuousFunction::Affine { .. } => LatticeField::from_fn(*grid, |x| phi.eval(x)),
        ContinuousFunction::Gaussian { amplitude, center, width } => {
            let factors: Vec<Vec<Complex64>> = (0..d)
                .map(|j| {
                    sites.iter().map(|&a| Complex64::new(gaussian_cell_mean(a, h, center[j], *width), 0.0)).collect()
                })
                .collect();
            let values = separable(grid, &factors).into_iter().map(|z| amplitude * z.re).collect();
            LatticeField::new(*grid, values)
        }
        ContinuousFunction::ModulatedGaussian { amplitude, center, width, wavevector, phase } => {
            let mut factors = Vec::with_capacity(d);
            for j in 0..d {
                let (c, k, s) = (center[j], wavevector[j], *width);
                let f = move |x: f64| Complex64::from_polar((-(x - c) * (x - c) / (2.0 * s * s)).exp(), k * (x - c));
                let column: Result<Vec<Complex64>> =
                    sites.par_iter().enumerate().map(|(i, &a)| cell_mean(&f, a, h, i)).collect();
                factors.push(column?);
            }
            let rot = Complex64::from_polar(*amplitude, *phase);
            let values = separable(grid, &factors).into_iter().map(|z| (rot * z).re).collect();
            LatticeField::new(*grid, values)
        }
        ContinuousFunction::Sum(terms) => {
            let mut acc = LatticeField::zeros(*grid);
            for t in terms {
                acc = &acc + &mean_project(t, grid)?;
            }
            Ok(acc)
        }
        ContinuousFunction::BandLimited(u) => {
            // Cell averaging multiplies each mode by prod sinc(h xi_j / 2).
            let source = u.grid();
            let averaged =
                dft(u).map_with_frequency(|xi| Complex64::new(xi.iter().map(|x| sinc(0.5 * h * x)).product(), 0.0));
            let on_source: LatticeField<f64> = idft(&averaged).re();
            debug_assert!(source.dim() == d);
            resample(&on_source, grid)
        }
    }
}

/// Zero-pads the spectrum of `u` into the grid of step `h / r`.
///
/// Complex fields keep the unpaired Nyquist mode on the negative side, so
/// the map is an exact isometry. Real fields keep the real part, which
/// splits that mode symmetrically.
pub fn shannon_interpolate<T: Scalar>(u: &LatticeField<T>, r: usize) -> Result<LatticeField<T>> {
    check_refinement(r)?;
    if r == 1 {
        return Ok(u.clone());
    }
    let coarse = *u.grid();
    let fine = coarse.refine(r)?;
    let d = coarse.dim();
    let spectrum = dft(u);
    let mut coeffs = vec![Complex64::new(0.0, 0.0); fine.len()];
    for (flat, c) in spectrum.coeffs().iter().enumerate() {
        let idx = coarse.multi_index(flat);
        let mut target = [0usize; 3];
        for j in 0..d {
            target[j] = fine.unwrapped(coarse.wrapped(idx[j]));
        }
        coeffs[fine.flat_index(&target[..d])] = *c;
    }
    let values = idft(&SpectralField::new(fine, coeffs)?).into_values();
    LatticeField::new(fine, values.into_iter().map(T::from_complex).collect())
}

/// Values at every `r`-th site, on the grid of step `r h`.
pub fn restrict<T: Scalar>(u: &LatticeField<T>, r: usize) -> Result<LatticeField<T>> {
    check_refinement(r)?;
    let fine = *u.grid();
    if fine.points() % r != 0 {
        return Err(Error::InvalidGrid(format!("{} points do not split by {r}", fine.points())));
    }
    let coarse = GridSpec::new(fine.dim(), fine.step() * r as f64, fine.points() / r)?;
    let d = fine.dim();
    let values = (0..coarse.len())
        .map(|flat| {
            let idx = coarse.multi_index(flat);
            let mut target = [0usize; 3];
            for j in 0..d {
                target[j] = r * idx[j];
            }
            u.values()[fine.flat_index(&target[..d])]
        })
        .collect();
    LatticeField::new(coarse, values)
}

/// Moves a field to another grid on the same box by interpolation or
/// restriction.
pub fn resample(u: &LatticeField<f64>, grid: &GridSpec) -> Result<LatticeField<f64>> {
    let source = u.grid();
    if source.dim() != grid.dim() || (source.box_length() - grid.box_length()).abs() > 1e-9 * grid.box_length() {
        return Err(Error::GridMismatch(format!(
            "cannot resample a box of side {} onto one of side {}",
            source.box_length(),
            grid.box_length()
        )));
    }
    let (a, b) = (source.points(), grid.points());
    if a == b {
        Ok(LatticeField::new(*grid, u.values().to_vec())?)
    } else if b > a && b % a == 0 {
        shannon_interpolate(u, b / a)
    } else if a > b && a % b == 0 {
        restrict(u, a / b)
    } else {
        Err(Error::GridMismatch(format!("point counts {a} and {b} are not related by a power of two")))
    }
}

/// `max_xi |dft(pi_h phi)(xi) - F phi(xi) prod_j sinc(h xi_j / 2)|`.
///
/// On the periodic box the left side sees the periodization of `phi`, so
/// the residual bottoms out at the mass of `phi` outside the box.
pub fn projection_interpolation_residual(phi: &ContinuousFunction, grid: &GridSpec) -> Result<f64> {
    let projected = dft(&mean_project(phi, grid)?);
    let h = grid.step();
    let d = grid.dim();
    let gaps: Result<Vec<f64>> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let xi = grid.frequency(i);
            let xi = &xi[..d];
            let weight: f64 = xi.iter().map(|x| sinc(0.5 * h * x)).product();
            Ok((projected.coeffs()[i] - phi.fourier(xi)? * weight).norm())
        })
        .collect();
    Ok(gaps?.into_iter().fold(0.0, f64::max))
}

/// `||a - b||_{H^s}` with the continuous weight `(1 + |xi|^2)^s` on the
/// frequency grid of the common grid.
pub fn hs_error<T: Scalar>(a: &LatticeField<T>, b: &LatticeField<T>, s: f64) -> Result<f64> {
    a.grid().ensure_same(b.grid())?;
    let diff = a - b;
    Ok(dft(&diff).weighted_norm(|xi| (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).powf(s)))
}

/// `||S(fg) - S f . S g||_{H^s}` on the grid refined by `r`.
pub fn aliasing_defect(f: &LatticeField<f64>, g: &LatticeField<f64>, s: f64, r: usize) -> Result<f64> {
    f.grid().ensure_same(g.grid())?;
    let product = f * g;
    let sf = shannon_interpolate(f, r)?;
    let sg = shannon_interpolate(g, r)?;
    let sfg = shannon_interpolate(&product, r)?;
    hs_error(&sfg, &(&sf * &sg), s)
}
