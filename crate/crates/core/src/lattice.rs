//! Real-space finite-difference operators and discrete Lebesgue norms.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{ordered_sum, LatticeField, Scalar};

/// Nearest-neighbour Laplacian with periodic wraparound:
/// `sum_j [u(a + h e_j) + u(a - h e_j) - 2 u(a)] / h^2`.
pub fn discrete_laplacian<T: Scalar>(u: &LatticeField<T>) -> LatticeField<T> {
    let grid = *u.grid();
    let inv_h2 = 1.0 / (grid.step() * grid.step());
    let mut acc = LatticeField::zeros(grid);
    for axis in 0..grid.dim() {
        let fwd = u.shift(axis, 1);
        let bwd = u.shift(axis, -1);
        let second = fwd.zip_with(&bwd, |a, b| a + b).zip_with(u, |s, c| s - c * 2.0);
        acc = &acc + &second;
    }
    acc.scale(inv_h2)
}

/// Components `[u(a + h e_j) - u(a)] / h`.
pub fn forward_gradient<T: Scalar>(u: &LatticeField<T>) -> Vec<LatticeField<T>> {
    let inv_h = 1.0 / u.grid().step();
    (0..u.grid().dim()).map(|axis| u.shift(axis, 1).zip_with(u, |a, b| (a - b) * inv_h)).collect()
}

/// Components `[u(a) - u(a - h e_j)] / h`.
pub fn backward_gradient<T: Scalar>(u: &LatticeField<T>) -> Vec<LatticeField<T>> {
    let inv_h = 1.0 / u.grid().step();
    (0..u.grid().dim()).map(|axis| u.zip_with(&u.shift(axis, -1), |a, b| (a - b) * inv_h)).collect()
}

/// Components `[u(a + h e_j) - u(a - h e_j)] / (2h)`, the average of the
/// forward and backward differences.
pub fn centered_gradient<T: Scalar>(u: &LatticeField<T>) -> Vec<LatticeField<T>> {
    let inv_h = 0.5 / u.grid().step();
    (0..u.grid().dim()).map(|axis| u.shift(axis, 1).zip_with(&u.shift(axis, -1), |a, b| (a - b) * inv_h)).collect()
}

/// Squared `L^2_h` norm of a vector of components.
pub fn gradient_norm_sq<T: Scalar>(components: &[LatticeField<T>]) -> f64 {
    components.iter().map(|c| l2_norm_sq(c)).sum()
}

/// `h^d sum |u|^2`.
pub fn l2_norm_sq<T: Scalar>(u: &LatticeField<T>) -> f64 {
    let s = ordered_sum(u.values().par_iter().map(|v| {
        let m = v.modulus();
        m * m
    }));
    s * u.grid().cell_volume()
}

/// `(h^d sum |u|^q)^{1/q}`, or `sup |u|` for `q = inf`.
pub fn lebesgue_norm<T: Scalar>(u: &LatticeField<T>, q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidParameter(format!("Lebesgue exponent must be >= 1, got {q}")));
    }
    if q.is_infinite() {
        return Ok(u.max_abs());
    }
    if q == 2.0 {
        return Ok(l2_norm_sq(u).sqrt());
    }
    // Scale by the sup before raising to q to stay clear of overflow.
    let top = u.max_abs();
    if top == 0.0 {
        return Ok(0.0);
    }
    let s = ordered_sum(u.values().par_iter().map(|v| (v.modulus() / top).powf(q)));
    Ok(top * (s * u.grid().cell_volume()).powf(1.0 / q))
}

/// `|u|^{p-1} u` for a real scalar; zero maps to zero for every `p`.
#[inline]
pub fn signed_power(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p.fract() == 0.0 && p <= 32.0 {
        x.abs().powi(p as i32 - 1) * x
    } else {
        x.abs().powf(p - 1.0) * x
    }
}

/// Pointwise `|u|^{p-1} u`.
pub fn power_nonlinearity(u: &LatticeField<f64>, p: f64) -> Result<LatticeField<f64>> {
    if !(p.is_finite() && p > 1.0) {
        return Err(Error::InvalidParameter(format!("nonlinearity exponent must exceed 1, got {p}")));
    }
    Ok(u.map(|x| signed_power(x, p)))
}
