//! Oscillatory integrals `J(v, tau) = int exp(i tau (v.xi - gamma(xi))) zeta(xi) dxi`
//! in the rescaled variables `xi' = h xi`, `tau = t / h^alpha`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::fit::{fit_decay_exponent, DecayFit, MIN_FIT_POINTS};
use super::DispersionSpec;
use crate::error::{Error, Result};
use crate::field::ordered_sum_complex;
use crate::grid::GridSpec;
use crate::spectral::fft;
use crate::spectral::LpCutoffs;

/// Frequency content of a smooth transition of unit width, in units where
/// its Fourier transform has fallen to roundoff.
const TRANSITION_BANDWIDTH: f64 = 550.0;

/// `gamma(xi) = (gap^2 + sum_j 4 sin^2(xi_j / 2))^{alpha/2}`; for a lattice
/// of step `h` and mass `m` the gap is `m h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RescaledSymbol {
    pub gap: f64,
    pub alpha: u8,
    pub dim: usize,
}

impl RescaledSymbol {
    pub fn new(gap: f64, alpha: u8, dim: usize) -> Result<Self> {
        if !(gap.is_finite() && gap >= 0.0) || !(alpha == 1 || alpha == 2) || !(1..=3).contains(&dim) {
            return Err(Error::InvalidParameter(format!(
                "bad rescaled symbol (gap = {gap}, alpha = {alpha}, d = {dim})"
            )));
        }
        Ok(Self { gap, alpha, dim })
    }

    pub fn of(spec: &DispersionSpec) -> Self {
        Self { gap: spec.mass * spec.step, alpha: spec.alpha, dim: spec.dim }
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let base = self.gap * self.gap
            + xi.iter()
                .map(|x| {
                    let s = (0.5 * x).sin();
                    4.0 * s * s
                })
                .sum::<f64>();
        match self.alpha {
            1 => base.sqrt(),
            _ => base,
        }
    }

    /// Bound on `|d gamma / d xi_j|`.
    pub fn axis_speed_bound(&self) -> f64 {
        match self.alpha {
            1 => 1.0,
            _ => 2.0,
        }
    }
}

/// The phase `tau Phi_v(xi) = tau (v.xi - gamma(xi))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseSpec {
    pub gamma: RescaledSymbol,
    pub velocity: Vec<f64>,
    pub tau: f64,
}

impl PhaseSpec {
    pub fn new(gamma: RescaledSymbol, velocity: Vec<f64>, tau: f64) -> Result<Self> {
        if velocity.len() != gamma.dim || velocity.iter().any(|v| !v.is_finite()) || !tau.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "phase needs {} finite velocity components and finite tau",
                gamma.dim
            )));
        }
        Ok(Self { gamma, velocity, tau })
    }

    /// Phase reproducing the lattice kernel of `spec` at site `a`, time `t`:
    /// `tau = t / h^alpha`, `v = a / (h tau)`.
    pub fn for_lattice_site(spec: &DispersionSpec, site: &[f64], t: f64) -> Result<Self> {
        if t == 0.0 {
            return Err(Error::InvalidParameter("velocity is undefined at t = 0".into()));
        }
        let tau = t / spec.step.powi(spec.alpha as i32);
        let velocity = site.iter().map(|a| a / (spec.step * tau)).collect();
        Self::new(RescaledSymbol::of(spec), velocity, tau)
    }

    fn dim(&self) -> usize {
        self.gamma.dim
    }

    #[inline]
    fn value(&self, xi: &[f64]) -> f64 {
        let vx: f64 = self.velocity.iter().zip(xi).map(|(v, x)| v * x).sum();
        self.tau * (vx - self.gamma.eval(xi))
    }
}

/// Amplitude `zeta` of the oscillatory integral, in rescaled frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Window {
    Zero,
    /// `psi(2 pi |xi - center| / radius)`: equal to 1 within `radius / 2`,
    /// supported within `radius`.
    Bump {
        center: Vec<f64>,
        radius: f64,
    },
    /// Indicator of the Brillouin zone `[-pi, pi]^d`; integrals over it are
    /// periodic only when `tau v` is an integer vector.
    BrillouinZone,
    /// `eta(|xi| / N)` for a dyadic `N <= 1/2`, whose support stays inside
    /// the Brillouin zone.
    Annulus {
        scale: f64,
    },
}

impl Window {
    pub fn bump(center: Vec<f64>, radius: f64) -> Self {
        Window::Bump { center, radius }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Window::Bump { center, radius } => {
                if center.len() != dim || !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "bump needs a {dim}-dimensional center and positive radius"
                    )));
                }
            }
            Window::Annulus { scale } => {
                crate::spectral::lp::check_dyadic(*scale)?;
                if *scale > 0.5 {
                    return Err(Error::Unsupported(format!("annulus of scale {scale} leaves the Brillouin zone")));
                }
            }
            Window::Zero | Window::BrillouinZone => {}
        }
        Ok(())
    }

    pub fn eval(&self, xi: &[f64]) -> f64 {
        let cut = LpCutoffs;
        match self {
            Window::Zero => 0.0,
            Window::Bump { center, radius } => {
                let r = xi.iter().zip(center).map(|(x, c)| (x - c) * (x - c)).sum::<f64>().sqrt();
                cut.psi(2.0 * PI * r / radius)
            }
            Window::BrillouinZone => {
                if xi.iter().all(|x| x.abs() <= PI) {
                    1.0
                } else {
                    0.0
                }
            }
            Window::Annulus { scale } => {
                let r = xi.iter().map(|x| x * x).sum::<f64>().sqrt();
                cut.eta(r / scale)
            }
        }
    }

    /// Integration interval along `axis`.
    fn support(&self, axis: usize) -> (f64, f64) {
        match self {
            Window::Bump { center, radius } => (center[axis] - radius, center[axis] + radius),
            Window::Annulus { scale } => (-2.0 * PI * scale, 2.0 * PI * scale),
            Window::Zero | Window::BrillouinZone => (-PI, PI),
        }
    }

    fn is_periodic(&self) -> bool {
        matches!(self, Window::BrillouinZone)
    }

    /// Angular frequency beyond which the window's spectrum is negligible.
    fn bandwidth(&self) -> f64 {
        match self {
            Window::Bump { radius, .. } => TRANSITION_BANDWIDTH / (0.5 * radius),
            Window::Annulus { scale } => TRANSITION_BANDWIDTH / (0.5 * PI * scale),
            Window::Zero | Window::BrillouinZone => 0.0,
        }
    }
}

/// Resolution policy for the trapezoid rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub points_per_oscillation: f64,
    pub min_points: usize,
    pub max_total_points: u128,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        Self { points_per_oscillation: 16.0, min_points: 512, max_total_points: 1 << 28 }
    }
}

impl QuadratureRule {
    fn refined(&self) -> Self {
        Self {
            points_per_oscillation: 2.0 * self.points_per_oscillation,
            min_points: 2 * self.min_points,
            max_total_points: self.max_total_points,
        }
    }

    fn axis_points(&self, phase: &PhaseSpec, window: &Window, axis: usize) -> usize {
        let (lo, hi) = window.support(axis);
        let width = hi - lo;
        let rate = phase.tau.abs() * (phase.velocity[axis].abs() + phase.gamma.axis_speed_bound());
        let oscillations = self.points_per_oscillation * rate * width / (2.0 * PI);
        let band = if window.is_periodic() {
            0.0
        } else {
            self.points_per_oscillation / 16.0 * window.bandwidth() * width / (2.0 * PI)
        };
        (oscillations.max(band).ceil() as usize).max(self.min_points)
    }

    fn check_budget(&self, points: &[usize]) -> Result<()> {
        let required: u128 = points.iter().map(|&n| n as u128).product();
        if required > self.max_total_points {
            return Err(Error::Resolution { required, budget: self.max_total_points });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryValue {
    pub value: Complex64,
    pub points: Vec<usize>,
}

/// A value together with its resolution-doubling check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certified {
    pub value: Complex64,
    pub points: Vec<usize>,
    /// `||J_2n| - |J_n|| / |J_2n|`.
    pub relative_change: f64,
}

/// Trapezoid rule on the window's support box at the rule's resolution.
pub fn oscillatory_integral(phase: &PhaseSpec, window: &Window, rule: &QuadratureRule) -> Result<OscillatoryValue> {
    let d = phase.dim();
    window.validate(d)?;
    let points: Vec<usize> = (0..d).map(|j| rule.axis_points(phase, window, j)).collect();
    if matches!(window, Window::Zero) {
        return Ok(OscillatoryValue { value: Complex64::new(0.0, 0.0), points });
    }
    rule.check_budget(&points)?;
    let nodes: Vec<(f64, f64)> = (0..d)
        .map(|j| {
            let (lo, hi) = window.support(j);
            (lo, (hi - lo) / points[j] as f64)
        })
        .collect();
    let inner: usize = points[1..].iter().product();
    let row_sum = |i0: usize| -> Complex64 {
        let mut xi = [0.0; 3];
        xi[0] = nodes[0].0 + i0 as f64 * nodes[0].1;
        let mut acc = Complex64::new(0.0, 0.0);
        for flat in 0..inner {
            let mut rest = flat;
            for j in (1..d).rev() {
                xi[j] = nodes[j].0 + (rest % points[j]) as f64 * nodes[j].1;
                rest /= points[j];
            }
            let w = window.eval(&xi[..d]);
            if w != 0.0 {
                acc += Complex64::from_polar(w, phase.value(&xi[..d]));
            }
        }
        acc
    };
    let sum = ordered_sum_complex((0..points[0]).into_par_iter().map(row_sum));
    let cell: f64 = nodes.iter().map(|(_, dx)| dx).product();
    Ok(OscillatoryValue { value: sum * cell, points })
}

/// [`oscillatory_integral`] at the rule's resolution and at twice it.
pub fn oscillatory_integral_certified(phase: &PhaseSpec, window: &Window, rule: &QuadratureRule) -> Result<Certified> {
    let coarse = oscillatory_integral(phase, window, rule)?;
    let fine = oscillatory_integral(phase, window, &rule.refined())?;
    let (a, b) = (coarse.value.norm(), fine.value.norm());
    let relative_change = if b == 0.0 { (a - b).abs() } else { (a - b).abs() / b };
    Ok(Certified { value: fine.value, points: fine.points, relative_change })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocitySup {
    pub value: f64,
    pub argmax: Vec<f64>,
    /// The maximizer touched the edge of the velocity box.
    pub on_boundary: bool,
}

/// Smallest `2^a 3^b 5^c >= n`.
fn smooth_length(n: usize) -> usize {
    let mut best = n.next_power_of_two();
    let mut p5 = 1;
    while p5 < best {
        let mut p35 = p5;
        while p35 < best {
            let mut m = p35;
            while m < n {
                m *= 2;
            }
            best = best.min(m);
            p35 *= 3;
        }
        p5 *= 5;
    }
    best
}

/// Contracts the last axis of a row-major `(rows, n)` array against
/// `kernel (q, n)`, producing `(q, rows)`.
fn contract_last(data: &[Complex64], n: usize, kernel: &[Vec<Complex64>]) -> Vec<Complex64> {
    let rows = data.len() / n;
    kernel
        .par_iter()
        .flat_map_iter(|k| {
            (0..rows).map(move |r| data[r * n..(r + 1) * n].iter().zip(k).map(|(a, b)| a * b).sum::<Complex64>())
        })
        .collect()
}

/// `sup_{|v|_inf <= v_box} |J(v, tau)|` for a compactly supported window.
///
/// The amplitude `exp(-i tau gamma) zeta` is sampled once and zero-padded;
/// one FFT gives `J` on a uniform velocity grid with at least `v_grid_min`
/// points across the box, then an 11^d grid at a fifth of the spacing is
/// summed directly around the maximizer.
pub fn sup_over_velocities(
    gamma: &RescaledSymbol,
    window: &Window,
    tau: f64,
    v_box: f64,
    v_grid_min: usize,
    rule: &QuadratureRule,
) -> Result<VelocitySup> {
    let d = gamma.dim;
    window.validate(d)?;
    if !(v_box.is_finite() && v_box > 0.0) || !tau.is_finite() {
        return Err(Error::InvalidParameter(format!("need v_box > 0 and finite tau, got {v_box}, {tau}")));
    }
    if window.is_periodic() {
        return Err(Error::Unsupported("velocity sup needs a compactly supported window".into()));
    }
    let zero_v = vec![0.0; d];
    if matches!(window, Window::Zero) {
        return Ok(VelocitySup { value: 0.0, argmax: zero_v, on_boundary: false });
    }
    if tau == 0.0 {
        let phase = PhaseSpec::new(*gamma, zero_v.clone(), 0.0)?;
        let value = oscillatory_integral(&phase, window, rule)?.value.norm();
        return Ok(VelocitySup { value, argmax: zero_v, on_boundary: false });
    }
    let tau_abs = tau.abs();

    // Sampling rate leaving the shifted spectrum clear of its aliases.
    let rate = 1.5 * (tau_abs * (v_box + gamma.axis_speed_bound()) + window.bandwidth());
    let width = (0..d).map(|j| window.support(j)).map(|(lo, hi)| hi - lo).fold(0.0, f64::max);
    let n = ((width * rate / (2.0 * PI)).ceil() as usize).max(rule.min_points / 4).max(8);
    let dx = width / n as f64;
    let lows: Vec<f64> = (0..d).map(|j| window.support(j).0).collect();
    let pad_for_grid = (v_grid_min as f64 * 2.0 * PI / (2.0 * v_box * tau_abs * dx)).ceil() as usize;
    let mut m = smooth_length((2 * n).max(pad_for_grid));
    if m % 2 == 1 {
        m += 1;
    }
    rule.check_budget(&vec![m; d])?;

    let total = n.pow(d as u32);
    let node = |flat: usize| -> [f64; 3] {
        let mut xi = [0.0; 3];
        let mut rest = flat;
        for j in (0..d).rev() {
            xi[j] = lows[j] + (rest % n) as f64 * dx;
            rest /= n;
        }
        xi
    };
    let samples: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let xi = node(flat);
            let w = window.eval(&xi[..d]);
            if w == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(w, -tau * gamma.eval(&xi[..d]))
            }
        })
        .collect();

    let pad = GridSpec::new(d, 1.0, m)?;
    let mut padded = vec![Complex64::new(0.0, 0.0); pad.len()];
    for (flat, &s) in samples.iter().enumerate() {
        let mut idx = [0usize; 3];
        let mut rest = flat;
        for j in (0..d).rev() {
            idx[j] = rest % n;
            rest /= n;
        }
        padded[pad.flat_index(&idx[..d])] = s;
    }
    // Sum_k g_k exp(+2 pi i j.k / M) is J at tau v = 2 pi j / (dx M).
    if tau > 0.0 {
        fft::inverse(&mut padded, &pad);
    } else {
        fft::forward(&mut padded, &pad);
    }
    let dv = 2.0 * PI / (tau_abs * dx * m as f64);
    let cell = dx.powi(d as i32);
    let (best_flat, best) = padded
        .par_iter()
        .enumerate()
        .filter(|(flat, _)| {
            let idx = pad.multi_index(*flat);
            (0..d).all(|j| (pad.wrapped(idx[j]) as f64 * dv).abs() <= v_box)
        })
        .map(|(flat, z)| (flat, z.norm()))
        .reduce(
            || (usize::MAX, -1.0),
            |a, b| {
                if b.1 > a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        );
    let idx = pad.multi_index(best_flat);
    let centre: Vec<f64> = (0..d).map(|j| pad.wrapped(idx[j]) as f64 * dv).collect();
    let on_boundary = centre.iter().any(|v| v.abs() + dv > v_box);

    // Local refinement by separable direct sums.
    let offsets: Vec<f64> = (-5..=5).map(|k| k as f64 * dv / 5.0).collect();
    let axis_velocities: Vec<Vec<f64>> = centre.iter().map(|c| offsets.iter().map(|o| c + o).collect()).collect();
    let mut data = samples;
    for j in (0..d).rev() {
        let kernel: Vec<Vec<Complex64>> = axis_velocities[j]
            .iter()
            .map(|&v| (0..n).map(|k| Complex64::from_polar(1.0, tau * v * (lows[j] + k as f64 * dx))).collect())
            .collect();
        data = contract_last(&data, n, &kernel);
    }
    let q = offsets.len();
    let mut value = best * cell;
    let mut argmax = centre.clone();
    for (flat, z) in data.iter().enumerate() {
        let mut rest = flat;
        let mut v = vec![0.0; d];
        for j in (0..d).rev() {
            v[j] = axis_velocities[j][rest % q];
            rest /= q;
        }
        if v.iter().all(|x| x.abs() <= v_box) && z.norm() * cell > value {
            value = z.norm() * cell;
            argmax = v;
        }
    }
    Ok(VelocitySup { value, argmax, on_boundary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureRow {
    pub h: f64,
    pub tau_min: f64,
    pub tau_max: f64,
    pub fit: DecayFit,
    pub argmax_on_boundary: bool,
    pub series: Vec<(f64, f64)>,
}

/// Decay exponent of `sup_v |J(v, tau)|` for the Klein-Gordon phase
/// `gamma = sqrt(h^2 + sum 4 sin^2(xi_j / 2))` at each lattice step `h`.
pub fn conjecture_scan(
    dim: usize,
    window: &Window,
    h_list: &[f64],
    tau_grid: &[f64],
    v_box: f64,
    v_grid_min: usize,
    rule: &QuadratureRule,
) -> Result<Vec<ConjectureRow>> {
    if tau_grid.len() < MIN_FIT_POINTS {
        return Err(Error::Fit(format!("tau grid has {} points, the fit needs {MIN_FIT_POINTS}", tau_grid.len())));
    }
    if tau_grid.windows(2).any(|w| w[1] <= w[0]) || tau_grid[0] <= 0.0 {
        return Err(Error::InvalidParameter("tau grid must be positive and increasing".into()));
    }
    h_list
        .iter()
        .map(|&h| {
            let gamma = RescaledSymbol::new(h, 1, dim)?;
            let mut series = Vec::with_capacity(tau_grid.len());
            let mut boundary = false;
            for &tau in tau_grid {
                let sup = sup_over_velocities(&gamma, window, tau, v_box, v_grid_min, rule)?;
                boundary |= sup.on_boundary;
                series.push((tau, sup.value));
            }
            let fit = fit_decay_exponent(&series)?;
            Ok(ConjectureRow {
                h,
                tau_min: tau_grid[0],
                tau_max: tau_grid[tau_grid.len() - 1],
                fit,
                argmax_on_boundary: boundary,
                series,
            })
        })
        .collect()
}
