//! Time integration of `u_tt - Delta_h u + u + |u|^{p-1} u = 0`: exact
//! spectral linear flow, Strang splitting, energies and observation runs.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{ordered_sum, LatticeField};
use crate::grid::GridSpec;
use crate::lattice::{discrete_laplacian, forward_gradient, gradient_norm_sq, l2_norm_sq, signed_power};
use crate::spectral::{fft, kg_frequency, sobolev_norm};

/// Nonlinearity exponent `p` and dimension `d` of the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub p: f64,
    pub dim: usize,
    /// Permit the second modified energy for `1 < p < 2`, where the chain
    /// rule for `|u|^{p-1} u` is not Lipschitz at `u = 0`.
    #[serde(default)]
    pub allow_rough_second_energy: bool,
}

impl ModelParams {
    /// Admissible pairs: `p > 1` for `d = 1, 2`; `1 < p < 3` for `d = 3`.
    pub fn new(p: f64, dim: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::Inadmissible(format!("d must be 1, 2 or 3 (got d = {dim})")));
        }
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::Inadmissible(format!("p must be > 1 (got p = {p})")));
        }
        if dim == 3 && p >= 3.0 {
            return Err(Error::Inadmissible(format!("p must be < 3 when d = 3 (got p = {p})")));
        }
        Ok(Self { p, dim, allow_rough_second_energy: false })
    }

    pub fn with_rough_second_energy(mut self, allow: bool) -> Self {
        self.allow_rough_second_energy = allow;
        self
    }

    fn check_grid(&self, grid: &GridSpec) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::GridMismatch(format!(
                "model is {}-dimensional, state lives in {} dimensions",
                self.dim,
                grid.dim()
            )));
        }
        Ok(())
    }
}

/// Position `u`, velocity `v = u_t` and time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub u: LatticeField<f64>,
    pub v: LatticeField<f64>,
    pub t: f64,
}

impl State {
    pub fn new(u: LatticeField<f64>, v: LatticeField<f64>, t: f64) -> Result<Self> {
        u.grid().ensure_same(v.grid())?;
        if !(u.is_finite() && v.is_finite() && t.is_finite()) {
            return Err(Error::InvalidParameter("state contains non-finite values".into()));
        }
        Ok(Self { u, v, t })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        Self { u: LatticeField::zeros(grid), v: LatticeField::zeros(grid), t: 0.0 }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn max_abs(&self) -> f64 {
        self.u.max_abs().max(self.v.max_abs())
    }
}

/// Precomputed exact linear flow over one step `dt`.
///
/// `u` and `v` are packed as `z = u + i v` so a step costs one forward and
/// one inverse transform.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    grid: GridSpec,
    dt: f64,
    cos: Vec<f64>,
    sin_over_omega: Vec<f64>,
    omega_sin: Vec<f64>,
    mirror: Vec<usize>,
}

impl LinearPropagator {
    pub fn new(grid: GridSpec, dt: f64) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidParameter(format!("time step must be finite, got {dt}")));
        }
        let d = grid.dim();
        let h = grid.step();
        let m = grid.points();
        let omega: Vec<f64> =
            (0..grid.len()).into_par_iter().map(|i| kg_frequency(&grid.frequency(i)[..d], h)).collect();
        let mirror = (0..grid.len())
            .into_par_iter()
            .map(|i| {
                let idx = grid.multi_index(i);
                let mut neg = [0usize; 3];
                for j in 0..d {
                    neg[j] = (m - idx[j]) % m;
                }
                grid.flat_index(&neg[..d])
            })
            .collect();
        Ok(Self {
            grid,
            dt,
            cos: omega.iter().map(|w| (dt * w).cos()).collect(),
            sin_over_omega: omega.iter().map(|w| (dt * w).sin() / w).collect(),
            omega_sin: omega.iter().map(|w| w * (dt * w).sin()).collect(),
            mirror,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `(u, v) -> (Kdot u + K v, -(1 - Delta_h) K u + Kdot v)`.
    pub fn apply(&self, state: &State) -> Result<State> {
        state.grid().ensure_same(&self.grid)?;
        let mut z: Vec<Complex64> =
            state.u.values().par_iter().zip(state.v.values().par_iter()).map(|(&a, &b)| Complex64::new(a, b)).collect();
        fft::forward(&mut z, &self.grid);
        let i_unit = Complex64::new(0.0, 1.0);
        let mut out: Vec<Complex64> = (0..z.len())
            .into_par_iter()
            .map(|k| {
                let here = z[k];
                let there = z[self.mirror[k]].conj();
                let u_hat = 0.5 * (here + there);
                let v_hat = -0.5 * i_unit * (here - there);
                here * self.cos[k] + v_hat * self.sin_over_omega[k] - i_unit * u_hat * self.omega_sin[k]
            })
            .collect();
        fft::inverse(&mut out, &self.grid);
        let scale = 1.0 / self.grid.len() as f64;
        let (u, v): (Vec<f64>, Vec<f64>) = out.par_iter().map(|c| (c.re * scale, c.im * scale)).unzip();
        Ok(State { u: LatticeField::new(self.grid, u)?, v: LatticeField::new(self.grid, v)?, t: state.t + self.dt })
    }
}

/// Exact linear Klein-Gordon flow over `dt`.
pub fn linear_propagate(state: &State, dt: f64) -> Result<State> {
    LinearPropagator::new(*state.grid(), dt)?.apply(state)
}

/// Exact flow of `v' = -|u|^{p-1} u` with `u` frozen.
pub fn nonlinear_kick(state: &State, p: f64, dt: f64) -> State {
    let v = state.v.zip_with(&state.u, |v, u| v - dt * signed_power(u, p));
    State { u: state.u.clone(), v, t: state.t }
}

fn strang_with(state: &State, params: &ModelParams, propagator: &LinearPropagator) -> Result<State> {
    let half = 0.5 * propagator.dt();
    let kicked = nonlinear_kick(state, params.p, half);
    let moved = propagator.apply(&kicked)?;
    Ok(nonlinear_kick(&moved, params.p, half))
}

/// `kick(dt/2)`, exact linear flow over `dt`, `kick(dt/2)`.
pub fn strang_step(state: &State, params: &ModelParams, dt: f64) -> Result<State> {
    params.check_grid(state.grid())?;
    strang_with(state, params, &LinearPropagator::new(*state.grid(), dt)?)
}

fn power_integral(u: &LatticeField<f64>, q: f64) -> f64 {
    ordered_sum(u.values().par_iter().map(|x| {
        let a = x.abs();
        if q.fract() == 0.0 && q <= 32.0 {
            a.powi(q as i32)
        } else {
            a.powf(q)
        }
    })) * u.grid().cell_volume()
}

/// `1/2 ||v||^2 + 1/2 ||grad^+ u||^2 + 1/2 ||u||^2 + ||u||_{p+1}^{p+1} / (p+1)`.
pub fn energy(state: &State, params: &ModelParams) -> f64 {
    let quadratic = l2_norm_sq(&state.v) + gradient_norm_sq(&forward_gradient(&state.u)) + l2_norm_sq(&state.u);
    0.5 * quadratic + power_integral(&state.u, params.p + 1.0) / (params.p + 1.0)
}

/// `u_tt = Delta_h u - u - |u|^{p-1} u`.
pub fn second_time_derivative(state: &State, params: &ModelParams) -> LatticeField<f64> {
    let lap = discrete_laplacian(&state.u);
    let p = params.p;
    lap.zip_with(&state.u, |l, u| l - u - signed_power(u, p))
}

/// `u_ttt = Delta_h v - v - p |u|^{p-1} v`.
pub fn third_time_derivative(state: &State, params: &ModelParams) -> LatticeField<f64> {
    let lap = discrete_laplacian(&state.v);
    let p = params.p;
    let damped = lap.zip_with(&state.v, |l, v| l - v);
    let factor = state.u.map(|u| if u == 0.0 { 0.0 } else { p * u.abs().powf(p - 1.0) });
    damped.zip_with(&(&factor * &state.v), |a, b| a - b)
}

/// `sqrt(||u||^2_{H^{k+1}_h} + ||v||^2_{H^k_h})`.
pub fn pair_norm(state: &State, k: u8) -> f64 {
    let k = k as f64;
    (sobolev_norm(&state.u, k + 1.0).powi(2) + sobolev_norm(&state.v, k).powi(2)).sqrt()
}

fn half_h1_sum(top: &LatticeField<f64>, below: &LatticeField<f64>) -> f64 {
    0.5 * (l2_norm_sq(top) + gradient_norm_sq(&forward_gradient(below)) + l2_norm_sq(below))
}

/// `E_k = 1/2 (||d_t^{k+1} u||^2 + ||grad^+ d_t^k u||^2 + ||d_t^k u||^2)`
/// for `k = 1, 2`.
pub fn modified_energy(state: &State, params: &ModelParams, k: u8) -> Result<f64> {
    match k {
        1 => Ok(half_h1_sum(&second_time_derivative(state, params), &state.v)),
        2 => {
            if params.p < 2.0 && !params.allow_rough_second_energy {
                return Err(Error::Unsupported(format!(
                    "second modified energy needs p >= 2 (got {}) unless explicitly allowed",
                    params.p
                )));
            }
            let w = second_time_derivative(state, params);
            Ok(half_h1_sum(&third_time_derivative(state, params), &w))
        }
        _ => Err(Error::Unsupported(format!("modified energy of order {k}"))),
    }
}

/// Quantities recorded along a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Probe {
    Energy,
    ModifiedEnergy(u8),
    /// `||u||_{H^s_h}`.
    SobolevNorm(f64),
    /// `sqrt(||u||^2_{H^{k+1}_h} + ||v||^2_{H^k_h})`.
    PairNorm(u8),
    /// `||u_tt - Delta_h u|| = ||u + |u|^{p-1} u||`.
    CurvatureGap,
    /// Keeps a copy of the state.
    Snapshot,
}

impl Probe {
    pub fn column(&self) -> Option<String> {
        match self {
            Probe::Energy => Some("E".into()),
            Probe::ModifiedEnergy(k) => Some(format!("E{k}")),
            Probe::SobolevNorm(s) => Some(format!("hs_{s}")),
            Probe::PairNorm(k) => Some(format!("pair_{k}")),
            Probe::CurvatureGap => Some("utt_minus_lap".into()),
            Probe::Snapshot => None,
        }
    }

    fn evaluate(&self, state: &State, params: &ModelParams) -> Result<Option<f64>> {
        Ok(Some(match self {
            Probe::Energy => energy(state, params),
            Probe::ModifiedEnergy(k) => modified_energy(state, params, *k)?,
            Probe::SobolevNorm(s) => sobolev_norm(&state.u, *s),
            Probe::PairNorm(k) => pair_norm(state, *k),
            Probe::CurvatureGap => {
                let p = params.p;
                l2_norm_sq(&state.u.map(|u| u + signed_power(u, p))).sqrt()
            }
            Probe::Snapshot => return Ok(None),
        }))
    }
}

/// Probe values at the observation times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationTable {
    pub columns: Vec<String>,
    pub times: Vec<f64>,
    pub rows: Vec<Vec<f64>>,
    pub snapshots: Vec<State>,
}

impl ObservationTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn final_state(&self) -> Option<&State> {
        self.snapshots.last()
    }
}

fn step_count(span: f64, dt: f64, what: &str) -> Result<usize> {
    let ratio = span / dt.abs();
    let n = ratio.round();
    if !(ratio.is_finite() && n >= 0.0) || (ratio - n).abs() > 1e-9 * n.max(1.0) {
        return Err(Error::InvalidParameter(format!("{what} {span} is not a multiple of |dt| = {}", dt.abs())));
    }
    Ok(n as usize)
}

/// Runs Strang steps of size `dt` (negative runs backwards) for `duration`,
/// recording `probes` every `observe_interval` and at the end.
pub fn evolve(
    initial: &State,
    params: &ModelParams,
    dt: f64,
    duration: f64,
    observe_interval: f64,
    probes: &[Probe],
) -> Result<ObservationTable> {
    params.check_grid(initial.grid())?;
    if !(dt.is_finite() && dt != 0.0) || !(duration >= 0.0) {
        return Err(Error::InvalidParameter(format!("need dt != 0 and duration >= 0, got {dt}, {duration}")));
    }
    let steps = step_count(duration, dt, "duration")?;
    let every = step_count(observe_interval, dt, "observation interval")?.max(1);
    let propagator = LinearPropagator::new(*initial.grid(), dt)?;
    let mut table = ObservationTable {
        columns: probes.iter().filter_map(|p| p.column()).collect(),
        times: Vec::new(),
        rows: Vec::new(),
        snapshots: Vec::new(),
    };
    let record = |table: &mut ObservationTable, state: &State| -> Result<()> {
        let mut row = Vec::with_capacity(table.columns.len());
        for probe in probes {
            match probe.evaluate(state, params)? {
                Some(x) => row.push(x),
                None => table.snapshots.push(state.clone()),
            }
        }
        table.times.push(state.t);
        table.rows.push(row);
        Ok(())
    };
    let t0 = initial.t;
    let mut state = initial.clone();
    record(&mut table, &state)?;
    for n in 1..=steps {
        state = strang_with(&state, params, &propagator)?;
        state.t = t0 + n as f64 * dt;
        let top = state.max_abs();
        if !top.is_finite() {
            return Err(Error::Instability { t: state.t, dt, max_abs: top });
        }
        if n % every == 0 || n == steps {
            record(&mut table, &state)?;
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::lattice_symbol;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_state(grid: GridSpec, seed: u64, amp: f64) -> State {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut field =
            || LatticeField::new(grid, (0..grid.len()).map(|_| amp * rng.gen_range(-1.0..1.0)).collect()).unwrap();
        let u = field();
        let v = field();
        State::new(u, v, 0.0).unwrap()
    }

    fn gaussian_state(grid: GridSpec, amp: f64) -> State {
        let u = LatticeField::from_fn(grid, |x| amp * (-x.iter().map(|a| a * a).sum::<f64>()).exp()).unwrap();
        State::new(u, LatticeField::zeros(grid), 0.0).unwrap()
    }

    #[test]
    fn admissibility() {
        assert!(ModelParams::new(5.0, 2).is_ok());
        assert!(ModelParams::new(2.5, 3).is_ok());
        assert!(ModelParams::new(3.0, 3).is_err());
        assert!(ModelParams::new(1.0, 1).is_err());
        assert!(ModelParams::new(2.0, 4).is_err());
    }

    #[test]
    fn eigenmode_rotates() {
        let grid = GridSpec::new(2, 0.5, 16).unwrap();
        let xi = [3.0 * grid.frequency_step(), -5.0 * grid.frequency_step()];
        let u = LatticeField::from_fn(grid, |a| (xi[0] * a[0] + xi[1] * a[1]).cos()).unwrap();
        let s = State::new(u, LatticeField::zeros(grid), 0.0).unwrap();
        let dt = 0.37;
        let out = linear_propagate(&s, dt).unwrap();
        let w = (1.0 + lattice_symbol(&xi, 0.5)).sqrt();
        let expect = s.u.scale((dt * w).cos());
        assert!((&out.u - &expect).max_abs() < 1e-13);
        assert!((&out.v - &s.u.scale(-w * (dt * w).sin())).max_abs() < 1e-12);
        assert_eq!(out.t, dt);
        let same = linear_propagate(&s, 0.0).unwrap();
        assert!((&same.u - &s.u).max_abs() < 1e-15 && (&same.v - &s.v).max_abs() < 1e-15);
    }

    #[test]
    fn linear_energy_conserved() {
        let grid = GridSpec::new(1, 0.1, 128).unwrap();
        let s0 = random_state(grid, 3, 1.0);
        let quad = |s: &State| 0.5 * (l2_norm_sq(&s.v) + gradient_norm_sq(&forward_gradient(&s.u)) + l2_norm_sq(&s.u));
        let prop = LinearPropagator::new(grid, 0.01).unwrap();
        let mut s = s0.clone();
        for _ in 0..1000 {
            s = prop.apply(&s).unwrap();
        }
        assert!((quad(&s) - quad(&s0)).abs() < 1e-12 * quad(&s0));
        // Semigroup: many small steps equal one big step.
        let once = linear_propagate(&s0, 10.0).unwrap();
        assert!((&once.u - &s.u).max_abs() < 1e-11 && (&once.v - &s.v).max_abs() < 1e-11);
    }

    #[test]
    fn kicks() {
        let grid = GridSpec::new(1, 1.0, 8).unwrap();
        let zero = State::zeros(grid);
        let v0 = LatticeField::constant(grid, 0.5);
        let s = State::new(LatticeField::zeros(grid), v0.clone(), 0.0).unwrap();
        assert_eq!(nonlinear_kick(&s, 3.0, 0.2).v, v0);
        let ones = State::new(LatticeField::constant(grid, 1.0), LatticeField::zeros(grid), 0.0).unwrap();
        let k = nonlinear_kick(&ones, 3.0, 0.1);
        assert!(k.v.values().iter().all(|v| (v + 0.1).abs() < 1e-15));
        let r = random_state(grid, 9, 1.3);
        let twice = nonlinear_kick(&nonlinear_kick(&r, 2.5, 0.05), 2.5, 0.05);
        let once = nonlinear_kick(&r, 2.5, 0.1);
        assert!((&twice.v - &once.v).max_abs() < 1e-15);
        let params = ModelParams::new(3.0, 1).unwrap();
        let stepped = strang_step(&zero, &params, 0.1).unwrap();
        assert_eq!(stepped.u.max_abs() + stepped.v.max_abs(), 0.0);
    }

    #[test]
    fn energy_examples() {
        let grid = GridSpec::new(2, 0.5, 8).unwrap();
        let params = ModelParams::new(3.0, 2).unwrap();
        assert_eq!(energy(&State::zeros(grid), &params), 0.0);
        let c = 0.7;
        let s = State::new(LatticeField::constant(grid, c), LatticeField::zeros(grid), 0.0).unwrap();
        let vol = grid.box_volume();
        assert!((energy(&s, &params) - (0.5 * vol * c * c + 0.25 * vol * c.powi(4))).abs() < 1e-13);
        // Quadratic part against the spectral sum.
        let r = random_state(grid, 1, 1.0);
        let spectral = 0.5 * (sobolev_norm(&r.u, 1.0).powi(2) + l2_norm_sq(&r.v));
        let physical = energy(&r, &params) - power_integral(&r.u, 4.0) / 4.0;
        assert!((spectral - physical).abs() < 1e-12 * physical);
    }

    #[test]
    fn time_derivatives() {
        let grid = GridSpec::new(1, 1.0, 8).unwrap();
        let params = ModelParams::new(3.0, 1).unwrap();
        let ones = State::new(LatticeField::constant(grid, 1.0), LatticeField::zeros(grid), 0.0).unwrap();
        assert!(second_time_derivative(&ones, &params).values().iter().all(|v| (v + 2.0).abs() < 1e-15));
        assert_eq!(modified_energy(&State::zeros(grid), &params, 1).unwrap(), 0.0);
        assert!(modified_energy(&ones, &params, 3).is_err());
        let rough = ModelParams::new(1.5, 1).unwrap();
        assert!(modified_energy(&ones, &rough, 2).is_err());
        assert!(modified_energy(&ones, &rough.with_rough_second_energy(true), 2).is_ok());
    }

    #[test]
    fn second_derivative_along_trajectory() {
        let grid = GridSpec::new(1, 0.2, 128).unwrap();
        let params = ModelParams::new(3.0, 1).unwrap();
        let s0 = gaussian_state(grid, 1.0);
        let mid = evolve(&s0, &params, 0.001, 1.0, 1.0, &[Probe::Snapshot]).unwrap();
        let centre = mid.final_state().unwrap().clone();
        let gap = |dt: f64| {
            let fwd = evolve(&centre, &params, dt / 16.0, dt, dt, &[Probe::Snapshot]).unwrap();
            let bwd = evolve(&centre, &params, -dt / 16.0, dt, dt, &[Probe::Snapshot]).unwrap();
            let (a, b) = (&fwd.final_state().unwrap().u, &bwd.final_state().unwrap().u);
            let fd = (&(a + b) - &centre.u.scale(2.0)).scale(1.0 / (dt * dt));
            (&fd - &second_time_derivative(&centre, &params)).max_abs()
        };
        let (e1, e2) = (gap(0.02), gap(0.01));
        assert!(e1 < 1e-3, "{e1}");
        assert!(e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn tiny_amplitude_keeps_first_modified_energy() {
        let grid = GridSpec::new(1, 0.2, 128).unwrap();
        let params = ModelParams::new(3.0, 1).unwrap();
        let s0 = gaussian_state(grid, 1e-6);
        let table = evolve(&s0, &params, 0.01, 5.0, 1.0, &[Probe::ModifiedEnergy(1)]).unwrap();
        let e = table.column("E1").unwrap();
        assert!(e.iter().all(|x| (x - e[0]).abs() < 1e-8 * e[0]));
    }

    #[test]
    fn evolve_bookkeeping_and_reversal() {
        let grid = GridSpec::new(1, 0.1, 256).unwrap();
        let params = ModelParams::new(3.0, 1).unwrap();
        let s0 = gaussian_state(grid, 1.0);
        let empty = evolve(&s0, &params, 0.01, 0.0, 0.1, &[Probe::Energy]).unwrap();
        assert_eq!(empty.times, vec![0.0]);
        let fwd = evolve(&s0, &params, 0.01, 2.0, 0.5, &[Probe::Energy, Probe::Snapshot]).unwrap();
        assert_eq!(fwd.times.len(), 5);
        for (i, t) in fwd.times.iter().enumerate() {
            assert!((t - 0.5 * i as f64).abs() < 1e-12 * 200.0);
        }
        let end = fwd.final_state().unwrap();
        let back = evolve(end, &params, -0.01, 2.0, 2.0, &[Probe::Snapshot]).unwrap();
        let home = back.final_state().unwrap();
        assert!((&home.u - &s0.u).max_abs() < 1e-8 && (&home.v - &s0.v).max_abs() < 1e-8);
        assert!(home.t.abs() < 1e-12);
        assert!(evolve(&s0, &params, 0.03, 1.0, 0.1, &[]).is_err());
    }

    #[test]
    fn strang_is_second_order() {
        let grid = GridSpec::new(1, 0.2, 128).unwrap();
        let params = ModelParams::new(3.0, 1).unwrap();
        let s0 = gaussian_state(grid, 1.5);
        let run =
            |dt: f64| evolve(&s0, &params, dt, 1.0, 1.0, &[Probe::Snapshot]).unwrap().final_state().unwrap().u.clone();
        let (a, b, c) = (run(0.04), run(0.02), run(0.01));
        let order = ((&a - &b).max_abs() / (&b - &c).max_abs()).log2();
        assert!((1.8..=2.2).contains(&order), "{order}");
    }

    #[test]
    fn instability_is_reported() {
        let grid = GridSpec::new(1, 0.5, 16).unwrap();
        let params = ModelParams::new(3.0, 1).unwrap();
        let s0 = gaussian_state(grid, 50.0);
        match evolve(&s0, &params, 0.5, 50.0, 50.0, &[]) {
            Err(Error::Instability { dt, .. }) => assert_eq!(dt, 0.5),
            other => panic!("expected instability, got {other:?}"),
        }
    }

    #[test]
    fn mirror_handles_nyquist() {
        let grid = GridSpec::new(1, 1.0, 8).unwrap();
        let u = LatticeField::from_fn(grid, |a| (PI * a[0]).cos()).unwrap();
        let s = State::new(u.clone(), LatticeField::zeros(grid), 0.0).unwrap();
        let out = linear_propagate(&s, 0.3).unwrap();
        let w = 5f64.sqrt();
        assert!((&out.u - &u.scale((0.3 * w).cos())).max_abs() < 1e-14);
    }
}
