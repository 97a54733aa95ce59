use serde::{Deserialize, Serialize};

use super::{
    check_dyadic_chain, check_steps, default_dt, dyadic_ratio, fit_order, grid_on_box, resolve_box, InitialData,
};
use crate::error::{Error, Result};
use crate::evolution::{evolve, ModelParams, Probe, State};
use crate::field::LatticeField;
use crate::grid::GridSpec;
use crate::transfer::{hs_error, resample};

/// Allowed gap between the `h_ref` and `2 h_ref` references, as a fraction
/// of the coarsest error.
const REFERENCE_TOLERANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceConfig {
    pub label: String,
    pub dim: usize,
    pub p: f64,
    pub s: f64,
    pub data: InitialData,
    pub h_list: Vec<f64>,
    /// `h_ref = h_min / reference_ratio`, with `dt_ref = dt_min / reference_ratio`.
    pub reference_ratio: usize,
    pub horizon: f64,
    /// Time step for every run; `min(h / 4, 0.01)` per step when absent.
    pub dt: Option<f64>,
    /// Number of equal observation intervals on `[0, T]`.
    pub observations: usize,
    pub box_length: Option<f64>,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            label: "gaussian_d1".into(),
            dim: 1,
            p: 3.0,
            s: 1.0,
            data: InitialData::default(),
            h_list: vec![0.2, 0.1, 0.05, 0.025],
            reference_ratio: 4,
            horizon: 1.0,
            dt: None,
            observations: 4,
            box_length: None,
        }
    }
}

impl ConvergenceConfig {
    /// The two-dimensional desk-scale run: `h in {0.4, 0.2, 0.1}`, `T = 0.5`.
    pub fn planar() -> Self {
        Self {
            label: "gaussian_d2".into(),
            dim: 2,
            h_list: vec![0.4, 0.2, 0.1],
            horizon: 0.5,
            observations: 5,
            ..Self::default()
        }
    }

    /// Checks the configuration and returns the box side.
    pub fn validate(&self) -> Result<f64> {
        ModelParams::new(self.p, self.dim)?;
        check_dyadic_chain(&self.h_list)?;
        self.data.functions(self.dim)?;
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParameter(format!("s must be >= 0, got {}", self.s)));
        }
        if self.reference_ratio < 2 || !self.reference_ratio.is_power_of_two() {
            return Err(Error::InvalidParameter("reference ratio must be a power of two >= 2".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) || self.observations == 0 {
            return Err(Error::InvalidParameter("need T > 0 and at least one observation".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
            }
        }
        let length = resolve_box(self.box_length, &self.data, self.horizon, self.h_list[0])?;
        for &h in &self.h_list {
            grid_on_box(self.dim, h, length)?;
        }
        let interval = self.horizon / self.observations as f64;
        let dts = self.h_list.iter().map(|&h| self.dt_for(h)).chain([self.dt_ref(), 2.0 * self.dt_ref()]);
        for dt in dts {
            check_steps(interval, dt, "observation interval")?;
        }
        Ok(length)
    }

    fn dt_for(&self, h: f64) -> f64 {
        self.dt.unwrap_or_else(|| default_dt(h))
    }

    fn h_ref(&self) -> f64 {
        self.h_list[self.h_list.len() - 1] / self.reference_ratio as f64
    }

    fn dt_ref(&self) -> f64 {
        self.dt_for(self.h_list[self.h_list.len() - 1]) / self.reference_ratio as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub h: f64,
    pub t: f64,
    pub error: f64,
    pub order_at_t: f64,
}

/// `||S u_{2 h_ref} - u_{h_ref}||_{H^s}` per observation time against the
/// allowance `5%` of the coarsest error there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceCheck {
    pub h_ref: f64,
    pub dt_ref: f64,
    pub times: Vec<f64>,
    pub differences: Vec<f64>,
    pub allowed: Vec<f64>,
}

impl ReferenceCheck {
    pub fn passed(&self) -> bool {
        self.differences.iter().zip(&self.allowed).all(|(d, a)| d <= a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceResult {
    pub label: String,
    pub dim: usize,
    pub p: f64,
    pub s: f64,
    pub box_length: f64,
    pub rows: Vec<ConvergenceRow>,
    /// `(t, fitted order in h)`.
    pub orders: Vec<(f64, f64)>,
    pub reference: ReferenceCheck,
    /// Errors decrease with `h` at every time, up to twice the roundoff floor.
    pub monotone: bool,
}

impl ConvergenceResult {
    pub fn order_at(&self, t: f64) -> Option<f64> {
        self.orders.iter().find(|(s, _)| (s - t).abs() <= 1e-9 * t.abs().max(1.0)).map(|(_, o)| *o)
    }
}

/// Snapshots of `u` at the observation times, Shannon-interpolated to `target`.
fn run_on(
    cfg: &ConvergenceConfig,
    params: &ModelParams,
    grid: GridSpec,
    dt: f64,
    target: &GridSpec,
) -> Result<(Vec<f64>, Vec<LatticeField<f64>>)> {
    let initial: State = cfg.data.project(&grid)?;
    let interval = cfg.horizon / cfg.observations as f64;
    let table = evolve(&initial, params, dt, cfg.horizon, interval, &[Probe::Snapshot])?;
    let fields = table.snapshots.iter().map(|s| resample(&s.u, target)).collect::<Result<Vec<_>>>()?;
    Ok((table.times, fields))
}

/// Error `||S_h u_h(t) - u_ref(t)||_{H^s}` along the `h` chain, with data
/// `(pi_h phi_0, pi_h phi_1)` and a self-convergence reference at
/// `h_min / reference_ratio`.
pub fn convergence_study(cfg: &ConvergenceConfig) -> Result<ConvergenceResult> {
    let length = cfg.validate()?;
    let params = ModelParams::new(cfg.p, cfg.dim)?;
    let (h_ref, dt_ref) = (cfg.h_ref(), cfg.dt_ref());
    let fine = grid_on_box(cfg.dim, h_ref, length)?;
    let (times, reference) = run_on(cfg, &params, fine, dt_ref, &fine)?;

    let mut errors: Vec<Vec<f64>> = Vec::with_capacity(cfg.h_list.len());
    for &h in &cfg.h_list {
        dyadic_ratio(h, h_ref)?;
        let grid = grid_on_box(cfg.dim, h, length)?;
        let (_, fields) = run_on(cfg, &params, grid, cfg.dt_for(h), &fine)?;
        errors.push(fields.iter().zip(&reference).map(|(a, b)| hs_error(a, b, cfg.s)).collect::<Result<Vec<_>>>()?);
    }

    let (_, doubled) = run_on(cfg, &params, grid_on_box(cfg.dim, 2.0 * h_ref, length)?, 2.0 * dt_ref, &fine)?;
    let differences = doubled.iter().zip(&reference).map(|(a, b)| hs_error(a, b, cfg.s)).collect::<Result<Vec<_>>>()?;
    let allowed: Vec<f64> = errors[0].iter().map(|e| REFERENCE_TOLERANCE * e).collect();
    let check = ReferenceCheck { h_ref, dt_ref, times: times.clone(), differences, allowed };
    if !check.passed() {
        let (difference, allowed) = check
            .differences
            .iter()
            .zip(&check.allowed)
            .map(|(d, a)| (*d, *a))
            .fold((0.0, f64::INFINITY), |worst, (d, a)| if d - a > worst.0 - worst.1 { (d, a) } else { worst });
        return Err(Error::ReferenceValidation { difference, allowed });
    }

    let floor = 2.0 * f64::EPSILON * reference.iter().map(|u| u.max_abs()).fold(0.0, f64::max);
    let mut rows = Vec::new();
    let mut orders = Vec::new();
    let mut monotone = true;
    for (j, &t) in times.iter().enumerate() {
        let column: Vec<f64> = errors.iter().map(|e| e[j]).collect();
        let order = fit_order(&cfg.h_list, &column);
        monotone &= column.windows(2).all(|w| w[1] <= w[0] || w[1] <= floor);
        orders.push((t, order));
        for (&h, &error) in cfg.h_list.iter().zip(&column) {
            rows.push(ConvergenceRow { h, t, error, order_at_t: order });
        }
    }
    Ok(ConvergenceResult {
        label: cfg.label.clone(),
        dim: cfg.dim,
        p: cfg.p,
        s: cfg.s,
        box_length: length,
        rows,
        orders,
        reference: check,
        monotone,
    })
}
