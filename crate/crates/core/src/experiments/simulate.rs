use serde::{Deserialize, Serialize};

use super::{check_steps, default_dt, grid_on_box, resolve_box, InitialData};
use crate::error::{Error, Result};
use crate::evolution::{evolve, ModelParams, Probe};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateConfig {
    pub dim: usize,
    pub p: f64,
    pub h: f64,
    pub horizon: f64,
    /// `min(h / 4, 0.01)` when absent.
    pub dt: Option<f64>,
    pub observe_interval: f64,
    pub data: InitialData,
    pub box_length: Option<f64>,
}

impl Default for SimulateConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            p: 3.0,
            h: 0.1,
            horizon: 10.0,
            dt: Some(0.01),
            observe_interval: 0.1,
            data: InitialData::default(),
            box_length: None,
        }
    }
}

impl SimulateConfig {
    pub fn validate(&self) -> Result<f64> {
        ModelParams::new(self.p, self.dim)?;
        self.data.functions(self.dim)?;
        if !(self.h > 0.0 && self.h.is_finite() && self.horizon > 0.0 && self.observe_interval > 0.0) {
            return Err(Error::InvalidParameter("need h, T and the observation interval positive".into()));
        }
        let dt = self.dt.unwrap_or_else(|| default_dt(self.h));
        check_steps(self.horizon, dt, "horizon")?;
        check_steps(self.observe_interval, dt, "observation interval")?;
        let length = resolve_box(self.box_length, &self.data, self.horizon, self.h)?;
        grid_on_box(self.dim, self.h, length)?;
        Ok(length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyRow {
    pub t: f64,
    pub energy: f64,
    pub e1: f64,
    /// `(E(t) - E(0)) / E(0)`.
    pub relative_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateResult {
    pub dt: f64,
    pub box_length: f64,
    pub rows: Vec<EnergyRow>,
}

impl SimulateResult {
    pub fn max_drift(&self) -> f64 {
        self.rows.iter().map(|r| r.relative_drift.abs()).fold(0.0, f64::max)
    }
}

/// One run from `(pi_h phi_0, pi_h phi_1)` with an energy trace.
pub fn simulate(cfg: &SimulateConfig) -> Result<SimulateResult> {
    let length = cfg.validate()?;
    let params = ModelParams::new(cfg.p, cfg.dim)?;
    let grid = grid_on_box(cfg.dim, cfg.h, length)?;
    let dt = cfg.dt.unwrap_or_else(|| default_dt(cfg.h));
    let probes = [Probe::Energy, Probe::ModifiedEnergy(1)];
    let table = evolve(&cfg.data.project(&grid)?, &params, dt, cfg.horizon, cfg.observe_interval, &probes)?;
    let last = table.times.len() - 1;
    let e0 = table.rows[0][0];
    let rows = (0..=last)
        .map(|j| EnergyRow {
            t: table.times[j],
            energy: table.rows[j][0],
            e1: table.rows[j][1],
            relative_drift: (table.rows[j][0] - e0) / e0,
        })
        .collect();
    Ok(SimulateResult { dt, box_length: length, rows })
}
