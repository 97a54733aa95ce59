use serde::{Deserialize, Serialize};

use super::{check_steps, default_dt, grid_on_box, least_squares_slope, resolve_box, InitialData};
use crate::error::{Error, Result};
use crate::evolution::{evolve, ModelParams, Probe};

/// Largest final-decade log-slope of the running sup-ratio counted as stable.
pub const STABILIZATION_SLOPE: f64 = 0.05;

/// Envelope exponent `gamma` in `||(u, v)(T)||_{H^{k+1} x H^k} <~ (1 + T)^gamma`:
/// for `k = 1` it is `1` in `d = 1`, `1.05` in `d = 2` and `2 / (3 - p)` in
/// `d = 3`; for `k >= 2` it is `1`.
pub fn envelope_exponent(dim: usize, p: f64, k: u8) -> f64 {
    match (k, dim) {
        (k, _) if k >= 2 => 1.0,
        (_, 1) => 1.0,
        (_, 2) => 1.05,
        _ => 2.0 / (3.0 - p),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrowthConfig {
    pub dim: usize,
    pub p: f64,
    pub h: f64,
    pub horizon: f64,
    /// `min(h / 4, 0.01)` when absent.
    pub dt: Option<f64>,
    pub observe_interval: f64,
    pub orders: Vec<u8>,
    /// Overrides the case-table exponent for `k = 1`.
    pub gamma: Option<f64>,
    pub data: InitialData,
    pub box_length: Option<f64>,
    pub allow_rough_second_energy: bool,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            p: 3.0,
            h: 0.1,
            horizon: 100.0,
            dt: None,
            observe_interval: 0.5,
            orders: vec![1, 2],
            gamma: None,
            data: InitialData::default(),
            box_length: None,
            allow_rough_second_energy: false,
        }
    }
}

impl GrowthConfig {
    pub fn validate(&self) -> Result<f64> {
        ModelParams::new(self.p, self.dim)?;
        self.data.functions(self.dim)?;
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(Error::InvalidParameter(format!("h must be positive, got {}", self.h)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) || !(self.observe_interval > 0.0) {
            return Err(Error::InvalidParameter("need T > 0 and a positive observation interval".into()));
        }
        if self.orders.is_empty() || self.orders.contains(&0) {
            return Err(Error::InvalidParameter("orders must be >= 1".into()));
        }
        let dt = self.dt.unwrap_or_else(|| default_dt(self.h));
        check_steps(self.horizon, dt, "horizon")?;
        check_steps(self.observe_interval, dt, "observation interval")?;
        let length = resolve_box(self.box_length, &self.data, self.horizon, self.h)?;
        grid_on_box(self.dim, self.h, length)?;
        Ok(length)
    }

    fn gamma_for(&self, k: u8) -> f64 {
        match (k, self.gamma) {
            (1, Some(g)) => g,
            _ => envelope_exponent(self.dim, self.p, k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub t: f64,
    pub k: u8,
    pub h2h1_norm: f64,
    pub hk1hk_norm: f64,
    pub energy: f64,
    pub e1: f64,
    /// NaN where the second modified energy is not defined.
    pub e2: f64,
    pub gamma: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSummary {
    pub k: u8,
    pub gamma: f64,
    pub sup_ratio: f64,
    /// Slope of `ln max_{s <= t} ratio(s)` against `ln t` on `[T / 10, T]`.
    pub stabilization_slope: f64,
    /// Slope of `ln max_{s <= t} norm(s)` against `ln(1 + t)` on `[T / 10, T]`.
    pub fitted_gamma: f64,
}

impl GrowthSummary {
    pub fn stabilized(&self) -> bool {
        self.stabilization_slope <= STABILIZATION_SLOPE
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthResult {
    pub dim: usize,
    pub p: f64,
    pub rows: Vec<GrowthRow>,
    pub summaries: Vec<GrowthSummary>,
    /// `max_t |E(t) - E(0)| / E(0)`.
    pub energy_drift: f64,
}

fn running_max(v: &[f64]) -> Vec<f64> {
    v.iter()
        .scan(f64::NEG_INFINITY, |m, x| {
            *m = m.max(*x);
            Some(*m)
        })
        .collect()
}

fn last_decade_slope(times: &[f64], x: impl Fn(f64) -> f64, values: &[f64]) -> f64 {
    let t_end = times[times.len() - 1];
    let (xs, ys): (Vec<f64>, Vec<f64>) =
        times.iter().zip(values).filter(|(t, _)| **t >= 0.1 * t_end && **t > 0.0).map(|(t, v)| (x(*t), v.ln())).unzip();
    if xs.len() < 2 {
        return f64::NAN;
    }
    least_squares_slope(&xs, &ys)
}

/// Long run recording `H^{k+1}_h x H^k_h` norms, the energy and modified
/// energies, and the envelope ratios `norm / (1 + t)^gamma`.
pub fn growth_study(cfg: &GrowthConfig) -> Result<GrowthResult> {
    let length = cfg.validate()?;
    let params = ModelParams::new(cfg.p, cfg.dim)?.with_rough_second_energy(cfg.allow_rough_second_energy);
    let grid = grid_on_box(cfg.dim, cfg.h, length)?;
    let with_e2 = cfg.p >= 2.0 || cfg.allow_rough_second_energy;
    let mut probes = vec![Probe::Energy, Probe::ModifiedEnergy(1), Probe::PairNorm(1)];
    if with_e2 {
        probes.push(Probe::ModifiedEnergy(2));
    }
    for &k in &cfg.orders {
        if k != 1 {
            probes.push(Probe::PairNorm(k));
        }
    }
    let dt = cfg.dt.unwrap_or_else(|| default_dt(cfg.h));
    let table = evolve(&cfg.data.project(&grid)?, &params, dt, cfg.horizon, cfg.observe_interval, &probes)?;
    let col = |name: &str| table.column(name).unwrap_or_else(|| vec![f64::NAN; table.times.len()]);
    let (energy, e1, e2, pair1) = (col("E"), col("E1"), col("E2"), col("pair_1"));
    let e0 = energy[0];
    let energy_drift = energy.iter().map(|e| (e - e0).abs() / e0.abs()).fold(0.0, f64::max);

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for &k in &cfg.orders {
        let norm = col(&format!("pair_{k}"));
        let gamma = cfg.gamma_for(k);
        let ratio: Vec<f64> = table.times.iter().zip(&norm).map(|(t, n)| n / (1.0 + t).powf(gamma)).collect();
        for (j, &t) in table.times.iter().enumerate() {
            rows.push(GrowthRow {
                t,
                k,
                h2h1_norm: pair1[j],
                hk1hk_norm: norm[j],
                energy: energy[j],
                e1: e1[j],
                e2: e2[j],
                gamma,
                ratio: ratio[j],
            });
        }
        summaries.push(GrowthSummary {
            k,
            gamma,
            sup_ratio: ratio.iter().fold(0.0, |a, b| a.max(*b)),
            stabilization_slope: last_decade_slope(&table.times, f64::ln, &running_max(&ratio)),
            fitted_gamma: last_decade_slope(&table.times, f64::ln_1p, &running_max(&norm)),
        });
    }
    rows.sort_by(|a, b| a.t.total_cmp(&b.t).then(a.k.cmp(&b.k)));
    Ok(GrowthResult { dim: cfg.dim, p: cfg.p, rows, summaries, energy_drift })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn case_table() {
        assert_eq!(envelope_exponent(1, 3.0, 1), 1.0);
        assert_eq!(envelope_exponent(2, 5.0, 1), 1.05);
        assert_eq!(envelope_exponent(3, 2.0, 1), 2.0);
        assert_eq!(envelope_exponent(3, 2.0, 2), 1.0);
    }

    #[test]
    fn running_maximum() {
        assert_eq!(running_max(&[1.0, 3.0, 2.0, 4.0]), vec![1.0, 3.0, 3.0, 4.0]);
        let t: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let flat = vec![2.0; 100];
        assert!(last_decade_slope(&t, f64::ln, &flat).abs() < 1e-15);
        let line: Vec<f64> = t.iter().map(|x| x * x).collect();
        assert!((last_decade_slope(&t, f64::ln, &line) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn short_run_bookkeeping() {
        let cfg = GrowthConfig { h: 0.2, horizon: 2.0, observe_interval: 0.5, ..GrowthConfig::default() };
        let out = growth_study(&cfg).unwrap();
        assert_eq!(out.rows.len(), 2 * 5);
        assert!(out.energy_drift < 1e-3);
        let first = &out.rows[0];
        assert_eq!((first.t, first.k), (0.0, 1));
        assert_eq!(first.h2h1_norm, first.hk1hk_norm);
        assert!(out.rows[1].hk1hk_norm > out.rows[1].h2h1_norm);
        assert!(out.rows.iter().all(|r| r.e2.is_finite()));
    }
}
