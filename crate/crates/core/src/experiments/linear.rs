use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{check_dyadic_chain, dyadic_ratio, fit_order, grid_on_box, resolve_box, InitialData, Profile};
use crate::error::{Error, Result};
use crate::field::LatticeField;
use crate::spectral::{apply_multiplier, kg_multiplier, MultiplierKind, SpectralField};
use crate::transfer::{hs_error, mean_project, shannon_interpolate};

/// Allowed ratio of the largest `error(t) / (1 + t)` to its median.
const ENVELOPE_FACTOR: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinearConfig {
    pub dim: usize,
    pub s: f64,
    pub data: InitialData,
    pub h_list: Vec<f64>,
    pub times: Vec<f64>,
    /// Reference grid step is `h_min / refinement`.
    pub refinement: usize,
    pub box_length: Option<f64>,
}

impl Default for LinearConfig {
    fn default() -> Self {
        Self {
            dim: 1,
            s: 1.0,
            data: InitialData::with_velocity(Profile::default()),
            h_list: vec![0.2, 0.1, 0.05, 0.025],
            times: vec![0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0],
            refinement: 8,
            box_length: None,
        }
    }
}

impl LinearConfig {
    pub fn validate(&self) -> Result<f64> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        check_dyadic_chain(&self.h_list)?;
        self.data.functions(self.dim)?;
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::InvalidParameter(format!("s must be >= 0, got {}", self.s)));
        }
        if self.times.is_empty() || self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidParameter("times must be finite and non-negative".into()));
        }
        if self.refinement == 0 || !self.refinement.is_power_of_two() {
            return Err(Error::InvalidParameter("refinement must be a power of two".into()));
        }
        let horizon = self.times.iter().fold(0.0f64, |a, b| a.max(*b));
        let length = resolve_box(self.box_length, &self.data, horizon, self.h_list[0])?;
        for &h in &self.h_list {
            grid_on_box(self.dim, h, length)?;
        }
        Ok(length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearRow {
    pub h: f64,
    pub t: f64,
    pub err_kdot: f64,
    pub err_k: f64,
}

/// `max_t e(t) / (1 + t) <= 3 median_t e(t) / (1 + t)` at one step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub h: f64,
    pub kdot_ratio: f64,
    pub k_ratio: f64,
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        self.kdot_ratio <= ENVELOPE_FACTOR && self.k_ratio <= ENVELOPE_FACTOR
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearResult {
    pub dim: usize,
    pub s: f64,
    pub box_length: f64,
    pub rows: Vec<LinearRow>,
    /// `(t, order of the Kdot error, order of the K error)`.
    pub orders: Vec<(f64, f64, f64)>,
    pub envelopes: Vec<EnvelopeCheck>,
}

impl LinearResult {
    pub fn orders_at(&self, t: f64) -> Option<(f64, f64)> {
        self.orders.iter().find(|o| (o.0 - t).abs() <= 1e-9 * t.max(1.0)).map(|o| (o.1, o.2))
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn envelope_ratio(times: &[f64], errors: &[f64]) -> f64 {
    let scaled: Vec<f64> = times.iter().zip(errors).map(|(t, e)| e / (1.0 + t)).collect();
    let top = scaled.iter().fold(0.0f64, |a, b| a.max(*b));
    let mid = median(scaled);
    if top == 0.0 {
        0.0
    } else {
        top / mid
    }
}

/// Lattice propagators `Kdot_h(t) pi_h phi_0` and `K_h(t) pi_h phi_1`, Shannon
/// interpolated, against the continuous `cos(t <xi>)` and `sin(t <xi>) / <xi>`
/// applied to samples of `phi_0`, `phi_1` on a fine grid (`<xi> = sqrt(1 + |xi|^2)`).
pub fn linear_flow_error_study(cfg: &LinearConfig) -> Result<LinearResult> {
    let length = cfg.validate()?;
    let h_fine = cfg.h_list[cfg.h_list.len() - 1] / cfg.refinement as f64;
    let fine = grid_on_box(cfg.dim, h_fine, length)?;
    let (phi0, phi1) = cfg.data.functions(cfg.dim)?;
    let (f0, f1) = (phi0.sample_on(&fine)?, phi1.sample_on(&fine)?);
    let continuous = |u: &LatticeField<f64>, t: f64, kdot: bool| {
        let weights = SpectralField::from_fn(fine, |xi| {
            let w = (1.0 + xi.iter().map(|x| x * x).sum::<f64>()).sqrt();
            Complex64::new(if kdot { (t * w).cos() } else { (t * w).sin() / w }, 0.0)
        });
        apply_multiplier(u, &weights)
    };
    let references: Vec<(LatticeField<f64>, LatticeField<f64>)> =
        cfg.times.iter().map(|&t| (continuous(&f0, t, true), continuous(&f1, t, false))).collect();

    let mut rows = Vec::new();
    for &h in &cfg.h_list {
        let r = dyadic_ratio(h, h_fine)?;
        let grid = grid_on_box(cfg.dim, h, length)?;
        let (u0, u1) = (mean_project(&phi0, &grid)?, mean_project(&phi1, &grid)?);
        for (&t, (ref_kdot, ref_k)) in cfg.times.iter().zip(&references) {
            let kdot = shannon_interpolate(&apply_multiplier(&u0, &kg_multiplier(&grid, MultiplierKind::Kdot, t)?), r)?;
            let k = shannon_interpolate(&apply_multiplier(&u1, &kg_multiplier(&grid, MultiplierKind::K, t)?), r)?;
            rows.push(LinearRow {
                h,
                t,
                err_kdot: hs_error(&kdot, ref_kdot, cfg.s)?,
                err_k: hs_error(&k, ref_k, cfg.s)?,
            });
        }
    }

    let nt = cfg.times.len();
    let orders = cfg
        .times
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let kdot: Vec<f64> = rows.iter().skip(j).step_by(nt).map(|r| r.err_kdot).collect();
            let k: Vec<f64> = rows.iter().skip(j).step_by(nt).map(|r| r.err_k).collect();
            (t, fit_order(&cfg.h_list, &kdot), fit_order(&cfg.h_list, &k))
        })
        .collect();
    let envelopes = cfg
        .h_list
        .iter()
        .zip(rows.chunks(nt))
        .map(|(&h, chunk)| EnvelopeCheck {
            h,
            kdot_ratio: envelope_ratio(&cfg.times, &chunk.iter().map(|r| r.err_kdot).collect::<Vec<_>>()),
            k_ratio: envelope_ratio(&cfg.times, &chunk.iter().map(|r| r.err_k).collect::<Vec<_>>()),
        })
        .collect();
    Ok(LinearResult { dim: cfg.dim, s: cfg.s, box_length: length, rows, orders, envelopes })
}
