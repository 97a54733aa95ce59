use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dispersion::{
    conjecture_scan, fit_after_first_decade, fit_decay_exponent, kernel_decay_series, log_spaced, ConjectureRow,
    DecayFit, DispersionSpec, KernelWindow, QuadratureRule, Window,
};
use crate::error::{Error, Result};
use crate::spectral::LpCutoffs;

/// Acceptance band for the `h = 1`, `d = 2` row of the rescaled-phase scan.
pub const CONJECTURE_BAND: (f64, f64) = (-0.85, -0.65);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayModel {
    Wave,
    Schrodinger,
    KleinGordon,
}

impl DecayModel {
    pub fn spec(self, h: f64, dim: usize) -> DispersionSpec {
        match self {
            Self::Wave => DispersionSpec::wave(h, dim),
            Self::Schrodinger => DispersionSpec::schrodinger(h, dim),
            Self::KleinGordon => DispersionSpec::klein_gordon(h, dim),
        }
    }
}

/// Known sup-norm decay exponent of the lattice kernel: `-d/3` for
/// Schrodinger; `-1/3`, `-3/4`, `-7/6` for Klein-Gordon in `d = 1, 2, 3`;
/// `-2/3`, `-7/6` for the wave equation in `d = 2, 3`.
pub fn reference_exponent(model: DecayModel, dim: usize) -> Option<f64> {
    match (model, dim) {
        (DecayModel::Schrodinger, 1..=3) => Some(-(dim as f64) / 3.0),
        (DecayModel::KleinGordon, 1) => Some(-1.0 / 3.0),
        (DecayModel::KleinGordon, 2) => Some(-0.75),
        (DecayModel::KleinGordon, 3) | (DecayModel::Wave, 3) => Some(-7.0 / 6.0),
        (DecayModel::Wave, 2) => Some(-2.0 / 3.0),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayRowConfig {
    pub model: DecayModel,
    pub dim: usize,
    #[serde(default = "unit")]
    pub h: f64,
    pub t_min: f64,
    pub t_max: f64,
    #[serde(default = "per_decade")]
    pub per_decade: usize,
    /// Littlewood-Paley scale `N`; the full kernel when absent.
    #[serde(default)]
    pub lp_scale: Option<f64>,
    /// Points per axis; the smallest box clear of wraparound when absent.
    #[serde(default)]
    pub points: Option<usize>,
    /// Fit only `t >= 10 t_min`.
    #[serde(default = "yes")]
    pub skip_first_decade: bool,
    pub band: (f64, f64),
}

fn unit() -> f64 {
    1.0
}

fn per_decade() -> usize {
    16
}

fn yes() -> bool {
    true
}

impl DecayRowConfig {
    fn new(model: DecayModel, dim: usize, t_max: f64, band: (f64, f64)) -> Self {
        Self {
            model,
            dim,
            h: 1.0,
            t_min: 1.0,
            t_max,
            per_decade: 16,
            lp_scale: None,
            points: None,
            skip_first_decade: true,
            band,
        }
    }

    fn name(&self) -> &'static str {
        self.model.spec(self.h, self.dim).name()
    }

    fn validate(&self) -> Result<()> {
        if reference_exponent(self.model, self.dim).is_none() {
            return Err(Error::Unsupported(format!("no reference exponent for {} in d = {}", self.name(), self.dim)));
        }
        if !(self.band.0 < self.band.1) {
            return Err(Error::InvalidParameter(format!("empty band {:?}", self.band)));
        }
        DispersionSpec::new(if self.model == DecayModel::KleinGordon { 1.0 } else { 0.0 }, 1, self.h, self.dim)?;
        log_spaced(self.t_min, self.t_max, self.per_decade)?;
        if let Some(n) = self.lp_scale {
            crate::spectral::lp::check_dyadic(n)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecayConfig {
    pub rows: Vec<DecayRowConfig>,
    /// Appends the three-dimensional rows.
    pub include_d3: bool,
}

impl Default for DecayConfig {
    fn default() -> Self {
        use DecayModel::*;
        let wave = DecayRowConfig { lp_scale: Some(0.5), ..DecayRowConfig::new(Wave, 2, 400.0, (-0.75, -0.58)) };
        Self {
            rows: vec![
                DecayRowConfig::new(Schrodinger, 1, 1000.0, (-0.40, -0.27)),
                DecayRowConfig::new(KleinGordon, 1, 1000.0, (-0.40, -0.27)),
                DecayRowConfig::new(Schrodinger, 2, 400.0, (-0.75, -0.58)),
                DecayRowConfig::new(KleinGordon, 2, 400.0, (-0.85, -0.65)),
                wave,
            ],
            include_d3: false,
        }
    }
}

impl DecayConfig {
    /// Three-dimensional rows, capped at 128 points per axis.
    pub fn d3_rows() -> Vec<DecayRowConfig> {
        use DecayModel::*;
        let short = |model, t_min, t_max| {
            let p = reference_exponent(model, 3).unwrap_or(0.0);
            DecayRowConfig {
                t_min,
                points: Some(128),
                skip_first_decade: false,
                per_decade: 32,
                ..DecayRowConfig::new(model, 3, t_max, (p - 0.15, p + 0.15))
            }
        };
        vec![
            short(Schrodinger, 2.0, 20.0),
            short(KleinGordon, 4.0, 40.0),
            DecayRowConfig { lp_scale: Some(0.5), ..short(Wave, 4.0, 40.0) },
        ]
    }

    pub fn all_rows(&self) -> Vec<DecayRowConfig> {
        let mut rows = self.rows.clone();
        if self.include_d3 {
            rows.extend(Self::d3_rows());
        }
        rows
    }

    pub fn validate(&self) -> Result<()> {
        self.all_rows().iter().try_for_each(DecayRowConfig::validate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayOutcome {
    pub model: String,
    pub dim: usize,
    pub h: f64,
    pub points: usize,
    /// Range of the fitted samples.
    pub t_min: f64,
    pub t_max: f64,
    pub fit: DecayFit,
    pub reference_exponent: f64,
    pub band: (f64, f64),
    pub series: Vec<(f64, f64)>,
}

impl DecayOutcome {
    pub fn passed(&self) -> bool {
        self.band.0 <= self.fit.slope && self.fit.slope <= self.band.1
    }
}

/// Sup-norm decay of each row's kernel, fitted on a log-log scale.
pub fn decay_study(cfg: &DecayConfig) -> Result<Vec<DecayOutcome>> {
    cfg.validate()?;
    let cutoffs = LpCutoffs;
    cfg.all_rows()
        .iter()
        .map(|row| {
            let spec = row.model.spec(row.h, row.dim);
            let times = log_spaced(row.t_min, row.t_max, row.per_decade)?;
            let points = row.points.unwrap_or_else(|| spec.minimal_points(row.t_max));
            let window = row.lp_scale.map_or(KernelWindow::Full, KernelWindow::LittlewoodPaley);
            let series = kernel_decay_series(&spec, window, &cutoffs, &times, points)?;
            let fit =
                if row.skip_first_decade { fit_after_first_decade(&series)? } else { fit_decay_exponent(&series)? };
            let fitted_from = if row.skip_first_decade { 10.0 * row.t_min } else { row.t_min };
            let t_min = series.iter().map(|s| s.0).find(|t| *t >= fitted_from * (1.0 - 1e-12)).unwrap_or(row.t_min);
            Ok(DecayOutcome {
                model: spec.name().into(),
                dim: row.dim,
                h: row.h,
                points,
                t_min,
                t_max: row.t_max,
                fit,
                reference_exponent: reference_exponent(row.model, row.dim).unwrap_or(f64::NAN),
                band: row.band,
                series,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjectureConfig {
    pub dim: usize,
    /// Bump of radius `pi` at the origin when absent.
    pub window: Option<Window>,
    pub h_list: Vec<f64>,
    pub tau_min: f64,
    pub tau_max: f64,
    pub per_decade: usize,
    pub v_box: f64,
    pub v_grid_min: usize,
    pub rule: QuadratureRule,
}

impl Default for ConjectureConfig {
    fn default() -> Self {
        Self {
            dim: 2,
            window: None,
            h_list: vec![1.0, 0.5, 0.25, 0.125],
            tau_min: 10.0,
            tau_max: 300.0,
            per_decade: 16,
            v_box: 1.2,
            v_grid_min: 41,
            rule: QuadratureRule::default(),
        }
    }
}

impl ConjectureConfig {
    pub fn window(&self) -> Window {
        self.window.clone().unwrap_or_else(|| Window::bump(vec![0.0; self.dim], PI))
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::InvalidParameter(format!("dimension must be 1, 2 or 3, got {}", self.dim)));
        }
        if self.h_list.is_empty() || self.h_list.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParameter("h list must hold positive steps".into()));
        }
        if !(self.v_box > 0.0 && self.v_box.is_finite()) {
            return Err(Error::InvalidParameter(format!("velocity box must be positive, got {}", self.v_box)));
        }
        log_spaced(self.tau_min, self.tau_max, self.per_decade)?;
        if let Window::Bump { center, .. } = self.window() {
            if center.len() != self.dim {
                return Err(Error::InvalidParameter("window center has the wrong dimension".into()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureResult {
    pub dim: usize,
    pub rows: Vec<ConjectureRow>,
}

impl ConjectureResult {
    /// Whether the `h = 1` row falls in [`CONJECTURE_BAND`], if present.
    pub fn unit_step_in_band(&self) -> Option<bool> {
        self.rows
            .iter()
            .find(|r| r.h == 1.0)
            .map(|r| CONJECTURE_BAND.0 <= r.fit.slope && r.fit.slope <= CONJECTURE_BAND.1)
    }
}

/// Decay of `sup_v |J(v, tau)|` for the rescaled Klein-Gordon phase across steps `h`.
pub fn conjecture_study(cfg: &ConjectureConfig) -> Result<ConjectureResult> {
    cfg.validate()?;
    let taus = log_spaced(cfg.tau_min, cfg.tau_max, cfg.per_decade)?;
    let rows = conjecture_scan(cfg.dim, &cfg.window(), &cfg.h_list, &taus, cfg.v_box, cfg.v_grid_min, &cfg.rule)?;
    Ok(ConjectureResult { dim: cfg.dim, rows })
}
