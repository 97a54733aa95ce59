//! Reproducible studies: continuum-limit convergence, linear-flow error,
//! growth envelopes, dispersive decay and the rescaled-phase scan.

mod convergence;
mod decay;
mod growth;
mod linear;
mod simulate;

pub use convergence::{convergence_study, ConvergenceConfig, ConvergenceResult, ConvergenceRow, ReferenceCheck};
pub use decay::{
    conjecture_study, decay_study, reference_exponent, ConjectureConfig, ConjectureResult, DecayConfig, DecayModel,
    DecayOutcome, DecayRowConfig, CONJECTURE_BAND,
};
pub use growth::{envelope_exponent, growth_study, GrowthConfig, GrowthResult, GrowthRow, GrowthSummary};
pub use linear::{linear_flow_error_study, EnvelopeCheck, LinearConfig, LinearResult, LinearRow};
pub use simulate::{simulate, EnergyRow, SimulateConfig, SimulateResult};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::State;
use crate::grid::GridSpec;
use crate::transfer::{mean_project, ContinuousFunction};

/// Amplitude below which the Gaussian tail counts as zero when sizing boxes.
const TAIL_LEVEL: f64 = 1e-14;

/// `A exp(-|x - c|^2 / (2 sigma^2))`, optionally times `cos(k.(x - c) + theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Profile {
    pub amplitude: f64,
    pub width: f64,
    /// Origin when absent.
    pub center: Option<Vec<f64>>,
    pub wavevector: Option<Vec<f64>>,
    pub phase: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Self { amplitude: 1.0, width: 1.0, center: None, wavevector: None, phase: 0.0 }
    }
}

impl Profile {
    pub fn to_function(&self, dim: usize) -> Result<ContinuousFunction> {
        let center = self.center.clone().unwrap_or_else(|| vec![0.0; dim]);
        let f = match &self.wavevector {
            None => ContinuousFunction::gaussian(self.amplitude, center, self.width),
            Some(k) => ContinuousFunction::ModulatedGaussian {
                amplitude: self.amplitude,
                center,
                width: self.width,
                wavevector: k.clone(),
                phase: self.phase,
            },
        };
        f.validate(dim)?;
        Ok(f)
    }

    /// `|c| + sigma sqrt(2 ln(|A| / 1e-14))`: beyond it the profile is below
    /// roundoff.
    pub fn support_radius(&self) -> f64 {
        let c = self.center.as_ref().map_or(0.0, |c| c.iter().map(|x| x * x).sum::<f64>().sqrt());
        let a = self.amplitude.abs();
        if a <= TAIL_LEVEL {
            c
        } else {
            c + self.width * (2.0 * (a / TAIL_LEVEL).ln()).sqrt()
        }
    }
}

/// Position and velocity data; zero velocity when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    pub position: Profile,
    pub velocity: Option<Profile>,
}

impl InitialData {
    pub fn with_velocity(velocity: Profile) -> Self {
        Self { position: Profile::default(), velocity: Some(velocity) }
    }

    pub fn zero() -> Self {
        Self { position: Profile { amplitude: 0.0, ..Profile::default() }, velocity: None }
    }

    pub fn functions(&self, dim: usize) -> Result<(ContinuousFunction, ContinuousFunction)> {
        let u = self.position.to_function(dim)?;
        let v = match &self.velocity {
            Some(p) => p.to_function(dim)?,
            None => ContinuousFunction::Zero,
        };
        Ok((u, v))
    }

    pub fn support_radius(&self) -> f64 {
        let v = self.velocity.as_ref().map_or(0.0, Profile::support_radius);
        self.position.support_radius().max(v)
    }

    /// `(pi_h phi_0, pi_h phi_1)` at `t = 0`.
    pub fn project(&self, grid: &GridSpec) -> Result<State> {
        let (u, v) = self.functions(grid.dim())?;
        State::new(mean_project(&u, grid)?, mean_project(&v, grid)?, 0.0)
    }
}

/// `2 (R + T + 5)`: the data support plus unit-speed travel with margin.
pub fn minimal_box_length(data: &InitialData, horizon: f64) -> f64 {
    2.0 * (data.support_radius() + horizon.abs() + 5.0)
}

fn is_five_smooth(mut n: usize) -> bool {
    for p in [2, 3, 5] {
        while n > 0 && n % p == 0 {
            n /= p;
        }
    }
    n == 1
}

/// Smallest even 5-smooth point count at step `h` covering `length`.
pub fn box_points(length: f64, h: f64) -> usize {
    let mut m = ((length / h) * (1.0 - 1e-12)).ceil().max(4.0) as usize;
    while m % 2 != 0 || !is_five_smooth(m) {
        m += 1;
    }
    m
}

/// Box side for a chain of steps: explicit, or `box_points` at the coarsest
/// step. Fails when shorter than [`minimal_box_length`].
pub fn resolve_box(explicit: Option<f64>, data: &InitialData, horizon: f64, h_max: f64) -> Result<f64> {
    let minimal = minimal_box_length(data, horizon);
    let length = match explicit {
        Some(l) => l,
        None => box_points(minimal, h_max) as f64 * h_max,
    };
    if !(length >= minimal) {
        return Err(Error::Wraparound { length, minimal, minimal_points: box_points(minimal, h_max), step: h_max });
    }
    Ok(length)
}

/// Grid of step `h` on a box of side `length`, which must hold a whole even
/// number of cells.
pub fn grid_on_box(dim: usize, h: f64, length: f64) -> Result<GridSpec> {
    let m = (length / h).round();
    if (m * h - length).abs() > 1e-9 * length {
        return Err(Error::InvalidGrid(format!("box side {length} is not a multiple of h = {h}")));
    }
    GridSpec::new(dim, h, m as usize)
}

/// `min(h / 4, 0.01)`.
pub fn default_dt(h: f64) -> f64 {
    (0.25 * h).min(0.01)
}

/// `span` must be a whole number of steps `dt`.
pub(crate) fn check_steps(span: f64, dt: f64, what: &str) -> Result<()> {
    let n = (span / dt).round();
    if !(n >= 1.0) || (n * dt - span).abs() > 1e-9 * span {
        return Err(Error::InvalidParameter(format!("{what} {span} is not a multiple of dt = {dt}")));
    }
    Ok(())
}

/// Strictly decreasing steps, each half the previous.
pub fn check_dyadic_chain(h_list: &[f64]) -> Result<()> {
    if h_list.is_empty() || h_list.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
        return Err(Error::InvalidParameter("h list must hold positive steps".into()));
    }
    for w in h_list.windows(2) {
        if (w[0] / w[1] - 2.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "h list must be a dyadic chain (each step half the previous), got {} -> {}",
                w[0], w[1]
            )));
        }
    }
    Ok(())
}

/// Integer ratio `coarse / fine`, required to be a power of two.
pub(crate) fn dyadic_ratio(coarse: f64, fine: f64) -> Result<usize> {
    let r = (coarse / fine).round();
    if r < 1.0 || (r * fine - coarse).abs() > 1e-9 * coarse || !(r as usize).is_power_of_two() {
        return Err(Error::InvalidParameter(format!("{coarse} / {fine} is not a power of two")));
    }
    Ok(r as usize)
}

/// Least-squares slope of `ln error` against `ln h`; NaN when fewer than two
/// points or any error is not positive.
pub fn fit_order(h: &[f64], error: &[f64]) -> f64 {
    if h.len() < 2 || h.len() != error.len() || error.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
        return f64::NAN;
    }
    least_squares_slope(
        &h.iter().map(|x| x.ln()).collect::<Vec<_>>(),
        &error.iter().map(|e| e.ln()).collect::<Vec<_>>(),
    )
}

pub(crate) fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    sxy / sxx
}

/// Any study, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum StudyConfig {
    Convergence(ConvergenceConfig),
    Linear(LinearConfig),
    Growth(GrowthConfig),
    Decay(DecayConfig),
    Conjecture(ConjectureConfig),
    Simulate(SimulateConfig),
}

impl StudyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Convergence(_) => "convergence",
            Self::Linear(_) => "linear",
            Self::Growth(_) => "growth",
            Self::Decay(_) => "decay",
            Self::Conjecture(_) => "conjecture",
            Self::Simulate(_) => "simulate",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Convergence(c) => c.validate().map(|_| ()),
            Self::Linear(c) => c.validate().map(|_| ()),
            Self::Growth(c) => c.validate().map(|_| ()),
            Self::Decay(c) => c.validate(),
            Self::Conjecture(c) => c.validate(),
            Self::Simulate(c) => c.validate().map(|_| ()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_box_sizes() {
        let data = InitialData::default();
        assert!((data.support_radius() - 8.029469634031459).abs() < 1e-12);
        let l = resolve_box(None, &data, 1.0, 0.2).unwrap();
        assert!((l - 28.8).abs() < 1e-12);
        assert!((resolve_box(None, &data, 0.5, 0.4).unwrap() - 28.8).abs() < 1e-12);
        assert_eq!(box_points(226.06, 0.1), 2304);
        assert!(matches!(resolve_box(Some(20.0), &data, 1.0, 0.2), Err(Error::Wraparound { .. })));
    }

    #[test]
    fn five_smooth() {
        assert!(is_five_smooth(2700));
        assert!(!is_five_smooth(2682));
        assert_eq!(box_points(330.3 * 0.2, 0.2), 360);
    }

    #[test]
    fn chains() {
        assert!(check_dyadic_chain(&[0.2, 0.1, 0.05, 0.025]).is_ok());
        assert!(check_dyadic_chain(&[0.2, 0.1, 0.04]).is_err());
        assert!(check_dyadic_chain(&[0.1, 0.2]).is_err());
        assert_eq!(dyadic_ratio(0.2, 0.025).unwrap(), 8);
        assert!(dyadic_ratio(0.3, 0.1).is_err());
    }

    #[test]
    fn orders() {
        let h = [0.4, 0.2, 0.1];
        let e: Vec<f64> = h.iter().map(|x| 3.0 * x * x).collect();
        assert!((fit_order(&h, &e) - 2.0).abs() < 1e-12);
        assert!(fit_order(&h, &[1.0, 0.0, 1.0]).is_nan());
        assert!(fit_order(&[0.1], &[1.0]).is_nan());
    }

    #[test]
    fn default_configs_validate() {
        assert!(StudyConfig::Convergence(ConvergenceConfig::default()).validate().is_ok());
        assert!(StudyConfig::Convergence(ConvergenceConfig::planar()).validate().is_ok());
        assert!(StudyConfig::Linear(LinearConfig::default()).validate().is_ok());
        assert!(StudyConfig::Growth(GrowthConfig::default()).validate().is_ok());
        assert!(StudyConfig::Decay(DecayConfig::default()).validate().is_ok());
        assert!(StudyConfig::Conjecture(ConjectureConfig::default()).validate().is_ok());
        assert!(StudyConfig::Simulate(SimulateConfig::default()).validate().is_ok());
        assert_eq!(StudyConfig::Decay(DecayConfig::default()).name(), "decay");
    }
}
