//! Weighted least-squares fits of interference fringes.
//!
//! Each fringe is modelled as `s(φ) = c·v·sin(φ + δ) + c`, with offset `c`,
//! visibility `v ∈ [0, 1]` and phase `δ`. Coincidence data are fitted by a
//! product of N such fringes. Visibilities are optimized through
//! `v = sin²(u)`, which keeps them inside `[0, 1]` without hard clipping.

mod lm;
mod product;
mod report;
mod sinusoid;

pub use lm::LmOptions;
pub use product::{
    extract_singles_overlay, fit_product_fringes, fit_product_fringes_with, phase_distance, OverlayCurve, ProductFit,
    ProductInit,
};
pub use report::{analyze_dataset, FitSummary, FIT_REPORT_VERSION, OVERLAY_CSV_VERSION};
pub use sinusoid::{fit_single_sinusoid, fit_single_sinusoid_with, Frequency, SinusoidFit};

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Phases, observations and their standard deviations.
#[derive(Debug, Clone, PartialEq)]
pub struct FitData {
    pub phases: Vec<f64>,
    pub values: Vec<f64>,
    pub sigmas: Vec<f64>,
}

impl FitData {
    pub fn new(phases: Vec<f64>, values: Vec<f64>, sigmas: Vec<f64>) -> Result<Self> {
        if phases.len() != values.len() || phases.len() != sigmas.len() {
            return Err(Error::InvalidArgument(format!(
                "fit data lengths differ: {} phases, {} values, {} sigmas",
                phases.len(),
                values.len(),
                sigmas.len()
            )));
        }
        if phases.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("fit data must be finite".into()));
        }
        if let Some(s) = sigmas.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidArgument(format!("sigma {s} must be positive")));
        }
        Ok(FitData { phases, values, sigmas })
    }

    /// Unit weights.
    pub fn unweighted(phases: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        let sigmas = vec![1.0; values.len()];
        FitData::new(phases, values, sigmas)
    }

    /// Poisson weights `σ = √count`, with a floor of one count for empty bins.
    pub fn from_counts(phases: Vec<f64>, counts: &[u64]) -> Result<Self> {
        let values: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
        let sigmas = counts.iter().map(|&c| (c as f64).sqrt().max(1.0)).collect();
        FitData::new(phases, values, sigmas)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_not_constant(&self) -> Result<()> {
        let max = self.values.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.values.iter().cloned().fold(f64::MAX, f64::min);
        let scale = max.abs().max(min.abs());
        if max - min <= 1e-12 * scale || scale == 0.0 {
            return Err(Error::DegenerateData("observations are constant".into()));
        }
        Ok(())
    }
}

/// A fitted quantity with its 1σ uncertainty.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub name: String,
    pub value: f64,
    pub sigma: f64,
}

impl Parameter {
    fn new(name: impl Into<String>, value: f64, sigma: f64) -> Self {
        Parameter {
            name: name.into(),
            value,
            sigma,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub parameters: Vec<Parameter>,
    pub chi2: f64,
    pub dof: usize,
    pub reduced_chi2: f64,
    pub converged: bool,
    pub iterations: usize,
    /// χ² at the start and after every accepted optimizer step.
    pub chi2_trace: Vec<f64>,
}

impl FitResult {
    pub fn parameter(&self, name: &str) -> Option<&Parameter> {
        self.parameters.iter().find(|p| p.name == name)
    }
}

/// Phase wrapped into `[0, 2π)`.
pub fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

pub(crate) fn visibility_from_angle(u: f64) -> f64 {
    u.sin().powi(2)
}

pub(crate) fn angle_from_visibility(v: f64) -> f64 {
    v.clamp(0.0, 1.0).sqrt().asin()
}

/// `dv/du` for `v = sin²u`.
pub(crate) fn visibility_slope(u: f64) -> f64 {
    (2.0 * u).sin()
}
