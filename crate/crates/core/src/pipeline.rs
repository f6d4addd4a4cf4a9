//! Config-driven simulate, fit and sensitivity runs.
//!
//! ```toml
//! seed = 7
//!
//! [multiport]            # same schema as a standalone multiport file
//! dim = 4
//! kind = "symmetric"
//!
//! [grid]
//! start_deg = 0.0
//! stop_deg = 360.0
//! points = 90
//! endpoint = false
//!
//! [simulation]           # every key optional; defaults follow the detector count
//! mean_photons_per_window = 0.0975
//! windows = 666667
//! contrast = [0.9, 0.85, 0.95, 0.9]
//!
//! [sensitivity]          # optional
//! efficiency = 1.0
//! delta_a = 0.5
//! wavelength_nm = 632.8
//! ```

use serde::{Deserialize, Serialize};

use crate::classical::{simulate_counts, LaboratoryDefaults, ScanConfig, SimulationWarning};
use crate::error::{Error, Result};
use crate::fit::{analyze_dataset, FitSummary};
use crate::grid::PhaseGrid;
use crate::metrology::{SensitivityInput, SensitivityReport, DEFAULT_DELTA_A, HENE_WAVELENGTH_NM};
use crate::multiport::MultiportSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    #[serde(default)]
    pub start_deg: f64,
    #[serde(default = "full_turn")]
    pub stop_deg: f64,
    pub points: usize,
    #[serde(default)]
    pub endpoint: bool,
}

fn full_turn() -> f64 {
    360.0
}

impl GridSpec {
    pub fn build(&self) -> Result<PhaseGrid> {
        PhaseGrid::from_degrees(self.start_deg, self.stop_deg, self.points, self.endpoint)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationSpec {
    pub mean_photons_per_window: Option<f64>,
    pub windows: Option<u64>,
    pub contrast: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SensitivitySpec {
    #[serde(default = "unit")]
    pub efficiency: f64,
    #[serde(default = "default_delta_a")]
    pub delta_a: f64,
    #[serde(default = "default_wavelength")]
    pub wavelength_nm: f64,
}

fn unit() -> f64 {
    1.0
}

fn default_delta_a() -> f64 {
    DEFAULT_DELTA_A
}

fn default_wavelength() -> f64 {
    HENE_WAVELENGTH_NM
}

impl Default for SensitivitySpec {
    fn default() -> Self {
        SensitivitySpec {
            efficiency: 1.0,
            delta_a: DEFAULT_DELTA_A,
            wavelength_nm: HENE_WAVELENGTH_NM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub multiport: MultiportSpec,
    pub grid: GridSpec,
    #[serde(default)]
    pub simulation: SimulationSpec,
    #[serde(default)]
    pub sensitivity: SensitivitySpec,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("pipeline config always serializes")
    }

    /// A laboratory-default run on the canonical `n`-port.
    pub fn laboratory(n: usize, points: usize, seed: u64) -> Self {
        PipelineConfig {
            seed,
            multiport: MultiportSpec::canonical(n),
            grid: GridSpec {
                start_deg: 0.0,
                stop_deg: 360.0,
                points,
                endpoint: false,
            },
            simulation: SimulationSpec::default(),
            sensitivity: SensitivitySpec::default(),
        }
    }

    pub fn scan_config(&self) -> Result<ScanConfig> {
        let n = self.multiport.dim;
        let lab = LaboratoryDefaults::for_detectors(n);
        let mut cfg = ScanConfig::new(
            self.grid.build()?.phases(),
            self.simulation
                .mean_photons_per_window
                .unwrap_or(lab.mean_photons_per_window),
            self.simulation.windows.unwrap_or(lab.windows_per_second),
            self.seed,
        );
        if let Some(c) = &self.simulation.contrast {
            cfg = cfg.with_contrast(c.clone());
        }
        cfg.validate(n)?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone)]
pub struct PipelineOutput {
    pub dataset_csv: String,
    pub fit_report: String,
    pub overlay_csv: String,
    pub sensitivity_report: String,
    pub summary: FitSummary,
    pub sensitivity: SensitivityReport,
    pub warnings: Vec<SimulationWarning>,
}

/// Simulates counts, fits them, and scores the fitted coincidence visibility.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutput> {
    let u = config.multiport.build()?;
    let scan = config.scan_config()?;
    let sim = simulate_counts(&u, &scan)?;
    let summary = analyze_dataset(&sim.dataset)?;
    let n = u.dim();
    let visibility = summary.coincidence.visibility.clamp(0.0, 1.0);
    let input = SensitivityInput {
        efficiency: config.sensitivity.efficiency,
        delta_a: config.sensitivity.delta_a,
        ..SensitivityInput::new(n, visibility, 1.0)
    };
    let sensitivity = SensitivityReport::evaluate(input, config.sensitivity.wavelength_nm)?;
    Ok(PipelineOutput {
        dataset_csv: sim.dataset.to_csv(),
        fit_report: summary.report(),
        overlay_csv: summary.overlay_csv(),
        sensitivity_report: sensitivity.to_text(),
        summary,
        sensitivity,
        warnings: sim.warnings,
    })
}
