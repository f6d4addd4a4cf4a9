//! Coherent laser light through a multiport.
//!
//! The two bright inputs carry `(1, e^{iφ})/√2`; every other input is vacuum.
//! Detections at different outputs are independent Poisson processes, so the
//! N-fold coincidence probability is the product of the singles
//! probabilities. That product oscillates N times per cycle of φ.

mod dataset;

pub use dataset::{FringeDataset, FringePoint, FRINGE_CSV_VERSION};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::multiport::ModeUnitary;

/// Input field for relative phase `φ` between the two bright modes.
pub fn input_field(dim: usize, phase: f64) -> Result<Vec<Complex64>> {
    if dim < 2 {
        return Err(Error::InvalidArgument("classical input needs two modes".into()));
    }
    let mut e = vec![Complex64::default(); dim];
    e[0] = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    e[1] = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, phase);
    Ok(e)
}

/// Output intensity fractions `P_k = |(U e(φ))_k|^2`; they sum to one.
pub fn singles_probabilities(u: &ModeUnitary, phase: f64) -> Result<Vec<f64>> {
    Ok(u.apply(&input_field(u.dim(), phase)?)?
        .iter()
        .map(|a| a.norm_sqr())
        .collect())
}

/// Singles probabilities when the two inputs are only partially coherent.
///
/// `contrast[k]` scales the interference term at output `k`; 1 reproduces
/// [`singles_probabilities`], 0 leaves the φ-averaged intensity.
pub fn singles_probabilities_with_contrast(u: &ModeUnitary, phase: f64, contrast: &[f64]) -> Result<Vec<f64>> {
    check_contrast(contrast, u.dim())?;
    let e = Complex64::from_polar(1.0, phase);
    Ok((0..u.dim())
        .map(|k| {
            let a = u.entry(k, 0);
            let b = u.entry(k, 1);
            0.5 * (a.norm_sqr() + b.norm_sqr()) + contrast[k] * (a.conj() * b * e).re
        })
        .collect())
}

/// `Π_k P_k(φ)`.
pub fn coincidence_probability(u: &ModeUnitary, phase: f64) -> Result<f64> {
    Ok(singles_probabilities(u, phase)?.iter().product())
}

fn check_contrast(contrast: &[f64], dim: usize) -> Result<()> {
    if contrast.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "expected {dim} contrast values, got {}",
            contrast.len()
        )));
    }
    if let Some(c) = contrast.iter().find(|c| !(0.0..=1.0).contains(*c)) {
        return Err(Error::InvalidArgument(format!("contrast {c} outside [0, 1]")));
    }
    Ok(())
}

/// Count-synthesis settings.
///
/// The expected photon number per coincidence window at detector `k` is
/// `μ · N · P_k(φ)`, so `μ` is the per-detector mean averaged over detectors.
/// Each grid point integrates `windows` windows.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub phases: Vec<f64>,
    pub mean_photons_per_window: f64,
    pub windows: u64,
    pub seed: u64,
    /// Per-detector fringe contrast; `None` means fully coherent inputs.
    pub contrast: Option<Vec<f64>>,
}

/// Per-window means above this saturate the coincidence electronics.
pub const SATURATION_LIMIT: f64 = 1.0;

/// Laboratory-like defaults for an `n`-detector run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaboratoryDefaults {
    /// Coincidence window in seconds.
    pub window: f64,
    pub mean_photons_per_window: f64,
    /// Windows in a one-second bin.
    pub windows_per_second: u64,
}

impl LaboratoryDefaults {
    /// 1.5 µs windows for three and four detectors, 5 µs for six.
    ///
    /// The photon means reproduce peak singles rates of about 5×10⁴ Hz
    /// (N = 3) and 1.3×10⁵ Hz (N = 4), and about 2.7 six-fold coincidences
    /// per second for N = 6.
    pub fn for_detectors(n: usize) -> Self {
        let (window, mean) = match n {
            3 => (1.5e-6, 0.0375),
            4 => (1.5e-6, 0.0975),
            6 => (5e-6, 0.275),
            _ => (1.5e-6, 0.05),
        };
        LaboratoryDefaults {
            window,
            mean_photons_per_window: mean,
            windows_per_second: (1.0 / window).round() as u64,
        }
    }
}

impl ScanConfig {
    pub fn new(phases: Vec<f64>, mean_photons_per_window: f64, windows: u64, seed: u64) -> Self {
        ScanConfig {
            phases,
            mean_photons_per_window,
            windows,
            seed,
            contrast: None,
        }
    }

    /// One-second bins at the laboratory defaults for `n` detectors.
    pub fn laboratory(n: usize, phases: Vec<f64>, seed: u64) -> Self {
        let d = LaboratoryDefaults::for_detectors(n);
        ScanConfig::new(phases, d.mean_photons_per_window, d.windows_per_second, seed)
    }

    pub fn with_contrast(mut self, contrast: Vec<f64>) -> Self {
        self.contrast = Some(contrast);
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.phases.is_empty() {
            return Err(Error::InvalidArgument("phase grid is empty".into()));
        }
        if self.phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidArgument("phase grid contains non-finite values".into()));
        }
        if self.windows == 0 {
            return Err(Error::InvalidArgument("windows per point must be positive".into()));
        }
        if !(self.mean_photons_per_window > 0.0 && self.mean_photons_per_window.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mean photons per window must be positive, got {}",
                self.mean_photons_per_window
            )));
        }
        if let Some(c) = &self.contrast {
            check_contrast(c, dim)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimulationWarning {
    /// A detector's per-window mean exceeded [`SATURATION_LIMIT`].
    Saturation { phase: f64, detector: usize, mean: f64 },
}

impl std::fmt::Display for SimulationWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimulationWarning::Saturation {
                phase,
                detector,
                mean,
            } => write!(
                f,
                "detector {} sees {mean:.3} photons per coincidence window at phi = {phase:.4} rad (limit {SATURATION_LIMIT})",
                detector + 1
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub dataset: FringeDataset,
    pub warnings: Vec<SimulationWarning>,
}

/// Expected per-window photon numbers at each detector.
pub fn window_means(u: &ModeUnitary, cfg: &ScanConfig, phase: f64) -> Result<Vec<f64>> {
    let probs = match &cfg.contrast {
        Some(c) => singles_probabilities_with_contrast(u, phase, c)?,
        None => singles_probabilities(u, phase)?,
    };
    let scale = cfg.mean_photons_per_window * u.dim() as f64;
    Ok(probs.iter().map(|p| scale * p).collect())
}

fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> Result<u64> {
    if mean <= 0.0 {
        return Ok(0);
    }
    let dist = Poisson::new(mean).map_err(|e| Error::InvalidArgument(format!("poisson mean {mean}: {e}")))?;
    Ok(dist.sample(rng) as u64)
}

/// Poisson singles and coincidence counts at every grid point.
///
/// Point `i` draws from its own ChaCha stream (`seed`, stream `i`), so the
/// result does not depend on evaluation order.
pub fn simulate_counts(u: &ModeUnitary, cfg: &ScanConfig) -> Result<Simulation> {
    cfg.validate(u.dim())?;
    let mut points = Vec::with_capacity(cfg.phases.len());
    let mut warnings = Vec::new();
    let windows = cfg.windows as f64;
    for (i, &phase) in cfg.phases.iter().enumerate() {
        let means = window_means(u, cfg, phase)?;
        for (detector, &mean) in means.iter().enumerate() {
            if mean > SATURATION_LIMIT {
                let w = SimulationWarning::Saturation { phase, detector, mean };
                log::warn!("{w}");
                warnings.push(w);
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(i as u64);
        let singles = means
            .iter()
            .map(|m| poisson(&mut rng, windows * m))
            .collect::<Result<Vec<_>>>()?;
        let coincidences = poisson(&mut rng, windows * means.iter().product::<f64>())?;
        points.push(FringePoint {
            phase,
            singles,
            coincidences,
        });
    }
    Ok(Simulation {
        dataset: FringeDataset::new(u.dim(), points)?,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiport::{asymmetric_multiport, symmetric_multiport};
    use rand::Rng;
    use std::f64::consts::{PI, TAU};

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| TAU * i as f64 / n as f64).collect()
    }

    #[test]
    fn balanced_two_port_at_zero_phase() {
        let p = singles_probabilities(&symmetric_multiport(2).unwrap(), 0.0).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15);
        assert!(p[1].abs() < 1e-15);
    }

    #[test]
    fn singles_sum_to_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 2..=7 {
            let u = ModeUnitary::haar_random(n, &mut rng);
            let phi = rng.random_range(0.0..TAU);
            let total: f64 = singles_probabilities(&u, phi).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn asymmetric_singles_follow_cosine() {
        for &offset in &[0.0, 0.4] {
            let u = asymmetric_multiport(4, offset).unwrap();
            for phi in grid(100) {
                let p = singles_probabilities(&u, phi).unwrap();
                for (k, pk) in p.iter().enumerate() {
                    let want = (1.0 + (phi + TAU * k as f64 / 4.0 + offset).cos()) / 4.0;
                    assert!((pk - want).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn two_port_coincidence_identity() {
        let u = symmetric_multiport(2).unwrap();
        for phi in grid(50) {
            let c = coincidence_probability(&u, phi).unwrap();
            assert!((c - (1.0 - (2.0 * phi).cos()) / 8.0).abs() < 1e-15);
        }
    }

    #[test]
    fn full_contrast_matches_coherent_singles() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let u = ModeUnitary::haar_random(4, &mut rng);
        for phi in grid(20) {
            let a = singles_probabilities(&u, phi).unwrap();
            let b = singles_probabilities_with_contrast(&u, phi, &[1.0; 4]).unwrap();
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-14);
            }
        }
        let flat = singles_probabilities_with_contrast(&u, 1.0, &[0.0; 4]).unwrap();
        let flat2 = singles_probabilities_with_contrast(&u, 2.0, &[0.0; 4]).unwrap();
        assert_eq!(flat, flat2);
        assert!(singles_probabilities_with_contrast(&u, 0.0, &[1.2; 4]).is_err());
        assert!(singles_probabilities_with_contrast(&u, 0.0, &[1.0; 3]).is_err());
    }

    #[test]
    fn seeded_simulation_is_reproducible() {
        let u = asymmetric_multiport(4, 0.0).unwrap();
        let cfg = ScanConfig::laboratory(4, grid(24), 77);
        let a = simulate_counts(&u, &cfg).unwrap();
        let b = simulate_counts(&u, &cfg).unwrap();
        assert_eq!(a, b);
        let other = simulate_counts(&u, &ScanConfig { seed: 78, ..cfg }).unwrap();
        assert_ne!(a.dataset, other.dataset);
    }

    #[test]
    fn per_point_streams_are_order_insensitive() {
        let u = symmetric_multiport(3).unwrap();
        let phases = grid(10);
        let full = simulate_counts(&u, &ScanConfig::laboratory(3, phases.clone(), 5)).unwrap();
        // point 0 simulated alone uses stream 0 as well
        let first = simulate_counts(&u, &ScanConfig::laboratory(3, vec![phases[0]], 5)).unwrap();
        assert_eq!(first.dataset.points()[0], full.dataset.points()[0]);
    }

    #[test]
    fn config_validation() {
        let u = symmetric_multiport(3).unwrap();
        assert!(simulate_counts(&u, &ScanConfig::new(vec![], 0.1, 10, 0)).is_err());
        assert!(simulate_counts(&u, &ScanConfig::new(vec![0.0], 0.1, 0, 0)).is_err());
        assert!(simulate_counts(&u, &ScanConfig::new(vec![0.0], -0.1, 10, 0)).is_err());
        assert!(simulate_counts(&u, &ScanConfig::new(vec![0.0], 0.1, 10, 0).with_contrast(vec![1.0])).is_err());
    }

    #[test]
    fn saturation_is_reported() {
        let u = symmetric_multiport(3).unwrap();
        let ok = simulate_counts(&u, &ScanConfig::new(grid(12), 0.2, 10, 1)).unwrap();
        assert!(ok.warnings.is_empty());
        let hot = simulate_counts(&u, &ScanConfig::new(grid(12), 0.9, 10, 1)).unwrap();
        assert!(!hot.warnings.is_empty());
    }

    #[test]
    fn sample_means_track_expectation() {
        let u = symmetric_multiport(3).unwrap();
        let phases = vec![0.3; 400];
        let cfg = ScanConfig::new(phases, 0.05, 2000, 99);
        let sim = simulate_counts(&u, &cfg).unwrap();
        let means = window_means(&u, &cfg, 0.3).unwrap();
        for k in 0..3 {
            let expected = 2000.0 * means[k];
            let samples: Vec<f64> = sim.dataset.points().iter().map(|p| p.singles[k] as f64).collect();
            let mean = samples.iter().sum::<f64>() / samples.len() as f64;
            let stderr = (expected / samples.len() as f64).sqrt();
            assert!((mean - expected).abs() < 5.0 * stderr, "{mean} vs {expected}");
        }
    }

    #[test]
    fn relative_fluctuations_shrink_with_intensity() {
        let u = symmetric_multiport(3).unwrap();
        let spread = |windows: u64| {
            let cfg = ScanConfig::new(vec![PI / 3.0; 300], 0.05, windows, 12);
            let sim = simulate_counts(&u, &cfg).unwrap();
            let xs: Vec<f64> = sim.dataset.points().iter().map(|p| p.singles[0] as f64).collect();
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            let var = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
            var.sqrt() / m
        };
        let low = spread(100);
        let high = spread(10_000);
        // Poisson: ratio of relative spreads is sqrt(100) = 10
        assert!(low / high > 7.0 && low / high < 13.0, "{low} {high}");
    }

    #[test]
    fn six_detector_defaults_give_about_three_coincidences_per_second() {
        let u = asymmetric_multiport(6, 0.0).unwrap();
        let phases = grid(360);
        let cfg = ScanConfig::laboratory(6, phases.clone(), 0);
        let mean_rate = phases
            .iter()
            .map(|&p| window_means(&u, &cfg, p).unwrap().iter().product::<f64>())
            .sum::<f64>()
            / phases.len() as f64
            * cfg.windows as f64;
        assert!((mean_rate - 2.7).abs() < 0.05, "{mean_rate}");
    }
}
