//! Phase super-sensitivity accounting.
//!
//! A fringe `(1 − V cos Nφ)/2` has slope `½·N·V·sin Nφ`. Error propagation
//! gives `Δφ = ΔA / |slope|`, which is compared with the classical limit
//! `1/√N_tot = √(η/N)` for `N_tot = N/η` resources per trial. Closed forms
//! involving factorials are evaluated as exact rationals.

use std::f64::consts::PI;
use std::fmt::Write;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};

/// Worst-case uncertainty of a projector with outcomes in `[0, 1]`.
pub const DEFAULT_DELTA_A: f64 = 0.5;

/// He:Ne wavelength in nanometres.
pub const HENE_WAVELENGTH_NM: f64 = 632.8;

/// `|ratio − 1|` below this is reported as a boundary case.
pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

/// `d<A>/dφ = ½·N·V·sin(Nφ)`.
pub fn fringe_slope(photons: usize, visibility: f64, phase: f64) -> f64 {
    0.5 * photons as f64 * visibility * (photons as f64 * phase).sin()
}

/// `ΔA / |slope|`; a zero slope gives `f64::INFINITY`.
pub fn phase_uncertainty(delta_a: f64, slope: f64) -> f64 {
    if slope == 0.0 {
        f64::INFINITY
    } else {
        delta_a / slope.abs()
    }
}

/// `1/√N_tot`.
pub fn classical_limit(resources: f64) -> Result<f64> {
    if resources.is_nan() || resources <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "resource count must be positive, got {resources}"
        )));
    }
    Ok(1.0 / resources.sqrt())
}

/// `√(η/N)`, the classical limit with `N_tot = N/η`.
pub fn classical_limit_per_trial(photons: usize, efficiency: f64) -> Result<f64> {
    classical_limit(photons as f64 / efficiency)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityInput {
    pub photons: usize,
    pub visibility: f64,
    pub efficiency: f64,
    pub delta_a: f64,
    /// Operating phase in radians.
    pub phase: f64,
}

impl SensitivityInput {
    /// Worst-case `ΔA = ½` at the steepest point `φ = π/(2N)`.
    pub fn new(photons: usize, visibility: f64, efficiency: f64) -> Self {
        SensitivityInput {
            photons,
            visibility,
            efficiency,
            delta_a: DEFAULT_DELTA_A,
            phase: optimal_phase(photons),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.photons == 0 {
            return Err(Error::InvalidArgument("N must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.visibility) {
            return Err(Error::InvalidArgument(format!(
                "visibility {} outside [0, 1]",
                self.visibility
            )));
        }
        if !(self.efficiency > 0.0 && self.efficiency <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "efficiency {} outside (0, 1]",
                self.efficiency
            )));
        }
        if !(self.delta_a >= 0.0 && self.delta_a.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "ΔA {} must be non-negative",
                self.delta_a
            )));
        }
        if !self.phase.is_finite() {
            return Err(Error::InvalidArgument("operating phase must be finite".into()));
        }
        Ok(())
    }
}

/// Phase of steepest slope, where `sin²(Nφ) = 1`.
pub fn optimal_phase(photons: usize) -> f64 {
    PI / (2.0 * photons.max(1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Beats,
    Boundary,
    Fails,
}

impl Verdict {
    fn from_ratio(ratio: f64) -> Self {
        if (ratio - 1.0).abs() <= BOUNDARY_TOLERANCE {
            Verdict::Boundary
        } else if ratio > 1.0 {
            Verdict::Beats
        } else {
            Verdict::Fails
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Beats => "beats-classical",
            Verdict::Boundary => "boundary",
            Verdict::Fails => "classical",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalComparison {
    pub verdict: Verdict,
    /// `ηV² / (4ΔA² / (N sin²Nφ))`; above one beats the classical limit.
    pub ratio: f64,
}

impl ClassicalComparison {
    pub fn beats(&self) -> bool {
        self.verdict == Verdict::Beats
    }
}

/// Evaluates `ηV² > 4(ΔA)² / (N sin²(Nφ))`.
pub fn beats_classical(input: &SensitivityInput) -> Result<ClassicalComparison> {
    input.validate()?;
    let n = input.photons as f64;
    let sin2 = (n * input.phase).sin().powi(2);
    if sin2 < 1e-24 {
        return Err(Error::UndefinedOperatingPoint);
    }
    let lhs = input.efficiency * input.visibility.powi(2);
    let rhs = 4.0 * input.delta_a.powi(2) / (n * sin2);
    let ratio = if rhs == 0.0 { f64::INFINITY } else { lhs / rhs };
    Ok(ClassicalComparison {
        verdict: Verdict::from_ratio(ratio),
        ratio,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RequiredEfficiency {
    /// `1/(V²N)`, unclamped.
    pub value: f64,
    /// False when the requirement exceeds one.
    pub achievable: bool,
}

/// Efficiency at which `ηV²N = 1`.
pub fn required_efficiency(photons: usize, visibility: f64) -> Result<RequiredEfficiency> {
    if photons == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let v = BigRational::from_float(visibility)
        .filter(|v| *v > BigRational::from_integer(0.into()))
        .ok_or_else(|| Error::InvalidArgument(format!("visibility must be positive, got {visibility}")))?;
    let exact = required_efficiency_exact(photons, &v);
    let value = to_f64(&exact);
    Ok(RequiredEfficiency {
        value,
        achievable: exact <= BigRational::one(),
    })
}

/// `1/(V²N)` as a rational; `V` must be non-zero.
pub fn required_efficiency_exact(photons: usize, visibility: &BigRational) -> BigRational {
    (visibility * visibility * BigRational::from_integer(BigInt::from(photons))).recip()
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// `2·N!/N^N`.
pub fn preparation_efficiency_exact(photons: usize) -> BigRational {
    let n = BigInt::from(photons);
    BigRational::new(BigInt::from(2) * factorial(photons), n.pow(photons as u32))
}

pub fn preparation_efficiency(photons: usize) -> f64 {
    to_f64(&preparation_efficiency_exact(photons.max(1)))
}

/// `2·N!/N^{N−1}`, the left side of `ηV²N > 1` at `V = 1` and the best known
/// nondeterministic preparation efficiency.
pub fn nondeterministic_margin(photons: usize) -> BigRational {
    preparation_efficiency_exact(photons) * BigRational::from_integer(BigInt::from(photons))
}

/// Whether `2·N!/N^{N−1} > 1`.
pub fn nondeterministic_supersensitivity_possible(photons: usize) -> Result<bool> {
    if photons < 2 {
        return Err(Error::InvalidArgument(format!("N must be at least 2, got {photons}")));
    }
    Ok(nondeterministic_margin(photons) > BigRational::one())
}

/// `2(N!)² / (2N)!`, the visibility of N summed exposures of an N-fold
/// narrowed fringe.
pub fn multi_exposure_visibility_exact(photons: usize) -> BigRational {
    let f = factorial(photons);
    BigRational::new(BigInt::from(2) * &f * &f, factorial(2 * photons))
}

pub fn multi_exposure_visibility(photons: usize) -> f64 {
    to_f64(&multi_exposure_visibility_exact(photons))
}

/// Wavelength of a classical interferometer with the same fringe period.
pub fn equivalent_wavelength(wavelength_nm: f64, photons: usize) -> Result<f64> {
    if wavelength_nm.is_nan() || wavelength_nm <= 0.0 || photons == 0 {
        return Err(Error::InvalidArgument(format!(
            "need a positive wavelength and N >= 1, got {wavelength_nm} nm and N = {photons}"
        )));
    }
    Ok(wavelength_nm / photons as f64)
}

/// `1/√(ηN)`, the visibility at which `ηV²N = 1`.
pub fn threshold_visibility(photons: usize, efficiency: f64) -> f64 {
    1.0 / (efficiency * photons as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityReport {
    pub input: SensitivityInput,
    pub slope: f64,
    pub phase_uncertainty: f64,
    pub classical_limit: f64,
    pub comparison: ClassicalComparison,
    pub threshold_visibility: f64,
    pub required_efficiency: Option<RequiredEfficiency>,
    pub wavelength_nm: f64,
    pub equivalent_wavelength_nm: f64,
}

impl SensitivityReport {
    pub fn evaluate(input: SensitivityInput, wavelength_nm: f64) -> Result<Self> {
        input.validate()?;
        let comparison = beats_classical(&input)?;
        let slope = fringe_slope(input.photons, input.visibility, input.phase);
        let required = if input.visibility > 0.0 {
            Some(required_efficiency(input.photons, input.visibility)?)
        } else {
            None
        };
        Ok(SensitivityReport {
            input,
            slope,
            phase_uncertainty: phase_uncertainty(input.delta_a, slope),
            classical_limit: classical_limit_per_trial(input.photons, input.efficiency)?,
            comparison,
            threshold_visibility: threshold_visibility(input.photons, input.efficiency),
            required_efficiency: required,
            wavelength_nm,
            equivalent_wavelength_nm: equivalent_wavelength(wavelength_nm, input.photons)?,
        })
    }

    pub fn super_sensitive(&self) -> bool {
        self.comparison.beats()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# revphase sensitivity-report v1\n");
        let mut kv = |k: &str, v: String| writeln!(out, "{k} = {v}").expect("write to string");
        kv("photons", self.input.photons.to_string());
        kv("visibility", self.input.visibility.to_string());
        kv("efficiency", self.input.efficiency.to_string());
        kv("delta_a", self.input.delta_a.to_string());
        kv("phase_rad", self.input.phase.to_string());
        kv("slope", self.slope.to_string());
        kv("phase_uncertainty", self.phase_uncertainty.to_string());
        kv("classical_limit", self.classical_limit.to_string());
        kv("ratio", self.comparison.ratio.to_string());
        kv("verdict", self.comparison.verdict.as_str().to_string());
        kv("threshold_visibility", self.threshold_visibility.to_string());
        match &self.required_efficiency {
            Some(r) => {
                kv("required_efficiency", r.value.to_string());
                kv("required_efficiency_achievable", r.achievable.to_string());
            }
            None => kv("required_efficiency", "inf".into()),
        }
        kv("wavelength_nm", self.wavelength_nm.to_string());
        kv("equivalent_wavelength_nm", self.equivalent_wavelength_nm.to_string());
        out
    }

    pub fn csv_header() -> &'static str {
        "photons,visibility,efficiency,delta_a,phase_rad,phase_uncertainty,classical_limit,ratio,verdict,threshold_visibility,required_efficiency,equivalent_wavelength_nm"
    }

    pub fn to_csv_row(&self) -> String {
        let req = self
            .required_efficiency
            .map_or("inf".to_string(), |r| r.value.to_string());
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.input.photons,
            self.input.visibility,
            self.input.efficiency,
            self.input.delta_a,
            self.input.phase,
            self.phase_uncertainty,
            self.classical_limit,
            self.comparison.ratio,
            self.comparison.verdict.as_str(),
            self.threshold_visibility,
            req,
            self.equivalent_wavelength_nm
        )
    }
}
