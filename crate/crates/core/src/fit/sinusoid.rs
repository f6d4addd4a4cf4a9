use nalgebra::{Matrix3, Vector3};

use super::lm::{minimize, LmOptions, Model};
use super::{
    angle_from_visibility, visibility_from_angle, visibility_slope, wrap_phase, FitData, FitResult, Parameter,
};
use crate::error::{Error, Result};

/// Whether the fringe frequency is held or fitted.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frequency {
    Fixed(f64),
    /// Fitted, starting from the given value.
    Free(f64),
}

impl Frequency {
    fn value(&self) -> f64 {
        match *self {
            Frequency::Fixed(f) | Frequency::Free(f) => f,
        }
    }
}

/// `c·(1 + sin²u · sin(fφ + δ))`, parameters `[c, u, δ]` or `[c, u, δ, f]`.
struct SinusoidModel {
    fixed_frequency: Option<f64>,
}

impl Model for SinusoidModel {
    fn n_params(&self) -> usize {
        if self.fixed_frequency.is_some() {
            3
        } else {
            4
        }
    }

    fn eval(&self, p: &[f64], phase: f64, grad: &mut [f64]) -> f64 {
        let f = self.fixed_frequency.unwrap_or_else(|| p[3]);
        let (c, u, delta) = (p[0], p[1], p[2]);
        let v = visibility_from_angle(u);
        let (s, co) = (f * phase + delta).sin_cos();
        grad[0] = 1.0 + v * s;
        grad[1] = c * visibility_slope(u) * s;
        grad[2] = c * v * co;
        if self.fixed_frequency.is_none() {
            grad[3] = c * v * co * phase;
        }
        c * (1.0 + v * s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidFit {
    pub offset: f64,
    pub offset_sigma: f64,
    pub visibility: f64,
    pub visibility_sigma: f64,
    /// In `[0, 2π)`.
    pub phase: f64,
    pub phase_sigma: f64,
    pub frequency: f64,
    pub frequency_sigma: f64,
    pub result: FitResult,
}

impl SinusoidFit {
    pub fn evaluate(&self, phase: f64) -> f64 {
        self.offset * (1.0 + self.visibility * (self.frequency * phase + self.phase).sin())
    }
}

pub fn fit_single_sinusoid(data: &FitData, frequency: Frequency) -> Result<SinusoidFit> {
    fit_single_sinusoid_with(data, frequency, &LmOptions::default())
}

/// Weighted least squares for `c·v·sin(fφ + δ) + c`.
///
/// Starts from the exact linear solution for `a + b·sin(fφ) + d·cos(fφ)`.
pub fn fit_single_sinusoid_with(data: &FitData, frequency: Frequency, opts: &LmOptions) -> Result<SinusoidFit> {
    let model = SinusoidModel {
        fixed_frequency: match frequency {
            Frequency::Fixed(f) => Some(f),
            Frequency::Free(_) => None,
        },
    };
    let n_params = model.n_params();
    if data.len() < n_params + 1 {
        return Err(Error::InvalidArgument(format!(
            "sinusoid fit needs at least {} points, got {}",
            n_params + 1,
            data.len()
        )));
    }
    data.check_not_constant()?;

    let f0 = frequency.value();
    let (c0, v0, d0) = linear_start(data, f0)?;
    let mut init = vec![c0, angle_from_visibility(v0), d0];
    if n_params == 4 {
        init.push(f0);
    }
    let out = minimize(&model, data, &init, opts);

    let (c, u, delta) = (out.params[0], out.params[1], out.params[2]);
    let var = |k: usize| out.covariance[(k, k)].max(0.0).sqrt();
    let visibility = visibility_from_angle(u);
    let visibility_sigma = visibility_slope(u).abs() * var(1);
    let (freq, freq_sigma) = if n_params == 4 {
        (out.params[3], var(3))
    } else {
        (f0, 0.0)
    };
    let dof = data.len() - n_params;
    let mut parameters = vec![
        Parameter::new("offset", c, var(0)),
        Parameter::new("visibility", visibility, visibility_sigma),
        Parameter::new("phase", wrap_phase(delta), var(2)),
    ];
    if n_params == 4 {
        parameters.push(Parameter::new("frequency", freq, freq_sigma));
    }
    let result = FitResult {
        parameters,
        chi2: out.chi2,
        dof,
        reduced_chi2: out.chi2 / dof as f64,
        converged: out.converged,
        iterations: out.iterations,
        chi2_trace: out.chi2_trace,
    };
    if !result.converged {
        return Err(Error::NotConverged(Box::new(result)));
    }
    Ok(SinusoidFit {
        offset: c,
        offset_sigma: var(0),
        visibility,
        visibility_sigma,
        phase: wrap_phase(delta),
        phase_sigma: var(2),
        frequency: freq,
        frequency_sigma: freq_sigma,
        result,
    })
}

/// Weighted linear fit of `a + b·sin(fφ) + d·cos(fφ)`, mapped to `(c, v, δ)`.
fn linear_start(data: &FitData, f: f64) -> Result<(f64, f64, f64)> {
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for ((&phi, &y), &s) in data.phases.iter().zip(&data.values).zip(&data.sigmas) {
        let w = 1.0 / (s * s);
        let (sn, cs) = (f * phi).sin_cos();
        let row = Vector3::new(1.0, sn, cs);
        ata += row * row.transpose() * w;
        atb += row * (y * w);
    }
    let coef = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::DegenerateData("phases do not resolve the fringe".into()))?;
    let (a, b, d) = (coef[0], coef[1], coef[2]);
    if a <= 0.0 {
        return Err(Error::DegenerateData(format!("fitted offset {a} is not positive")));
    }
    let v = ((b * b + d * d).sqrt() / a).clamp(1e-9, 1.0 - 1e-9);
    Ok((a, v, d.atan2(b)))
}
