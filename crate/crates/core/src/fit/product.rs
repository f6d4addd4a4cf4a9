//! Product-of-fringes model for N-fold coincidences.

use std::f64::consts::TAU;

use super::lm::{minimize, LmOptions, Model};
use super::{
    angle_from_visibility, visibility_from_angle, visibility_slope, wrap_phase, FitData, FitResult, Parameter,
    SinusoidFit,
};
use crate::error::{Error, Result};

/// `A · Π_i (1 + sin²u_i · sin(φ + δ_i))`, parameters `[A, u_1..u_N, δ_1..δ_N]`.
struct ProductModel {
    fringes: usize,
}

impl Model for ProductModel {
    fn n_params(&self) -> usize {
        2 * self.fringes + 1
    }

    fn eval(&self, p: &[f64], phase: f64, grad: &mut [f64]) -> f64 {
        let n = self.fringes;
        let amplitude = p[0];
        let mut factors = Vec::with_capacity(n);
        let mut sines = Vec::with_capacity(n);
        let mut cosines = Vec::with_capacity(n);
        for i in 0..n {
            let (s, c) = (phase + p[1 + n + i]).sin_cos();
            factors.push(1.0 + visibility_from_angle(p[1 + i]) * s);
            sines.push(s);
            cosines.push(c);
        }
        // prefix[i] = Π_{j<i} f_j, suffix[i] = Π_{j>=i} f_j
        let mut prefix = vec![1.0; n + 1];
        let mut suffix = vec![1.0; n + 1];
        for i in 0..n {
            prefix[i + 1] = prefix[i] * factors[i];
            suffix[n - 1 - i] = suffix[n - i] * factors[n - 1 - i];
        }
        let product = prefix[n];
        grad[0] = product;
        for i in 0..n {
            let others = amplitude * prefix[i] * suffix[i + 1];
            let u = p[1 + i];
            grad[1 + i] = others * visibility_slope(u) * sines[i];
            grad[1 + n + i] = others * visibility_from_angle(u) * cosines[i];
        }
        amplitude * product
    }
}

/// Starting point for a product fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductInit {
    /// Per-fringe offsets `c_i`; held fixed, since only `A = g·Π c_i` is
    /// identifiable from coincidences.
    pub offsets: Vec<f64>,
    pub visibilities: Vec<f64>,
    pub phases: Vec<f64>,
}

impl ProductInit {
    pub fn from_singles(fits: &[SinusoidFit]) -> Self {
        ProductInit {
            offsets: fits.iter().map(|f| f.offset).collect(),
            visibilities: fits.iter().map(|f| f.visibility).collect(),
            phases: fits.iter().map(|f| f.phase).collect(),
        }
    }

    fn fringes(&self) -> usize {
        self.visibilities.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductFringe {
    pub offset: f64,
    pub visibility: f64,
    pub visibility_sigma: f64,
    /// In `[0, 2π)`.
    pub phase: f64,
    pub phase_sigma: f64,
    /// `v_i` sits within `1e-6` of 0 or 1.
    pub at_bound: bool,
}

impl ProductFringe {
    /// `c·v·sin(φ + δ) + c`.
    pub fn evaluate(&self, phase: f64) -> f64 {
        self.offset * (1.0 + self.visibility * (phase + self.phase).sin())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProductFit {
    pub fringes: Vec<ProductFringe>,
    /// `A = g · Π c_i`.
    pub amplitude: f64,
    pub amplitude_sigma: f64,
    /// Global scale `g`.
    pub scale: f64,
    pub scale_sigma: f64,
    /// `δ_{i+1} − δ_i` wrapped into `[0, 2π)`.
    pub spacings: Vec<f64>,
    pub result: FitResult,
}

impl ProductFit {
    pub fn evaluate(&self, phase: f64) -> f64 {
        self.amplitude
            * self
                .fringes
                .iter()
                .map(|f| 1.0 + f.visibility * (phase + f.phase).sin())
                .product::<f64>()
    }

    pub fn any_at_bound(&self) -> bool {
        self.fringes.iter().any(|f| f.at_bound)
    }
}

pub fn fit_product_fringes(data: &FitData, fringes: usize, init: &ProductInit) -> Result<ProductFit> {
    fit_product_fringes_with(data, fringes, init, &LmOptions::default())
}

/// Fits `g · Π_i s_i(φ)` to coincidence data, starting from `init`.
pub fn fit_product_fringes_with(
    data: &FitData,
    fringes: usize,
    init: &ProductInit,
    opts: &LmOptions,
) -> Result<ProductFit> {
    if fringes == 0 {
        return Err(Error::InvalidArgument("product fit needs at least one fringe".into()));
    }
    if init.fringes() != fringes || init.phases.len() != fringes || init.offsets.len() != fringes {
        return Err(Error::InvalidArgument(format!(
            "initial values describe {} fringes, expected {fringes}",
            init.fringes()
        )));
    }
    if init.offsets.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::InvalidArgument("fringe offsets must be positive".into()));
    }
    if data.len() < 3 * fringes + 1 {
        return Err(Error::InvalidArgument(format!(
            "product fit of {fringes} fringes needs at least {} points, got {}",
            3 * fringes + 1,
            data.len()
        )));
    }
    data.check_not_constant()?;

    let model = ProductModel { fringes };
    let mut start = vec![0.0; model.n_params()];
    for i in 0..fringes {
        start[1 + i] = angle_from_visibility(init.visibilities[i].clamp(1e-9, 1.0 - 1e-9));
        start[1 + fringes + i] = init.phases[i];
    }
    start[0] = best_amplitude(&model, data, &start);
    let out = minimize(&model, data, &start, opts);

    let std = |k: usize| out.covariance[(k, k)].max(0.0).sqrt();
    let offsets_product: f64 = init.offsets.iter().product();
    let amplitude = out.params[0];
    let mut parameters = vec![Parameter::new("amplitude", amplitude, std(0))];
    let mut fitted = Vec::with_capacity(fringes);
    for i in 0..fringes {
        let u = out.params[1 + i];
        let v = visibility_from_angle(u);
        let f = ProductFringe {
            offset: init.offsets[i],
            visibility: v,
            visibility_sigma: visibility_slope(u).abs() * std(1 + i),
            phase: wrap_phase(out.params[1 + fringes + i]),
            phase_sigma: std(1 + fringes + i),
            at_bound: !(1e-6..=1.0 - 1e-6).contains(&v),
        };
        parameters.push(Parameter::new(format!("v{}", i + 1), f.visibility, f.visibility_sigma));
        fitted.push(f);
    }
    for (i, f) in fitted.iter().enumerate() {
        parameters.push(Parameter::new(format!("delta{}", i + 1), f.phase, f.phase_sigma));
    }
    let spacings: Vec<f64> = fitted.windows(2).map(|w| wrap_phase(w[1].phase - w[0].phase)).collect();
    let dof = data.len() - model.n_params();
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
    Ok(ProductFit {
        fringes: fitted,
        amplitude,
        amplitude_sigma: std(0),
        scale: amplitude / offsets_product,
        scale_sigma: std(0) / offsets_product,
        spacings,
        result,
    })
}

/// Weighted least-squares amplitude for fixed fringe shapes.
fn best_amplitude(model: &ProductModel, data: &FitData, params: &[f64]) -> f64 {
    let mut unit = params.to_vec();
    unit[0] = 1.0;
    let mut grad = vec![0.0; model.n_params()];
    let (mut num, mut den) = (0.0, 0.0);
    for ((&phi, &y), &s) in data.phases.iter().zip(&data.values).zip(&data.sigmas) {
        let shape = model.eval(&unit, phi, &mut grad);
        let w = 1.0 / (s * s);
        num += w * y * shape;
        den += w * shape * shape;
    }
    if den > 0.0 {
        num / den
    } else {
        1.0
    }
}

/// One fitted fringe rescaled onto a singles column.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlayCurve {
    pub detector: usize,
    /// Least-squares factor between the fringe and the data.
    pub scale: f64,
    pub visibility: f64,
    pub phase: f64,
    pub values: Vec<f64>,
}

/// Rescales each fitted fringe `s_i` by one constant onto its singles column.
///
/// The factor changes only the amplitude; visibility and phase are carried
/// over from the product fit unchanged.
pub fn extract_singles_overlay(fit: &ProductFit, singles: &[FitData]) -> Result<Vec<OverlayCurve>> {
    if singles.len() != fit.fringes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} singles columns for {} fitted fringes",
            singles.len(),
            fit.fringes.len()
        )));
    }
    singles
        .iter()
        .zip(&fit.fringes)
        .enumerate()
        .map(|(detector, (data, fringe))| {
            let curve: Vec<f64> = data.phases.iter().map(|&p| fringe.evaluate(p)).collect();
            let (mut num, mut den) = (0.0, 0.0);
            for ((&y, &s), &m) in data.values.iter().zip(&data.sigmas).zip(&curve) {
                let w = 1.0 / (s * s);
                num += w * y * m;
                den += w * m * m;
            }
            if den == 0.0 {
                return Err(Error::DegenerateData(format!(
                    "fringe {} vanishes on the singles grid",
                    detector + 1
                )));
            }
            let scale = num / den;
            Ok(OverlayCurve {
                detector,
                scale,
                visibility: fringe.visibility,
                phase: fringe.phase,
                values: curve.iter().map(|m| m * scale).collect(),
            })
        })
        .collect()
}

/// Circular distance between two phases.
pub fn phase_distance(a: f64, b: f64) -> f64 {
    let d = wrap_phase(a - b);
    d.min(TAU - d)
}
