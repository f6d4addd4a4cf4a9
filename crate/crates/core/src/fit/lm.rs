//! Damped Gauss–Newton (Levenberg–Marquardt) on weighted residuals.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::FitData;

/// A model evaluated point by point with its parameter gradient.
pub(crate) trait Model {
    fn n_params(&self) -> usize;

    /// Model value at `phase`; writes `d value / d params[j]` into `grad`.
    fn eval(&self, params: &[f64], phase: f64, grad: &mut [f64]) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    pub initial_damping: f64,
    /// Stop when an accepted step lowers χ² by less than this fraction.
    pub chi2_tolerance: f64,
    /// Stop when the accepted step is shorter than this.
    pub step_tolerance: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions {
            max_iterations: 200,
            initial_damping: 1e-3,
            chi2_tolerance: 1e-10,
            step_tolerance: 1e-12,
        }
    }
}

const MAX_DAMPING: f64 = 1e20;

#[derive(Debug, Clone)]
pub(crate) struct LmOutcome {
    pub params: Vec<f64>,
    pub chi2: f64,
    pub iterations: usize,
    pub converged: bool,
    /// χ² at the start and after every accepted step.
    pub chi2_trace: Vec<f64>,
    /// Pseudo-inverse of `JᵀJ` at the final parameters.
    pub covariance: DMatrix<f64>,
}

fn linearize<M: Model>(model: &M, data: &FitData, params: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
    let m = data.len();
    let p = model.n_params();
    let mut r = DVector::zeros(m);
    let mut j = DMatrix::zeros(m, p);
    let mut grad = vec![0.0; p];
    for i in 0..m {
        let w = 1.0 / data.sigmas[i];
        let value = model.eval(params, data.phases[i], &mut grad);
        r[i] = (value - data.values[i]) * w;
        for (k, g) in grad.iter().enumerate() {
            j[(i, k)] = g * w;
        }
    }
    (r, j)
}

fn chi2_at<M: Model>(model: &M, data: &FitData, params: &[f64]) -> f64 {
    let mut grad = vec![0.0; model.n_params()];
    data.phases
        .iter()
        .zip(&data.values)
        .zip(&data.sigmas)
        .map(|((&phi, &y), &s)| ((model.eval(params, phi, &mut grad) - y) / s).powi(2))
        .sum()
}

pub(crate) fn minimize<M: Model>(model: &M, data: &FitData, init: &[f64], opts: &LmOptions) -> LmOutcome {
    let p = model.n_params();
    let mut params = init.to_vec();
    let (mut r, mut j) = linearize(model, data, &params);
    let mut chi2 = r.norm_squared();
    let mut trace = vec![chi2];
    let mut damping = opts.initial_damping;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        if chi2 == 0.0 {
            converged = true;
            break;
        }
        let jtj = j.transpose() * &j;
        let gradient = j.transpose() * &r;
        let max_diag = jtj.diagonal().max();
        let floor = if max_diag > 0.0 { 1e-12 * max_diag } else { 1.0 };

        let mut accepted = None;
        while damping <= MAX_DAMPING {
            let mut a = jtj.clone();
            for k in 0..p {
                a[(k, k)] += damping * jtj[(k, k)].max(floor);
            }
            let step = match a.cholesky() {
                Some(ch) => -ch.solve(&gradient),
                None => {
                    damping *= 10.0;
                    continue;
                }
            };
            let trial: Vec<f64> = params.iter().zip(step.iter()).map(|(x, d)| x + d).collect();
            let trial_chi2 = chi2_at(model, data, &trial);
            if trial_chi2.is_finite() && trial_chi2 < chi2 {
                damping = (damping / 10.0).max(1e-15);
                accepted = Some((trial, trial_chi2, step.norm()));
                break;
            }
            damping *= 10.0;
        }

        let Some((trial, trial_chi2, step_norm)) = accepted else {
            // no descent direction left at any damping: stationary to machine precision
            converged = true;
            break;
        };
        let relative_drop = (chi2 - trial_chi2) / chi2;
        params = trial;
        chi2 = trial_chi2;
        trace.push(chi2);
        (r, j) = linearize(model, data, &params);
        if relative_drop < opts.chi2_tolerance || step_norm < opts.step_tolerance {
            converged = true;
            break;
        }
    }

    let covariance = pseudo_inverse(&(j.transpose() * &j));
    LmOutcome {
        params,
        chi2,
        iterations,
        converged,
        chi2_trace: trace,
        covariance,
    }
}

/// Directions with eigenvalue below `1e-12 · λ_max` get zero variance.
fn pseudo_inverse(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let eig = SymmetricEigen::new(a.clone());
    let max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let mut out = DMatrix::zeros(n, n);
    if max <= 0.0 {
        return out;
    }
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > 1e-12 * max {
            let v = eig.eigenvectors.column(k);
            out += (v * v.transpose()) / lambda;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y = a·exp(b·x)
    struct Exponential;

    impl Model for Exponential {
        fn n_params(&self) -> usize {
            2
        }
        fn eval(&self, p: &[f64], x: f64, grad: &mut [f64]) -> f64 {
            let e = (p[1] * x).exp();
            grad[0] = e;
            grad[1] = p[0] * x * e;
            p[0] * e
        }
    }

    #[test]
    fn recovers_exponential() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        let data = FitData::unweighted(xs, ys).unwrap();
        let out = minimize(&Exponential, &data, &[1.0, 0.0], &LmOptions::default());
        assert!(out.converged);
        assert!((out.params[0] - 2.5).abs() < 1e-8);
        assert!((out.params[1] + 1.3).abs() < 1e-8);
        for w in out.chi2_trace.windows(2) {
            assert!(w[1] <= w[0]);
        }
    }

    #[test]
    fn reports_non_convergence() {
        let xs: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        let data = FitData::unweighted(xs, ys).unwrap();
        let opts = LmOptions {
            max_iterations: 1,
            ..LmOptions::default()
        };
        let out = minimize(&Exponential, &data, &[1.0, 0.0], &opts);
        assert!(!out.converged);
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn pseudo_inverse_zeroes_flat_directions() {
        let a = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 0.0]);
        let inv = pseudo_inverse(&a);
        assert!((inv[(0, 0)] - 0.25).abs() < 1e-15);
        assert_eq!(inv[(1, 1)], 0.0);
    }
}
