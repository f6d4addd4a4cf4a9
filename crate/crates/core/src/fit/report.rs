//! The standard fringe analysis of a dataset and its text outputs.

use std::fmt::Write;

use super::{
    extract_singles_overlay, fit_product_fringes, fit_single_sinusoid, FitData, FitResult, Frequency, OverlayCurve,
    ProductFit, ProductInit, SinusoidFit,
};
use crate::classical::FringeDataset;
use crate::error::{Error, Result};

pub const FIT_REPORT_VERSION: &str = "# revphase fit-report v1";
pub const OVERLAY_CSV_VERSION: &str = "# revphase overlay v1";

/// Singles fits, a single-sinusoid fit of the coincidences at frequency N,
/// and the product fit seeded from the singles.
#[derive(Debug, Clone, PartialEq)]
pub struct FitSummary {
    pub phases: Vec<f64>,
    pub coincidences: Vec<u64>,
    pub singles_counts: Vec<Vec<u64>>,
    pub singles: Vec<SinusoidFit>,
    pub coincidence: SinusoidFit,
    pub product: Option<ProductFit>,
    /// Partial result when the product fit ran out of iterations.
    pub product_failure: Option<FitResult>,
    pub overlay: Vec<OverlayCurve>,
}

pub fn analyze_dataset(dataset: &FringeDataset) -> Result<FitSummary> {
    let n = dataset.detectors();
    let phases = dataset.phases();
    let singles_counts: Vec<Vec<u64>> = (0..n).map(|k| dataset.singles_column(k)).collect();
    let singles_data = singles_counts
        .iter()
        .map(|c| FitData::from_counts(phases.clone(), c))
        .collect::<Result<Vec<_>>>()?;
    let singles = singles_data
        .iter()
        .map(|d| fit_single_sinusoid(d, Frequency::Fixed(1.0)))
        .collect::<Result<Vec<_>>>()?;
    let coincidences = dataset.coincidence_column();
    let coinc_data = FitData::from_counts(phases.clone(), &coincidences)?;
    let coincidence = fit_single_sinusoid(&coinc_data, Frequency::Fixed(n as f64))?;

    let (product, product_failure) = match fit_product_fringes(&coinc_data, n, &ProductInit::from_singles(&singles)) {
        Ok(fit) => (Some(fit), None),
        Err(Error::NotConverged(partial)) => (None, Some(*partial)),
        Err(e) => return Err(e),
    };
    let overlay = match &product {
        Some(fit) => extract_singles_overlay(fit, &singles_data)?,
        None => Vec::new(),
    };
    Ok(FitSummary {
        phases,
        coincidences,
        singles_counts,
        singles,
        coincidence,
        product,
        product_failure,
        overlay,
    })
}

fn line(out: &mut String, name: &str, value: f64, sigma: f64) {
    writeln!(out, "{name} {value} {sigma}").expect("write to string");
}

impl FitSummary {
    pub fn converged(&self) -> bool {
        self.product.is_some()
    }

    /// `parameter value sigma` per line; phases in degrees.
    pub fn report(&self) -> String {
        let mut out = String::new();
        out.push_str(FIT_REPORT_VERSION);
        out.push('\n');
        out.push_str("# parameter value sigma\n");
        line(&mut out, "detectors", self.singles.len() as f64, 0.0);
        line(&mut out, "points", self.phases.len() as f64, 0.0);
        for (k, s) in self.singles.iter().enumerate() {
            let p = format!("s{}", k + 1);
            line(&mut out, &format!("{p}.offset"), s.offset, s.offset_sigma);
            line(&mut out, &format!("{p}.visibility"), s.visibility, s.visibility_sigma);
            line(
                &mut out,
                &format!("{p}.phase_deg"),
                s.phase.to_degrees(),
                s.phase_sigma.to_degrees(),
            );
            line(&mut out, &format!("{p}.reduced_chi2"), s.result.reduced_chi2, 0.0);
        }
        for (k, w) in self.singles.windows(2).enumerate() {
            let d = super::wrap_phase(w[1].phase - w[0].phase).to_degrees();
            line(&mut out, &format!("singles.spacing{}_{}_deg", k + 1, k + 2), d, 0.0);
        }
        let c = &self.coincidence;
        line(&mut out, "coinc.frequency", c.frequency, 0.0);
        line(&mut out, "coinc.offset", c.offset, c.offset_sigma);
        line(&mut out, "coinc.visibility", c.visibility, c.visibility_sigma);
        line(
            &mut out,
            "coinc.phase_deg",
            c.phase.to_degrees(),
            c.phase_sigma.to_degrees(),
        );
        line(&mut out, "coinc.reduced_chi2", c.result.reduced_chi2, 0.0);
        match (&self.product, &self.product_failure) {
            (Some(p), _) => {
                line(&mut out, "product.converged", 1.0, 0.0);
                line(&mut out, "product.amplitude", p.amplitude, p.amplitude_sigma);
                line(&mut out, "product.scale", p.scale, p.scale_sigma);
                for (k, f) in p.fringes.iter().enumerate() {
                    line(
                        &mut out,
                        &format!("product.c{}", k + 1),
                        f.offset,
                        self.singles[k].offset_sigma,
                    );
                    line(
                        &mut out,
                        &format!("product.v{}", k + 1),
                        f.visibility,
                        f.visibility_sigma,
                    );
                    line(
                        &mut out,
                        &format!("product.delta{}_deg", k + 1),
                        f.phase.to_degrees(),
                        f.phase_sigma.to_degrees(),
                    );
                    line(
                        &mut out,
                        &format!("product.v{}_at_bound", k + 1),
                        f64::from(u8::from(f.at_bound)),
                        0.0,
                    );
                }
                for (k, s) in p.spacings.iter().enumerate() {
                    line(
                        &mut out,
                        &format!("product.spacing{}_{}_deg", k + 1, k + 2),
                        s.to_degrees(),
                        0.0,
                    );
                }
                line(&mut out, "product.reduced_chi2", p.result.reduced_chi2, 0.0);
                line(&mut out, "product.iterations", p.result.iterations as f64, 0.0);
            }
            (None, Some(partial)) => {
                line(&mut out, "product.converged", 0.0, 0.0);
                for param in &partial.parameters {
                    line(&mut out, &format!("product.{}", param.name), param.value, param.sigma);
                }
                line(&mut out, "product.reduced_chi2", partial.reduced_chi2, 0.0);
                line(&mut out, "product.iterations", partial.iterations as f64, 0.0);
            }
            (None, None) => line(&mut out, "product.converged", 0.0, 0.0),
        }
        out
    }

    /// Data next to fitted curves, for plotting.
    pub fn overlay_csv(&self) -> String {
        let n = self.singles.len();
        let mut out = String::new();
        out.push_str(OVERLAY_CSV_VERSION);
        out.push('\n');
        let mut header = vec!["phi_rad".to_string(), "coinc".into(), "coinc_model".into()];
        for k in 1..=n {
            header.push(format!("s{k}"));
            header.push(format!("s{k}_overlay"));
        }
        out.push_str(&header.join(","));
        out.push('\n');
        for (i, &phi) in self.phases.iter().enumerate() {
            let model = self.product.as_ref().map_or(f64::NAN, |p| p.evaluate(phi));
            let mut row = vec![phi.to_string(), self.coincidences[i].to_string(), model.to_string()];
            for k in 0..n {
                row.push(self.singles_counts[k][i].to_string());
                row.push(self.overlay.get(k).map_or(f64::NAN, |c| c.values[i]).to_string());
            }
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}
