use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use revphase_core::classical::{simulate_counts, singles_probabilities, LaboratoryDefaults, ScanConfig};
use revphase_core::fit::analyze_dataset;
use revphase_core::metrology::{SensitivityInput, SensitivityReport};
use revphase_core::multiport::{canonical_multiport, unitarity_residual, MultiportSpec};
use revphase_core::pipeline::{run_pipeline, PipelineConfig};
use revphase_core::quantum::{forward_probability, reversed_probability, MeasurementScheme};
use revphase_core::{Error, FringeDataset, ModeUnitary, PhaseGrid};

use crate::io::{emit, read_to_string, write_atomic};
use crate::{plot, Command, DeviceArgs, DeviceKind, GridArgs, Result, ScanMode};

pub const UNITARY_CSV_VERSION: &str = "# revphase unitary v1";
pub const SCAN_CSV_VERSION: &str = "# revphase scan v1";

pub fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Multiport { device, output } => {
            let u = build_device(&device)?;
            emit(output.as_deref(), &unitary_csv(&u))
        }
        Command::Scan {
            mode,
            device,
            grid,
            jobs,
            output,
        } => {
            let u = build_device(&device)?;
            let csv = scan(mode, &u, &build_grid(&grid)?.phases(), jobs)?;
            emit(output.as_deref(), &csv)
        }
        Command::Simulate {
            device,
            grid,
            seed,
            mean_photons,
            windows,
            contrast,
            output,
        } => {
            let u = build_device(&device)?;
            let lab = LaboratoryDefaults::for_detectors(u.dim());
            let mut cfg = ScanConfig::new(
                build_grid(&grid)?.phases(),
                mean_photons.unwrap_or(lab.mean_photons_per_window),
                windows.unwrap_or(lab.windows_per_second),
                seed,
            );
            if let Some(c) = contrast {
                cfg = cfg.with_contrast(c);
            }
            let sim = simulate_counts(&u, &cfg)?;
            emit(output.as_deref(), &sim.dataset.to_csv())
        }
        Command::Fit {
            dataset,
            detectors,
            report,
            overlay,
        } => fit(&dataset, detectors, report.as_deref(), overlay.as_deref()),
        Command::Sensitivity {
            photons,
            visibility,
            efficiency,
            delta_a,
            phase_deg,
            wavelength_nm,
            csv,
            output,
        } => {
            let mut input = SensitivityInput::new(photons, visibility, efficiency);
            input.delta_a = delta_a;
            if let Some(p) = phase_deg {
                input.phase = p.to_radians();
            }
            let report = SensitivityReport::evaluate(input, wavelength_nm)?;
            let text = if csv {
                format!("{}\n{}\n", SensitivityReport::csv_header(), report.to_csv_row())
            } else {
                report.to_text()
            };
            emit(output.as_deref(), &text)
        }
        Command::Plot { dataset, output } => {
            let data = load_dataset(&dataset)?;
            if data.is_empty() {
                return Err(Error::Schema(format!("{} has no data rows", dataset.display())));
            }
            let summary = analyze_dataset(&data).ok();
            write_atomic(&output, &plot::render(&data, summary.as_ref()))
        }
        Command::Run { config, out_dir } => run(&config, &out_dir),
    }
}

fn build_device(args: &DeviceArgs) -> Result<ModeUnitary> {
    let u = match &args.multiport {
        Some(path) => MultiportSpec::from_toml(&read_to_string(path)?)?.build()?,
        None => {
            let dim = args
                .dim
                .ok_or_else(|| Error::InvalidArgument("--dim is required without --multiport".into()))?;
            match args.kind {
                DeviceKind::Symmetric => MultiportSpec::symmetric(dim).build()?,
                DeviceKind::Asymmetric => MultiportSpec::asymmetric(dim, args.offset_deg).build()?,
                DeviceKind::Canonical => canonical_multiport(dim)?,
            }
        }
    };
    if let Some(dim) = args.dim {
        if dim != u.dim() {
            return Err(Error::ModeMismatch {
                expected: dim,
                got: u.dim(),
            });
        }
    }
    Ok(u)
}

fn build_grid(args: &GridArgs) -> Result<PhaseGrid> {
    PhaseGrid::from_degrees(args.start_deg, args.stop_deg, args.points, args.endpoint)
}

pub fn unitary_csv(u: &ModeUnitary) -> String {
    format!(
        "{UNITARY_CSV_VERSION}\n{}# unitarity_residual {:e}\n",
        u.to_csv(),
        unitarity_residual(u.matrix())
    )
}

fn scan(mode: ScanMode, u: &ModeUnitary, phases: &[f64], jobs: usize) -> Result<String> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let n = u.dim();
    let mut out = String::from(SCAN_CSV_VERSION);
    out.push('\n');
    match mode {
        ScanMode::Classical => {
            let rows: Vec<Vec<f64>> = pool.install(|| {
                phases
                    .par_iter()
                    .map(|&p| singles_probabilities(u, p))
                    .collect::<Result<Vec<_>>>()
            })?;
            out.push_str("# mode classical\nphi_rad");
            for k in 1..=n {
                write!(out, ",p{k}").unwrap();
            }
            out.push_str(",coinc\n");
            for (phi, probs) in phases.iter().zip(rows) {
                write!(out, "{phi}").unwrap();
                for p in &probs {
                    write!(out, ",{p}").unwrap();
                }
                writeln!(out, ",{}", probs.iter().product::<f64>()).unwrap();
            }
        }
        ScanMode::QuantumForward | ScanMode::QuantumReversed => {
            let scheme = MeasurementScheme::PhotonCounting;
            let rows: Vec<(f64, f64)> = pool.install(|| {
                phases
                    .par_iter()
                    .map(|&p| Ok((forward_probability(u, p, scheme)?, reversed_probability(u, p, scheme)?)))
                    .collect::<Result<Vec<_>>>()
            })?;
            let max_diff = rows.iter().map(|(f, r)| (f - r).abs()).fold(0.0, f64::max);
            let name = if mode == ScanMode::QuantumForward {
                "quantum-forward"
            } else {
                "quantum-reversed"
            };
            writeln!(out, "# mode {name}\n# max_abs_diff {max_diff:e}").unwrap();
            out.push_str("phi_rad,probability,forward,reversed\n");
            for (phi, (f, r)) in phases.iter().zip(rows) {
                let p = if mode == ScanMode::QuantumForward { f } else { r };
                writeln!(out, "{phi},{p},{f},{r}").unwrap();
            }
        }
    }
    Ok(out)
}

fn load_dataset(path: &Path) -> Result<FringeDataset> {
    let file = std::fs::File::open(path)?;
    FringeDataset::from_csv(file)
}

fn fit(path: &Path, detectors: Option<usize>, report: Option<&Path>, overlay: Option<&Path>) -> Result<()> {
    let data = load_dataset(path)?;
    if let Some(n) = detectors {
        if n != data.detectors() {
            return Err(Error::ModeMismatch {
                expected: n,
                got: data.detectors(),
            });
        }
    }
    let summary = analyze_dataset(&data)?;
    emit(report, &summary.report())?;
    if let Some(p) = overlay {
        write_atomic(p, &summary.overlay_csv())?;
    }
    match summary.product_failure {
        Some(partial) if summary.product.is_none() => Err(Error::NotConverged(Box::new(partial))),
        _ => Ok(()),
    }
}

fn run(config: &Path, out_dir: &Path) -> Result<()> {
    let cfg = PipelineConfig::from_toml(&read_to_string(config)?)?;
    let out = run_pipeline(&cfg)?;
    std::fs::create_dir_all(out_dir)?;
    write_atomic(&out_dir.join("dataset.csv"), &out.dataset_csv)?;
    write_atomic(&out_dir.join("fit_report.txt"), &out.fit_report)?;
    write_atomic(&out_dir.join("overlay.csv"), &out.overlay_csv)?;
    write_atomic(&out_dir.join("sensitivity.txt"), &out.sensitivity_report)?;
    match out.summary.product_failure {
        Some(partial) if out.summary.product.is_none() => Err(Error::NotConverged(Box::new(partial))),
        _ => Ok(()),
    }
}
