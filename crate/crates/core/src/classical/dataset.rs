//! Phase-indexed count records and their CSV form.
//!
//! ```text
//! # revphase fringe-dataset v1
//! phi_rad,s1,...,sN,coinc,sigma_s1,...,sigma_sN,sigma_coinc
//! ```
//!
//! Uncertainties are Poisson, `sigma = sqrt(count)`.

use std::io::Read;

use crate::error::{Error, Result};

pub const FRINGE_CSV_VERSION: &str = "# revphase fringe-dataset v1";

#[derive(Debug, Clone, PartialEq)]
pub struct FringePoint {
    pub phase: f64,
    pub singles: Vec<u64>,
    pub coincidences: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FringeDataset {
    detectors: usize,
    points: Vec<FringePoint>,
}

/// Poisson standard deviation of a count.
pub fn poisson_sigma(count: u64) -> f64 {
    (count as f64).sqrt()
}

impl FringeDataset {
    pub fn new(detectors: usize, points: Vec<FringePoint>) -> Result<Self> {
        if detectors == 0 {
            return Err(Error::InvalidArgument("dataset needs at least one detector".into()));
        }
        if let Some(p) = points.iter().find(|p| p.singles.len() != detectors) {
            return Err(Error::InvalidArgument(format!(
                "point at phi = {} has {} singles columns, expected {detectors}",
                p.phase,
                p.singles.len()
            )));
        }
        Ok(FringeDataset { detectors, points })
    }

    pub fn detectors(&self) -> usize {
        self.detectors
    }

    pub fn points(&self) -> &[FringePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn phases(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.phase).collect()
    }

    pub fn singles_column(&self, detector: usize) -> Vec<u64> {
        self.points.iter().map(|p| p.singles[detector]).collect()
    }

    pub fn coincidence_column(&self) -> Vec<u64> {
        self.points.iter().map(|p| p.coincidences).collect()
    }

    pub fn header(&self) -> Vec<String> {
        let n = self.detectors;
        let mut cols = vec!["phi_rad".to_string()];
        cols.extend((1..=n).map(|k| format!("s{k}")));
        cols.push("coinc".into());
        cols.extend((1..=n).map(|k| format!("sigma_s{k}")));
        cols.push("sigma_coinc".into());
        cols
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory write");
        for p in &self.points {
            let mut row = vec![p.phase.to_string()];
            row.extend(p.singles.iter().map(u64::to_string));
            row.push(p.coincidences.to_string());
            row.extend(p.singles.iter().map(|&c| poisson_sigma(c).to_string()));
            row.push(poisson_sigma(p.coincidences).to_string());
            w.write_record(&row).expect("in-memory write");
        }
        let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii");
        format!("{FRINGE_CSV_VERSION}\n{body}")
    }

    pub fn from_csv<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        Self::from_csv_str(&text)
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let (first, rest) = text.split_once('\n').unwrap_or((text, ""));
        let first = first.trim_end_matches('\r');
        if first != FRINGE_CSV_VERSION {
            return Err(Error::Schema(format!(
                "expected version line '{FRINGE_CSV_VERSION}', found '{first}'"
            )));
        }
        let mut r = csv::ReaderBuilder::new().from_reader(rest.as_bytes());
        let header: Vec<String> = r
            .headers()
            .map_err(|e| Error::Schema(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let singles = header.iter().filter(|h| is_singles_column(h)).count();
        if singles == 0 {
            return Err(Error::Schema("no singles columns (s1, s2, ...)".into()));
        }
        let expected = FringeDataset {
            detectors: singles,
            points: Vec::new(),
        }
        .header();
        if header != expected {
            return Err(Error::Schema(format!(
                "columns {header:?} do not match expected {expected:?}"
            )));
        }
        let mut points = Vec::new();
        for (line, record) in r.records().enumerate() {
            let record = record.map_err(|e| Error::Schema(e.to_string()))?;
            let field = |i: usize| record.get(i).unwrap_or_default();
            let bad = |i: usize| Error::Schema(format!("row {}: bad value in column {}", line + 1, header[i]));
            let phase: f64 = field(0).parse().map_err(|_| bad(0))?;
            let counts = (1..=singles + 1)
                .map(|i| field(i).parse::<u64>().map_err(|_| bad(i)))
                .collect::<Result<Vec<_>>>()?;
            for (j, &c) in counts.iter().enumerate() {
                let col = singles + 2 + j;
                let sigma: f64 = field(col).parse().map_err(|_| bad(col))?;
                if sigma != poisson_sigma(c) {
                    return Err(Error::Schema(format!(
                        "row {}: {} = {sigma} is not sqrt({c})",
                        line + 1,
                        header[col]
                    )));
                }
            }
            points.push(FringePoint {
                phase,
                singles: counts[..singles].to_vec(),
                coincidences: counts[singles],
            });
        }
        FringeDataset::new(singles, points)
    }
}

fn is_singles_column(h: &str) -> bool {
    h.strip_prefix('s')
        .is_some_and(|rest| !rest.is_empty() && rest.bytes().all(|b| b.is_ascii_digit()))
}
