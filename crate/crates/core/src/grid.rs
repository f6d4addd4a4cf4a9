//! Evenly spaced phase grids.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `points` phases from `start` towards `stop` (radians).
///
/// With `endpoint = false` the stop value is excluded, so a full cycle
/// `0..2π` samples each phase once.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseGrid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub endpoint: bool,
}

impl PhaseGrid {
    pub fn new(start: f64, stop: f64, points: usize, endpoint: bool) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidArgument(format!(
                "a phase grid needs at least 2 points, got {points}"
            )));
        }
        if !start.is_finite() || !stop.is_finite() {
            return Err(Error::InvalidArgument("grid bounds must be finite".into()));
        }
        Ok(PhaseGrid {
            start,
            stop,
            points,
            endpoint,
        })
    }

    pub fn from_degrees(start: f64, stop: f64, points: usize, endpoint: bool) -> Result<Self> {
        PhaseGrid::new(start.to_radians(), stop.to_radians(), points, endpoint)
    }

    /// One full cycle without the repeated endpoint.
    pub fn full_cycle(points: usize) -> Result<Self> {
        PhaseGrid::new(0.0, TAU, points, false)
    }

    pub fn phases(&self) -> Vec<f64> {
        let divisions = if self.endpoint { self.points - 1 } else { self.points };
        let step = (self.stop - self.start) / divisions as f64;
        (0..self.points).map(|i| self.start + step * i as f64).collect()
    }
}
