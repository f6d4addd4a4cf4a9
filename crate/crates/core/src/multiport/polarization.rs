//! Polarization preparation of the two bright input modes.
//!
//! Horizontally polarized laser light passes a half-wave plate at angle θ and
//! then a quarter-wave plate at 45°. The vertical and horizontal components
//! leave with equal amplitude and a relative phase of 4θ, once the constant
//! quarter-wave retardance is absorbed into the mode-2 phase reference.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

/// A half-wave-plate setting; the quarter-wave plate stays at π/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationPhase {
    hwp_angle: f64,
}

impl PolarizationPhase {
    /// Angle in radians, wrapped into `[0, 2π)`.
    pub fn new(hwp_angle: f64) -> Self {
        PolarizationPhase {
            hwp_angle: hwp_angle.rem_euclid(2.0 * PI),
        }
    }

    /// The waveplate angle that produces relative phase `phase`.
    pub fn for_phase(phase: f64) -> Self {
        PolarizationPhase::new(phase / 4.0)
    }

    pub fn hwp_angle(&self) -> f64 {
        self.hwp_angle
    }

    pub fn relative_phase(&self) -> f64 {
        (4.0 * self.hwp_angle).rem_euclid(2.0 * PI)
    }

    pub fn field(&self) -> [Complex64; 2] {
        polarization_input(self.hwp_angle)
    }
}

type Jones = [[Complex64; 2]; 2];

fn apply(m: &Jones, v: [Complex64; 2]) -> [Complex64; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}

fn half_wave_plate(theta: f64) -> Jones {
    let (s, c) = (2.0 * theta).sin_cos();
    [
        [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
        [Complex64::new(s, 0.0), Complex64::new(-c, 0.0)],
    ]
}

/// Quarter-wave plate with its fast axis at 45°, global phase dropped.
fn quarter_wave_plate_45() -> Jones {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let b = Complex64::new(0.0, -FRAC_1_SQRT_2);
    [[a, b], [b, a]]
}

/// Two-mode field `(1, e^{iφ})/√2` with `φ = 4·hwp_angle`, obtained from the
/// Jones matrices of the waveplate pair.
pub fn polarization_input(hwp_angle: f64) -> [Complex64; 2] {
    let horizontal = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
    let after_hwp = apply(&half_wave_plate(hwp_angle), horizontal);
    let [a, b] = apply(&quarter_wave_plate_45(), after_hwp);
    // the quarter-wave plate leaves mode 2 retarded by π/2 at θ = 0
    let b = b * Complex64::from_polar(1.0, FRAC_PI_2);
    // fix the global phase so mode 1 is real and positive
    let global = Complex64::from_polar(1.0, -a.arg());
    [a * global, b * global]
}
