//! Mode unitaries for multiport interferometers.
//!
//! A [`ModeUnitary`] `U` maps input mode `j` to output modes through column
//! `j`: a field `a` entering the device leaves as `U a`. Every constructor
//! checks `U†U = I` entrywise to [`UNITARITY_TOLERANCE`].

mod config;
mod polarization;

pub use config::{ElementSpec, MultiportKind, MultiportSpec};
pub use polarization::{polarization_input, PolarizationPhase};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Tolerance for the orthonormality check on columns handed to [`complete_unitary`].
pub const ORTHONORMAL_TOLERANCE: f64 = 1e-10;

/// Candidates whose residual norm after projection falls below this are
/// skipped during completion.
pub const DEPENDENCE_THRESHOLD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    matrix: DMatrix<Complex64>,
}

impl ModeUnitary {
    pub fn new(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "mode unitary must be square and non-empty, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let residual = unitarity_residual(&matrix);
        if residual > UNITARITY_TOLERANCE || !residual.is_finite() {
            return Err(Error::NotUnitary { residual });
        }
        Ok(ModeUnitary { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        ModeUnitary {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    /// Haar-distributed random unitary (Gram–Schmidt on a complex Gaussian matrix).
    pub fn haar_random<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Self {
        loop {
            let columns: Vec<DVector<Complex64>> = (0..dim)
                .map(|_| {
                    DVector::from_iterator(
                        dim,
                        (0..dim).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))),
                    )
                })
                .collect();
            let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(dim);
            for c in columns {
                if let Some(v) = orthonormalize_against(&basis, c) {
                    basis.push(v);
                }
            }
            if basis.len() == dim {
                return ModeUnitary {
                    matrix: DMatrix::from_columns(&basis),
                };
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        ModeUnitary {
            matrix: self.matrix.adjoint(),
        }
    }

    /// The device that applies `self` first and `next` afterwards (`next · self`).
    pub fn then(&self, next: &ModeUnitary) -> Result<Self> {
        if next.dim() != self.dim() {
            return Err(Error::ModeMismatch {
                expected: self.dim(),
                got: next.dim(),
            });
        }
        Ok(ModeUnitary {
            matrix: &next.matrix * &self.matrix,
        })
    }

    /// Output field amplitudes for the given input field.
    pub fn apply(&self, field: &[Complex64]) -> Result<Vec<Complex64>> {
        if field.len() != self.dim() {
            return Err(Error::ModeMismatch {
                expected: self.dim(),
                got: field.len(),
            });
        }
        let v = DVector::from_column_slice(field);
        Ok((&self.matrix * v).iter().copied().collect())
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.matrix)
    }

    /// `diag(1, ..., e^{i phase}, ..., 1)` with the phase on `mode`.
    pub fn phase_shifter(dim: usize, mode: usize, phase: f64) -> Result<Self> {
        OpticalElement::PhaseShifter { mode, phase }.unitary(dim)
    }

    /// Row-major CSV, each cell written as a `re,im` pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.dim() {
            let cells: Vec<String> = (0..self.dim())
                .map(|c| {
                    let z = self.matrix[(r, c)];
                    format!("{},{}", z.re, z.im)
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Largest entry of `|U†U - I|`.
pub fn unitarity_residual(matrix: &DMatrix<Complex64>) -> f64 {
    let n = matrix.ncols();
    let product = matrix.adjoint() * matrix;
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            let d = (product[(r, c)] - Complex64::new(target, 0.0)).norm();
            if d.is_nan() {
                return f64::NAN;
            }
            worst = worst.max(d);
        }
    }
    worst
}

/// Two-mode and single-mode building blocks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    /// `[[√r, i√(1−r)], [i√(1−r), √r]]` on the mode pair.
    BeamSplitter {
        modes: (usize, usize),
        reflectivity: f64,
    },
    PhaseShifter {
        mode: usize,
        phase: f64,
    },
    ModeSwap {
        modes: (usize, usize),
    },
}

impl OpticalElement {
    pub fn beam_splitter(a: usize, b: usize, reflectivity: f64) -> Self {
        OpticalElement::BeamSplitter {
            modes: (a, b),
            reflectivity,
        }
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let check = |index: usize| {
            if index >= dim {
                Err(Error::InvalidMode { index, dim })
            } else {
                Ok(())
            }
        };
        match *self {
            OpticalElement::BeamSplitter {
                modes: (a, b),
                reflectivity,
            } => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::RepeatedMode(a));
                }
                if !(0.0..=1.0).contains(&reflectivity) {
                    return Err(Error::InvalidReflectivity(reflectivity));
                }
            }
            OpticalElement::PhaseShifter { mode, phase } => {
                check(mode)?;
                if !phase.is_finite() {
                    return Err(Error::InvalidArgument(format!("phase {phase} is not finite")));
                }
            }
            OpticalElement::ModeSwap { modes: (a, b) } => {
                check(a)?;
                check(b)?;
                if a == b {
                    return Err(Error::RepeatedMode(a));
                }
            }
        }
        Ok(())
    }

    /// The element embedded as a `dim`-mode unitary.
    pub fn unitary(&self, dim: usize) -> Result<ModeUnitary> {
        self.validate(dim)?;
        let mut m = DMatrix::<Complex64>::identity(dim, dim);
        match *self {
            OpticalElement::BeamSplitter {
                modes: (a, b),
                reflectivity,
            } => {
                let t = Complex64::new(reflectivity.sqrt(), 0.0);
                let r = Complex64::new(0.0, (1.0 - reflectivity).sqrt());
                m[(a, a)] = t;
                m[(a, b)] = r;
                m[(b, a)] = r;
                m[(b, b)] = t;
            }
            OpticalElement::PhaseShifter { mode, phase } => {
                m[(mode, mode)] = Complex64::from_polar(1.0, phase);
            }
            OpticalElement::ModeSwap { modes: (a, b) } => {
                m[(a, a)] = Complex64::default();
                m[(b, b)] = Complex64::default();
                m[(a, b)] = Complex64::new(1.0, 0.0);
                m[(b, a)] = Complex64::new(1.0, 0.0);
            }
        }
        Ok(ModeUnitary { matrix: m })
    }
}

/// Product of the element unitaries, first element applied first.
pub fn compose(elements: &[OpticalElement], dim: usize) -> Result<ModeUnitary> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let mut acc = DMatrix::<Complex64>::identity(dim, dim);
    for e in elements {
        acc = e.unitary(dim)?.matrix * acc;
    }
    ModeUnitary::new(acc)
}

/// Discrete Fourier multiport, `U_jk = exp(2πi jk/N)/√N`.
///
/// Every input spreads over all outputs with intensity `1/N`, which is the
/// tritter's defining property at `N = 3`.
pub fn symmetric_multiport(dim: usize) -> Result<ModeUnitary> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!(
            "symmetric multiport needs N >= 2, got {dim}"
        )));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let m = DMatrix::from_fn(dim, dim, |j, k| {
        // reduce jk mod N first so large indices keep full phase accuracy
        let e = (j * k) % dim;
        Complex64::from_polar(scale, 2.0 * PI * e as f64 / dim as f64)
    });
    ModeUnitary::new(m)
}

/// Even-`N` multiport whose two bright inputs produce singles fringes
/// `1 + cos(φ + 2πk/N + offset)` on output `k`.
///
/// Column 0 is uniform, column 1 carries the phase ramp, the rest come from
/// [`complete_unitary`].
pub fn asymmetric_multiport(dim: usize, offset: f64) -> Result<ModeUnitary> {
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "asymmetric multiport needs an even N >= 2, got {dim}"
        )));
    }
    let scale = 1.0 / (dim as f64).sqrt();
    let first = vec![Complex64::new(scale, 0.0); dim];
    let second: Vec<Complex64> = (0..dim)
        .map(|k| Complex64::from_polar(scale, 2.0 * PI * k as f64 / dim as f64 + offset))
        .collect();
    complete_unitary(&[first, second], dim)
}

/// The symmetric multiport for odd `N`, the zero-offset asymmetric one for even `N`.
pub fn canonical_multiport(dim: usize) -> Result<ModeUnitary> {
    if dim.is_multiple_of(2) {
        asymmetric_multiport(dim, 0.0)
    } else {
        symmetric_multiport(dim)
    }
}

/// Extends orthonormal columns to a full unitary.
///
/// Canonical basis vectors `e_0, e_1, ...` are orthogonalized in index order
/// against the columns so far; candidates that are (nearly) dependent are
/// skipped. The output is a pure function of the input.
pub fn complete_unitary(columns: &[Vec<Complex64>], dim: usize) -> Result<ModeUnitary> {
    if dim == 0 || columns.len() > dim {
        return Err(Error::InvalidArgument(format!(
            "cannot complete {} columns to dimension {dim}",
            columns.len()
        )));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != dim) {
        return Err(Error::ModeMismatch {
            expected: dim,
            got: c.len(),
        });
    }
    let given: Vec<DVector<Complex64>> = columns.iter().map(|c| DVector::from_column_slice(c)).collect();
    let mut deviation = 0.0f64;
    for (i, a) in given.iter().enumerate() {
        for (j, b) in given.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            deviation = deviation.max((a.dotc(b) - Complex64::new(target, 0.0)).norm());
        }
    }
    if deviation > ORTHONORMAL_TOLERANCE || !deviation.is_finite() {
        return Err(Error::NotOrthonormal { deviation });
    }

    let mut basis = given;
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut candidate = DVector::<Complex64>::zeros(dim);
        candidate[k] = Complex64::new(1.0, 0.0);
        if let Some(v) = orthonormalize_against(&basis, candidate) {
            basis.push(v);
        }
    }
    ModeUnitary::new(DMatrix::from_columns(&basis))
}

/// Two passes of modified Gram–Schmidt; `None` when the candidate is
/// dependent on `basis` to within [`DEPENDENCE_THRESHOLD`].
fn orthonormalize_against(basis: &[DVector<Complex64>], mut v: DVector<Complex64>) -> Option<DVector<Complex64>> {
    let original = v.norm();
    if original == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let coeff = b.dotc(&v);
            v -= b * coeff;
        }
    }
    let norm = v.norm();
    if norm < DEPENDENCE_THRESHOLD * original {
        return None;
    }
    Some(v / Complex64::new(norm, 0.0))
}
