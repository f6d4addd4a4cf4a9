//! Matrix permanent via Ryser's inclusion–exclusion formula.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest matrix dimension accepted by [`permanent`].
pub const DEFAULT_PERMANENT_CAP: usize = 12;

pub fn permanent(m: &DMatrix<Complex64>) -> Result<Complex64> {
    permanent_with_cap(m, DEFAULT_PERMANENT_CAP)
}

/// Ryser's formula with Gray-code subset order, `O(2^n n)`.
///
/// `perm(A) = (-1)^n Σ_S (-1)^{|S|} Π_i Σ_{j∈S} a_ij`; consecutive Gray
/// codes differ in one column, so the row sums update in `O(n)`.
pub fn permanent_with_cap(m: &DMatrix<Complex64>, cap: usize) -> Result<Complex64> {
    if !m.is_square() {
        return Err(Error::InvalidArgument(format!(
            "permanent needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n > cap {
        return Err(Error::PermanentTooLarge { dim: n, cap });
    }
    match n {
        0 => return Ok(Complex64::new(1.0, 0.0)),
        1 => return Ok(m[(0, 0)]),
        2 => return Ok(m[(0, 0)] * m[(1, 1)] + m[(0, 1)] * m[(1, 0)]),
        _ => {}
    }

    let mut row_sums = vec![Complex64::default(); n];
    let mut total = Complex64::default();
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        let col = k.trailing_zeros() as usize;
        gray ^= 1 << col;
        if gray & (1 << col) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += m[(i, col)];
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= m[(i, col)];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        total = -total;
    }
    Ok(total)
}
