//! Occupation-number basis states and sparse state vectors for `n` photons
//! in `m` optical modes.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Absolute tolerance used for every normalization check.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Default cap on the number of basis states a sector may contain.
pub const DEFAULT_SECTOR_CAP: usize = 1_000_000;

/// A basis ket `|n_1 n_2 ... n_m>` given by its photon count per mode.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockState {
    occupations: Vec<u32>,
}

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Result<Self> {
        if occupations.is_empty() {
            return Err(Error::InvalidArgument("a Fock state needs at least one mode".into()));
        }
        Ok(FockState { occupations })
    }

    /// The vacuum on `modes` modes.
    pub fn vacuum(modes: usize) -> Result<Self> {
        FockState::new(vec![0; modes])
    }

    /// One photon in each of `modes` modes, `|11...1>`.
    pub fn ones(modes: usize) -> Result<Self> {
        FockState::new(vec![1; modes])
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn photons(&self) -> usize {
        self.occupations.iter().map(|&n| n as usize).sum()
    }

    pub fn sector(&self) -> Sector {
        Sector {
            modes: self.modes(),
            photons: self.photons(),
        }
    }

    /// Mode indices with multiplicity, e.g. `|2 0 1>` gives `[0, 0, 2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.occupations
            .iter()
            .enumerate()
            .flat_map(|(mode, &n)| std::iter::repeat_n(mode, n as usize))
            .collect()
    }

    /// `prod_i n_i!` as a float.
    pub fn factorial_product(&self) -> f64 {
        self.occupations
            .iter()
            .map(|&n| (1..=n).map(f64::from).product::<f64>())
            .product()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("|")?;
        for (i, n) in self.occupations.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str(">")
    }
}

/// A fixed (mode count, photon count) block of Fock space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sector {
    pub modes: usize,
    pub photons: usize,
}

impl Sector {
    pub fn new(modes: usize, photons: usize) -> Self {
        Sector { modes, photons }
    }

    /// Number of basis states, `C(n + m - 1, m - 1)`, saturating at `u128::MAX`.
    pub fn size(&self) -> u128 {
        if self.modes == 0 {
            return 0;
        }
        let k = (self.modes - 1).min(self.photons) as u128;
        let top = (self.photons + self.modes - 1) as u128;
        let mut acc: u128 = 1;
        for i in 0..k {
            // acc * (top - i) / (i + 1) stays integral at every step
            acc = match acc.checked_mul(top - i) {
                Some(v) => v / (i + 1),
                None => return u128::MAX,
            };
        }
        acc
    }
}

/// All basis states of the sector in descending lexicographic order.
pub fn enumerate_sector(modes: usize, photons: usize) -> Result<Vec<FockState>> {
    enumerate_sector_capped(modes, photons, DEFAULT_SECTOR_CAP)
}

pub fn enumerate_sector_capped(modes: usize, photons: usize, cap: usize) -> Result<Vec<FockState>> {
    if modes == 0 {
        return Err(Error::InvalidArgument("sector needs at least one mode".into()));
    }
    let size = Sector::new(modes, photons).size();
    if size > cap as u128 {
        return Err(Error::SectorTooLarge {
            modes,
            photons,
            size,
            cap,
        });
    }
    let mut out = Vec::with_capacity(size as usize);
    let mut current = vec![0u32; modes];
    fill_descending(&mut current, 0, photons as u32, &mut out);
    Ok(out)
}

fn fill_descending(current: &mut [u32], mode: usize, remaining: u32, out: &mut Vec<FockState>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(FockState {
            occupations: current.to_vec(),
        });
        return;
    }
    for n in (0..=remaining).rev() {
        current[mode] = n;
        fill_descending(current, mode + 1, remaining - n, out);
    }
}

/// A complex superposition of basis states within one sector.
///
/// Amplitudes are stored sparsely and iterate in a deterministic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    sector: Sector,
    amplitudes: BTreeMap<FockState, Complex64>,
}

impl FockVector {
    pub fn zero(sector: Sector) -> Self {
        FockVector {
            sector,
            amplitudes: BTreeMap::new(),
        }
    }

    pub fn basis(state: FockState) -> Self {
        let sector = state.sector();
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(state, Complex64::new(1.0, 0.0));
        FockVector { sector, amplitudes }
    }

    pub fn from_amplitudes<I>(sector: Sector, amplitudes: I) -> Result<Self>
    where
        I: IntoIterator<Item = (FockState, Complex64)>,
    {
        let mut v = FockVector::zero(sector);
        for (state, amp) in amplitudes {
            v.add(state, amp)?;
        }
        Ok(v)
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    /// Adds `amp` to the amplitude of `state`.
    pub fn add(&mut self, state: FockState, amp: Complex64) -> Result<()> {
        let s = state.sector();
        if s != self.sector {
            return Err(Error::SectorMismatch(
                self.sector.modes,
                self.sector.photons,
                s.modes,
                s.photons,
            ));
        }
        *self.amplitudes.entry(state).or_default() += amp;
        Ok(())
    }

    pub fn amplitude(&self, state: &FockState) -> Complex64 {
        self.amplitudes.get(state).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, &Complex64)> {
        self.amplitudes.iter()
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORM_TOLERANCE
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 {
            return Err(Error::DegenerateData("cannot normalize the zero vector".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / norm, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        FockVector {
            sector: self.sector,
            amplitudes: self.amplitudes.iter().map(|(s, a)| (s.clone(), a * factor)).collect(),
        }
    }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &FockVector, b: &FockVector) -> Result<Complex64> {
    if a.sector != b.sector {
        return Err(Error::SectorMismatch(
            a.sector.modes,
            a.sector.photons,
            b.sector.modes,
            b.sector.photons,
        ));
    }
    // walk the smaller map
    let (small, large, conj_small) = if a.len() <= b.len() {
        (a, b, true)
    } else {
        (b, a, false)
    };
    let mut acc = Complex64::default();
    for (state, amp) in &small.amplitudes {
        if let Some(other) = large.amplitudes.get(state) {
            acc += if conj_small {
                amp.conj() * other
            } else {
                other.conj() * amp
            };
        }
    }
    Ok(acc)
}

/// `(|N,0> + |0,N>) / sqrt(2)` on two modes.
pub fn noon_state(photons: usize) -> Result<FockVector> {
    if photons == 0 {
        return Err(Error::InvalidArgument("NOON state needs N >= 1".into()));
    }
    let n = photons as u32;
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    FockVector::from_amplitudes(
        Sector::new(2, photons),
        [(FockState::new(vec![n, 0])?, amp), (FockState::new(vec![0, n])?, amp)],
    )
}
