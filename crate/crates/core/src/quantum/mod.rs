//! Exact multiphoton evolution through mode unitaries.
//!
//! A basis transition `|in> -> |out>` through `U` has amplitude
//! `Per(U[out|in]) / sqrt(Π out_i! Π in_j!)`, where `U[out|in]` repeats row
//! `i` `out_i` times and column `j` `in_j` times.
//!
//! The detection probability for the NOON-state experiment can be evaluated
//! two ways: time-forward (single photons in, projected onto the measurement
//! state after the device) and time-reversed (the measurement state sent
//! backwards through `U_φ†` and `U†`, projected onto the single photons).
//! The two routes share no intermediate state.

mod permanent;

pub use permanent::{permanent, permanent_with_cap, DEFAULT_PERMANENT_CAP};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{self, enumerate_sector, FockState, FockVector, Sector};
use crate::multiport::{compose, ModeUnitary, OpticalElement};

/// Amplitude for a single basis transition.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionAmplitude {
    pub input: FockState,
    pub output: FockState,
    pub value: Complex64,
}

pub fn transition_amplitude(u: &ModeUnitary, input: &FockState, output: &FockState) -> Result<Complex64> {
    for s in [input, output] {
        if s.modes() != u.dim() {
            return Err(Error::ModeMismatch {
                expected: u.dim(),
                got: s.modes(),
            });
        }
    }
    if input.photons() != output.photons() {
        return Ok(Complex64::default());
    }
    let rows = output.mode_list();
    let cols = input.mode_list();
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| u.entry(rows[r], cols[c]));
    let norm = (input.factorial_product() * output.factorial_product()).sqrt();
    Ok(permanent(&sub)? / norm)
}

pub fn transition(u: &ModeUnitary, input: &FockState, output: &FockState) -> Result<TransitionAmplitude> {
    Ok(TransitionAmplitude {
        input: input.clone(),
        output: output.clone(),
        value: transition_amplitude(u, input, output)?,
    })
}

/// Propagates a state vector through `u`, returning the full output sector.
pub fn evolve(u: &ModeUnitary, state: &FockVector) -> Result<FockVector> {
    let sector = state.sector();
    if sector.modes != u.dim() {
        return Err(Error::ModeMismatch {
            expected: u.dim(),
            got: sector.modes,
        });
    }
    let mut out = FockVector::zero(sector);
    for target in enumerate_sector(sector.modes, sector.photons)? {
        let mut amp = Complex64::default();
        for (source, a) in state.iter() {
            amp += a * transition_amplitude(u, source, &target)?;
        }
        if amp != Complex64::default() {
            out.add(target, amp)?;
        }
    }
    Ok(out)
}

/// A two-mode state produced by post-selecting vacuum in modes `3..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeraldedState {
    pub state: FockVector,
    pub herald_probability: f64,
}

impl HeraldedState {
    /// `|<target|state>|^2`.
    pub fn fidelity(&self, target: &FockVector) -> Result<f64> {
        Ok(fock::inner_product(target, &self.state)?.norm_sqr())
    }

    /// Fidelity with `(|N,0> + e^{iθ}|0,N>)/√2`, maximized over θ.
    ///
    /// A fixed relative phase between the two arms only shifts the fringe
    /// origin, so this is the figure of merit for a NOON source.
    pub fn noon_fidelity_any_phase(&self) -> f64 {
        let n = self.state.sector().photons as u32;
        let a = self.state.amplitude(&FockState::new(vec![n, 0]).expect("two modes"));
        let b = self.state.amplitude(&FockState::new(vec![0, n]).expect("two modes"));
        (a.norm() + b.norm()).powi(2) / 2.0
    }
}

/// Below this the herald is treated as never firing.
pub const MIN_HERALD_PROBABILITY: f64 = 1e-15;

/// Sends one photon into every mode of `u` and post-selects vacuum on modes
/// `3..N`, leaving all `N` photons in modes 1 and 2.
pub fn herald_noon(u: &ModeUnitary, photons: usize) -> Result<HeraldedState> {
    if u.dim() != photons {
        return Err(Error::ModeMismatch {
            expected: photons,
            got: u.dim(),
        });
    }
    if photons < 2 {
        return Err(Error::InvalidArgument("heralding needs N >= 2".into()));
    }
    let input = FockState::ones(photons)?;
    let n = photons as u32;
    let mut amplitudes = Vec::with_capacity(photons + 1);
    for n1 in (0..=n).rev() {
        let mut occ = vec![0u32; photons];
        occ[0] = n1;
        occ[1] = n - n1;
        let amp = transition_amplitude(u, &input, &FockState::new(occ)?)?;
        amplitudes.push((FockState::new(vec![n1, n - n1])?, amp));
    }
    let herald_probability: f64 = amplitudes.iter().map(|(_, a)| a.norm_sqr()).sum();
    if herald_probability < MIN_HERALD_PROBABILITY {
        return Err(Error::HeraldNeverFires(herald_probability));
    }
    let state = FockVector::from_amplitudes(Sector::new(2, photons), amplitudes)?.normalized()?;
    Ok(HeraldedState {
        state,
        herald_probability,
    })
}

/// Final-state measurements on modes 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasurementScheme {
    /// Balanced beam splitter followed by counting all `N` photons in one
    /// output port; vacuum in every other mode.
    #[default]
    PhotonCounting,
}

/// The measured state `<Ψ_f|` as a ket on `modes` modes with `photons` photons.
///
/// For photon counting this is `BS†|N,0>` on modes 1 and 2, tensored with
/// vacuum on the rest.
pub fn measurement_state(scheme: MeasurementScheme, modes: usize, photons: usize) -> Result<FockVector> {
    if modes < 2 {
        return Err(Error::InvalidArgument("measurement needs at least two modes".into()));
    }
    match scheme {
        MeasurementScheme::PhotonCounting => {
            let bs = compose(&[OpticalElement::beam_splitter(0, 1, 0.5)], 2)?;
            let counted = FockVector::basis(FockState::new(vec![photons as u32, 0])?);
            let two_mode = evolve(&bs.adjoint(), &counted)?;
            let mut padded = FockVector::zero(Sector::new(modes, photons));
            for (state, amp) in two_mode.iter() {
                let mut occ = state.occupations().to_vec();
                occ.resize(modes, 0);
                padded.add(FockState::new(occ)?, *amp)?;
            }
            Ok(padded)
        }
    }
}

fn mode2_shifter(dim: usize, phase: f64) -> Result<ModeUnitary> {
    ModeUnitary::phase_shifter(dim, 1, phase)
}

/// `|<Ψ_f| U_φ U |1...1>|^2` with `U_φ` a phase `φ` on mode 2.
pub fn forward_probability(u: &ModeUnitary, phase: f64, scheme: MeasurementScheme) -> Result<f64> {
    forward_probability_with_shifter(u, &mode2_shifter(u.dim(), phase)?, scheme)
}

/// Forward probability with an arbitrary phase element applied after `u`.
pub fn forward_probability_with_shifter(
    u: &ModeUnitary,
    shifter: &ModeUnitary,
    scheme: MeasurementScheme,
) -> Result<f64> {
    let n = u.dim();
    let device = u.then(shifter)?;
    let input = FockState::ones(n)?;
    let measured = measurement_state(scheme, n, n)?;
    let mut amp = Complex64::default();
    for (state, f) in measured.iter() {
        amp += f.conj() * transition_amplitude(&device, &input, state)?;
    }
    Ok(amp.norm_sqr())
}

/// `|<1...1| U† U_φ† |Ψ_f>|^2`: the measurement state is propagated backwards
/// and projected onto the single-photon input.
pub fn reversed_probability(u: &ModeUnitary, phase: f64, scheme: MeasurementScheme) -> Result<f64> {
    reversed_probability_with_shifter(u, &mode2_shifter(u.dim(), phase)?, scheme)
}

pub fn reversed_probability_with_shifter(
    u: &ModeUnitary,
    shifter: &ModeUnitary,
    scheme: MeasurementScheme,
) -> Result<f64> {
    let n = u.dim();
    let backwards = shifter.adjoint().then(&u.adjoint())?;
    let prepared = FockState::ones(n)?;
    let measured = measurement_state(scheme, n, n)?;
    let mut amp = Complex64::default();
    for (state, f) in measured.iter() {
        amp += f * transition_amplitude(&backwards, state, &prepared)?;
    }
    Ok(amp.norm_sqr())
}

/// Overlap `κ_N = 1/2^N` of the photon-counting measurement with each NOON term.
pub fn kappa_scheme_i(photons: usize) -> f64 {
    0.5f64.powi(photons as i32)
}

/// `|<N,0|BS|N,0>|^2` from the permanent; equals [`kappa_scheme_i`].
pub fn kappa_scheme_i_from_permanent(photons: usize) -> Result<f64> {
    let bs = compose(&[OpticalElement::beam_splitter(0, 1, 0.5)], 2)?;
    let ket = FockState::new(vec![photons as u32, 0])?;
    Ok(transition_amplitude(&bs, &ket, &ket)?.norm_sqr())
}

/// Coherent-state (homodyne) measurement overlap at `|α|^2 = N/2`:
/// `2^{-N} / sqrt(2πN)`. Closed form only.
pub fn kappa_scheme_ii(photons: usize) -> f64 {
    kappa_scheme_i(photons) / (2.0 * std::f64::consts::PI * photons as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::noon_state;
    use crate::multiport::symmetric_multiport;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn st(v: &[u32]) -> FockState {
        FockState::new(v.to_vec()).unwrap()
    }

    fn balanced_bs() -> ModeUnitary {
        compose(&[OpticalElement::beam_splitter(0, 1, 0.5)], 2).unwrap()
    }

    #[test]
    fn identity_transition() {
        let u = ModeUnitary::identity(3);
        let a = transition_amplitude(&u, &st(&[1, 0, 1]), &st(&[1, 0, 1])).unwrap();
        assert!((a - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let z = transition_amplitude(&u, &st(&[1, 0, 1]), &st(&[1, 1, 0])).unwrap();
        assert_eq!(z, Complex64::default());
    }

    #[test]
    fn hong_ou_mandel_null() {
        let a = transition_amplitude(&balanced_bs(), &st(&[1, 1]), &st(&[1, 1])).unwrap();
        assert!(a.norm() < 1e-15);
    }

    #[test]
    fn tritter_bunching_amplitude() {
        let u = symmetric_multiport(3).unwrap();
        let a = transition_amplitude(&u, &st(&[1, 1, 1]), &st(&[3, 0, 0])).unwrap();
        assert!((a.norm_sqr() - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn photon_number_mismatch_gives_zero_and_mode_mismatch_errors() {
        let u = symmetric_multiport(3).unwrap();
        assert_eq!(
            transition_amplitude(&u, &st(&[1, 1, 1]), &st(&[1, 0, 0])).unwrap(),
            Complex64::default()
        );
        assert!(matches!(
            transition_amplitude(&u, &st(&[1, 1]), &st(&[1, 1])),
            Err(Error::ModeMismatch { .. })
        ));
    }

    #[test]
    fn evolution_preserves_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in 1..=6 {
            for n in 0..=6 {
                if Sector::new(m, n).size() > 120 {
                    continue;
                }
                let u = ModeUnitary::haar_random(m, &mut rng);
                for input in enumerate_sector(m, n).unwrap() {
                    let total: f64 = enumerate_sector(m, n)
                        .unwrap()
                        .iter()
                        .map(|out| transition_amplitude(&u, &input, out).unwrap().norm_sqr())
                        .sum();
                    assert!((total - 1.0).abs() < 1e-10, "m={m} n={n} {input}");
                }
            }
        }
    }

    #[test]
    fn tritter_heralds_noon3() {
        let h = herald_noon(&symmetric_multiport(3).unwrap(), 3).unwrap();
        assert!((h.herald_probability - 4.0 / 9.0).abs() < 1e-12);
        assert!((h.fidelity(&noon_state(3).unwrap()).unwrap() - 1.0).abs() < 1e-10);
        assert!(h.state.amplitude(&st(&[2, 1])).norm() < 1e-12);
        assert!(h.state.amplitude(&st(&[1, 2])).norm() < 1e-12);
    }

    #[test]
    fn beam_splitter_heralds_noon2() {
        let h = herald_noon(&balanced_bs(), 2).unwrap();
        assert!((h.herald_probability - 1.0).abs() < 1e-12);
        assert!((h.fidelity(&noon_state(2).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dft2_heralds_noon_with_pi_phase() {
        // DFT2 differs from the i-convention splitter by a phase on mode 2
        let h = herald_noon(&symmetric_multiport(2).unwrap(), 2).unwrap();
        assert!((h.herald_probability - 1.0).abs() < 1e-12);
        assert!(h.fidelity(&noon_state(2).unwrap()).unwrap() < 1e-12);
        assert!((h.noon_fidelity_any_phase() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn herald_validation() {
        let u = symmetric_multiport(3).unwrap();
        assert!(matches!(herald_noon(&u, 4), Err(Error::ModeMismatch { .. })));
        // identity never moves photons out of modes 3..N
        assert!(matches!(
            herald_noon(&ModeUnitary::identity(3), 3),
            Err(Error::HeraldNeverFires(_))
        ));
    }

    #[test]
    fn measurement_state_overlaps() {
        for n in 1..=6 {
            let m = measurement_state(MeasurementScheme::PhotonCounting, 2, n).unwrap();
            assert!(m.is_normalized());
            let n0 = FockVector::basis(st(&[n as u32, 0]));
            let on = FockVector::basis(st(&[0, n as u32]));
            let k1 = fock::inner_product(&m, &n0).unwrap().norm_sqr();
            let k2 = fock::inner_product(&m, &on).unwrap().norm_sqr();
            assert!((k1 - kappa_scheme_i(n)).abs() < 1e-14);
            assert!((k2 - kappa_scheme_i(n)).abs() < 1e-14);
        }
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa_scheme_i(1), 0.5);
        assert_eq!(kappa_scheme_i(3), 0.125);
        assert!((kappa_scheme_i_from_permanent(4).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        assert!((kappa_scheme_ii(1) - 0.199_471_140_200_716_35).abs() < 1e-12);
        assert!((kappa_scheme_ii(4) - 0.012_466_946_262_544_77).abs() < 1e-12);
        for n in 1..=10 {
            let ratio = kappa_scheme_ii(n) / kappa_scheme_i(n);
            assert!((ratio - 1.0 / (2.0 * std::f64::consts::PI * n as f64).sqrt()).abs() < 1e-15);
            assert!((kappa_scheme_i_from_permanent(n).unwrap() - kappa_scheme_i(n)).abs() < 1e-14);
        }
    }

    #[test]
    fn time_reversal_on_random_devices() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=5 {
            for _ in 0..10 {
                let u = ModeUnitary::haar_random(n, &mut rng);
                let phi = rng.random_range(0.0..std::f64::consts::TAU);
                let f = forward_probability(&u, phi, MeasurementScheme::PhotonCounting).unwrap();
                let r = reversed_probability(&u, phi, MeasurementScheme::PhotonCounting).unwrap();
                assert!((f - r).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn shifter_placement_only_needs_relative_phase() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = ModeUnitary::haar_random(3, &mut rng);
        for i in 0..20 {
            let phi = 0.3 * i as f64;
            let on_two = ModeUnitary::phase_shifter(3, 1, phi).unwrap();
            let on_one = ModeUnitary::phase_shifter(3, 0, -phi).unwrap();
            let a = forward_probability_with_shifter(&u, &on_two, MeasurementScheme::PhotonCounting).unwrap();
            let b = forward_probability_with_shifter(&u, &on_one, MeasurementScheme::PhotonCounting).unwrap();
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn fringe_has_full_visibility_and_period() {
        for n in [2usize, 3] {
            let u = symmetric_multiport(n).unwrap();
            let h = herald_noon(&u, n).unwrap();
            let amplitude = h.herald_probability * kappa_scheme_i(n);
            let values: Vec<f64> = (0..720)
                .map(|i| {
                    let phi = std::f64::consts::TAU * i as f64 / 720.0;
                    forward_probability(&u, phi, MeasurementScheme::PhotonCounting).unwrap()
                })
                .collect();
            let max = values.iter().cloned().fold(f64::MIN, f64::max);
            let min = values.iter().cloned().fold(f64::MAX, f64::min);
            assert!((max - min - 2.0 * amplitude).abs() < 1e-10);
            let period = std::f64::consts::TAU / n as f64;
            for i in 0..50 {
                let phi = 0.137 * i as f64;
                let a = forward_probability(&u, phi, MeasurementScheme::PhotonCounting).unwrap();
                let b = forward_probability(&u, phi + period, MeasurementScheme::PhotonCounting).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }
}
