//! Fixtures shared by the benchmarks.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use revphase_core::classical::{simulate_counts, ScanConfig};
use revphase_core::multiport::canonical_multiport;
use revphase_core::{FringeDataset, PhaseGrid};

/// Square matrix with entries uniform in the unit square of the complex plane.
pub fn random_matrix(n: usize, seed: u64) -> DMatrix<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// A laboratory-rate scan of the canonical `n`-port with partial contrast.
pub fn lab_dataset(n: usize, points: usize, seed: u64) -> FringeDataset {
    let u = canonical_multiport(n).expect("canonical multiport");
    let phases = PhaseGrid::full_cycle(points).expect("grid").phases();
    let cfg = ScanConfig::laboratory(n, phases, seed).with_contrast(vec![0.85; n]);
    let cfg = ScanConfig {
        windows: cfg.windows * 100,
        ..cfg
    };
    simulate_counts(&u, &cfg).expect("simulation").dataset
}
