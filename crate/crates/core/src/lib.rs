//! Simulation and analysis of time-reversed phase super-resolution in linear optics.
//!
//! The crate is organized by stage of the experiment:
//!
//! - [`fock`]: occupation-number states and sparse state vectors
//! - [`multiport`]: mode unitaries for symmetric and asymmetric multiports
//! - [`quantum`]: permanent-based multiphoton amplitudes, NOON heralding,
//!   and the forward and time-reversed detection probabilities
//! - [`classical`]: coherent light through a multiport, singles and
//!   coincidence probabilities, Poisson count synthesis
//! - [`fit`]: weighted least-squares fits of single and product fringes
//! - [`metrology`]: phase super-sensitivity bookkeeping
//! - [`pipeline`]: config-driven simulate, fit and sensitivity runs

pub mod classical;
pub mod error;
pub mod fit;
pub mod fock;
pub mod grid;
pub mod metrology;
pub mod multiport;
pub mod pipeline;
pub mod quantum;

pub use classical::{FringeDataset, ScanConfig};
pub use error::{Error, ErrorClass, Result};
pub use fit::{FitResult, ProductFit, SinusoidFit};
pub use fock::{FockState, FockVector, Sector};
pub use grid::PhaseGrid;
pub use metrology::{SensitivityInput, SensitivityReport};
pub use multiport::{ModeUnitary, MultiportSpec, OpticalElement};
pub use quantum::{HeraldedState, MeasurementScheme};
