//! Channel model and joint precoder/RIS optimizer for RIS-aided multi-user
//! links in which the RIS, the transceivers and the scattering environment
//! are all mutually coupled thin-wire dipoles.
//!
//! The crate is generic over the real scalar ([`Real`], implemented for
//! `f32` and `f64`); the `*64` aliases below name the double-precision
//! instantiations used by the command-line tools.

pub mod channel;
pub mod em;
pub mod error;
pub mod linalg;
pub mod optimizer;
pub mod real;
pub mod scenario;

pub use channel::{end_to_end_channel, fold_esos, mismatched_channel, FoldedChannel, RisLoads};
pub use em::{assemble_impedances, mutual_impedance, Dipole, ImpedanceSet, Role, Terminations};
pub use error::{Error, Result};
pub use optimizer::{
    mismatched_optimize, optimal_precoder, random_baseline, saris_optimize, smse, sum_rate,
    OptimizerState, SarisConfig,
};
pub use real::Real;
pub use scenario::{generate, parse_config, ScenarioConfig};

pub type Dipole64 = Dipole<f64>;
pub type ImpedanceSet64 = ImpedanceSet<f64>;
pub type FoldedChannel64 = FoldedChannel<f64>;
pub type RisLoads64 = RisLoads<f64>;
pub type OptimizerState64 = OptimizerState<f64>;
pub type SarisConfig64 = SarisConfig<f64>;
pub type Complex64 = num_complex::Complex<f64>;
pub type CMatrix64 = real::CMatrix<f64>;
