//! Thin-wire dipole electromagnetics: element geometry, the induced-EMF
//! impedance kernel, and assembly of the block impedance structure.

mod assemble;
mod dipole;
mod kernel;
mod quadrature;

pub use assemble::{assemble_impedances, ImpedanceSet, Terminations};
pub use dipole::{Dipole, Role};
pub use kernel::{mutual_impedance, ImpedanceKernel, FREE_SPACE_IMPEDANCE};
pub use quadrature::{gauss_legendre, QuadratureRule};
