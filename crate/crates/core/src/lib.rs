//! Orbital-expansion ADAPT-VQE on an exact statevector simulator.
//!
//! The pipeline starts from a restricted Hartree–Fock solution in a localized
//! orbital basis, cuts out a fragment plus its bath, ranks the remaining
//! environment orbitals by MP2 particle exchange with that impurity, and grows
//! both the active space and the ADAPT ansatz stage by stage.

pub mod cli;
pub mod embedding;
pub mod error;
pub mod fermisim;
pub mod integrals;
pub mod linalg;
pub mod oracle;
pub mod projection;
pub mod ranking;
pub mod scf;
pub mod solver;

pub use error::{Error, Result};
