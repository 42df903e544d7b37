//! Brute-force reference calculations used to check the main pipeline.
//!
//! None of these share numerical kernels with the simulator or solver: FCI
//! uses its own α/β string algebra, the exponential is a dense Taylor series
//! over the Pauli expansion, and MP2 does its own integral transform.

mod bp;
mod dense;
mod fci;
mod mp2;

pub use bp::{
    bp_diagonal, bp_gradients_with_unitary, bp_reference, bp_variance_experiment, haar_columns,
    log2_slope, reference_couplings, BpResult, MAX_BP_QUBITS,
};
pub use dense::{dense_exponential, expm, generator_matrix, MAX_DENSE_QUBITS};
pub use fci::{fci_ground_state, fci_ground_state_with, fci_integrals, FciMethod, FciResult};
pub use mp2::{mp2_total_energy, Mp2Energy};
