//! Reference simulators used to cross-check the graph-rule engine.
//!
//! Two independent backends:
//! - [`tableau`]: a stabilizer tableau with destabilizer rows (exact, fast,
//!   n <= 32), supporting general Pauli-string measurements with sampled or
//!   forced outcomes, canonical stabilizer-group extraction, and factoring
//!   out disentangled qubits.
//! - [`dense`]: a full state-vector simulator (n <= 12) for amplitude-level
//!   checks: fidelities, measurement probabilities, reduced density
//!   matrices, and maximal-entanglement overlap of qubit pairs.
//!
//! The two backends share no simulation code, so agreement between them is
//! meaningful evidence of correctness.

pub mod dense;
pub mod tableau;

pub use dense::DenseState;
pub use tableau::{Determinism, OracleError, PauliString, StabGroup, StabilizerTableau};
