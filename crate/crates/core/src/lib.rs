//! Core library for simulating entanglement distribution over local-area
//! quantum networks built from graph states.
//!
//! Module stack, bottom up:
//! - [`pauli`], [`clifford`]: single-qubit Pauli algebra and the 24-element
//!   single-qubit Clifford group as signed conjugation tables.
//! - [`graph`]: labeled simple graphs with local complementation, vertex
//!   deletion, and vertex merge.
//! - [`oracle`]: two independent reference simulators — a stabilizer tableau
//!   and a dense state-vector backend — used to cross-check the fast
//!   graph-rule engine.
//! - [`graph_state`]: graph states with per-vertex Clifford frames; Pauli
//!   measurements evaluated by graph rewrite rules.
//! - [`qlan`]: a local-area network runtime — resource distribution,
//!   topology shaping, request serving, timing and fidelity accounting.
//! - [`transduction`]: microwave-to-optical conversion links — direct
//!   quantum transduction versus heralded entanglement generation.
//! - [`inter_qlan`]: multi-network resource states and recipe search for
//!   inter-network connectivity prototypes.

pub mod clifford;
pub mod graph;
pub mod graph_state;
pub mod inter_qlan;
pub mod oracle;
pub mod pauli;
pub mod qlan;
pub mod transduction;

pub use graph::{Graph, GraphError, VertexId, VertexLabel};
pub use graph_state::{Axis, GraphState, MeasurementRecord, NodeId, OutcomeMode, PauliBasis, StateError};
pub use oracle::{DenseState, PauliString, StabGroup, StabilizerTableau};
pub use qlan::{ArtificialTopology, QlanConfig, QlanError, QlanSim, ServeOutcome, ServedLink, Timing, TrafficRequest};
pub use transduction::{DetectorKind, LinkBudget, TransducerParams, TransductionError};
pub use inter_qlan::{FeasibilityReport, InterQlanError, MultiQlanNetwork, OperationLog, PrototypeKind, RecipeStep, ResourceKind};
