//! Graph states with per-vertex local Clifford frames.
//!
//! A state is represented as (graph, frame, ownership): the physical state
//! equals the product of per-vertex frame operators applied to the canonical
//! graph state of `graph` (|+>^n followed by one CZ per edge). Single-qubit
//! Pauli measurements are evaluated purely combinatorially:
//!
//! - Z at a: delete a.
//! - Y at a: locally complement at a, then delete a.
//! - X at a: complement at a designated neighbor b0, complement at a,
//!   delete a, complement at b0 again.
//!
//! Each rule leaves behind single-qubit correction operators on surviving
//! vertices; these compose into the frames rather than being applied
//! eagerly. The frame also mediates between the physical measurement axis a
//! node actually sees and the graph-basis axis the rules operate in: axes
//! are conjugated through the measured vertex's frame, and the recorded
//! sign relates the two outcomes. Every rule in this module is validated
//! case-by-case against the tableau and dense oracles in the test suite.

use crate::clifford::Clifford;
use crate::graph::{Graph, GraphError, VertexId, VertexLabel};
use crate::oracle::{DenseState, StabilizerTableau};
use crate::pauli::{Pauli, SignedPauli};
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Network identity of the party holding a qubit.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub enum NodeId {
    Orchestrator(u32),
    Client(u32),
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeId::Orchestrator(i) => write!(f, "o{i}"),
            NodeId::Client(i) => write!(f, "c{i}"),
        }
    }
}

impl Serialize for NodeId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl std::str::FromStr for NodeId {
    type Err = String;

    fn from_str(s: &str) -> Result<NodeId, String> {
        let (kind, num) = s.split_at(if s.is_empty() { 0 } else { 1 });
        let id: u32 = num.parse().map_err(|_| format!("bad node id {s:?}"))?;
        match kind {
            "o" => Ok(NodeId::Orchestrator(id)),
            "c" => Ok(NodeId::Client(id)),
            _ => Err(format!("bad node id {s:?}")),
        }
    }
}

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<NodeId, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Measurement axis as seen in a request or a record.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    pub fn from_pauli(p: Pauli) -> Axis {
        match p {
            Pauli::X => Axis::X,
            Pauli::Y => Axis::Y,
            Pauli::Z => Axis::Z,
            Pauli::I => panic!("identity is not a measurement axis"),
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Axis::X => write!(f, "X"),
            Axis::Y => write!(f, "Y"),
            Axis::Z => write!(f, "Z"),
        }
    }
}

/// A requested physical measurement basis. `b0` optionally overrides the
/// designated neighbor consumed by the X rule; it is consulted only when the
/// effective graph-basis rule is the X rule (default: lowest-id neighbor).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PauliBasis {
    pub axis: Axis,
    pub b0: Option<VertexId>,
}

impl PauliBasis {
    pub fn x() -> PauliBasis {
        PauliBasis { axis: Axis::X, b0: None }
    }
    pub fn x_with(b0: VertexId) -> PauliBasis {
        PauliBasis { axis: Axis::X, b0: Some(b0) }
    }
    pub fn y() -> PauliBasis {
        PauliBasis { axis: Axis::Y, b0: None }
    }
    pub fn z() -> PauliBasis {
        PauliBasis { axis: Axis::Z, b0: None }
    }
}

/// How a measurement outcome is chosen.
pub enum OutcomeMode<'a> {
    /// Draw from the Born distribution with the given generator.
    Sample(&'a mut dyn RngCore),
    /// Insist on this outcome (+1/-1); errs if its probability is zero.
    /// Refers to the physical outcome for [`GraphState::measure_physical`]
    /// and to the graph-basis outcome for
    /// [`GraphState::measure_graph_axis`].
    Force(i8),
}

fn serialize_op<S: serde::Serializer>(op: &Clifford, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&op.name())
}

fn deserialize_op<'de, D: serde::Deserializer<'de>>(d: D) -> Result<Clifford, D::Error> {
    let name = String::deserialize(d)?;
    Clifford::from_name(&name)
        .ok_or_else(|| serde::de::Error::custom(format!("unknown operator name {name:?}")))
}

/// One correction operator owed to a surviving vertex.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Correction {
    pub vertex: VertexId,
    #[serde(serialize_with = "serialize_op", deserialize_with = "deserialize_op")]
    pub op: Clifford,
}

/// Everything observable about one measurement event.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct MeasurementRecord {
    /// Vertex that was measured (and removed).
    pub vertex: VertexId,
    /// Party that performed the measurement.
    pub owner: NodeId,
    /// Axis measured on the physical qubit.
    pub axis: Axis,
    /// Physical outcome, +1 or -1.
    pub outcome: i8,
    /// Axis the graph rule ran in (physical axis conjugated through the
    /// vertex frame).
    pub graph_axis: Axis,
    /// Outcome in the graph basis; differs from `outcome` by the frame sign.
    pub graph_outcome: i8,
    /// Designated neighbor consumed by the X rule, when it fired.
    pub b0: Option<VertexId>,
    /// Frame updates owed to surviving vertices, in application order.
    pub corrections: Vec<Correction>,
    /// Wall-clock tick stamped by the network runtime (0 when standalone).
    pub tick: u64,
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum StateError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("b0 {0} is not a neighbor of {1}")]
    InvalidB0(VertexId, VertexId),
    #[error("forced outcome has probability zero")]
    ForcedImpossible,
    #[error("no owner given for vertex {0}")]
    MissingOwnership(VertexId),
    #[error("vertices {0} and {1} are not connected")]
    Disconnected(VertexId, VertexId),
    #[error("need two distinct vertices, got {0} twice")]
    SameVertex(VertexId),
    #[error("vertex {0} carries a non-identity frame")]
    FrameNotIdentity(VertexId),
}

/// A graph state plus bookkeeping: per-vertex Clifford frames and the map
/// from vertices to the network parties holding them.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphState {
    graph: Graph,
    frames: BTreeMap<VertexId, Clifford>,
    ownership: BTreeMap<VertexId, NodeId>,
}

impl GraphState {
    /// Wraps a graph as a canonical graph state (identity frames).
    /// `ownership` must cover every vertex; extra entries are dropped.
    pub fn from_graph(graph: Graph, ownership: &BTreeMap<VertexId, NodeId>) -> Result<GraphState, StateError> {
        let mut frames = BTreeMap::new();
        let mut owners = BTreeMap::new();
        for v in graph.vertices() {
            let owner = ownership.get(&v).ok_or(StateError::MissingOwnership(v))?;
            frames.insert(v, Clifford::IDENTITY);
            owners.insert(v, *owner);
        }
        Ok(GraphState { graph, frames, ownership: owners })
    }

    /// Test/demo convenience: every vertex held by the same party.
    pub fn from_graph_uniform(graph: Graph, owner: NodeId) -> GraphState {
        let ownership = graph.vertices().map(|v| (v, owner)).collect();
        GraphState::from_graph(graph, &ownership).expect("uniform ownership covers all vertices")
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn frame(&self, v: VertexId) -> Result<Clifford, StateError> {
        self.frames.get(&v).copied().ok_or_else(|| GraphError::UnknownVertex(v).into())
    }

    pub fn owner(&self, v: VertexId) -> Result<NodeId, StateError> {
        self.ownership.get(&v).copied().ok_or_else(|| GraphError::UnknownVertex(v).into())
    }

    pub fn ownership(&self) -> &BTreeMap<VertexId, NodeId> {
        &self.ownership
    }

    /// Returns a copy with the frame at `v` replaced (test scaffolding and
    /// explicit local operations).
    pub fn with_frame(&self, v: VertexId, op: Clifford) -> Result<GraphState, StateError> {
        if !self.graph.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v).into());
        }
        let mut st = self.clone();
        st.frames.insert(v, op);
        Ok(st)
    }

    /// Applies a local Clifford on top of the existing frame at `v`.
    pub fn apply_local(&self, v: VertexId, op: Clifford) -> Result<GraphState, StateError> {
        let current = self.frame(v)?;
        self.with_frame(v, op.compose(current))
    }

    /// Measures the physical qubit at `a` along `basis.axis`.
    ///
    /// The requested axis is conjugated through the vertex frame into a
    /// graph-basis axis, the matching graph rule runs, and corrections fold
    /// into the surviving frames. `OutcomeMode::Force` fixes the physical
    /// outcome.
    pub fn measure_physical(
        &self,
        a: VertexId,
        basis: PauliBasis,
        mode: OutcomeMode<'_>,
    ) -> Result<(GraphState, MeasurementRecord), StateError> {
        let u = self.frame(a)?;
        // Measuring P on U|G> is measuring U^dag P U on |G>.
        let eff = u.inverse().conjugate(SignedPauli::plus(basis.axis.pauli()));
        let graph_axis = Axis::from_pauli(eff.pauli);
        let sign = eff.sign();
        let deterministic = self.graph.degree(a)? == 0 && graph_axis == Axis::X;
        let graph_outcome: i8 = match mode {
            OutcomeMode::Force(phys) => {
                assert!(phys == 1 || phys == -1, "outcome must be +1 or -1");
                let g = sign * phys;
                if deterministic && g == -1 {
                    return Err(StateError::ForcedImpossible);
                }
                g
            }
            OutcomeMode::Sample(rng) => {
                if deterministic {
                    1
                } else if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
        let (state, b0, corrections) = self.apply_rule(a, graph_axis, basis.b0, graph_outcome)?;
        let record = MeasurementRecord {
            vertex: a,
            owner: self.owner(a)?,
            axis: basis.axis,
            outcome: sign * graph_outcome,
            graph_axis,
            graph_outcome,
            b0,
            corrections,
            tick: 0,
        };
        Ok((state, record))
    }

    /// Measures in the graph basis: the protocol chooses the rule it wants
    /// (axis on the canonical graph state), and the physical node measures
    /// whatever frame-conjugated axis realizes it. `OutcomeMode::Force`
    /// fixes the graph-basis outcome.
    pub fn measure_graph_axis(
        &self,
        a: VertexId,
        axis: Axis,
        b0: Option<VertexId>,
        mode: OutcomeMode<'_>,
    ) -> Result<(GraphState, MeasurementRecord), StateError> {
        let u = self.frame(a)?;
        // The physical observable L with U^dag L U = sign * axis is
        // L = U axis U^dag folded to a plain letter.
        let img = u.conjugate(SignedPauli::plus(axis.pauli()));
        let phys_axis = Axis::from_pauli(img.pauli);
        let sign = img.sign();
        let deterministic = self.graph.degree(a)? == 0 && axis == Axis::X;
        let graph_outcome: i8 = match mode {
            OutcomeMode::Force(g) => {
                assert!(g == 1 || g == -1, "outcome must be +1 or -1");
                if deterministic && g == -1 {
                    return Err(StateError::ForcedImpossible);
                }
                g
            }
            OutcomeMode::Sample(rng) => {
                if deterministic {
                    1
                } else if rng.gen::<bool>() {
                    1
                } else {
                    -1
                }
            }
        };
        let (state, used_b0, corrections) = self.apply_rule(a, axis, b0, graph_outcome)?;
        let record = MeasurementRecord {
            vertex: a,
            owner: self.owner(a)?,
            axis: phys_axis,
            outcome: sign * graph_outcome,
            graph_axis: axis,
            graph_outcome,
            b0: used_b0,
            corrections,
            tick: 0,
        };
        Ok((state, record))
    }

    /// Runs the graph rewrite rule for a graph-basis measurement and folds
    /// the correction operators into the surviving frames. Returns the new
    /// state, the designated neighbor actually used (X rule only), and the
    /// corrections in application order.
    fn apply_rule(
        &self,
        a: VertexId,
        axis: Axis,
        b0: Option<VertexId>,
        outcome: i8,
    ) -> Result<(GraphState, Option<VertexId>, Vec<Correction>), StateError> {
        let nbrs: Vec<VertexId> = self.graph.neighbors(a)?.iter().copied().collect();
        let mut used_b0 = None;
        let mut corrections: Vec<Correction> = Vec::new();
        let graph = match axis {
            Axis::Z => {
                if outcome < 0 {
                    for &b in &nbrs {
                        corrections.push(Correction { vertex: b, op: Clifford::Z });
                    }
                }
                self.graph.delete_vertex(a)?
            }
            Axis::Y => {
                let op = if outcome > 0 { Clifford::S } else { Clifford::S_DAG };
                for &b in &nbrs {
                    corrections.push(Correction { vertex: b, op });
                }
                self.graph.local_complement(a)?.delete_vertex(a)?
            }
            Axis::X => {
                if nbrs.is_empty() {
                    debug_assert_eq!(outcome, 1, "isolated X has a deterministic + outcome");
                    self.graph.delete_vertex(a)?
                } else {
                    let pick = match b0 {
                        Some(b) => {
                            if !self.graph.has_edge(a, b) {
                                return Err(StateError::InvalidB0(b, a));
                            }
                            b
                        }
                        None => nbrs[0],
                    };
                    used_b0 = Some(pick);
                    let nb0: BTreeSet<VertexId> = self.graph.neighbors(pick)?.clone();
                    let na: BTreeSet<VertexId> = nbrs.iter().copied().collect();
                    if outcome > 0 {
                        corrections.push(Correction { vertex: pick, op: Clifford::SQRT_Y });
                        for &b in na.difference(&nb0) {
                            if b != pick {
                                corrections.push(Correction { vertex: b, op: Clifford::Z });
                            }
                        }
                    } else {
                        corrections.push(Correction { vertex: pick, op: Clifford::SQRT_Y_DAG });
                        for &b in nb0.difference(&na) {
                            if b != a {
                                corrections.push(Correction { vertex: b, op: Clifford::Z });
                            }
                        }
                    }
                    self.graph
                        .local_complement(pick)?
                        .local_complement(a)?
                        .delete_vertex(a)?
                        .local_complement(pick)?
                }
            }
        };
        let mut frames = self.frames.clone();
        frames.remove(&a);
        for c in &corrections {
            let old = frames[&c.vertex];
            // The correction acts on the fresh graph state before the
            // pre-existing frame: new = old ∘ correction.
            frames.insert(c.vertex, old.compose(c.op));
        }
        let mut ownership = self.ownership.clone();
        ownership.remove(&a);
        Ok((GraphState { graph, frames, ownership }, used_b0, corrections))
    }

    /// Isolates the pair (u, v) as a direct edge: every other vertex of
    /// their connected component is cut away with Z measurements, then the
    /// interior of the lexicographically least shortest u-v path is
    /// contracted with Y measurements. Already-isolated pairs are a no-op.
    pub fn extract_bell(
        &self,
        u: VertexId,
        v: VertexId,
        rng: &mut dyn RngCore,
    ) -> Result<(GraphState, Vec<MeasurementRecord>), StateError> {
        if u == v {
            return Err(StateError::SameVertex(u));
        }
        let path = self
            .graph
            .shortest_path(u, v)?
            .ok_or(StateError::Disconnected(u, v))?;
        let component = self.graph.component(u)?;
        let on_path: BTreeSet<VertexId> = path.iter().copied().collect();
        let mut records = Vec::new();
        let mut state = self.clone();
        if component.len() == 2 && self.graph.has_edge(u, v) {
            return Ok((state, records));
        }
        for &w in component.difference(&on_path) {
            let (next, rec) = state.measure_graph_axis(w, Axis::Z, None, OutcomeMode::Sample(rng))?;
            state = next;
            records.push(rec);
        }
        for &w in &path[1..path.len() - 1] {
            let (next, rec) = state.measure_graph_axis(w, Axis::Y, None, OutcomeMode::Sample(rng))?;
            state = next;
            records.push(rec);
        }
        debug_assert!(state.graph.has_edge(u, v));
        debug_assert_eq!(state.graph.component(u).unwrap().len(), 2);
        Ok((state, records))
    }

    /// Fuses this state's vertex `a` with `other`'s vertex `b` into one
    /// vertex with the union neighborhood. Both fused vertices must carry
    /// identity frames (a merge is a physical operation on the canonical
    /// graph states). `other`'s vertices are relabeled into a fresh id
    /// range; returns the relabeling map.
    pub fn merge(
        &self,
        a: VertexId,
        other: &GraphState,
        b: VertexId,
    ) -> Result<(GraphState, BTreeMap<VertexId, VertexId>), StateError> {
        if !self.frame(a)?.is_identity() {
            return Err(StateError::FrameNotIdentity(a));
        }
        if !other.frame(b)?.is_identity() {
            return Err(StateError::FrameNotIdentity(b));
        }
        let (graph, map) = self.graph.merge(a, &other.graph, b)?;
        let mut frames = self.frames.clone();
        let mut ownership = self.ownership.clone();
        for (old, new) in &map {
            if *old == b {
                continue;
            }
            frames.insert(*new, other.frames[old]);
            ownership.insert(*new, other.ownership[old]);
        }
        Ok((GraphState { graph, frames, ownership }, map))
    }

    /// Stable vertex -> qubit-index map (ascending vertex id).
    pub fn qubit_index(&self) -> BTreeMap<VertexId, usize> {
        self.graph.vertices().enumerate().map(|(i, v)| (v, i)).collect()
    }

    /// Expands to a stabilizer tableau (qubits ordered by `qubit_index`).
    pub fn to_tableau(&self) -> StabilizerTableau {
        let idx = self.qubit_index();
        let mut t = StabilizerTableau::new(idx.len());
        for &q in idx.values() {
            t.apply_h(q).expect("index in range");
        }
        for (a, b) in self.graph.edges() {
            t.apply_cz(idx[&a], idx[&b]).expect("index in range");
        }
        for (v, &q) in &idx {
            let f = self.frames[v];
            if !f.is_identity() {
                t.apply_clifford1(q, &f).expect("index in range");
            }
        }
        t
    }

    /// Expands to a dense state vector (needs <= 12 vertices).
    pub fn to_dense(&self) -> DenseState {
        let idx = self.qubit_index();
        let mut d = DenseState::plus(idx.len());
        for (a, b) in self.graph.edges() {
            d.apply_cz(idx[&a], idx[&b]);
        }
        for (v, &q) in &idx {
            let f = self.frames[v];
            if !f.is_identity() {
                d.apply_1q(q, f.matrix());
            }
        }
        d
    }
}

/// All connected labeled graphs on `n >= 1` vertices (ids 0..n-1), used by
/// exhaustive rule-vs-oracle sweeps. Count grows fast: 1, 1, 4, 38, 728,
/// 26704 for n = 1..6.
pub fn connected_graphs(n: usize) -> Vec<Graph> {
    assert!((1..=6).contains(&n), "exhaustive enumeration is bounded to n <= 6");
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..(1 << pairs.len()) {
        let mut g = Graph::new();
        for _ in 0..n {
            g.add_vertex(None);
        }
        for (k, &(i, j)) in pairs.iter().enumerate() {
            if mask >> k & 1 == 1 {
                g.add_edge(VertexId(i), VertexId(j)).unwrap();
            }
        }
        if g.is_connected() {
            out.push(g);
        }
    }
    out
}

/// Builds a star resource held the way a network hands it out: center at
/// the orchestrator, leaves at distinct clients.
pub fn star_state(leaves: usize, orchestrator: u32) -> GraphState {
    let graph = Graph::star(leaves).expect("leaves >= 1");
    let mut ownership = BTreeMap::new();
    for v in graph.vertices() {
        let owner = match graph.label(v) {
            Some(VertexLabel::Orchestrator) => NodeId::Orchestrator(orchestrator),
            Some(VertexLabel::Client(_)) => NodeId::Client(v.0),
            None => unreachable!("star labels every vertex"),
        };
        ownership.insert(v, owner);
    }
    GraphState::from_graph(graph, &ownership).expect("ownership covers all vertices")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{OracleError, PauliString};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn v(n: u32) -> VertexId {
        VertexId(n)
    }

    fn uniform(g: Graph) -> GraphState {
        GraphState::from_graph_uniform(g, NodeId::Orchestrator(0))
    }

    /// Replays a rule-engine measurement on the tableau oracle and checks
    /// the post-measurement states agree exactly (canonical groups) and, if
    /// small enough, densely (fidelity 1).
    fn check_against_oracles(before: &GraphState, after: &GraphState, rec: &MeasurementRecord) {
        let idx = before.qubit_index();
        let q = idx[&rec.vertex];
        let mut oracle = before.to_tableau();
        let prob = oracle
            .measure_pauli_force(q, rec.axis.pauli(), rec.outcome)
            .unwrap_or_else(|e| panic!("oracle rejects recorded outcome at {}: {e}", rec.vertex));
        assert!(prob == 0.5 || prob == 1.0);
        let survivors: BTreeSet<usize> = idx
            .iter()
            .filter(|(vid, _)| **vid != rec.vertex)
            .map(|(_, &i)| i)
            .collect();
        let oracle_group = oracle
            .stab_group()
            .keep_qubits(&survivors)
            .expect("measured qubit factors out");
        let rule_group = after.to_tableau().stab_group();
        assert_eq!(
            oracle_group, rule_group,
            "rule and oracle disagree after {:?} at {} outcome {}",
            rec.axis, rec.vertex, rec.outcome
        );
        if idx.len() <= 8 {
            let rebuilt = DenseState::from_stab_group(&oracle_group).unwrap();
            let fid = rebuilt.fidelity(&after.to_dense());
            assert!(fid > 1.0 - 1e-9, "dense fidelity {fid} after {:?} at {}", rec.axis, rec.vertex);
        }
    }

    #[test]
    fn from_graph_validates_ownership() {
        let g = Graph::path(2).unwrap();
        let mut owners = BTreeMap::new();
        owners.insert(v(0), NodeId::Client(0));
        assert_eq!(
            GraphState::from_graph(g.clone(), &owners).unwrap_err(),
            StateError::MissingOwnership(v(1))
        );
        owners.insert(v(1), NodeId::Client(1));
        let st = GraphState::from_graph(g, &owners).unwrap();
        assert!(st.frame(v(0)).unwrap().is_identity());
        assert_eq!(st.owner(v(1)).unwrap(), NodeId::Client(1));
    }

    #[test]
    fn single_edge_stabilizers() {
        let st = uniform(Graph::path(2).unwrap());
        assert_eq!(st.to_tableau().stab_group().to_strings(), vec!["+XZ", "+ZX"]);
    }

    #[test]
    fn empty_graph_is_plus_product() {
        let mut g = Graph::new();
        for _ in 0..3 {
            g.add_vertex(None);
        }
        let st = uniform(g);
        assert_eq!(st.to_tableau().stab_group().to_strings(), vec!["+XII", "+IXI", "+IIX"]);
    }

    #[test]
    fn star_is_ghz_up_to_local_cliffords() {
        let st = star_state(3, 0);
        let mut d = st.to_dense();
        // Hadamard every leaf; the result should be the 4-qubit GHZ state.
        for q in 1..4 {
            d.apply_1q(q, Clifford::H.matrix());
        }
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let amps = {
            let mut a = vec![Complex64::new(0.0, 0.0); 16];
            a[0] = h;
            a[15] = h;
            a
        };
        let overlap: Complex64 = d
            .amplitudes()
            .iter()
            .zip(&amps)
            .map(|(x, y)| x.conj() * y)
            .sum();
        assert!(overlap.norm_sqr() > 1.0 - 1e-9);
    }

    #[test]
    fn z_rule_deletes_vertex() {
        let st = uniform(Graph::path(3).unwrap());
        let (after, rec) = st.measure_physical(v(1), PauliBasis::z(), OutcomeMode::Force(1)).unwrap();
        assert_eq!(after.graph().vertex_count(), 2);
        assert_eq!(after.graph().edge_count(), 0);
        assert!(rec.corrections.is_empty());
        check_against_oracles(&st, &after, &rec);

        let (after_minus, rec_minus) = st.measure_physical(v(1), PauliBasis::z(), OutcomeMode::Force(-1)).unwrap();
        assert_eq!(rec_minus.corrections.len(), 2);
        check_against_oracles(&st, &after_minus, &rec_minus);
    }

    #[test]
    fn y_rule_contracts_path() {
        let st = uniform(Graph::path(3).unwrap());
        for outcome in [1, -1] {
            let (after, rec) = st.measure_physical(v(1), PauliBasis::y(), OutcomeMode::Force(outcome)).unwrap();
            assert_eq!(after.graph().edges(), vec![(v(0), v(2))]);
            check_against_oracles(&st, &after, &rec);
        }
    }

    #[test]
    fn x_rule_on_isolated_vertex() {
        let mut g = Graph::path(2).unwrap();
        let iso = g.add_vertex(None);
        let st = uniform(g);
        let (after, rec) = st.measure_physical(iso, PauliBasis::x(), OutcomeMode::Force(1)).unwrap();
        assert_eq!(after.graph().vertex_count(), 2);
        assert_eq!(rec.outcome, 1);
        check_against_oracles(&st, &after, &rec);
        // The minus branch has probability zero.
        assert_eq!(
            st.measure_physical(iso, PauliBasis::x(), OutcomeMode::Force(-1)).unwrap_err(),
            StateError::ForcedImpossible
        );
        // With an H frame the physical X turns into graph Z: now random.
        let framed = st.with_frame(iso, Clifford::H).unwrap();
        let (_, rec2) = framed.measure_physical(iso, PauliBasis::x(), OutcomeMode::Force(-1)).unwrap();
        assert_eq!(rec2.graph_axis, Axis::Z);
        assert_eq!(rec2.outcome, -1);
    }

    #[test]
    fn invalid_b0_is_rejected() {
        let st = uniform(Graph::path(3).unwrap());
        let err = st
            .measure_physical(v(0), PauliBasis::x_with(v(2)), OutcomeMode::Force(1))
            .unwrap_err();
        assert_eq!(err, StateError::InvalidB0(v(2), v(0)));
    }

    #[test]
    fn exhaustive_small_graphs_match_oracles() {
        // Every connected graph on up to 4 vertices, every vertex, every
        // graph axis, both outcomes, identity frames. The full n <= 6 sweep
        // lives in the acceptance suite.
        for n in 1..=4 {
            for g in connected_graphs(n) {
                let st = uniform(g);
                for a in st.graph().vertices().collect::<Vec<_>>() {
                    for axis in [Axis::X, Axis::Y, Axis::Z] {
                        for outcome in [1i8, -1] {
                            match st.measure_graph_axis(a, axis, None, OutcomeMode::Force(outcome)) {
                                Ok((after, rec)) => check_against_oracles(&st, &after, &rec),
                                Err(StateError::ForcedImpossible) => {
                                    assert_eq!((axis, outcome), (Axis::X, -1));
                                    assert_eq!(st.graph().degree(a).unwrap(), 0);
                                }
                                Err(e) => panic!("unexpected error {e}"),
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn random_frames_still_match_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.gen_range(2..=5);
            let graphs = connected_graphs(n);
            let g = graphs[rng.gen_range(0..graphs.len())].clone();
            let mut st = uniform(g);
            for vid in st.graph().vertices().collect::<Vec<_>>() {
                let c = Clifford::from_index(rng.gen_range(0..24)).unwrap();
                st = st.with_frame(vid, c).unwrap();
            }
            let verts: Vec<VertexId> = st.graph().vertices().collect();
            let a = verts[rng.gen_range(0..verts.len())];
            let axis = [Axis::X, Axis::Y, Axis::Z][rng.gen_range(0..3)];
            let (after, rec) = st
                .measure_physical(a, PauliBasis { axis, b0: None }, OutcomeMode::Sample(&mut rng))
                .unwrap();
            check_against_oracles(&st, &after, &rec);
        }
    }

    #[test]
    fn b0_choice_does_not_change_the_state() {
        let st = uniform(Graph::cycle(4).unwrap());
        let mut groups = Vec::new();
        for b0 in [v(1), v(3)] {
            let (after, _) = st
                .measure_physical(v(0), PauliBasis::x_with(b0), OutcomeMode::Force(1))
                .unwrap();
            groups.push(after.to_tableau().stab_group());
        }
        assert_eq!(groups[0], groups[1]);
    }

    #[test]
    fn measurement_sequences_match_oracle() {
        // Random walks: measure until two vertices remain, replaying every
        // step on a single oracle tableau that keeps all qubits.
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..60 {
            let n = rng.gen_range(3..=6);
            let graphs = connected_graphs(n);
            let g = graphs[rng.gen_range(0..graphs.len())].clone();
            let initial = uniform(g);
            let idx = initial.qubit_index();
            let mut st = initial.clone();
            let mut oracle = initial.to_tableau();
            let mut gone: BTreeSet<usize> = BTreeSet::new();
            while st.graph().vertex_count() > 2 {
                let verts: Vec<VertexId> = st.graph().vertices().collect();
                let a = verts[rng.gen_range(0..verts.len())];
                let axis = [Axis::X, Axis::Y, Axis::Z][rng.gen_range(0..3)];
                let (next, rec) = st
                    .measure_physical(a, PauliBasis { axis, b0: None }, OutcomeMode::Sample(&mut rng))
                    .unwrap();
                let q = idx[&a];
                oracle.measure_pauli_force(q, rec.axis.pauli(), rec.outcome).unwrap();
                gone.insert(q);
                let survivors: BTreeSet<usize> =
                    (0..idx.len()).filter(|i| !gone.contains(i)).collect();
                assert_eq!(
                    oracle.stab_group().keep_qubits(&survivors).unwrap(),
                    next.to_tableau().stab_group()
                );
                st = next;
            }
        }
    }

    #[test]
    fn outcome_statistics_are_fair_when_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let st = uniform(Graph::path(2).unwrap());
        let mut plus = 0;
        let trials = 2000;
        for _ in 0..trials {
            let (_, rec) = st.measure_physical(v(0), PauliBasis::z(), OutcomeMode::Sample(&mut rng)).unwrap();
            if rec.outcome == 1 {
                plus += 1;
            }
        }
        assert!((800..=1200).contains(&plus), "plus count {plus}");
    }

    #[test]
    fn extract_bell_on_already_isolated_pair() {
        let st = uniform(Graph::path(2).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (after, recs) = st.extract_bell(v(0), v(1), &mut rng).unwrap();
        assert!(recs.is_empty());
        assert_eq!(after.graph().edges(), st.graph().edges());
    }

    #[test]
    fn extract_bell_contracts_paths_and_cuts_branches() {
        // Path u-m-v: one Y contraction.
        let st = uniform(Graph::path(3).unwrap());
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (after, recs) = st.extract_bell(v(0), v(2), &mut rng).unwrap();
        assert_eq!(recs.len(), 1);
        assert_eq!(recs[0].graph_axis, Axis::Y);
        assert!(after.graph().has_edge(v(0), v(2)));
        let d = after.to_dense();
        let idx = after.qubit_index();
        assert!(d.max_entangled_fidelity(idx[&v(0)], idx[&v(2)]) > 1.0 - 1e-9);

        // Six-vertex bus, extract interior pair (1, 4): the two bus ends
        // are cut with Z, the two interior hops contract with Y.
        let bus = uniform(Graph::path(6).unwrap());
        let (after, recs) = bus.extract_bell(v(1), v(4), &mut rng).unwrap();
        let z_count = recs.iter().filter(|r| r.graph_axis == Axis::Z).count();
        let y_count = recs.iter().filter(|r| r.graph_axis == Axis::Y).count();
        assert_eq!((z_count, y_count), (2, 2));
        assert!(after.graph().has_edge(v(1), v(4)));
        assert_eq!(after.graph().component(v(1)).unwrap().len(), 2);
        let d = after.to_dense();
        let idx = after.qubit_index();
        assert!(d.max_entangled_fidelity(idx[&v(1)], idx[&v(4)]) > 1.0 - 1e-9);
    }

    #[test]
    fn extract_bell_needs_connectivity() {
        let mut g = Graph::path(2).unwrap();
        let w = g.add_vertex(None);
        let st = uniform(g);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(
            st.extract_bell(v(0), w, &mut rng).unwrap_err(),
            StateError::Disconnected(v(0), w)
        );
        assert_eq!(st.extract_bell(v(0), v(0), &mut rng).unwrap_err(), StateError::SameVertex(v(0)));
    }

    #[test]
    fn merge_requires_identity_frames() {
        let a = uniform(Graph::path(2).unwrap());
        let b = uniform(Graph::path(2).unwrap());
        let framed = a.with_frame(v(1), Clifford::H).unwrap();
        assert_eq!(framed.merge(v(1), &b, v(0)).unwrap_err(), StateError::FrameNotIdentity(v(1)));
        let (merged, map) = a.merge(v(1), &b, v(0)).unwrap();
        assert_eq!(merged.graph().vertex_count(), 3);
        assert_eq!(map[&v(0)], v(1));
        // Ownership and frames carried over for the relabeled vertex.
        assert_eq!(merged.owner(map[&v(1)]).unwrap(), NodeId::Orchestrator(0));
    }

    #[test]
    fn traced_records_serialize_compactly() {
        let st = uniform(Graph::path(3).unwrap());
        let (_, rec) = st.measure_physical(v(1), PauliBasis::z(), OutcomeMode::Force(-1)).unwrap();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"axis\":\"Z\""));
        assert!(json.contains("\"op\":\"z\""));
        assert!(json.contains("\"owner\":\"o0\""));
    }

    #[test]
    fn forced_impossible_matches_oracle_probability_zero() {
        let mut g = Graph::new();
        g.add_vertex(None);
        let st = uniform(g);
        let t = st.to_tableau();
        let mut t2 = t.clone();
        assert_eq!(
            t2.measure_force(&PauliString::single(0, Pauli::X), -1),
            Err(OracleError::ForcedImpossible)
        );
        assert_eq!(
            st.measure_physical(v(0), PauliBasis::x(), OutcomeMode::Force(-1)).unwrap_err(),
            StateError::ForcedImpossible
        );
    }

    #[test]
    fn connected_graph_counts() {
        assert_eq!(connected_graphs(1).len(), 1);
        assert_eq!(connected_graphs(2).len(), 1);
        assert_eq!(connected_graphs(3).len(), 4);
        assert_eq!(connected_graphs(4).len(), 38);
    }
}
