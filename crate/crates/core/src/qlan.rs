//! Local-area quantum network runtime: one orchestrator, star-wired
//! clients, graph-state resources, and artificial-topology engineering.
//!
//! The orchestrator is the only party that runs topology programs. Every
//! topology operation in this module (bus conversion, dense-resource
//! merging, proximity reduction) measures orchestrator-held qubits
//! exclusively; clients receive nothing but classical correction messages,
//! which the engine folds into their local frames. Request serving
//! (Bell-pair delivery, disconnects) may additionally instruct clients to
//! measure their own qubits; the trace records who executed what.
//!
//! Timing model: all measurements of one operation are batched into a
//! single LOCC round (one classical broadcast); a round costs the classical
//! round-trip latency. Delivered pairs decay toward the maximally mixed
//! floor while coordination is in flight: F(t) = 1/4 + (F0 - 1/4) e^(-t/T).

use crate::graph::{Graph, VertexId, VertexLabel};
use crate::graph_state::{
    Axis, GraphState, MeasurementRecord, NodeId, OutcomeMode, StateError,
};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum QlanError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("invalid timing: {0}")]
    InvalidTiming(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("retention plan mismatch: {0}")]
    PlanMismatch(String),
    #[error("resource state is not a linear chain")]
    NotLinear,
    #[error("orchestrator-held vertex {0} is not an interior vertex between clients")]
    NotAlternating(VertexId),
    #[error("merge plan touches non-orchestrator vertex {0}")]
    NonLocalMerge(VertexId),
    #[error("interior vertex {0} on the connecting path is not orchestrator-held")]
    InteriorNotOrchestratorHeld(VertexId),
    #[error("unknown client {0}")]
    UnknownClient(u32),
    #[error("request cannot be served: {0}")]
    Unservable(String),
}

/// Classical-latency and decoherence budget of one QLAN.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Timing {
    /// Classical round-trip latency per LOCC round, microseconds.
    pub latency_us: f64,
    /// Memory coherence time, microseconds.
    pub coherence_us: f64,
    /// Fidelity of a freshly delivered pair (before any waiting).
    pub base_fidelity: f64,
}

impl Timing {
    pub fn new(latency_us: f64, coherence_us: f64, base_fidelity: f64) -> Result<Timing, QlanError> {
        if !(latency_us > 0.0) {
            return Err(QlanError::InvalidTiming(format!("latency must be positive, got {latency_us}")));
        }
        if !(coherence_us > 0.0) {
            return Err(QlanError::InvalidTiming(format!("coherence time must be positive, got {coherence_us}")));
        }
        if !(base_fidelity > 0.25 && base_fidelity <= 1.0) {
            return Err(QlanError::InvalidTiming(format!(
                "base fidelity must lie in (0.25, 1], got {base_fidelity}"
            )));
        }
        Ok(Timing { latency_us, coherence_us, base_fidelity })
    }
}

/// Fidelity after `elapsed_us` of coordination delay: exponential decay
/// toward the maximally mixed two-qubit floor of 1/4.
pub fn werner_fidelity(base: f64, elapsed_us: f64, coherence_us: f64) -> f64 {
    0.25 + (base - 0.25) * (-elapsed_us / coherence_us).exp()
}

/// Static description of one QLAN: who exists and the timing budget. The
/// physical topology is always a star of orchestrator-client links.
#[derive(Clone, Debug)]
pub struct QlanConfig {
    pub orchestrator: u32,
    pub clients: Vec<u32>,
    pub timing: Timing,
}

impl QlanConfig {
    pub fn new(orchestrator: u32, clients: Vec<u32>, timing: Timing) -> Result<QlanConfig, QlanError> {
        if clients.is_empty() {
            return Err(QlanError::InvalidConfig("at least one client required".into()));
        }
        let distinct: BTreeSet<u32> = clients.iter().copied().collect();
        if distinct.len() != clients.len() {
            return Err(QlanError::InvalidConfig("client ids must be distinct".into()));
        }
        Ok(QlanConfig { orchestrator, clients, timing })
    }

    pub fn orchestrator_node(&self) -> NodeId {
        NodeId::Orchestrator(self.orchestrator)
    }

    pub fn has_client(&self, c: u32) -> bool {
        self.clients.contains(&c)
    }

    /// The physical wiring: a star of fiber links centered at the
    /// orchestrator (vertex 0), one leaf per client in declaration order.
    pub fn physical_topology(&self) -> Graph {
        let mut g = Graph::new();
        let center = g.add_vertex(Some(VertexLabel::Orchestrator));
        for &c in &self.clients {
            let leaf = g.add_vertex(Some(VertexLabel::Client(format!("c{c}"))));
            g.add_edge(center, leaf).expect("fresh vertices");
        }
        g
    }
}

/// The entanglement topology the clients effectively see: the resource
/// graph induced on client-held vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ArtificialTopology {
    graph: Graph,
}

impl ArtificialTopology {
    pub fn of(state: &GraphState) -> ArtificialTopology {
        let clients: BTreeSet<VertexId> = state
            .ownership()
            .iter()
            .filter(|(_, owner)| matches!(owner, NodeId::Client(_)))
            .map(|(&v, _)| v)
            .collect();
        ArtificialTopology { graph: state.graph().induced(&clients) }
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }
}

/// Builds the initial linear resource |L> on `plan.len()` qubits: vertex i
/// of the chain goes to `plan[i]`. Distributed qubits must name distinct,
/// configured clients; chains longer than two qubits must retain at least
/// one orchestrator qubit (the centralized policy has no other way to
/// reshape them later).
pub fn distribute_linear(cfg: &QlanConfig, plan: &[NodeId]) -> Result<GraphState, QlanError> {
    if plan.is_empty() {
        return Err(QlanError::PlanMismatch("retention plan is empty".into()));
    }
    let mut seen_clients = BTreeSet::new();
    let mut retained = 0usize;
    for holder in plan {
        match holder {
            NodeId::Orchestrator(o) => {
                if *o != cfg.orchestrator {
                    return Err(QlanError::PlanMismatch(format!("unknown orchestrator o{o}")));
                }
                retained += 1;
            }
            NodeId::Client(c) => {
                if !cfg.has_client(*c) {
                    return Err(QlanError::UnknownClient(*c));
                }
                if !seen_clients.insert(*c) {
                    return Err(QlanError::PlanMismatch(format!(
                        "client c{c} appears twice; distributed qubits must go to distinct clients"
                    )));
                }
            }
        }
    }
    if plan.len() > 2 && retained == 0 {
        return Err(QlanError::PlanMismatch(
            "a chain longer than two qubits with zero retained qubits cannot be reshaped \
             under the centralized policy"
                .into(),
        ));
    }
    let mut graph = Graph::new();
    let mut ownership = BTreeMap::new();
    let mut prev: Option<VertexId> = None;
    for holder in plan {
        let label = match holder {
            NodeId::Orchestrator(_) => VertexLabel::Orchestrator,
            NodeId::Client(c) => VertexLabel::Client(format!("c{c}")),
        };
        let v = graph.add_vertex(Some(label));
        ownership.insert(v, *holder);
        if let Some(p) = prev {
            graph.add_edge(p, v).expect("fresh vertices");
        }
        prev = Some(v);
    }
    Ok(GraphState::from_graph(graph, &ownership)?)
}

fn is_orchestrator(state: &GraphState, v: VertexId) -> bool {
    matches!(state.owner(v), Ok(NodeId::Orchestrator(_)))
}

/// Collapses a linear resource into a client bus: every orchestrator-held
/// vertex is Y-measured (ascending id, one LOCC round), contracting the
/// chain to a path over the clients in their chain order.
pub fn star_to_bus(
    state: &GraphState,
    rng: &mut dyn RngCore,
) -> Result<(GraphState, ArtificialTopology, Vec<MeasurementRecord>), QlanError> {
    let order = state.graph().path_order().ok_or(QlanError::NotLinear)?;
    for &v in &order {
        if is_orchestrator(state, v) {
            let nbrs = state.graph().neighbors(v).map_err(StateError::from)?;
            let interior_between_clients =
                nbrs.len() == 2 && nbrs.iter().all(|&b| !is_orchestrator(state, b));
            if !interior_between_clients {
                return Err(QlanError::NotAlternating(v));
            }
        }
    }
    let mut st = state.clone();
    let mut records = Vec::new();
    let targets: Vec<VertexId> = order.into_iter().filter(|&v| is_orchestrator(state, v)).collect();
    for v in targets {
        assert!(is_orchestrator(&st, v), "topology ops only measure orchestrator qubits");
        let (next, rec) = st.measure_graph_axis(v, Axis::Y, None, OutcomeMode::Sample(rng))?;
        st = next;
        records.push(rec);
    }
    let topo = ArtificialTopology::of(&st);
    Ok((st, topo, records))
}

/// One fusion in a dense-resource build: two orchestrator-held vertices,
/// addressed as (chain index, vertex id within that chain's own id space),
/// are merged into a single vertex with the union neighborhood.
#[derive(Clone, Copy, Debug)]
pub struct MergePoint {
    pub left: (usize, VertexId),
    pub right: (usize, VertexId),
}

/// Merges a set of linear resources into one dense resource. Chains join
/// the accumulated state the first time the plan references them; every
/// merge pair must involve at least one already-placed endpoint, and all
/// chains must end up placed. Only orchestrator-held vertices may be fused.
/// Returns the merged state plus the map from (chain, original vertex) to
/// the vertex id in the merged state.
pub fn build_dense(
    chains: &[GraphState],
    plan: &[MergePoint],
) -> Result<(GraphState, ArtificialTopology, BTreeMap<(usize, VertexId), VertexId>), QlanError> {
    if chains.is_empty() {
        return Err(QlanError::PlanMismatch("no chains given".into()));
    }
    let mut state = chains[0].clone();
    let mut placed: BTreeSet<usize> = [0].into();
    let mut id_map: BTreeMap<(usize, VertexId), VertexId> =
        chains[0].graph().vertices().map(|v| ((0, v), v)).collect();
    for (step, mp) in plan.iter().enumerate() {
        for &(chain, v) in [&mp.left, &mp.right] {
            if chain >= chains.len() {
                return Err(QlanError::PlanMismatch(format!("merge step {step} names chain {chain}, which does not exist")));
            }
            if !chains[chain].graph().has_vertex(v) {
                return Err(QlanError::PlanMismatch(format!("merge step {step}: chain {chain} has no vertex {v}")));
            }
            if !matches!(chains[chain].owner(v), Ok(NodeId::Orchestrator(_))) {
                return Err(QlanError::NonLocalMerge(v));
            }
        }
        let (l, r) = (mp.left, mp.right);
        let (anchor, incoming) = match (placed.contains(&l.0), placed.contains(&r.0)) {
            (true, false) => (l, r),
            (false, true) => (r, l),
            (true, true) => {
                // Both endpoints already live in the accumulated state: fuse
                // two of its vertices (this is how cycles appear).
                let a = id_map[&l];
                let b = id_map[&r];
                if a == b {
                    return Err(QlanError::PlanMismatch(format!("merge step {step} fuses a vertex with itself")));
                }
                let (next, survivor) = fuse_within(&state, a, b)?;
                state = next;
                for target in id_map.values_mut() {
                    if *target == b {
                        *target = survivor;
                    }
                }
                continue;
            }
            (false, false) => {
                return Err(QlanError::PlanMismatch(format!(
                    "merge step {step} connects two chains neither of which is placed yet; order the plan so each step touches the accumulated state"
                )));
            }
        };
        let (next, map) = state.merge(id_map[&anchor], &chains[incoming.0], incoming.1)?;
        state = next;
        for (old, new) in map {
            id_map.insert((incoming.0, old), new);
        }
        placed.insert(incoming.0);
    }
    if placed.len() != chains.len() {
        return Err(QlanError::PlanMismatch(format!(
            "{} of {} chains never referenced by the merge plan",
            chains.len() - placed.len(),
            chains.len()
        )));
    }
    let topo = ArtificialTopology::of(&state);
    Ok((state, topo, id_map))
}

/// Fuses two vertices of one state into the lower-id one (union
/// neighborhood, any direct edge dropped). Both must carry identity frames.
fn fuse_within(state: &GraphState, a: VertexId, b: VertexId) -> Result<(GraphState, VertexId), QlanError> {
    let (keep, gone) = if a < b { (a, b) } else { (b, a) };
    if !state.frame(keep)?.is_identity() {
        return Err(QlanError::State(StateError::FrameNotIdentity(keep)));
    }
    if !state.frame(gone)?.is_identity() {
        return Err(QlanError::State(StateError::FrameNotIdentity(gone)));
    }
    // Split off the `gone` vertex as its own single-vertex state and re-merge
    // it: equivalent to rebuilding the graph with the union neighborhood.
    let mut graph = state.graph().clone();
    let gone_nbrs: Vec<VertexId> = graph.neighbors(gone).map_err(StateError::from)?.iter().copied().collect();
    graph = graph.delete_vertex(gone).map_err(StateError::from)?;
    for n in gone_nbrs {
        if n != keep {
            graph.add_edge(keep, n).map_err(StateError::from)?;
        }
    }
    let ownership: BTreeMap<VertexId, NodeId> = state
        .ownership()
        .iter()
        .filter(|(v, _)| **v != gone)
        .map(|(&v, &o)| (v, o))
        .collect();
    let mut merged = GraphState::from_graph(graph, &ownership)?;
    for (v, _) in ownership.iter() {
        let f = state.frame(*v)?;
        if !f.is_identity() {
            merged = merged.with_frame(*v, f)?;
        }
    }
    Ok((merged, keep))
}

/// Rewires the resource until `u` and `v` are adjacent, measuring one
/// orchestrator-held interior vertex (graph-basis X; Y if it somehow has no
/// neighbor left) per step along the current lexicographically least
/// shortest path. Asserts strict distance decrease each step.
pub fn reduce_proximity(
    state: &GraphState,
    u: VertexId,
    v: VertexId,
    rng: &mut dyn RngCore,
) -> Result<(GraphState, Vec<MeasurementRecord>), QlanError> {
    let mut st = state.clone();
    let mut records = Vec::new();
    let mut dist = st
        .graph()
        .distance(u, v)
        .map_err(StateError::from)?
        .ok_or(StateError::Disconnected(u, v))?;
    while dist > 1 {
        let path = st
            .graph()
            .shortest_path(u, v)
            .map_err(StateError::from)?
            .expect("distance > 1 implies a path");
        let w = path[1];
        if !is_orchestrator(&st, w) {
            return Err(QlanError::InteriorNotOrchestratorHeld(w));
        }
        let axis = if st.graph().degree(w).map_err(StateError::from)? == 0 { Axis::Y } else { Axis::X };
        let (next, rec) = st.measure_graph_axis(w, axis, None, OutcomeMode::Sample(rng))?;
        st = next;
        records.push(rec);
        let new_dist = st
            .graph()
            .distance(u, v)
            .map_err(StateError::from)?
            .ok_or(StateError::Disconnected(u, v))?;
        assert!(new_dist < dist, "proximity reduction must strictly decrease distance");
        dist = new_dist;
    }
    Ok((st, records))
}

/// A workload item against the live resource.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TrafficRequest {
    /// Deliver one Bell pair between two clients.
    Pair(u32, u32),
    /// Cut every qubit held by this client out of the resource.
    Disconnect(u32),
    /// Reshape the whole resource.
    TopologyChange(TopologyPattern),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TopologyPattern {
    /// Collapse a linear resource into the client bus.
    Bus,
}

/// A delivered Bell pair with its cost accounting.
#[derive(Clone, Debug, Serialize)]
pub struct ServedLink {
    pub request_id: u64,
    pub client_a: u32,
    pub client_b: u32,
    /// LOCC rounds spent serving this request (0 when already adjacent and
    /// alone in their component).
    pub rounds: u32,
    /// Coordination time spent on this request, microseconds.
    pub elapsed_us: f64,
    /// Werner-decayed fidelity of the delivered pair.
    pub fidelity: f64,
    pub trace: Vec<MeasurementRecord>,
}

/// Result of serving one request.
#[derive(Clone, Debug)]
pub enum ServeOutcome {
    Link(ServedLink),
    /// State-changing request (disconnect, topology change) with its cost.
    Updated { request_id: u64, rounds: u32, elapsed_us: f64 },
}

/// Event-ordered QLAN simulator: owns the resource state, the clock, the
/// RNG, and the append-only measurement trace.
pub struct QlanSim {
    cfg: QlanConfig,
    state: GraphState,
    rng: ChaCha8Rng,
    clock_us: f64,
    rounds_total: u64,
    next_request: u64,
    trace: Vec<MeasurementRecord>,
}

impl QlanSim {
    pub fn new(cfg: QlanConfig, state: GraphState, seed: u64) -> QlanSim {
        QlanSim {
            cfg,
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
            clock_us: 0.0,
            rounds_total: 0,
            next_request: 0,
            trace: Vec::new(),
        }
    }

    pub fn state(&self) -> &GraphState {
        &self.state
    }

    pub fn cfg(&self) -> &QlanConfig {
        &self.cfg
    }

    pub fn clock_us(&self) -> f64 {
        self.clock_us
    }

    pub fn trace(&self) -> &[MeasurementRecord] {
        &self.trace
    }

    pub fn topology(&self) -> ArtificialTopology {
        ArtificialTopology::of(&self.state)
    }

    fn client_vertices(&self, c: u32) -> Vec<VertexId> {
        self.state
            .ownership()
            .iter()
            .filter(|(_, o)| **o == NodeId::Client(c))
            .map(|(&v, _)| v)
            .collect()
    }

    /// Stamps records with the round they were broadcast in, appends them
    /// to the trace, and advances the clock. Returns (rounds, elapsed).
    fn commit(&mut self, mut records: Vec<MeasurementRecord>) -> (u32, f64) {
        let rounds: u32 = if records.is_empty() { 0 } else { 1 };
        if rounds > 0 {
            self.rounds_total += 1;
            for r in &mut records {
                r.tick = self.rounds_total;
            }
            self.trace.append(&mut records);
        }
        let elapsed = f64::from(rounds) * self.cfg.timing.latency_us;
        self.clock_us += elapsed;
        (rounds, elapsed)
    }

    pub fn serve(&mut self, req: TrafficRequest) -> Result<ServeOutcome, QlanError> {
        let request_id = self.next_request;
        self.next_request += 1;
        match req {
            TrafficRequest::Pair(a, b) => {
                for c in [a, b] {
                    if !self.cfg.has_client(c) {
                        return Err(QlanError::UnknownClient(c));
                    }
                }
                if a == b {
                    return Err(QlanError::Unservable(format!("cannot link client c{a} with itself")));
                }
                let va = *self
                    .client_vertices(a)
                    .first()
                    .ok_or_else(|| QlanError::Unservable(format!("client c{a} holds no qubit")))?;
                let vb = *self
                    .client_vertices(b)
                    .first()
                    .ok_or_else(|| QlanError::Unservable(format!("client c{b} holds no qubit")))?;
                let (after, records) = self.state.extract_bell(va, vb, &mut self.rng).map_err(|e| match e {
                    StateError::Disconnected(x, y) => {
                        QlanError::Unservable(format!("no path between {x} and {y} in the resource"))
                    }
                    other => QlanError::State(other),
                })?;
                let trace = records.clone();
                let (rounds, elapsed) = self.commit(records);
                let fidelity = werner_fidelity(self.cfg.timing.base_fidelity, elapsed, self.cfg.timing.coherence_us);
                // Hand the pair over to the application: it leaves the
                // managed resource.
                let mut remaining = after;
                for w in [va, vb] {
                    let (next, _) = remaining.measure_graph_axis(w, Axis::Z, None, OutcomeMode::Sample(&mut self.rng))?;
                    remaining = next;
                }
                self.state = remaining;
                Ok(ServeOutcome::Link(ServedLink {
                    request_id,
                    client_a: a,
                    client_b: b,
                    rounds,
                    elapsed_us: elapsed,
                    fidelity,
                    trace,
                }))
            }
            TrafficRequest::Disconnect(c) => {
                if !self.cfg.has_client(c) {
                    return Err(QlanError::UnknownClient(c));
                }
                let mut records = Vec::new();
                let mut st = self.state.clone();
                for v in self.client_vertices(c) {
                    let (next, rec) = st.measure_graph_axis(v, Axis::Z, None, OutcomeMode::Sample(&mut self.rng))?;
                    st = next;
                    records.push(rec);
                }
                self.state = st;
                let (rounds, elapsed) = self.commit(records);
                Ok(ServeOutcome::Updated { request_id, rounds, elapsed_us: elapsed })
            }
            TrafficRequest::TopologyChange(TopologyPattern::Bus) => {
                let (st, _, records) = star_to_bus(&self.state, &mut self.rng)?;
                self.state = st;
                let (rounds, elapsed) = self.commit(records);
                Ok(ServeOutcome::Updated { request_id, rounds, elapsed_us: elapsed })
            }
        }
    }
}
