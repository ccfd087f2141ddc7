//! Multi-network layer: several orchestrators, each wired to its own
//! clients, share one entangled resource spanning networks ("n-star": every
//! orchestrator centers a star over its clients, centers linked per the
//! orchestrator mesh). Connectivity prototypes — peer-to-peer, role
//! delegation, clients hand-over, extranet — are realized by measuring
//! orchestrator-held vertices only; a breadth-first search over such
//! measurements either finds a recipe or certifies infeasibility up to a
//! depth bound.
//!
//! The search forces the +1 outcome branch everywhere: the post-measurement
//! *graph* is the same for both outcomes (only local corrections differ),
//! so a recipe found on the +1 branch reshapes the topology identically for
//! every run.

use crate::graph::{Graph, VertexId, VertexLabel};
use crate::graph_state::{Axis, GraphState, NodeId, OutcomeMode, StateError};
use crate::qlan::{ArtificialTopology, QlanConfig};
use rand::RngCore;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Error, Debug, PartialEq, Eq)]
pub enum InterQlanError {
    #[error(transparent)]
    State(#[from] StateError),
    #[error("invalid network: {0}")]
    InvalidNetwork(String),
    #[error("orchestrator mesh does not connect all networks")]
    DisconnectedMesh,
    #[error("unknown node: {0}")]
    UnknownNode(String),
    #[error("invalid prototype: {0}")]
    InvalidPrototype(String),
    #[error("no recipe within {depth} measurements ({explored} topologies explored)")]
    RecipeUnavailable { depth: usize, explored: usize },
    #[error("recipe parse error: {0}")]
    RecipeParse(String),
}

/// Several networks plus the point-to-point channels between their
/// orchestrators. Client and orchestrator ids must be globally distinct so
/// that every party has one unambiguous name.
#[derive(Clone, Debug)]
pub struct MultiQlanNetwork {
    qlans: Vec<QlanConfig>,
    mesh: Vec<(usize, usize)>,
}

impl MultiQlanNetwork {
    pub fn new(qlans: Vec<QlanConfig>, mesh: Vec<(usize, usize)>) -> Result<MultiQlanNetwork, InterQlanError> {
        if qlans.is_empty() {
            return Err(InterQlanError::InvalidNetwork("at least one network required".into()));
        }
        let mut orch_ids = BTreeSet::new();
        let mut client_ids = BTreeSet::new();
        for q in &qlans {
            if !orch_ids.insert(q.orchestrator) {
                return Err(InterQlanError::InvalidNetwork(format!(
                    "orchestrator id {} used twice",
                    q.orchestrator
                )));
            }
            for &c in &q.clients {
                if !client_ids.insert(c) {
                    return Err(InterQlanError::InvalidNetwork(format!("client id {c} used twice")));
                }
            }
        }
        for &(a, b) in &mesh {
            if a >= qlans.len() || b >= qlans.len() {
                return Err(InterQlanError::InvalidNetwork(format!(
                    "mesh edge ({a}, {b}) references a missing network"
                )));
            }
            if a == b {
                return Err(InterQlanError::InvalidNetwork(format!("mesh edge ({a}, {b}) is a self-loop")));
            }
        }
        Ok(MultiQlanNetwork { qlans, mesh })
    }

    pub fn qlans(&self) -> &[QlanConfig] {
        &self.qlans
    }

    pub fn mesh(&self) -> &[(usize, usize)] {
        &self.mesh
    }

    fn mesh_connected(&self) -> bool {
        let n = self.qlans.len();
        if n <= 1 {
            return true;
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.mesh {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(i) = queue.pop_front() {
            for &j in &adj[i] {
                if !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Which network a (globally unique) client id belongs to.
    fn qlan_of_client(&self, c: u32) -> Option<usize> {
        self.qlans.iter().position(|q| q.has_client(c))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ResourceKind {
    /// Two networks sharing a double star.
    BiStar,
    /// n networks, one star each, centers linked per the mesh.
    NStar(usize),
}

/// Builds the shared resource: per network one orchestrator-held center
/// with one client-held leaf per client, plus a center-center edge for
/// every mesh link. Vertex ids run network by network, center first.
pub fn build_resource(net: &MultiQlanNetwork, kind: ResourceKind) -> Result<GraphState, InterQlanError> {
    let expected = match kind {
        ResourceKind::BiStar => 2,
        ResourceKind::NStar(n) => n,
    };
    if expected != net.qlans.len() {
        return Err(InterQlanError::InvalidNetwork(format!(
            "resource kind wants {expected} networks, got {}",
            net.qlans.len()
        )));
    }
    if !net.mesh_connected() {
        return Err(InterQlanError::DisconnectedMesh);
    }
    let mut graph = Graph::new();
    let mut ownership = BTreeMap::new();
    let mut centers = Vec::new();
    for q in &net.qlans {
        let center = graph.add_vertex(Some(VertexLabel::Orchestrator));
        ownership.insert(center, NodeId::Orchestrator(q.orchestrator));
        centers.push(center);
        for &c in &q.clients {
            let leaf = graph.add_vertex(Some(VertexLabel::Client(format!("c{c}"))));
            ownership.insert(leaf, NodeId::Client(c));
            graph.add_edge(center, leaf).expect("fresh vertices");
        }
    }
    for &(a, b) in &net.mesh {
        graph.add_edge(centers[a], centers[b]).map_err(StateError::from)?;
    }
    Ok(GraphState::from_graph(graph, &ownership)?)
}

/// The vertex currently held by a given party, if any.
pub fn vertex_of(state: &GraphState, node: NodeId) -> Option<VertexId> {
    state.ownership().iter().find(|(_, &o)| o == node).map(|(&v, _)| v)
}

/// Inter-network connectivity prototypes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PrototypeKind {
    /// Orchestrators stay in the loop (`pure: false`, the resource itself)
    /// or disappear entirely in favor of direct cross-network client links
    /// (`pure: true`).
    PeerToPeer { pure: bool },
    /// One client takes over its orchestrator's role as star center,
    /// inheriting the center's inter-network links.
    RoleDelegation { delegate: u32 },
    /// Network `from`'s clients are re-homed onto network `to`'s
    /// orchestrator; `from`'s orchestrator drops out.
    ClientsHandover { from: usize, to: usize },
    /// Direct artificial links between the requested cross-network client
    /// pairs.
    Extranet { pairs: Vec<(u32, u32)> },
}

impl PrototypeKind {
    pub fn name(&self) -> &'static str {
        match self {
            PrototypeKind::PeerToPeer { pure: true } => "peer_to_peer_pure",
            PrototypeKind::PeerToPeer { pure: false } => "peer_to_peer_hierarchical",
            PrototypeKind::RoleDelegation { .. } => "role_delegation",
            PrototypeKind::ClientsHandover { .. } => "clients_handover",
            PrototypeKind::Extranet { .. } => "extranet",
        }
    }

    fn validate(&self, net: &MultiQlanNetwork) -> Result<(), InterQlanError> {
        match self {
            PrototypeKind::PeerToPeer { .. } => Ok(()),
            PrototypeKind::RoleDelegation { delegate } => {
                net.qlan_of_client(*delegate)
                    .map(|_| ())
                    .ok_or(InterQlanError::UnknownNode(format!("c{delegate}")))
            }
            PrototypeKind::ClientsHandover { from, to } => {
                if *from >= net.qlans.len() || *to >= net.qlans.len() {
                    return Err(InterQlanError::UnknownNode(format!("network {}", from.max(to))));
                }
                if from == to {
                    return Err(InterQlanError::InvalidPrototype("hand-over needs two distinct networks".into()));
                }
                Ok(())
            }
            PrototypeKind::Extranet { pairs } => {
                if pairs.is_empty() {
                    return Err(InterQlanError::InvalidPrototype("extranet needs at least one pair".into()));
                }
                for &(a, b) in pairs {
                    let qa = net.qlan_of_client(a).ok_or(InterQlanError::UnknownNode(format!("c{a}")))?;
                    let qb = net.qlan_of_client(b).ok_or(InterQlanError::UnknownNode(format!("c{b}")))?;
                    if qa == qb {
                        return Err(InterQlanError::InvalidPrototype(format!(
                            "extranet pair (c{a}, c{b}) lies within one network"
                        )));
                    }
                }
                Ok(())
            }
        }
    }
}

fn client_qlan_index(net: &MultiQlanNetwork, state: &GraphState) -> BTreeMap<VertexId, usize> {
    let mut out = BTreeMap::new();
    for (&v, owner) in state.ownership() {
        if let NodeId::Client(c) = owner {
            if let Some(q) = net.qlan_of_client(*c) {
                out.insert(v, q);
            }
        }
    }
    out
}

/// Does the state's full adjacency satisfy the prototype's target pattern?
/// Each arm documents the pattern it encodes.
pub fn target_satisfied(net: &MultiQlanNetwork, kind: &PrototypeKind, state: &GraphState) -> bool {
    let g = state.graph();
    let centers: Vec<Option<VertexId>> = net
        .qlans
        .iter()
        .map(|q| vertex_of(state, NodeId::Orchestrator(q.orchestrator)))
        .collect();
    let client_net = client_qlan_index(net, state);
    let has = |a: Option<VertexId>, b: Option<VertexId>| match (a, b) {
        (Some(x), Some(y)) => g.has_edge(x, y),
        _ => false,
    };
    match kind {
        // Hierarchical peer-to-peer: the n-star itself — every center holds
        // its star, centers linked exactly per the mesh, no client links.
        PrototypeKind::PeerToPeer { pure: false } => {
            if centers.iter().any(|c| c.is_none()) {
                return false;
            }
            for (qi, q) in net.qlans.iter().enumerate() {
                for &c in &q.clients {
                    if !has(centers[qi], vertex_of(state, NodeId::Client(c))) {
                        return false;
                    }
                }
            }
            let mesh: BTreeSet<(usize, usize)> =
                net.mesh.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
            for a in 0..net.qlans.len() {
                for b in a + 1..net.qlans.len() {
                    if has(centers[a], centers[b]) != mesh.contains(&(a, b)) {
                        return false;
                    }
                }
            }
            // No client participates in any non-star edge.
            g.edges().iter().all(|&(u, v)| {
                let cu = client_net.contains_key(&u);
                let cv = client_net.contains_key(&v);
                !(cu && cv)
            })
        }
        // Pure peer-to-peer: orchestrators fully consumed; clients of
        // different networks pairwise linked, none within one network.
        PrototypeKind::PeerToPeer { pure: true } => {
            if centers.iter().any(|c| c.is_some()) {
                return false;
            }
            let clients: Vec<VertexId> = client_net.keys().copied().collect();
            for (i, &u) in clients.iter().enumerate() {
                for &v in &clients[i + 1..] {
                    let cross = client_net[&u] != client_net[&v];
                    if g.has_edge(u, v) != cross {
                        return false;
                    }
                }
            }
            true
        }
        // Role delegation: the delegate replaces its own center — adjacent
        // to all of its network's other clients and to every center its
        // center was mesh-linked to; all other stars stay intact and no
        // other links exist.
        PrototypeKind::RoleDelegation { delegate } => {
            let Some(home) = net.qlan_of_client(*delegate) else {
                return false;
            };
            if centers[home].is_some() {
                return false;
            }
            let Some(d) = vertex_of(state, NodeId::Client(*delegate)) else {
                return false;
            };
            let mut want: BTreeSet<(VertexId, VertexId)> = BTreeSet::new();
            let mut edge = |a: VertexId, b: VertexId| {
                want.insert((a.min(b), a.max(b)));
            };
            for &c in &net.qlans[home].clients {
                if c != *delegate {
                    match vertex_of(state, NodeId::Client(c)) {
                        Some(v) => edge(d, v),
                        None => return false,
                    }
                }
            }
            for &(a, b) in &net.mesh {
                let (x, y) = (a.min(b), a.max(b));
                if x == home || y == home {
                    let other = if x == home { y } else { x };
                    match centers[other] {
                        Some(v) => edge(d, v),
                        None => return false,
                    }
                } else {
                    match (centers[x], centers[y]) {
                        (Some(u), Some(v)) => edge(u, v),
                        _ => return false,
                    }
                }
            }
            for (qi, q) in net.qlans.iter().enumerate() {
                if qi == home {
                    continue;
                }
                for &c in &q.clients {
                    match (centers[qi], vertex_of(state, NodeId::Client(c))) {
                        (Some(u), Some(v)) => edge(u, v),
                        _ => return false,
                    }
                }
            }
            let got: BTreeSet<(VertexId, VertexId)> = g.edges().into_iter().collect();
            got == want
        }
        // Clients hand-over: `from`'s center is gone and `to`'s center is
        // adjacent to every client of both networks; no client of `from`
        // links to a client of `to`; links among `from`'s own clients are
        // allowed (they are siblings behind the same center either way).
        PrototypeKind::ClientsHandover { from, to } => {
            if centers[*from].is_some() {
                return false;
            }
            let Some(oj) = centers[*to] else {
                return false;
            };
            for q in [from, to] {
                for &c in &net.qlans[*q].clients {
                    match vertex_of(state, NodeId::Client(c)) {
                        Some(v) => {
                            if !g.has_edge(oj, v) {
                                return false;
                            }
                        }
                        None => return false,
                    }
                }
            }
            for &(u, v) in &g.edges() {
                if let (Some(&qu), Some(&qv)) = (client_net.get(&u), client_net.get(&v)) {
                    let cross = qu != qv;
                    if cross {
                        return false;
                    }
                    if qu != *from {
                        return false;
                    }
                }
            }
            // Other networks' stars must survive untouched.
            for (qi, q) in net.qlans.iter().enumerate() {
                if qi == *from || qi == *to {
                    continue;
                }
                for &c in &q.clients {
                    if !has(centers[qi], vertex_of(state, NodeId::Client(c))) {
                        return false;
                    }
                }
            }
            true
        }
        // Extranet: every requested cross-network pair is directly linked.
        PrototypeKind::Extranet { pairs } => pairs.iter().all(|&(a, b)| {
            match (vertex_of(state, NodeId::Client(a)), vertex_of(state, NodeId::Client(b))) {
                (Some(u), Some(v)) => g.has_edge(u, v),
                _ => false,
            }
        }),
    }
}

/// One step of a reshaping recipe: a graph-basis measurement of an
/// orchestrator-held vertex (`b0` names the designated neighbor consumed by
/// the X rule).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RecipeStep {
    pub vertex: VertexId,
    pub axis: Axis,
    pub b0: Option<VertexId>,
}

impl std::fmt::Display for RecipeStep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let axis = match self.axis {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        };
        match self.b0 {
            Some(b) => write!(f, "{} {axis} {}", self.vertex, b),
            None => write!(f, "{} {axis}", self.vertex),
        }
    }
}

impl std::str::FromStr for RecipeStep {
    type Err = InterQlanError;

    fn from_str(s: &str) -> Result<RecipeStep, InterQlanError> {
        let parts: Vec<&str> = s.split_whitespace().collect();
        if parts.len() != 2 && parts.len() != 3 {
            return Err(InterQlanError::RecipeParse(format!("expected 'v<N> <axis> [v<M>]', got {s:?}")));
        }
        let vertex = parse_vertex(parts[0])?;
        let axis = match parts[1] {
            "x" | "X" => Axis::X,
            "y" | "Y" => Axis::Y,
            "z" | "Z" => Axis::Z,
            other => return Err(InterQlanError::RecipeParse(format!("unknown axis {other:?}"))),
        };
        let b0 = if parts.len() == 3 { Some(parse_vertex(parts[2])?) } else { None };
        Ok(RecipeStep { vertex, axis, b0 })
    }
}

fn parse_vertex(s: &str) -> Result<VertexId, InterQlanError> {
    s.strip_prefix('v')
        .and_then(|n| n.parse::<u32>().ok())
        .map(VertexId)
        .ok_or_else(|| InterQlanError::RecipeParse(format!("expected v<N>, got {s:?}")))
}

/// Structured outcome of a bounded recipe search.
#[derive(Clone, Debug)]
pub struct FeasibilityReport {
    pub kind: String,
    pub networks: usize,
    pub depth: usize,
    pub feasible: bool,
    pub recipe: Option<Vec<RecipeStep>>,
    pub explored: usize,
}

fn graph_key(g: &Graph) -> (Vec<u32>, Vec<(u32, u32)>) {
    (
        g.vertices().map(|v| v.0).collect(),
        g.edges().into_iter().map(|(a, b)| (a.0, b.0)).collect(),
    )
}

/// All legal moves from a state, in deterministic order: vertices
/// ascending; per vertex X (each neighbor as designated b0, ascending; no
/// b0 when isolated), then Y, then Z.
fn moves(state: &GraphState) -> Vec<RecipeStep> {
    let mut out = Vec::new();
    for v in state.graph().vertices() {
        if !matches!(state.owner(v), Ok(NodeId::Orchestrator(_))) {
            continue;
        }
        let nbrs = state.graph().neighbors(v).expect("vertex exists");
        if nbrs.is_empty() {
            out.push(RecipeStep { vertex: v, axis: Axis::X, b0: None });
        } else {
            for &b in nbrs {
                out.push(RecipeStep { vertex: v, axis: Axis::X, b0: Some(b) });
            }
        }
        out.push(RecipeStep { vertex: v, axis: Axis::Y, b0: None });
        out.push(RecipeStep { vertex: v, axis: Axis::Z, b0: None });
    }
    out
}

fn apply_step(state: &GraphState, step: RecipeStep) -> Result<GraphState, StateError> {
    let (next, _) = state.measure_graph_axis(step.vertex, step.axis, step.b0, OutcomeMode::Force(1))?;
    Ok(next)
}

/// Breadth-first search for a measurement sequence (orchestrator-held
/// vertices only) whose final adjacency satisfies the prototype's target.
/// Deterministic: states expand in first-seen order and moves in the order
/// of [`moves`], so the returned recipe is the lexicographically first
/// among the shortest. An exhausted search is a report, not an error.
pub fn search_realization(
    net: &MultiQlanNetwork,
    kind: &PrototypeKind,
    resource: ResourceKind,
    max_depth: usize,
) -> Result<FeasibilityReport, InterQlanError> {
    kind.validate(net)?;
    let start = build_resource(net, resource)?;
    let mut visited = BTreeSet::new();
    visited.insert(graph_key(start.graph()));
    let mut queue: VecDeque<(GraphState, Vec<RecipeStep>)> = VecDeque::from([(start, Vec::new())]);
    let mut explored = 0usize;
    while let Some((state, recipe)) = queue.pop_front() {
        explored += 1;
        if target_satisfied(net, kind, &state) {
            return Ok(FeasibilityReport {
                kind: kind.name().to_string(),
                networks: net.qlans.len(),
                depth: max_depth,
                feasible: true,
                recipe: Some(recipe),
                explored,
            });
        }
        if recipe.len() == max_depth {
            continue;
        }
        for step in moves(&state) {
            let next = apply_step(&state, step)?;
            if visited.insert(graph_key(next.graph())) {
                let mut r = recipe.clone();
                r.push(step);
                queue.push_back((next, r));
            }
        }
    }
    Ok(FeasibilityReport {
        kind: kind.name().to_string(),
        networks: net.qlans.len(),
        depth: max_depth,
        feasible: false,
        recipe: None,
        explored,
    })
}

/// One audited quantum operation: who acted, what they did, where, when.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LogEntry {
    pub actor: NodeId,
    pub operation: String,
    pub vertex: VertexId,
    pub round: u64,
}

/// Append-only audit trail of the quantum operations behind a realization.
#[derive(Clone, Default, Debug)]
pub struct OperationLog {
    entries: Vec<LogEntry>,
}

impl OperationLog {
    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn push(&mut self, entry: LogEntry) {
        self.entries.push(entry);
    }
}

/// True iff every logged quantum operation was executed by an orchestrator
/// on a vertex it held (producers record the holding party as the actor;
/// clients may only ever receive classical corrections).
pub fn verify_locality(log: &OperationLog) -> bool {
    log.entries
        .iter()
        .all(|e| matches!(e.actor, NodeId::Orchestrator(_)))
}

/// Finds a recipe for the prototype (bounded search), executes it on a
/// fresh resource with sampled outcomes, and returns the reshaped
/// client-side topology plus the audit log and the recipe itself.
pub fn realize_prototype(
    net: &MultiQlanNetwork,
    kind: &PrototypeKind,
    resource: ResourceKind,
    max_depth: usize,
    rng: &mut dyn RngCore,
) -> Result<(ArtificialTopology, OperationLog, Vec<RecipeStep>), InterQlanError> {
    let report = search_realization(net, kind, resource, max_depth)?;
    let recipe = report.recipe.ok_or(InterQlanError::RecipeUnavailable {
        depth: max_depth,
        explored: report.explored,
    })?;
    let mut state = build_resource(net, resource)?;
    let mut log = OperationLog::default();
    for (i, step) in recipe.iter().enumerate() {
        let owner = state.owner(step.vertex)?;
        assert!(
            matches!(owner, NodeId::Orchestrator(_)),
            "recipes only measure orchestrator-held vertices"
        );
        let (next, rec) = state.measure_graph_axis(step.vertex, step.axis, step.b0, OutcomeMode::Sample(rng))?;
        state = next;
        let op = match step.b0 {
            Some(b) => format!("measure {} (designated neighbor {b})", rec.graph_axis),
            None => format!("measure {}", rec.graph_axis),
        };
        log.push(LogEntry { actor: rec.owner, operation: op, vertex: step.vertex, round: (i + 1) as u64 });
    }
    assert!(target_satisfied(net, kind, &state), "verified recipe must reach its target");
    assert!(verify_locality(&log));
    Ok((ArtificialTopology::of(&state), log, recipe))
}
