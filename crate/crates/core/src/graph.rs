//! Labeled simple graphs with the three state-engineering operations:
//! local complementation, vertex deletion, and vertex merge.
//!
//! Vertices are dense small integer ids plus an optional role label kept in
//! a separate table. All operations are pure: they take `&self` and return
//! fresh graphs. Equality is exact labeled equality (same ids, same edges,
//! same labels); isomorphism exists only as a brute-force test helper.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use thiserror::Error;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Serialize, Deserialize)]
pub struct VertexId(pub u32);

impl std::fmt::Display for VertexId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Role tag attached to a vertex at creation time.
#[derive(Clone, PartialEq, Eq, Debug, Hash, Serialize, Deserialize)]
pub enum VertexLabel {
    Orchestrator,
    Client(String),
}

impl std::fmt::Display for VertexLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            VertexLabel::Orchestrator => write!(f, "orchestrator"),
            VertexLabel::Client(name) => write!(f, "client:{name}"),
        }
    }
}

#[derive(Error, Debug, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex id {0} already present")]
    IdCollision(VertexId),
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("invalid edge: {0}")]
    InvalidEdge(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Graph {
    adj: BTreeMap<VertexId, BTreeSet<VertexId>>,
    labels: BTreeMap<VertexId, VertexLabel>,
}

impl Graph {
    pub fn new() -> Graph {
        Graph::default()
    }

    /// Adds a vertex with the next free id (max existing + 1).
    pub fn add_vertex(&mut self, label: Option<VertexLabel>) -> VertexId {
        let id = VertexId(self.adj.keys().next_back().map_or(0, |v| v.0 + 1));
        self.adj.insert(id, BTreeSet::new());
        if let Some(l) = label {
            self.labels.insert(id, l);
        }
        id
    }

    pub fn add_vertex_with_id(
        &mut self,
        id: VertexId,
        label: Option<VertexLabel>,
    ) -> Result<(), GraphError> {
        if self.adj.contains_key(&id) {
            return Err(GraphError::IdCollision(id));
        }
        self.adj.insert(id, BTreeSet::new());
        if let Some(l) = label {
            self.labels.insert(id, l);
        }
        Ok(())
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::InvalidEdge(format!("self-loop at {u}")));
        }
        if !self.adj.contains_key(&u) {
            return Err(GraphError::UnknownVertex(u));
        }
        if !self.adj.contains_key(&v) {
            return Err(GraphError::UnknownVertex(v));
        }
        self.adj.get_mut(&u).unwrap().insert(v);
        self.adj.get_mut(&v).unwrap().insert(u);
        Ok(())
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.adj.contains_key(&v)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.adj.keys().copied()
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.values().map(|n| n.len()).sum::<usize>() / 2
    }

    /// Edges as sorted (low, high) pairs, ascending.
    pub fn edges(&self) -> Vec<(VertexId, VertexId)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (&u, nbrs) in &self.adj {
            for &v in nbrs.range(u..) {
                if v > u {
                    out.push((u, v));
                }
            }
        }
        out
    }

    pub fn neighbors(&self, v: VertexId) -> Result<&BTreeSet<VertexId>, GraphError> {
        self.adj.get(&v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        Ok(self.neighbors(v)?.len())
    }

    pub fn label(&self, v: VertexId) -> Option<&VertexLabel> {
        self.labels.get(&v)
    }

    pub fn set_label(&mut self, v: VertexId, label: VertexLabel) -> Result<(), GraphError> {
        if !self.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        self.labels.insert(v, label);
        Ok(())
    }

    pub fn labels(&self) -> &BTreeMap<VertexId, VertexLabel> {
        &self.labels
    }

    /// Local complementation at `a`: toggles every edge among N(a).
    pub fn local_complement(&self, a: VertexId) -> Result<Graph, GraphError> {
        let nbrs: Vec<VertexId> = self.neighbors(a)?.iter().copied().collect();
        let mut g = self.clone();
        for (i, &u) in nbrs.iter().enumerate() {
            for &v in &nbrs[i + 1..] {
                if g.has_edge(u, v) {
                    g.adj.get_mut(&u).unwrap().remove(&v);
                    g.adj.get_mut(&v).unwrap().remove(&u);
                } else {
                    g.adj.get_mut(&u).unwrap().insert(v);
                    g.adj.get_mut(&v).unwrap().insert(u);
                }
            }
        }
        Ok(g)
    }

    /// Removes `a` and every edge incident to it.
    pub fn delete_vertex(&self, a: VertexId) -> Result<Graph, GraphError> {
        if !self.has_vertex(a) {
            return Err(GraphError::UnknownVertex(a));
        }
        let mut g = self.clone();
        let nbrs = g.adj.remove(&a).unwrap();
        for v in nbrs {
            g.adj.get_mut(&v).unwrap().remove(&a);
        }
        g.labels.remove(&a);
        Ok(g)
    }

    /// Merges vertex `a` of self with vertex `b` of `other` into a single
    /// vertex with the union neighborhood. `other`'s vertices are relabeled
    /// into a fresh id range; the merged vertex keeps `a`'s id and label.
    /// Returns the merged graph and the relabeling map for `other`.
    pub fn merge(
        &self,
        a: VertexId,
        other: &Graph,
        b: VertexId,
    ) -> Result<(Graph, BTreeMap<VertexId, VertexId>), GraphError> {
        if !self.has_vertex(a) {
            return Err(GraphError::UnknownVertex(a));
        }
        if !other.has_vertex(b) {
            return Err(GraphError::UnknownVertex(b));
        }
        let base = self.adj.keys().next_back().map_or(0, |v| v.0 + 1);
        let mut map = BTreeMap::new();
        for (i, v) in other.vertices().enumerate() {
            map.insert(v, VertexId(base + i as u32));
        }
        let mut g = self.clone();
        for (v, nv) in &map {
            if *v == b {
                continue;
            }
            g.adj.insert(*nv, BTreeSet::new());
            if let Some(l) = other.label(*v) {
                g.labels.insert(*nv, l.clone());
            }
        }
        for (u, v) in other.edges() {
            let (mu, mv) = (map[&u], map[&v]);
            let mu = if u == b { a } else { mu };
            let mv = if v == b { a } else { mv };
            g.adj.get_mut(&mu).unwrap().insert(mv);
            g.adj.get_mut(&mv).unwrap().insert(mu);
        }
        let mut map_out = map;
        map_out.insert(b, a);
        Ok((g, map_out))
    }

    /// Merge that keeps `other`'s ids as-is; fails on any overlap.
    pub fn merge_strict(&self, a: VertexId, other: &Graph, b: VertexId) -> Result<Graph, GraphError> {
        if !self.has_vertex(a) {
            return Err(GraphError::UnknownVertex(a));
        }
        if !other.has_vertex(b) {
            return Err(GraphError::UnknownVertex(b));
        }
        for v in other.vertices() {
            if v != b && self.has_vertex(v) {
                return Err(GraphError::IdCollision(v));
            }
        }
        let mut g = self.clone();
        for v in other.vertices() {
            if v == b {
                continue;
            }
            g.adj.insert(v, BTreeSet::new());
            if let Some(l) = other.label(v) {
                g.labels.insert(v, l.clone());
            }
        }
        for (u, v) in other.edges() {
            let mu = if u == b { a } else { u };
            let mv = if v == b { a } else { v };
            g.adj.get_mut(&mu).unwrap().insert(mv);
            g.adj.get_mut(&mv).unwrap().insert(mu);
        }
        Ok(g)
    }

    /// Path v0 - v1 - ... - v(n-1). Vertices are unlabeled.
    pub fn path(n: usize) -> Result<Graph, GraphError> {
        if n == 0 {
            return Err(GraphError::InvalidSize("path requires n >= 1".into()));
        }
        let mut g = Graph::new();
        let ids: Vec<VertexId> = (0..n).map(|_| g.add_vertex(None)).collect();
        for w in ids.windows(2) {
            g.add_edge(w[0], w[1])?;
        }
        Ok(g)
    }

    /// Star with an orchestrator-held center (id 0) and `leaves` clients
    /// labeled c1..cN.
    pub fn star(leaves: usize) -> Result<Graph, GraphError> {
        if leaves == 0 {
            return Err(GraphError::InvalidSize("star requires >= 1 leaf".into()));
        }
        let mut g = Graph::new();
        let center = g.add_vertex(Some(VertexLabel::Orchestrator));
        for i in 0..leaves {
            let leaf = g.add_vertex(Some(VertexLabel::Client(format!("c{}", i + 1))));
            g.add_edge(center, leaf)?;
        }
        Ok(g)
    }

    /// Cycle v0 - v1 - ... - v(n-1) - v0. Requires n >= 3.
    pub fn cycle(n: usize) -> Result<Graph, GraphError> {
        if n < 3 {
            return Err(GraphError::InvalidSize("cycle requires n >= 3".into()));
        }
        let mut g = Graph::path(n)?;
        g.add_edge(VertexId(0), VertexId(n as u32 - 1))?;
        Ok(g)
    }

    /// BFS hop count; None when disconnected.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Result<Option<u32>, GraphError> {
        if !self.has_vertex(u) {
            return Err(GraphError::UnknownVertex(u));
        }
        if !self.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        Ok(self.shortest_path(u, v)?.map(|p| p.len() as u32 - 1))
    }

    /// Lexicographically-least shortest path from u to v (BFS expanding
    /// neighbors in ascending id order). None when disconnected.
    pub fn shortest_path(&self, u: VertexId, v: VertexId) -> Result<Option<Vec<VertexId>>, GraphError> {
        if !self.has_vertex(u) {
            return Err(GraphError::UnknownVertex(u));
        }
        if !self.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        if u == v {
            return Ok(Some(vec![u]));
        }
        let mut prev: BTreeMap<VertexId, VertexId> = BTreeMap::new();
        let mut queue = VecDeque::from([u]);
        let mut seen = BTreeSet::from([u]);
        while let Some(cur) = queue.pop_front() {
            for &nb in self.adj[&cur].iter() {
                if seen.insert(nb) {
                    prev.insert(nb, cur);
                    if nb == v {
                        let mut path = vec![v];
                        let mut at = v;
                        while at != u {
                            at = prev[&at];
                            path.push(at);
                        }
                        path.reverse();
                        return Ok(Some(path));
                    }
                    queue.push_back(nb);
                }
            }
        }
        Ok(None)
    }

    /// Connected component containing `v`.
    pub fn component(&self, v: VertexId) -> Result<BTreeSet<VertexId>, GraphError> {
        if !self.has_vertex(v) {
            return Err(GraphError::UnknownVertex(v));
        }
        let mut seen = BTreeSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(cur) = queue.pop_front() {
            for &nb in self.adj[&cur].iter() {
                if seen.insert(nb) {
                    queue.push_back(nb);
                }
            }
        }
        Ok(seen)
    }

    pub fn is_connected(&self) -> bool {
        match self.adj.keys().next() {
            None => true,
            Some(&v) => self.component(v).unwrap().len() == self.adj.len(),
        }
    }

    /// True iff the graph is a simple path covering all vertices.
    /// Single vertices and single edges count; cycles do not.
    pub fn is_path(&self) -> bool {
        if self.adj.is_empty() || !self.is_connected() {
            return false;
        }
        if self.adj.len() == 1 {
            return true;
        }
        let mut deg1 = 0;
        for nbrs in self.adj.values() {
            match nbrs.len() {
                1 => deg1 += 1,
                2 => {}
                _ => return false,
            }
        }
        deg1 == 2
    }

    /// Vertices of a path graph in end-to-end order, starting from the
    /// lower-id endpoint. None if not a path.
    pub fn path_order(&self) -> Option<Vec<VertexId>> {
        if !self.is_path() {
            return None;
        }
        if self.adj.len() == 1 {
            return Some(vec![*self.adj.keys().next().unwrap()]);
        }
        let start = self
            .adj
            .iter()
            .filter(|(_, n)| n.len() == 1)
            .map(|(&v, _)| v)
            .min()
            .unwrap();
        let mut order = vec![start];
        let mut prev: Option<VertexId> = None;
        let mut cur = start;
        loop {
            let next = self.adj[&cur].iter().copied().find(|&n| Some(n) != prev);
            match next {
                Some(n) => {
                    order.push(n);
                    prev = Some(cur);
                    cur = n;
                    if self.adj[&cur].len() == 1 {
                        break;
                    }
                }
                None => break,
            }
        }
        Some(order)
    }

    /// Induced subgraph on the given vertex subset (labels carried over).
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Graph {
        let mut g = Graph::new();
        for &v in keep {
            if self.has_vertex(v) {
                g.adj.insert(v, BTreeSet::new());
                if let Some(l) = self.label(v) {
                    g.labels.insert(v, l.clone());
                }
            }
        }
        for (u, v) in self.edges() {
            if keep.contains(&u) && keep.contains(&v) {
                g.adj.get_mut(&u).unwrap().insert(v);
                g.adj.get_mut(&v).unwrap().insert(u);
            }
        }
        g
    }

    /// Brute-force isomorphism test. Test helper only: O(n!) over n <= 8.
    /// Ignores labels; compares structure.
    pub fn is_isomorphic(&self, other: &Graph) -> bool {
        if self.vertex_count() != other.vertex_count() || self.edge_count() != other.edge_count() {
            return false;
        }
        let n = self.vertex_count();
        assert!(n <= 8, "isomorphism helper is bounded to n <= 8");
        let va: Vec<VertexId> = self.vertices().collect();
        let vb: Vec<VertexId> = other.vertices().collect();
        let mut perm: Vec<usize> = (0..n).collect();
        // Heap's algorithm, iterative.
        let mut c = vec![0usize; n];
        let check = |perm: &[usize]| -> bool {
            self.edges()
                .iter()
                .all(|(u, v)| {
                    let iu = va.iter().position(|x| x == u).unwrap();
                    let iv = va.iter().position(|x| x == v).unwrap();
                    other.has_edge(vb[perm[iu]], vb[perm[iv]])
                })
        };
        if check(&perm) {
            return true;
        }
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                if check(&perm) {
                    return true;
                }
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        false
    }

    /// Plain text edge list: `# v <id> [label]` declarations (isolated
    /// vertices included) followed by `u v` edge lines. Deterministic.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for v in self.vertices() {
            match self.label(v) {
                Some(l) => out.push_str(&format!("# v {} {}\n", v.0, l)),
                None => out.push_str(&format!("# v {}\n", v.0)),
            }
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("{} {}\n", u.0, v.0));
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Graph, GraphError> {
        let mut g = Graph::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("# v ") {
                let mut parts = rest.splitn(2, ' ');
                let id: u32 = parts
                    .next()
                    .unwrap()
                    .parse()
                    .map_err(|_| GraphError::Parse { line: ln + 1, message: "bad vertex id".into() })?;
                let label = match parts.next() {
                    None => None,
                    Some("orchestrator") => Some(VertexLabel::Orchestrator),
                    Some(s) => match s.strip_prefix("client:") {
                        Some(name) => Some(VertexLabel::Client(name.to_string())),
                        None => {
                            return Err(GraphError::Parse {
                                line: ln + 1,
                                message: format!("unknown label {s:?}"),
                            })
                        }
                    },
                };
                g.add_vertex_with_id(VertexId(id), label)?;
                continue;
            }
            if line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let (u, v) = (parts.next(), parts.next());
            match (u, v, parts.next()) {
                (Some(u), Some(v), None) => {
                    let pu: u32 = u
                        .parse()
                        .map_err(|_| GraphError::Parse { line: ln + 1, message: "bad endpoint".into() })?;
                    let pv: u32 = v
                        .parse()
                        .map_err(|_| GraphError::Parse { line: ln + 1, message: "bad endpoint".into() })?;
                    for id in [pu, pv] {
                        if !g.has_vertex(VertexId(id)) {
                            g.add_vertex_with_id(VertexId(id), None)?;
                        }
                    }
                    g.add_edge(VertexId(pu), VertexId(pv))?;
                }
                _ => {
                    return Err(GraphError::Parse {
                        line: ln + 1,
                        message: "expected `u v`".into(),
                    })
                }
            }
        }
        Ok(g)
    }

    /// Graphviz DOT. Orchestrator-held vertices render as boxes.
    pub fn to_dot(&self, name: &str) -> String {
        let mut out = format!("graph {} {{\n", sanitize_dot_id(name));
        for v in self.vertices() {
            let attrs = match self.label(v) {
                Some(VertexLabel::Orchestrator) => format!(" [label=\"o:{}\", shape=box]", v),
                Some(VertexLabel::Client(c)) => format!(" [label=\"{}\"]", escape_dot(c)),
                None => String::new(),
            };
            out.push_str(&format!("  {}{};\n", v, attrs));
        }
        for (u, v) in self.edges() {
            out.push_str(&format!("  {} -- {};\n", u, v));
        }
        out.push_str("}\n");
        out
    }
}

fn sanitize_dot_id(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if cleaned.is_empty() || cleaned.chars().next().unwrap().is_ascii_digit() {
        format!("g_{cleaned}")
    } else {
        cleaned
    }
}

fn escape_dot(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: u32) -> VertexId {
        VertexId(n)
    }

    #[test]
    fn triangle_complement_gives_path() {
        let g = Graph::cycle(3).unwrap();
        let t = g.local_complement(v(0)).unwrap();
        // Edges among N(0) = {1, 2} toggle: 1-2 disappears.
        assert_eq!(t.edges(), vec![(v(0), v(1)), (v(0), v(2))]);
        // Involution.
        assert_eq!(t.local_complement(v(0)).unwrap(), g);
    }

    #[test]
    fn complement_at_isolated_vertex_is_identity() {
        let mut g = Graph::path(2).unwrap();
        let iso = g.add_vertex(None);
        let t = g.local_complement(iso).unwrap();
        assert_eq!(t, g);
    }

    #[test]
    fn deletion() {
        let g = Graph::path(3).unwrap();
        let d = g.delete_vertex(v(1)).unwrap();
        assert_eq!(d.edge_count(), 0);
        assert_eq!(d.vertex_count(), 2);

        let single = Graph::path(1).unwrap();
        let empty = single.delete_vertex(v(0)).unwrap();
        assert_eq!(empty.vertex_count(), 0);

        let star = Graph::star(4).unwrap();
        let leaves = star.delete_vertex(v(0)).unwrap();
        assert_eq!(leaves.vertex_count(), 4);
        assert_eq!(leaves.edge_count(), 0);

        assert_eq!(g.delete_vertex(v(9)), Err(GraphError::UnknownVertex(v(9))));
    }

    #[test]
    fn merge_two_paths_at_endpoints_gives_three_path() {
        // x - a  merged with  b - y  at (a, b) gives x - m - y.
        let g1 = Graph::path(2).unwrap(); // 0 - 1, a = 1
        let g2 = Graph::path(2).unwrap(); // 0 - 1, b = 0
        let (m, map) = g1.merge(v(1), &g2, v(0)).unwrap();
        assert_eq!(m.vertex_count(), 3);
        assert_eq!(map[&v(0)], v(1));
        let y = map[&v(1)];
        assert_eq!(m.edges(), vec![(v(0), v(1)), (v(1), y)]);
        assert!(m.is_path());
    }

    #[test]
    fn merge_two_isolated_vertices() {
        let mut g1 = Graph::new();
        let a = g1.add_vertex(None);
        let mut g2 = Graph::new();
        let b = g2.add_vertex(None);
        let (m, _) = g1.merge(a, &g2, b).unwrap();
        assert_eq!(m.vertex_count(), 1);
        assert_eq!(m.edge_count(), 0);
    }

    #[test]
    fn merge_midpoints_gives_four_leaf_star() {
        let g1 = Graph::path(3).unwrap();
        let g2 = Graph::path(3).unwrap();
        let (m, map) = g1.merge(v(1), &g2, v(1)).unwrap();
        assert_eq!(m.vertex_count(), 5);
        assert_eq!(m.degree(v(1)).unwrap(), 4);
        for leaf in [v(0), v(2), map[&v(0)], map[&v(2)]] {
            assert_eq!(m.degree(leaf).unwrap(), 1);
        }
        // Vertex count invariant: n1 + n2 - 1.
        assert_eq!(m.vertex_count(), g1.vertex_count() + g2.vertex_count() - 1);
    }

    #[test]
    fn merge_strict_detects_collisions() {
        let g1 = Graph::path(2).unwrap();
        let g2 = Graph::path(2).unwrap();
        assert_eq!(g1.merge_strict(v(1), &g2, v(0)), Err(GraphError::IdCollision(v(1))));
    }

    #[test]
    fn builders() {
        assert_eq!(Graph::path(2).unwrap().edges(), vec![(v(0), v(1))]);
        let star = Graph::star(6).unwrap();
        assert_eq!(star.degree(v(0)).unwrap(), 6);
        assert_eq!(star.label(v(0)), Some(&VertexLabel::Orchestrator));
        assert_eq!(star.label(v(3)), Some(&VertexLabel::Client("c3".into())));
        assert_eq!(Graph::cycle(3).unwrap().edge_count(), 3);
        assert!(matches!(Graph::path(0), Err(GraphError::InvalidSize(_))));
        assert!(matches!(Graph::cycle(2), Err(GraphError::InvalidSize(_))));
    }

    #[test]
    fn distances() {
        let g = Graph::path(5).unwrap();
        assert_eq!(g.distance(v(0), v(4)).unwrap(), Some(4));
        assert_eq!(g.distance(v(2), v(2)).unwrap(), Some(0));
        let mut h = g.clone();
        let iso = h.add_vertex(None);
        assert_eq!(h.distance(v(0), iso).unwrap(), None);
    }

    #[test]
    fn shortest_path_prefers_lexicographic() {
        // Two equal-length routes 0-1-3 and 0-2-3; BFS must pick via 1.
        let mut g = Graph::new();
        for _ in 0..4 {
            g.add_vertex(None);
        }
        g.add_edge(v(0), v(1)).unwrap();
        g.add_edge(v(0), v(2)).unwrap();
        g.add_edge(v(1), v(3)).unwrap();
        g.add_edge(v(2), v(3)).unwrap();
        assert_eq!(g.shortest_path(v(0), v(3)).unwrap().unwrap(), vec![v(0), v(1), v(3)]);
    }

    #[test]
    fn path_order_walks_end_to_end() {
        let g = Graph::path(4).unwrap();
        assert_eq!(g.path_order().unwrap(), vec![v(0), v(1), v(2), v(3)]);
        assert!(Graph::cycle(4).unwrap().path_order().is_none());
    }

    #[test]
    fn edge_list_round_trip() {
        let mut g = Graph::star(3).unwrap();
        g.add_vertex(None); // isolated, unlabeled
        let text = g.to_edge_list();
        let back = Graph::from_edge_list(&text).unwrap();
        assert_eq!(back, g);
    }

    #[test]
    fn dot_output_is_deterministic_and_complete() {
        let g = Graph::star(3).unwrap();
        let dot = g.to_dot("star3");
        assert!(dot.starts_with("graph star3 {"));
        assert_eq!(dot.matches(" -- ").count(), 3);
        assert!(dot.contains("shape=box"));
        assert_eq!(dot, g.to_dot("star3"));
    }

    #[test]
    fn isomorphism_helper() {
        let p3a = Graph::path(3).unwrap();
        let mut p3b = Graph::new();
        for _ in 0..3 {
            p3b.add_vertex(None);
        }
        // Same shape, different id layout: 1 - 0 - 2.
        p3b.add_edge(v(1), v(0)).unwrap();
        p3b.add_edge(v(0), v(2)).unwrap();
        assert!(p3a.is_isomorphic(&p3b));
        assert!(!p3a.is_isomorphic(&Graph::cycle(3).unwrap()));
    }

    #[test]
    fn operations_do_not_mutate_inputs() {
        let g = Graph::cycle(4).unwrap();
        let snapshot = g.clone();
        let _ = g.local_complement(v(0)).unwrap();
        let _ = g.delete_vertex(v(1)).unwrap();
        let _ = g.merge(v(0), &snapshot, v(2)).unwrap();
        assert_eq!(g, snapshot);
    }
}
