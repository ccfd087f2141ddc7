//! Cross-checks the graph rewrite engine against the two reference
//! simulators: exhaustively (every connected graph, vertex, axis, and
//! outcome up to a size bound, against the stabilizer tableau) and on
//! random frame-decorated states (against both the tableau and the dense
//! state vector).
//!
//! Disagreements are counted, not panicked on: the audit is a diagnostic
//! that always produces a report.

use crate::error::{config, Result};
use qlansim_core::clifford::Clifford;
use qlansim_core::graph_state::connected_graphs;
use qlansim_core::oracle::dense::pauli_eigenstate;
use qlansim_core::oracle::PauliString;
use qlansim_core::{
    Axis, Graph, GraphState, NodeId, OutcomeMode, PauliBasis, StateError, VertexId,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

const DETAIL_LINE_CAP: usize = 20;

/// Outcome of one audit run.
#[derive(Debug, Clone)]
pub struct AuditReport {
    pub exhaustive_cases: usize,
    pub random_cases: usize,
    pub mismatches: usize,
    lines: Vec<String>,
}

impl AuditReport {
    /// The one-line verdict, e.g. `0 mismatches`.
    pub fn summary(&self) -> String {
        format!("{} mismatches", self.mismatches)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.lines.join("\n");
        out.push('\n');
        out.push_str(&format!(
            "TOTAL: {} cases, {}\n",
            self.exhaustive_cases + self.random_cases,
            self.summary()
        ));
        out
    }
}

struct Tally {
    cases: usize,
    mismatches: usize,
    lines: Vec<String>,
}

impl Tally {
    fn mismatch(&mut self, detail: String) {
        self.mismatches += 1;
        if self.lines.len() < DETAIL_LINE_CAP {
            self.lines.push(format!("  MISMATCH: {detail}"));
        }
    }
}

/// Replays one already-performed rule-engine measurement on the tableau
/// reference and compares the canonical stabilizer groups of the
/// survivors. Returns a description of the disagreement, if any.
fn tableau_disagreement(
    before: &GraphState,
    after: &GraphState,
    vertex: VertexId,
    phys_axis: Axis,
    phys_outcome: i8,
) -> Option<String> {
    let idx = before.qubit_index();
    let q = idx[&vertex];
    let mut oracle = before.to_tableau();
    let prob = match oracle.measure_pauli_force(q, phys_axis.pauli(), phys_outcome) {
        Ok(p) => p,
        Err(e) => {
            return Some(format!(
                "oracle rejects recorded outcome {phys_outcome} of {phys_axis:?} at {vertex}: {e}"
            ))
        }
    };
    if prob != 0.5 && prob != 1.0 {
        return Some(format!(
            "oracle probability {prob} is not 1/2 or 1 for {phys_axis:?} at {vertex}"
        ));
    }
    let survivors: BTreeSet<usize> =
        idx.iter().filter(|(v, _)| **v != vertex).map(|(_, &i)| i).collect();
    let oracle_group = match oracle.stab_group().keep_qubits(&survivors) {
        Ok(g) => g,
        Err(e) => {
            return Some(format!(
                "measured qubit does not factor out after {phys_axis:?} at {vertex}: {e}"
            ))
        }
    };
    let rule_group = after.to_tableau().stab_group();
    if oracle_group != rule_group {
        return Some(format!(
            "stabilizer groups differ after {phys_axis:?} at {vertex} outcome {phys_outcome}"
        ));
    }
    None
}

fn exhaustive_sweep(max_vertices: usize, tally: &mut Tally) {
    tally.lines.push(format!(
        "exhaustive rule-vs-tableau sweep over connected graphs, n <= {max_vertices}"
    ));
    for n in 1..=max_vertices {
        let graphs = connected_graphs(n);
        let before_cases = tally.cases;
        let before_mism = tally.mismatches;
        for g in &graphs {
            let st = GraphState::from_graph_uniform(g.clone(), NodeId::Orchestrator(0));
            for a in g.vertices() {
                for axis in [Axis::X, Axis::Y, Axis::Z] {
                    for outcome in [1i8, -1] {
                        tally.cases += 1;
                        match st.measure_graph_axis(a, axis, None, OutcomeMode::Force(outcome)) {
                            Ok((after, rec)) => {
                                // Fresh states carry identity frames, so
                                // the physical axis and outcome coincide
                                // with the graph-basis ones.
                                if let Some(d) = tableau_disagreement(
                                    &st,
                                    &after,
                                    a,
                                    rec.axis,
                                    rec.outcome,
                                ) {
                                    tally.mismatch(format!("n={n}: {d}"));
                                }
                            }
                            Err(StateError::ForcedImpossible) => {
                                // The rule engine says this branch has
                                // probability zero; the oracle must agree.
                                let idx = st.qubit_index();
                                let mut oracle = st.to_tableau();
                                if oracle
                                    .measure_pauli_force(idx[&a], axis.pauli(), outcome)
                                    .is_ok()
                                {
                                    tally.mismatch(format!(
                                        "n={n}: rule calls {axis:?} outcome {outcome} at {a} \
                                         impossible but the oracle accepts it"
                                    ));
                                }
                            }
                            Err(e) => {
                                tally.mismatch(format!(
                                    "n={n}: rule engine failed on {axis:?} at {a}: {e}"
                                ));
                            }
                        }
                    }
                }
            }
        }
        tally.lines.push(format!(
            "  n={n}: {} graphs, {} cases, {} mismatches",
            graphs.len(),
            tally.cases - before_cases,
            tally.mismatches - before_mism
        ));
    }
}

fn random_connected_graph(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
        .collect();
    loop {
        let mask = rng.gen::<u64>() & ((1u64 << pairs.len()) - 1);
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
            return g;
        }
    }
}

fn random_sweep(cases: usize, max_vertices: usize, seed: u64, tally: &mut Tally) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let before_mism = tally.mismatches;
    for case in 0..cases {
        tally.cases += 1;
        let n = rng.gen_range(2..=max_vertices);
        let g = random_connected_graph(n, &mut rng);
        let mut st = GraphState::from_graph_uniform(g, NodeId::Orchestrator(0));
        for v in st.graph().vertices().collect::<Vec<_>>() {
            let op = Clifford::from_index(rng.gen_range(0..24)).expect("index below group order");
            st = st.with_frame(v, op).expect("vertex exists");
        }
        let vertices: Vec<VertexId> = st.graph().vertices().collect();
        let a = vertices[rng.gen_range(0..vertices.len())];
        let axis = [Axis::X, Axis::Y, Axis::Z][rng.gen_range(0..3)];
        let (after, rec) = match st.measure_physical(
            a,
            PauliBasis { axis, b0: None },
            OutcomeMode::Sample(&mut rng),
        ) {
            Ok(r) => r,
            Err(e) => {
                tally.mismatch(format!("random case {case}: sampling failed: {e}"));
                continue;
            }
        };
        if let Some(d) = tableau_disagreement(&st, &after, a, rec.axis, rec.outcome) {
            tally.mismatch(format!("random case {case}: {d}"));
            continue;
        }
        // Dense reference: force the same outcome on the full state
        // vector, factor the measured qubit out against its eigenstate,
        // and demand unit fidelity with the rule engine's survivors.
        let idx = st.qubit_index();
        let q = idx[&a];
        let mut dense = st.to_dense();
        if let Err(e) = dense.measure_force(&PauliString::single(q, rec.axis.pauli()), rec.outcome)
        {
            tally.mismatch(format!(
                "random case {case}: dense reference rejects the sampled outcome: {e}"
            ));
            continue;
        }
        let (reduced, weight) =
            dense.contract_qubit(q, pauli_eigenstate(rec.axis.pauli(), rec.outcome));
        if (weight - 1.0).abs() > 1e-9 {
            tally.mismatch(format!(
                "random case {case}: measured qubit not in the {:?} outcome-{} eigenstate \
                 (weight {weight})",
                rec.axis, rec.outcome
            ));
            continue;
        }
        let fid = reduced.fidelity(&after.to_dense());
        if (fid - 1.0).abs() > 1e-9 {
            tally.mismatch(format!(
                "random case {case}: dense fidelity {fid} after {:?} at {a}",
                rec.axis
            ));
        }
    }
    tally.lines.push(format!(
        "random frame-decorated cases vs tableau and dense references: \
         {cases} cases, {} mismatches",
        tally.mismatches - before_mism
    ));
}

/// Runs the full audit. `max_vertices` bounds the exhaustive sweep
/// (1..=6); `random_max_vertices` bounds the random graphs (2..=10).
pub fn run_audit(
    max_vertices: usize,
    random_cases: usize,
    random_max_vertices: usize,
    seed: u64,
) -> Result<AuditReport> {
    if !(1..=6).contains(&max_vertices) {
        return Err(config(format!(
            "key `max_vertices` must lie in 1..=6, got {max_vertices}"
        )));
    }
    if !(2..=10).contains(&random_max_vertices) {
        return Err(config(format!(
            "key `random_max_vertices` must lie in 2..=10, got {random_max_vertices}"
        )));
    }
    let mut tally = Tally { cases: 0, mismatches: 0, lines: Vec::new() };
    exhaustive_sweep(max_vertices, &mut tally);
    let exhaustive_cases = tally.cases;
    random_sweep(random_cases, random_max_vertices, seed, &mut tally);
    Ok(AuditReport {
        exhaustive_cases,
        random_cases: tally.cases - exhaustive_cases,
        mismatches: tally.mismatches,
        lines: tally.lines,
    })
}
