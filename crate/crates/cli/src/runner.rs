//! Executes scenario files: resolves the output directory, drives the
//! simulator, and emits the per-kind artifact files.

use crate::audit::run_audit;
use crate::error::{config, runtime, Result};
use crate::outputs::{feasibility_csv, metrics_csv, trace_jsonl, OutputDir};
use crate::scenario::{
    InterQlanDemoParams, OracleAuditParams, RequestSpec, Scenario, ScenarioKind,
    TopologyDemoParams, TransductionSweepParams, ALL_PROTOTYPES,
};
use crate::sweep::{grid, run_sweep, SweepSpec};
use qlansim_core::inter_qlan::{
    build_resource, realize_prototype, search_realization, verify_locality, InterQlanError,
    MultiQlanNetwork, PrototypeKind, ResourceKind,
};
use qlansim_core::qlan::{distribute_linear, TopologyPattern};
use qlansim_core::{
    LinkBudget, NodeId, QlanConfig, QlanSim, ServeOutcome, ServedLink, Timing, TrafficRequest,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};

/// Command-line overrides; flags win over the scenario file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub force: bool,
}

/// What a run produced.
#[derive(Debug)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub summary: Vec<String>,
}

impl RunOutcome {
    fn new(out: &OutputDir) -> RunOutcome {
        RunOutcome { out_dir: out.path().to_path_buf(), files: Vec::new(), summary: Vec::new() }
    }

    fn wrote(&mut self, path: PathBuf) {
        self.summary.push(format!("wrote {}", path.display()));
        self.files.push(path);
    }
}

/// Loads and runs one scenario file.
pub fn run_scenario_file(path: &Path, ov: &Overrides) -> Result<RunOutcome> {
    let sc = Scenario::load(path, ov.seed)?;
    run_scenario(&sc, ov)
}

pub fn run_scenario(sc: &Scenario, ov: &Overrides) -> Result<RunOutcome> {
    let out =
        OutputDir::resolve(ov.out_dir.clone(), sc.out_dir.clone(), sc.kind_name(), ov.force);
    match &sc.kind {
        ScenarioKind::TopologyDemo(p) => run_topology_demo(p, sc.seed, &out),
        ScenarioKind::TransductionSweep(p) => run_transduction_sweep(p, &out),
        ScenarioKind::InterQlanDemo(p) => run_inter_qlan_demo(p, sc.seed, &out),
        ScenarioKind::OracleAudit(p) => run_oracle_audit(p, sc.seed, &out),
    }
}

// ---------------------------------------------------------------------------
// topology_demo
// ---------------------------------------------------------------------------

fn run_topology_demo(p: &TopologyDemoParams, seed: u64, out: &OutputDir) -> Result<RunOutcome> {
    if !(2..=16).contains(&p.clients) {
        return Err(config(format!(
            "key `clients` must lie in 2..=16, got {}",
            p.clients
        )));
    }
    let timing = Timing::new(p.latency_us, p.coherence_us, p.base_fidelity)
        .map_err(|e| config(format!("timing parameters: {e}")))?;
    let clients: Vec<u32> = (1..=p.clients as u32).collect();
    for (i, r) in p.requests.iter().enumerate() {
        let check = |c: u32| {
            if clients.contains(&c) {
                Ok(())
            } else {
                Err(config(format!(
                    "key `requests` entry {}: client {c} is not on this network",
                    i + 1
                )))
            }
        };
        match r {
            RequestSpec::Pair { a, b } => {
                check(*a)?;
                check(*b)?;
                if a == b {
                    return Err(config(format!(
                        "key `requests` entry {}: a pair needs two distinct clients",
                        i + 1
                    )));
                }
            }
            RequestSpec::Disconnect { client } => check(*client)?,
            RequestSpec::Bus => {}
        }
    }
    let cfg = QlanConfig::new(0, clients.clone(), timing).map_err(|e| config(e.to_string()))?;

    let mut outcome = RunOutcome::new(out);
    let phys = cfg.physical_topology();
    outcome.wrote(out.write("physical_star.dot", &phys.to_dot("physical_star"))?);
    outcome.wrote(out.write("physical_star.edges", &phys.to_edge_list())?);

    // Distribute the linear resource: clients in order, one fresh
    // orchestrator-held qubit between each neighboring pair.
    let mut plan = Vec::new();
    for (i, &c) in clients.iter().enumerate() {
        if i > 0 {
            plan.push(cfg.orchestrator_node());
        }
        plan.push(NodeId::Client(c));
    }
    let chain = distribute_linear(&cfg, &plan).map_err(|e| runtime(e.to_string()))?;
    let mut sim = QlanSim::new(cfg, chain, seed);

    match sim
        .serve(TrafficRequest::TopologyChange(TopologyPattern::Bus))
        .map_err(|e| runtime(format!("bus conversion: {e}")))?
    {
        ServeOutcome::Updated { rounds, elapsed_us, .. } => outcome
            .summary
            .push(format!("bus formed in {rounds} round(s), {elapsed_us} us")),
        ServeOutcome::Link(_) => unreachable!("a topology change never delivers a pair"),
    }
    let bus = sim.topology();
    outcome.wrote(out.write("bus.dot", &bus.graph().to_dot("bus"))?);
    outcome.wrote(out.write("bus.edges", &bus.graph().to_edge_list())?);

    let mut links: Vec<ServedLink> = Vec::new();
    for r in &p.requests {
        let req = match r {
            RequestSpec::Pair { a, b } => TrafficRequest::Pair(*a, *b),
            RequestSpec::Disconnect { client } => TrafficRequest::Disconnect(*client),
            RequestSpec::Bus => TrafficRequest::TopologyChange(TopologyPattern::Bus),
        };
        match sim.serve(req).map_err(|e| runtime(format!("request {r:?}: {e}")))? {
            ServeOutcome::Link(link) => {
                outcome.summary.push(format!(
                    "request {}: pair c{} - c{} delivered, {} round(s), fidelity {:.6}",
                    link.request_id, link.client_a, link.client_b, link.rounds, link.fidelity
                ));
                links.push(link);
            }
            ServeOutcome::Updated { request_id, rounds, elapsed_us } => {
                outcome.summary.push(format!(
                    "request {request_id}: resource updated, {rounds} round(s), {elapsed_us} us"
                ));
            }
        }
    }

    outcome.wrote(out.write("metrics.csv", &metrics_csv(&links))?);
    outcome.wrote(out.write("trace.jsonl", &trace_jsonl(sim.trace())?)?);
    outcome.summary.push(format!(
        "served {} pair(s); {} measurement(s) in the trace",
        links.len(),
        sim.trace().len()
    ));
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// transduction_sweep
// ---------------------------------------------------------------------------

fn run_transduction_sweep(p: &TransductionSweepParams, out: &OutputDir) -> Result<RunOutcome> {
    let axis = grid(p.eta_start, p.eta_stop, p.eta_step, "eta_start/eta_stop/eta_step")?;
    let budget = LinkBudget::new(
        p.length_km,
        p.attenuation_db_per_km,
        p.detector_efficiency,
        p.detector.kind(),
    )
    .map_err(|e| config(format!("link budget: {e}")))?;
    let spec = SweepSpec {
        axis_s: axis.clone(),
        axis_d: axis,
        alpha_sq: p.alpha_sq,
        budget,
        workers: p.workers,
    };
    let swept = run_sweep(&spec, out)?;
    let mut outcome = RunOutcome::new(out);
    outcome.summary.push(format!(
        "{} grid point(s): {} computed, {} reused from the manifest",
        swept.total, swept.computed, swept.reused
    ));
    outcome.wrote(swept.csv_path);
    outcome.files.push(swept.manifest_path);
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// inter_qlan_demo
// ---------------------------------------------------------------------------

fn interconnect_error(e: InterQlanError) -> crate::error::CliError {
    match e {
        InterQlanError::InvalidNetwork(_)
        | InterQlanError::DisconnectedMesh
        | InterQlanError::UnknownNode(_)
        | InterQlanError::InvalidPrototype(_)
        | InterQlanError::RecipeParse(_) => config(e.to_string()),
        other => runtime(other.to_string()),
    }
}

fn resolve_prototypes(
    p: &InterQlanDemoParams,
    first_clients: &[u32],
) -> Result<Vec<PrototypeKind>> {
    let names: Vec<String> = if p.prototypes.is_empty() {
        if p.networks == 1 {
            vec!["peer_to_peer_hierarchical".to_string()]
        } else {
            ALL_PROTOTYPES.iter().map(|s| s.to_string()).collect()
        }
    } else {
        p.prototypes.clone()
    };
    let delegate = p.delegate.unwrap_or(if p.clients_per_network >= 2 { 2 } else { 1 });
    let extranet: Vec<(u32, u32)> = if p.extranet_pairs.is_empty() {
        if first_clients.len() >= 2 {
            vec![(first_clients[0], first_clients[1])]
        } else {
            Vec::new()
        }
    } else {
        p.extranet_pairs.iter().map(|p| (p[0], p[1])).collect()
    };
    names
        .iter()
        .map(|name| match name.as_str() {
            "peer_to_peer_pure" => Ok(PrototypeKind::PeerToPeer { pure: true }),
            "peer_to_peer_hierarchical" => Ok(PrototypeKind::PeerToPeer { pure: false }),
            "role_delegation" => Ok(PrototypeKind::RoleDelegation { delegate }),
            "clients_handover" => Ok(PrototypeKind::ClientsHandover {
                from: p.handover_from,
                to: p.handover_to,
            }),
            "extranet" => Ok(PrototypeKind::Extranet { pairs: extranet.clone() }),
            other => Err(config(format!(
                "key `prototypes`: unknown prototype {other:?}; expected one of {}",
                ALL_PROTOTYPES.join(", ")
            ))),
        })
        .collect()
}

fn run_inter_qlan_demo(p: &InterQlanDemoParams, seed: u64, out: &OutputDir) -> Result<RunOutcome> {
    if !(1..=4).contains(&p.networks) {
        return Err(config(format!(
            "key `networks` must lie in 1..=4, got {}",
            p.networks
        )));
    }
    if !(1..=6).contains(&p.clients_per_network) {
        return Err(config(format!(
            "key `clients_per_network` must lie in 1..=6, got {}",
            p.clients_per_network
        )));
    }
    let timing = Timing::new(1.0, 1_000.0, 0.98).expect("fixed demo timing is valid");
    let mut qlans = Vec::new();
    let mut first_clients = Vec::new();
    for i in 0..p.networks as u32 {
        let base = i * 100;
        let clients: Vec<u32> = (1..=p.clients_per_network as u32).map(|c| base + c).collect();
        first_clients.push(clients[0]);
        qlans.push(QlanConfig::new(base, clients, timing).map_err(|e| config(e.to_string()))?);
    }
    let mesh: Vec<(usize, usize)> = (0..p.networks)
        .flat_map(|i| ((i + 1)..p.networks).map(move |j| (i, j)))
        .collect();
    let net = MultiQlanNetwork::new(qlans, mesh).map_err(interconnect_error)?;
    let resource =
        if p.networks == 2 { ResourceKind::BiStar } else { ResourceKind::NStar(p.networks) };
    let kinds = resolve_prototypes(p, &first_clients)?;

    let mut outcome = RunOutcome::new(out);
    let start = build_resource(&net, resource).map_err(interconnect_error)?;
    outcome.wrote(out.write("resource.dot", &start.graph().to_dot("resource"))?);
    outcome.wrote(out.write("resource.edges", &start.graph().to_edge_list())?);

    let mut reports = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        let report =
            search_realization(&net, kind, resource, p.max_depth).map_err(interconnect_error)?;
        if report.feasible {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let (topo, log, recipe) =
                realize_prototype(&net, kind, resource, p.max_depth, &mut rng)
                    .map_err(interconnect_error)?;
            if !verify_locality(&log) {
                return Err(runtime(format!(
                    "prototype {}: a non-orchestrator party performed a measurement",
                    kind.name()
                )));
            }
            let mut recipe_text = String::new();
            for step in &recipe {
                recipe_text.push_str(&step.to_string());
                recipe_text.push('\n');
            }
            outcome.wrote(out.write(&format!("{}.recipe", kind.name()), &recipe_text)?);
            outcome.wrote(out.write(
                &format!("{}.dot", kind.name()),
                &topo.graph().to_dot(kind.name()),
            )?);
            outcome.summary.push(format!(
                "{}: feasible with {} measurement(s) (explored {} states)",
                kind.name(),
                recipe.len(),
                report.explored
            ));
        } else {
            outcome.summary.push(format!(
                "{}: infeasible within depth {} (explored {} states)",
                kind.name(),
                p.max_depth,
                report.explored
            ));
        }
        reports.push(report);
    }
    outcome.wrote(out.write("feasibility.csv", &feasibility_csv(&reports))?);
    Ok(outcome)
}

// ---------------------------------------------------------------------------
// oracle_audit
// ---------------------------------------------------------------------------

fn run_oracle_audit(p: &OracleAuditParams, seed: u64, out: &OutputDir) -> Result<RunOutcome> {
    let report = run_audit(p.max_vertices, p.random_cases, p.random_max_vertices, seed)?;
    let mut outcome = RunOutcome::new(out);
    let path = out.write("audit.txt", &report.to_text())?;
    outcome.summary.push(format!(
        "{} exhaustive + {} random case(s): {}",
        report.exhaustive_cases,
        report.random_cases,
        report.summary()
    ));
    outcome.wrote(path);
    if report.mismatches > 0 {
        return Err(runtime(format!(
            "oracle audit found {} (see {})",
            report.summary(),
            outcome.files.last().expect("audit file was written").display()
        )));
    }
    Ok(outcome)
}
