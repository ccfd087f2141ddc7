//! Scenario files: a TOML document naming a scenario kind, a mandatory
//! seed, an optional output directory, and kind-specific parameters.
//!
//! ```toml
//! kind = "topology_demo"
//! seed = 7
//! out_dir = "out/demo"        # optional
//!
//! [parameters]
//! clients = 6
//!
//! [[parameters.requests]]
//! kind = "pair"
//! a = 1
//! b = 2
//! ```

use crate::error::{config, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    kind: String,
    seed: Option<u64>,
    out_dir: Option<PathBuf>,
    parameters: Option<toml::Value>,
}

/// A fully validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub enum ScenarioKind {
    TopologyDemo(TopologyDemoParams),
    TransductionSweep(TransductionSweepParams),
    InterQlanDemo(InterQlanDemoParams),
    OracleAudit(OracleAuditParams),
}

impl Scenario {
    /// Short name of the scenario kind, used as the default output
    /// subdirectory.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            ScenarioKind::TopologyDemo(_) => "topology_demo",
            ScenarioKind::TransductionSweep(_) => "transduction_sweep",
            ScenarioKind::InterQlanDemo(_) => "inter_qlan_demo",
            ScenarioKind::OracleAudit(_) => "oracle_audit",
        }
    }

    /// Reads and validates a scenario file. `seed_override` (from the
    /// command line) wins over the file's own `seed`.
    pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Scenario> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config(format!("cannot read scenario file {}: {e}", path.display())))?;
        Scenario::parse(&text, seed_override)
    }

    pub fn parse(text: &str, seed_override: Option<u64>) -> Result<Scenario> {
        let raw: RawScenario =
            toml::from_str(text).map_err(|e| config(format!("scenario file: {e}")))?;
        let params = raw
            .parameters
            .unwrap_or_else(|| toml::Value::Table(toml::map::Map::new()));
        let kind = match raw.kind.as_str() {
            "topology_demo" => ScenarioKind::TopologyDemo(typed(params, "topology_demo")?),
            "transduction_sweep" => {
                ScenarioKind::TransductionSweep(typed(params, "transduction_sweep")?)
            }
            "inter_qlan_demo" => ScenarioKind::InterQlanDemo(typed(params, "inter_qlan_demo")?),
            "oracle_audit" => ScenarioKind::OracleAudit(typed(params, "oracle_audit")?),
            other => {
                return Err(config(format!(
                    "key `kind`: unknown scenario kind {other:?}; expected one of \
                     topology_demo, transduction_sweep, inter_qlan_demo, oracle_audit"
                )))
            }
        };
        let seed = seed_override.or(raw.seed).ok_or_else(|| {
            config("key `seed` is required: set it in the scenario file or pass --seed")
        })?;
        Ok(Scenario { kind, seed, out_dir: raw.out_dir })
    }
}

fn typed<T: serde::de::DeserializeOwned>(v: toml::Value, kind: &str) -> Result<T> {
    v.try_into()
        .map_err(|e| config(format!("key `parameters` for kind {kind:?}: {e}")))
}

/// One traffic request in a topology demo, executed in file order after
/// the initial bus conversion.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RequestSpec {
    /// Deliver a Bell pair between clients `a` and `b`.
    Pair { a: u32, b: u32 },
    /// Cut one client out of the shared resource.
    Disconnect { client: u32 },
    /// Re-issue the bus conversion (a no-op once the resource has no
    /// orchestrator-held qubits left).
    Bus,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TopologyDemoParams {
    /// Number of clients on the QLAN (2..=16).
    pub clients: usize,
    /// One LOCC round of classical coordination, microseconds.
    pub latency_us: f64,
    /// Memory coherence time, microseconds.
    pub coherence_us: f64,
    /// Fidelity of a freshly distributed pair, in (0.25, 1].
    pub base_fidelity: f64,
    pub requests: Vec<RequestSpec>,
}

impl Default for TopologyDemoParams {
    fn default() -> Self {
        TopologyDemoParams {
            clients: 6,
            latency_us: 1.0,
            coherence_us: 1_000.0,
            base_fidelity: 0.98,
            requests: Vec::new(),
        }
    }
}

/// Detector model named in scenario files and flags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorSpec {
    Pnr,
    Threshold,
}

impl DetectorSpec {
    pub fn kind(self) -> qlansim_core::DetectorKind {
        match self {
            DetectorSpec::Pnr => qlansim_core::DetectorKind::PhotonNumberResolving,
            DetectorSpec::Threshold => qlansim_core::DetectorKind::Threshold,
        }
    }

    pub fn parse(name: &str) -> Result<DetectorSpec> {
        match name {
            "pnr" => Ok(DetectorSpec::Pnr),
            "threshold" => Ok(DetectorSpec::Threshold),
            other => Err(config(format!(
                "key `detector`: unknown detector {other:?}; expected \"pnr\" or \"threshold\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TransductionSweepParams {
    /// Efficiency grid: start, stop, step (the same grid is used on both
    /// the source and destination axes).
    pub eta_start: f64,
    pub eta_stop: f64,
    pub eta_step: f64,
    /// Early-excitation weight |alpha|^2 of both emitters.
    pub alpha_sq: f64,
    pub length_km: f64,
    pub attenuation_db_per_km: f64,
    pub detector_efficiency: f64,
    pub detector: DetectorSpec,
    /// Worker threads for grid evaluation.
    pub workers: usize,
}

impl Default for TransductionSweepParams {
    fn default() -> Self {
        TransductionSweepParams {
            eta_start: 0.05,
            eta_stop: 1.0,
            eta_step: 0.05,
            alpha_sq: 0.5,
            length_km: 0.0,
            attenuation_db_per_km: qlansim_core::transduction::DEFAULT_ATTENUATION_DB_PER_KM,
            detector_efficiency: 1.0,
            detector: DetectorSpec::Pnr,
            workers: 4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InterQlanDemoParams {
    /// Number of interconnected QLANs (network i gets orchestrator id
    /// 100*i and clients 100*i+1 ..).
    pub networks: usize,
    pub clients_per_network: usize,
    /// Measurement-recipe search depth.
    pub max_depth: usize,
    /// Prototype names to evaluate. Empty means every prototype (only
    /// the hierarchical peer-to-peer layout when there is a single
    /// network, since the rest need a second network).
    pub prototypes: Vec<String>,
    /// Client that inherits the orchestrator role (role_delegation);
    /// defaults to the second client of the first network.
    pub delegate: Option<u32>,
    /// Network indices for clients_handover.
    pub handover_from: usize,
    pub handover_to: usize,
    /// Client pairs to link directly (extranet); defaults to the first
    /// clients of the first two networks.
    pub extranet_pairs: Vec<[u32; 2]>,
}

pub const ALL_PROTOTYPES: [&str; 5] = [
    "peer_to_peer_pure",
    "peer_to_peer_hierarchical",
    "role_delegation",
    "clients_handover",
    "extranet",
];

impl Default for InterQlanDemoParams {
    fn default() -> Self {
        InterQlanDemoParams {
            networks: 2,
            clients_per_network: 3,
            max_depth: 4,
            prototypes: Vec::new(),
            delegate: None,
            handover_from: 0,
            handover_to: 1,
            extranet_pairs: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OracleAuditParams {
    /// Exhaustive sweep covers every connected graph up to this many
    /// vertices (1..=6).
    pub max_vertices: usize,
    /// Random frame-decorated cases checked against the dense reference.
    pub random_cases: usize,
    /// Largest random graph (2..=10).
    pub random_max_vertices: usize,
}

impl Default for OracleAuditParams {
    fn default() -> Self {
        OracleAuditParams { max_vertices: 4, random_cases: 50, random_max_vertices: 8 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_topology_demo() {
        let sc = Scenario::parse("kind = \"topology_demo\"\nseed = 7\n", None).unwrap();
        assert_eq!(sc.seed, 7);
        match sc.kind {
            ScenarioKind::TopologyDemo(p) => {
                assert_eq!(p.clients, 6);
                assert!(p.requests.is_empty());
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn missing_seed_is_a_config_error_citing_the_key() {
        let err = Scenario::parse("kind = \"oracle_audit\"\n", None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("`seed`"), "{err}");
    }

    #[test]
    fn seed_override_wins_over_the_file() {
        let sc = Scenario::parse("kind = \"oracle_audit\"\nseed = 1\n", Some(9)).unwrap();
        assert_eq!(sc.seed, 9);
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let err = Scenario::parse("kind = \"nope\"\nseed = 1\n", None).unwrap_err();
        assert!(err.to_string().contains("`kind`"), "{err}");
        assert!(err.to_string().contains("nope"), "{err}");
    }

    #[test]
    fn unknown_parameter_key_is_cited() {
        let text = "kind = \"topology_demo\"\nseed = 1\n[parameters]\nclientz = 3\n";
        let err = Scenario::parse(text, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("clientz"), "{err}");
    }

    #[test]
    fn requests_parse_with_their_kinds() {
        let text = r#"
kind = "topology_demo"
seed = 3

[parameters]
clients = 4

[[parameters.requests]]
kind = "pair"
a = 1
b = 2

[[parameters.requests]]
kind = "disconnect"
client = 3

[[parameters.requests]]
kind = "bus"
"#;
        let sc = Scenario::parse(text, None).unwrap();
        match sc.kind {
            ScenarioKind::TopologyDemo(p) => {
                assert_eq!(p.requests.len(), 3);
                assert!(matches!(p.requests[0], RequestSpec::Pair { a: 1, b: 2 }));
                assert!(matches!(p.requests[1], RequestSpec::Disconnect { client: 3 }));
                assert!(matches!(p.requests[2], RequestSpec::Bus));
            }
            _ => panic!("wrong kind"),
        }
    }

    #[test]
    fn detector_names_parse() {
        assert_eq!(DetectorSpec::parse("pnr").unwrap(), DetectorSpec::Pnr);
        assert_eq!(DetectorSpec::parse("threshold").unwrap(), DetectorSpec::Threshold);
        assert!(DetectorSpec::parse("apd").is_err());
    }
}
