//! Cartesian-product parameter sweeps over the two conversion-efficiency
//! axes, with a resumable completed-point manifest and a bounded worker
//! pool.
//!
//! Every grid point is one row of the strategy-contrast table. Finished
//! rows are recorded in `sweep_manifest.json`, rewritten atomically after
//! each wave of workers, so an interrupted sweep picks up where it
//! stopped. The final `sweep.csv` is assembled from the manifest in grid
//! order, which makes its bytes independent of worker scheduling.

use crate::error::{config, runtime, Result};
use crate::outputs::{sweep_row_csv, write_atomic, OutputDir, SWEEP_HEADER};
use qlansim_core::transduction::{strategy_point, SweepRow};
use qlansim_core::{DetectorKind, LinkBudget};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::PathBuf;

pub const MANIFEST_NAME: &str = "sweep_manifest.json";
pub const CSV_NAME: &str = "sweep.csv";

/// Largest number of points one sweep may request.
pub const MAX_POINTS: usize = 1_000_000;

/// A fully resolved sweep: two efficiency axes and the fixed link budget.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis_s: Vec<f64>,
    pub axis_d: Vec<f64>,
    pub alpha_sq: f64,
    pub budget: LinkBudget,
    pub workers: usize,
}

/// The sweep configuration a manifest was written for; resuming under a
/// different configuration is refused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpecEcho {
    axis_s: Vec<f64>,
    axis_d: Vec<f64>,
    alpha_sq: f64,
    length_km: f64,
    attenuation_db_per_km: f64,
    detector_efficiency: f64,
    detector: String,
}

impl SpecEcho {
    fn of(spec: &SweepSpec) -> SpecEcho {
        let detector = match spec.budget.detector {
            DetectorKind::PhotonNumberResolving => "pnr",
            DetectorKind::Threshold => "threshold",
        };
        SpecEcho {
            axis_s: spec.axis_s.clone(),
            axis_d: spec.axis_d.clone(),
            alpha_sq: spec.alpha_sq,
            length_km: spec.budget.length_km,
            attenuation_db_per_km: spec.budget.attenuation_db_per_km,
            detector_efficiency: spec.budget.detector_efficiency,
            detector: detector.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    spec: SpecEcho,
    total: usize,
    rows: BTreeMap<usize, SweepRow>,
}

/// What one sweep did.
#[derive(Debug)]
pub struct SweepOutcome {
    pub csv_path: PathBuf,
    pub manifest_path: PathBuf,
    pub total: usize,
    pub computed: usize,
    pub reused: usize,
}

/// Parses one axis flag: either `start:stop:step` or a comma-separated
/// list of values. Values must be efficiencies in [0, 1].
pub fn parse_axis(text: &str, key: &str) -> Result<Vec<f64>> {
    let values = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(config(format!(
                "key `{key}`: expected `start:stop:step`, got {text:?}"
            )));
        }
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| config(format!("key `{key}`: {p:?} is not a number")))
            })
            .collect::<Result<_>>()?;
        grid(nums[0], nums[1], nums[2], key)?
    } else {
        let mut vals = Vec::new();
        for p in text.split(',') {
            let p = p.trim();
            if p.is_empty() {
                continue;
            }
            vals.push(
                p.parse::<f64>()
                    .map_err(|_| config(format!("key `{key}`: {p:?} is not a number")))?,
            );
        }
        vals
    };
    if values.is_empty() {
        return Err(config(format!("key `{key}`: the axis has no values")));
    }
    for &v in &values {
        if !v.is_finite() || !(0.0..=1.0).contains(&v) {
            return Err(config(format!(
                "key `{key}`: efficiency {v} lies outside [0, 1]"
            )));
        }
    }
    Ok(values)
}

/// Evenly spaced values from `start` to `stop` inclusive. The last point
/// is clamped to `stop` so accumulated floating-point error can never
/// push a value past the endpoint.
pub fn grid(start: f64, stop: f64, step: f64, key: &str) -> Result<Vec<f64>> {
    if !start.is_finite() || !stop.is_finite() || !step.is_finite() {
        return Err(config(format!("key `{key}`: grid bounds must be finite")));
    }
    if step <= 0.0 {
        return Err(config(format!("key `{key}`: step must be positive, got {step}")));
    }
    if stop < start {
        return Err(config(format!(
            "key `{key}`: stop {stop} is below start {start}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > MAX_POINTS {
        return Err(config(format!("key `{key}`: {count} grid points is too many")));
    }
    Ok((0..count)
        .map(|i| {
            let v = start + step * i as f64;
            if v > stop {
                stop
            } else {
                v
            }
        })
        .collect())
}

fn load_manifest(path: &std::path::Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| runtime(format!("corrupt manifest {}: {e}", path.display())))
}

/// Runs a sweep, resuming from an existing manifest when one matches the
/// requested configuration. With `--force` a mismatched manifest is
/// discarded instead of refused.
pub fn run_sweep(spec: &SweepSpec, out: &OutputDir) -> Result<SweepOutcome> {
    if !(0.0..=1.0).contains(&spec.alpha_sq) {
        return Err(config(format!(
            "key `alpha_sq` must lie in [0, 1], got {}",
            spec.alpha_sq
        )));
    }
    if spec.axis_s.is_empty() || spec.axis_d.is_empty() {
        return Err(config("sweep axes must not be empty"));
    }
    let workers = spec.workers.max(1);
    let total = spec.axis_s.len() * spec.axis_d.len();
    if total > MAX_POINTS {
        return Err(config(format!("{total} sweep points is too many")));
    }
    let echo = SpecEcho::of(spec);
    let manifest_path = out.file(MANIFEST_NAME);
    let mut manifest = if manifest_path.exists() {
        let m = load_manifest(&manifest_path)?;
        if m.spec != echo || m.total != total {
            if !out.force() {
                return Err(config(format!(
                    "{} belongs to a different sweep configuration \
                     (pass --force to discard it)",
                    manifest_path.display()
                )));
            }
            Manifest { spec: echo, total, rows: BTreeMap::new() }
        } else {
            m
        }
    } else {
        Manifest { spec: echo, total, rows: BTreeMap::new() }
    };

    let missing: Vec<usize> = (0..total).filter(|i| !manifest.rows.contains_key(i)).collect();
    let reused = total - missing.len();
    let computed = missing.len();

    std::fs::create_dir_all(out.path())?;
    for wave in missing.chunks(workers) {
        let results: Vec<(usize, std::result::Result<SweepRow, String>)> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = wave
                    .iter()
                    .map(|&i| {
                        let budget = spec.budget;
                        let eta_s = spec.axis_s[i / spec.axis_d.len()];
                        let eta_d = spec.axis_d[i % spec.axis_d.len()];
                        let alpha_sq = spec.alpha_sq;
                        scope.spawn(move || {
                            (
                                i,
                                strategy_point(eta_s, eta_d, &budget, alpha_sq)
                                    .map_err(|e| e.to_string()),
                            )
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("sweep worker must not panic"))
                    .collect()
            });
        for (i, row) in results {
            let row =
                row.map_err(|e| runtime(format!("sweep point {i}: {e}")))?;
            manifest.rows.insert(i, row);
        }
        let text = serde_json::to_string_pretty(&manifest)
            .map_err(|e| runtime(format!("manifest: {e}")))?;
        write_atomic(&manifest_path, text.as_bytes())?;
    }
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    for i in 0..total {
        let row = manifest.rows.get(&i).expect("all points computed");
        csv.push_str(&sweep_row_csv(row));
        csv.push('\n');
    }
    let csv_path = out.write(CSV_NAME, &csv)?;
    Ok(SweepOutcome { csv_path, manifest_path, total, computed, reused })
}
