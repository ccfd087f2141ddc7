//! Output directory policy and the flat-file formats the CLI emits.
//!
//! Every file is written atomically (temp file + rename) and nothing is
//! overwritten unless the caller passed `--force`. Floating-point values
//! are rendered with Rust's shortest round-trip formatting, so identical
//! results produce byte-identical files.

use crate::error::{config, runtime, CliError, Result};
use qlansim_core::transduction::SweepRow;
use qlansim_core::{FeasibilityReport, MeasurementRecord, ServedLink};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

/// Environment variable naming the default output root.
pub const OUT_ROOT_ENV: &str = "QLANSIM_OUT";

pub const METRICS_HEADER: &str = "request_id,rounds,elapsed_us,fidelity";
pub const SWEEP_HEADER: &str = "eta_s,eta_d,p_dqt,rate_factor,p_herald,f_herald";
pub const FEASIBILITY_HEADER: &str = "kind,n,depth,feasible,recipe_len";

/// Where one command writes its files, plus the overwrite policy.
#[derive(Debug, Clone)]
pub struct OutputDir {
    root: PathBuf,
    force: bool,
}

impl OutputDir {
    /// Resolves the output directory: an explicit `--out-dir` flag wins,
    /// then the scenario's own `out_dir`, then `$QLANSIM_OUT/<name>`,
    /// then `./qlansim-out/<name>`.
    pub fn resolve(
        flag: Option<PathBuf>,
        scenario: Option<PathBuf>,
        name: &str,
        force: bool,
    ) -> OutputDir {
        let root = flag.or(scenario).unwrap_or_else(|| {
            let base = std::env::var_os(OUT_ROOT_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from("qlansim-out"));
            base.join(name)
        });
        OutputDir { root, force }
    }

    pub fn at(root: PathBuf, force: bool) -> OutputDir {
        OutputDir { root, force }
    }

    pub fn path(&self) -> &Path {
        &self.root
    }

    pub fn force(&self) -> bool {
        self.force
    }

    pub fn file(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    /// Writes one file atomically. Refuses to replace an existing file
    /// unless `--force` was given.
    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let path = self.file(name);
        if path.exists() && !self.force {
            return Err(config(format!(
                "refusing to overwrite {} (pass --force to replace it)",
                path.display()
            )));
        }
        fs::create_dir_all(&self.root)?;
        write_atomic(&path, contents.as_bytes())?;
        Ok(path)
    }
}

/// Atomic file write: a temp file in the same directory, then a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path
        .parent()
        .ok_or_else(|| CliError::Runtime(format!("no parent directory for {}", path.display())))?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Delivered-pair metrics, one row per served link.
pub fn metrics_csv(links: &[ServedLink]) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for l in links {
        out.push_str(&format!(
            "{},{},{},{}\n",
            l.request_id, l.rounds, l.elapsed_us, l.fidelity
        ));
    }
    out
}

pub fn sweep_row_csv(r: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{}",
        r.eta_s, r.eta_d, r.p_dqt, r.rate_factor, r.p_herald, r.f_herald
    )
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&sweep_row_csv(r));
        out.push('\n');
    }
    out
}

/// Prototype feasibility table; `recipe_len` is 0 both for an empty
/// recipe and for an infeasible prototype (the `feasible` column
/// disambiguates).
pub fn feasibility_csv(reports: &[FeasibilityReport]) -> String {
    let mut out = String::from(FEASIBILITY_HEADER);
    out.push('\n');
    for r in reports {
        let len = r.recipe.as_ref().map_or(0, |steps| steps.len());
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.kind, r.networks, r.depth, r.feasible, len
        ));
    }
    out
}

/// One JSON object per measurement record, newline-delimited.
pub fn trace_jsonl(records: &[MeasurementRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).map_err(|e| runtime(format!("trace: {e}")))?);
        out.push('\n');
    }
    Ok(out)
}

/// Parses a trace file back into records (the round trip of
/// [`trace_jsonl`]).
pub fn parse_trace_jsonl(text: &str) -> Result<Vec<MeasurementRecord>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(line)
                .map_err(|e| runtime(format!("trace line {}: {e}", i + 1)))?,
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metrics_csv_is_header_only_when_empty() {
        assert_eq!(metrics_csv(&[]), "request_id,rounds,elapsed_us,fidelity\n");
    }

    #[test]
    fn sweep_csv_renders_full_precision() {
        let row = SweepRow {
            eta_s: 0.1,
            eta_d: 0.2,
            p_dqt: 0.020000000000000004,
            rate_factor: 0.0,
            p_herald: 0.25,
            f_herald: 0.5,
        };
        let text = sweep_csv(&[row]);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(SWEEP_HEADER));
        assert_eq!(lines.next(), Some("0.1,0.2,0.020000000000000004,0,0.25,0.5"));
    }
}
