use clap::{Parser, Subcommand};
use qlansim_cli::error::{config, Result};
use qlansim_cli::outputs::OutputDir;
use qlansim_cli::scenario::DetectorSpec;
use qlansim_cli::sweep::{parse_axis, run_sweep, SweepSpec};
use qlansim_cli::{audit, export, runner};
use qlansim_core::transduction::DEFAULT_ATTENUATION_DB_PER_KM;
use qlansim_core::LinkBudget;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "qlansim",
    version,
    about = "Graph-state quantum LAN simulator",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario file
    Run {
        /// Path to the scenario TOML file
        scenario: PathBuf,
        /// Override the scenario's seed
        #[arg(long)]
        seed: Option<u64>,
        /// Write outputs here instead of the scenario's directory
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Allow replacing existing output files
        #[arg(long)]
        force: bool,
    },
    /// Sweep the strategy contrast over explicit efficiency axes
    Sweep {
        /// Source-efficiency axis: `start:stop:step` or `a,b,c` (default: 1.0)
        #[arg(long = "eta-s")]
        eta_s: Option<String>,
        /// Destination-efficiency axis, same syntax (default: 1.0)
        #[arg(long = "eta-d")]
        eta_d: Option<String>,
        /// Early-excitation weight |alpha|^2 of both emitters
        #[arg(long, default_value_t = 0.5)]
        alpha_sq: f64,
        /// Fiber length in km
        #[arg(long, default_value_t = 0.0)]
        length_km: f64,
        /// Fiber attenuation in dB/km
        #[arg(long, default_value_t = DEFAULT_ATTENUATION_DB_PER_KM)]
        attenuation_db_per_km: f64,
        /// Detector efficiency in [0, 1]
        #[arg(long, default_value_t = 1.0)]
        detector_efficiency: f64,
        /// Detector model: pnr or threshold
        #[arg(long, default_value = "pnr")]
        detector: String,
        /// Worker threads
        #[arg(long, default_value_t = 4)]
        workers: usize,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Export a topology as DOT or an edge list
    Export {
        /// Built-in shape: star:<clients>, bus:<clients>, path:<n>,
        /// cycle:<n>, or empty
        #[arg(long, conflicts_with = "input")]
        builtin: Option<String>,
        /// Edge-list file to re-import
        #[arg(long)]
        input: Option<PathBuf>,
        /// Output format: dot or edges
        #[arg(long)]
        format: String,
        /// Write to this file instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
    /// Cross-check the rewrite engine against the reference simulators
    Audit {
        /// Exhaustive sweep bound (1..=6)
        #[arg(long, default_value_t = 4)]
        max_vertices: usize,
        /// Number of random frame-decorated cases
        #[arg(long, default_value_t = 50)]
        random_cases: usize,
        /// Largest random graph (2..=10)
        #[arg(long, default_value_t = 8)]
        random_max_vertices: usize,
        /// Seed for the random cases
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        force: bool,
    },
}

/// What a subcommand wants on stdout: status lines (each gets its own
/// newline) or raw content printed exactly as rendered.
enum CmdOutput {
    Lines(Vec<String>),
    Raw(String),
}

fn dispatch(cmd: Cmd) -> Result<CmdOutput> {
    match cmd {
        Cmd::Run { scenario, seed, out_dir, force } => {
            let outcome = runner::run_scenario_file(
                &scenario,
                &runner::Overrides { seed, out_dir, force },
            )?;
            Ok(CmdOutput::Lines(outcome.summary))
        }
        Cmd::Sweep {
            eta_s,
            eta_d,
            alpha_sq,
            length_km,
            attenuation_db_per_km,
            detector_efficiency,
            detector,
            workers,
            out_dir,
            force,
        } => {
            let axis_s = match eta_s {
                Some(text) => parse_axis(&text, "eta-s")?,
                None => vec![1.0],
            };
            let axis_d = match eta_d {
                Some(text) => parse_axis(&text, "eta-d")?,
                None => vec![1.0],
            };
            let budget = LinkBudget::new(
                length_km,
                attenuation_db_per_km,
                detector_efficiency,
                DetectorSpec::parse(&detector)?.kind(),
            )
            .map_err(|e| config(format!("link budget: {e}")))?;
            let spec = SweepSpec { axis_s, axis_d, alpha_sq, budget, workers };
            let out = OutputDir::resolve(out_dir, None, "sweep", force);
            let swept = run_sweep(&spec, &out)?;
            Ok(CmdOutput::Lines(vec![
                format!(
                    "{} grid point(s): {} computed, {} reused from the manifest",
                    swept.total, swept.computed, swept.reused
                ),
                format!("wrote {}", swept.csv_path.display()),
            ]))
        }
        Cmd::Export { builtin, input, format, out, force } => {
            let fmt = export::ExportFormat::parse(&format)?;
            let (graph, name) = match (builtin, input) {
                (Some(name), None) => {
                    let g = export::builtin_topology(&name)?;
                    let short = name.split(':').next().unwrap_or("topology").to_string();
                    (g, short)
                }
                (None, Some(path)) => {
                    let g = export::load_topology(&path)?;
                    let short = path
                        .file_stem()
                        .and_then(|s| s.to_str())
                        .unwrap_or("topology")
                        .to_string();
                    (g, short)
                }
                _ => {
                    return Err(config(
                        "pass exactly one of --builtin <shape> or --input <file>",
                    ))
                }
            };
            let text = export::render(&graph, fmt, &name);
            match out {
                Some(path) => {
                    if path.exists() && !force {
                        return Err(config(format!(
                            "refusing to overwrite {} (pass --force to replace it)",
                            path.display()
                        )));
                    }
                    if let Some(dir) = path.parent() {
                        if !dir.as_os_str().is_empty() {
                            std::fs::create_dir_all(dir)?;
                        }
                    }
                    qlansim_cli::outputs::write_atomic(&path, text.as_bytes())?;
                    Ok(CmdOutput::Lines(vec![format!("wrote {}", path.display())]))
                }
                None => Ok(CmdOutput::Raw(text)),
            }
        }
        Cmd::Audit { max_vertices, random_cases, random_max_vertices, seed, out_dir, force } => {
            let report = audit::run_audit(max_vertices, random_cases, random_max_vertices, seed)?;
            let out = OutputDir::resolve(out_dir, None, "audit", force);
            let path = out.write("audit.txt", &report.to_text())?;
            let lines = vec![
                format!(
                    "{} exhaustive + {} random case(s): {}",
                    report.exhaustive_cases,
                    report.random_cases,
                    report.summary()
                ),
                format!("wrote {}", path.display()),
            ];
            if report.mismatches > 0 {
                eprintln!("{}", lines.join("\n"));
                return Err(qlansim_cli::error::runtime(format!(
                    "oracle audit found {} (see {})",
                    report.summary(),
                    path.display()
                )));
            }
            Ok(CmdOutput::Lines(lines))
        }
    }
}

/// Prints to stdout, treating a closed pipe (e.g. `| head`) as a normal
/// early exit instead of a panic.
fn emit(text: &str) -> Option<ExitCode> {
    use std::io::Write as _;
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Some(ExitCode::SUCCESS);
        }
        eprintln!("error: i/o: {e}");
        return Some(ExitCode::from(3));
    }
    None
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(CmdOutput::Lines(lines)) => {
            for line in lines {
                if let Some(code) = emit(&format!("{line}\n")) {
                    return code;
                }
            }
            ExitCode::SUCCESS
        }
        Ok(CmdOutput::Raw(text)) => emit(&text).unwrap_or(ExitCode::SUCCESS),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
