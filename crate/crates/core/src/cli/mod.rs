//! Command-line front end. Exit codes: 0 ok, 1 a mathematical check failed,
//! 2 usage or config error.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::catalog::{self, CatalogEntry};
use crate::error::Error;
use crate::verify::{self, TheoremId, Verdict, VerifyOptions};

pub use config::Config;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const TOOL: &str = "reebcheck";

#[derive(Debug, Parser)]
#[command(name = "reebcheck", version, about = "Contact and Reeb diagnostics for geodesic unit fields on Riemannian 3-manifolds")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// JSON config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of CSV or text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Catalog entry to use when no config is given.
    #[arg(long, global = true)]
    pub entry: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in entries.
    Catalog,
    /// Per-point diagnosis over the grid (CSV).
    Analyze,
    /// Orbit with frame, Jacobi fields and residuals (CSV).
    Orbit,
    /// Theorem verdicts (JSON).
    Verify {
        /// Theorem ids: T3.1 C3.2 T5.1 C5.2 T6.1 P7.6. Empty means all.
        ids: Vec<String>,
        /// All theorems; over the whole catalog when no entry or config is given.
        #[arg(long)]
        all: bool,
        /// Space-form curvature for T5.1 and C5.2.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Contact volume by quadrature (JSON).
    Volume {
        /// Nodes per axis.
        #[arg(long)]
        nodes: Option<usize>,
    },
}

/// A finished report: body text and exit code.
pub struct Outcome {
    pub body: String,
    pub code: i32,
}

#[derive(Debug)]
pub struct CliError {
    pub message: String,
    pub code: i32,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotUnit(_) | Error::StepTooLarge { .. } | Error::PoleReached(_) => EXIT_CHECK_FAILED,
            _ => EXIT_USAGE,
        };
        CliError {
            message: format!("{}: {e}", e.kind()),
            code,
        }
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError {
        message: message.into(),
        code: EXIT_USAGE,
    }
}

/// Parse arguments, run, write the report. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let written = match &cli.global.out {
                Some(path) => std::fs::write(path, &out.body).map_err(|e| e.to_string()),
                None => stdout.write_all(out.body.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => out.code,
                Err(e) => {
                    let _ = writeln!(stderr, "error: cannot write report: {e}");
                    EXIT_USAGE
                }
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn load_config(g: &Global) -> Result<Option<Config>, CliError> {
    match (&g.config, &g.entry) {
        (Some(_), Some(_)) => Err(usage("give either --config or --entry, not both")),
        (Some(path), None) => Ok(Some(Config::load(path)?)),
        (None, Some(name)) => Ok(Some(Config::for_entry(name))),
        (None, None) => Ok(None),
    }
}

fn require_config(g: &Global) -> Result<Config, CliError> {
    load_config(g)?.ok_or_else(|| usage("this command needs --config <path> or --entry <name>"))
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Catalog => Ok(cmd_catalog(cli.global.json)),
        Command::Analyze => {
            let cfg = require_config(&cli.global)?;
            cmd_analyze(&cfg, cli.global.json)
        }
        Command::Orbit => {
            let cfg = require_config(&cli.global)?;
            cmd_orbit(&cfg, cli.global.json)
        }
        Command::Verify { ids, all, c } => {
            let cfg = load_config(&cli.global)?;
            cmd_verify(cfg.as_ref(), ids, *all, *c)
        }
        Command::Volume { nodes } => {
            let cfg = require_config(&cli.global)?;
            cmd_volume(&cfg, *nodes)
        }
    }
}

pub fn cmd_catalog(as_json: bool) -> Outcome {
    let entries: Vec<(&str, CatalogEntry)> = catalog::NAMES
        .iter()
        .map(|n| (*n, catalog::builtin(n).expect("builtin entry")))
        .collect();
    let body = if as_json {
        let list: Vec<_> = entries
            .iter()
            .map(|(name, e)| {
                json!({
                    "name": name,
                    "description": e.description,
                    "space_form_curvature": e.space_form_curvature,
                    "parametrization": e.manifold.parametrization().map(|p| p.name.clone()),
                    "grid": e.grid,
                    "orbit_start": [e.orbit_start.x, e.orbit_start.y, e.orbit_start.z],
                    "expected": e.expected,
                })
            })
            .collect();
        format!("{}\n", serde_json::to_string_pretty(&list).expect("serializes"))
    } else {
        entries
            .iter()
            .map(|(name, e)| format!("{name:<20}{}\n", e.description))
            .collect()
    };
    Outcome { body, code: EXIT_OK }
}

pub fn cmd_analyze(cfg: &Config, as_json: bool) -> Result<Outcome, CliError> {
    let entry = cfg.entry()?;
    let tol = &cfg.tolerances;
    let diag = verify::diagnose_grid(&entry.manifold, &entry.field, &entry.grid, tol)?;
    let failed = !diag.not_unit.is_empty()
        || diag.points.iter().any(|d| d.unit_defect > tol.unit || d.geodesic_defect > tol.geodesic);
    let body = if as_json {
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "config": cfg,
            "entry": entry.name,
            "points": diag.points,
            "out_of_chart": diag.out_of_chart,
            "not_unit": diag.not_unit,
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes"))
    } else {
        report::analyze_csv(&diag, cfg)
    };
    Ok(Outcome {
        body,
        code: if failed { EXIT_CHECK_FAILED } else { EXIT_OK },
    })
}

pub fn cmd_orbit(cfg: &Config, as_json: bool) -> Result<Outcome, CliError> {
    let entry = cfg.entry()?;
    let spec = cfg.orbit_or_default(&entry);
    let traj = crate::flow::integrate_orbit(&entry.manifold, &entry.field, &spec.start.into(), spec.t_end, spec.step)?;
    let r = traj.residuals;
    let tol = cfg.tolerances.residual;
    let failed = r.riccati > tol || r.trace > tol || r.adapted > tol || r.wronskian_relative > tol;
    let body = if as_json {
        report::orbit_json(&traj, cfg)
    } else {
        report::orbit_csv(&traj, cfg)
    };
    Ok(Outcome {
        body,
        code: if failed { EXIT_CHECK_FAILED } else { EXIT_OK },
    })
}

pub fn cmd_verify(cfg: Option<&Config>, ids: &[String], all: bool, c: Option<f64>) -> Result<Outcome, CliError> {
    let theorems: Vec<TheoremId> = if ids.is_empty() || all {
        TheoremId::ALL.to_vec()
    } else {
        ids.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let default_tol = crate::field::Tolerances::default();
    let tol = cfg.map_or(&default_tol, |c| &c.tolerances);
    let reports = match cfg {
        Some(cfg) => {
            let entry = cfg.entry()?;
            let opts = VerifyOptions {
                c,
                volume_nodes: verify::DEFAULT_VOLUME_NODES,
            };
            verify::verify_entry(&entry, &entry.grid, &theorems, &opts, tol)?
        }
        None => {
            if c.is_some() {
                return Err(usage("--c needs a single entry (--entry or --config)"));
            }
            let entries = catalog::all();
            let mut out = Vec::new();
            for e in &entries {
                out.extend(verify::verify_entry(e, &e.grid, &theorems, &VerifyOptions::default(), tol)?);
            }
            out
        }
    };
    let violated = reports.iter().any(|r| r.verdict == Verdict::Violated);
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "config": cfg,
        "reports": reports,
    });
    Ok(Outcome {
        body: format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes")),
        code: if violated { EXIT_CHECK_FAILED } else { EXIT_OK },
    })
}

pub fn cmd_volume(cfg: &Config, nodes: Option<usize>) -> Result<Outcome, CliError> {
    let entry = cfg.entry()?;
    let nodes = nodes.unwrap_or_else(|| cfg.volume_nodes());
    if nodes == 0 {
        return Err(usage("--nodes must be at least 1"));
    }
    let result = verify::volume_integral(&entry, nodes)?;
    let diag = verify::diagnose_grid(&entry.manifold, &entry.field, &entry.grid, &cfg.tolerances)?;
    let killing_max = diag.max_of(|d| d.killing_defect);
    let reeb = verify::reebability_verdict(Some(&result), killing_max, &cfg.tolerances);
    let doc = json!({
        "tool": TOOL,
        "version": VERSION,
        "config": cfg,
        "entry": entry.name,
        "result": result,
        "killing_defect_max": killing_max,
        "reebability": reeb,
    });
    Ok(Outcome {
        body: format!("{}\n", serde_json::to_string_pretty(&doc).expect("serializes")),
        code: EXIT_OK,
    })
}
