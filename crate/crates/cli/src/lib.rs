//! Command-line front end for `stringcap`: bound tables, certificates and
//! the regression tables behind the acceptance checks.

pub mod config;
pub mod reproduce;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use stringcap::bounds::{bound_for_target, NumericBinding, ReportCache};
use stringcap::stralg::{check_certificate, derive_certificate, Certificate, CheckReport};
use thiserror::Error;

pub use config::{Format, RunConfig, ScenarioName};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numeric(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    pub fn from_core(e: stringcap::Error) -> CliError {
        use stringcap::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::Dimension { .. }
            | E::UnsupportedTarget { .. }
            | E::UnknownFamily(_)
            | E::ChartMismatch { .. }
            | E::BasepointMismatch { .. }
            | E::InvalidLoop { .. } => CliError::Validation(e.to_string()),
            E::MissingAxiom(rule) => CliError::Numeric(format!("missing rule {rule}: {e}")),
            _ => CliError::Numeric(e.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "stringcap", version, about = "Parametric Gromov width bounds from loop lengths and string topology")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute the bounds of a scenario and write the bound table and certificates.
    Bound(ScenarioArgs),
    /// Derive and replay the certificates of a scenario.
    Certify(ScenarioArgs),
    /// Regenerate a regression table: all, ellipsoid1, ellipsoid2, camel, klein, torus, openbook, frames,
    /// containment, certificates.
    Reproduce(ReproduceArgs),
    /// Print the JSON schema of the run configuration.
    Schema,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum)]
    pub scenario: Option<ScenarioName>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub radius: Option<f64>,
    /// Only this target class, e.g. "[pt]".
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub quad_panels: Option<usize>,
    #[arg(long)]
    pub refine_budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// JSON run configuration; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl ScenarioArgs {
    pub fn run_config(&self) -> Result<RunConfig, CliError> {
        let flags = RunConfig {
            scenario: self.scenario,
            n: self.n,
            a: self.a,
            b: None,
            eps: self.eps,
            delta: self.delta,
            k: self.k,
            d: self.d,
            radius: self.radius,
            target: self.target.clone(),
            quad_panels: self.quad_panels,
            refine_budget: self.refine_budget,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
            disable_axioms: Vec::new(),
        };
        let base = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        base.merged(flags).resolved()
    }
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    pub table_id: String,
    #[arg(long)]
    pub quad_panels: Option<usize>,
    #[arg(long)]
    pub refine_budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRow {
    pub target: String,
    pub gr_symbol: String,
    pub upper_bound: f64,
    pub grid_upper_bound: f64,
    pub tolerance: f64,
    pub equality_known: bool,
    pub equality_statement: Option<String>,
    pub certificate_checked: bool,
    pub bindings: BTreeMap<String, NumericBinding>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    /// The fully resolved configuration; re-running it reproduces this report.
    pub config: RunConfig,
    pub scenario_id: String,
    pub notes: Vec<String>,
    pub bounds: Vec<BoundRow>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifiedTarget {
    pub certificate: Certificate,
    pub check: CheckReport,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub config: RunConfig,
    pub scenario_id: String,
    pub certificates: Vec<CertifiedTarget>,
}

impl CertifyReport {
    pub fn passed(&self) -> bool {
        self.certificates.iter().all(|c| c.check.passed)
    }
}

fn selected_targets(cfg: &RunConfig, s: &stringcap::catalog::Scenario) -> Result<Vec<stringcap::stralg::TargetClass>, CliError> {
    match &cfg.target {
        Some(name) => Ok(vec![s.target(name).map_err(CliError::from_core)?.clone()]),
        None => Ok(s.targets.clone()),
    }
}

pub fn run_bound(cfg: &RunConfig) -> Result<(BoundReport, Vec<Certificate>), CliError> {
    let s = cfg.scenario()?;
    let settings = cfg.settings()?;
    let mut cache = ReportCache::default();
    let mut rows = Vec::new();
    let mut certs = Vec::new();
    for t in selected_targets(cfg, &s)? {
        let b = bound_for_target(&s, &t, &settings, &mut cache).map_err(CliError::from_core)?;
        if !b.certificate_checked {
            return Err(CliError::Numeric(format!("certificate for {} failed replay", t.name)));
        }
        rows.push(BoundRow {
            target: b.target.name.clone(),
            gr_symbol: b.gr_symbol.clone(),
            upper_bound: b.upper_bound,
            grid_upper_bound: b.grid_upper_bound,
            tolerance: b.tolerance,
            equality_known: b.equality.known,
            equality_statement: b.equality.statement.clone(),
            certificate_checked: b.certificate_checked,
            bindings: b.numeric_bindings.clone(),
        });
        certs.push(b.certificate);
    }
    let report = BoundReport { config: cfg.clone(), scenario_id: s.id.clone(), notes: s.notes.clone(), bounds: rows };
    Ok((report, certs))
}

pub fn run_certify(cfg: &RunConfig) -> Result<CertifyReport, CliError> {
    let s = cfg.scenario()?;
    let mut certificates = Vec::new();
    for t in selected_targets(cfg, &s)? {
        let certificate = derive_certificate(&s.id, &s.context, &t).map_err(CliError::from_core)?;
        let check = check_certificate(&certificate);
        certificates.push(CertifiedTarget { certificate, check });
    }
    Ok(CertifyReport { config: cfg.clone(), scenario_id: s.id.clone(), certificates })
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value).map(|s| s + "\n").map_err(|e| CliError::Io(e.to_string()))
}

fn csv_of<T: Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

#[derive(Serialize)]
struct FlatBoundRow<'a> {
    scenario_id: &'a str,
    target: &'a str,
    upper_bound: f64,
    grid_upper_bound: f64,
    tolerance: f64,
    equality_known: bool,
    certificate_checked: bool,
}

pub fn render_bound(report: &BoundReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json(report),
        Format::Csv => {
            let rows: Vec<FlatBoundRow> = report
                .bounds
                .iter()
                .map(|b| FlatBoundRow {
                    scenario_id: &report.scenario_id,
                    target: &b.target,
                    upper_bound: b.upper_bound,
                    grid_upper_bound: b.grid_upper_bound,
                    tolerance: b.tolerance,
                    equality_known: b.equality_known,
                    certificate_checked: b.certificate_checked,
                })
                .collect();
            csv_of(&rows)
        }
        Format::Text => {
            let mut s = format!("{}\n", report.scenario_id);
            for b in &report.bounds {
                let eq = if b.equality_known { " (equality)" } else { "" };
                s += &format!("  {} <= {:.10} ± {:.1e}{eq}\n", b.gr_symbol, b.upper_bound, b.tolerance);
                for (sym, v) in &b.bindings {
                    s += &format!("    {sym} = {:.10} (grid {:.10}, family {})\n", v.refined, v.grid, v.family);
                }
            }
            Ok(s)
        }
    }
}

pub fn render_certify(report: &CertifyReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json | Format::Csv => json(report),
        Format::Text => {
            let mut s = format!("{}\n", report.scenario_id);
            for c in &report.certificates {
                let verdict = if c.check.passed { "passes" } else { "FAILS" };
                s += &format!("  {} replay {verdict}\n", c.certificate.target.name);
                for d in &c.certificate.derivations {
                    s += &format!("    derivation {} :", d.label);
                    for st in &d.steps {
                        s += &format!(" {}", st.rule);
                    }
                    s += "\n";
                }
                for f in c.check.failures() {
                    s += &format!("    failed {} at step {:?}: {}\n", f.check, f.step, f.detail);
                }
            }
            Ok(s)
        }
    }
}

/// Sibling file holding the certificates of a bound table.
pub fn certificates_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "bounds".into());
    out.with_file_name(format!("{stem}.certificates.json"))
}

fn emit(body: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => std::fs::write(p, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout().write_all(body.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Run one parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("stringcap: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Bound(args) => {
            let cfg = args.run_config()?;
            let (report, certs) = run_bound(&cfg)?;
            let body = render_bound(&report, cfg.format.unwrap_or_default())?;
            if let Some(out) = &cfg.out {
                emit(&json(&certs)?, Some(&certificates_path(out)))?;
            }
            emit(&body, cfg.out.as_deref())?;
            Ok(0)
        }
        Command::Certify(args) => {
            let cfg = args.run_config()?;
            let report = run_certify(&cfg)?;
            emit(&render_certify(&report, cfg.format.unwrap_or_default())?, cfg.out.as_deref())?;
            if report.passed() {
                Ok(0)
            } else {
                eprintln!("stringcap: certificate replay failed");
                Ok(3)
            }
        }
        Command::Reproduce(args) => {
            let base = RunConfig {
                quad_panels: args.quad_panels,
                refine_budget: args.refine_budget,
                ..RunConfig::default()
            };
            let settings = base.settings()?;
            let rows = reproduce::reproduce(&args.table_id, &settings, args.seed.unwrap_or(0))?;
            let body = match args.format.unwrap_or(Format::Csv) {
                Format::Csv => csv_of(&rows)?,
                Format::Json => json(&rows)?,
                Format::Text => reproduce::render_text(&rows),
            };
            emit(&body, args.out.as_deref())?;
            let failed = rows.iter().filter(|r| !r.pass).count();
            if failed > 0 {
                eprintln!("stringcap: {failed} row(s) outside tolerance");
                Ok(3)
            } else {
                Ok(0)
            }
        }
        Command::Schema => {
            emit(&json(&schemars::schema_for!(RunConfig))?, None)?;
            Ok(0)
        }
    }
}

/// Size the global worker pool from `STRINGCAP_THREADS`, if set.
pub fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("STRINGCAP_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Validation(format!("STRINGCAP_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Io(e.to_string()))
}
