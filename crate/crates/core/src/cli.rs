//! Command-line front end.
//!
//! Every subcommand accepts the same pipeline flags. A `key = value` config
//! file given with `--config` supplies defaults; flags win over the file.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::embedding::FragmentSpec;
use crate::error::{Error, Result};
use crate::integrals::{read_fcidump, IntegralSet};
use crate::oracle::{bp_variance_experiment, fci_integrals, log2_slope, BpResult};
use crate::ranking::rank_environment;
use crate::scf::{run_rhf_with, ScfOptions};
use crate::solver::{adapt_run, oe_run, oe_uccsd, RunReport, SolverConfig};

#[derive(Parser, Debug)]
#[command(name = "oevqe", version, about = "Orbital-expansion ADAPT-VQE on an exact statevector simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the pipeline in the chosen mode (default oe-adapt).
    Run(RunArgs),
    /// Plain ADAPT-VQE on the full space.
    Adapt(RunArgs),
    /// Rank environment orbitals and print the δλ table.
    Rank(RunArgs),
    /// Restricted Hartree–Fock only.
    Scf(RunArgs),
    /// Exact ground state by Lanczos.
    Fci(RunArgs),
    /// Gradient variance under random Hamiltonians.
    BpVar(RunArgs),
    /// Summarize a JSON run report.
    Report(ReportArgs),
    /// Run a bond-length scan from a manifest of `distance path` lines.
    Curve(CurveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    OeAdapt,
    Adapt,
    OeUccsd,
    Fci,
    Rank,
    Scf,
    BpVar,
}

impl Mode {
    fn parse(text: &str) -> Result<Self> {
        <Self as ValueEnum>::from_str(text, true)
            .map_err(|_| Error::InvalidInput(format!("unknown mode '{text}'")))
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct RunArgs {
    /// Integrals in FCIDUMP format.
    #[arg(long)]
    pub fcidump: Option<PathBuf>,
    /// Fragment orbitals, e.g. `0,1` or `all`.
    #[arg(long)]
    pub fragment: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    /// `key = value` file with defaults for any flag or solver setting.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Total operator budget.
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub grad_threshold: Option<f64>,
    /// Bath occupation threshold.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Stages to visit, e.g. `0,2,4`.
    #[arg(long)]
    pub schedule: Option<String>,
    /// Per-stage gradient thresholds matching the schedule.
    #[arg(long)]
    pub stage_thresholds: Option<String>,
    /// Also run plain ADAPT and compare.
    #[arg(long)]
    pub baseline: bool,
    /// Attach the exact energy to the report.
    #[arg(long)]
    pub exact: bool,
    /// Qubit counts for the variance experiment.
    #[arg(long)]
    pub qubits: Option<String>,
    /// Random Hamiltonians per qubit count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// JSON report path.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// CSV table path.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// JSON report written by `run`.
    pub input: PathBuf,
    /// Write the stage table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    /// Lines of `distance path`; `#` starts a comment.
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub run: RunArgs,
}

/// Fully resolved settings after merging config file and flags.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub fcidump: Option<PathBuf>,
    pub fragment: String,
    pub mode: Mode,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub baseline: bool,
    pub exact: bool,
    pub qubits: Vec<usize>,
    pub samples: usize,
    pub json: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub solver: SolverConfig,
}

fn parse_list<T: std::str::FromStr>(key: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse()
                .map_err(|_| Error::InvalidInput(format!("bad entry '{s}' for {key}")))
        })
        .collect()
}

fn parse_value<T: std::str::FromStr>(key: &str, text: &str) -> Result<T> {
    text.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad value '{text}' for {key}")))
}

fn parse_bool(key: &str, text: &str) -> Result<bool> {
    match text.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(Error::InvalidInput(format!("bad value '{other}' for {key}"))),
    }
}

/// Parse `key = value` lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::InvalidInput(format!("config line {}: expected key = value", i + 1)));
        };
        let key = k.trim().replace('-', "_");
        if out.insert(key.clone(), v.trim().to_string()).is_some() {
            return Err(Error::InvalidInput(format!("config line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(out)
}

fn apply_solver_key(cfg: &mut SolverConfig, key: &str, v: &str) -> Result<()> {
    match key {
        "grad_threshold" => cfg.grad_threshold = parse_value(key, v)?,
        "stage_thresholds" => cfg.stage_thresholds = parse_list(key, v)?,
        "max_ops_total" | "budget" => cfg.max_ops_total = parse_value(key, v)?,
        "max_ops_per_stage" => cfg.max_ops_per_stage = Some(parse_value(key, v)?),
        "bfgs_tol" => cfg.bfgs_tol = parse_value(key, v)?,
        "bfgs_max_iter" => cfg.bfgs_max_iter = parse_value(key, v)?,
        "reopt_all" => cfg.reopt_all = parse_bool(key, v)?,
        "stage_schedule" | "schedule" => cfg.stage_schedule = Some(parse_list(key, v)?),
        "measurement_epsilon" => cfg.measurement_epsilon = parse_value(key, v)?,
        "delta" => cfg.delta = parse_value(key, v)?,
        "scf_max_iter" => cfg.scf_max_iter = parse_value(key, v)?,
        "scf_tol" => cfg.scf_tol = parse_value(key, v)?,
        _ => return Err(Error::InvalidInput(format!("unknown config key '{key}'"))),
    }
    Ok(())
}

impl RunArgs {
    /// Merge the config file (if any) under the flags.
    pub fn resolve(&self, default_mode: Mode) -> Result<RunConfig> {
        let mut rc = RunConfig {
            fcidump: None,
            fragment: "0".into(),
            mode: default_mode,
            seed: 7,
            jobs: None,
            baseline: false,
            exact: false,
            qubits: vec![4, 6, 8],
            samples: 2000,
            json: None,
            csv: None,
            solver: SolverConfig::default(),
        };
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            let base = path.parent().unwrap_or(Path::new("."));
            for (k, v) in parse_config_file(&text)? {
                match k.as_str() {
                    "fcidump" => rc.fcidump = Some(base.join(v)),
                    "fragment" => rc.fragment = v,
                    "mode" => rc.mode = Mode::parse(&v)?,
                    "seed" => rc.seed = parse_value(&k, &v)?,
                    "jobs" => rc.jobs = Some(parse_value(&k, &v)?),
                    "baseline" => rc.baseline = parse_bool(&k, &v)?,
                    "exact" => rc.exact = parse_bool(&k, &v)?,
                    "qubits" => rc.qubits = parse_list(&k, &v)?,
                    "samples" => rc.samples = parse_value(&k, &v)?,
                    "json" => rc.json = Some(base.join(v)),
                    "csv" => rc.csv = Some(base.join(v)),
                    _ => apply_solver_key(&mut rc.solver, &k, &v)?,
                }
            }
        }
        if let Some(p) = &self.fcidump {
            rc.fcidump = Some(p.clone());
        }
        if let Some(f) = &self.fragment {
            rc.fragment = f.clone();
        }
        if let Some(m) = self.mode {
            rc.mode = m;
        }
        if let Some(s) = self.seed {
            rc.seed = s;
        }
        if self.jobs.is_some() {
            rc.jobs = self.jobs;
        }
        if let Some(b) = self.budget {
            rc.solver.max_ops_total = b;
        }
        if let Some(g) = self.grad_threshold {
            rc.solver.grad_threshold = g;
        }
        if let Some(d) = self.delta {
            rc.solver.delta = d;
        }
        if let Some(s) = &self.schedule {
            rc.solver.stage_schedule = Some(parse_list("schedule", s)?);
        }
        if let Some(s) = &self.stage_thresholds {
            rc.solver.stage_thresholds = parse_list("stage-thresholds", s)?;
        }
        rc.baseline |= self.baseline;
        rc.exact |= self.exact;
        if let Some(q) = &self.qubits {
            rc.qubits = parse_list("qubits", q)?;
        }
        if let Some(s) = self.samples {
            rc.samples = s;
        }
        if self.json.is_some() {
            rc.json = self.json.clone();
        }
        if self.csv.is_some() {
            rc.csv = self.csv.clone();
        }
        if rc.jobs == Some(0) {
            return Err(Error::InvalidInput("--jobs must be at least 1".into()));
        }
        rc.solver.validate()?;
        Ok(rc)
    }
}

impl RunConfig {
    fn integrals(&self) -> Result<IntegralSet> {
        let path = self
            .fcidump
            .as_ref()
            .ok_or_else(|| Error::InvalidInput("--fcidump is required".into()))?;
        if !path.exists() {
            return Err(Error::InvalidInput(format!("{} does not exist", path.display())));
        }
        read_fcidump(path)
    }

    fn scf_options(&self) -> ScfOptions {
        ScfOptions {
            max_iter: self.solver.scf_max_iter,
            conv_tol: self.solver.scf_tol,
            ..ScfOptions::default()
        }
    }
}

/// Format with 12 significant digits in fixed notation.
pub fn fmt_energy(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x:.11}");
    }
    let mag = x.abs().log10().floor() as i32;
    let prec = (11 - mag).max(0) as usize;
    format!("{x:.prec$}")
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text)?;
    Ok(())
}

fn write_json<T: serde::Serialize>(path: &Path, v: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    write_text(path, &text)
}

struct StageRow {
    n_s: u64,
    k: u64,
    n_qubits: u64,
    ops_appended: u64,
    e_sub: f64,
    e_core: f64,
    e_g: f64,
    final_max_gradient: f64,
    stop: String,
}

impl StageRow {
    fn from_value(s: &Value) -> Result<Self> {
        let int = |k: &str| {
            s.get(k)
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::InvalidInput(format!("stage record lacks '{k}'")))
        };
        let num = |k: &str| {
            s.get(k)
                .and_then(Value::as_f64)
                .ok_or_else(|| Error::InvalidInput(format!("stage record lacks '{k}'")))
        };
        Ok(Self {
            n_s: int("n_s")?,
            k: int("k")?,
            n_qubits: int("n_qubits")?,
            ops_appended: int("ops_appended")?,
            e_sub: num("e_sub")?,
            e_core: num("e_core")?,
            e_g: num("e_g")?,
            final_max_gradient: num("final_max_gradient")?,
            stop: s.get("stop").and_then(Value::as_str).unwrap_or_default().to_string(),
        })
    }
}

fn rows_csv(rows: &[StageRow]) -> String {
    let mut out = String::from("n_s,k,n_qubits,ops_appended,total_ops,e_sub,e_core,e_g,final_max_gradient,stop\n");
    let mut total = 0;
    for s in rows {
        total += s.ops_appended;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.6e},{}",
            s.n_s,
            s.k,
            s.n_qubits,
            s.ops_appended,
            total,
            fmt_energy(s.e_sub),
            fmt_energy(s.e_core),
            fmt_energy(s.e_g),
            s.final_max_gradient,
            s.stop
        );
    }
    out
}

/// Per-stage energy table.
pub fn stage_csv(report: &RunReport) -> String {
    let rows: Vec<StageRow> = report
        .stages
        .iter()
        .map(|s| StageRow {
            n_s: s.n_s as u64,
            k: s.k as u64,
            n_qubits: s.n_qubits as u64,
            ops_appended: s.ops_appended as u64,
            e_sub: s.e_sub,
            e_core: s.e_core,
            e_g: s.e_g,
            final_max_gradient: s.final_max_gradient,
            stop: serde_json::to_value(s.stop)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
        })
        .collect();
    rows_csv(&rows)
}

/// Run one pipeline mode on one set of integrals.
pub fn execute_run(ints: &IntegralSet, rc: &RunConfig) -> Result<RunReport> {
    let frag = FragmentSpec::parse(&rc.fragment, ints.n_orb)?;
    let mut report = match rc.mode {
        Mode::OeAdapt => oe_run(ints, &frag, &rc.solver)?,
        Mode::Adapt => adapt_run(ints, &rc.solver)?,
        Mode::OeUccsd => oe_uccsd(ints, &frag, &rc.solver)?,
        other => {
            return Err(Error::InvalidInput(format!("{other:?} does not produce a run report")))
        }
    };
    if rc.exact {
        report.set_reference(fci_integrals(ints)?.energy);
    }
    if rc.baseline && rc.mode != Mode::Adapt {
        let base = adapt_run(ints, &rc.solver)?;
        report.set_baseline(&base);
    }
    Ok(report)
}

fn cmd_run(rc: &RunConfig) -> Result<()> {
    let ints = rc.integrals()?;
    let report = execute_run(&ints, rc)?;
    println!("mode        {}", report.mode);
    println!("E_hf        {}", fmt_energy(report.e_hf));
    for s in &report.stages {
        println!("stage {:>3}   k={:<3} ops+{:<4} E_g {}", s.n_s, s.k, s.ops_appended, fmt_energy(s.e_g));
    }
    println!("E_g         {}", fmt_energy(report.final_e_g));
    println!("operators   {}", report.total_ops);
    if let (Some(e), Some(err)) = (report.e_fci, report.error) {
        println!("E_fci       {}", fmt_energy(e));
        println!("error       {err:.3e}");
    }
    if let Some(b) = &report.baseline {
        println!("baseline    {} ({} operators)", fmt_energy(b.final_e_g), b.total_ops);
    }
    if let Some(m) = &report.measurement {
        println!("shots       {} (full-space {})", m.m_total, m.m_base);
    }
    if let Some(p) = &rc.json {
        write_json(p, &report)?;
    }
    if let Some(p) = &rc.csv {
        write_text(p, &stage_csv(&report))?;
    }
    Ok(())
}

fn cmd_scf(rc: &RunConfig) -> Result<()> {
    let ints = rc.integrals()?;
    let sol = run_rhf_with(&ints, &rc.scf_options())?;
    println!("E_hf        {}", fmt_energy(sol.energy));
    println!("iterations  {}", sol.iterations);
    if let Some(p) = &rc.json {
        write_json(p, &sol)?;
    }
    if let Some(p) = &rc.csv {
        let mut out = String::from("index,orbital_energy\n");
        for (i, e) in sol.orbital_energies.iter().enumerate() {
            let _ = writeln!(out, "{i},{}", fmt_energy(*e));
        }
        write_text(p, &out)?;
    }
    Ok(())
}

fn cmd_fci(rc: &RunConfig) -> Result<()> {
    let ints = rc.integrals()?;
    let r = fci_integrals(&ints)?;
    println!("E_fci       {}", fmt_energy(r.energy));
    println!("dimension   {}", r.dimension);
    if let Some(p) = &rc.json {
        write_json(
            p,
            &json!({
                "label": ints.label,
                "e_fci": r.energy,
                "electronic": r.electronic,
                "dimension": r.dimension,
                "iterations": r.iterations,
            }),
        )?;
    }
    if let Some(p) = &rc.csv {
        write_text(p, &format!("e_fci,dimension\n{},{}\n", fmt_energy(r.energy), r.dimension))?;
    }
    Ok(())
}

fn cmd_rank(rc: &RunConfig) -> Result<()> {
    let ints = rc.integrals()?;
    let frag = FragmentSpec::parse(&rc.fragment, ints.n_orb)?;
    let sol = run_rhf_with(&ints, &rc.scf_options())?;
    let basis = crate::embedding::build_bath(&sol.density, &frag, rc.solver.delta)?;
    let ranked = rank_environment(&ints, &basis)?;
    let mut out = String::from("rank,class,delta_lambda\n");
    for (i, (d, c)) in ranked.delta_lambda.iter().zip(&ranked.class_of).enumerate() {
        let class = match c {
            crate::projection::EnvTag::Core => "core",
            crate::projection::EnvTag::Virtual => "virtual",
        };
        let _ = writeln!(out, "{},{class},{d:.12e}", i + 1);
    }
    println!(
        "L_A={} L_B={} core={} virtual={}",
        basis.n_frag(),
        basis.n_bath(),
        basis.n_core(),
        basis.n_vir()
    );
    print!("{out}");
    if let Some(p) = &rc.json {
        write_json(p, &ranked)?;
    }
    if let Some(p) = &rc.csv {
        write_text(p, &out)?;
    }
    Ok(())
}

/// CSV rows for the variance experiment.
pub fn bp_csv(rows: &[BpResult]) -> String {
    let mut out = String::from("n_qubits,mean,variance,n_samples\n");
    for r in rows {
        let _ = writeln!(out, "{},{:.12e},{:.12e},{}", r.n_qubits, r.mean, r.variance, r.n_samples);
    }
    out
}

fn cmd_bp(rc: &RunConfig) -> Result<()> {
    let rows = rc
        .qubits
        .iter()
        .map(|&n| bp_variance_experiment(n, rc.samples, rc.seed))
        .collect::<Result<Vec<_>>>()?;
    let text = bp_csv(&rows);
    print!("{text}");
    if rows.len() >= 2 {
        let pts: Vec<(usize, f64)> = rows.iter().map(|r| (r.n_qubits, r.variance)).collect();
        println!("slope log2(var) per qubit: {:.4}", log2_slope(&pts));
    }
    if let Some(p) = &rc.json {
        write_json(p, &rows)?;
    }
    if let Some(p) = &rc.csv {
        write_text(p, &text)?;
    }
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<()> {
    let text = std::fs::read_to_string(&args.input)?;
    let v: Value = serde_json::from_str(&text)?;
    let stages = v
        .get("stages")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::InvalidInput("not a run report: no stages".into()))?;
    let num = |x: &Value, k: &str| x.get(k).and_then(Value::as_f64);
    println!("mode        {}", v.get("mode").and_then(Value::as_str).unwrap_or("?"));
    println!("label       {}", v.get("label").and_then(Value::as_str).unwrap_or(""));
    let rows = stages.iter().map(StageRow::from_value).collect::<Result<Vec<_>>>()?;
    for r in &rows {
        println!("stage {:>3}   k={:<3} ops+{:<4} E_g {}", r.n_s, r.k, r.ops_appended, fmt_energy(r.e_g));
    }
    if let Some(e) = num(&v, "final_e_g") {
        println!("E_g         {}", fmt_energy(e));
    }
    if let Some(n) = v.get("total_ops").and_then(Value::as_u64) {
        println!("operators   {n}");
    }
    if let Some(e) = num(&v, "error") {
        println!("error       {e:.3e}");
    }
    if let Some(p) = &args.csv {
        write_text(p, &rows_csv(&rows))?;
    }
    Ok(())
}

/// `(distance, path)` pairs; relative paths are resolved against `base`.
pub fn parse_manifest(text: &str, base: &Path) -> Result<Vec<(f64, PathBuf)>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty());
        let (Some(d), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::InvalidInput(format!("manifest line {}: expected 'distance path'", i + 1)));
        };
        let d: f64 = d
            .parse()
            .map_err(|_| Error::InvalidInput(format!("manifest line {}: bad distance '{d}'", i + 1)))?;
        out.push((d, base.join(p)));
    }
    if out.is_empty() {
        return Err(Error::InvalidInput("manifest lists no points".into()));
    }
    Ok(out)
}

struct CurveRow {
    distance: f64,
    oe: RunReport,
    adapt: Option<RunReport>,
    e_fci: f64,
}

fn curve_point(distance: f64, path: &Path, rc: &RunConfig) -> Result<CurveRow> {
    let ints = read_fcidump(path)?;
    let frag = FragmentSpec::parse(&rc.fragment, ints.n_orb)?;
    let e_fci = fci_integrals(&ints)?.energy;
    let mut oe = oe_run(&ints, &frag, &rc.solver)?;
    oe.set_reference(e_fci);
    let adapt = if rc.baseline {
        let mut base = adapt_run(&ints, &rc.solver)?;
        base.set_reference(e_fci);
        oe.set_baseline(&base);
        Some(base)
    } else {
        None
    };
    Ok(CurveRow {
        distance,
        oe,
        adapt,
        e_fci,
    })
}

fn curve_csv(rows: &[CurveRow], baseline: bool) -> String {
    let mut out = if baseline {
        String::from("distance,e_oe,e_adapt,e_fci,error_oe,error_adapt,ops_oe,ops_adapt,m_oe,m_adapt\n")
    } else {
        String::from("distance,e_oe,e_fci,error_oe,ops_oe,m_oe\n")
    };
    for r in rows {
        let m_oe = r.oe.measurement.as_ref().map_or(0, |m| m.m_total);
        match &r.adapt {
            Some(a) if baseline => {
                let m_a = r.oe.measurement.as_ref().map_or(0, |m| m.m_base);
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:.6e},{:.6e},{},{},{},{}",
                    r.distance,
                    fmt_energy(r.oe.final_e_g),
                    fmt_energy(a.final_e_g),
                    fmt_energy(r.e_fci),
                    (r.oe.final_e_g - r.e_fci).abs(),
                    (a.final_e_g - r.e_fci).abs(),
                    r.oe.total_ops,
                    a.total_ops,
                    m_oe,
                    m_a
                );
            }
            _ => {
                let _ = writeln!(
                    out,
                    "{},{},{},{:.6e},{},{}",
                    r.distance,
                    fmt_energy(r.oe.final_e_g),
                    fmt_energy(r.e_fci),
                    (r.oe.final_e_g - r.e_fci).abs(),
                    r.oe.total_ops,
                    m_oe
                );
            }
        }
    }
    out
}

fn cmd_curve(args: &CurveArgs) -> Result<()> {
    let rc = args.run.resolve(Mode::OeAdapt)?;
    let text = std::fs::read_to_string(&args.manifest)?;
    let base = args.manifest.parent().unwrap_or(Path::new("."));
    let points = parse_manifest(&text, base)?;
    if let Some((_, p)) = points.iter().find(|(_, p)| !p.exists()) {
        return Err(Error::InvalidInput(format!("{} does not exist", p.display())));
    }
    let results: Vec<Result<CurveRow>> = points
        .par_iter()
        .map(|(d, p)| curve_point(*d, p, &rc))
        .collect();
    let mut rows = Vec::new();
    let mut failure = None;
    for (r, (d, _)) in results.into_iter().zip(&points) {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => {
                eprintln!("curve point d={d} failed");
                failure = Some(e);
                break;
            }
        }
    }
    let text = curve_csv(&rows, rc.baseline);
    print!("{text}");
    if let Some(p) = &rc.csv {
        write_text(p, &text)?;
    }
    if let Some(p) = &rc.json {
        let reports: Vec<&RunReport> = rows.iter().map(|r| &r.oe).collect();
        write_json(p, &reports)?;
    }
    match failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn init_jobs(jobs: Option<usize>) {
    if let Some(n) = jobs {
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            log::warn!("thread pool already initialized; ignoring --jobs");
        }
    }
}

/// Dispatch a parsed command.
pub fn dispatch(cli: &Cli) -> Result<()> {
    let (args, mode) = match &cli.command {
        Command::Report(a) => return cmd_report(a),
        Command::Curve(a) => {
            init_jobs(a.run.jobs);
            return cmd_curve(a);
        }
        Command::Run(a) => (a, None),
        Command::Adapt(a) => (a, Some(Mode::Adapt)),
        Command::Rank(a) => (a, Some(Mode::Rank)),
        Command::Scf(a) => (a, Some(Mode::Scf)),
        Command::Fci(a) => (a, Some(Mode::Fci)),
        Command::BpVar(a) => (a, Some(Mode::BpVar)),
    };
    let mut rc = args.resolve(mode.unwrap_or(Mode::OeAdapt))?;
    if let Some(m) = mode {
        rc.mode = m;
    }
    init_jobs(rc.jobs);
    match rc.mode {
        Mode::OeAdapt | Mode::Adapt | Mode::OeUccsd => cmd_run(&rc),
        Mode::Fci => cmd_fci(&rc),
        Mode::Scf => cmd_scf(&rc),
        Mode::Rank => cmd_rank(&rc),
        Mode::BpVar => cmd_bp(&rc),
    }
}

/// Exit status for an error: 1 for input problems, 2 for numerical failures.
pub fn exit_code(e: &Error) -> i32 {
    if e.is_input_error() {
        1
    } else {
        2
    }
}

/// Parse `argv`, run, and return the process exit code.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
