//! Command-line front end.
//!
//! Every command reads an optional flat JSON config, applies flag
//! overrides, runs, and writes its files plus `manifest.json` into the
//! output directory. Files are only written once the computation has
//! succeeded; if writing fails part-way the files already written are
//! removed.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::harness::{
    convergence_study, ladder, ConvergenceReport, Dimension, EnergyReport, Experiment, ExperimentConfig,
    Level, LevelResult,
};
use crate::sde::{gbm_strong_order, GbmProblem, Scheme};

pub const SEED_ENV: &str = "SMDG_SEED";

#[derive(Debug, Parser)]
#[command(name = "smdg", version, about = "DG solvers for stochastic Maxwell equations with multiplicative noise")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Flat JSON experiment configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Root seed (overrides the config file and SMDG_SEED).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub samples: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads for the Monte Carlo loop.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Also write the final fields of sample 0 to fields.json (run1d/run2d).
    #[arg(long, global = true)]
    pub dump_fields: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Monte Carlo run of the 1D problem at the configured resolution.
    Run1d,
    /// Monte Carlo run of the 2D problem at the configured resolution.
    Run2d,
    /// Refinement ladder with RMS errors and rates.
    Convergence,
    /// Averaged energy history with its reference curve.
    Energy,
    /// Strong-order check of the time integrators on geometric Brownian motion.
    OrderCheck,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Run1d => "run1d",
            Command::Run2d => "run2d",
            Command::Convergence => "convergence",
            Command::Energy => "energy",
            Command::OrderCheck => "order-check",
        }
    }
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub artifact_version: &'static str,
    pub command: &'static str,
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub seed: u64,
    pub runtime_seconds: f64,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
    pub results: Value,
}

/// Resolve the configuration: file values, then `SMDG_SEED` if the file
/// has no seed, then flags.
pub fn parse_config(path: Option<&Path>, seed: Option<u64>, samples: Option<usize>, env_seed: Option<&str>) -> Result<ExperimentConfig> {
    let value: Value = match path {
        Some(p) => serde_json::from_str(&std::fs::read_to_string(p)?)?,
        None => json!({}),
    };
    let has_seed = value.get("seed").is_some();
    let mut cfg: ExperimentConfig = serde_json::from_value(value)?;
    if !has_seed {
        if let Some(s) = env_seed {
            cfg.seed = s
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV} is not an unsigned integer: {s:?}")))?;
        }
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    if let Some(n) = samples {
        cfg.samples = Some(n);
    }
    cfg.validate()?;
    Ok(cfg)
}

struct Output {
    files: Vec<(String, String)>,
    notes: Vec<String>,
    results: Value,
}

fn single_level_table(exp: &Experiment, mc: &crate::harness::MonteCarloResult) -> ConvergenceReport {
    let c = exp.config();
    ConvergenceReport {
        dimension: c.dimension,
        fields: mc.fields.clone(),
        levels: vec![LevelResult {
            level: Level {
                nx: c.nx,
                ny: c.ny(),
                nt: c.nt,
            },
            rms: mc.rms.clone(),
            rms_se: mc.rms_se.clone(),
        }],
        rates: Vec::new(),
        samples: mc.samples,
        seed: mc.seed,
    }
}

fn dump_fields(exp: &Experiment) -> Result<String> {
    let (x, _) = exp.simulate(0, crate::harness::Draws::Random)?;
    let c = exp.config();
    let fields = exp.fields();
    let n = x.len() / fields.len();
    let nm = c.degree + 1;
    let (n_cells, n_modes, layout) = match c.dimension {
        Dimension::One => (c.nx, nm, "data[cell * n_modes + mode], cell j covers [x_j, x_{j+1}] of a uniform mesh; orthonormal Legendre modes"),
        Dimension::Two => (
            c.nx * c.ny(),
            nm * nm,
            "data[cell * n_modes + mode], cell = i * ny + j, mode = lx * (k + 1) + ly; orthonormal tensor Legendre modes",
        ),
    };
    let mut obj = serde_json::Map::new();
    for (f, name) in fields.iter().enumerate() {
        obj.insert((*name).into(), json!(x[f * n..(f + 1) * n]));
    }
    Ok(serde_json::to_string_pretty(&json!({
        "sample": 0,
        "time": c.t_final(),
        "n_cells": n_cells,
        "n_modes": n_modes,
        "layout": layout,
        "fields": obj,
    }))?)
}

fn execute(cli: &Cli, cfg: &ExperimentConfig) -> Result<Output> {
    let hash = cfg.hash();
    match cli.command {
        Command::Run1d | Command::Run2d => {
            let exp = Experiment::new(cfg)?;
            let mc = exp.monte_carlo()?;
            let mut files = vec![
                ("table.csv".to_string(), single_level_table(&exp, &mc).to_csv(&hash)),
                ("energy.csv".to_string(), EnergyReport::from(mc.clone()).to_csv(&hash)),
            ];
            if cli.dump_fields {
                files.push(("fields.json".into(), dump_fields(&exp)?));
            }
            Ok(Output {
                files,
                notes: exp.notes().to_vec(),
                results: json!({ "fields": mc.fields, "rms": mc.rms, "rms_bootstrap_se": mc.rms_se }),
            })
        }
        Command::Convergence => {
            let rep = convergence_study(cfg, &ladder(cfg))?;
            let se: Vec<_> = rep.levels.iter().map(|l| json!({ "level": l.level, "rms_bootstrap_se": l.rms_se })).collect();
            Ok(Output {
                files: vec![("table.csv".into(), rep.to_csv(&hash))],
                notes: Experiment::new(cfg)?.notes().to_vec(),
                results: json!({ "fields": rep.fields, "rates": rep.rates, "standard_errors": se }),
            })
        }
        Command::Energy => {
            let exp = Experiment::new(cfg)?;
            let rep = EnergyReport::from(exp.monte_carlo()?);
            Ok(Output {
                results: json!({ "max_relative_deviation": rep.max_relative_deviation() }),
                files: vec![("energy.csv".into(), rep.to_csv(&hash))],
                notes: exp.notes().to_vec(),
            })
        }
        Command::OrderCheck => {
            let steps = [8, 16, 32, 64, 128];
            let samples = cli.samples.unwrap_or(1000);
            let p = GbmProblem::default();
            let t = gbm_strong_order(&p, Scheme::Taylor2, &steps, samples, cfg.substeps, cfg.seed)?;
            let e = gbm_strong_order(&p, Scheme::EulerMaruyama, &steps, samples, cfg.substeps, cfg.seed)?;
            let mut csv = crate::harness::report_header(&hash, cfg.seed);
            csv.push_str("steps,tau,err_taylor2,err_euler_maruyama\n");
            for (i, n) in steps.iter().enumerate() {
                csv.push_str(&format!(
                    "{n},{},{},{}\n",
                    crate::harness::sci(p.t_final / *n as f64),
                    crate::harness::sci(t.errors[i]),
                    crate::harness::sci(e.errors[i])
                ));
            }
            Ok(Output {
                files: vec![("table.csv".into(), csv)],
                notes: Vec::new(),
                results: json!({ "problem": p, "samples": samples, "slope_taylor2": t.slope, "slope_euler_maruyama": e.slope }),
            })
        }
    }
}

fn write_all(dir: &Path, files: &[(String, String)]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for (name, body) in files {
        let path = dir.join(name);
        if let Err(e) = std::fs::write(&path, body) {
            for p in &written {
                let _ = std::fs::remove_file(p);
            }
            return Err(e.into());
        }
        written.push(path);
    }
    Ok(written)
}

/// Run a parsed command line; returns the manifest of a successful run.
pub fn run(cli: &Cli) -> Result<RunManifest> {
    let start = Instant::now();
    let env_seed = std::env::var(SEED_ENV).ok();
    let mut cfg = parse_config(cli.config.as_deref(), cli.seed, cli.samples, env_seed.as_deref())?;
    match cli.command {
        Command::Run1d => cfg.dimension = Dimension::One,
        Command::Run2d => cfg.dimension = Dimension::Two,
        _ => {}
    }
    cfg.validate()?;
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Error::Config("--threads must be positive".into()));
        }
        // a pool built earlier in the same process stays in place
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let out = execute(cli, &cfg)?;
    let mut files = out.files;
    let mut outputs: Vec<String> = files.iter().map(|(n, _)| cli.out.join(n).display().to_string()).collect();
    outputs.push(cli.out.join("manifest.json").display().to_string());
    let manifest = RunManifest {
        artifact_version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        config: cfg.resolved(),
        config_hash: cfg.hash(),
        seed: cfg.seed,
        runtime_seconds: start.elapsed().as_secs_f64(),
        outputs,
        notes: out.notes,
        results: out.results,
    };
    files.push(("manifest.json".into(), serde_json::to_string_pretty(&manifest)?));
    write_all(&cli.out, &files)?;
    Ok(manifest)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(m) => {
            for p in &m.outputs {
                println!("{p}");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::WellPosedness(_) | Error::Json(_) => 2,
                _ => 1,
            }
        }
    }
}
