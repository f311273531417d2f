//! `scmfkit` command-line front end.
//!
//! Exit codes: 0 success, 1 a run finished but did not converge, was
//! infeasible or failed a check, 2 usage or configuration error.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use commands::{Outcome, Solver};
use config::RunConfig;

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, config or model; exit code 2.
    Usage(String),
    /// The computation itself failed; exit code 1.
    Run(String),
}

impl From<scmfkit::Error> for CliError {
    fn from(e: scmfkit::Error) -> Self {
        use scmfkit::Error::*;
        match e {
            Config(_) | Label(_) | ConjugateMissing(_) | Domain(_) | Dimension(_) | InvalidOccupation(_)
            | TooLarge(_) | Sector(_) => CliError::Usage(e.to_string()),
            _ => CliError::Run(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "scmfkit", version, about = "Mean-field, Kohn-Sham and exact-oracle calculations on small fermion models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// TOML run configuration; command-line flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model preset, e.g. `hubbard_chain:L=6,tau=1,U=4`.
    #[arg(long)]
    model: Option<String>,
    /// Particle number.
    #[arg(long = "N")]
    particles: Option<usize>,
    /// Seed for random starts (default: $SCMFKIT_SEED, else 42).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default `results`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct SolverArgs {
    #[arg(long)]
    mixing: Option<f64>,
    /// Convergence threshold on the density change.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// `core` or `random`.
    #[arg(long)]
    initial: Option<String>,
    /// Vary one model parameter, e.g. `U=1,2,4`; runs execute in parallel.
    #[arg(long)]
    sweep: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Hartree-Fock.
    SolveHf(SolveArgs),
    /// Kohn-Sham.
    SolveKs(SolveArgs),
    /// Hartree-Fock-Bogoliubov.
    SolveHfb(SolveArgs),
    /// Kohn-Sham-Bogoliubov-de Gennes.
    SolveKsbdg(SolveArgs),
    /// Exact diagonalization in a fixed-N or full Fock sector.
    Oracle {
        #[command(flatten)]
        common: Common,
        /// `fixed` or `full`.
        #[arg(long)]
        sector: Option<String>,
        /// Subtract `mu N` from the Hamiltonian.
        #[arg(long)]
        mu: Option<f64>,
    },
    /// Constrained-search energy along a grid of one observable.
    HkScan {
        #[command(flatten)]
        common: Common,
        /// `rho[k]`, `re rho[k,l]`, `im rho[k,l]` or `trace` (1-based).
        #[arg(long)]
        observable: Option<String>,
        /// `lo:hi:points`.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Two-step minimization example with kink detection.
    Appendix {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        d: Option<f64>,
    },
    /// Can a Slater determinant reproduce a target density?
    ProbeRep {
        #[command(flatten)]
        common: Common,
        /// `ground` (exact ground state) or `slater` (random determinant).
        #[arg(long)]
        target: Option<String>,
        /// `density` or `occupations`.
        #[arg(long)]
        observables: Option<String>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Run the invariant suite and print a pass/fail table.
    Check {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Clone)]
struct SolveArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    solver: SolverArgs,
}

fn base_config(common: &Common) -> Result<RunConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p).map_err(CliError::Usage)?,
        None => RunConfig::default(),
    };
    let mut cli = RunConfig::default();
    cli.model.preset = common.model.clone();
    cli.model.particles = common.particles;
    cli.task.seed = common.seed;
    cli.output.dir = common.out.clone();
    cfg.overlay(cli);
    Ok(cfg)
}

fn build(command: &Command) -> Result<(&'static str, RunConfig), CliError> {
    let (name, common) = match command {
        Command::SolveHf(a) => ("solve-hf", &a.common),
        Command::SolveKs(a) => ("solve-ks", &a.common),
        Command::SolveHfb(a) => ("solve-hfb", &a.common),
        Command::SolveKsbdg(a) => ("solve-ksbdg", &a.common),
        Command::Oracle { common, .. } => ("oracle", common),
        Command::HkScan { common, .. } => ("hk-scan", common),
        Command::Appendix { common, .. } => ("appendix", common),
        Command::ProbeRep { common, .. } => ("probe-rep", common),
        Command::Check { common } => ("check", common),
    };
    let mut cfg = base_config(common)?;
    let mut cli = RunConfig::default();
    match command {
        Command::SolveHf(a) | Command::SolveKs(a) | Command::SolveHfb(a) | Command::SolveKsbdg(a) => {
            cli.solver.mixing = a.solver.mixing;
            cli.solver.density_tol = a.solver.tol;
            cli.solver.max_iter = a.solver.max_iter;
            cli.solver.initial = a.solver.initial.clone();
            cli.task.sweep = a.solver.sweep.clone();
        }
        Command::Oracle { sector, mu, .. } => {
            cli.task.sector = sector.clone();
            cli.task.mu = *mu;
        }
        Command::HkScan { observable, grid, restarts, .. } => {
            cli.task.observable = observable.clone();
            cli.task.grid = grid.clone();
            cli.task.restarts = *restarts;
        }
        Command::Appendix { d, .. } => cli.task.d = *d,
        Command::ProbeRep { target, observables, restarts, .. } => {
            cli.task.target = target.clone();
            cli.task.observables = observables.clone();
            cli.task.restarts = *restarts;
        }
        Command::Check { .. } => {}
    }
    cfg.overlay(cli);
    cfg.resolve_seed().map_err(CliError::Usage)?;
    Ok((name, cfg))
}

/// Replaces or adds `key=value` in a `name:key=value,...` model spec.
fn with_param(spec: &str, key: &str, value: &str) -> String {
    let (name, body) = spec.split_once(':').unwrap_or((spec, ""));
    let mut items: Vec<String> = body
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty() && s.split_once('=').map(|(k, _)| k.trim()) != Some(key))
        .map(String::from)
        .collect();
    items.push(format!("{key}={value}"));
    format!("{name}:{}", items.join(","))
}

fn run_one(command: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let seed = cfg.task.seed.unwrap_or(config::DEFAULT_SEED);
    match command {
        Command::SolveHf(_) => commands::solve(Solver::Hf, cfg, seed),
        Command::SolveKs(_) => commands::solve(Solver::Ks, cfg, seed),
        Command::SolveHfb(_) => commands::solve(Solver::Hfb, cfg, seed),
        Command::SolveKsbdg(_) => commands::solve(Solver::Ksbdg, cfg, seed),
        Command::Oracle { .. } => commands::oracle(cfg),
        Command::HkScan { .. } => commands::hk(cfg, seed),
        Command::Appendix { .. } => commands::appendix(cfg),
        Command::ProbeRep { .. } => commands::probe(cfg, seed),
        Command::Check { .. } => commands::check(cfg, seed),
    }
}

fn emit(name: &str, stem: &str, cfg: &RunConfig, out: &Outcome, elapsed: f64) -> Result<(), CliError> {
    let dir = cfg.output.dir.clone().unwrap_or_else(|| PathBuf::from("results"));
    let io = |e: std::io::Error| CliError::Run(format!("writing results to {}: {e}", dir.display()));
    let path = out.doc.write(&dir, stem, elapsed).map_err(io)?;
    for (file, body) in &out.attachments {
        let file = if stem == name { file.clone() } else { format!("{stem}-{file}") };
        std::fs::write(dir.join(file), body).map_err(io)?;
    }
    println!("{name}: wrote {}", path.display());
    Ok(())
}

fn dispatch(command: &Command) -> Result<bool, CliError> {
    let (name, cfg) = build(command)?;
    let Some(sweep) = cfg.task.sweep.clone() else {
        let t = Instant::now();
        let out = run_one(command, &cfg)?;
        emit(name, name, &cfg, &out, t.elapsed().as_secs_f64())?;
        return Ok(out.ok);
    };

    let (key, values) = sweep
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("sweep must be `key=v1,v2,...`, got `{sweep}`")))?;
    let spec = cfg.model.preset.clone().ok_or_else(|| CliError::Usage("sweep needs a model".into()))?;
    let runs: Vec<(String, RunConfig)> = values
        .split(',')
        .map(|v| {
            let mut c = cfg.clone();
            c.model.preset = Some(with_param(&spec, key.trim(), v.trim()));
            (v.trim().to_string(), c)
        })
        .collect();
    let results: Vec<(Result<Outcome, CliError>, f64)> = runs
        .par_iter()
        .map(|(_, c)| {
            let t = Instant::now();
            (run_one(command, c), t.elapsed().as_secs_f64())
        })
        .collect();
    let mut ok = true;
    for (i, ((value, c), (res, elapsed))) in runs.iter().zip(results).enumerate() {
        let out = res?;
        emit(name, &format!("{name}-{:03}", i + 1), c, &out, elapsed)?;
        println!("  {key}={value}: {}", if out.ok { "ok" } else { "not converged" });
        ok &= out.ok;
    }
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_replaces_parameter() {
        assert_eq!(with_param("pairing:G=1,levels=3", "G", "2"), "pairing:levels=3,G=2");
        assert_eq!(with_param("pairing", "G", "2"), "pairing:G=2");
    }
}
