//! Run configuration from a TOML file, merged with command-line overrides.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use scmfkit::scf::{InitialGuess, SolverConfig};

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_ENV: &str = "SCMFKIT_SEED";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub task: TaskSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    /// `name:key=value,...`.
    pub preset: Option<String>,
    /// Particle number; defaults to the preset's own.
    pub particles: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub mixing: Option<f64>,
    pub density_tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub trace_tol: Option<f64>,
    pub mu_padding: Option<f64>,
    /// `core` or `random`.
    pub initial: Option<String>,
    pub pair_seed: Option<f64>,
    pub divergence_limit: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TaskSection {
    pub seed: Option<u64>,
    /// Appendix scale `d`.
    pub d: Option<f64>,
    /// Constraint observable for `hk-scan`, e.g. `rho[1,1]`.
    pub observable: Option<String>,
    /// `lo:hi:points`.
    pub grid: Option<String>,
    pub restarts: Option<usize>,
    /// `ground` or `slater` for `probe-rep`.
    pub target: Option<String>,
    /// `density` or `occupations` for `probe-rep`.
    pub observables: Option<String>,
    /// `fixed` or `full` for `oracle`.
    pub sector: Option<String>,
    /// Chemical potential subtracted in the full-sector oracle.
    pub mu: Option<f64>,
    /// `key=v1,v2,...` parameter sweep over the model preset.
    pub sweep: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a config file; parse errors carry the file name and line.
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// Fields of `other` that are set replace those of `self`.
    pub fn overlay(&mut self, other: RunConfig) {
        macro_rules! take {
            ($($sec:ident . $field:ident),* $(,)?) => {
                $(if other.$sec.$field.is_some() { self.$sec.$field = other.$sec.$field; })*
            };
        }
        take!(
            model.preset, model.particles,
            solver.mixing, solver.density_tol, solver.max_iter, solver.trace_tol, solver.mu_padding,
            solver.initial, solver.pair_seed, solver.divergence_limit,
            task.seed, task.d, task.observable, task.grid, task.restarts, task.target, task.observables,
            task.sector, task.mu, task.sweep,
            output.dir,
        );
    }

    /// Seed from the config, else `SCMFKIT_SEED`, else 42.
    pub fn resolve_seed(&mut self) -> Result<u64, String> {
        let seed = match self.task.seed {
            Some(s) => s,
            None => match std::env::var(SEED_ENV) {
                Ok(v) => v.trim().parse().map_err(|_| format!("{SEED_ENV} must be an unsigned integer, got `{v}`"))?,
                Err(_) => DEFAULT_SEED,
            },
        };
        self.task.seed = Some(seed);
        Ok(seed)
    }

    pub fn solver_config(&self, seed: u64) -> Result<SolverConfig, String> {
        let d = SolverConfig::default();
        let s = &self.solver;
        let initial = match s.initial.as_deref().unwrap_or("core") {
            "core" => InitialGuess::Core,
            "random" => InitialGuess::Random(seed),
            other => return Err(format!("solver.initial must be `core` or `random`, got `{other}`")),
        };
        let cfg = SolverConfig {
            mixing: s.mixing.unwrap_or(d.mixing),
            density_tol: s.density_tol.unwrap_or(d.density_tol),
            max_iter: s.max_iter.unwrap_or(d.max_iter),
            trace_tol: s.trace_tol.unwrap_or(d.trace_tol),
            mu_padding: s.mu_padding.unwrap_or(d.mu_padding),
            initial,
            pair_seed: s.pair_seed.unwrap_or(d.pair_seed),
            divergence_limit: s.divergence_limit.unwrap_or(d.divergence_limit),
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    /// The fully resolved config as TOML, echoed into every result.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses `lo:hi:points` into an evenly spaced ascending grid.
pub fn parse_grid(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || format!("grid must be `lo:hi:points` with lo < hi and points ≥ 2, got `{s}`");
    if parts.len() != 3 {
        return Err(bad());
    }
    let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if !(lo < hi) || n < 2 || !lo.is_finite() || !hi.is_finite() {
        return Err(bad());
    }
    let step = (hi - lo) / (n - 1) as f64;
    Ok((0..n).map(|i| if i == n - 1 { hi } else { lo + step * i as f64 }).collect())
}
