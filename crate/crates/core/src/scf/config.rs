//! Solver settings and reports.

use crate::error::{Error, Result};
use crate::matrix::{CMat, C64};

/// Starting point of a self-consistent iteration.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum InitialGuess {
    /// Aufbau occupation of the fields evaluated at `ϱ = 0`.
    #[default]
    Core,
    /// Random Slater determinant from a seeded generator.
    Random(u64),
    /// Caller-supplied `ϱ` and, for pairing solvers, `κ`.
    Provided { rho: CMat, kappa: Option<CMat> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Linear mixing weight of the new density.
    pub mixing: f64,
    /// Convergence threshold on the Frobenius change of the densities.
    pub density_tol: f64,
    pub max_iter: usize,
    /// Required `|tr ϱ − N|` for the chemical-potential search.
    pub trace_tol: f64,
    /// Padding of the initial μ bracket around the spectrum of `h`.
    pub mu_padding: f64,
    pub initial: InitialGuess,
    /// Initial `κ_{kk̄}` on seeded pairs for pairing solvers.
    pub pair_seed: f64,
    /// Abort when the energy changes by more than this between iterations.
    pub divergence_limit: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mixing: 0.5,
            density_tol: 1e-10,
            max_iter: 500,
            trace_tol: 1e-8,
            mu_padding: 10.0,
            initial: InitialGuess::Core,
            pair_seed: 0.1,
            divergence_limit: 1e3,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.mixing > 0.0 && self.mixing <= 1.0) {
            return Err(Error::Config(format!("mixing must lie in (0, 1], got {}", self.mixing)));
        }
        let positive = [self.density_tol, self.trace_tol, self.mu_padding, self.divergence_limit];
        if positive.iter().any(|v| !(*v > 0.0)) || self.max_iter == 0 {
            return Err(Error::Config("solver tolerances, padding and iteration cap must be positive".into()));
        }
        if !self.pair_seed.is_finite() {
            return Err(Error::Config("pair seed must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// `|ε_N − ε_{N+1}|` (or the smallest quasiparticle energy) below `1e−9`;
    /// occupation resolved by index order.
    DegenerateFermiLevel { gap: f64 },
    NotConverged { iterations: usize, density_change: f64 },
    Diverged { iteration: usize, energy_change: f64 },
    /// The μ search ended without meeting the trace tolerance.
    ParticleNumber { error: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::DegenerateFermiLevel { gap } => write!(f, "degenerate Fermi level (gap {gap:.3e})"),
            Self::NotConverged { iterations, density_change } => {
                write!(f, "not converged after {iterations} iterations (density change {density_change:.3e})")
            }
            Self::Diverged { iteration, energy_change } => {
                write!(f, "diverged at iteration {iteration} (energy change {energy_change:.3e})")
            }
            Self::ParticleNumber { error } => write!(f, "particle number missed by {error:.3e}"),
        }
    }
}

/// `z` with the fully occupied canonical orbitals split off.
#[derive(Debug, Clone, PartialEq)]
pub struct Condensate {
    pub z: CMat,
    /// Columns are the blocked (occupation one) canonical orbitals.
    pub blocked: CMat,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    pub converged: bool,
    pub energy: f64,
    pub rho: CMat,
    pub kappa: Option<CMat>,
    /// Generalized density for pairing solvers.
    pub r: Option<CMat>,
    pub mu: Option<f64>,
    /// Single-particle energies, or the `M` non-negative quasiparticle energies.
    pub spectrum: Vec<f64>,
    /// Full `2M` quasiparticle spectrum for pairing solvers.
    pub qp_spectrum: Option<Vec<f64>>,
    /// Orbitals `𝒰` (columns) or the Bogoliubov matrix `W`.
    pub orbitals: CMat,
    pub iterations: usize,
    pub density_change: f64,
    /// `‖ϱ² − ϱ‖_F`, or `‖R² − R‖_F` for pairing solvers.
    pub idempotency_defect: f64,
    pub trace_error: f64,
    /// `‖[h, ϱ]‖_F`, or `‖[H, R]‖_F` for pairing solvers.
    pub commutator: f64,
    /// Largest `|ε_i + ε_{2M+1−i}|` of the sorted quasiparticle spectrum.
    pub spectral_asymmetry: Option<f64>,
    pub q: Vec<C64>,
    pub lambda: Vec<C64>,
    pub condensate: Option<Condensate>,
    /// κ comes from an auxiliary KSBdG system and need not be physical.
    pub kappa_auxiliary: bool,
    pub warnings: Vec<Warning>,
    /// Energy after every iteration.
    pub energy_history: Vec<f64>,
}
