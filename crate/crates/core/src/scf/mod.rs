//! Self-consistent HF, KS, HFB and KSBdG solvers.

pub mod bogoliubov;
pub mod condensate;
pub mod config;
pub mod mean_field;

pub use bogoliubov::{solve_hfb, solve_ksbdg};
pub use condensate::condensate_amplitude;
pub use config::{Condensate, InitialGuess, SolverConfig, SolverReport, Warning};
pub use mean_field::{solve_hf, solve_ks};
