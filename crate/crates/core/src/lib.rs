//! Self-consistent mean-field, Kohn–Sham and Bogoliubov solvers over finite
//! single-particle bases, with an exact Fock-space oracle for checking them.

pub mod edf;
pub mod error;
pub mod fock;
pub mod matrix;
pub mod optimize;
pub mod presets;
pub mod scf;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
