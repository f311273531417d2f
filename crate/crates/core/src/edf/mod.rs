//! Energy functionals and their analytic fields.

pub mod gradcheck;
pub mod hf;
pub mod ks;
pub mod lattice;
pub mod variables;

pub use gradcheck::{fd_gradient_check, Differentiable, FdReport};
pub use hf::{hf_energy_and_field, hfb_energy_and_fields, mean_field, pairing_field};
pub use ks::{
    hf_from_hamiltonian, hfb_from_hamiltonian, ks_fields, ks_partitioned, ksbdg_fields, repartition, Direction,
    EnergyTerm, KSFunctional, KsFields, TermGradient, TermInput,
};
pub use lattice::{lattice1d, LatticeModel1D, LatticePairing, LatticePartition};
pub use variables::{CustomVariable, PrincipalVariable, VariableDerivative, VariableKind};
