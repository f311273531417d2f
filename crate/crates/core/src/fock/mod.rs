//! Exact many-body oracle on occupation-number bases.

pub mod basis;
pub mod constrained;
pub mod hamiltonian;
pub mod state;

pub use basis::{enumerate_basis, FockBasis, Sector};
pub use constrained::{constrained_search, constrained_search_raw, SearchOptions, SearchResult, StateObservable};
pub use hamiltonian::{hamiltonian_operator, one_body_operator, SparseOperator, Tensor4, TwoBodyHamiltonian};
pub use state::{
    apply_hamiltonian, condensate_state, energy_expectation, ground_state, one_body_density, pairing_tensor_of,
    transition_density, two_body_correlation, ManyBodyState,
};
