//! Spin matrices, graphs, interactions and finite-volume Hamiltonians.

pub mod document;
pub mod graph;
pub mod hamiltonian;
pub mod interaction;
pub mod sectors;
pub mod sparse;
pub mod spin;

pub use document::ModelDocument;
pub use graph::{Edge, Site, SpinGraph};
pub use hamiltonian::{
    aklt_term, basis_of, build_hamiltonian, build_hamiltonian_capped, casimir, edge_term, embed_local,
    local_operator, total_spin_component, ModelSpec, DEFAULT_DIM_CAP,
};
pub use interaction::{interaction_norm, Interaction};
pub use sectors::{magnetization_sectors, sectors_of_basis, MagnetizationSectors};
pub use sparse::{SparseHermitian, SparseMatrix, TensorBasis};
pub use spin::{spin_dot, spin_matrices, SpinMatrices, SpinValue};
