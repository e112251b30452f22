//! Hard-core pairs hopping on periodic 1D and 2D lattices.
//!
//! The crate builds the effective strongly-bound-pair model (and its parent
//! two-species fermion model) on rings and tori, reduces it to momentum
//! sectors of the translation group, finds ground states, and compares them
//! against the coboson ansatz through fidelities, energies and pair-position
//! correlation maps. Closed-form results for the single-pair spectrum and the
//! exact two-pair 1D ground state are available as independent oracles.

pub mod analytic;
pub mod basis;
pub mod coboson;
pub mod eigensolver;
pub mod hamiltonian;
pub mod lattice;
pub mod observables;
pub mod state;

pub use basis::{FullBasis, Momentum, PairConfiguration, SectorBasis};
pub use eigensolver::EigenResult;
pub use hamiltonian::{ModelParameters, SparseHamiltonian};
pub use lattice::{Direction, LatticeGeometry, Translation};
pub use state::{Basis, StateVector};

/// Error type shared by all modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("pair count {n} out of range for {m} sites")]
    PairCountOutOfRange { n: usize, m: usize },
    #[error("momentum ({row}, {col}) out of range for geometry")]
    MomentumOutOfRange { row: usize, col: usize },
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),
    #[error("state vector is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },
    #[error("problem size {dim} exceeds limit {limit}")]
    SizeLimit { dim: usize, limit: usize },
    #[error("Heisenberg image requires an even chain length, got {0}")]
    OddLength(usize),
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}
