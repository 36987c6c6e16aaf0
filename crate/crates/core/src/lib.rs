//! Modeling, optimization, and evaluation of beyond-diagonal reconfigurable
//! intelligent surfaces (BD-RIS).
//!
//! A BD-RIS is an N-port reconfigurable impedance network whose circuit
//! topology is captured by a simple undirected graph: vertices are RIS ports,
//! edges are tunable admittances interconnecting them. The graph determines
//! the sparsity of the susceptance matrix `B`, and through the Cayley-style
//! map `Θ = (I + jZ₀B)⁻¹(I − jZ₀B)` the set of scattering matrices the
//! surface can realize.
//!
//! The crate is organized around that pipeline:
//!
//! - [`graph`]: port-interconnection graphs, predicates (connected, acyclic,
//!   tree, forest), and generators (path, star, complete, random tree).
//! - [`architecture`]: the architecture taxonomy (single / tridiagonal /
//!   arrowhead / tree / forest / group / fully connected), sparsity supports,
//!   and tunable-component counts.
//! - [`network`]: susceptance ↔ scattering ↔ component-value conversions and
//!   received-power / upper-bound evaluation.
//! - [`optimize`]: closed-form global optimization of tree-connected
//!   surfaces, alternating optimization of forest-connected surfaces, and
//!   the single-connected (diagonal) baseline.
//! - [`channel`]: seeded Rician/Rayleigh channel generation with
//!   geometry-driven path loss.
//! - [`harness`]: Monte Carlo sweeps, circuit-complexity tables, and CSV
//!   emission for the CLI.

pub mod architecture;
pub mod channel;
pub mod graph;
pub mod harness;
pub mod network;
pub mod optimize;

pub use num_complex::Complex64;

/// Dense complex matrix used for channels, admittances, and scattering.
pub type ComplexMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type ComplexVector = nalgebra::DVector<Complex64>;
/// Dense complex row vector (e.g. the RIS-to-receiver channel).
pub type ComplexRow = nalgebra::RowDVector<Complex64>;
/// Dense real matrix.
pub type RealMatrix = nalgebra::DMatrix<f64>;
/// Dense real column vector.
pub type RealVector = nalgebra::DVector<f64>;

pub use architecture::{Architecture, ArchitectureError, ArchitectureKind, TreeShape};
pub use graph::{GraphError, RisGraph};
pub use network::{ComponentValues, NetworkError, ScatteringMatrix, SusceptanceMatrix, DEFAULT_Z0};
pub use optimize::{OptimizationResult, OptimizeError};
