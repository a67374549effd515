//! Moment bootstrap for one-dimensional quantum bound states.
//!
//! For `H = p² + V` the identities `⟨[H, O]⟩ = 0` and `⟨H O⟩ = E ⟨O⟩` fix
//! every moment of an eigenstate in terms of a handful of free values. The
//! crate generates those moments ([`recursion`]), arranges them in matrices
//! that must be positive semidefinite ([`matrices`], [`feasibility`]) and
//! scans the free values for points that survive ([`scanner`]). The
//! [`oracle`] module solves the same problems by direct discretization.
//!
//! Everything numeric is generic over [`Real`]; the `*64` and `*32` aliases
//! pick a concrete precision.

pub mod feasibility;
pub mod linalg;
pub mod matrices;
pub mod oracle;
pub mod ordering;
pub mod potentials;
pub mod recursion;
pub mod scalar;
pub mod scanner;

use thiserror::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use feasibility::{is_feasible, min_eigenvalue, FeasibilityError, FeasibilityVerdict, DEFAULT_TOL};
pub use matrices::{build, build_one_op, build_two_op, BootstrapMatrix, MatrixError, MatrixKind};
pub use oracle::{
    moments_from_wavefunction, solve_1d, solve_periodic, solve_radial, Domain, MomentIndexSet,
    OracleError, OracleOptions, OracleSolution,
};
pub use ordering::{BaseKind, OperatorPolynomial, OrderingError};
pub use potentials::{
    free_initial_schema, validate_spec, Family, InitialName, InitialSchema, PotentialError,
    PotentialSpec, ValidatedPotential,
};
pub use recursion::{
    gen_one_var, gen_two_var, recursion_residual, EquationInstance, InitialData, MomentTable,
    RecursionError, ResidualReport,
};
pub use scalar::{Cx, Real};
pub use scanner::{
    extract_islands, refine_boundary, scan, FeasibleRegion, GridAxis, Island, PointError,
    ScanConfig, ScanError,
};

pub type PotentialSpec64 = PotentialSpec<f64>;
pub type ValidatedPotential64 = ValidatedPotential<f64>;
pub type InitialData64 = InitialData<f64>;
pub type MomentTable64 = MomentTable<f64>;
pub type BootstrapMatrix64 = BootstrapMatrix<f64>;
pub type FeasibilityVerdict64 = FeasibilityVerdict<f64>;
pub type ScanConfig64 = ScanConfig<f64>;
pub type FeasibleRegion64 = FeasibleRegion<f64>;
pub type OracleSolution64 = OracleSolution<f64>;

pub type PotentialSpec32 = PotentialSpec<f32>;
pub type ValidatedPotential32 = ValidatedPotential<f32>;
pub type InitialData32 = InitialData<f32>;
pub type MomentTable32 = MomentTable<f32>;
pub type BootstrapMatrix32 = BootstrapMatrix<f32>;
pub type FeasibilityVerdict32 = FeasibilityVerdict<f32>;
pub type ScanConfig32 = ScanConfig<f32>;
pub type FeasibleRegion32 = FeasibleRegion<f32>;
pub type OracleSolution32 = OracleSolution<f32>;

/// Any error the engine can report.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Ordering(#[from] OrderingError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Recursion(#[from] RecursionError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
    #[error(transparent)]
    Scan(#[from] ScanError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
