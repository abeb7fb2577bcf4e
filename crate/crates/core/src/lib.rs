//! Fast kinetic scheme for the BGK equation.
//!
//! The distribution is stored on a fixed velocity grid times a uniform
//! Cartesian mesh. Free transport is exact: each velocity node keeps a
//! cumulative shift and cells read their values through an integer label
//! offset. Relaxation toward the discrete equilibrium is exact in time and
//! conserves mass, momentum and energy to round-off through a constrained
//! projection onto the discrete moments.

pub mod bench;
pub mod config;
pub mod diagnostics;
pub mod equilibrium;
pub mod error;
pub mod field;
pub mod grid;
pub mod oracles;
pub mod output;
pub mod presets;
pub mod solver;

pub use equilibrium::{ConservedState, ProjectionOperator};
pub use error::{FksError, Result};
pub use field::DistributionField;
pub use grid::{Boundary, SpatialGrid, VelocityGrid};
pub use solver::{run_splitting, SolverConfig, SplittingOrder};
