use thiserror::Error;

pub type Result<T> = std::result::Result<T, FksError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FksError {
    #[error("invalid velocity grid: {0}")]
    InvalidVelocityGrid(String),

    #[error("invalid spatial grid: {0}")]
    InvalidSpatialGrid(String),

    #[error("velocity grid has {nodes} nodes, need at least {needed} for a {dim}D projection")]
    UnderdeterminedGrid {
        dim: usize,
        nodes: usize,
        needed: usize,
    },

    #[error("degenerate velocity grid: moment normal matrix condition estimate {condition:e}")]
    DegenerateVelocityGrid { condition: f64 },

    #[error("no finite CFL constraint: all velocity nodes are at rest")]
    NoCflConstraint,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("vacuum/negative density {rho:e} in cell {cell}")]
    Vacuum { cell: usize, rho: f64 },

    #[error("cold state (theta = {theta:e}) in cell {cell}: Maxwellian is not representable")]
    ColdState { cell: usize, theta: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("Riemann problem generates vacuum")]
    RiemannVacuum,

    #[error("CFL violated for upwind transport: courant number {courant} > 1")]
    CflViolation { courant: f64 },

    #[error("configuration error for key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for FksError {
    fn from(e: std::io::Error) -> Self {
        FksError::Io(e.to_string())
    }
}
