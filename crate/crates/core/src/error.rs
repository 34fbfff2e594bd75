use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("point outside the domain (distance to boundary {0})")]
    OutsideDomain(f64),
    #[error("kernel evaluated on the diagonal x = y")]
    DiagonalSingularity,
    #[error("not a boundary point: |z| = {norm}, radius {radius}")]
    NotBoundaryPoint { norm: f64, radius: f64 },
    #[error("invalid kernel configuration: {0}")]
    InvalidKernel(String),
    #[error("invalid split: beta = {beta} must exceed {bound}")]
    InvalidSplit { beta: f64, bound: f64 },
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("mesh mismatch: expected {expected} nodes, got {got}")]
    MeshMismatch { expected: usize, got: usize },
    #[error("atom at {location:?} lies within one cell radius of node {node}")]
    AtomCollision { location: Vec<f64>, node: usize },
    #[error("mollifier scale {scale} too large for atom with boundary distance {delta}")]
    ScaleTooLarge { scale: f64, delta: f64 },
    #[error("mollifier scale {scale} resolves no mesh node around the atom")]
    ScaleBelowMesh { scale: f64 },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("nonlinearity is not nondecreasing with g(0) = 0: {0}")]
    NonMonotone(String),
    #[error("invalid test function: {0}")]
    InvalidTestFunction(String),
    #[error("envelope condition violated: {0}")]
    GoodMeasure(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Divergence { iterations: usize, residual: f64, history: Vec<f64> },
    #[error("monotone iteration broke order by {0:e}")]
    MonotonicityBroken(f64),
    #[error("operator too large for dense factorization: {0} nodes")]
    SizeGuard(usize),
    #[error("shifted window leaves the domain")]
    WindowViolation,
    #[error("data not ordered: {0}")]
    Unordered(String),
    #[error("critical exponent gate: p = {p} is not below p* = {p_star}")]
    Supercritical { p: f64, p_star: f64 },
    #[error("singular matrix in dense solve")]
    Singular,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
