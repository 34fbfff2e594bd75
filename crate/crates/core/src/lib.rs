//! Numerical laboratory for semilinear nonlocal equations with absorption,
//! `ℒu + g(u) = μ`, studied through the Green-operator form `u + 𝔾[g(u)] = 𝔾[μ]`.
//!
//! Everything numerical is generic over a [`Real`] scalar; the `*64` aliases
//! below fix it to `f64`, which is what the command-line tool uses.

pub mod domain;
pub mod error;
pub mod experiments;
pub mod greenop;
pub mod kernels;
pub mod linalg;
pub mod measures;
mod real;
pub mod solver;
pub mod spaces;
pub mod special;
pub mod verify;

pub use domain::{build_mesh, distance_to_boundary, Cell, DomainSpec, Mesh, MeshOptions};
pub use error::{Error, Result};
pub use greenop::{GreenOperator, TestFunction};
pub use kernels::{Kernel, KernelKind, RegularizedSplit};
pub use measures::{Atom, RadonMeasure};
pub use real::Real;
pub use solver::{Nonlinearity, SolveConfig, SolveReport, TruncationEnvelope};
pub use spaces::GridFunction;

pub type DomainSpec64 = DomainSpec<f64>;
pub type Mesh64 = Mesh<f64>;
pub type Kernel64 = Kernel<f64>;
pub type RegularizedSplit64 = RegularizedSplit<f64>;
pub type GreenOperator64 = GreenOperator<f64>;
pub type GridFunction64 = GridFunction<f64>;
pub type RadonMeasure64 = RadonMeasure<f64>;
pub type Nonlinearity64 = Nonlinearity<f64>;

pub type DomainSpec32 = DomainSpec<f32>;
pub type Mesh32 = Mesh<f32>;
pub type Kernel32 = Kernel<f32>;
pub type GreenOperator32 = GreenOperator<f32>;
