//! TV-L1 optical flow with an illumination field, solved through its dual
//! by preconditioned ADMM variants and preconditioned Douglas-Rachford
//! splitting inside a coarse-to-fine warping pyramid.
//!
//! Every numerical routine is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the precision for the common case.

pub mod benchio;
pub mod error;
pub mod grid;
pub mod operators;
pub mod prox;
pub mod pyramid;
pub mod scalar;
pub mod solvers;

pub use error::{FlowError, Result};
pub use grid::Field;
pub use operators::ImageData;
pub use pyramid::{solve_flow, FlowSolution, PyramidConfig};
pub use scalar::Real;
pub use solvers::{SolverConfig, SolverKind, SolverState};

pub type ScalarField = grid::ScalarField<f64>;
pub type VectorField2 = grid::VectorField2<f64>;
pub type VectorField4 = grid::VectorField4<f64>;
pub type FlowField = grid::FlowField<f64>;
pub type ImageData64 = operators::ImageData<f64>;
pub type SolverConfig64 = solvers::SolverConfig<f64>;
pub type SolverState64 = solvers::SolverState<f64>;
pub type PyramidConfig64 = pyramid::PyramidConfig<f64>;

pub type ScalarField32 = grid::ScalarField<f32>;
pub type FlowField32 = grid::FlowField<f32>;
pub type SolverConfig32 = solvers::SolverConfig<f32>;
pub type PyramidConfig32 = pyramid::PyramidConfig<f32>;
