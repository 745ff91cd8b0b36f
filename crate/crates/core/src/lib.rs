//! Scattered-data interpolation with radial basis functions.
//!
//! The crate builds the augmented interpolation system
//!
//! ```text
//! [ B   P ] [ lambda ]   [ h ]
//! [ P^T 0 ] [   a    ] = [ 0 ]
//! ```
//!
//! for global kernels (thin-plate spline, Gaussian, multiquadric) and for
//! compactly supported Wendland kernels, where `B` becomes sparse. Three
//! solver paths are provided: a pivoted symmetric-indefinite factorization of
//! the whole system, block elimination through the Schur complement of `B`,
//! and conjugate gradients on the sparse `B` block. The [`diagnostics`]
//! module measures how translating the sites away from the origin degrades
//! the conditioning of the augmented system, and how centering and scaling
//! the domain ([`normalize`]) removes the effect.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the command
//! line live in the `csrbf` crate.
#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod assembly;
pub mod diagnostics;
mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod normalize;
pub mod solve;

pub use assembly::{assemble_dense, assemble_sparse, side_condition_defect, BlockMatrix, BlockSystem, PolyBasis};
pub use error::{Error, Result};
pub use geometry::{distance, radius_neighbors, Neighbor, PointCloud, SpatialGrid};
pub use kernels::{Kernel, KernelKind};
pub use normalize::NormalizeTransform;
pub use solve::{
    fit, prepare_system, solve_direct, solve_schur, solve_sparse_cg, FitOptions, FitReport, GridAxis, GridSpec,
    InterpolantModel, SolverKind,
};

/// Largest spatial dimension supported.
pub const MAX_DIM: usize = 3;
