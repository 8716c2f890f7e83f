//! Arbitrary-order isoparametric finite elements for the elliptic problem
//!
//! ```text
//!   -Δu + κu = f                    in Ω
//!   ∂u/∂ν + αu - βΔ_Γ u = g         on Γ = ∂Ω
//! ```
//!
//! on smooth two- and three-dimensional domains. The boundary is approximated
//! by degree-`k` polynomial faces obtained by interpolating an exact curved
//! triangulation. Errors are measured against an exact solution by matching
//! reference points of discrete and exact cells.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: implicit domains (signed distance, closest-point projection).
//! - [`mesh`]: linear simplicial meshes with boundary vertices on Γ.
//! - [`element`]: reference Lagrange elements, quadrature and curved element maps.
//! - [`assembly`]: finite element spaces, sparse matrices and the linear system.
//! - [`solver`]: preconditioned conjugate gradients.
//! - [`norms`]: interpolation, lifted error norms and convergence orders.
//! - [`study`]: refinement studies producing CSV tables.

#![allow(clippy::needless_range_loop)]

pub mod assembly;
pub mod element;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod manufactured;
pub mod mesh;
pub mod norms;
pub mod solver;
pub mod study;

pub use error::{Error, Result};
