//! Poisson kernels and Dirichlet solvers for bosonic Laplacians.
//!
//! The operator family under study acts on functions f(x, u) of two vector
//! variables, polynomial and harmonic of fixed degree k in u:
//!
//! ```text
//! D_k = Delta_x - 4 <u, D_x><D_u, D_x> / (m + 2k - 2)
//!               + 4 |u|^2 <D_u, D_x>^2 / ((m + 2k - 2)(m + 2k - 4))
//! ```
//!
//! The crate constructs the Poisson kernels of D_k on the upper half-space
//! and the unit ball, solves the associated Dirichlet problems by
//! quadrature, and cross-checks the algebraic identities the kernels are
//! built from (reproducing property of the zonal kernel, conformal
//! covariance under Moebius transforms, mean-value properties, boundary
//! L^p convergence) at numerically verifiable scale.
//!
//! Modules build on one another in dependency order: `clifford` supplies
//! the geometric algebra and Moebius machinery, `harmonic` the spaces H_k
//! of harmonic polynomials, `zonal` their reproducing kernels, `quadrature`
//! the product integration rules, `kernels` the Poisson kernels themselves,
//! `operator` exact and finite-difference application of D_k, `solver` the
//! Dirichlet solution operators and verification probes, and `cli` the
//! command-line configuration, suites and reports.

pub mod book;
pub mod cli;
pub mod clifford;
pub mod error;
pub mod harmonic;
pub mod kernels;
pub mod operator;
pub mod quadrature;
pub mod solver;
pub mod zonal;

pub use error::{Error, Result};
