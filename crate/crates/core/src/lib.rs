//! Exact symbolic engine for the quantized dispersionless KdV hierarchy.
//!
//! - [`scalar`], [`diffpoly`], [`functional`]: Gaussian-rational differential
//!   polynomials, the total derivative, the Euler operator and local functionals.
//! - [`hierarchy`]: the closed-form quantum Hamiltonian densities `H_d`.
//! - [`fock`]: normal-ordered quantization on the free-boson Fock space.
//! - [`reconstruction`]: rebuilding `H_d` from commutation with `H_1`.
//! - [`intersection`]: predicted psi-class integrals over meromorphic strata.
//! - [`verify`]: the batch verification suite behind `qkdv verify-all`.

pub mod diffpoly;
pub mod error;
pub mod fock;
pub mod functional;
pub mod hierarchy;
pub mod intersection;
pub mod linalg;
pub mod reconstruction;
pub mod scalar;
pub mod verify;

pub use diffpoly::{Bidegree, DiffMonomial, DiffPoly};
pub use error::{Error, Result};
pub use functional::{functional_basis, poisson_bracket, to_functional, LocalFunctional};
pub use hierarchy::{wang_hamiltonian, HamiltonianCache, HamiltonianRecord};
pub use scalar::Scalar;
