//! Numerics for the q-convolution calculus on the Jackson lattice
//! L(γ) = {±q^k γ}: Jackson integrals and q-moments, the q-convolution
//! product, q-Gaussian and discrete q-Hermite families, the formal q-Fourier
//! transform with its inverses, and a solver for constant-coefficient
//! q-differential equations.

pub mod convolve;
pub mod error;
pub mod fourier;
pub mod function;
pub mod gaussian;
pub mod lattice;
pub mod qcore;
pub mod qsolve;
pub mod series;

pub use error::{QError, Result};
pub use qcore::{QContext, C64};
