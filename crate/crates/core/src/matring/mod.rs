//! Matrices over finite fields and polynomials with matrix or vector
//! coefficients.

mod matrix;
mod poly;

pub use matrix::{Echelon, Matrix};
pub use poly::{diamond, MatrixPolynomial, VectorPolynomial};

/// Elements of `M_ℓ(K)` are ordinary square [`Matrix`] values.
pub type SquareMatrix = Matrix;
