//! Finite-dimensional toolkit for `L^p` operator algebras.
//!
//! * [`lpcore`]: weighted `ℓ^p` vectors and operators, duality, Radon–Nikodym
//!   weights, Clarkson's inequalities.
//! * [`opnorm`]: `p → p` operator norm estimation and a small-dimension oracle.
//! * [`lamperti`]: spatial isometries and partial isometries, hermitian elements.
//! * [`groupalg`]: convolution algebras of finite groups on `ℓ^p(G)`.
//! * [`cuntz`]: Leavitt relations, spatial representations, graph algebras.
//! * [`dynamics`]: crossed products by finite actions and the `Z₂∗Z₃` boundary action.
//! * [`suite`]: executable acceptance criteria shared by the tests and the CLI.

// index loops read closer to the matrix formulas they implement
#![allow(clippy::needless_range_loop)]

pub mod cuntz;
pub mod dynamics;
pub mod error;
pub mod groupalg;
pub mod json;
pub mod lamperti;
pub mod lpcore;
pub mod opnorm;
pub mod suite;

pub use error::{Error, Result};
pub use lpcore::{Exponent, LpVector, Operator, Permutation, WeightedSpace, C64};
pub use opnorm::{NormEstimate, SearchConfig};
