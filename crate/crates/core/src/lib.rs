//! Analysis of dissipative second-order left-invariant operators
//! `L = Σ a_jk V_j V_k + iαU` on the Heisenberg group ℍₙ.
//!
//! Conventions: the basis of V = ℝ²ⁿ is ordered (X1..Xn, Y1..Yn),
//! `J = [[0, I], [-I, 0]]`, `σ(v, w) = vᵀJw`, and the Hamilton map of the
//! coefficient matrix `A` is `S = -AJ`, so that `Q_S(v, w) = σ(v, Sw) = vᵀJSw`
//! and `A = SJ`.

pub mod classify;
pub mod error;
pub mod fixtures;
pub mod kernel;
pub mod lab;
pub mod linalg;
pub mod operator;
pub mod report;
pub mod spectral;
pub mod symplectic;
pub mod tolerances;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64 as C64;
pub use operator::OperatorSpec;
pub use tolerances::Tolerances;
