//! Exact engine for the vanishing property of `Lambda = (Dx - Phi(Dy)) * Dy`
//! on two-variable polynomials over the rationals.
//!
//! * [`poly`]: sparse multivariate polynomials with `BigRational` coefficients.
//! * [`diffop`]: constant-coefficient operators, the exponential shift and
//!   the coordinate change that normalizes `Phi`.
//! * [`gvc`]: vanishing checks, kernel construction and classification,
//!   certificates with explicit thresholds, and coefficient oracles.
//! * [`dsl`]: the text syntax used by the CLI and fixtures.

pub mod diffop;
pub mod dsl;
pub mod gvc;
pub mod poly;
pub mod serde_util;

pub use diffop::{DiffOperator, PhiSpec, Sign};
pub use gvc::{GvcCertificate, GvcError, VanishReport};
pub use poly::{Coefficient, Degree, Monomial, Order, Polynomial, Ring};
