//! Numerical kernels for the monotonicity and complete monotonicity of
//! power-weighted polygamma expressions.
//!
//! The crate centers on two families of functions on `(0, inf)`,
//!
//! ```text
//! g(x) = x^alpha |psi^(i)(x + beta)|
//! f(x) = alpha |psi^(i)(x + beta)| - x |psi^(i+1)(x + beta)|
//! ```
//!
//! whose monotonicity / complete monotonicity is decided by the simple
//! kernel `delta(t) = (e^t(t-1)+1)/(e^t-1)^2` and, for `0 < beta < 1/2`, by
//! the sharp threshold `alpha*(i, beta)` built from its inverse. The modules
//! split as follows:
//!
//! - [`bernoulli`]: exact Bernoulli numbers and the two associated power
//!   series with their closed continuations;
//! - [`polygamma`]: `psi^(k)` to ~1e-13 relative accuracy plus the
//!   elementary two-sided bounds;
//! - [`kernel`]: `delta`, its inverse, the `h` integrand, the threshold and
//!   the parameter classifier;
//! - [`algebra`]: a closed symbolic algebra for analytic derivatives of any
//!   order and grid sign scans;
//! - [`quadrature`]: independent Gauss-Kronrod evaluation of the Laplace
//!   representations backing everything above.

pub mod algebra;
pub mod bernoulli;
pub mod error;
pub mod kernel;
pub mod polygamma;
pub mod quadrature;

pub use error::{Error, Result};
