//! Quadrature rules and compensated summation.

mod adaptive;
mod compensated;
mod gauss_legendre;

pub use adaptive::{adaptive_gauss, QuadratureError};
pub use compensated::CompensatedSum;
pub use gauss_legendre::GaussLegendre;
