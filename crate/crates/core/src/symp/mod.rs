//! Representation theory of `USp(2g)` and `USp(2g) x USp(2g')`.
//!
//! Irreducible characters are indexed by partitions ([`DominantWeight`]) and
//! evaluated on the maximal torus, parametrized by eigenangles in `[0, pi]`.
//! Two independent routes are provided for multiplicities: Gauss–Legendre
//! quadrature against the Weyl density ([`WeylGrid`]) and exact
//! antisymmetrization of Laurent polynomials ([`exact`]).

mod character;
pub mod exact;
mod gamma;
mod haar;
mod laurent;
mod virtual_char;
mod weight;

use thiserror::Error;

pub use character::{complete_homogeneous, sp_value, TorusPoint};
pub use gamma::{duplication_check, gamma};
pub use haar::{weyl_density, weyl_integrate, weyl_integrate_product, WeylGrid, MIN_ORDER};
pub use laurent::{Coeff, LaurentPoly};
pub use virtual_char::{
    delta_psi_exact, delta_psi_quadrature, fs_indicator, inner_product, inner_product_raw, psi_character,
    psi_closed_form, trivial_multiplicity, Adams2Bounds, AnalyticMetadata, Group, TermKey, VirtualCharacter,
    DEFAULT_ORDER, INTEGRALITY_TOLERANCE,
};
pub use weight::DominantWeight;

#[derive(Debug, Error)]
pub enum SympError {
    #[error("invalid dominant weight: {0}")]
    InvalidWeight(String),
    #[error("invalid torus point: {0}")]
    InvalidPoint(String),
    #[error("quadrature order {order} is below the minimum {min}")]
    OrderTooSmall { order: usize, min: usize },
    #[error("quadrature grid of {points} points is too large")]
    GridTooLarge { points: usize },
    #[error("multiplicity {raw} is not within tolerance of an integer; raise the quadrature order")]
    NonIntegral { raw: f64 },
    #[error("group mismatch: {0}")]
    GroupMismatch(String),
    #[error("character is not irreducible")]
    NotIrreducible,
    #[error("Gamma has a pole at {0}")]
    PoleInput(String),
    #[error("malformed character JSON: {0}")]
    Json(#[from] serde_json::Error),
}
