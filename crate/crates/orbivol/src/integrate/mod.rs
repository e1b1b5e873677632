//! Haar integration on O_F^n: exact monomial integrals, adaptive cell
//! integration with sound brackets, and canonical volumes of smooth schemes.

mod adaptive;
pub mod poly;
mod value;
mod weil;

pub use adaptive::{integrate_adaptive, integrate_monomial, FormIntegrand};
pub use poly::MPoly;
pub use value::{Coeff, IntervalVolume, PowerSum, VolumeValue};
pub use weil::{count_smooth_points, lift_count, weil_fiber_volume, weil_volume, AffineSchemeDesc};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntegrateError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("the tensor power r must be positive")]
    BadPower,
    #[error("level must be at least 1")]
    BadLevel,
    #[error("relative dimension {d} exceeds ambient dimension {n}")]
    BadDimension { n: usize, d: usize },
    #[error("enumeration exceeds the budget of {0} cells")]
    TooManyCells(u64),
}
