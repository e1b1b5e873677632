//! Exact character sums over finite abelian groups: Fourier transforms of
//! twist-indexed counts and the summation algebra behind stable and
//! isotypic count identities.

mod cyclo;
mod group;
mod identity;

pub use cyclo::Cyclo;
pub use group::{characters, fourier_transform, inverse_fourier, stable_count, Character, CountTable, FiniteAbelianGroup};
pub use identity::{
    derive_kappa_identity, derive_stable_equality, induced_count_transfer, mirror_data, parse_value, perturb, q_pow,
    random_instance, verify_main_identity, IdentityReport, KappaIdentity, MainIdentityData, StableEquality, Value,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FourierError {
    #[error("invariant factors must be positive")]
    BadGroup,
    #[error("table shape does not match the groups")]
    Shape,
    #[error("cannot parse {0:?}")]
    Parse(String),
    #[error("subgroup inclusion is not an injective homomorphism")]
    NotInjective,
    #[error("dimension {full} is not [Γ:Γ■] = {index} times {sub}")]
    DimensionRatio { sub: u64, full: u64, index: u64 },
}
