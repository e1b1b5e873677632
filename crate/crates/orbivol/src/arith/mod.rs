//! Finite fields, matrices over them, and truncated Laurent series with tame
//! ramification.

mod field;
pub mod linalg;
mod series;

pub use field::{
    embedding, gcd, is_prime, lcm, make_field, mu_count_local, prime_power, primitive_root,
    roots_of_unity, splitting_degree, Field, FieldDescriptor, Fq, MAX_FIELD_ORDER,
};
pub use series::{adjoin_ramified_root, RamifiedContext, TruncatedSeries};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be positive")]
    BadDegree,
    #[error("F_{p}^{r} is larger than the supported table size")]
    TooLarge { p: u64, r: u32 },
    #[error("{n} does not divide q - 1 = {qm1}")]
    NoRoots { n: u64, qm1: u64 },
    #[error("gcd({n}, {q}) != 1")]
    NotCoprime { n: u64, q: u64 },
    #[error("no field embedding between the given fields")]
    NoEmbedding,
    #[error("ramification index {0} is divisible by the characteristic")]
    WildRamification(u64),
    #[error("series is not invertible to the available precision")]
    NotInvertible,
    #[error("leading coefficient has no {0}-th root in the coefficient field")]
    NoRoot(u64),
    #[error("series operands live over different rings")]
    Mismatch,
}
