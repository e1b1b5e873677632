//! Quotient stacks [A^n/Γ] over F_q: twisted inertia, weights, fiber volumes
//! of the specialization map and their brute-force oracles.

pub mod inertia;
pub mod oracle;
mod stack;
pub mod weight;

pub use inertia::{
    fiber_volume, groupoid_mass, naive_volume, specialize, stringy_volume, twisted_inertia, EquivariantPoint,
    InertiaClass, StringyReport, TwistedInertia, DEFAULT_MAX_CELLS,
};
pub use oracle::{coarse_line_integral, fiber_volume_oracle, kummer_line_oracle, oracle_fiber_volumes};
pub use stack::{canonical_root, GroupSpec, QuotientStackDesc, StackSpec};
pub use weight::{action_weight, lambda_map, rotation_action, weight_of_tuple, LambdaCertificate, LambdaMap, MuNAction};

use thiserror::Error;

use crate::arith::ArithError;
use crate::torsor::TorsorError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbifoldError {
    #[error("bad stack description: {0}")]
    Spec(String),
    #[error("invalid action: {0}")]
    InvalidAction(String),
    #[error("|Γ| = {order} is divisible by p = {p}")]
    WildGroup { order: u64, p: u64 },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Torsor(#[from] TorsorError),
    #[error("enumeration needs {0} cells, above the configured bound")]
    TooManyCells(u64),
    #[error("point is not equivariant for the declared embedding")]
    NotEquivariant,
    #[error("not defined over the base field")]
    NotRational,
    #[error("unsupported: {0}")]
    Unsupported(String),
}
