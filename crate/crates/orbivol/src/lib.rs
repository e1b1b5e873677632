pub mod arith;
pub mod cli;
pub mod fourier;
pub mod hasse;
pub mod integrate;
pub mod neron;
pub mod orbifold;
pub mod torsor;
