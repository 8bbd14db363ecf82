//! Exact computation of the nu-invariant of G2-orbifolds `T^7 / Gamma`.

pub mod cyclo;
pub mod catalog;
pub mod error;
pub mod eta_dirac;
pub mod eta_sign;
pub mod g2clifford;
pub mod group;
pub mod intmat;
pub mod lattice;
pub mod maslov;
pub mod nu;
pub mod oracle;
pub mod rational;

pub use error::{Error, Result};
