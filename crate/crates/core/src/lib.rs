//! Executable free de Finetti machinery: decorated noncrossing partitions,
//! operator-valued free and classical cumulants, vanishing-pattern
//! classification of *-distributions, universal relations of quantum
//! permutation/orthogonal/unitary families on finite-dimensional
//! representations, and numerical invariance checks of free i.i.d. families.

pub mod algebra;
pub mod classes;
pub mod cumulant;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod invariance;
pub mod io;
pub mod partition;
pub mod qgroup;

pub use error::{Error, Result};
pub use exec::Execution;
