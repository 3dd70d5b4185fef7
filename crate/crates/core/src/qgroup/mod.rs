//! Finite-dimensional representations of the free quantum families.

mod family;
mod rep;
mod structure;

pub use family::{
    block_identity, block_identity_all, check_family, entries_are_projections, entries_commute,
    full_delta_identity, is_subgroup, lattice_position, parents, row_column_sums,
    squares_are_projections, upward, Family, FamilyCheck, FamilyTag, LatticeOrder, LatticePosition,
    MAX_TUPLES,
};
pub use rep::{
    check_biunitary, coproduct_lift, hadamard, operator_norm, random_matrix, random_unitary,
    BiunitaryReport, BlockMatrix, CMat, Check, MatrixRep, DEFAULT_TOL,
};
pub use structure::{structural_consequences, Consequence, StructureReport};
