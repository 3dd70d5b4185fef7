//! Free and classical cumulant calculus with coefficients in `M_p`.

mod convert;
mod eval;
mod oracle;
mod table;
mod tensor;
mod word;

pub use convert::{
    classical_cumulants_to_moments, cumulants_from_moments, free_cumulants_to_moments,
    joint_moments_free_family, moments_to_classical_cumulants, moments_to_free_cumulants,
    multivariate_cumulants_from_joint_moments, Lattice, MAX_ORDER_MATRIX, MAX_ORDER_MULTI,
    MAX_ORDER_SCALAR, MAX_VARS_MULTI,
};
pub use eval::{eval_partitioned_classical, eval_partitioned_free, eval_partitioned_free_with, FoldOrder};
pub use oracle::{ClassicalMoments, FnOracle, FreeFamily, FreeMoments, MomentOracle, MomentTable};
pub use table::{CumulantSource, CumulantTable};
pub use tensor::Multilinear;
pub use word::{all_words, pattern_of, single, vars_of, word, Letter, WordDisplay};
