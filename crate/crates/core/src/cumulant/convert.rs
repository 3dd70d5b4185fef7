//! Moment ⇄ cumulant conversion by the defining recursions.

use super::eval::{all_parts, nc_plans, product_of_blocks};
use super::oracle::{ClassicalMoments, FreeFamily, FreeMoments, MomentOracle};
use super::table::CumulantTable;
use super::tensor::{basis_len, Multilinear};
use super::word::{all_words, word, Letter};
use crate::algebra::Elem;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::partition::StarPattern;

/// Which partition lattice the recursion runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// Noncrossing partitions, nested evaluation.
    Free,
    /// All partitions, block products.
    Classical,
}

/// Order bounds for the conversions.
pub const MAX_ORDER_SCALAR: usize = 8;
pub const MAX_ORDER_MATRIX: usize = 6;
pub const MAX_ORDER_MULTI: usize = 6;
pub const MAX_VARS_MULTI: usize = 3;

fn check_bounds(p: usize, n: usize, order: usize, lattice: Lattice) -> Result<()> {
    if lattice == Lattice::Classical && p > 1 {
        return Err(Error::Unsupported("classical cumulants need scalar coefficients".into()));
    }
    let limit = if n > 1 {
        if n > MAX_VARS_MULTI {
            return Err(Error::SizeLimit { what: "alphabet size", value: n, limit: MAX_VARS_MULTI });
        }
        MAX_ORDER_MULTI
    } else if p > 1 {
        MAX_ORDER_MATRIX
    } else {
        MAX_ORDER_SCALAR
    };
    if order > limit {
        return Err(Error::SizeLimit { what: "conversion order", value: order, limit });
    }
    Ok(())
}

/// Coefficient tuple `[1, E_{t1}, .., E_{t_{k-1}}, 1]` for a basis index.
fn basis_coeffs(p: usize, k: usize, mut idx: usize) -> Vec<Elem> {
    let pp = p * p;
    let mut out = vec![Elem::identity(p); k + 1];
    for slot in (1..k).rev() {
        let coord = idx % pp;
        idx /= pp;
        out[slot] = Elem::unit(p, coord / p, coord % p);
    }
    out
}

/// Cumulants of all words over `n` variables up to `order`:
/// `κ(w) = E(w) − Σ_{π ≠ 1} κ^{(π)}(w)`, order by order.
pub fn cumulants_from_moments(
    oracle: &dyn MomentOracle,
    n: usize,
    order: usize,
    lattice: Lattice,
    exec: Execution,
) -> Result<CumulantTable> {
    let p = oracle.side();
    check_bounds(p, n, order, lattice)?;
    let mut table = CumulantTable::new(p, order)?;
    for k in 1..=order {
        let words = all_words(n, k);
        let nb = basis_len(p, k);
        let values: Vec<Result<Elem>> = exec.map_range(words.len() * nb, |job| {
            let w = &words[job / nb];
            let coeffs = basis_coeffs(p, k, job % nb);
            let mut v = oracle.moment(w, &coeffs)?;
            match lattice {
                Lattice::Free => {
                    for (part, plan) in nc_plans(k)? {
                        if !part.is_one() {
                            v = v - plan.eval(&table, w, &coeffs)?;
                        }
                    }
                }
                Lattice::Classical => {
                    for part in all_parts(k)? {
                        if !part.is_one() {
                            v = v - product_of_blocks(&table, part, w, &coeffs)?;
                        }
                    }
                }
            }
            Ok(v)
        });
        let mut values = values.into_iter();
        for w in &words {
            let chunk = values.by_ref().take(nb).collect::<Result<Vec<_>>>()?;
            let tensor = Multilinear::from_values(p, k, chunk)?;
            if !tensor.is_zero() {
                table.insert(w, tensor)?;
            }
        }
    }
    Ok(table)
}

/// Free cumulants of a single variable up to `order`.
pub fn moments_to_free_cumulants(oracle: &dyn MomentOracle, order: usize) -> Result<CumulantTable> {
    cumulants_from_moments(oracle, 1, order, Lattice::Free, Execution::default())
}

/// Classical cumulants of a single variable up to `order` (scalar only).
pub fn moments_to_classical_cumulants(
    oracle: &dyn MomentOracle,
    order: usize,
) -> Result<CumulantTable> {
    cumulants_from_moments(oracle, 1, order, Lattice::Classical, Execution::default())
}

fn check_complete(table: &CumulantTable, order: usize) -> Result<()> {
    if table.order() < order {
        Err(Error::Incomplete(format!(
            "table has order {} but {} was requested",
            table.order(),
            order
        )))
    } else {
        Ok(())
    }
}

/// Moment functional of the free cumulants, valid up to `order`.
pub fn free_cumulants_to_moments(table: &CumulantTable, order: usize) -> Result<FreeMoments> {
    check_complete(table, order)?;
    Ok(FreeMoments::new(table.truncated(order)))
}

/// Moment functional of the classical cumulants, valid up to `order`.
pub fn classical_cumulants_to_moments(table: &CumulantTable, order: usize) -> Result<ClassicalMoments> {
    check_complete(table, order)?;
    if table.side() > 1 {
        return Err(Error::Unsupported("classical cumulants need scalar coefficients".into()));
    }
    Ok(ClassicalMoments::new(table.truncated(order)))
}

/// One joint moment of `n` free copies of the single-variable law `spec`.
/// `vars` are 0-based.
pub fn joint_moments_free_family(
    spec: &CumulantTable,
    n: usize,
    vars: &[usize],
    pattern: &StarPattern,
    coeffs: &[Elem],
) -> Result<Elem> {
    let w: Vec<Letter> = word(vars, pattern)?;
    FreeFamily::new(spec.clone(), n)?.moment(&w, coeffs)
}

/// Free cumulants of all words over `n` variables up to `order`.
pub fn multivariate_cumulants_from_joint_moments(
    oracle: &dyn MomentOracle,
    n: usize,
    order: usize,
) -> Result<CumulantTable> {
    cumulants_from_moments(oracle, n, order, Lattice::Free, Execution::default())
}
