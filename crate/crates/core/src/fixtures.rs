//! Witness representations and sample distributions.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::classes::{sample_spec, CumulantSpec, FreeClass};
use crate::error::{input, Result};
use crate::qgroup::{BlockMatrix, CMat, Family, FamilyTag, MatrixRep, DEFAULT_TOL};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn r(x: f64) -> Complex64 {
    c(x, 0.0)
}

fn phase(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// Embeds a scalar `k×k` matrix in the top-left corner of an `n×n` identity.
fn padded(rows: &[Vec<Complex64>], n: usize) -> Result<MatrixRep> {
    let k = rows.len();
    if n < k {
        return Err(input(format!("witness needs n >= {k}")));
    }
    let full: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i < k, j < k) {
                    (true, true) => rows[i][j],
                    _ if i == j => r(1.0),
                    _ => r(0.0),
                })
                .collect()
        })
        .collect();
    MatrixRep::scalar(&full)
}

fn diag_phase(z: Complex64, n: usize) -> Result<MatrixRep> {
    padded(&[vec![z]], n)
}

/// Transposition of the first two points (`n = 2`) or the cycle `1→2→3→1`.
pub fn permutation(n: usize) -> Result<MatrixRep> {
    let sigma: Vec<usize> = (0..n).map(|i| (i + 1) % n).collect();
    MatrixRep::permutation(&sigma)
}

pub fn rotation(n: usize) -> Result<MatrixRep> {
    padded(&[vec![r(0.6), r(0.8)], vec![r(0.8), r(-0.6)]], n)
}

/// Orthogonal with row sums one but non-projection entries; needs `n = 3`.
pub fn bistochastic_orthogonal() -> Result<MatrixRep> {
    let (a, b) = (2.0 / 3.0, -1.0 / 3.0);
    MatrixRep::scalar(&[
        vec![r(a), r(a), r(b)],
        vec![r(a), r(b), r(a)],
        vec![r(b), r(a), r(a)],
    ])
}

fn bistochastic_block(im: f64) -> Vec<Vec<Complex64>> {
    vec![vec![c(0.5, im), c(0.5, -im)], vec![c(0.5, -im), c(0.5, im)]]
}

/// Unitary with unit row sums whose squares do not sum to one.
pub fn bistochastic(n: usize) -> Result<MatrixRep> {
    padded(&bistochastic_block(0.5), n)
}

/// The same matrix with imaginary parts `±1`, which is not unitary.
pub fn bistochastic_printed() -> Result<BlockMatrix> {
    let mut rows = bistochastic_block(1.0);
    for row in &mut rows {
        row.push(r(0.0));
    }
    rows.push(vec![r(0.0), r(0.0), r(1.0)]);
    BlockMatrix::scalar(&rows)
}

pub fn sign_diagonal(n: usize) -> Result<MatrixRep> {
    diag_phase(r(-1.0), n)
}

pub fn root_of_unity(m: u32, n: usize) -> Result<MatrixRep> {
    diag_phase(phase(2.0 * PI / m as f64), n)
}

/// `diag(e^{iπ√2}, 1, ..)`; no power of the phase is one.
pub fn irrational_phase(n: usize) -> Result<MatrixRep> {
    diag_phase(phase(PI * 2f64.sqrt()), n)
}

/// `diag(i, 1, ..)`.
pub fn quarter_turn(n: usize) -> Result<MatrixRep> {
    diag_phase(c(0.0, 1.0), n)
}

/// `((0.6, 0.8i), (0.8i, 0.6))`, unitary with no further relation.
pub fn complex_rotation(n: usize) -> Result<MatrixRep> {
    padded(&[vec![r(0.6), c(0.0, 0.8)], vec![c(0.0, 0.8), r(0.6)]], n)
}

/// `u11 = u22 = E12`, `u12 = u21 = E21` on a 2-dimensional space, identity elsewhere.
pub fn nilpotent(n: usize) -> Result<MatrixRep> {
    if n < 2 {
        return Err(input("nilpotent witness needs n >= 2"));
    }
    let mut e12 = CMat::zeros(2, 2);
    e12[(0, 1)] = r(1.0);
    let e21 = e12.transpose();
    let blocks = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            match (i, j) {
                (0, 0) | (1, 1) => e12.clone(),
                (0, 1) | (1, 0) => e21.clone(),
                _ if i == j => CMat::identity(2, 2),
                _ => CMat::zeros(2, 2),
            }
        })
        .collect();
    MatrixRep::validated(BlockMatrix::new(n, 2, blocks)?, DEFAULT_TOL)
}

/// A representation of `family` that satisfies no family strictly below it
/// among the nine (at `n = 2` the bistochastic orthogonal case collapses to
/// the permutation witness).
pub fn own_witness(family: Family, n: usize) -> Result<MatrixRep> {
    if !(2..=3).contains(&n) {
        return Err(input("witnesses exist for n = 2 and n = 3"));
    }
    match family {
        Family::SPlus => permutation(n),
        Family::OPlus => rotation(n),
        Family::BsPlus if n == 3 => bistochastic_orthogonal(),
        Family::BsPlus => permutation(n),
        Family::HsPlus => sign_diagonal(n),
        Family::BPlus => bistochastic(n),
        Family::HmPlus(m) => root_of_unity(m, n),
        Family::H0Plus => irrational_phase(n),
        Family::HPrimePlus => nilpotent(n),
        Family::UPlus => complex_rotation(n),
    }
}

/// A stored witness with the family it represents.
#[derive(Debug, Clone)]
pub struct RepFixture {
    pub name: String,
    pub family: FamilyTag,
    pub rep: MatrixRep,
    pub note: Option<String>,
}

fn fixture(name: &str, family: Family, rep: MatrixRep, note: Option<&str>) -> RepFixture {
    RepFixture { name: name.into(), family: family.into(), rep, note: note.map(String::from) }
}

/// The full witness set (all valid, mostly `n = 3`).
pub fn witness_reps() -> Result<Vec<RepFixture>> {
    Ok(vec![
        fixture("permutation", Family::SPlus, permutation(3)?, None),
        fixture("swap", Family::SPlus, permutation(2)?, None),
        fixture("rotation", Family::OPlus, rotation(2)?, None),
        fixture("rotation3", Family::OPlus, rotation(3)?, None),
        fixture("bistochastic_orthogonal", Family::BsPlus, bistochastic_orthogonal()?, None),
        fixture(
            "bistochastic",
            Family::BPlus,
            bistochastic(3)?,
            Some("imaginary parts 1/2; the variant with parts 1 is not unitary"),
        ),
        fixture("sign_diagonal", Family::HsPlus, sign_diagonal(3)?, None),
        fixture("cube_root", Family::HmPlus(3), root_of_unity(3, 3)?, None),
        fixture("quarter_turn", Family::HmPlus(4), quarter_turn(3)?, None),
        fixture("irrational_phase", Family::H0Plus, irrational_phase(3)?, None),
        fixture("nilpotent", Family::HPrimePlus, nilpotent(2)?, None),
        fixture("nilpotent3", Family::HPrimePlus, nilpotent(3)?, None),
        fixture("complex_rotation", Family::UPlus, complex_rotation(2)?, None),
    ])
}

/// One sample distribution per free class, named by its tag.
pub fn sample_specs(seed: u64) -> Result<Vec<(FreeClass, CumulantSpec)>> {
    FreeClass::NINE.iter().map(|&t| Ok((t, sample_spec(t, seed)?))).collect()
}
