//! Consequences of a single-pattern block identity.

use serde::Serialize;

use super::family::{block_identity_all, full_delta_identity};
use super::rep::{CMat, Check, MatrixRep};
use crate::error::{input, Result};
use crate::exec::Execution;
use crate::partition::{Star, StarPattern};

/// One derived relation and whether it holds on the representation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Consequence {
    pub name: String,
    pub holds: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Consequence {
    fn from_check(name: impl Into<String>, c: Check) -> Self {
        Consequence { name: name.into(), holds: c.holds, residual: c.residual, witness: c.witness }
    }
}

/// Structural report for one pattern.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub pattern: StarPattern,
    /// Whether the δ-identity of the pattern holds for every index tuple.
    pub hypothesis: bool,
    pub hypothesis_residual: f64,
    pub consequences: Vec<Consequence>,
    /// The hypothesis holds but some consequence does not.
    pub contradiction: bool,
}

fn power(u: &CMat, s: Star) -> CMat {
    match s {
        Star::Plain => u.clone(),
        Star::Adjoint => u.adjoint(),
    }
}

fn worst_over_entries(rep: &MatrixRep, f: impl Fn(usize, usize) -> f64) -> Check {
    let mut worst = (0.0f64, vec![1, 1]);
    for i in 0..rep.n() {
        for j in 0..rep.n() {
            let r = f(i, j);
            if r > worst.0 {
                worst = (r, vec![i + 1, j + 1]);
            }
        }
    }
    Check::new(worst.0, rep.tol(), Some(worst.1))
}

/// Checks the entrywise relations that follow from the δ-identity
/// `Σ_α u^{d1}_{α,i1} ⋯ u^{dk}_{α,ik} = δ(i1, .., ik) · 1`.
pub fn structural_consequences(rep: &MatrixRep, pattern: &StarPattern) -> Result<StructureReport> {
    let k = pattern.len();
    if k == 0 {
        return Err(input("pattern must be nonempty"));
    }
    let hyp = full_delta_identity(rep, pattern, Execution::default())?;
    let stars = pattern.stars();
    let mut out = Vec::new();

    if k >= 2 {
        // Each entry is invertible with the tail product as inverse.
        let inverse = worst_over_entries(rep, |i, j| {
            let u = rep.entry(i, j);
            let tail = stars[1..].iter().fold(CMat::identity(rep.d(), rep.d()), |acc, &s| acc * power(u, s));
            (tail - power(u, stars[0]).adjoint()).norm()
        });
        out.push(Consequence::from_check("tail product is adjoint of head", inverse));
        out.push(Consequence::from_check(
            format!("rotated pattern {}", pattern.rotate()),
            block_identity_all(rep, &pattern.rotate())?,
        ));
    }

    if k >= 3 {
        let partial = worst_over_entries(rep, |i, j| {
            let u = rep.entry(i, j);
            (u * u.adjoint() * u - u).norm()
        });
        out.push(Consequence::from_check("entries are partial isometries", partial));
        let mut worst = (0.0f64, vec![1, 1, 1]);
        for kk in 0..rep.n() {
            for i in 0..rep.n() {
                for j in 0..rep.n() {
                    if i == j {
                        continue;
                    }
                    let (a, b) = (rep.entry(i, kk), rep.entry(j, kk));
                    let r = (a.adjoint() * b).norm().max((a * b.adjoint()).norm());
                    if r > worst.0 {
                        worst = (r, vec![i + 1, j + 1, kk + 1]);
                    }
                }
            }
        }
        out.push(Consequence::from_check(
            "column entries are orthogonal",
            Check::new(worst.0, rep.tol(), Some(worst.1)),
        ));
    }

    if k % 2 == 1 || !pattern.is_alternating() {
        let normal = worst_over_entries(rep, |i, j| {
            let u = rep.entry(i, j);
            (u * u.adjoint() - u.adjoint() * u).norm()
        });
        out.push(Consequence::from_check("entries are normal", normal));
    }

    let m = pattern.imbalance().unsigned_abs() as usize;
    if m >= 1 {
        let pm = StarPattern::plain(m);
        out.push(Consequence::from_check(format!("column sums of {m}th powers"), block_identity_all(rep, &pm)?));
    }

    let contradiction = hyp.holds && out.iter().any(|c| !c.holds);
    Ok(StructureReport {
        pattern: pattern.clone(),
        hypothesis: hyp.holds,
        hypothesis_residual: hyp.residual,
        consequences: out,
        contradiction,
    })
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;

    #[test]
    fn cube_roots_satisfy_consequences() {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let rep = MatrixRep::scalar(&[vec![w, zero], vec![zero, one]]).unwrap();
        let r = structural_consequences(&rep, &"111".parse().unwrap()).unwrap();
        assert!(r.hypothesis);
        assert!(!r.contradiction);
        assert!(r.consequences.iter().all(|c| c.holds), "{r:?}");
    }

    #[test]
    fn hypothesis_failure_is_reported() {
        let x = Complex64::new(0.6, 0.0);
        let y = Complex64::new(0.8, 0.0);
        let rep = MatrixRep::scalar(&[vec![x, y], vec![y, -x]]).unwrap();
        let r = structural_consequences(&rep, &"111".parse().unwrap()).unwrap();
        assert!(!r.hypothesis);
        assert!(!r.contradiction);
    }
}
