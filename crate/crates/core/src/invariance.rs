//! Invariance of joint *-distributions under a quantum family's coaction.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::Elem;
use crate::classes::{sample_spec, CumulantSpec, FreeClass, DEFAULT_MMAX};
use crate::cumulant::{word, FreeFamily, MomentOracle};
use crate::error::{input, Error, Result};
use crate::exec::Execution;
use crate::fixtures::own_witness;
use crate::partition::{Star, StarPattern};
use crate::qgroup::{block_identity_all, is_subgroup, CMat, Family, LatticeOrder, MatrixRep};

/// Work bound for one invariance check, in leaf products.
pub const BUDGET: u128 = 500_000_000;

/// The coefficients `b0, .., bk` interleaved with the variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    /// Only the identity.
    Identity,
    /// The identity plus a fixed seeded pair of non-commuting `2×2` matrices
    /// placed alternately in the interior slots.
    NonCommuting { seed: u64 },
}

impl Coefficients {
    fn side(self) -> usize {
        match self {
            Coefficients::Identity => 0,
            Coefficients::NonCommuting { .. } => 2,
        }
    }

    /// The pair used by `NonCommuting`.
    pub fn pair(seed: u64) -> (Elem, Elem) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let rows: Vec<Vec<Complex64>> = (0..2)
                .map(|_| (0..2).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect())
                .collect();
            Elem::from_rows(&rows).expect("2x2")
        };
        (draw(), draw())
    }

    /// Coefficient tuples of length `k + 1` over `M_p`.
    pub fn tuples(self, p: usize, k: usize) -> Result<Vec<Vec<Elem>>> {
        let mut out = vec![vec![Elem::identity(p); k + 1]];
        if let Coefficients::NonCommuting { seed } = self {
            if p != 2 {
                return Err(input("non-commuting coefficients need 2x2 matrix values"));
            }
            if k >= 2 {
                let (a, b) = Self::pair(seed);
                for first in [a, b] {
                    let second = if first == a { b } else { a };
                    let mut t = vec![Elem::identity(p); k + 1];
                    for (slot, x) in t.iter_mut().enumerate().take(k).skip(1) {
                        *x = if slot % 2 == 1 { first } else { second };
                    }
                    out.push(t);
                }
            }
        }
        Ok(out)
    }
}

/// First failure of the invariance equation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub order: usize,
    pub pattern: StarPattern,
    /// 1-based target indices.
    pub target: Vec<usize>,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceVerdict {
    pub invariant: bool,
    pub order: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Violation>,
    pub worst_residual: f64,
}

fn elem_to_cmat(e: &Elem) -> CMat {
    let p = e.side();
    CMat::from_fn(p, p, |r, c| e.get(r, c))
}

fn tuple_of(mut idx: usize, n: usize, k: usize) -> Vec<usize> {
    let mut t = vec![0; k];
    for slot in (0..k).rev() {
        t[slot] = idx % n;
        idx /= n;
    }
    t
}

/// Checks `Σ_ĩ E[b0 x^{d1}_{i1} ⋯ bk] ⊗ u^{d1}_{i1 j1} ⋯ u^{dk}_{ik jk} = E[b0 x^{d1}_{j1} ⋯ bk] ⊗ 1`
/// for every order up to `order`, every pattern and every target word.
pub fn check_invariance(
    joint: &dyn MomentOracle,
    rep: &MatrixRep,
    order: usize,
    coeffs: Coefficients,
    exec: Execution,
) -> Result<InvarianceVerdict> {
    let (n, d, p) = (rep.n(), rep.d(), joint.side());
    if joint.num_vars() != n {
        return Err(input(format!("distribution has {} variables but rep has n = {n}", joint.num_vars())));
    }
    if coeffs.side() != 0 && coeffs.side() != p {
        return Err(input("coefficient set does not match the distribution's coefficient algebra"));
    }
    let work: u128 = (1..=order)
        .map(|k| (n as u128).pow(2 * k as u32) << k)
        .sum();
    if work > BUDGET {
        return Err(Error::Budget(format!("{work} products exceed the budget of {BUDGET}")));
    }
    let plain = rep.matrix().blocks().to_vec();
    let adj: Vec<CMat> = plain.iter().map(|b| b.adjoint()).collect();
    let mut first: Option<Violation> = None;
    let mut worst = 0.0f64;

    for k in 1..=order {
        let count = n.pow(k as u32);
        for pattern in StarPattern::all(k) {
            let stars = pattern.stars();
            let mut residuals = vec![0.0f64; count];
            for tuple in coeffs.tuples(p, k)? {
                let moments = exec
                    .map_range(count, |idx| {
                        let w = word(&tuple_of(idx, n, k), &pattern)?;
                        joint.moment(&w, &tuple).map(|e| elem_to_cmat(&e))
                    })
                    .into_iter()
                    .collect::<Result<Vec<CMat>>>()?;
                let scale = moments.iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(1.0f64, f64::max);
                let res = exec.map_range(count, |target| {
                    let j = tuple_of(target, n, k);
                    let factor = |t: usize, i: usize| -> &CMat {
                        match stars[t] {
                            Star::Plain => &plain[i * n + j[t]],
                            Star::Adjoint => &adj[i * n + j[t]],
                        }
                    };
                    let mut acc = vec![CMat::zeros(d, d); p * p];
                    let mut prefix = vec![CMat::identity(d, d); k + 1];
                    contract(0, 0, k, n, &factor, &mut prefix, &moments, &mut acc);
                    let want = &moments[target];
                    let mut sq = 0.0;
                    for a in 0..p {
                        for b in 0..p {
                            let mut diff = acc[a * p + b].clone();
                            for x in 0..d {
                                diff[(x, x)] -= want[(a, b)];
                            }
                            sq += diff.norm_squared();
                        }
                    }
                    sq.sqrt() / scale
                });
                for (r, new) in residuals.iter_mut().zip(res) {
                    *r = r.max(new);
                }
            }
            for (target, &r) in residuals.iter().enumerate() {
                worst = worst.max(r);
                if first.is_none() && r > rep.tol() {
                    first = Some(Violation {
                        order: k,
                        pattern: pattern.clone(),
                        target: tuple_of(target, n, k).iter().map(|i| i + 1).collect(),
                        residual: r,
                    });
                }
            }
        }
    }
    Ok(InvarianceVerdict { invariant: first.is_none(), order, first_violation: first, worst_residual: worst })
}

#[allow(clippy::too_many_arguments)]
fn contract<'a>(
    t: usize,
    idx: usize,
    k: usize,
    n: usize,
    factor: &impl Fn(usize, usize) -> &'a CMat,
    prefix: &mut [CMat],
    moments: &[CMat],
    acc: &mut [CMat],
) {
    if t == k {
        let m = &moments[idx];
        let p = m.nrows();
        for a in 0..p {
            for b in 0..p {
                let z = m[(a, b)];
                if z != Complex64::new(0.0, 0.0) {
                    acc[a * p + b] += &prefix[k] * z;
                }
            }
        }
        return;
    }
    for i in 0..n {
        let (done, rest) = prefix.split_at_mut(t + 1);
        rest[0].gemm(Complex64::new(1.0, 0.0), &done[t], factor(t, i), Complex64::new(0.0, 0.0));
        if rest[0].iter().all(|z| *z == Complex64::new(0.0, 0.0)) {
            continue;
        }
        contract(t + 1, idx * n + i, k, n, factor, prefix, moments, acc);
    }
}

/// First and second moments are exchangeable.
pub fn check_2_exchangeable(joint: &dyn MomentOracle, coeffs: Coefficients, tol: f64) -> Result<bool> {
    let (n, p) = (joint.num_vars(), joint.side());
    if n < 2 {
        return Err(input("2-exchangeability needs at least two variables"));
    }
    for k in 1..=2 {
        for tuple in coeffs.tuples(p, k)? {
            for pattern in StarPattern::all(k) {
                let value = |vars: &[usize]| joint.moment(&word(vars, &pattern)?, &tuple);
                if k == 1 {
                    let base = value(&[0])?;
                    for i in 1..n {
                        if value(&[i])?.dist(&base) > tol {
                            return Ok(false);
                        }
                    }
                } else {
                    let same = value(&[0, 0])?;
                    let diff = value(&[0, 1])?;
                    for i in 0..n {
                        for j in 0..n {
                            let want = if i == j { &same } else { &diff };
                            if value(&[i, j])?.dist(want) > tol {
                                return Ok(false);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(true)
}

/// A pattern whose cumulant is nonzero, with its block identity on the rep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityPrediction {
    pub pattern: StarPattern,
    pub holds: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtractorReport {
    pub predictions: Vec<IdentityPrediction>,
    pub predicted_invariant: bool,
    pub verdict: InvarianceVerdict,
    pub agrees: bool,
    /// When a violation is predicted: it shows up no later than the shortest
    /// failing pattern.
    pub within_order: bool,
}

/// Predicts invariance of the free i.i.d. family from the block identities
/// of the nonzero cumulant patterns, then cross-checks it.
pub fn cumulant_identity_extractor(
    spec: &CumulantSpec,
    rep: &MatrixRep,
    order: usize,
    exec: Execution,
) -> Result<ExtractorReport> {
    let table = spec.full_table()?.truncated(order);
    let mut predictions = Vec::new();
    for (w, t) in table.iter() {
        if t.max_abs() <= crate::classes::SNAP {
            continue;
        }
        let pattern = StarPattern(w.iter().map(|l| l.star()).collect());
        let c = block_identity_all(rep, &pattern)?;
        predictions.push(IdentityPrediction { pattern, holds: c.holds, residual: c.residual });
    }
    let predicted_invariant = predictions.iter().all(|p| p.holds);
    let coeffs = if table.side() == 2 { Coefficients::NonCommuting { seed: 0 } } else { Coefficients::Identity };
    let joint = FreeFamily::new(table, rep.n())?;
    let verdict = check_invariance(&joint, rep, order, coeffs, exec)?;
    let shortest = predictions.iter().filter(|p| !p.holds).map(|p| p.pattern.len()).min();
    let within_order = match (shortest, &verdict.first_violation) {
        (Some(len), Some(v)) => v.order <= len,
        (Some(_), None) => false,
        (None, _) => true,
    };
    Ok(ExtractorReport {
        agrees: predicted_invariant == verdict.invariant,
        predictions,
        predicted_invariant,
        verdict,
        within_order,
    })
}

/// The quantum family whose invariant free sequences realize the class.
pub fn family_of_class(class: FreeClass) -> Family {
    match class {
        FreeClass::Symmetric => Family::HsPlus,
        FreeClass::Orthogonal | FreeClass::Semicircular => Family::OPlus,
        FreeClass::ShiftedOrthogonal => Family::BsPlus,
        FreeClass::MUnitary(m) => Family::HmPlus(m),
        FreeClass::FreeUnitary => Family::H0Plus,
        FreeClass::RDiagonal => Family::HPrimePlus,
        FreeClass::Circular => Family::UPlus,
        FreeClass::ShiftedCircular => Family::BPlus,
    }
}

/// The family actually realized by the stored witness for `family` at size `n`.
pub fn witness_family(family: Family, n: usize) -> Family {
    if family == Family::BsPlus && n == 2 {
        Family::SPlus
    } else {
        family
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeCell {
    pub witness: Family,
    /// The family the witness realizes at this size.
    pub realized: Family,
    /// Predicted by the published diagram.
    pub expected: bool,
    /// Predicted by the order including all forced inclusions.
    pub expected_completed: bool,
    pub invariant: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_violation: Option<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub family: Family,
    pub cells: BTreeMap<String, ProbeCell>,
}

impl ProbeRow {
    /// Key of the cell holding the row family's own witness.
    pub fn family_witness_key(&self) -> String {
        self.family.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeGrid {
    pub n: usize,
    pub order: usize,
    pub rows: BTreeMap<String, ProbeRow>,
    /// Cells where the verdict differs from the diagram, as `(class, witness)`.
    pub mismatches: Vec<(String, String)>,
    /// Cells where the verdict differs from the completed order.
    pub mismatches_completed: Vec<(String, String)>,
}

/// Runs each class's sample free family against the witness of every family.
pub fn theorem1_probe(n: usize, order: usize, exec: Execution) -> Result<ProbeGrid> {
    if !(2..=3).contains(&n) {
        return Err(input("probe supports n = 2 or n = 3"));
    }
    if order > 5 {
        return Err(Error::SizeLimit { what: "probe order", value: order, limit: 5 });
    }
    let witnesses: Vec<(Family, MatrixRep)> =
        Family::NINE.iter().map(|&f| Ok((f, own_witness(f, n)?))).collect::<Result<_>>()?;
    let joints = FreeClass::NINE
        .iter()
        .map(|&class| FreeFamily::new(sample_spec(class, 0)?.full_table()?.truncated(order), n))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> =
        (0..joints.len()).flat_map(|c| (0..witnesses.len()).map(move |w| (c, w))).collect();
    let verdicts = exec
        .map(&jobs, |&(c, w)| check_invariance(&joints[c], &witnesses[w].1, order, Coefficients::Identity, exec))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut verdicts = verdicts.into_iter();
    let mut rows = BTreeMap::new();
    let mut mismatches = Vec::new();
    let mut mismatches_completed = Vec::new();
    for class in FreeClass::NINE {
        let family = family_of_class(class);
        let mut cells = BTreeMap::new();
        for (wf, _) in &witnesses {
            let realized = witness_family(*wf, n);
            let v = verdicts.next().expect("one verdict per cell");
            let cell = ProbeCell {
                witness: *wf,
                realized,
                expected: is_subgroup(*wf, family, LatticeOrder::Diagram, DEFAULT_MMAX),
                expected_completed: is_subgroup(realized, family, LatticeOrder::Completed, DEFAULT_MMAX),
                invariant: v.invariant,
                first_violation: v.first_violation,
            };
            if cell.invariant != cell.expected {
                mismatches.push((class.to_string(), wf.to_string()));
            }
            if cell.invariant != cell.expected_completed {
                mismatches_completed.push((class.to_string(), wf.to_string()));
            }
            cells.insert(wf.to_string(), cell);
        }
        rows.insert(class.to_string(), ProbeRow { family, cells });
    }
    Ok(ProbeGrid { n, order, rows, mismatches, mismatches_completed })
}
