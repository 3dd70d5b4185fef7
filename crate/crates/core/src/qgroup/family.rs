//! Universal relations of the nine free families and the subgroup lattice.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use super::rep::{check_biunitary, CMat, Check, MatrixRep};
use crate::error::{input, Error, Result};
use crate::exec::Execution;
use crate::partition::{Star, StarPattern};

/// Largest number of index tuples a δ-identity check visits.
pub const MAX_TUPLES: usize = 1_000_000;

/// The nine free quantum families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    SPlus,
    OPlus,
    BsPlus,
    HsPlus,
    BPlus,
    /// `m >= 3`.
    HmPlus(u32),
    H0Plus,
    HPrimePlus,
    UPlus,
}

impl Family {
    /// The nine families, with `H⁺₃` standing for the `H⁺ₘ` series.
    pub const NINE: [Family; 9] = [
        Family::SPlus,
        Family::OPlus,
        Family::BsPlus,
        Family::HsPlus,
        Family::BPlus,
        Family::HmPlus(3),
        Family::H0Plus,
        Family::HPrimePlus,
        Family::UPlus,
    ];

    /// Every family with `H⁺ₘ` for `3 <= m <= mmax`.
    pub fn all(mmax: u32) -> Vec<Family> {
        let mut v = vec![Family::SPlus, Family::OPlus, Family::BsPlus, Family::HsPlus, Family::BPlus];
        v.extend((3..=mmax).map(Family::HmPlus));
        v.extend([Family::H0Plus, Family::HPrimePlus, Family::UPlus]);
        v
    }

    fn stem(self) -> String {
        match self {
            Family::SPlus => "S".into(),
            Family::OPlus => "O".into(),
            Family::BsPlus => "B_S".into(),
            Family::HsPlus => "H_S".into(),
            Family::BPlus => "B".into(),
            Family::HmPlus(m) => format!("H_M({m})"),
            Family::H0Plus => "H_0".into(),
            Family::HPrimePlus => "H_PRIME".into(),
            Family::UPlus => "U".into(),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::HmPlus(m) => write!(f, "H_M_PLUS({m})"),
            other => write!(f, "{}_PLUS", other.stem()),
        }
    }
}

impl Serialize for Family {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A family plus the commutativity flag of its classical counterpart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyTag {
    pub family: Family,
    pub classical: bool,
}

impl From<Family> for FamilyTag {
    fn from(family: Family) -> Self {
        FamilyTag { family, classical: false }
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.classical {
            f.write_str(&self.family.stem())
        } else {
            write!(f, "{}", self.family)
        }
    }
}

impl Serialize for FamilyTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut upper = s.trim().to_ascii_uppercase().replace('-', "_");
        let indexed_plus = upper.contains("_PLUS(");
        if indexed_plus {
            upper = upper.replace("_PLUS(", "(") + "_PLUS";
        }
        let (stem, classical) = match upper.strip_suffix("_PLUS") {
            Some(stem) => (stem.to_string(), false),
            None => match upper.strip_suffix('+') {
                Some(stem) => (stem.to_string(), false),
                None => (upper.clone(), true),
            },
        };
        let family = match stem.as_str() {
            "S" => Family::SPlus,
            "O" => Family::OPlus,
            "B_S" | "BS" => Family::BsPlus,
            "H_S" | "HS" => Family::HsPlus,
            "B" => Family::BPlus,
            "H_0" | "H0" => Family::H0Plus,
            "H_PRIME" | "H'" => Family::HPrimePlus,
            "U" => Family::UPlus,
            other => {
                let m = other
                    .strip_prefix("H_M(")
                    .or_else(|| other.strip_prefix("H("))
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| input(format!("unknown family {s:?}")))?;
                let m: u32 = m.parse().map_err(|_| input(format!("bad m in {s:?}")))?;
                if m < 3 {
                    return Err(input("H_M_PLUS needs m >= 3"));
                }
                Family::HmPlus(m)
            }
        };
        Ok(FamilyTag { family, classical })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let tag: FamilyTag = s.parse()?;
        if tag.classical {
            return Err(input(format!("{s:?} names a classical family")));
        }
        Ok(tag.family)
    }
}

fn frob(m: &CMat) -> f64 {
    m.norm()
}

fn factor_tables(rep: &MatrixRep) -> (Vec<CMat>, Vec<CMat>) {
    let plain = rep.matrix().blocks().to_vec();
    let adj = plain.iter().map(|b| b.adjoint()).collect();
    (plain, adj)
}

/// `Σ_α u^{d1}_{α j} ⋯ u^{dk}_{α j}` compared with the identity.
pub fn block_identity(rep: &MatrixRep, pattern: &StarPattern, j: usize) -> Result<Check> {
    let (n, d) = (rep.n(), rep.d());
    if j >= n {
        return Err(input(format!("column {} out of range", j + 1)));
    }
    if pattern.is_empty() {
        return Err(input("block identity needs a nonempty pattern"));
    }
    let mut sum = CMat::zeros(d, d);
    for alpha in 0..n {
        let u = rep.entry(alpha, j);
        let prod = pattern.stars().iter().fold(CMat::identity(d, d), |acc, s| match s {
            Star::Plain => acc * u,
            Star::Adjoint => acc * u.adjoint(),
        });
        sum += prod;
    }
    let residual = frob(&(sum - CMat::identity(d, d)));
    Ok(Check::new(residual, rep.tol(), Some(vec![j + 1])))
}

/// Block identity for every column; the witness is the worst column.
pub fn block_identity_all(rep: &MatrixRep, pattern: &StarPattern) -> Result<Check> {
    let mut worst: Option<Check> = None;
    for j in 0..rep.n() {
        let c = block_identity(rep, pattern, j)?;
        worst = Some(match worst {
            None => c,
            Some(w) => w.worst(c),
        });
    }
    Ok(worst.expect("n >= 1"))
}

/// `Σ_α u^{d1}_{α,i1} ⋯ u^{dk}_{α,ik} = δ(i1, .., ik) · 1` for all tuples.
pub fn full_delta_identity(rep: &MatrixRep, pattern: &StarPattern, exec: Execution) -> Result<Check> {
    let (n, d, k) = (rep.n(), rep.d(), pattern.len());
    if k == 0 {
        return Err(input("δ-identity needs a nonempty pattern"));
    }
    let tuples = n.checked_pow(k as u32).filter(|&t| t <= MAX_TUPLES).ok_or(Error::SizeLimit {
        what: "index tuples",
        value: n.saturating_pow(k as u32),
        limit: MAX_TUPLES,
    })?;
    let (plain, adj) = factor_tables(rep);
    let factor = |t: usize, alpha: usize, i: usize| -> &CMat {
        match pattern.stars()[t] {
            Star::Plain => &plain[alpha * n + i],
            Star::Adjoint => &adj[alpha * n + i],
        }
    };
    // Split the tuple space on its first (up to) two indices.
    let head = k.min(2);
    let chunks = n.pow(head as u32);
    let results = exec.map_range(chunks, |chunk| {
        let mut tuple = vec![0usize; k];
        let mut c = chunk;
        for slot in (0..head).rev() {
            tuple[slot] = c % n;
            c /= n;
        }
        let mut prefix: Vec<Vec<CMat>> = vec![vec![CMat::identity(d, d); n]; k + 1];
        for t in 0..head {
            for alpha in 0..n {
                prefix[t + 1][alpha] = &prefix[t][alpha] * factor(t, alpha, tuple[t]);
            }
        }
        let mut best = (0.0f64, tuple.clone());
        descend(head, &mut tuple, &mut prefix, &factor, n, d, &mut best);
        best
    });
    debug_assert!(tuples >= chunks);
    let (residual, worst) = results
        .into_iter()
        .fold((0.0f64, Vec::new()), |acc, r| if r.0 > acc.0 || acc.1.is_empty() { r } else { acc });
    Ok(Check::new(residual, rep.tol(), Some(worst.iter().map(|i| i + 1).collect())))
}

#[allow(clippy::too_many_arguments)]
fn descend<'a>(
    t: usize,
    tuple: &mut Vec<usize>,
    prefix: &mut Vec<Vec<CMat>>,
    factor: &impl Fn(usize, usize, usize) -> &'a CMat,
    n: usize,
    d: usize,
    best: &mut (f64, Vec<usize>),
) {
    let k = tuple.len();
    if t == k {
        let mut sum = CMat::zeros(d, d);
        for p in &prefix[k] {
            sum += p;
        }
        if tuple.iter().all(|&i| i == tuple[0]) {
            for i in 0..d {
                sum[(i, i)] -= Complex64::new(1.0, 0.0);
            }
        }
        let r = frob(&sum);
        if r > best.0 {
            *best = (r, tuple.clone());
        }
        return;
    }
    for i in 0..n {
        tuple[t] = i;
        let (done, rest) = prefix.split_at_mut(t + 1);
        for alpha in 0..n {
            rest[0][alpha].gemm(
                Complex64::new(1.0, 0.0),
                &done[t][alpha],
                factor(t, alpha, i),
                Complex64::new(0.0, 0.0),
            );
        }
        descend(t + 1, tuple, prefix, factor, n, d, best);
    }
}

/// All row and column sums equal the identity. The witness is the 1-based
/// index of the worst row or column.
pub fn row_column_sums(rep: &MatrixRep) -> Check {
    let (n, d) = (rep.n(), rep.d());
    let id = CMat::identity(d, d);
    let mut worst = (0.0f64, vec![]);
    for i in 0..n {
        let row = (0..n).fold(CMat::zeros(d, d), |acc, k| acc + rep.entry(i, k));
        let col = (0..n).fold(CMat::zeros(d, d), |acc, k| acc + rep.entry(k, i));
        let r = frob(&(row - &id)).max(frob(&(col - &id)));
        if r > worst.0 {
            worst = (r, vec![i + 1]);
        }
    }
    Check::new(worst.0, rep.tol(), (!worst.1.is_empty()).then_some(worst.1))
}

/// Each matrix produced by `f` from an entry is an orthogonal projection.
fn projections(rep: &MatrixRep, f: impl Fn(&CMat) -> CMat) -> Check {
    let n = rep.n();
    let mut worst = (0.0f64, vec![]);
    for i in 0..n {
        for j in 0..n {
            let p = f(rep.entry(i, j));
            let r = frob(&(&p * &p - &p)).max(frob(&(&p - p.adjoint())));
            if r > worst.0 {
                worst = (r, vec![i + 1, j + 1]);
            }
        }
    }
    Check::new(worst.0, rep.tol(), (!worst.1.is_empty()).then_some(worst.1))
}

pub fn entries_are_projections(rep: &MatrixRep) -> Check {
    projections(rep, |u| u.clone())
}

pub fn squares_are_projections(rep: &MatrixRep) -> Check {
    projections(rep, |u| u * u)
}

/// All pairs of entries commute (the classical counterpart).
pub fn entries_commute(rep: &MatrixRep) -> Check {
    let blocks = rep.matrix().blocks();
    let n = rep.n();
    let mut worst = (0.0f64, vec![]);
    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            let r = frob(&(&blocks[a] * &blocks[b] - &blocks[b] * &blocks[a]));
            if r > worst.0 {
                worst = (r, vec![a / n + 1, a % n + 1, b / n + 1, b % n + 1]);
            }
        }
    }
    Check::new(worst.0, rep.tol(), (!worst.1.is_empty()).then_some(worst.1))
}

/// Result of checking one family's defining relations.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilyCheck {
    pub family: FamilyTag,
    pub holds: bool,
    pub residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    /// First relation that failed.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed: Option<String>,
}

fn pat(s: &str) -> StarPattern {
    s.parse().expect("literal pattern")
}

/// Checks the defining relations of `tag` (biunitarity included).
pub fn check_family(rep: &MatrixRep, tag: FamilyTag, exec: Execution) -> Result<FamilyCheck> {
    let tol = rep.tol();
    let b = check_biunitary(rep);
    let mut relations: Vec<(String, Check)> =
        vec![("biunitary".into(), Check::new(b.residual, tol, None))];
    let delta = |p: &str| -> Result<(String, Check)> {
        Ok((format!("delta({p})"), full_delta_identity(rep, &pat(p), exec)?))
    };
    match tag.family {
        Family::UPlus => {}
        Family::OPlus => relations.push(delta("11")?),
        Family::BsPlus => {
            relations.push(delta("11")?);
            relations.push(("row/column sums".into(), row_column_sums(rep)));
        }
        Family::HsPlus => {
            relations.push(delta("11")?);
            relations.push(("squares are projections".into(), squares_are_projections(rep)));
        }
        Family::BPlus => relations.push(("row/column sums".into(), row_column_sums(rep))),
        Family::HmPlus(m) => {
            if m < 3 {
                return Err(input("H_M_PLUS needs m >= 3"));
            }
            relations.push(delta(&"1".repeat(m as usize))?);
        }
        Family::H0Plus => relations.push(delta("11**")?),
        Family::HPrimePlus => relations.push(delta("1*1*")?),
        Family::SPlus => {
            relations.push(("entries are projections".into(), entries_are_projections(rep)));
            relations.push(("row/column sums".into(), row_column_sums(rep)));
        }
    }
    if tag.classical {
        relations.push(("entries commute".into(), entries_commute(rep)));
    }
    let holds = relations.iter().all(|(_, c)| c.holds);
    let failed = relations.iter().find(|(_, c)| !c.holds).map(|(name, _)| name.clone());
    let worst = relations
        .iter()
        .max_by(|a, b| a.1.residual.total_cmp(&b.1.residual))
        .map(|(_, c)| c.clone())
        .expect("biunitarity always checked");
    Ok(FamilyCheck { family: tag, holds, residual: worst.residual, witness: worst.witness, failed })
}

/// Which inclusions the subgroup order contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOrder {
    /// Exactly the edges drawn in the published subgroup diagram.
    Diagram,
    /// The diagram plus the inclusions forced by the relations:
    /// `H⁺ₛ ⊂ H⁺₀`, `H⁺ₛ ⊂ H⁺ₘ` for even `m`, `H⁺ₘ ⊂ H⁺ₘ'` for `m | m'`.
    Completed,
}

/// Families directly above `f` (`f ⊂ g`).
pub fn parents(f: Family, order: LatticeOrder, mmax: u32) -> Vec<Family> {
    use Family::*;
    let completed = order == LatticeOrder::Completed;
    let hm = |pred: &dyn Fn(u32) -> bool| -> Vec<Family> { (3..=mmax).filter(|&m| pred(m)).map(HmPlus).collect() };
    match f {
        SPlus => {
            let mut v = vec![BsPlus, HsPlus];
            v.extend(hm(&|_| true));
            v
        }
        BsPlus => vec![BPlus, OPlus],
        HsPlus => {
            let mut v = vec![OPlus];
            if completed {
                v.push(H0Plus);
                v.extend(hm(&|m| m % 2 == 0));
            }
            v
        }
        HmPlus(m) => {
            let mut v = vec![H0Plus];
            if completed {
                v.extend(hm(&|m2| m2 != m && m2 % m == 0));
            }
            v
        }
        H0Plus => vec![HPrimePlus],
        BPlus | OPlus | HPrimePlus => vec![UPlus],
        UPlus => vec![],
    }
}

/// All families containing `f` (including `f`).
pub fn upward(f: Family, order: LatticeOrder, mmax: u32) -> BTreeSet<Family> {
    let mut seen = BTreeSet::from([f]);
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        for h in parents(g, order, mmax) {
            if seen.insert(h) {
                stack.push(h);
            }
        }
    }
    seen
}

/// `a ⊂ b` in the chosen order (reflexive).
pub fn is_subgroup(a: Family, b: Family, order: LatticeOrder, mmax: u32) -> bool {
    let mmax = mmax.max(hm_index(a)).max(hm_index(b));
    upward(a, order, mmax).contains(&b)
}

fn hm_index(f: Family) -> u32 {
    match f {
        Family::HmPlus(m) => m,
        _ => 0,
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Where a representation sits in the subgroup lattice.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticePosition {
    pub mmax: u32,
    /// Families whose relations were verified directly.
    pub satisfied: Vec<Family>,
    /// Families added by the closure rules (gcd of H-indices, `B⁺ ∧ H′⁺ ⇒ S⁺`).
    pub implied: Vec<Family>,
    /// Implied families whose direct check nevertheless failed.
    pub conflicts: Vec<Family>,
    /// Minimal satisfied nodes under the completed order.
    pub minimal: Vec<Family>,
    pub checks: BTreeMap<String, FamilyCheck>,
}

pub fn lattice_position(rep: &MatrixRep, mmax: u32, exec: Execution) -> Result<LatticePosition> {
    if mmax > 16 {
        return Err(Error::SizeLimit { what: "H_M scan bound", value: mmax as usize, limit: 16 });
    }
    let families = Family::all(mmax);
    let checks = families
        .iter()
        .map(|&f| check_family(rep, f.into(), exec))
        .collect::<Result<Vec<_>>>()?;
    let satisfied: BTreeSet<Family> =
        checks.iter().filter(|c| c.holds).map(|c| c.family.family).collect();

    let mut closed = satisfied.clone();
    loop {
        let mut indices: Vec<u32> = closed.iter().map(|&f| hm_index(f)).filter(|&m| m > 0).collect();
        if closed.contains(&Family::OPlus) {
            indices.push(2);
        }
        let mut add = Vec::new();
        for (x, &a) in indices.iter().enumerate() {
            for &b in &indices[x + 1..] {
                add.push(match gcd(a, b) {
                    1 => Family::BPlus,
                    2 => Family::OPlus,
                    g => Family::HmPlus(g),
                });
            }
        }
        if closed.contains(&Family::BPlus) && closed.contains(&Family::HPrimePlus) {
            add.push(Family::SPlus);
        }
        let before = closed.len();
        for f in add {
            closed.extend(upward(f, LatticeOrder::Completed, mmax));
        }
        if closed.len() == before {
            break;
        }
    }
    let implied: Vec<Family> = closed.difference(&satisfied).copied().collect();
    let conflicts = implied.clone();
    let minimal = closed
        .iter()
        .copied()
        .filter(|&f| {
            !closed
                .iter()
                .any(|&g| g != f && upward(g, LatticeOrder::Completed, mmax).contains(&f))
        })
        .collect();
    Ok(LatticePosition {
        mmax,
        satisfied: satisfied.into_iter().collect(),
        implied,
        conflicts,
        minimal,
        checks: checks.into_iter().map(|c| (c.family.to_string(), c)).collect(),
    })
}
