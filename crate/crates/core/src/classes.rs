//! Single-variable *-distributions given by cumulants, and their
//! classification by vanishing patterns.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::Elem;
use crate::cumulant::{pattern_of, single, CumulantTable, Multilinear};
use crate::error::{input, Error, Result};
use crate::partition::StarPattern;

/// Values below this are treated as exact zeros.
pub const SNAP: f64 = 1e-12;
/// Default classification order.
pub const DEFAULT_ORDER: usize = 6;
/// Default upper end of the `m`-unitary scan.
pub const DEFAULT_MMAX: u32 = 12;

/// Cumulants of one variable `x`, plus an additive constant.
///
/// For a self-adjoint variable every pattern of a given length carries the
/// same value; the table is stored expanded over all patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSpec {
    table: CumulantTable,
    shift: Elem,
    selfadjoint: bool,
}

impl CumulantSpec {
    pub fn new(table: CumulantTable, shift: Elem, selfadjoint: bool) -> Result<Self> {
        if table.num_vars() > 1 {
            return Err(input("a distribution spec describes a single variable"));
        }
        if shift.side() != table.side() || !shift.is_finite() {
            return Err(input("shift must be a finite element of the coefficient algebra"));
        }
        let table = if selfadjoint { expand_selfadjoint(&table)? } else { table };
        if selfadjoint && (shift.dist(&shift.adjoint()) > SNAP) {
            return Err(input("shift of a self-adjoint variable must be self-adjoint"));
        }
        Ok(CumulantSpec { table, shift, selfadjoint })
    }

    pub fn table(&self) -> &CumulantTable {
        &self.table
    }

    pub fn shift(&self) -> Elem {
        self.shift
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.selfadjoint
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn side(&self) -> usize {
        self.table.side()
    }

    /// Cumulants of `x` itself: the shift lands in the first cumulant.
    pub fn full_table(&self) -> Result<CumulantTable> {
        let mut t = self.table.clone();
        if self.shift.is_zero() {
            return Ok(t);
        }
        for (pat, b) in [("1", self.shift), ("*", self.shift.adjoint())] {
            let w = single(&pat.parse()?);
            let old = t.get(&w)?.map(|m| m.values()[0]).unwrap_or(Elem::zero(self.side()));
            t.insert(&w, Multilinear::from_values(self.side(), 1, vec![old + b])?)?;
        }
        t.prune();
        Ok(t)
    }

    /// Patterns with a non-negligible cumulant, up to `order`.
    fn support(table: &CumulantTable, order: usize) -> BTreeSet<StarPattern> {
        table
            .iter()
            .into_iter()
            .filter(|(w, t)| w.len() <= order && t.max_abs() > SNAP)
            .map(|(w, _)| pattern_of(&w))
            .collect()
    }
}

fn expand_selfadjoint(table: &CumulantTable) -> Result<CumulantTable> {
    let mut by_len: BTreeMap<usize, Multilinear> = BTreeMap::new();
    for (w, t) in table.iter() {
        if let Some(prev) = by_len.get(&w.len()) {
            if prev.dist(t) > SNAP {
                return Err(input(format!(
                    "self-adjoint spec has different values at order {}",
                    w.len()
                )));
            }
        } else {
            if table.side() == 1 && t.as_scalar().is_some_and(|z| z.im.abs() > SNAP) {
                return Err(input("self-adjoint spec must have real cumulants"));
            }
            by_len.insert(w.len(), t.clone());
        }
    }
    let mut out = CumulantTable::new(table.side(), table.order())?;
    for (k, t) in by_len {
        for pat in StarPattern::all(k) {
            out.insert(&single(&pat), t.clone())?;
        }
    }
    Ok(out)
}

/// The free distribution types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum FreeClass {
    Symmetric,
    Orthogonal,
    Semicircular,
    ShiftedOrthogonal,
    MUnitary(u32),
    FreeUnitary,
    RDiagonal,
    Circular,
    ShiftedCircular,
}

/// The classical distribution types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ClassicalClass {
    Symmetric,
    Orthogonal,
    Gaussian,
    ShiftedOrthogonal,
    MUnitary(u32),
    Unitary,
    ComplexGaussian,
    ShiftedComplexGaussian,
}

macro_rules! tag_names {
    ($ty:ident { $($variant:ident => $name:literal),* $(,)? }) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                match self {
                    $ty::MUnitary(m) => write!(f, "M_UNITARY({m})"),
                    $($ty::$variant => f.write_str($name),)*
                }
            }
        }

        impl FromStr for $ty {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                let upper = s.trim().to_ascii_uppercase().replace('-', "_");
                if let Some(rest) = upper.strip_prefix("M_UNITARY(").and_then(|r| r.strip_suffix(')')) {
                    let m: u32 = rest.parse().map_err(|_| input(format!("bad m in {s:?}")))?;
                    if m < 3 {
                        return Err(input("M_UNITARY needs m >= 3"));
                    }
                    return Ok($ty::MUnitary(m));
                }
                match upper.as_str() {
                    $($name => Ok($ty::$variant),)*
                    _ => Err(input(format!("unknown class tag {s:?}"))),
                }
            }
        }

        impl From<$ty> for String {
            fn from(t: $ty) -> String {
                t.to_string()
            }
        }

        impl TryFrom<String> for $ty {
            type Error = Error;

            fn try_from(s: String) -> Result<Self> {
                s.parse()
            }
        }
    };
}

tag_names!(FreeClass {
    Symmetric => "SYMMETRIC",
    Orthogonal => "ORTHOGONAL",
    Semicircular => "SEMICIRCULAR",
    ShiftedOrthogonal => "SHIFTED_ORTHOGONAL",
    FreeUnitary => "FREE_UNITARY",
    RDiagonal => "R_DIAGONAL",
    Circular => "CIRCULAR",
    ShiftedCircular => "SHIFTED_CIRCULAR",
});

tag_names!(ClassicalClass {
    Symmetric => "SYMMETRIC",
    Orthogonal => "ORTHOGONAL",
    Gaussian => "GAUSSIAN",
    ShiftedOrthogonal => "SHIFTED_ORTHOGONAL",
    Unitary => "UNITARY",
    ComplexGaussian => "COMPLEX_GAUSSIAN",
    ShiftedComplexGaussian => "SHIFTED_COMPLEX_GAUSSIAN",
});

impl FreeClass {
    /// The nine free types, with `M_UNITARY(3)` standing for the family.
    pub const NINE: [FreeClass; 9] = [
        FreeClass::Symmetric,
        FreeClass::Orthogonal,
        FreeClass::Semicircular,
        FreeClass::ShiftedOrthogonal,
        FreeClass::MUnitary(3),
        FreeClass::FreeUnitary,
        FreeClass::RDiagonal,
        FreeClass::Circular,
        FreeClass::ShiftedCircular,
    ];

    /// Direct implications out of this tag, restricted to `m <= mmax`.
    pub fn direct_implications(self, mmax: u32) -> Vec<FreeClass> {
        use FreeClass::*;
        match self {
            Semicircular => vec![Orthogonal],
            Orthogonal => vec![Symmetric],
            Circular => vec![Orthogonal, RDiagonal],
            RDiagonal => vec![FreeUnitary, Symmetric],
            FreeUnitary => {
                let mut v: Vec<_> = (3..=mmax).map(MUnitary).collect();
                v.push(Symmetric);
                v
            }
            MUnitary(m) => {
                let mut v: Vec<_> = (3..m).filter(|d| m % d == 0).map(MUnitary).collect();
                if m % 2 == 0 {
                    v.push(Symmetric);
                }
                v
            }
            ShiftedCircular => vec![ShiftedOrthogonal],
            Symmetric | ShiftedOrthogonal => vec![],
        }
    }
}

impl ClassicalClass {
    pub fn direct_implications(self, mmax: u32) -> Vec<ClassicalClass> {
        use ClassicalClass::*;
        match self {
            Gaussian => vec![Orthogonal],
            Orthogonal => vec![Symmetric],
            ComplexGaussian => vec![Orthogonal, Unitary],
            Unitary => {
                let mut v: Vec<_> = (3..=mmax).map(MUnitary).collect();
                v.push(Symmetric);
                v
            }
            MUnitary(m) => {
                let mut v: Vec<_> = (3..m).filter(|d| m % d == 0).map(MUnitary).collect();
                if m % 2 == 0 {
                    v.push(Symmetric);
                }
                v
            }
            ShiftedComplexGaussian => vec![ShiftedOrthogonal],
            Symmetric | ShiftedOrthogonal => vec![],
        }
    }
}

/// Every `(a, b)` with `a ⇒ b` directly, for the free tags with `m <= mmax`.
pub fn class_implications(mmax: u32) -> Vec<(FreeClass, FreeClass)> {
    let mut tags: Vec<FreeClass> =
        FreeClass::NINE.iter().copied().filter(|t| !matches!(t, FreeClass::MUnitary(_))).collect();
    tags.extend((3..=mmax).map(FreeClass::MUnitary));
    tags.iter()
        .flat_map(|&a| a.direct_implications(mmax).into_iter().map(move |b| (a, b)))
        .collect()
}

/// All tags implied by `tag` (including itself).
pub fn free_upward_closure(tag: FreeClass, mmax: u32) -> BTreeSet<FreeClass> {
    closure(tag, |t| t.direct_implications(mmax))
}

pub fn classical_upward_closure(tag: ClassicalClass, mmax: u32) -> BTreeSet<ClassicalClass> {
    closure(tag, |t| t.direct_implications(mmax))
}

fn closure<T: Ord + Copy>(start: T, next: impl Fn(T) -> Vec<T>) -> BTreeSet<T> {
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(t) = stack.pop() {
        for u in next(t) {
            if seen.insert(u) {
                stack.push(u);
            }
        }
    }
    seen
}

/// Result of a classification run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification<T: Ord> {
    pub tags: BTreeSet<T>,
    pub minimal: Vec<T>,
    /// Shifted types the classification computes but which carry no de
    /// Finetti statement (e.g. `SHIFTED_R_DIAGONAL`).
    pub noncanonical: Vec<String>,
    pub order: usize,
    pub mmax: u32,
}

/// Vanishing-pattern facts about a support set.
struct Shape {
    even: bool,
    length_two: bool,
    balanced: bool,
    alternating: bool,
    circular: bool,
    divisible: Vec<u32>,
}

impl Shape {
    fn of(support: &BTreeSet<StarPattern>, mmax: u32) -> Self {
        let all = |f: &dyn Fn(&StarPattern) -> bool| support.iter().all(f);
        Shape {
            even: all(&|p| p.len() % 2 == 0),
            length_two: all(&|p| p.len() == 2),
            balanced: all(&|p| p.imbalance() == 0),
            alternating: all(&|p| p.imbalance() == 0 && p.is_alternating()),
            circular: all(&|p| p.len() == 2 && p.imbalance() == 0),
            divisible: (3..=mmax)
                .filter(|&m| all(&|p| p.imbalance().rem_euclid(m as i64) == 0))
                .collect(),
        }
    }
}

fn prepare(spec: &CumulantSpec, order: usize) -> Result<(BTreeSet<StarPattern>, BTreeSet<StarPattern>, bool)> {
    if spec.order() < order {
        return Err(Error::Incomplete(format!(
            "spec has order {} but classification needs {}",
            spec.order(),
            order
        )));
    }
    let full = spec.full_table()?;
    let support = CumulantSpec::support(&full, order);
    let centered: BTreeSet<StarPattern> = support.iter().filter(|p| p.len() > 1).cloned().collect();
    let shifted = support.iter().any(|p| p.len() == 1);
    Ok((support, centered, shifted))
}

fn minimal_of<T: Ord + Copy>(tags: &BTreeSet<T>, up: impl Fn(T) -> BTreeSet<T>) -> Vec<T> {
    tags.iter()
        .copied()
        .filter(|&t| !tags.iter().any(|&u| u != t && up(u).contains(&t)))
        .collect()
}

/// Free types whose vanishing conditions the spec meets up to `order`.
pub fn classify_free(spec: &CumulantSpec, order: usize, mmax: u32) -> Result<Classification<FreeClass>> {
    let (support, centered, shifted) = prepare(spec, order)?;
    let s = Shape::of(&support, mmax);
    let mut tags = BTreeSet::new();
    if s.even {
        tags.insert(FreeClass::Symmetric);
    }
    if s.length_two {
        tags.insert(FreeClass::Orthogonal);
        if spec.is_selfadjoint() {
            tags.insert(FreeClass::Semicircular);
        }
    }
    tags.extend(s.divisible.iter().map(|&m| FreeClass::MUnitary(m)));
    if s.balanced {
        tags.insert(FreeClass::FreeUnitary);
    }
    if s.alternating {
        tags.insert(FreeClass::RDiagonal);
    }
    if s.circular {
        tags.insert(FreeClass::Circular);
    }
    let mut noncanonical = Vec::new();
    if shifted {
        let c = Shape::of(&centered, mmax);
        if c.length_two {
            tags.insert(FreeClass::ShiftedOrthogonal);
        }
        if c.circular {
            tags.insert(FreeClass::ShiftedCircular);
        }
        if c.alternating && !c.circular {
            noncanonical.push("SHIFTED_R_DIAGONAL".to_string());
        }
        if c.balanced && !c.alternating {
            noncanonical.push("SHIFTED_FREE_UNITARY".to_string());
        }
        if !c.balanced {
            noncanonical.extend(c.divisible.iter().map(|m| format!("SHIFTED_M_UNITARY({m})")));
        }
    }
    let minimal = minimal_of(&tags, |t| free_upward_closure(t, mmax));
    Ok(Classification { tags, minimal, noncanonical, order, mmax })
}

/// Classical types, reading the spec's table as classical cumulants.
pub fn classify_classical(
    spec: &CumulantSpec,
    order: usize,
    mmax: u32,
) -> Result<Classification<ClassicalClass>> {
    let (support, centered, shifted) = prepare(spec, order)?;
    let s = Shape::of(&support, mmax);
    let mut tags = BTreeSet::new();
    if s.even {
        tags.insert(ClassicalClass::Symmetric);
    }
    if s.length_two {
        tags.insert(ClassicalClass::Orthogonal);
        if spec.is_selfadjoint() {
            tags.insert(ClassicalClass::Gaussian);
        }
    }
    tags.extend(s.divisible.iter().map(|&m| ClassicalClass::MUnitary(m)));
    if s.balanced {
        tags.insert(ClassicalClass::Unitary);
    }
    if s.circular {
        tags.insert(ClassicalClass::ComplexGaussian);
    }
    let mut noncanonical = Vec::new();
    if shifted {
        let c = Shape::of(&centered, mmax);
        if c.length_two {
            tags.insert(ClassicalClass::ShiftedOrthogonal);
        }
        if c.circular {
            tags.insert(ClassicalClass::ShiftedComplexGaussian);
        }
        if !c.balanced {
            noncanonical.extend(c.divisible.iter().map(|m| format!("SHIFTED_M_UNITARY({m})")));
        }
    }
    let minimal = minimal_of(&tags, |t| classical_upward_closure(t, mmax));
    Ok(Classification { tags, minimal, noncanonical, order, mmax })
}

/// A spec whose free classification has `tag` as its unique minimal type.
/// Seed 0 uses unit values; other seeds draw values from `[0.5, 1.5)`.
pub fn sample_spec(tag: FreeClass, seed: u64) -> Result<CumulantSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = move || if seed == 0 { 1.0 } else { rng.gen_range(0.5..1.5) };
    let order = DEFAULT_ORDER;
    let mut entries: Vec<(String, f64)> = Vec::new();
    let circular = |entries: &mut Vec<(String, f64)>, v1: f64, v2: f64| {
        entries.push(("1*".into(), v1));
        entries.push(("*1".into(), v2));
    };
    let mut shift = 0.0;
    let mut selfadjoint = false;
    match tag {
        FreeClass::Circular => circular(&mut entries, draw(), draw()),
        FreeClass::ShiftedCircular => {
            circular(&mut entries, draw(), draw());
            shift = draw();
        }
        FreeClass::Semicircular => {
            selfadjoint = true;
            entries.push(("11".into(), draw()));
        }
        FreeClass::ShiftedOrthogonal => {
            selfadjoint = true;
            entries.push(("11".into(), draw()));
            shift = draw();
        }
        FreeClass::Symmetric => {
            selfadjoint = true;
            entries.push(("11".into(), draw()));
            entries.push(("1111".into(), draw()));
        }
        FreeClass::Orthogonal => {
            circular(&mut entries, draw(), draw());
            let v = 0.5 * draw();
            entries.push(("11".into(), v));
            entries.push(("**".into(), v));
        }
        FreeClass::MUnitary(m) => {
            if m < 3 || m as usize > order {
                return Err(input(format!("M_UNITARY({m}) sample needs 3 <= m <= {order}")));
            }
            circular(&mut entries, draw(), draw());
            let v = draw();
            entries.push(("1".repeat(m as usize), v));
            entries.push(("*".repeat(m as usize), v));
        }
        FreeClass::FreeUnitary => {
            circular(&mut entries, draw(), draw());
            entries.push(("11**".into(), draw()));
        }
        FreeClass::RDiagonal => {
            circular(&mut entries, draw(), draw());
            entries.push(("1*1*".into(), draw()));
            entries.push(("*1*1".into(), draw()));
        }
    }
    let mut t = CumulantTable::new(1, order)?;
    for (pat, v) in entries {
        t.set_scalar(&single(&pat.parse()?), Complex64::new(v, 0.0))?;
    }
    CumulantSpec::new(t, Elem::real(shift), selfadjoint)
}
