//! JSON files for representations and distribution specs.
//!
//! Complex numbers are `[re, im]` pairs and matrices are row-major.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::Elem;
use crate::classes::CumulantSpec;
use crate::cumulant::{
    cumulants_from_moments, pattern_of, vars_of, word, CumulantTable, Lattice, Multilinear, MomentTable,
};
use crate::error::{input, Result};
use crate::exec::Execution;
use crate::fixtures::{self, sample_specs};
use crate::partition::StarPattern;
use crate::qgroup::{check_biunitary, BlockMatrix, CMat, MatrixRep, DEFAULT_TOL};

type Pair = [f64; 2];

fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

fn complex(p: Pair) -> Result<Complex64> {
    if p.iter().all(|x| x.is_finite()) {
        Ok(Complex64::new(p[0], p[1]))
    } else {
        Err(input("non-finite number"))
    }
}

/// On-disk form of a representation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepFile {
    pub n: usize,
    pub d: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// `n×n` array of `d×d` arrays.
    pub entries: Vec<Vec<Vec<Vec<Pair>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl RepFile {
    pub fn from_rep(rep: &MatrixRep) -> Self {
        let (n, d) = (rep.n(), rep.d());
        let entries = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let b = rep.entry(i, j);
                        (0..d).map(|r| (0..d).map(|c| pair(b[(r, c)])).collect()).collect()
                    })
                    .collect()
            })
            .collect();
        RepFile { n, d, tol: rep.tol(), entries, name: None, note: None }
    }

    fn matrix(&self) -> Result<BlockMatrix> {
        let (n, d) = (self.n, self.d);
        if self.entries.len() != n || self.entries.iter().any(|row| row.len() != n) {
            return Err(input(format!("entries must be an {n}x{n} array")));
        }
        let mut blocks = Vec::with_capacity(n * n);
        for row in &self.entries {
            for block in row {
                if block.len() != d || block.iter().any(|r| r.len() != d) {
                    return Err(input(format!("each entry must be a {d}x{d} array")));
                }
                let mut m = CMat::zeros(d, d);
                for (r, line) in block.iter().enumerate() {
                    for (c, &z) in line.iter().enumerate() {
                        m[(r, c)] = complex(z)?;
                    }
                }
                blocks.push(m);
            }
        }
        BlockMatrix::new(n, d, blocks)
    }

    /// Builds the representation, rejecting inputs that are not biunitary.
    pub fn to_rep(&self) -> Result<MatrixRep> {
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(input("tol must be a nonnegative number"));
        }
        MatrixRep::validated(self.matrix()?, self.tol)
    }

    /// Builds the representation without the biunitarity check.
    pub fn to_rep_unchecked(&self) -> Result<MatrixRep> {
        MatrixRep::new(self.matrix()?, self.tol)
    }
}

pub fn rep_to_json(rep: &MatrixRep) -> String {
    serde_json::to_string_pretty(&RepFile::from_rep(rep)).expect("serializable")
}

pub fn rep_from_json(text: &str) -> Result<MatrixRep> {
    serde_json::from_str::<RepFile>(text)?.to_rep()
}

pub fn load_rep(path: impl AsRef<Path>) -> Result<MatrixRep> {
    rep_from_json(&fs::read_to_string(path)?)
}

pub fn save_rep(path: impl AsRef<Path>, rep: &RepFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(rep)?)?;
    Ok(())
}

/// A scalar or a row-major matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Scalar(Pair),
    Matrix(Vec<Vec<Pair>>),
}

impl Value {
    fn from_elem(e: &Elem) -> Self {
        match e.as_scalar() {
            Some(z) => Value::Scalar(pair(z)),
            None => Value::Matrix(e.rows().iter().map(|r| r.iter().map(|&z| pair(z)).collect()).collect()),
        }
    }

    fn to_elem(&self, p: usize) -> Result<Elem> {
        match self {
            Value::Scalar(z) => Ok(Elem::scaled_identity(p, complex(*z)?)),
            Value::Matrix(rows) => {
                let rows = rows
                    .iter()
                    .map(|r| r.iter().map(|&z| complex(z)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let e = Elem::from_rows(&rows)?;
                if e.side() != p {
                    return Err(input(format!("matrix value must be {p}x{p}")));
                }
                Ok(e)
            }
        }
    }
}

/// One cumulant or moment value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Record {
    pub pattern: StarPattern,
    /// 1-based variable of each letter; absent for a single variable.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub word: Option<Vec<usize>>,
    /// 1-based matrix units `E_{rc}` fed to the inner slots. Absent means
    /// the value is amplified: `z · b1 ⋯ b_{k-1}` for a scalar, the matrix
    /// itself at order one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<[usize; 2]>>,
    pub value: Value,
}

fn record_word(r: &Record) -> Result<Vec<crate::cumulant::Letter>> {
    match &r.word {
        None => word(&vec![0; r.pattern.len()], &r.pattern),
        Some(vars) => {
            if vars.len() != r.pattern.len() || vars.contains(&0) {
                return Err(input("word must list one 1-based variable per letter"));
            }
            let zero: Vec<usize> = vars.iter().map(|v| v - 1).collect();
            word(&zero, &r.pattern)
        }
    }
}

/// Cumulant table as records. Scalar tables write one record per word;
/// matrix-valued tables write one record per nonzero basis value.
pub fn table_records(table: &CumulantTable) -> Vec<Record> {
    let p = table.side();
    let multi = table.num_vars() > 1;
    let mut out = Vec::new();
    for (w, t) in table.iter() {
        let pattern = pattern_of(&w);
        let vars = multi.then(|| vars_of(&w).iter().map(|v| v + 1).collect());
        if p == 1 || w.len() == 1 {
            out.push(Record { pattern, word: vars, basis: None, value: Value::from_elem(&t.values()[0]) });
            continue;
        }
        for (idx, v) in t.values().iter().enumerate() {
            if v.is_zero() {
                continue;
            }
            let basis = t.basis_tuple(idx).iter().map(|&(r, c)| [r + 1, c + 1]).collect();
            out.push(Record {
                pattern: pattern.clone(),
                word: vars.clone(),
                basis: Some(basis),
                value: Value::Matrix(v.rows().iter().map(|r| r.iter().map(|&z| pair(z)).collect()).collect()),
            });
        }
    }
    out
}

// Assigning into a zero slot keeps signed zeros intact.
fn accumulate(slot: &mut Elem, add: Elem) {
    if slot.is_zero() {
        *slot = add;
    } else {
        *slot += add;
    }
}

/// Rebuilds a table from records; later records add to earlier ones.
pub fn table_from_records(p: usize, order: usize, records: &[Record]) -> Result<CumulantTable> {
    let mut table = CumulantTable::new(p, order)?;
    for r in records {
        let w = record_word(r)?;
        let k = w.len();
        if k == 0 || k > order {
            return Err(input(format!("pattern {} outside orders 1..={order}", r.pattern)));
        }
        let mut tensor = table.get(&w)?.cloned().unwrap_or_else(|| Multilinear::zeros(p, k));
        match &r.basis {
            Some(basis) => {
                if basis.len() != k - 1 || basis.iter().flatten().any(|&x| x == 0 || x > p) {
                    return Err(input(format!("basis of {} needs {} 1-based units in 1..={p}", r.pattern, k - 1)));
                }
                let tuple: Vec<(usize, usize)> = basis.iter().map(|[a, b]| (a - 1, b - 1)).collect();
                let idx = tensor.index_of(&tuple);
                accumulate(&mut tensor.values_mut()[idx], r.value.to_elem(p)?);
            }
            None => match (&r.value, k) {
                (v, 1) => accumulate(&mut tensor.values_mut()[0], v.to_elem(p)?),
                (Value::Scalar(z), _) => {
                    let amp = Multilinear::amplified(p, k, complex(*z)?);
                    for (a, b) in tensor.values_mut().iter_mut().zip(amp.values()) {
                        accumulate(a, *b);
                    }
                }
                (Value::Matrix(_), _) => {
                    return Err(input(format!("matrix value for {} needs a basis", r.pattern)));
                }
            },
        }
        table.insert(&w, tensor)?;
    }
    Ok(table)
}

/// On-disk form of a distribution: either cumulants or scalar moments.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    #[serde(default = "one")]
    pub p: usize,
    pub order: usize,
    #[serde(default)]
    pub selfadjoint: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cumulants: Option<Vec<Record>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<Vec<Record>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

fn one() -> usize {
    1
}

impl SpecFile {
    pub fn from_spec(spec: &CumulantSpec) -> Self {
        SpecFile {
            p: spec.side(),
            order: spec.order(),
            selfadjoint: spec.is_selfadjoint(),
            shift: Some(Value::from_elem(&spec.shift())),
            cumulants: Some(table_records(spec.table())),
            moments: None,
            name: None,
        }
    }

    /// Builds the spec; moments are converted over `lattice`.
    pub fn to_spec(&self, lattice: Lattice) -> Result<CumulantSpec> {
        let shift = match &self.shift {
            Some(v) => v.to_elem(self.p)?,
            None => Elem::zero(self.p),
        };
        let table = match (&self.cumulants, &self.moments) {
            (Some(records), None) => table_from_records(self.p, self.order, records)?,
            (None, Some(records)) => {
                if self.p != 1 {
                    return Err(input("moment files are scalar"));
                }
                if !shift.is_zero() {
                    return Err(input("a moment file carries no shift"));
                }
                let mut m = MomentTable::new(1, self.order, self.selfadjoint);
                for r in records {
                    if r.basis.is_some() || r.word.is_some() {
                        return Err(input("moment records hold a pattern and a scalar value"));
                    }
                    let z = match r.value {
                        Value::Scalar(z) => complex(z)?,
                        Value::Matrix(_) => return Err(input("moment values are scalars")),
                    };
                    m.set(&record_word(r)?, z)?;
                }
                let mut t = cumulants_from_moments(&m, 1, self.order, lattice, Execution::default())?;
                if self.selfadjoint {
                    snap_real(&mut t)?;
                }
                t
            }
            _ => return Err(input("a spec file holds exactly one of \"cumulants\" and \"moments\"")),
        };
        CumulantSpec::new(table, shift, self.selfadjoint)
    }
}

/// Drops rounding noise from imaginary parts of a converted real law.
fn snap_real(t: &mut CumulantTable) -> Result<()> {
    for (w, m) in t.iter().into_iter().map(|(w, m)| (w, m.clone())).collect::<Vec<_>>() {
        let z = m.values()[0].as_scalar().expect("scalar");
        t.set_scalar(&w, Complex64::new(z.re, 0.0))?;
    }
    Ok(())
}

pub fn spec_to_json(spec: &CumulantSpec) -> String {
    serde_json::to_string_pretty(&SpecFile::from_spec(spec)).expect("serializable")
}

pub fn spec_from_json(text: &str, lattice: Lattice) -> Result<CumulantSpec> {
    serde_json::from_str::<SpecFile>(text)?.to_spec(lattice)
}

pub fn load_spec(path: impl AsRef<Path>, lattice: Lattice) -> Result<CumulantSpec> {
    spec_from_json(&fs::read_to_string(path)?, lattice)
}

pub fn save_spec(path: impl AsRef<Path>, spec: &SpecFile) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(spec)?)?;
    Ok(())
}

/// Moments of a Haar unitary: one on words with as many `1` as `*`.
pub fn haar_unitary_moments(order: usize) -> SpecFile {
    let mut records = Vec::new();
    for k in (2..=order).step_by(2) {
        for pattern in StarPattern::all(k) {
            if pattern.imbalance() == 0 {
                records.push(Record { pattern, word: None, basis: None, value: Value::Scalar([1.0, 0.0]) });
            }
        }
    }
    SpecFile {
        p: 1,
        order,
        selfadjoint: false,
        shift: None,
        cumulants: None,
        moments: Some(records),
        name: Some("haar_unitary".into()),
    }
}

/// Writes every witness rep and sample spec into `dir`.
pub fn write_fixtures(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in fixtures::witness_reps()? {
        let mut file = RepFile::from_rep(&f.rep);
        file.name = Some(format!("{} ({})", f.name, f.family));
        file.note = f.note;
        let path = dir.join(format!("{}.json", f.name));
        save_rep(&path, &file)?;
        written.push(path);
    }
    let mut printed = RepFile::from_rep(&MatrixRep::new(fixtures::bistochastic_printed()?, DEFAULT_TOL)?);
    printed.name = Some("bistochastic_printed".into());
    printed.note = Some("imaginary parts 1 as printed; not unitary, rejected on load".into());
    let path = dir.join("bistochastic_printed.json");
    save_rep(&path, &printed)?;
    written.push(path);
    for (tag, spec) in sample_specs(0)? {
        let mut file = SpecFile::from_spec(&spec);
        file.name = Some(tag.to_string());
        let path = dir.join(format!("{}.json", tag.to_string().to_ascii_lowercase().replace(['(', ')'], "")));
        save_spec(&path, &file)?;
        written.push(path);
    }
    let path = dir.join("haar_unitary.json");
    save_spec(&path, &haar_unitary_moments(6))?;
    written.push(path);
    Ok(written)
}

/// Residual reported when a file fails the biunitarity check.
pub fn biunitary_residual(text: &str) -> Result<f64> {
    let rep = serde_json::from_str::<RepFile>(text)?.to_rep_unchecked()?;
    Ok(check_biunitary(&rep).residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classes::{classify_free, sample_spec, FreeClass};
    use crate::error::Error;

    #[test]
    fn rep_round_trip_is_exact() {
        for f in fixtures::witness_reps().unwrap() {
            let back = rep_from_json(&rep_to_json(&f.rep)).unwrap();
            assert_eq!(back, f.rep, "{}", f.name);
        }
    }

    #[test]
    fn printed_matrix_is_rejected() {
        let rep = MatrixRep::new(fixtures::bistochastic_printed().unwrap(), DEFAULT_TOL).unwrap();
        let text = rep_to_json(&rep);
        assert!(matches!(rep_from_json(&text), Err(Error::NotBiunitary { .. })));
        assert!(biunitary_residual(&text).unwrap() > 1.0);
    }

    #[test]
    fn spec_round_trip_is_exact() {
        for seed in [0, 7] {
            for tag in FreeClass::NINE {
                let spec = sample_spec(tag, seed).unwrap();
                let back = spec_from_json(&spec_to_json(&spec), Lattice::Free).unwrap();
                assert_eq!(back, spec);
            }
        }
        let t = CumulantTable::random(2, 3, 1, 5).unwrap();
        let spec = CumulantSpec::new(t, Elem::zero(2), false).unwrap();
        assert_eq!(spec_from_json(&spec_to_json(&spec), Lattice::Free).unwrap(), spec);
    }

    #[test]
    fn haar_moments_classify_as_r_diagonal() {
        let text = serde_json::to_string(&haar_unitary_moments(6)).unwrap();
        let spec = spec_from_json(&text, Lattice::Free).unwrap();
        let c = classify_free(&spec, 6, 12).unwrap();
        assert_eq!(c.minimal.iter().map(|t| t.to_string()).collect::<Vec<_>>(), vec!["R_DIAGONAL"]);
    }

    #[test]
    fn nan_is_rejected() {
        let text = r#"{"order": 2, "cumulants": [{"pattern": "11", "value": [NaN, 0]}]}"#;
        assert!(spec_from_json(text, Lattice::Free).is_err());
        let text = r#"{"order": 2, "cumulants": [{"pattern": "11", "value": [1e999, 0]}]}"#;
        assert!(spec_from_json(text, Lattice::Free).is_err());
    }
}
