//! Moment functionals `E[b0 x^{d1}_{i1} b1 ⋯ x^{dk}_{ik} bk]`.

use std::collections::HashMap;

use num_complex::Complex64;

use super::eval::{all_parts, nc_plans, product_of_blocks};
use super::table::{check_coeffs, CumulantSource, CumulantTable};
use super::tensor::Multilinear;
use super::word::{Letter, WordKey};
use crate::algebra::Elem;
use crate::error::{input, Error, Result};
use crate::partition::Star;

/// A joint moment functional of `num_vars` variables with coefficients in
/// `M_side`.
pub trait MomentOracle: Sync {
    fn side(&self) -> usize;

    fn num_vars(&self) -> usize;

    /// `coeffs` has one more element than `word`.
    fn moment(&self, word: &[Letter], coeffs: &[Elem]) -> Result<Elem>;
}

fn check_vars(word: &[Letter], n: usize) -> Result<()> {
    match word.iter().find(|l| l.var as usize >= n) {
        Some(l) => Err(input(format!("variable x{} outside an alphabet of {n}", l.var + 1))),
        None => Ok(()),
    }
}

/// Moments from free cumulants: sum of nested evaluations over `NC(k)`.
#[derive(Debug, Clone)]
pub struct FreeMoments {
    table: CumulantTable,
    n: usize,
}

impl FreeMoments {
    pub fn new(table: CumulantTable) -> Self {
        let n = table.num_vars();
        FreeMoments { table, n }
    }

    pub fn with_vars(table: CumulantTable, n: usize) -> Self {
        FreeMoments { table, n }
    }

    pub fn table(&self) -> &CumulantTable {
        &self.table
    }
}

impl MomentOracle for FreeMoments {
    fn side(&self) -> usize {
        self.table.side()
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn moment(&self, word: &[Letter], coeffs: &[Elem]) -> Result<Elem> {
        check_coeffs(word, coeffs, self.side())?;
        check_vars(word, self.n)?;
        let mut acc = Elem::zero(self.side());
        if word.is_empty() {
            return Ok(coeffs[0]);
        }
        for (_, plan) in nc_plans(word.len())? {
            acc += plan.eval(&self.table, word, coeffs)?;
        }
        Ok(acc)
    }
}

/// Moments from classical cumulants: sum of block products over `P(k)`.
#[derive(Debug, Clone)]
pub struct ClassicalMoments {
    table: CumulantTable,
    n: usize,
}

impl ClassicalMoments {
    pub fn new(table: CumulantTable) -> Self {
        let n = table.num_vars();
        ClassicalMoments { table, n }
    }

    pub fn table(&self) -> &CumulantTable {
        &self.table
    }
}

impl MomentOracle for ClassicalMoments {
    fn side(&self) -> usize {
        self.table.side()
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn moment(&self, word: &[Letter], coeffs: &[Elem]) -> Result<Elem> {
        check_coeffs(word, coeffs, self.side())?;
        check_vars(word, self.n)?;
        if word.is_empty() {
            return Ok(coeffs[0]);
        }
        let mut acc = Elem::zero(self.side());
        for p in all_parts(word.len())? {
            acc += product_of_blocks(&self.table, p, word, coeffs)?;
        }
        Ok(acc)
    }
}

/// Looks cumulants up by star pattern only, ignoring variable indices.
struct IgnoreVars<'a>(&'a CumulantTable);

impl CumulantSource for IgnoreVars<'_> {
    fn side(&self) -> usize {
        self.0.side()
    }

    fn tensor(&self, word: &[Letter]) -> Result<Option<&Multilinear>> {
        if word.len() > self.0.order() {
            return Err(Error::Incomplete(format!(
                "order {} requested from a table of order {}",
                word.len(),
                self.0.order()
            )));
        }
        Ok(self.0.get_key(WordKey::of_stars(word)))
    }
}

/// Joint moments of `n` free, identically distributed variables whose
/// common free cumulants are a single-variable table. Mixed cumulants
/// vanish, so only noncrossing partitions below the kernel of the index
/// word contribute.
#[derive(Debug, Clone)]
pub struct FreeFamily {
    single: CumulantTable,
    n: usize,
}

impl FreeFamily {
    pub fn new(single: CumulantTable, n: usize) -> Result<Self> {
        if single.num_vars() > 1 {
            return Err(input("free family needs a single-variable cumulant table"));
        }
        if n == 0 {
            return Err(input("free family needs at least one variable"));
        }
        Ok(FreeFamily { single, n })
    }

    pub fn single(&self) -> &CumulantTable {
        &self.single
    }

    pub fn order(&self) -> usize {
        self.single.order()
    }
}

impl MomentOracle for FreeFamily {
    fn side(&self) -> usize {
        self.single.side()
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn moment(&self, word: &[Letter], coeffs: &[Elem]) -> Result<Elem> {
        check_coeffs(word, coeffs, self.side())?;
        check_vars(word, self.n)?;
        if word.is_empty() {
            return Ok(coeffs[0]);
        }
        let src = IgnoreVars(&self.single);
        let mut acc = Elem::zero(self.side());
        for (p, plan) in nc_plans(word.len())? {
            let same_var = p
                .blocks()
                .iter()
                .all(|b| b.iter().all(|&e| word[e].var == word[b[0]].var));
            if same_var {
                acc += plan.eval(&src, word, coeffs)?;
            }
        }
        Ok(acc)
    }
}

/// Explicit scalar moments. Coefficients multiply out front.
#[derive(Debug, Clone, Default)]
pub struct MomentTable {
    values: HashMap<WordKey, Complex64>,
    order: usize,
    n: usize,
    selfadjoint: bool,
}

impl MomentTable {
    /// With `selfadjoint` set, `x* = x` and every word is read as plain.
    pub fn new(n: usize, order: usize, selfadjoint: bool) -> Self {
        MomentTable { values: HashMap::new(), order, n, selfadjoint }
    }

    fn key(&self, word: &[Letter]) -> WordKey {
        if self.selfadjoint {
            let plain: Vec<Letter> = word.iter().map(|l| Letter { adjoint: false, ..*l }).collect();
            WordKey::of(&plain)
        } else {
            WordKey::of(word)
        }
    }

    pub fn set(&mut self, word: &[Letter], z: Complex64) -> Result<()> {
        if word.is_empty() || word.len() > self.order {
            return Err(input(format!("moment word length {} outside 1..={}", word.len(), self.order)));
        }
        check_vars(word, self.n)?;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(input("non-finite moment"));
        }
        let key = self.key(word);
        self.values.insert(key, z);
        Ok(())
    }

    pub fn get(&self, word: &[Letter]) -> Result<Complex64> {
        if word.len() > self.order {
            return Err(Error::Incomplete(format!(
                "moment of order {} from a table of order {}",
                word.len(),
                self.order
            )));
        }
        if word.is_empty() {
            return Ok(Complex64::new(1.0, 0.0));
        }
        Ok(self.values.get(&self.key(word)).copied().unwrap_or_default())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.selfadjoint
    }

    /// Entries sorted by length, then word.
    pub fn iter(&self) -> Vec<(Vec<Letter>, Complex64)> {
        let mut out: Vec<_> = self.values.iter().map(|(k, v)| (k.decode(), *v)).collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Moments of a single-variable table, `m(d̃) = f(d̃)` for all patterns
    /// up to `order`.
    pub fn from_fn(order: usize, selfadjoint: bool, f: impl Fn(&[Star]) -> Complex64) -> Self {
        let mut t = MomentTable::new(1, order, selfadjoint);
        for k in 1..=order {
            for w in super::word::all_words(1, k) {
                let stars: Vec<Star> = w.iter().map(|l| l.star()).collect();
                let z = f(&stars);
                if z != Complex64::default() {
                    t.set(&w, z).expect("valid word");
                }
            }
        }
        t
    }
}

impl MomentOracle for MomentTable {
    fn side(&self) -> usize {
        1
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn moment(&self, word: &[Letter], coeffs: &[Elem]) -> Result<Elem> {
        check_coeffs(word, coeffs, 1)?;
        check_vars(word, self.n)?;
        let front: Complex64 = coeffs.iter().map(|c| c.as_scalar().expect("side 1")).product();
        Ok(Elem::scalar(front * self.get(word)?))
    }
}

/// Moment functional given by a closure.
pub struct FnOracle<F> {
    side: usize,
    n: usize,
    f: F,
}

impl<F> FnOracle<F>
where
    F: Fn(&[Letter], &[Elem]) -> Result<Elem> + Sync,
{
    pub fn new(side: usize, n: usize, f: F) -> Self {
        FnOracle { side, n, f }
    }
}

impl<F> MomentOracle for FnOracle<F>
where
    F: Fn(&[Letter], &[Elem]) -> Result<Elem> + Sync,
{
    fn side(&self) -> usize {
        self.side
    }

    fn num_vars(&self) -> usize {
        self.n
    }

    fn moment(&self, word: &[Letter], coeffs: &[Elem]) -> Result<Elem> {
        check_coeffs(word, coeffs, self.side)?;
        check_vars(word, self.n)?;
        (self.f)(word, coeffs)
    }
}
