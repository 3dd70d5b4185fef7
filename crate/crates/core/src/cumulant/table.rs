use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::tensor::Multilinear;
use super::word::{all_words, Letter, WordKey};
use crate::algebra::Elem;
use crate::error::{input, Error, Result};

/// Anything that hands out the cumulant tensor of a word.
pub trait CumulantSource: Sync {
    fn side(&self) -> usize;

    /// `Ok(None)` means the cumulant vanishes.
    fn tensor(&self, word: &[Letter]) -> Result<Option<&Multilinear>>;
}

/// Cumulants (free or classical) of orders `1..=order`, keyed by word.
/// Words absent from the table have vanishing cumulants.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantTable {
    p: usize,
    order: usize,
    entries: HashMap<WordKey, Multilinear>,
}

impl CumulantTable {
    pub fn new(p: usize, order: usize) -> Result<Self> {
        if !(1..=crate::algebra::MAX_SIDE).contains(&p) {
            return Err(input(format!("coefficient side {p} outside 1..=3")));
        }
        if order > 16 {
            return Err(Error::SizeLimit { what: "table order", value: order, limit: 16 });
        }
        Ok(CumulantTable { p, order, entries: HashMap::new() })
    }

    pub fn side(&self) -> usize {
        self.p
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn check_word(&self, word: &[Letter]) -> Result<()> {
        if word.is_empty() {
            return Err(input("cumulants start at order 1"));
        }
        if word.len() > self.order {
            return Err(Error::Incomplete(format!(
                "order {} requested from a table of order {}",
                word.len(),
                self.order
            )));
        }
        Ok(())
    }

    pub fn get(&self, word: &[Letter]) -> Result<Option<&Multilinear>> {
        self.check_word(word)?;
        Ok(self.entries.get(&WordKey::of(word)))
    }

    pub(crate) fn get_key(&self, key: WordKey) -> Option<&Multilinear> {
        self.entries.get(&key)
    }

    /// Scalar value of a word (0 when absent). Requires `p = 1`.
    pub fn scalar(&self, word: &[Letter]) -> Result<Complex64> {
        if self.p != 1 {
            return Err(Error::Unsupported("scalar lookup on a matrix-valued table".into()));
        }
        Ok(self.get(word)?.and_then(Multilinear::as_scalar).unwrap_or_default())
    }

    pub fn insert(&mut self, word: &[Letter], tensor: Multilinear) -> Result<()> {
        self.check_word(word)?;
        if tensor.side() != self.p || tensor.order() != word.len() {
            return Err(input(format!(
                "tensor of order {} over side {} does not fit word of length {} over side {}",
                tensor.order(),
                tensor.side(),
                word.len(),
                self.p
            )));
        }
        if !tensor.is_finite() {
            return Err(input("non-finite cumulant value"));
        }
        self.entries.insert(WordKey::of(word), tensor);
        Ok(())
    }

    pub fn set_scalar(&mut self, word: &[Letter], z: Complex64) -> Result<()> {
        if self.p != 1 {
            return Err(Error::Unsupported("scalar entry in a matrix-valued table".into()));
        }
        self.insert(word, Multilinear::scalar(word.len(), z))
    }

    pub fn remove(&mut self, word: &[Letter]) -> Option<Multilinear> {
        self.entries.remove(&WordKey::of(word))
    }

    /// Entries sorted by length, then word.
    pub fn iter(&self) -> Vec<(Vec<Letter>, &Multilinear)> {
        let mut out: Vec<_> = self.entries.iter().map(|(k, v)| (k.decode(), v)).collect();
        out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
        out
    }

    /// Number of variables the stored words mention.
    pub fn num_vars(&self) -> usize {
        self.iter()
            .iter()
            .flat_map(|(w, _)| w.iter().map(|l| l.var as usize + 1))
            .max()
            .unwrap_or(1)
    }

    /// Drops entries whose values are all exactly zero.
    pub fn prune(&mut self) {
        self.entries.retain(|_, t| !t.is_zero());
    }

    /// Copy truncated to a lower order.
    pub fn truncated(&self, order: usize) -> CumulantTable {
        let mut t = self.clone();
        t.order = order.min(self.order);
        t.entries.retain(|k, _| k.decode().len() <= order);
        t
    }

    /// The `M_p`-valued version of a scalar table: every cumulant becomes
    /// `κ · b1 ⋯ b_{k-1}`.
    pub fn amplify(&self, p: usize) -> Result<CumulantTable> {
        if self.p != 1 {
            return Err(Error::Unsupported("only scalar tables can be amplified".into()));
        }
        let mut out = CumulantTable::new(p, self.order)?;
        for (w, t) in self.iter() {
            let z = t.as_scalar().expect("scalar table");
            out.insert(&w, Multilinear::amplified(p, w.len(), z))?;
        }
        Ok(out)
    }

    /// Largest entrywise distance between two tables (absent = zero).
    pub fn dist(&self, other: &CumulantTable) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, t) in &self.entries {
            worst = worst.max(match other.entries.get(k) {
                Some(u) => t.dist(u),
                None => t.max_abs(),
            });
        }
        for (k, u) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(u.max_abs());
            }
        }
        worst
    }

    /// Seeded random table over `n` variables: every word up to `order`
    /// gets independent values with real and imaginary parts in `[-1, 1)`.
    pub fn random(p: usize, order: usize, n: usize, seed: u64) -> Result<CumulantTable> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = CumulantTable::new(p, order)?;
        for k in 1..=order {
            for w in all_words(n, k) {
                let mut m = Multilinear::zeros(p, k);
                for v in m.values_mut() {
                    let mut e = Elem::zero(p);
                    for r in 0..p {
                        for c in 0..p {
                            e.set(r, c, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
                        }
                    }
                    *v = e;
                }
                t.insert(&w, m)?;
            }
        }
        Ok(t)
    }

    /// `b0 · κ(b1, .., b_{k-1}) · b_k` for a full word.
    pub fn value(&self, word: &[Letter], coeffs: &[Elem]) -> Result<Elem> {
        check_coeffs(word, coeffs, self.p)?;
        Ok(match self.get(word)? {
            Some(t) => coeffs[0] * t.apply(&coeffs[1..word.len()]) * coeffs[word.len()],
            None => Elem::zero(self.p),
        })
    }
}

impl CumulantSource for CumulantTable {
    fn side(&self) -> usize {
        self.p
    }

    fn tensor(&self, word: &[Letter]) -> Result<Option<&Multilinear>> {
        self.get(word)
    }
}

pub(crate) fn check_coeffs(word: &[Letter], coeffs: &[Elem], p: usize) -> Result<()> {
    if coeffs.len() != word.len() + 1 {
        return Err(input(format!(
            "word of length {} needs {} interleaved coefficients, got {}",
            word.len(),
            word.len() + 1,
            coeffs.len()
        )));
    }
    if let Some(bad) = coeffs.iter().find(|c| c.side() != p) {
        return Err(input(format!("coefficient of side {} in a side-{p} computation", bad.side())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cumulant::word::single;

    #[test]
    fn lookups_respect_order() {
        let mut t = CumulantTable::new(1, 2).unwrap();
        let w = single(&"1*".parse().unwrap());
        t.set_scalar(&w, Complex64::new(1.0, 0.0)).unwrap();
        assert_eq!(t.scalar(&w).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(t.scalar(&single(&"11".parse().unwrap())).unwrap(), Complex64::default());
        assert!(t.get(&single(&"111".parse().unwrap())).is_err());
        assert!(t.set_scalar(&w, Complex64::new(f64::NAN, 0.0)).is_err());
    }

    #[test]
    fn dist_treats_missing_as_zero() {
        let a = CumulantTable::random(1, 3, 1, 7).unwrap();
        let b = CumulantTable::new(1, 3).unwrap();
        assert!(a.dist(&b) > 0.0);
        assert_eq!(a.dist(&a), 0.0);
    }
}
