use std::fmt;

use crate::error::{input, Result};
use crate::partition::{Star, StarPattern};

/// Largest variable index a letter can carry.
pub const MAX_VAR: usize = 14;

/// One factor `x_var` or `x_var*` of a word.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub var: u8,
    pub adjoint: bool,
}

impl Letter {
    pub fn new(var: usize, star: Star) -> Result<Self> {
        if var > MAX_VAR {
            return Err(input(format!("variable index {} above limit {}", var + 1, MAX_VAR + 1)));
        }
        Ok(Letter { var: var as u8, adjoint: star == Star::Adjoint })
    }

    pub fn star(self) -> Star {
        if self.adjoint {
            Star::Adjoint
        } else {
            Star::Plain
        }
    }

    fn code(self) -> u64 {
        self.var as u64 * 2 + self.adjoint as u64 + 1
    }
}

/// Single-variable word for a pattern.
pub fn single(pattern: &StarPattern) -> Vec<Letter> {
    pattern
        .stars()
        .iter()
        .map(|&s| Letter { var: 0, adjoint: s == Star::Adjoint })
        .collect()
}

/// Word from 0-based variable indices and a pattern of the same length.
pub fn word(vars: &[usize], pattern: &StarPattern) -> Result<Vec<Letter>> {
    if vars.len() != pattern.len() {
        return Err(input(format!(
            "index word has length {} but pattern has length {}",
            vars.len(),
            pattern.len()
        )));
    }
    vars.iter().zip(pattern.stars()).map(|(&v, &s)| Letter::new(v, s)).collect()
}

pub fn pattern_of(word: &[Letter]) -> StarPattern {
    StarPattern(word.iter().map(|l| l.star()).collect())
}

pub fn vars_of(word: &[Letter]) -> Vec<usize> {
    word.iter().map(|l| l.var as usize).collect()
}

/// All `(2n)^k` words of length `k` over `n` variables, lexicographic in
/// `(var, star)`.
pub fn all_words(n: usize, k: usize) -> Vec<Vec<Letter>> {
    let base = 2 * n;
    let total = base.pow(k as u32);
    (0..total)
        .map(|mut code| {
            let mut w = vec![Letter::default(); k];
            for slot in w.iter_mut().rev() {
                let digit = code % base;
                code /= base;
                *slot = Letter { var: (digit / 2) as u8, adjoint: digit % 2 == 1 };
            }
            w
        })
        .collect()
}

/// Packed key of a word (≤ 16 letters): base-16 digits, one per letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) struct WordKey(pub u64);

impl WordKey {
    pub fn of(word: &[Letter]) -> Self {
        debug_assert!(word.len() <= 16);
        WordKey(word.iter().fold(0u64, |acc, l| acc << 4 | l.code()))
    }

    /// Same as `of` with every variable replaced by 0.
    pub fn of_stars(word: &[Letter]) -> Self {
        WordKey(word.iter().fold(0u64, |acc, l| acc << 4 | (l.adjoint as u64 + 1)))
    }

    pub fn decode(self) -> Vec<Letter> {
        let mut out = Vec::new();
        let mut x = self.0;
        while x != 0 {
            let c = (x & 0xf) - 1;
            out.push(Letter { var: (c / 2) as u8, adjoint: c % 2 == 1 });
            x >>= 4;
        }
        out.reverse();
        out
    }
}

/// Displays a word as `x1 x2* x1`.
pub struct WordDisplay<'a>(pub &'a [Letter]);

impl fmt::Display for WordDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "x{}{}", l.var + 1, if l.adjoint { "*" } else { "" })?;
        }
        Ok(())
    }
}
