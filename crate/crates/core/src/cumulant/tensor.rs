use num_complex::Complex64;

use crate::algebra::Elem;
use crate::error::{input, Result};

/// A multilinear map `M_p^{k-1} → M_p`, stored by its values on tuples of
/// matrix units `E_{rc}` (one per inner slot). Tuple index is big-endian
/// in the slot coordinates `r*p + c`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multilinear {
    p: usize,
    k: usize,
    values: Vec<Elem>,
}

impl Multilinear {
    pub fn zeros(p: usize, k: usize) -> Self {
        assert!(k >= 1, "multilinear maps have order at least 1");
        let len = basis_len(p, k);
        Multilinear { p, k, values: vec![Elem::zero(p); len] }
    }

    /// Scalar value at order `k` (requires `p = 1`).
    pub fn scalar(k: usize, z: Complex64) -> Self {
        Multilinear { p: 1, k, values: vec![Elem::scalar(z)] }
    }

    pub fn from_values(p: usize, k: usize, values: Vec<Elem>) -> Result<Self> {
        if k == 0 || values.len() != basis_len(p, k) || values.iter().any(|v| v.side() != p) {
            return Err(input(format!("tensor of order {k} over side {p} has wrong shape")));
        }
        Ok(Multilinear { p, k, values })
    }

    /// `z · b1 · b2 ⋯ b_{k-1}`: the amplification of a scalar cumulant.
    pub fn amplified(p: usize, k: usize, z: Complex64) -> Self {
        let mut t = Self::zeros(p, k);
        for idx in 0..t.values.len() {
            let prod = t
                .basis_tuple(idx)
                .into_iter()
                .fold(Elem::identity(p), |acc, (r, c)| acc * Elem::unit(p, r, c));
            t.values[idx] = prod.scale(z);
        }
        t
    }

    pub fn side(&self) -> usize {
        self.p
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Elem] {
        &mut self.values
    }

    /// Matrix-unit coordinates `(r, c)` per inner slot for a tuple index.
    pub fn basis_tuple(&self, mut idx: usize) -> Vec<(usize, usize)> {
        let pp = self.p * self.p;
        let mut out = vec![(0, 0); self.k - 1];
        for slot in out.iter_mut().rev() {
            let coord = idx % pp;
            idx /= pp;
            *slot = (coord / self.p, coord % self.p);
        }
        out
    }

    pub fn index_of(&self, tuple: &[(usize, usize)]) -> usize {
        tuple.iter().fold(0, |acc, &(r, c)| acc * self.p * self.p + r * self.p + c)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(Elem::max_abs).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Elem::is_zero)
    }

    pub fn dist(&self, other: &Multilinear) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| a.dist(b)).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(Elem::is_finite)
    }

    /// Scalar value when `p = 1`.
    pub fn as_scalar(&self) -> Option<Complex64> {
        (self.p == 1).then(|| self.values[0].as_scalar().expect("side 1"))
    }

    /// Value on the inner coefficients `b_1 .. b_{k-1}`.
    pub fn apply(&self, inner: &[Elem]) -> Elem {
        debug_assert_eq!(inner.len() + 1, self.k);
        if self.p == 1 {
            let mut z = self.values[0].as_scalar().expect("side 1");
            for b in inner {
                z *= b.as_scalar().expect("side 1");
            }
            return Elem::scalar(z);
        }
        let mut acc = Elem::zero(self.p);
        self.contract(inner, 0, 0, Complex64::new(1.0, 0.0), &mut acc);
        acc
    }

    fn contract(&self, inner: &[Elem], slot: usize, offset: usize, coef: Complex64, acc: &mut Elem) {
        if slot == inner.len() {
            acc.add_scaled(coef, &self.values[offset]);
            return;
        }
        let pp = self.p * self.p;
        for (coord, z) in inner[slot].entries().iter().enumerate() {
            if z.re == 0.0 && z.im == 0.0 {
                continue;
            }
            self.contract(inner, slot + 1, offset * pp + coord, coef * z, acc);
        }
    }
}

pub(crate) fn basis_len(p: usize, k: usize) -> usize {
    (p * p).pow(k.saturating_sub(1) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplified_is_product() {
        let t = Multilinear::amplified(2, 3, Complex64::new(2.0, 0.0));
        let a = Elem::unit(2, 0, 1);
        let b = Elem::unit(2, 1, 1) + Elem::unit(2, 1, 0);
        assert_eq!(t.apply(&[a, b]), (a * b).scale(Complex64::new(2.0, 0.0)));
    }

    #[test]
    fn basis_indexing() {
        let t = Multilinear::zeros(3, 3);
        assert_eq!(t.values().len(), 81);
        let tuple = t.basis_tuple(40);
        assert_eq!(t.index_of(&tuple), 40);
    }
}
