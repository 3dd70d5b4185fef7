//! Coefficient algebra: complex scalars or small square matrices (side ≤ 3).
//!
//! Values live inline so that nested cumulant evaluation never allocates.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{input, Result};

/// Largest supported coefficient matrix side.
pub const MAX_SIDE: usize = 3;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// A `p×p` complex matrix with `p ∈ {1, 2, 3}`; `p = 1` is the scalar case.
#[derive(Clone, Copy, PartialEq)]
pub struct Elem {
    p: u8,
    a: [Complex64; 9],
}

impl Elem {
    fn blank(p: usize) -> Self {
        assert!((1..=MAX_SIDE).contains(&p), "coefficient side {p} out of range");
        Elem { p: p as u8, a: [ZERO; 9] }
    }

    pub fn zero(p: usize) -> Self {
        Self::blank(p)
    }

    pub fn identity(p: usize) -> Self {
        let mut e = Self::blank(p);
        for i in 0..p {
            e.a[i * p + i] = ONE;
        }
        e
    }

    pub fn scalar(z: Complex64) -> Self {
        let mut e = Self::blank(1);
        e.a[0] = z;
        e
    }

    pub fn real(x: f64) -> Self {
        Self::scalar(Complex64::new(x, 0.0))
    }

    /// `z` times the `p×p` identity.
    pub fn scaled_identity(p: usize, z: Complex64) -> Self {
        Self::identity(p).scale(z)
    }

    /// Matrix unit `E_{rc}` (0-based).
    pub fn unit(p: usize, r: usize, c: usize) -> Self {
        let mut e = Self::blank(p);
        e.a[r * p + c] = ONE;
        e
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let p = rows.len();
        if !(1..=MAX_SIDE).contains(&p) || rows.iter().any(|r| r.len() != p) {
            return Err(input(format!("coefficient matrix must be square with side 1..={MAX_SIDE}")));
        }
        let mut e = Self::blank(p);
        for (i, row) in rows.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                e.a[i * p + j] = *z;
            }
        }
        Ok(e)
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        let p = self.side();
        (0..p).map(|i| (0..p).map(|j| self.get(i, j)).collect()).collect()
    }

    pub fn side(&self) -> usize {
        self.p as usize
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.a[r * self.side() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, z: Complex64) {
        let p = self.side();
        self.a[r * p + c] = z;
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.a[..self.side() * self.side()]
    }

    /// Value of a `1×1` element.
    pub fn as_scalar(&self) -> Option<Complex64> {
        (self.p == 1).then_some(self.a[0])
    }

    pub fn scale(mut self, z: Complex64) -> Self {
        let n = self.side() * self.side();
        for x in &mut self.a[..n] {
            *x *= z;
        }
        self
    }

    pub fn adjoint(&self) -> Self {
        let p = self.side();
        let mut e = Self::blank(p);
        for i in 0..p {
            for j in 0..p {
                e.a[j * p + i] = self.a[i * p + j].conj();
            }
        }
        e
    }

    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.entries().iter().all(|z| *z == ZERO)
    }

    pub fn is_finite(&self) -> bool {
        self.entries().iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn dist(&self, other: &Elem) -> f64 {
        (*self - *other).max_abs()
    }

    /// Entries with modulus below `eps` set to exactly zero.
    pub fn snapped(mut self, eps: f64) -> Self {
        let n = self.side() * self.side();
        for z in &mut self.a[..n] {
            if z.re.abs() < eps {
                z.re = 0.0;
            }
            if z.im.abs() < eps {
                z.im = 0.0;
            }
        }
        self
    }

    /// `self += s * other`.
    #[inline]
    pub fn add_scaled(&mut self, s: Complex64, other: &Elem) {
        let n = self.side() * self.side();
        for (x, y) in self.a[..n].iter_mut().zip(&other.a[..n]) {
            *x += s * *y;
        }
    }
}

impl Mul for Elem {
    type Output = Elem;

    #[inline]
    fn mul(self, rhs: Elem) -> Elem {
        let p = self.side();
        debug_assert_eq!(p, rhs.side(), "coefficient sides differ");
        if p == 1 {
            return Elem::scalar(self.a[0] * rhs.a[0]);
        }
        let mut out = Elem::blank(p);
        for i in 0..p {
            for k in 0..p {
                let x = self.a[i * p + k];
                if x == ZERO {
                    continue;
                }
                for j in 0..p {
                    out.a[i * p + j] += x * rhs.a[k * p + j];
                }
            }
        }
        out
    }
}

impl Add for Elem {
    type Output = Elem;

    fn add(mut self, rhs: Elem) -> Elem {
        self += rhs;
        self
    }
}

impl AddAssign for Elem {
    fn add_assign(&mut self, rhs: Elem) {
        debug_assert_eq!(self.p, rhs.p, "coefficient sides differ");
        let n = self.side() * self.side();
        for (x, y) in self.a[..n].iter_mut().zip(&rhs.a[..n]) {
            *x += *y;
        }
    }
}

impl Sub for Elem {
    type Output = Elem;

    fn sub(mut self, rhs: Elem) -> Elem {
        debug_assert_eq!(self.p, rhs.p, "coefficient sides differ");
        let n = self.side() * self.side();
        for (x, y) in self.a[..n].iter_mut().zip(&rhs.a[..n]) {
            *x -= *y;
        }
        self
    }
}

impl Neg for Elem {
    type Output = Elem;

    fn neg(self) -> Elem {
        self.scale(-ONE)
    }
}

impl fmt::Debug for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(z) = self.as_scalar() {
            return write!(f, "{z}");
        }
        f.debug_list().entries(self.rows()).finish()
    }
}
