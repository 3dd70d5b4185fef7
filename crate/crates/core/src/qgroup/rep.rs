use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{input, Error, Result};

pub type CMat = DMatrix<Complex64>;

/// Default relation tolerance on unit-scale matrices.
pub const DEFAULT_TOL: f64 = 1e-9;

/// An `n×n` array of `d×d` complex blocks, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    n: usize,
    d: usize,
    blocks: Vec<CMat>,
}

impl BlockMatrix {
    pub fn new(n: usize, d: usize, blocks: Vec<CMat>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(input("block matrix dimensions must be positive"));
        }
        if blocks.len() != n * n || blocks.iter().any(|b| b.nrows() != d || b.ncols() != d) {
            return Err(input(format!("expected {n}×{n} blocks of size {d}×{d}")));
        }
        if blocks.iter().flat_map(|b| b.iter()).any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(input("non-finite matrix entry"));
        }
        Ok(BlockMatrix { n, d, blocks })
    }

    /// Scalar entries (`d = 1`) from rows.
    pub fn scalar(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(input("scalar block matrix must be square"));
        }
        let blocks = rows.iter().flatten().map(|z| CMat::from_element(1, 1, *z)).collect();
        BlockMatrix::new(n, 1, blocks)
    }

    /// Splits an `nd×nd` matrix into `d×d` blocks.
    pub fn from_flat(n: usize, d: usize, m: &CMat) -> Result<Self> {
        if m.nrows() != n * d || m.ncols() != n * d {
            return Err(input("flat matrix has the wrong size"));
        }
        let blocks = (0..n * n)
            .map(|ij| m.view((ij / n * d, ij % n * d), (d, d)).into_owned())
            .collect();
        BlockMatrix::new(n, d, blocks)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Block `(i, j)`, 0-based.
    pub fn get(&self, i: usize, j: usize) -> &CMat {
        &self.blocks[i * self.n + j]
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn flatten(&self) -> CMat {
        let (n, d) = (self.n, self.d);
        let mut m = CMat::zeros(n * d, n * d);
        for i in 0..n {
            for j in 0..n {
                m.view_mut((i * d, j * d), (d, d)).copy_from(self.get(i, j));
            }
        }
        m
    }

    /// `ū = (u_ij*)`: every block replaced by its adjoint, positions kept.
    pub fn entrywise_adjoint(&self) -> BlockMatrix {
        BlockMatrix {
            n: self.n,
            d: self.d,
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn operator_norm(&self) -> f64 {
        operator_norm(&self.flatten())
    }
}

/// Largest singular value.
pub fn operator_norm(m: &CMat) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Entrywise product `(u∘v)_{ij} = u_ij v_ij` (block products).
pub fn hadamard(u: &BlockMatrix, v: &BlockMatrix) -> Result<BlockMatrix> {
    if u.n != v.n || u.d != v.d {
        return Err(input("Hadamard product needs equal shapes"));
    }
    let blocks = u.blocks.iter().zip(&v.blocks).map(|(a, b)| a * b).collect();
    BlockMatrix::new(u.n, u.d, blocks)
}

/// A finite-dimensional *-representation of the generators `u_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixRep {
    matrix: BlockMatrix,
    tol: f64,
}

impl MatrixRep {
    /// Wraps blocks without checking biunitarity; see [`MatrixRep::validated`].
    pub fn new(matrix: BlockMatrix, tol: f64) -> Result<Self> {
        if !(tol.is_finite() && tol >= 0.0) {
            return Err(input("tolerance must be a nonnegative finite number"));
        }
        Ok(MatrixRep { matrix, tol })
    }

    /// Wraps blocks and rejects non-biunitary input.
    pub fn validated(matrix: BlockMatrix, tol: f64) -> Result<Self> {
        let rep = MatrixRep::new(matrix, tol)?;
        let b = check_biunitary(&rep);
        if !b.holds {
            return Err(Error::NotBiunitary { residual: b.residual });
        }
        Ok(rep)
    }

    pub fn scalar(rows: &[Vec<Complex64>]) -> Result<Self> {
        MatrixRep::new(BlockMatrix::scalar(rows)?, DEFAULT_TOL)
    }

    pub fn n(&self) -> usize {
        self.matrix.n
    }

    pub fn d(&self) -> usize {
        self.matrix.d
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn matrix(&self) -> &BlockMatrix {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &CMat {
        self.matrix.get(i, j)
    }

    /// `u_ij = δ_ij · 1` with `d×d` identity blocks.
    pub fn trivial(n: usize, d: usize) -> Self {
        let blocks = (0..n * n)
            .map(|ij| if ij / n == ij % n { CMat::identity(d, d) } else { CMat::zeros(d, d) })
            .collect();
        MatrixRep { matrix: BlockMatrix { n, d, blocks }, tol: DEFAULT_TOL }
    }

    /// Scalar permutation representation with `u_{σ(j), j} = 1`.
    pub fn permutation(sigma: &[usize]) -> Result<Self> {
        let n = sigma.len();
        let mut seen = vec![false; n];
        for &s in sigma {
            if s >= n || std::mem::replace(&mut seen[s], true) {
                return Err(input("not a permutation"));
            }
        }
        let one = Complex64::new(1.0, 0.0);
        let rows: Vec<Vec<Complex64>> = (0..n)
            .map(|i| (0..n).map(|j| if sigma[j] == i { one } else { Complex64::default() }).collect())
            .collect();
        MatrixRep::scalar(&rows)
    }
}

/// Outcome of one relation check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub holds: bool,
    pub residual: f64,
    /// 1-based indices where the worst residual occurred.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
}

impl Check {
    pub fn new(residual: f64, tol: f64, witness: Option<Vec<usize>>) -> Self {
        Check { holds: residual <= tol, residual, witness }
    }

    /// Worse of two checks (larger residual wins).
    pub fn worst(self, other: Check) -> Check {
        let tol_ok = self.holds && other.holds;
        let mut w = if other.residual > self.residual { other } else { self };
        w.holds = tol_ok;
        w
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiunitaryReport {
    pub holds: bool,
    pub residual: f64,
    /// `‖u*u − 1‖` and `‖uu* − 1‖` for `u`.
    pub isometry: f64,
    pub coisometry: f64,
    /// Same for `ū`.
    pub bar_isometry: f64,
    pub bar_coisometry: f64,
    /// For square matrices `u*u = 1` forces `uu* = 1`; true when the two
    /// residuals agree on which side of the tolerance they fall.
    pub consistent: bool,
}

fn unitarity(m: &CMat) -> (f64, f64) {
    let id = CMat::identity(m.nrows(), m.ncols());
    let left = operator_norm(&(m.adjoint() * m - &id));
    let right = operator_norm(&(m * m.adjoint() - &id));
    (left, right)
}

/// Both `u` and `ū` unitary, measured in operator norm.
pub fn check_biunitary(rep: &MatrixRep) -> BiunitaryReport {
    let (iso, coiso) = unitarity(&rep.matrix.flatten());
    let (biso, bcoiso) = unitarity(&rep.matrix.entrywise_adjoint().flatten());
    let residual = iso.max(coiso).max(biso).max(bcoiso);
    let tol = rep.tol;
    BiunitaryReport {
        holds: residual <= tol,
        residual,
        isometry: iso,
        coisometry: coiso,
        bar_isometry: biso,
        bar_coisometry: bcoiso,
        consistent: (iso <= tol) == (coiso <= tol) && (biso <= tol) == (bcoiso <= tol),
    }
}

/// `v_ij = Σ_k a_ik ⊗ b_kj`.
pub fn coproduct_lift(a: &MatrixRep, b: &MatrixRep) -> Result<MatrixRep> {
    let n = a.n();
    if b.n() != n {
        return Err(input(format!("coproduct needs equal n ({} vs {})", n, b.n())));
    }
    let d = a.d() * b.d();
    let blocks = (0..n * n)
        .map(|ij| {
            let (i, j) = (ij / n, ij % n);
            (0..n).fold(CMat::zeros(d, d), |acc, k| acc + a.entry(i, k).kronecker(b.entry(k, j)))
        })
        .collect();
    MatrixRep::new(BlockMatrix::new(n, d, blocks)?, a.tol().max(b.tol()))
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix, with the
/// phases of `R`'s diagonal folded back into `Q`.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> CMat {
    let g = random_matrix(dim, rng);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let z = r[(j, j)];
        let phase = if z.norm() > 0.0 { z / z.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_matrix(dim: usize, rng: &mut impl Rng) -> CMat {
    CMat::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}
