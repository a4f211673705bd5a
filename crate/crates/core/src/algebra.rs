//! Exact arithmetic in the Weyl–Heisenberg group over `Z_d`.
//!
//! Every element is stored in normal order `ω^p X^m Z^n` (shifts left of
//! phases) with `ω = e^{2πi/d}`. The global phase is kept as an integer
//! exponent, so products and inverses are exact.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{root_of_unity, CMatrix, ZERO};

/// Dimension `d ≥ 2` of a single qudit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct QuditDim(usize);

impl QuditDim {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidDimension(d));
        }
        Ok(Self(d))
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0
    }

    #[inline]
    pub fn reduce(self, x: i64) -> usize {
        x.rem_euclid(self.0 as i64) as usize
    }

    /// `ω^k`.
    pub fn omega_pow(self, k: usize) -> Complex64 {
        root_of_unity(k, self.0)
    }
}

impl fmt::Display for QuditDim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl TryFrom<usize> for QuditDim {
    type Error = Error;

    fn try_from(d: usize) -> Result<Self> {
        Self::new(d)
    }
}

/// The operator `ω^p X^m Z^n` on a single qudit of dimension `dim`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct WeylOp {
    dim: QuditDim,
    m: usize,
    n: usize,
    p: usize,
}

impl WeylOp {
    /// Builds an element from signed exponents, reducing each mod `d`.
    pub fn new(dim: QuditDim, m: i64, n: i64, p: i64) -> Self {
        Self { dim, m: dim.reduce(m), n: dim.reduce(n), p: dim.reduce(p) }
    }

    /// `X^m Z^n` with no global phase.
    pub fn from_exponents(dim: QuditDim, m: i64, n: i64) -> Self {
        Self::new(dim, m, n, 0)
    }

    pub fn identity(dim: QuditDim) -> Self {
        Self::new(dim, 0, 0, 0)
    }

    pub fn x(dim: QuditDim) -> Self {
        Self::new(dim, 1, 0, 0)
    }

    pub fn z(dim: QuditDim) -> Self {
        Self::new(dim, 0, 1, 0)
    }

    #[inline]
    pub fn dim(&self) -> QuditDim {
        self.dim
    }

    /// Shift exponent.
    #[inline]
    pub fn m(&self) -> usize {
        self.m
    }

    /// Phase (clock) exponent.
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Global-phase exponent of `ω`.
    #[inline]
    pub fn p(&self) -> usize {
        self.p
    }

    /// The `(m, n)` pair identifying the element up to global phase.
    #[inline]
    pub fn projective_key(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn is_identity(&self) -> bool {
        self.m == 0 && self.n == 0 && self.p == 0
    }

    pub fn is_projective_identity(&self) -> bool {
        self.m == 0 && self.n == 0
    }

    /// Equality ignoring the global phase.
    pub fn projectively_eq(&self, other: &WeylOp) -> bool {
        self.dim == other.dim && self.m == other.m && self.n == other.n
    }

    pub fn without_phase(&self) -> WeylOp {
        WeylOp { p: 0, ..*self }
    }

    fn check_same_dim(&self, other: &WeylOp) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { expected: self.dim.get(), found: other.dim.get() });
        }
        Ok(())
    }

    /// Normal-ordered product `self · other`.
    ///
    /// Moving `Z^{n₁}` past `X^{m₂}` costs `ω^{n₁ m₂}`, so
    /// `(m₁,n₁,p₁)·(m₂,n₂,p₂) = (m₁+m₂, n₁+n₂, p₁+p₂+n₁m₂)`.
    pub fn compose(&self, other: &WeylOp) -> Result<WeylOp> {
        self.check_same_dim(other)?;
        let d = self.dim.get();
        Ok(WeylOp {
            dim: self.dim,
            m: (self.m + other.m) % d,
            n: (self.n + other.n) % d,
            p: (self.p + other.p + (self.n * other.m) % d) % d,
        })
    }

    /// Exact group inverse: `compose(a, a.inverse())` is `(0,0,0)`.
    pub fn inverse(&self) -> WeylOp {
        let d = self.dim.get();
        let m = (d - self.m) % d;
        let n = (d - self.n) % d;
        // p + p' + n·(−m) ≡ 0
        let p = ((d - self.p) % d + (self.n * self.m) % d) % d;
        WeylOp { dim: self.dim, m, n, p }
    }

    /// `self` composed with itself `k` times.
    pub fn pow(&self, k: usize) -> WeylOp {
        let mut acc = WeylOp::identity(self.dim);
        for _ in 0..k {
            acc = acc.compose(self).expect("same dimension");
        }
        acc
    }

    /// `X^m Z^n |j⟩ = ω^{p + jn} |j+m⟩`, returned as `(j+m mod d, p+jn mod d)`.
    pub fn apply_to_basis(&self, j: usize) -> Result<(usize, usize)> {
        let d = self.dim.get();
        if j >= d {
            return Err(Error::IndexOutOfRange { index: j, bound: d });
        }
        Ok(((j + self.m) % d, (self.p + (j * self.n) % d) % d))
    }

    /// Dense `d×d` realization; column `j` holds `ω^{p+jn}` in row `j+m`.
    pub fn matrix(&self) -> CMatrix {
        let d = self.dim.get();
        let mut out = CMatrix::from_element(d, d, ZERO);
        for j in 0..d {
            let (row, phase) = self.apply_to_basis(j).expect("j < d");
            out[(row, j)] = self.dim.omega_pow(phase);
        }
        out
    }

    /// `(T + T†)/2`, the Hermitian part of the operator.
    pub fn hermitized_matrix(&self) -> CMatrix {
        let t = self.matrix();
        (&t + t.adjoint()) * Complex64::new(0.5, 0.0)
    }
}

impl fmt::Display for WeylOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p != 0 {
            write!(f, "w^{}·", self.p)?;
        }
        write!(f, "X^{} Z^{}", self.m, self.n)
    }
}

/// Free-function form of [`WeylOp::compose`] that also checks both operands
/// against `dim`.
pub fn compose(a: &WeylOp, b: &WeylOp, dim: QuditDim) -> Result<WeylOp> {
    for op in [a, b] {
        if op.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim.get(), found: op.dim.get() });
        }
    }
    a.compose(b)
}

/// All `d²` phase-free elements in lexicographic `(m, n)` order.
pub fn all_projective(dim: QuditDim) -> impl Iterator<Item = WeylOp> {
    let d = dim.get();
    (0..d).flat_map(move |m| (0..d).map(move |n| WeylOp::from_exponents(dim, m as i64, n as i64)))
}
