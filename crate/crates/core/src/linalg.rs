//! Small dense complex-matrix helpers shared by the simulator modules.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `e^{2πi k / d}` with `k` reduced mod `d` first so large exponents do not
/// lose precision.
pub fn root_of_unity(k: usize, d: usize) -> Complex64 {
    let k = k % d;
    let angle = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
    Complex64::from_polar(1.0, angle)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn diagonal(entries: &[Complex64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |r, c| if r == c { entries[r] } else { ZERO })
}

pub fn real_diagonal(entries: &[f64]) -> CMatrix {
    let n = entries.len();
    CMatrix::from_fn(n, n, |r, c| if r == c { Complex64::new(entries[r], 0.0) } else { ZERO })
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of the off-diagonal part.
pub fn off_diagonal_norm(m: &CMatrix) -> f64 {
    let mut acc = 0.0;
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if r != c {
                acc += m[(r, c)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Largest entry of `|U†U − I|`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    max_abs(&(u.adjoint() * u - identity(n)))
}

pub fn hermiticity_deviation(h: &CMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(h - h.adjoint()))
}

pub fn ensure_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let deviation = unitarity_deviation(u);
    if deviation > tol {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

pub fn ensure_hermitian(h: &CMatrix, tol: f64) -> Result<()> {
    let deviation = hermiticity_deviation(h);
    if deviation > tol {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// `exp(−i·s·H)` for Hermitian `H` via its eigendecomposition.
pub fn hermitian_evolution(h: &CMatrix, s: f64) -> CMatrix {
    let eig = h.clone().symmetric_eigen();
    hermitian_evolution_from(&eig.eigenvectors, eig.eigenvalues.as_slice(), s)
}

/// Same as [`hermitian_evolution`] with a precomputed eigenbasis.
pub fn hermitian_evolution_from(vectors: &CMatrix, values: &[f64], s: f64) -> CMatrix {
    let phases: Vec<Complex64> = values.iter().map(|&l| Complex64::from_polar(1.0, -l * s)).collect();
    let mut scaled = vectors.clone();
    for (c, p) in phases.iter().enumerate() {
        for r in 0..scaled.nrows() {
            scaled[(r, c)] *= p;
        }
    }
    scaled * vectors.adjoint()
}
