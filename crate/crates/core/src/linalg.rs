//! Dense complex linear algebra used throughout the crate.
//!
//! Everything is expressed on `nalgebra` dynamic matrices. Two-level systems
//! dominate the workload, so the Hermitian eigensolver and the unitary
//! exponential have closed-form 2×2 paths; larger dimensions go through
//! `nalgebra`'s tridiagonal QR and Schur routines.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector, Schur, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// `e^{iφ}`.
pub(crate) fn cis(phi: f64) -> Complex64 {
    Complex64::new(libm::cos(phi), libm::sin(phi))
}

/// Largest elementwise modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

/// Max-norm of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Max-norm of `U†U - I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.nrows();
    let gram = u.adjoint() * u;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((gram[(i, j)] - target).norm());
        }
    }
    worst
}

/// `⟨a|b⟩`, conjugate-linear in the first argument.
pub fn inner(a: &CVector, b: &CVector) -> Complex64 {
    a.dotc(b)
}

/// Multiplies `v` by a unit phase so that its largest-modulus component is
/// real and positive. Ties within a relative `1e-12` go to the lowest index.
pub fn fix_gauge(v: &mut CVector) {
    let largest = v.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()));
    if largest == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm() >= largest * (1.0 - 1e-12)).unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = Complex64::from(v[pivot].re);
}

/// Eigendecomposition of a Hermitian matrix with ascending eigenvalues.
/// Column `k` of `vectors` is the eigenvector of `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Diagonalizes a Hermitian matrix. Only the upper triangle is trusted to be
/// exact; the input is symmetrized before decomposition.
pub fn eigh(m: &CMatrix) -> Result<HermitianEigen> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::invalid("eigh: matrix is not square"));
    }
    if n == 2 {
        return Ok(eigh_2x2(m));
    }
    let sym = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::try_new(sym, 1e-15, 0)
        .ok_or_else(|| Error::NumericalFailure("Hermitian eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEigen { values, vectors })
}

fn eigh_2x2(m: &CMatrix) -> HermitianEigen {
    let a = m[(0, 0)].re;
    let d = m[(1, 1)].re;
    let b = (m[(0, 1)] + m[(1, 0)].conj()) * 0.5;
    let mean = 0.5 * (a + d);
    let half = 0.5 * (a - d);
    let r = libm::hypot(half, b.norm());
    let mut vectors = CMatrix::zeros(2, 2);
    if b.norm() == 0.0 {
        // Already diagonal: order the basis vectors by energy.
        let (lo, hi) = if a <= d { (0, 1) } else { (1, 0) };
        vectors[(lo, 0)] = ONE;
        vectors[(hi, 1)] = ONE;
    } else {
        // Pick the algebraically stable null vector of H - λ for each root.
        let (low, high) = if half >= 0.0 {
            ([b, Complex64::from(-(half + r))], [Complex64::from(r + half), b.conj()])
        } else {
            ([Complex64::from(r - half), -b.conj()], [b, Complex64::from(r - half)])
        };
        for (col, v) in [low, high].iter().enumerate() {
            let norm = libm::hypot(v[0].norm(), v[1].norm());
            vectors[(0, col)] = v[0] / norm;
            vectors[(1, col)] = v[1] / norm;
        }
    }
    HermitianEigen { values: alloc::vec![mean - r, mean + r], vectors }
}

/// `exp(-iG)` for Hermitian `G`, exactly unitary up to rounding.
pub fn expm_unitary(g: &CMatrix) -> Result<CMatrix> {
    if g.nrows() == 2 {
        return Ok(expm_unitary_2x2(g));
    }
    let eig = eigh(g)?;
    let v = &eig.vectors;
    let mut scaled = v.clone();
    for (j, &lambda) in eig.values.iter().enumerate() {
        let phase = cis(-lambda);
        for i in 0..v.nrows() {
            scaled[(i, j)] *= phase;
        }
    }
    Ok(scaled * v.adjoint())
}

fn expm_unitary_2x2(g: &CMatrix) -> CMatrix {
    // G = m·I + K with K traceless Hermitian, K² = r²·I.
    let m = 0.5 * (g[(0, 0)].re + g[(1, 1)].re);
    let half = 0.5 * (g[(0, 0)].re - g[(1, 1)].re);
    let b = (g[(0, 1)] + g[(1, 0)].conj()) * 0.5;
    let r = libm::hypot(half, b.norm());
    let c = libm::cos(r);
    let sinc = if r < 1e-8 { 1.0 - r * r / 6.0 } else { libm::sin(r) / r };
    let global = cis(-m);
    let mi_s = -I * sinc;
    CMatrix::from_row_slice(
        2,
        2,
        &[global * (c + mi_s * half), global * mi_s * b, global * mi_s * b.conj(), global * (c - mi_s * half)],
    )
}

/// Eigenvalues and an orthonormal eigenbasis of a unitary (more generally,
/// normal) matrix via the complex Schur form. For a normal matrix the Schur
/// vectors are eigenvectors; degenerate eigenvalues come out with an
/// orthonormal basis of their eigenspace.
pub fn unitary_eig(u: &CMatrix) -> Result<(Vec<Complex64>, CMatrix)> {
    let n = u.nrows();
    let schur = Schur::try_new(u.clone(), 1e-15, 0)
        .ok_or_else(|| Error::NumericalFailure("Schur decomposition did not converge".into()))?;
    let (q, t) = schur.unpack();
    let values = (0..n).map(|k| t[(k, k)]).collect();
    Ok((values, q))
}

/// Integer power of a square matrix by repeated squaring. Negative powers
/// use the adjoint, valid for unitary input only.
pub fn unitary_power(u: &CMatrix, k: i64) -> CMatrix {
    let n = u.nrows();
    let mut base = if k < 0 { u.adjoint() } else { u.clone() };
    let mut e = k.unsigned_abs();
    let mut acc = CMatrix::identity(n, n);
    while e > 0 {
        if e & 1 == 1 {
            acc = &acc * &base;
        }
        e >>= 1;
        if e > 0 {
            base = &base * &base;
        }
    }
    acc
}

/// Pauli matrices in the standard basis.
pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}
