//! Eigendecomposition of normal matrices.
//!
//! A normal matrix `A` has Hermitian parts `H₁ = (A + Aᴴ)/2` and
//! `H₂ = (A − Aᴴ)/(2i)` that commute and share `A`'s eigenvectors. We
//! diagonalize the generic combination `H₁ + c·H₂`, then resolve each cluster
//! of (near-)equal eigenvalues by diagonalizing `H₂` and `H₁` restricted to
//! the cluster subspace. Eigenvalues are read back as Rayleigh quotients.

use num_complex::Complex64;

use super::hermitian::{conjugate_diag, hermitian_eigen};
use super::matrix::{ComplexMatrix, ZERO};
use super::spectrum::SpectrumSet;
use super::svd::op_norm;
use crate::error::{Error, Result};

/// Default absolute tolerance for matrices with operator norm up to 1e3.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Irrational mixing weight for the joint diagonalization.
const MIX: f64 = 0.618_033_988_749_894_9;
/// Relative gap below which eigenvalues of the mixed matrix form a cluster.
const CLUSTER_REL: f64 = 1e-7;

#[derive(Debug, Clone)]
pub struct NormalEigen {
    pub values: Vec<Complex64>,
    /// Unitary matrix of eigenvectors (columns).
    pub vectors: ComplexMatrix,
}

impl NormalEigen {
    pub fn reconstruct_with<F: Fn(Complex64) -> Complex64>(&self, f: F) -> ComplexMatrix {
        let d: Vec<Complex64> = self.values.iter().map(|&z| f(z)).collect();
        conjugate_diag(&self.vectors, &d)
    }
}

/// `‖AᴴA − AAᴴ‖`, the quantity compared against `tol·‖A‖²`.
pub fn normality_defect(a: &ComplexMatrix) -> f64 {
    op_norm(&a.self_commutator())
}

pub fn check_normal(a: &ComplexMatrix, tol: f64) -> Result<f64> {
    let norm = op_norm(a);
    let defect = normality_defect(a);
    let allowed = tol * norm * norm;
    if defect > allowed && defect > f64::MIN_POSITIVE {
        return Err(Error::NotNormal { defect, allowed });
    }
    Ok(norm)
}

/// Full eigendecomposition of a normal matrix.
pub fn normal_eigen(a: &ComplexMatrix, tol: f64) -> Result<NormalEigen> {
    let norm = check_normal(a, tol)?;
    let n = a.dim();
    let ah = a.adjoint();
    let h1 = (a + &ah).scale(Complex64::new(0.5, 0.0));
    let h2 = (a - &ah).scale(Complex64::new(0.0, -0.5));

    if h2.frobenius_norm() <= tol * norm.max(1.0) {
        let eig = hermitian_eigen(&h1)?;
        return Ok(NormalEigen {
            values: eig.values.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            vectors: eig.vectors,
        });
    }

    let mixed = &h1 + &h2.scale(Complex64::new(MIX, 0.0));
    let eig = hermitian_eigen(&mixed)?;
    let mut vectors = eig.vectors;
    let gap = CLUSTER_REL * norm.max(1.0);

    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && eig.values[end] - eig.values[end - 1] <= gap {
            end += 1;
        }
        if end - start > 1 {
            refine_cluster(&mut vectors, start, end, &h2)?;
            refine_cluster(&mut vectors, start, end, &h1)?;
        }
        start = end;
    }

    let values = (0..n)
        .map(|j| {
            let v = vectors.column(j);
            let av = a.mat_vec(&v);
            v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum::<Complex64>()
        })
        .collect();
    Ok(NormalEigen { values, vectors })
}

/// Rotates columns `start..end` of `vectors` to diagonalize `h` on their span.
fn refine_cluster(vectors: &mut ComplexMatrix, start: usize, end: usize, h: &ComplexMatrix) -> Result<()> {
    let n = vectors.dim();
    let k = end - start;
    let basis: Vec<Vec<Complex64>> = (start..end).map(|j| vectors.column(j)).collect();
    let images: Vec<Vec<Complex64>> = basis.iter().map(|v| h.mat_vec(v)).collect();
    let mut restricted = ComplexMatrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            restricted[(i, j)] = basis[i]
                .iter()
                .zip(&images[j])
                .map(|(x, y)| x.conj() * y)
                .sum();
        }
    }
    let sub = hermitian_eigen(&restricted)?;
    for col in 0..k {
        for row in 0..n {
            let mut acc = ZERO;
            for (l, b) in basis.iter().enumerate() {
                acc += b[row] * sub.vectors[(l, col)];
            }
            vectors[(row, start + col)] = acc;
        }
    }
    Ok(())
}

/// Spectrum of a normal matrix with multiplicities collapsed at `tol`.
pub fn eig_normal(a: &ComplexMatrix, tol: f64) -> Result<SpectrumSet> {
    let eig = normal_eigen(a, tol)?;
    Ok(SpectrumSet::new(eig.values, tol))
}
