//! Hermitian eigendecomposition.
//!
//! Householder reduction to Hermitian tridiagonal form, a diagonal phase
//! scaling that makes the off-diagonal real, then implicit QL with Wilkinson
//! shifts on the real symmetric tridiagonal matrix. Eigenvectors are
//! accumulated through all three stages.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ONE, ZERO};
use crate::error::{Error, Result};

/// Iteration cap per eigenvalue for the QL sweep.
pub const MAX_QL_ITERATIONS: usize = 60;

#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Reassembles `V diag(f(values)) Vᴴ`.
    pub fn reconstruct_with<F: Fn(f64) -> Complex64>(&self, f: F) -> ComplexMatrix {
        let d: Vec<Complex64> = self.values.iter().map(|&x| f(x)).collect();
        conjugate_diag(&self.vectors, &d)
    }
}

/// `V diag(d) Vᴴ` without forming the diagonal matrix.
pub(crate) fn conjugate_diag(v: &ComplexMatrix, d: &[Complex64]) -> ComplexMatrix {
    let n = v.dim();
    let mut out = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = ZERO;
            for (k, &dk) in d.iter().enumerate() {
                acc += v[(i, k)] * dk * v[(j, k)].conj();
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Eigendecomposition of a Hermitian matrix. Only the lower triangle's
/// Hermitian part is meaningful; callers check self-adjointness.
pub fn hermitian_eigen(a: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = a.dim();
    // Symmetrize so round-off asymmetry in the input does not leak in.
    let mut work = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            work[(i, j)] = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
        }
    }
    let mut q = ComplexMatrix::identity(n);
    householder_tridiagonalize(&mut work, &mut q);

    let mut diag: Vec<f64> = (0..n).map(|i| work[(i, i)].re).collect();
    let mut off = vec![0.0; n];
    // Phase scaling: column k of Q is multiplied by phase[k].
    let mut phase = ONE;
    for k in 0..n {
        if k > 0 {
            let beta = work[(k, k - 1)];
            let modulus = beta.norm();
            off[k - 1] = modulus;
            if modulus > 0.0 {
                phase *= beta / modulus;
            }
        }
        if phase != ONE {
            for i in 0..n {
                q[(i, k)] *= phase;
            }
        }
    }

    let mut z = vec![vec![0.0; n]; n];
    for (i, row) in z.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    tridiagonal_ql(&mut diag, &mut off, &mut z)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (col, &src) in order.iter().enumerate() {
        for i in 0..n {
            let mut acc = ZERO;
            for (k, zrow) in z.iter().enumerate() {
                let zk = zrow[src];
                if zk != 0.0 {
                    acc += q[(i, k)] * zk;
                }
            }
            vectors[(i, col)] = acc;
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues only.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(a)?.values)
}

fn householder_tridiagonalize(a: &mut ComplexMatrix, q: &mut ComplexMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let tail_norm = (k + 1..n).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let below: f64 = (k + 2..n).map(|i| a[(i, k)].norm_sqr()).sum();
        if tail_norm == 0.0 || below == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let unit = if x0.norm() > 0.0 { x0 / x0.norm() } else { ONE };
        let alpha = -unit * tail_norm;
        for (l, vl) in v.iter_mut().take(len).enumerate() {
            *vl = a[(k + 1 + l, k)];
        }
        v[0] -= alpha;
        let vnorm = v[..len].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vl in v.iter_mut().take(len) {
            *vl /= vnorm;
        }
        let v = &v[..len];

        // A <- H A
        for j in 0..n {
            let s: Complex64 = (0..len).map(|l| v[l].conj() * a[(k + 1 + l, j)]).sum();
            if s != ZERO {
                for l in 0..len {
                    a[(k + 1 + l, j)] -= v[l] * s * 2.0;
                }
            }
        }
        // A <- A H, Q <- Q H
        for m in [&mut *a, &mut *q] {
            for i in 0..n {
                let s: Complex64 = (0..len).map(|l| m[(i, k + 1 + l)] * v[l]).sum();
                if s != ZERO {
                    for l in 0..len {
                        m[(i, k + 1 + l)] -= s * v[l].conj() * 2.0;
                    }
                }
            }
        }
        for i in k + 2..n {
            a[(i, k)] = ZERO;
            a[(k, i)] = ZERO;
        }
    }
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix.
/// `off[i]` couples `i` and `i + 1`; `z` accumulates rotations as columns.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [Vec<f64>]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITERATIONS {
                return Err(Error::NoConvergence {
                    iterations: MAX_QL_ITERATIONS,
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}
