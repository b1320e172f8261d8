//! Singular values by one-sided (Hestenes) Jacobi.
//!
//! Column pairs are rotated until mutually orthogonal; the column norms are
//! then the singular values. This keeps small singular values accurate to
//! working precision relative to their own size, which the invertibility
//! checks rely on.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, ZERO};
use crate::error::{Error, Result};

pub const MAX_JACOBI_SWEEPS: usize = 80;

/// Singular values in descending order.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    // Column-major working copy.
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let mut converged = false;
    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (left, right) = cols.split_at_mut(q);
                let up = &mut left[p];
                let uq = &mut right[0];
                let alpha: f64 = up.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = uq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = up.iter().zip(uq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let unit = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in up.iter_mut().zip(uq.iter_mut()) {
                    let yp = *y * unit.conj();
                    let new_x = *x * c - yp * s;
                    let new_y = *x * s + yp * c;
                    *x = new_x;
                    *y = new_y;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence {
            iterations: MAX_JACOBI_SWEEPS,
        });
    }
    let mut sv: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Largest singular value.
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    if a.as_slice().iter().all(|&z| z == ZERO) {
        return 0.0;
    }
    match singular_values(a) {
        Ok(sv) => sv[0],
        // Jacobi on a finite matrix converges in practice; fall back to the
        // Frobenius bound rather than panicking.
        Err(_) => a.frobenius_norm(),
    }
}

/// Smallest singular value; zero for singular input.
pub fn min_singular_value(a: &ComplexMatrix) -> Result<f64> {
    Ok(*singular_values(a)?.last().expect("nonempty matrix"))
}

/// Operator norm of the inverse, `1 / σ_min`; infinite when singular.
pub fn inverse_norm(a: &ComplexMatrix) -> Result<f64> {
    let s = min_singular_value(a)?;
    Ok(if s > 0.0 { 1.0 / s } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ONE;

    #[test]
    fn identity_and_nilpotent() {
        assert_eq!(op_norm(&ComplexMatrix::identity(2)), 1.0);
        let n = ComplexMatrix::from_real_rows(&[vec![0.0, 2.0], vec![0.0, 0.0]]).unwrap();
        assert!((op_norm(&n) - 2.0).abs() < 1e-15);
        assert_eq!(min_singular_value(&n).unwrap(), 0.0);
        assert!(inverse_norm(&n).unwrap().is_infinite());
    }

    #[test]
    fn zero_matrix() {
        assert_eq!(op_norm(&ComplexMatrix::zeros(3)), 0.0);
    }

    #[test]
    fn small_singular_value_is_accurate() {
        let eps = 1e-13;
        let a = ComplexMatrix::from_rows(&[vec![ONE, ONE], vec![ONE, ONE + eps]]).unwrap();
        // det = eps, ‖A‖ ≈ 2, so σ_min ≈ eps / 2.
        let s = min_singular_value(&a).unwrap();
        assert!((s - eps / 2.0).abs() < 1e-3 * eps, "{s}");
    }
}
