//! Dense complex linear algebra: norms, eigensolvers, functional calculus and
//! spectrum-set arithmetic.

mod funcalc;
mod hermitian;
mod matrix;
mod normal;
mod spectrum;
mod svd;

pub use funcalc::{func_calc, PiecewiseLinear, RealFunction};
pub use hermitian::{hermitian_eigen, hermitian_eigenvalues, HermitianEigen, MAX_QL_ITERATIONS};
pub use matrix::{ComplexMatrix, ONE, ZERO};
pub use normal::{check_normal, eig_normal, normal_eigen, normality_defect, NormalEigen, DEFAULT_TOL};
pub use spectrum::{directed_hausdorff, hausdorff, SpectrumSet};
pub use svd::{inverse_norm, min_singular_value, op_norm, singular_values, MAX_JACOBI_SWEEPS};
