#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use repfam::linalg::{hermitian_eigen, ComplexMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let data = (0..n * n).map(|_| random_complex(rng)).collect();
    ComplexMatrix::from_vec(n, data).unwrap()
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let a = random_matrix(rng, n);
    (&a + &a.adjoint()).scale(Complex64::new(0.5, 0.0))
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    hermitian_eigen(&random_hermitian(rng, n)).unwrap().vectors
}

/// `U diag(values) Uᴴ` with a random unitary `U`.
pub fn normal_with_spectrum(rng: &mut ChaCha8Rng, values: &[Complex64]) -> ComplexMatrix {
    let u = random_unitary(rng, values.len());
    &(&u * &ComplexMatrix::diag(values)) * &u.adjoint()
}

pub fn random_normal(rng: &mut ChaCha8Rng, n: usize) -> (ComplexMatrix, Vec<Complex64>) {
    let values: Vec<Complex64> = (0..n).map(|_| random_complex(rng).scale(2.0)).collect();
    (normal_with_spectrum(rng, &values), values)
}
