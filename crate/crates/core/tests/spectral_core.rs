mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use repfam::linalg::{
    eig_normal, func_calc, hausdorff, hermitian_eigenvalues, op_norm, singular_values, ComplexMatrix,
    PiecewiseLinear, SpectrumSet, DEFAULT_TOL,
};

/// Number of eigenvalues of Hermitian `a` below `x`, from the signs of the
/// Gaussian-elimination pivots of `a − x` (Sylvester inertia).
fn count_below(a: &ComplexMatrix, x: f64) -> usize {
    let n = a.dim();
    let mut m: Vec<Vec<Complex64>> = (0..n).map(|i| (0..n).map(|j| a[(i, j)]).collect()).collect();
    for (i, row) in m.iter_mut().enumerate() {
        row[i] -= x;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut p = m[k][k].re;
        if p.abs() < 1e-300 {
            p = -1e-300;
        }
        if p < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let f = m[i][k] / p;
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
        }
    }
    negatives
}

/// Eigenvalues by bisection on the inertia count.
fn bisection_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let r = a.frobenius_norm() + 1.0;
    (0..a.dim())
        .map(|k| {
            let (mut lo, mut hi) = (-r, r);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(a, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

#[test]
fn hermitian_eigenvalues_match_inertia_bisection() {
    let mut rng = rng(1);
    for n in [1, 2, 3, 5, 8, 13, 20] {
        for _ in 0..5 {
            let a = random_hermitian(&mut rng, n);
            let got = hermitian_eigenvalues(&a).unwrap();
            let want = bisection_eigenvalues(&a);
            for (g, w) in got.iter().zip(&want) {
                assert!((g - w).abs() < 1e-9, "n={n}: {g} vs {w}");
            }
        }
    }
}

#[test]
fn c_star_identity_on_random_matrices() {
    let mut rng = rng(2);
    for i in 0..200 {
        let a = random_matrix(&mut rng, 1 + i % 9);
        let n = op_norm(&a);
        let ata = op_norm(&(&a.adjoint() * &a));
        assert!((ata - n * n).abs() <= 1e-10 * n * n.max(1.0), "{ata} vs {}", n * n);
    }
}

#[test]
fn op_norm_matches_largest_eigenvalue_of_gram() {
    let mut rng = rng(3);
    for n in 1..10 {
        let a = random_matrix(&mut rng, n);
        let gram = &a.adjoint() * &a;
        let top = *hermitian_eigenvalues(&gram).unwrap().last().unwrap();
        assert!((singular_values(&a).unwrap()[0] - top.sqrt()).abs() < 1e-10);
    }
}

#[test]
fn eig_normal_recovers_planted_spectrum() {
    let mut rng = rng(4);
    for n in 1..12 {
        let (a, values) = random_normal(&mut rng, n);
        let got = eig_normal(&a, DEFAULT_TOL).unwrap();
        let want = SpectrumSet::new(values, DEFAULT_TOL);
        assert!(hausdorff(&got, &want).unwrap() < 1e-9);
    }
}

#[test]
fn spectral_mapping_for_polynomials() {
    let mut rng = rng(5);
    let p = |z: Complex64| z * z * z - z.scale(2.0) + Complex64::new(0.5, -1.0);
    for n in 2..9 {
        let (a, values) = random_normal(&mut rng, n);
        let id = ComplexMatrix::identity(n);
        let pa = &(&a.pow(3) - &a.scale(Complex64::new(2.0, 0.0))) + &id.scale(Complex64::new(0.5, -1.0));
        let got = eig_normal(&pa, DEFAULT_TOL).unwrap();
        let want = SpectrumSet::new(values.iter().map(|&z| p(z)).collect(), DEFAULT_TOL);
        assert!(hausdorff(&got, &want).unwrap() < 1e-8);
    }
}

#[test]
fn functional_calculus_is_multiplicative() {
    let mut rng = rng(6);
    let f = |x: f64| Complex64::new(x.sin(), x.cos());
    let g = |x: f64| Complex64::new(1.0 / (1.0 + x * x), 0.0);
    let fg = move |x: f64| f(x) * g(x);
    for n in 1..10 {
        let a = random_hermitian(&mut rng, n);
        let lhs = func_calc(&a, &fg, DEFAULT_TOL).unwrap();
        let rhs = &func_calc(&a, &f, DEFAULT_TOL).unwrap() * &func_calc(&a, &g, DEFAULT_TOL).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }
}

#[test]
fn clamp_function_cuts_spectrum_at_one() {
    let mut rng = rng(7);
    let chi = PiecewiseLinear::clamp_at_one(10.0).unwrap();
    let values: Vec<Complex64> = [0.0, 0.5, 2.0, 7.0].iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let a = normal_with_spectrum(&mut rng, &values);
    let out = eig_normal(&func_calc(&a, &chi, DEFAULT_TOL).unwrap(), DEFAULT_TOL).unwrap();
    assert_eq!(out.len(), 3);
    assert!(hausdorff(&out, &SpectrumSet::from_real(&[0.0, 0.5, 1.0], DEFAULT_TOL)).unwrap() < 1e-12);
}

fn points() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64), 0..40)
}

proptest! {
    #[test]
    fn canonicalization_is_idempotent(pts in points()) {
        let z: Vec<Complex64> = pts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let s = SpectrumSet::new(z, 1e-3);
        let again = SpectrumSet::new(s.points().to_vec(), 1e-3);
        prop_assert_eq!(s, again);
    }

    #[test]
    fn canonicalization_ignores_order(pts in points(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let z: Vec<Complex64> = pts.iter().map(|&(a, b)| Complex64::new(a, b)).collect();
        let mut shuffled = z.clone();
        shuffled.shuffle(&mut rng(seed));
        prop_assert_eq!(SpectrumSet::new(z, 1e-9), SpectrumSet::new(shuffled, 1e-9));
    }

    #[test]
    fn hausdorff_is_a_symmetric_pseudometric(a in points(), b in points()) {
        prop_assume!(!a.is_empty() && !b.is_empty());
        let sa = SpectrumSet::new(a.iter().map(|&(x, y)| Complex64::new(x, y)).collect(), 1e-9);
        let sb = SpectrumSet::new(b.iter().map(|&(x, y)| Complex64::new(x, y)).collect(), 1e-9);
        let d = hausdorff(&sa, &sb).unwrap();
        prop_assert!((d - hausdorff(&sb, &sa).unwrap()).abs() < 1e-15);
        prop_assert_eq!(hausdorff(&sa, &sa).unwrap(), 0.0);
    }

    #[test]
    fn union_keeps_both_sets(a in points(), b in points()) {
        let sa = SpectrumSet::new(a.iter().map(|&(x, y)| Complex64::new(x, y)).collect(), 1e-9);
        let sb = SpectrumSet::new(b.iter().map(|&(x, y)| Complex64::new(x, y)).collect(), 1e-9);
        let u = sa.union(&sb);
        for z in sa.points().iter().chain(sb.points()) {
            prop_assert!(u.contains(*z));
        }
    }
}
