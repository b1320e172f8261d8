mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use repfam::linalg::{op_norm, ComplexMatrix};
use repfam::model::{
    elem_norm, enum_prim, n_a_profile, toeplitz_norm, AlgebraElement, AlgebraModel, BaseSpace, BlockStructure,
    Constraint, Element, FunctionModel, PrimLabel, Representation, ToeplitzElement, TrigPoly,
};

fn constrained_interval() -> Arc<FunctionModel> {
    let blocks = BlockStructure::new(
        3,
        vec![Constraint::blocks_at(0.5, vec![(0, 1), (1, 3)]), Constraint::diagonal_at(1.0)],
    )
    .unwrap();
    Arc::new(FunctionModel::new(BaseSpace::interval(8).unwrap(), blocks).unwrap())
}

fn random_element(rng: &mut rand_chacha::ChaCha8Rng, m: &Arc<FunctionModel>) -> AlgebraElement {
    let d = m.fiber_dim();
    let samples: Vec<ComplexMatrix> = m.base().grid().iter().map(|_| random_matrix(rng, d)).collect();
    let grid = m.base().grid().to_vec();
    AlgebraElement::projected(m, |t| samples[grid.iter().position(|&g| g == t).unwrap()].clone()).unwrap()
}

fn models() -> Vec<Arc<FunctionModel>> {
    vec![
        Arc::new(FunctionModel::new(BaseSpace::discrete(4).unwrap(), BlockStructure::unconstrained(2).unwrap()).unwrap()),
        constrained_interval(),
        Arc::new(FunctionModel::new(BaseSpace::circle(6).unwrap(), BlockStructure::unconstrained(2).unwrap()).unwrap()),
    ]
}

#[test]
fn representations_are_star_morphisms() {
    let mut rng = rng(11);
    for m in models() {
        let model = AlgebraModel::Function(m.clone());
        for _ in 0..10 {
            let a = random_element(&mut rng, &m);
            let b = random_element(&mut rng, &m);
            let ab: Element = a.mul(&b).unwrap().into();
            let (a, b): (Element, Element) = (a.into(), b.into());
            for p in enum_prim(&model) {
                let phi = p.label.representation();
                let pa = phi.apply(&a, None).unwrap();
                let pb = phi.apply(&b, None).unwrap();
                assert!(phi.apply(&ab, None).unwrap().max_abs_diff(&(&pa * &pb)) < 1e-12);
                assert!(phi.apply(&a.adjoint(), None).unwrap().max_abs_diff(&pa.adjoint()) < 1e-15);
                assert!(phi.image_norm(&a).unwrap() <= a.norm() + 1e-12);
            }
        }
    }
}

#[test]
fn element_norm_satisfies_c_star_identity() {
    let mut rng = rng(12);
    for m in models() {
        for _ in 0..20 {
            let a = random_element(&mut rng, &m);
            let n = elem_norm(&a).value;
            let nn = elem_norm(&a.adjoint().mul(&a).unwrap()).value;
            assert!((nn - n * n).abs() < 1e-10 * n * n);
        }
    }
}

#[test]
fn norm_error_bar_covers_off_grid_values() {
    let mut rng = rng(13);
    let m = constrained_interval();
    for _ in 0..10 {
        let a = random_element(&mut rng, &m);
        let est = elem_norm(&a);
        for _ in 0..50 {
            let t: f64 = rng.gen_range(0.0..1.0);
            assert!(op_norm(&a.eval(t).unwrap()) <= est.value + est.error_bar + 1e-12);
        }
    }
}

/// A block value at a constrained point never exceeds the limit of the
/// neighbouring generic values: the norm function is lower semicontinuous.
#[test]
fn norm_function_is_lower_semicontinuous_on_samples() {
    let mut rng = rng(14);
    let m = constrained_interval();
    let model = AlgebraModel::Function(m.clone());
    let h = m.base().grid_step();
    for _ in 0..20 {
        let a = random_element(&mut rng, &m);
        let lip = a.lipschitz_bound();
        let profile = n_a_profile(&model, &a.clone().into()).unwrap();
        for (p, v) in &profile {
            if let PrimLabel::Block { at, .. } = p.label {
                let neighbours: Vec<f64> = profile
                    .iter()
                    .filter_map(|(q, w)| match q.label {
                        PrimLabel::Point { at: s } if (s - at).abs() <= h + 1e-12 => Some(*w),
                        _ => None,
                    })
                    .collect();
                let near = neighbours.iter().copied().fold(0.0, f64::max);
                assert!(*v <= near + lip * h + 1e-12);
            }
        }
    }
}

#[test]
fn toeplitz_section_norms_increase() {
    let x = ToeplitzElement::from_symbol(TrigPoly::from_terms(&[
        (-2, Complex64::new(0.3, 0.1)),
        (0, Complex64::new(1.0, 0.0)),
        (1, Complex64::new(-0.7, 0.2)),
    ]))
    .with_sections(vec![2, 4, 8, 16, 32, 64])
    .unwrap();
    let norms = toeplitz_norm(&x);
    for w in norms.sections.windows(2) {
        assert!(w[1].1 >= w[0].1 - 1e-12);
    }
    let sup = (0..2000)
        .map(|j| x.symbol().eval(2.0 * PI * j as f64 / 2000.0).norm())
        .fold(0.0, f64::max);
    assert!(norms.value <= sup + 1e-9);
}

#[test]
fn cosine_section_norm_matches_closed_form() {
    let cos2 = ToeplitzElement::from_symbol(TrigPoly::from_terms(&[
        (-1, Complex64::new(1.0, 0.0)),
        (1, Complex64::new(1.0, 0.0)),
    ]));
    for n in [8usize, 16, 32, 64, 128] {
        let want = 2.0 * (PI / (n as f64 + 1.0)).cos();
        assert!((op_norm(&cos2.compression(n)) - want).abs() < 1e-10);
    }
}

#[test]
fn toeplitz_products_are_compressed_consistently() {
    let s = ToeplitzElement::shift();
    // S*S = 1 exactly; S S* = 1 − E00.
    let sts = s.adjoint().mul(&s);
    assert!(sts.compression(16).max_abs_diff(&ComplexMatrix::identity(16)) < 1e-14);
    let sst = s.mul(&s.adjoint());
    let mut want = ComplexMatrix::identity(16);
    want[(0, 0)] = Complex64::new(0.0, 0.0);
    assert!(sst.compression(16).max_abs_diff(&want) < 1e-14);
    let pi = Representation::ToeplitzIdentity;
    let chi = Representation::ToeplitzCharacter { theta: 1.3 };
    assert!((chi.apply(&sst.into(), None).unwrap()[(0, 0)] - 1.0).norm() < 1e-14);
    assert_eq!(pi.to_string(), "pi");
}
