//! Desk-scale operator-algebra models.
//!
//! Two families of models are supported: algebras of continuous matrix-valued
//! functions on a discrete set, the interval or the circle (optionally with
//! block constraints at finitely many points), and the Toeplitz algebra
//! generated by the unilateral shift.

mod base;
mod element;
mod prim;
mod rep;
mod toeplitz;

use std::sync::Arc;

pub use base::{BaseKind, BaseSpace, BlockStructure, Constraint, ConstraintKind, FunctionModel, PARAM_EPS};
pub use element::{diagonal_endpoint_model, elem_norm, AlgebraElement, NormEstimate, CONSTRAINT_TOL};
pub use prim::{enum_prim, n_a_profile, PrimLabel, PrimPoint};
pub use rep::{element_norm, rep_apply, Representation};
pub use toeplitz::{toeplitz_norm, ToeplitzElement, ToeplitzModel, ToeplitzNorm, TrigPoly, DEFAULT_SECTIONS};

pub(crate) use rep::toeplitz_elem;
pub(crate) use toeplitz::max_circle_gap;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum AlgebraModel {
    Function(Arc<FunctionModel>),
    Toeplitz(Arc<ToeplitzModel>),
}

impl AlgebraModel {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Function(m) => match m.base().kind() {
                BaseKind::Discrete(_) => "discrete",
                BaseKind::Interval => "interval",
                BaseKind::Circle => "circle",
            },
            Self::Toeplitz(_) => "toeplitz",
        }
    }

    pub fn check_element(&self, a: &Element) -> Result<()> {
        match (self, a) {
            (Self::Function(m), Element::Function(f)) if Arc::ptr_eq(m, f.model()) || **m == **f.model() => Ok(()),
            (Self::Toeplitz(_), Element::Toeplitz(_)) => Ok(()),
            _ => Err(Error::IncompatibleModel(format!(
                "element does not belong to the {} model",
                self.name()
            ))),
        }
    }

    /// Largest gap between sampled parameters of the continuous part.
    pub fn resolution_step(&self) -> f64 {
        match self {
            Self::Function(m) => m.base().grid_step(),
            Self::Toeplitz(t) => t.theta_gap(),
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            Self::Function(m) => Element::Function(AlgebraElement::identity(m)),
            Self::Toeplitz(_) => Element::Toeplitz(ToeplitzElement::identity()),
        }
    }
}

/// An element of either model family.
#[derive(Debug, Clone)]
pub enum Element {
    Function(AlgebraElement),
    Toeplitz(ToeplitzElement),
}

impl Element {
    pub fn adjoint(&self) -> Self {
        match self {
            Self::Function(f) => Self::Function(f.adjoint()),
            Self::Toeplitz(x) => Self::Toeplitz(x.adjoint()),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Function(a), Self::Function(b)) => Ok(Self::Function(a.mul(b)?)),
            (Self::Toeplitz(a), Self::Toeplitz(b)) => Ok(Self::Toeplitz(a.mul(b))),
            _ => Err(Error::IncompatibleModel("cannot multiply elements of different models".into())),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (Self::Function(a), Self::Function(b)) => Ok(Self::Function(a.add(b)?)),
            (Self::Toeplitz(a), Self::Toeplitz(b)) => Ok(Self::Toeplitz(a.add(b))),
            _ => Err(Error::IncompatibleModel("cannot add elements of different models".into())),
        }
    }

    pub fn scale(&self, s: num_complex::Complex64) -> Self {
        match self {
            Self::Function(a) => Self::Function(a.scale(s)),
            Self::Toeplitz(x) => Self::Toeplitz(x.scale(s)),
        }
    }

    /// `‖a‖²·1 − a*a`.
    pub fn norm_defect_element(&self) -> Result<Self> {
        match self {
            Self::Function(a) => Ok(Self::Function(a.norm_defect_element()?)),
            Self::Toeplitz(x) => Ok(Self::Toeplitz(x.norm_defect_element())),
        }
    }

    pub fn norm(&self) -> f64 {
        element_norm(self)
    }
}

impl From<AlgebraElement> for Element {
    fn from(a: AlgebraElement) -> Self {
        Self::Function(a)
    }
}

impl From<ToeplitzElement> for Element {
    fn from(x: ToeplitzElement) -> Self {
        Self::Toeplitz(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use element::diag2;

    #[test]
    fn example_matrix_prim_points() {
        let m = diagonal_endpoint_model(2, 0).unwrap();
        let model = AlgebraModel::Function(m);
        let labels: Vec<String> = enum_prim(&model).iter().map(|p| p.label.to_string()).collect();
        assert_eq!(labels, vec!["ev(0)", "ev(0.5)", "ev(1)[0]", "ev(1)[1]"]);
    }

    #[test]
    fn toeplitz_prim_points_and_closure() {
        let model = AlgebraModel::Toeplitz(Arc::new(ToeplitzModel::new(8).unwrap()));
        let prim = enum_prim(&model);
        assert_eq!(prim.len(), 9);
        assert_eq!(prim[0].label, PrimLabel::ToeplitzPi);
        assert_eq!(prim[0].closure_hint.len(), 8);
        assert!(prim[1..].iter().all(|p| prim[0].closure_hint.iter().any(|c| c.same_as(&p.label))));
    }

    #[test]
    fn example_matrix_profile() {
        let m = diagonal_endpoint_model(4, 0).unwrap();
        let f = AlgebraElement::from_fn(&m, |t| diag2(1.0, 1.0 - t)).unwrap();
        let model = AlgebraModel::Function(m);
        let prof = n_a_profile(&model, &f.into()).unwrap();
        for (p, v) in &prof {
            match p.label {
                PrimLabel::Point { .. } => assert_eq!(*v, 1.0),
                PrimLabel::Block { block: 0, .. } => assert_eq!(*v, 1.0),
                PrimLabel::Block { block: 1, .. } => assert_eq!(*v, 0.0),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn rep_apply_examples() {
        let m = diagonal_endpoint_model(4, 0).unwrap();
        let f: Element = AlgebraElement::from_fn(&m, |t| diag2(1.0, 1.0 - t)).unwrap().into();
        let ev11 = Representation::CompressedEval { at: 1.0, block: 1 };
        assert_eq!(ev11.apply(&f, None).unwrap(), ComplexMatrix::scalar(element::real(0.0)));
        let ev10 = Representation::CompressedEval { at: 1.0, block: 0 };
        assert_eq!(ev10.apply(&f, None).unwrap(), ComplexMatrix::scalar(element::real(1.0)));
        assert!(Representation::CompressedEval { at: 0.5, block: 0 }.validate(&AlgebraModel::Function(m)).is_err());

        let s: Element = ToeplitzElement::shift().into();
        let theta = 0.7;
        let chi = Representation::ToeplitzCharacter { theta };
        let img = chi.apply(&s, None).unwrap();
        assert!((img[(0, 0)] - num_complex::Complex64::from_polar(1.0, theta)).norm() < 1e-15);
        assert!(chi.apply(&f, None).is_err());
    }
}
