use std::fmt;

use serde::{Deserialize, Serialize};

use super::base::PARAM_EPS;
use super::element::elem_norm;
use super::prim::PrimLabel;
use super::toeplitz::{toeplitz_norm, ToeplitzElement};
use super::{AlgebraModel, Element};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix};

/// Evaluation-type representations of the gallery models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Representation {
    /// `a ↦ a(t)`.
    EvalPoint { at: f64 },
    /// `a ↦ a(t)|_{block}` at a constrained point.
    CompressedEval { at: f64, block: usize },
    /// The identity representation of the Toeplitz algebra on `ℓ²(ℕ)`,
    /// realized through finite sections.
    ToeplitzIdentity,
    /// `x ↦ symbol(θ)`, vanishing on the compacts.
    ToeplitzCharacter { theta: f64 },
}

impl fmt::Display for Representation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::EvalPoint { at } => write!(f, "ev({at})"),
            Self::CompressedEval { at, block } => write!(f, "ev({at})[{block}]"),
            Self::ToeplitzIdentity => write!(f, "pi"),
            Self::ToeplitzCharacter { theta } => write!(f, "chi({theta})"),
        }
    }
}

impl Representation {
    /// Checks that the representation belongs to `model`.
    pub fn validate(&self, model: &AlgebraModel) -> Result<()> {
        match (self, model) {
            (Self::EvalPoint { at }, AlgebraModel::Function(m)) => {
                if m.base().contains(*at) {
                    Ok(())
                } else {
                    Err(Error::IncompatibleModel(format!("{self} is outside the base space")))
                }
            }
            (Self::CompressedEval { at, block }, AlgebraModel::Function(m)) => match m.blocks().blocks_at(*at) {
                Some(b) if *block < b.len() => Ok(()),
                Some(_) => Err(Error::IncompatibleModel(format!("{self}: block index out of range"))),
                None => Err(Error::IncompatibleModel(format!("{self}: no constraint at this point"))),
            },
            (Self::ToeplitzIdentity | Self::ToeplitzCharacter { .. }, AlgebraModel::Toeplitz(_)) => Ok(()),
            _ => Err(Error::IncompatibleModel(format!("{self} does not act on this model"))),
        }
    }

    /// Image of `a`. `section` overrides the truncation size used by the
    /// Toeplitz identity representation (default: the element's largest).
    pub fn apply(&self, a: &Element, section: Option<usize>) -> Result<ComplexMatrix> {
        match (self, a) {
            (Self::EvalPoint { at }, Element::Function(f)) => f.eval(*at),
            (Self::CompressedEval { at, block }, Element::Function(f)) => {
                let blocks = f
                    .model()
                    .blocks()
                    .blocks_at(*at)
                    .ok_or_else(|| Error::IncompatibleModel(format!("{self}: no constraint at this point")))?;
                let range = blocks
                    .get(*block)
                    .ok_or_else(|| Error::IncompatibleModel(format!("{self}: block index out of range")))?;
                Ok(f.eval(*at)?.principal_block(range.start, range.end))
            }
            (Self::ToeplitzIdentity, Element::Toeplitz(x)) => x.section(section.unwrap_or_else(|| x.largest_section())),
            (Self::ToeplitzCharacter { theta }, Element::Toeplitz(x)) => {
                Ok(ComplexMatrix::scalar(x.symbol().eval(*theta)))
            }
            _ => Err(Error::IncompatibleModel(format!("{self} does not act on this element"))),
        }
    }

    /// `‖φ(a)‖`. For the Toeplitz identity this is the finite-section norm.
    pub fn image_norm(&self, a: &Element) -> Result<f64> {
        match (self, a) {
            (Self::ToeplitzIdentity, Element::Toeplitz(x)) => Ok(toeplitz_norm(x).value),
            _ => Ok(op_norm(&self.apply(a, None)?)),
        }
    }

    /// Primitive points in the closure of this representation's kernel
    /// class, i.e. its support.
    pub fn support(&self, model: &AlgebraModel) -> Result<Vec<PrimLabel>> {
        self.validate(model)?;
        Ok(match (self, model) {
            (Self::EvalPoint { at }, AlgebraModel::Function(m)) => match m.blocks().blocks_at(*at) {
                Some(blocks) => (0..blocks.len())
                    .map(|block| PrimLabel::Block { at: *at, block })
                    .collect(),
                None => vec![PrimLabel::Point { at: *at }],
            },
            (Self::CompressedEval { at, block }, _) => vec![PrimLabel::Block {
                at: *at,
                block: *block,
            }],
            (Self::ToeplitzIdentity, AlgebraModel::Toeplitz(t)) => {
                let mut s = vec![PrimLabel::ToeplitzPi];
                s.extend(t.thetas().iter().map(|&theta| PrimLabel::ToeplitzChar { theta }));
                s
            }
            (Self::ToeplitzCharacter { theta }, _) => vec![PrimLabel::ToeplitzChar { theta: *theta }],
            _ => unreachable!("validated above"),
        })
    }

    /// Parameter of a point evaluation, if any.
    pub fn eval_parameter(&self) -> Option<f64> {
        match self {
            Self::EvalPoint { at } | Self::CompressedEval { at, .. } => Some(*at),
            _ => None,
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::EvalPoint { at: a }, Self::EvalPoint { at: b }) => (a - b).abs() <= PARAM_EPS,
            (Self::CompressedEval { at: a, block: i }, Self::CompressedEval { at: b, block: j }) => {
                (a - b).abs() <= PARAM_EPS && i == j
            }
            (Self::ToeplitzCharacter { theta: a }, Self::ToeplitzCharacter { theta: b }) => (a - b).abs() <= PARAM_EPS,
            (Self::ToeplitzIdentity, Self::ToeplitzIdentity) => true,
            _ => false,
        }
    }
}

/// Convenience wrapper for [`Representation::apply`].
pub fn rep_apply(phi: &Representation, a: &Element, section: Option<usize>) -> Result<ComplexMatrix> {
    phi.apply(a, section)
}

/// Element norm: sup over the grid (function models) or the finite-section
/// ladder (Toeplitz).
pub fn element_norm(a: &Element) -> f64 {
    match a {
        Element::Function(f) => elem_norm(f).value,
        Element::Toeplitz(x) => toeplitz_norm(x).value,
    }
}

pub(crate) fn toeplitz_elem(a: &Element) -> Option<&ToeplitzElement> {
    match a {
        Element::Toeplitz(x) => Some(x),
        _ => None,
    }
}
