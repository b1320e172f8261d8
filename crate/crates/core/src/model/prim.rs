use std::fmt;

use serde::{Deserialize, Serialize};

use super::base::PARAM_EPS;
use super::rep::Representation;
use super::{AlgebraModel, Element};
use crate::error::Result;

/// Identifies a primitive ideal (the kernel of an irreducible representation).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PrimLabel {
    /// Evaluation at an unconstrained point.
    Point { at: f64 },
    /// One diagonal block at a constrained point.
    Block { at: f64, block: usize },
    /// The identity representation of the Toeplitz algebra.
    ToeplitzPi,
    /// A character of the quotient `C(S¹)`.
    ToeplitzChar { theta: f64 },
}

impl PrimLabel {
    pub fn same_as(&self, other: &Self) -> bool {
        match (self, other) {
            (Self::Point { at: a }, Self::Point { at: b }) => (a - b).abs() <= PARAM_EPS,
            (Self::Block { at: a, block: i }, Self::Block { at: b, block: j }) => (a - b).abs() <= PARAM_EPS && i == j,
            (Self::ToeplitzPi, Self::ToeplitzPi) => true,
            (Self::ToeplitzChar { theta: a }, Self::ToeplitzChar { theta: b }) => (a - b).abs() <= PARAM_EPS,
            _ => false,
        }
    }

    pub fn parameter(&self) -> Option<f64> {
        match self {
            Self::Point { at } | Self::Block { at, .. } => Some(*at),
            Self::ToeplitzChar { theta } => Some(*theta),
            Self::ToeplitzPi => None,
        }
    }

    /// The irreducible representation with this kernel.
    pub fn representation(&self) -> Representation {
        match *self {
            Self::Point { at } => Representation::EvalPoint { at },
            Self::Block { at, block } => Representation::CompressedEval { at, block },
            Self::ToeplitzPi => Representation::ToeplitzIdentity,
            Self::ToeplitzChar { theta } => Representation::ToeplitzCharacter { theta },
        }
    }
}

impl fmt::Display for PrimLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.representation().fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimPoint {
    pub label: PrimLabel,
    /// Other enumerated points lying in the closure of this one.
    pub closure_hint: Vec<PrimLabel>,
}

/// Primitive points of a gallery model, sampled on its grid.
///
/// Function models: one point per unconstrained grid point, one per block at
/// each constrained point. Toeplitz: `π` followed by the sampled characters,
/// all of which lie in the closure of `π`.
pub fn enum_prim(model: &AlgebraModel) -> Vec<PrimPoint> {
    match model {
        AlgebraModel::Function(m) => {
            let mut out = Vec::new();
            for &t in m.base().grid() {
                match m.blocks().blocks_at(t) {
                    Some(blocks) => out.extend((0..blocks.len()).map(|block| PrimPoint {
                        label: PrimLabel::Block { at: t, block },
                        closure_hint: Vec::new(),
                    })),
                    None => out.push(PrimPoint {
                        label: PrimLabel::Point { at: t },
                        closure_hint: Vec::new(),
                    }),
                }
            }
            out
        }
        AlgebraModel::Toeplitz(t) => {
            let chars: Vec<PrimLabel> = t.thetas().iter().map(|&theta| PrimLabel::ToeplitzChar { theta }).collect();
            let mut out = vec![PrimPoint {
                label: PrimLabel::ToeplitzPi,
                closure_hint: chars.clone(),
            }];
            out.extend(chars.into_iter().map(|label| PrimPoint {
                label,
                closure_hint: Vec::new(),
            }));
            out
        }
    }
}

/// The norm function `n_a(ker φ) = ‖φ(a)‖` sampled on [`enum_prim`].
pub fn n_a_profile(model: &AlgebraModel, a: &Element) -> Result<Vec<(PrimPoint, f64)>> {
    model.check_element(a)?;
    enum_prim(model)
        .into_iter()
        .map(|p| {
            let v = p.label.representation().image_norm(a)?;
            Ok((p, v))
        })
        .collect()
}
