//! Affiliated self-adjoint observables in Cayley form.
//!
//! A possibly unbounded observable `T` is handled through its Cayley
//! transform `u_T = h₀(T)` with `h₀(z) = (z + i)/(z − i)`, a unitary whose
//! spectrum lies on the unit circle. The point `1` encodes infinity: it is
//! never attained by a bounded matrix, `u_∞ = 1`, and spectral points of
//! `u_T` within resolution of `1` are read as the truncated infinite part.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::{check_exhausting, check_faithful, exhausting_probes, faithful_probes, Probe, RepFamily};
use crate::linalg::{eig_normal, func_calc, ComplexMatrix, SpectrumSet, DEFAULT_TOL};
use crate::model::Element;

/// Self-adjointness tolerance for observable payloads.
pub const SELF_ADJOINT_TOL: f64 = 1e-10;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `h₀(x) = (x + i)/(x − i)`.
pub fn h0(x: f64) -> Complex64 {
    (Complex64::new(x, 0.0) + I) / (Complex64::new(x, 0.0) - I)
}

/// `h₀⁻¹(w) = i(w + 1)/(w − 1)`.
pub fn h0_inverse(w: Complex64) -> Complex64 {
    I * (w + 1.0) / (w - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ObservableKind {
    Bounded { matrix: ComplexMatrix },
    /// The zero morphism, `T = ∞`.
    Infinite,
    /// Self-adjoint fibers over parameter nodes. `truncated` records that
    /// the nodes sample an unbounded parameter window.
    Fibered {
        nodes: Vec<Vec<f64>>,
        fibers: Vec<ComplexMatrix>,
        truncated: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Observable {
    pub label: String,
    pub kind: ObservableKind,
}

fn check_self_adjoint(m: &ComplexMatrix) -> Result<()> {
    if m.is_hermitian(SELF_ADJOINT_TOL) {
        Ok(())
    } else {
        Err(Error::NotSelfAdjoint {
            defect: m.hermitian_defect(),
        })
    }
}

impl Observable {
    pub fn bounded(label: impl Into<String>, matrix: ComplexMatrix) -> Result<Self> {
        check_self_adjoint(&matrix)?;
        Ok(Self {
            label: label.into(),
            kind: ObservableKind::Bounded { matrix },
        })
    }

    pub fn infinite(label: impl Into<String>) -> Self {
        Self {
            label: label.into(),
            kind: ObservableKind::Infinite,
        }
    }

    pub fn fibered(
        label: impl Into<String>,
        nodes: Vec<Vec<f64>>,
        fibers: Vec<ComplexMatrix>,
        truncated: bool,
    ) -> Result<Self> {
        if nodes.len() != fibers.len() {
            return Err(Error::InvalidInput(format!(
                "{} nodes but {} fibers",
                nodes.len(),
                fibers.len()
            )));
        }
        if fibers.is_empty() {
            return Err(Error::InvalidInput("a fibered observable needs at least one fiber".into()));
        }
        for f in &fibers {
            check_self_adjoint(f)?;
        }
        Ok(Self {
            label: label.into(),
            kind: ObservableKind::Fibered {
                nodes,
                fibers,
                truncated,
            },
        })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.kind, ObservableKind::Infinite)
    }
}

/// The Cayley transform `u_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum CayleyElement {
    /// The constant unitary `1` of the infinite observable.
    One,
    Matrix { value: ComplexMatrix },
    Fibered { values: Vec<ComplexMatrix>, truncated: bool },
}

impl CayleyElement {
    /// `max ‖uᴴu − 1‖` over all matrices held.
    pub fn unitarity_defect(&self) -> f64 {
        let defect = |u: &ComplexMatrix| {
            let id = ComplexMatrix::identity(u.dim());
            crate::linalg::op_norm(&(&(&u.adjoint() * u) - &id))
        };
        match self {
            Self::One => 0.0,
            Self::Matrix { value } => defect(value),
            Self::Fibered { values, .. } => values.iter().map(defect).fold(0.0, f64::max),
        }
    }
}

fn cayley_matrix(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_self_adjoint(m)?;
    func_calc(m, &h0, DEFAULT_TOL)
}

pub fn cayley(t: &Observable) -> Result<CayleyElement> {
    match &t.kind {
        ObservableKind::Bounded { matrix } => Ok(CayleyElement::Matrix {
            value: cayley_matrix(matrix)?,
        }),
        ObservableKind::Infinite => Ok(CayleyElement::One),
        ObservableKind::Fibered { fibers, truncated, .. } => Ok(CayleyElement::Fibered {
            values: fibers.par_iter().map(cayley_matrix).collect::<Result<_>>()?,
            truncated: *truncated,
        }),
    }
}

/// `h₀⁻¹(Spec(u) ∖ {w : |w − 1| ≤ resolution})`, flagged truncated when a
/// point was discarded.
fn inverse_cayley_spectrum(u: &ComplexMatrix) -> Result<SpectrumSet> {
    let s = eig_normal(u, DEFAULT_TOL)?;
    let one = Complex64::new(1.0, 0.0);
    let mut discarded = false;
    let mut points = Vec::with_capacity(s.len());
    for &w in s.points() {
        if (w - one).norm() <= DEFAULT_TOL {
            discarded = true;
        } else {
            let z = h0_inverse(w);
            // Self-adjoint input: the imaginary part is rounding.
            points.push(Complex64::new(z.re, 0.0));
        }
    }
    Ok(SpectrumSet::new(points, DEFAULT_TOL).with_truncated(discarded))
}

/// `Spec(T) = h₀⁻¹(Spec(u_T))`.
pub fn spec_observable(t: &Observable) -> Result<SpectrumSet> {
    match cayley(t)? {
        CayleyElement::One => Ok(SpectrumSet::empty(DEFAULT_TOL)),
        CayleyElement::Matrix { value } => inverse_cayley_spectrum(&value),
        CayleyElement::Fibered { values, truncated } => {
            let parts: Vec<SpectrumSet> = values.par_iter().map(inverse_cayley_spectrum).collect::<Result<_>>()?;
            let u = SpectrumSet::union_all(&parts, DEFAULT_TOL);
            let flag = u.truncated() || truncated;
            Ok(u.with_truncated(flag))
        }
    }
}

/// How a family of pushed observables was certified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certificate {
    Exhausting,
    Faithful,
    Uncertified,
}

/// The images `φ(T)` of an observable under the members of a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableFamily {
    pub label: String,
    pub members: Vec<Observable>,
    pub certificate: Certificate,
}

impl ObservableFamily {
    pub fn new(label: impl Into<String>, members: Vec<Observable>, certificate: Certificate) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("an observable family must be nonempty".into()));
        }
        Ok(Self {
            label: label.into(),
            members,
            certificate,
        })
    }

    /// Pushes a self-adjoint element through every member of `family` and
    /// certifies the family against the probe galleries built from it.
    pub fn push_forward(family: &RepFamily, a: &Element) -> Result<Self> {
        let members = family
            .members()
            .par_iter()
            .map(|m| Observable::bounded(m.to_string(), m.apply(a, None)?))
            .collect::<Result<Vec<_>>>()?;
        let user = [Probe {
            label: "a".into(),
            element: a.clone(),
        }];
        let certificate = if check_exhausting(family, &exhausting_probes(family.model(), &user)?)?.holds {
            Certificate::Exhausting
        } else if check_faithful(family, &faithful_probes(family.model(), &user)?)?.holds {
            Certificate::Faithful
        } else {
            Certificate::Uncertified
        };
        Self::new(family.label(), members, certificate)
    }

    /// Every member is the infinite observable.
    pub fn is_degenerate(&self) -> bool {
        self.members.iter().all(Observable::is_infinite)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableSpectrum {
    pub spectrum: SpectrumSet,
    /// The union is only dense in `Spec(T)` (faithful family).
    pub dense: bool,
    pub degenerate: bool,
}

impl ObservableSpectrum {
    pub fn contract_label(&self) -> &'static str {
        if self.dense {
            "dense in Spec(T)"
        } else {
            "equal to Spec(T)"
        }
    }
}

/// `∪_{φ∈F} Spec(φ(T))`.
pub fn spec_union_observable(family: &ObservableFamily) -> Result<ObservableSpectrum> {
    let parts: Vec<SpectrumSet> = family
        .members
        .par_iter()
        .map(spec_observable)
        .collect::<Result<_>>()?;
    Ok(ObservableSpectrum {
        spectrum: SpectrumSet::union_all(&parts, DEFAULT_TOL),
        dense: family.certificate != Certificate::Exhausting,
        degenerate: family.is_degenerate(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum InvertibilityMode {
    /// Requires an exhausting family.
    Exhausting,
    /// Requires a faithful family and `dist(0, Spec φ(T)) ≥ 1/bound`.
    Faithful { bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservableInvertibility {
    pub invertible: bool,
    /// `min_φ dist(0, Spec φ(T))`; infinite when every spectrum is empty.
    #[serde(with = "crate::serde_float")]
    pub min_distance: f64,
    pub failing_member: Option<String>,
    pub degenerate: bool,
}

pub fn invertible_observable(family: &ObservableFamily, mode: InvertibilityMode) -> Result<ObservableInvertibility> {
    let required = match mode {
        InvertibilityMode::Exhausting => family.certificate == Certificate::Exhausting,
        InvertibilityMode::Faithful { bound } => {
            if !(bound > 0.0) {
                return Err(Error::InvalidInput("inverse-norm bound must be positive".into()));
            }
            family.certificate != Certificate::Uncertified
        }
    };
    if !required {
        return Err(Error::NotCertified(format!(
            "family '{}' is {:?}, which does not support {:?}",
            family.label, family.certificate, mode
        )));
    }
    let dists: Vec<f64> = family
        .members
        .par_iter()
        .map(|m| Ok(spec_observable(m)?.distance_to(Complex64::new(0.0, 0.0)).unwrap_or(f64::INFINITY)))
        .collect::<Result<_>>()?;
    let (worst, min_distance) = dists
        .iter()
        .enumerate()
        .fold((None, f64::INFINITY), |(w, d), (i, &x)| if x < d { (Some(i), x) } else { (w, d) });
    let threshold = match mode {
        InvertibilityMode::Exhausting => DEFAULT_TOL,
        InvertibilityMode::Faithful { bound } => (1.0 / bound).max(DEFAULT_TOL),
    };
    let invertible = min_distance > DEFAULT_TOL && min_distance >= threshold;
    Ok(ObservableInvertibility {
        invertible,
        min_distance,
        failing_member: if invertible {
            None
        } else {
            worst.map(|i| family.members[i].label.clone())
        },
        degenerate: family.is_degenerate(),
    })
}
