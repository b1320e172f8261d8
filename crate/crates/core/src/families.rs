//! Representation families and the reductions they support.
//!
//! A family `F` is *faithful* if `⊕_{φ∈F} φ` is injective, *exhausting* if
//! every `‖a‖` is attained as `max_{φ∈F} ‖φ(a)‖`, and *full* if the supports
//! of its members cover the primitive spectrum. Full ⇒ exhausting ⇒ faithful.
//!
//! Universal quantification over the algebra cannot be decided numerically,
//! so exhausting and faithful are certified against explicit probe sets. The
//! probe galleries built here always contain the queried elements `a`, their
//! norm defects `‖a‖² − a*a`, the identity, and (for the exhausting check)
//! one localized "hat" element per primitive point. Attainment is compared on
//! the sample grid, where both sides are evaluated exactly, so the tolerance
//! is the numerical resolution rather than the Lipschitz error bar.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eig_normal, min_singular_value, ComplexMatrix, SpectrumSet, DEFAULT_TOL};
use crate::model::{
    elem_norm, enum_prim, max_circle_gap, toeplitz_elem, AlgebraElement, AlgebraModel, Element, FunctionModel,
    PrimLabel, Representation, ToeplitzElement,
};

/// Relative tolerance for norm attainment and annihilation.
pub const ATTAIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct RepFamily {
    model: AlgebraModel,
    members: Vec<Representation>,
    label: String,
}

impl RepFamily {
    pub fn new(model: AlgebraModel, members: Vec<Representation>, label: impl Into<String>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidInput("a representation family must be nonempty".into()));
        }
        for m in &members {
            m.validate(&model)?;
        }
        Ok(Self {
            model,
            members,
            label: label.into(),
        })
    }

    /// Point evaluations at every grid point not in `exclude`, plus `extra`.
    pub fn eval_grid(
        model: &Arc<FunctionModel>,
        exclude: &[f64],
        extra: Vec<Representation>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let base = model.base();
        let mut members: Vec<Representation> = base
            .grid()
            .iter()
            .filter(|&&t| !exclude.iter().any(|&x| base.distance(t, x) <= crate::model::PARAM_EPS))
            .map(|&at| Representation::EvalPoint { at })
            .collect();
        members.extend(extra);
        Self::new(AlgebraModel::Function(Arc::clone(model)), members, label)
    }

    /// One irreducible representation per enumerated primitive point.
    pub fn full(model: &AlgebraModel, label: impl Into<String>) -> Result<Self> {
        let members = enum_prim(model).iter().map(|p| p.label.representation()).collect();
        Self::new(model.clone(), members, label)
    }

    pub fn toeplitz_pi(model: &AlgebraModel) -> Result<Self> {
        Self::new(model.clone(), vec![Representation::ToeplitzIdentity], "toeplitz-pi")
    }

    /// The sampled characters of the quotient `C(S¹)`.
    pub fn toeplitz_characters(model: &AlgebraModel) -> Result<Self> {
        match model {
            AlgebraModel::Toeplitz(t) => {
                let members = t
                    .thetas()
                    .iter()
                    .map(|&theta| Representation::ToeplitzCharacter { theta })
                    .collect();
                Self::new(model.clone(), members, "toeplitz-characters")
            }
            _ => Err(Error::UnsupportedModel("characters exist only on the Toeplitz model".into())),
        }
    }

    pub fn model(&self) -> &AlgebraModel {
        &self.model
    }

    pub fn members(&self) -> &[Representation] {
        &self.members
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Union of member supports.
    pub fn covered(&self) -> Result<Vec<PrimLabel>> {
        let mut out: Vec<PrimLabel> = Vec::new();
        for m in &self.members {
            for l in m.support(&self.model)? {
                if !out.iter().any(|o| o.same_as(&l)) {
                    out.push(l);
                }
            }
        }
        Ok(out)
    }

    /// `‖φ(a)‖` for every member, in member order.
    fn member_norms(&self, a: &Element) -> Result<Vec<f64>> {
        self.model.check_element(a)?;
        self.members.par_iter().map(|m| m.image_norm(a)).collect()
    }
}

/// A named element used to certify a family.
#[derive(Debug, Clone)]
pub struct Probe {
    pub label: String,
    pub element: Element,
}

impl Probe {
    pub fn new(label: impl Into<String>, element: impl Into<Element>) -> Self {
        Self {
            label: label.into(),
            element: element.into(),
        }
    }
}

/// Outcome of one classification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    /// Identifier of the failing probe or uncovered point.
    pub witness: Option<String>,
    pub detail: String,
}

impl Verdict {
    fn pass(detail: impl Into<String>) -> Self {
        Self {
            holds: true,
            witness: None,
            detail: detail.into(),
        }
    }

    fn fail(witness: impl Into<String>, detail: impl Into<String>) -> Self {
        Self {
            holds: false,
            witness: Some(witness.into()),
            detail: detail.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub attain_rel: f64,
    pub resolution: f64,
    pub grid_step: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub label: String,
    pub members: usize,
    pub faithful: Verdict,
    pub exhausting: Verdict,
    pub full: Verdict,
    pub probes_used: usize,
    pub tolerances: Tolerances,
}

/// Every enumerated primitive point lies in some member's support.
pub fn check_full(family: &RepFamily) -> Result<Verdict> {
    let covered = family.covered()?;
    let prim = enum_prim(&family.model);
    let total = prim.len();
    let hit = prim
        .iter()
        .filter(|p| covered.iter().any(|c| c.same_as(&p.label)))
        .count();
    match prim.iter().find(|p| !covered.iter().any(|c| c.same_as(&p.label))) {
        None => Ok(Verdict::pass(format!("supports cover all {total} primitive points"))),
        Some(p) => Ok(Verdict::fail(
            p.label.to_string(),
            format!("supports cover {hit} of {total} primitive points"),
        )),
    }
}

/// For every probe, `max_φ ‖φ(a)‖` attains `‖a‖`. A certificate over the
/// probe set, not a proof over the whole algebra.
pub fn check_exhausting(family: &RepFamily, probes: &[Probe]) -> Result<Verdict> {
    if probes.is_empty() {
        return Err(Error::InvalidInput("exhausting check needs at least one probe".into()));
    }
    for p in probes {
        let norm = p.element.norm();
        let sup = family.member_norms(&p.element)?.into_iter().fold(0.0, f64::max);
        if sup < norm - ATTAIN_TOL * norm.max(1.0) {
            return Ok(Verdict::fail(
                p.label.clone(),
                format!("max over family {sup:.12} does not attain norm {norm:.12}"),
            ));
        }
    }
    Ok(Verdict::pass(format!("norm attained on all {} probes", probes.len())))
}

/// No nonzero probe is annihilated by every member, and the member supports
/// are dense in the primitive spectrum at grid resolution.
pub fn check_faithful(family: &RepFamily, probes: &[Probe]) -> Result<Verdict> {
    for p in probes {
        let norm = p.element.norm();
        if norm <= ATTAIN_TOL {
            continue;
        }
        let sup = family.member_norms(&p.element)?.into_iter().fold(0.0, f64::max);
        if sup <= ATTAIN_TOL * norm.max(1.0) {
            return Ok(Verdict::fail(
                p.label.clone(),
                format!("nonzero probe (norm {norm:.6}) annihilated by every member"),
            ));
        }
    }
    if let Some(gap) = density_gap(family)? {
        return Ok(Verdict::fail(gap.to_string(), "no member support within grid resolution"));
    }
    Ok(Verdict::pass(format!(
        "no probe annihilated ({} probes); supports dense at resolution {}",
        probes.len(),
        family.model.resolution_step()
    )))
}

/// First primitive point that is neither covered nor approximated.
///
/// On continuous bases a covered unconstrained point evaluation approximates
/// everything within one grid step (block points at constrained parameters
/// are limits of nearby generic evaluations). On the Toeplitz model the
/// closure hints apply, and characters approximate characters within the
/// sampling gap.
fn density_gap(family: &RepFamily) -> Result<Option<PrimLabel>> {
    let covered = family.covered()?;
    let prim = enum_prim(&family.model);
    for p in &prim {
        if covered.iter().any(|c| c.same_as(&p.label)) {
            continue;
        }
        let approximated = match &family.model {
            AlgebraModel::Function(m) => {
                let base = m.base();
                base.is_continuous()
                    && covered.iter().any(|c| match c {
                        PrimLabel::Point { at } => {
                            base.distance(*at, p.label.parameter().expect("function-model label"))
                                <= base.grid_step() + crate::model::PARAM_EPS
                        }
                        _ => false,
                    })
            }
            AlgebraModel::Toeplitz(t) => {
                let in_closure = prim
                    .iter()
                    .filter(|q| covered.iter().any(|c| c.same_as(&q.label)))
                    .any(|q| q.closure_hint.iter().any(|h| h.same_as(&p.label)));
                let near_char = match p.label {
                    PrimLabel::ToeplitzChar { theta } => covered.iter().any(|c| match c {
                        PrimLabel::ToeplitzChar { theta: other } => {
                            let d = (theta - other).rem_euclid(2.0 * std::f64::consts::PI);
                            d.min(2.0 * std::f64::consts::PI - d) <= t.theta_gap() + crate::model::PARAM_EPS
                        }
                        _ => false,
                    }),
                    _ => false,
                };
                in_closure || near_char
            }
        };
        if !approximated {
            return Ok(Some(p.label));
        }
    }
    Ok(None)
}

/// Probes for the faithfulness check: the queried elements, their norm
/// defects, the identity, and the compact generator on the Toeplitz model.
pub fn faithful_probes(model: &AlgebraModel, user: &[Probe]) -> Result<Vec<Probe>> {
    let mut out = Vec::with_capacity(2 * user.len() + 2);
    for p in user {
        model.check_element(&p.element)?;
        out.push(p.clone());
    }
    for p in user {
        out.push(Probe {
            label: format!("defect[{}]", p.label),
            element: p.element.norm_defect_element()?,
        });
    }
    out.push(Probe {
        label: "identity".into(),
        element: model.identity(),
    });
    if let AlgebraModel::Toeplitz(_) = model {
        out.push(Probe::new(
            "compact[E00]",
            ToeplitzElement::compact(ComplexMatrix::scalar(Complex64::new(1.0, 0.0))),
        ));
    }
    Ok(out)
}

/// Faithful probes plus one element localized at each primitive point.
pub fn exhausting_probes(model: &AlgebraModel, user: &[Probe]) -> Result<Vec<Probe>> {
    let mut out = faithful_probes(model, user)?;
    if let AlgebraModel::Function(m) = model {
        for p in enum_prim(model) {
            out.push(Probe {
                label: format!("hat[{}]", p.label),
                element: Element::Function(hat_element(m, &p.label)?),
            });
        }
    }
    Ok(out)
}

/// Piecewise-linear bump equal to the identity (or a block projector) at the
/// point and zero at every other grid point.
fn hat_element(model: &Arc<FunctionModel>, label: &PrimLabel) -> Result<AlgebraElement> {
    let d = model.fiber_dim();
    let (at, proj) = match *label {
        PrimLabel::Point { at } => (at, ComplexMatrix::identity(d)),
        PrimLabel::Block { at, block } => {
            let blocks = model
                .blocks()
                .blocks_at(at)
                .ok_or_else(|| Error::IncompatibleModel(format!("{label}: no constraint here")))?;
            let r = &blocks[block];
            let mut p = ComplexMatrix::zeros(d);
            for i in r.clone() {
                p[(i, i)] = Complex64::new(1.0, 0.0);
            }
            (at, p)
        }
        _ => return Err(Error::IncompatibleModel("hat elements live on function models".into())),
    };
    let base = model.base();
    let idx = base
        .grid_index(at)
        .ok_or_else(|| Error::IncompatibleModel(format!("{label} is not a grid point")))?;
    let zero = ComplexMatrix::zeros(d);
    let values = (0..base.grid().len())
        .map(|j| if j == idx { proj.clone() } else { zero.clone() })
        .collect();
    AlgebraElement::from_samples(model, base.grid().to_vec(), values)
}

/// Classifies a family against the probe galleries built from `user`.
pub fn family_report(family: &RepFamily, user: &[Probe]) -> Result<FamilyReport> {
    let fp = faithful_probes(&family.model, user)?;
    let ep = exhausting_probes(&family.model, user)?;
    let full = check_full(family)?;
    let exhausting = check_exhausting(family, &ep)?;
    let faithful = check_faithful(family, &fp)?;
    Ok(FamilyReport {
        label: family.label.clone(),
        members: family.members.len(),
        faithful,
        exhausting,
        full,
        probes_used: ep.len(),
        tolerances: Tolerances {
            attain_rel: ATTAIN_TOL,
            resolution: DEFAULT_TOL,
            grid_step: family.model.resolution_step(),
        },
    })
}

/// `sup_{φ∈F} ‖φ(a)‖`.
pub fn norm_via_family(family: &RepFamily, a: &Element) -> Result<f64> {
    Ok(family.member_norms(a)?.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberImage {
    pub member: String,
    #[serde(with = "crate::serde_float")]
    pub min_singular: f64,
    #[serde(with = "crate::serde_float")]
    pub inverse_norm: f64,
    pub invertible: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemberInvertibility {
    pub all_invertible: bool,
    #[serde(with = "crate::serde_float")]
    pub max_inverse_norm: f64,
    pub threshold: f64,
    pub worst_member: Option<String>,
    pub images: Vec<MemberImage>,
}

/// Invertibility of each member image, with no certification of the family.
/// Member images are exact matrices, so the threshold is the resolution.
pub fn members_invertible(family: &RepFamily, a: &Element) -> Result<MemberInvertibility> {
    family.model.check_element(a)?;
    let threshold = DEFAULT_TOL;
    let images: Vec<MemberImage> = family
        .members
        .par_iter()
        .map(|m| {
            let img = m.apply(a, None)?;
            let s = min_singular_value(&img)?;
            let scale = img.max_abs().max(1.0);
            let invertible = s > threshold * scale;
            Ok(MemberImage {
                member: m.to_string(),
                min_singular: s,
                inverse_norm: if s > 0.0 { 1.0 / s } else { f64::INFINITY },
                invertible,
            })
        })
        .collect::<Result<_>>()?;
    let all_invertible = images.iter().all(|i| i.invertible);
    let worst = images
        .iter()
        .max_by(|a, b| a.inverse_norm.total_cmp(&b.inverse_norm))
        .map(|i| (i.member.clone(), i.inverse_norm));
    Ok(MemberInvertibility {
        all_invertible,
        max_inverse_norm: worst.as_ref().map(|w| w.1).unwrap_or(0.0),
        threshold,
        worst_member: worst.map(|w| w.0),
        images,
    })
}

/// Invertibility decided by an exhausting family. The family is certified
/// against probes that include `‖a‖² − a*a`; `NotCertified` otherwise.
pub fn invertible_via_exhausting(family: &RepFamily, a: &Element) -> Result<bool> {
    let probes = exhausting_probes(&family.model, &[Probe {
        label: "a".into(),
        element: a.clone(),
    }])?;
    let cert = check_exhausting(family, &probes)?;
    if !cert.holds {
        return Err(Error::NotCertified(format!(
            "family '{}' is not exhausting (witness {})",
            family.label,
            cert.witness.unwrap_or_default()
        )));
    }
    Ok(members_invertible(family, a)?.all_invertible)
}

/// Invertibility decided by a faithful family with a uniform bound on the
/// inverse norms of the member images.
pub fn invertible_via_faithful(family: &RepFamily, a: &Element, bound: f64) -> Result<bool> {
    if !(bound > 0.0) {
        return Err(Error::InvalidInput("inverse-norm bound must be positive".into()));
    }
    let probes = faithful_probes(&family.model, &[Probe {
        label: "a".into(),
        element: a.clone(),
    }])?;
    let cert = check_faithful(family, &probes)?;
    if !cert.holds {
        return Err(Error::NotCertified(format!(
            "family '{}' is not faithful (witness {})",
            family.label,
            cert.witness.unwrap_or_default()
        )));
    }
    let inv = members_invertible(family, a)?;
    Ok(inv.all_invertible && inv.max_inverse_norm <= bound)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirectInvertibility {
    pub invertible: bool,
    #[serde(with = "crate::serde_float")]
    pub min_singular: f64,
    pub threshold: f64,
}

/// Invertibility of a function-model element from its own values: the
/// smallest singular value over all breakpoints must exceed
/// `max(resolution, lipschitz·grid_step)`.
pub fn direct_invertibility(a: &AlgebraElement) -> Result<DirectInvertibility> {
    let min_singular = a
        .values()
        .iter()
        .map(min_singular_value)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let threshold = DEFAULT_TOL.max(a.lipschitz_bound() * a.model().base().grid_step());
    Ok(DirectInvertibility {
        invertible: min_singular > threshold,
        min_singular,
        threshold,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralContract {
    /// The family is exhausting: the union is the spectrum.
    Equality,
    /// The family is only faithful: the union is dense in the spectrum.
    ClosureDense,
    /// Neither certificate holds; the union is only a subset.
    Subset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralUnion {
    pub spectrum: SpectrumSet,
    pub contract: SpectralContract,
}

/// `∪_{φ∈F} Spec(φ(a))` for normal `a`, with the contract that applies.
pub fn spectrum_union(family: &RepFamily, a: &Element) -> Result<SpectralUnion> {
    family.model.check_element(a)?;
    let spectra: Vec<SpectrumSet> = family
        .members
        .par_iter()
        .map(|m| {
            let s = eig_normal(&m.apply(a, None)?, DEFAULT_TOL)?;
            Ok(s.with_truncated(matches!(m, Representation::ToeplitzIdentity)))
        })
        .collect::<Result<_>>()?;
    let spectrum = SpectrumSet::union_all(&spectra, DEFAULT_TOL);
    let user = [Probe {
        label: "a".into(),
        element: a.clone(),
    }];
    let contract = if check_exhausting(family, &exhausting_probes(&family.model, &user)?)?.holds {
        SpectralContract::Equality
    } else if check_faithful(family, &faithful_probes(&family.model, &user)?)?.holds {
        SpectralContract::ClosureDense
    } else {
        SpectralContract::Subset
    };
    Ok(SpectralUnion { spectrum, contract })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FredholmReport {
    pub fredholm: bool,
    /// False when the sampled symbol is small but not certifiably zero.
    pub certified: bool,
    #[serde(with = "crate::serde_float")]
    pub min_symbol_modulus: f64,
    /// `1 / min |symbol|` over the sampled characters.
    #[serde(with = "crate::serde_float")]
    pub inverse_bound: f64,
    pub symbol_lipschitz: f64,
    pub max_gap: f64,
}

/// Fredholmness of a Toeplitz element through characters of the quotient.
///
/// The sampled characters must be uniformly invertible; the Lipschitz bound
/// of the symbol turns the samples into a certified lower bound
/// `min |p(θ_j)| − L·gap/2` on the whole circle.
pub fn fredholm_via_family(quotient: &RepFamily, x: &Element) -> Result<FredholmReport> {
    if !matches!(quotient.model, AlgebraModel::Toeplitz(_)) {
        return Err(Error::UnsupportedModel(
            "Fredholm checks need a model with a quotient family (Toeplitz)".into(),
        ));
    }
    quotient.model.check_element(x)?;
    let x = toeplitz_elem(x).expect("checked above");
    let mut thetas = Vec::with_capacity(quotient.members.len());
    for m in &quotient.members {
        match m {
            Representation::ToeplitzCharacter { theta } => thetas.push(*theta),
            other => {
                return Err(Error::IncompatibleModel(format!(
                    "quotient family may only contain characters, found {other}"
                )))
            }
        }
    }
    let min_mod = thetas
        .iter()
        .map(|&t| x.symbol().eval(t).norm())
        .fold(f64::INFINITY, f64::min);
    let gap = max_circle_gap(&thetas);
    let lip = x.symbol().lipschitz();
    let lower = min_mod - lip * gap / 2.0;
    let fredholm = lower > DEFAULT_TOL;
    Ok(FredholmReport {
        fredholm,
        certified: fredholm || min_mod <= DEFAULT_TOL,
        min_symbol_modulus: min_mod,
        inverse_bound: if min_mod > 0.0 { 1.0 / min_mod } else { f64::INFINITY },
        symbol_lipschitz: lip,
        max_gap: gap,
    })
}

/// For a probe annihilated by every member, `c = ‖a‖² − a*a` has scalar,
/// uniformly invertible member images `‖a‖²·1` while being non-invertible.
/// Returns `None` when `a` is not annihilated.
pub fn converse_counterexample(family: &RepFamily, a: &Element) -> Result<Option<Element>> {
    let norm = a.norm();
    if norm <= ATTAIN_TOL {
        return Ok(None);
    }
    let sup = norm_via_family(family, a)?;
    if sup > ATTAIN_TOL * norm.max(1.0) {
        return Ok(None);
    }
    Ok(Some(a.norm_defect_element()?))
}

/// Elementwise norm of a function-model element, re-exported for reports.
pub fn element_norm_estimate(a: &AlgebraElement) -> crate::model::NormEstimate {
    elem_norm(a)
}
