//! Running scenarios and the JSON report they produce.

use std::time::Instant;

use repfam::affiliated::{
    invertible_observable, spec_union_observable, Certificate, InvertibilityMode, ObservableFamily,
    ObservableInvertibility,
};
use repfam::families::{
    direct_invertibility, family_report, fredholm_via_family, invertible_via_exhausting, invertible_via_faithful,
    members_invertible, norm_via_family, spectrum_union, DirectInvertibility, FamilyReport, FredholmReport,
    MemberInvertibility, Probe, RepFamily, SpectralContract,
};
use repfam::linalg::SpectrumSet;
use repfam::model::{elem_norm, toeplitz_norm, AlgebraModel, Element};
use repfam::parametric::{
    fibered_observable, invertible_parametric, spectrum_parametric, symbol_restriction_check, BaseManifold,
    InvariantOperator, LambdaGrid, ParametricInvertibility, RestrictionCheck,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::scenario::{
    build_element, build_family, build_model, build_observable, build_operator, BuiltModel, CertificateSpec,
    QueryKind, QuerySpec, Scenario,
};

pub const REPORT_FORMAT: &str = "repfam-report/1";

/// Default `|λ|`-share below which directions are left to the fiber check.
pub const DEFAULT_DELTA_DIR: f64 = 0.1;
/// Default lower bound for the principal symbol on sampled directions.
pub const DEFAULT_DELTA_SYM: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub format: String,
    pub version: String,
    pub scenario: String,
    pub model: ModelSummary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySummary>,
    pub queries: Vec<QueryReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSummary {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub label: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub id: String,
    pub result: QueryResult,
}

/// An answer that exists only when the family carries the needed certificate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedAnswer {
    pub certified: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

impl CertifiedAnswer {
    fn from_result(r: repfam::Result<bool>) -> Result<Self, CliError> {
        match r {
            Ok(v) => Ok(Self {
                certified: true,
                value: Some(v),
                reason: None,
            }),
            Err(repfam::Error::NotCertified(msg)) => Ok(Self {
                certified: false,
                value: None,
                reason: Some(msg),
            }),
            Err(e) => Err(e.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundedAnswer {
    pub bound: f64,
    pub answer: CertifiedAnswer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum QueryResult {
    Norm {
        element: String,
        norm: f64,
        /// Sampling error bar (function models) or last section increment (Toeplitz).
        error_bar: f64,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        sections: Vec<(usize, f64)>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        family_norm: Option<f64>,
    },
    Invertible {
        element: String,
        members: MemberInvertibility,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direct: Option<DirectInvertibility>,
        via_exhausting: CertifiedAnswer,
        via_faithful: Vec<BoundedAnswer>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        note: Option<String>,
    },
    Fredholm {
        element: String,
        report: FredholmReport,
    },
    Spectrum {
        element: String,
        contract: SpectralContract,
        spectrum: SpectrumSet,
    },
    FamilyReport {
        report: FamilyReport,
    },
    ParametricSpectrum {
        operator: String,
        window: f64,
        step: f64,
        nodes: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff: Option<usize>,
        spectrum: SpectrumSet,
    },
    ParametricInvertible {
        operator: String,
        window: f64,
        step: f64,
        report: ParametricInvertibility,
    },
    SymbolRestriction {
        operator: String,
        report: RestrictionCheck,
    },
    ObservableSpectrum {
        family: String,
        contract: String,
        degenerate: bool,
        spectrum: SpectrumSet,
    },
    ObservableInvertible {
        family: String,
        mode: InvertibilityMode,
        report: ObservableInvertibility,
    },
}

impl QueryResult {
    /// The spectrum carried by the result, if any.
    pub fn spectrum(&self) -> Option<&SpectrumSet> {
        match self {
            Self::Spectrum { spectrum, .. }
            | Self::ParametricSpectrum { spectrum, .. }
            | Self::ObservableSpectrum { spectrum, .. } => Some(spectrum),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    pub timing: bool,
}

struct Context<'a> {
    scenario: &'a Scenario,
    model: BuiltModel,
    family: Option<RepFamily>,
}

impl Context<'_> {
    fn element(&self, name: &str) -> Result<Element, CliError> {
        let spec = self
            .scenario
            .elements
            .get(name)
            .ok_or_else(|| CliError::Parse(format!("unknown element '{name}'")))?;
        build_element(&self.model, name, spec)
    }

    fn operator(&self, name: &str) -> Result<InvariantOperator, CliError> {
        let spec = self
            .scenario
            .operators
            .get(name)
            .ok_or_else(|| CliError::Parse(format!("unknown operator '{name}'")))?;
        build_operator(&self.model, name, spec)
    }

    fn family(&self, q: &QuerySpec) -> Result<&RepFamily, CliError> {
        self.family
            .as_ref()
            .ok_or_else(|| CliError::IncompatibleQuery(format!("query '{}' needs a family", q.id)))
    }

    fn grid(&self, q: &QuerySpec, op: &InvariantOperator) -> Result<LambdaGrid, CliError> {
        let window = q.positive("window", q.window)?;
        let step = q.positive("step", q.step)?;
        Ok(LambdaGrid::new(op.n, window, step)?)
    }
}

fn summarize_model(model: &BuiltModel) -> ModelSummary {
    let mut s = ModelSummary {
        kind: model.name().to_string(),
        grid_points: None,
        grid_step: None,
        fiber_dim: None,
        cutoff: None,
        n: None,
    };
    match model {
        BuiltModel::Algebra(AlgebraModel::Function(m)) => {
            s.grid_points = Some(m.base().grid().len());
            s.grid_step = Some(m.base().grid_step());
            s.fiber_dim = Some(m.fiber_dim());
        }
        BuiltModel::Algebra(AlgebraModel::Toeplitz(t)) => {
            s.grid_points = Some(t.thetas().len());
            s.grid_step = Some(t.theta_gap());
        }
        BuiltModel::Parametric { base, n } => {
            s.n = Some(*n);
            match base {
                BaseManifold::CircleFourier { cutoff } => s.cutoff = Some(*cutoff),
                BaseManifold::Graph { adjacency } => s.grid_points = Some(adjacency.len()),
            }
        }
    }
    s
}

fn run_query(ctx: &Context, q: &QuerySpec) -> Result<QueryResult, CliError> {
    Ok(match q.kind {
        QueryKind::Norm => {
            let name = q.require_element()?;
            let a = ctx.element(name)?;
            let (norm, error_bar, sections) = match &a {
                Element::Function(f) => {
                    let e = elem_norm(f);
                    (e.value, e.error_bar, Vec::new())
                }
                Element::Toeplitz(x) => {
                    let n = toeplitz_norm(x);
                    (n.value, n.last_increment, n.sections)
                }
            };
            let family_norm = ctx.family.as_ref().map(|f| norm_via_family(f, &a)).transpose()?;
            QueryResult::Norm {
                element: name.into(),
                norm,
                error_bar,
                sections,
                family_norm,
            }
        }
        QueryKind::Invertible => {
            let name = q.require_element()?;
            let a = ctx.element(name)?;
            let fam = ctx.family(q)?;
            let members = members_invertible(fam, &a)?;
            let direct = match &a {
                Element::Function(f) => Some(direct_invertibility(f)?),
                Element::Toeplitz(_) => None,
            };
            let via_exhausting = CertifiedAnswer::from_result(invertible_via_exhausting(fam, &a))?;
            let via_faithful = q
                .bounds
                .iter()
                .map(|&bound| {
                    Ok(BoundedAnswer {
                        bound,
                        answer: CertifiedAnswer::from_result(invertible_via_faithful(fam, &a, bound))?,
                    })
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            let note = match &direct {
                Some(d) if members.all_invertible && !d.invertible => Some(format!(
                    "every member image is invertible but the element is not: member inverse norms reach {:.6e} \
                     (at {}) and are unbounded as the grid refines",
                    members.max_inverse_norm,
                    members.worst_member.clone().unwrap_or_default()
                )),
                _ => None,
            };
            QueryResult::Invertible {
                element: name.into(),
                members,
                direct,
                via_exhausting,
                via_faithful,
                note,
            }
        }
        QueryKind::Fredholm => {
            let name = q.require_element()?;
            let a = ctx.element(name)?;
            let algebra = ctx.model.algebra().ok_or_else(|| {
                CliError::UnsupportedModel("Fredholm checks need the Toeplitz model".into())
            })?;
            let quotient = RepFamily::toeplitz_characters(algebra)?;
            QueryResult::Fredholm {
                element: name.into(),
                report: fredholm_via_family(&quotient, &a)?,
            }
        }
        QueryKind::Spectrum => {
            let name = q.require_element()?;
            let a = ctx.element(name)?;
            let u = spectrum_union(ctx.family(q)?, &a)?;
            QueryResult::Spectrum {
                element: name.into(),
                contract: u.contract,
                spectrum: u.spectrum,
            }
        }
        QueryKind::FamilyReport => {
            let fam = ctx.family(q)?;
            let probes = q
                .probes
                .iter()
                .map(|p| Ok(Probe::new(p.clone(), ctx.element(p)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            QueryResult::FamilyReport {
                report: family_report(fam, &probes)?,
            }
        }
        QueryKind::ParametricSpectrum => {
            let name = q.require_operator()?;
            let op = ctx.operator(name)?;
            let grid = ctx.grid(q, &op)?;
            QueryResult::ParametricSpectrum {
                operator: name.into(),
                window: grid.window,
                step: grid.step,
                nodes: grid.nodes().len(),
                cutoff: match op.base {
                    BaseManifold::CircleFourier { cutoff } => Some(cutoff),
                    BaseManifold::Graph { .. } => None,
                },
                spectrum: spectrum_parametric(&op, &grid)?,
            }
        }
        QueryKind::ParametricInvertible => {
            let name = q.require_operator()?;
            let op = ctx.operator(name)?;
            let grid = ctx.grid(q, &op)?;
            let report = invertible_parametric(
                &op,
                &grid,
                q.delta_dir.unwrap_or(DEFAULT_DELTA_DIR),
                q.delta_sym.unwrap_or(DEFAULT_DELTA_SYM),
            )?;
            QueryResult::ParametricInvertible {
                operator: name.into(),
                window: grid.window,
                step: grid.step,
                report,
            }
        }
        QueryKind::SymbolRestriction => {
            let name = q.require_operator()?;
            let op = ctx.operator(name)?;
            QueryResult::SymbolRestriction {
                operator: name.into(),
                report: symbol_restriction_check(&op)?,
            }
        }
        QueryKind::ObservableSpectrum => {
            let fam = observable_family(ctx, q)?;
            let u = spec_union_observable(&fam)?;
            QueryResult::ObservableSpectrum {
                family: fam.label.clone(),
                contract: u.contract_label().to_string(),
                degenerate: u.degenerate,
                spectrum: u.spectrum,
            }
        }
        QueryKind::ObservableInvertible => {
            let fam = observable_family(ctx, q)?;
            let mode = match q.bound {
                Some(bound) => InvertibilityMode::Faithful { bound },
                None => InvertibilityMode::Exhausting,
            };
            QueryResult::ObservableInvertible {
                family: fam.label.clone(),
                mode,
                report: invertible_observable(&fam, mode)?,
            }
        }
    })
}

/// Pushed images of an element, the fibers of an operator, or literal members.
fn observable_family(ctx: &Context, q: &QuerySpec) -> Result<ObservableFamily, CliError> {
    if let Some(name) = &q.element {
        let a = ctx.element(name)?;
        return Ok(ObservableFamily::push_forward(ctx.family(q)?, &a)?);
    }
    if let Some(name) = &q.operator {
        let op = ctx.operator(name)?;
        let grid = ctx.grid(q, &op)?;
        // The fibers together with the principal-symbol points form an
        // exhausting family; the symbol points add nothing to the spectrum.
        return Ok(ObservableFamily::new(
            format!("fibers of {name}"),
            vec![fibered_observable(&op, &grid)?],
            Certificate::Exhausting,
        )?);
    }
    if q.members.is_empty() {
        return Err(CliError::Parse(format!(
            "query '{}' needs an 'element', an 'operator' or 'members'",
            q.id
        )));
    }
    let members = q
        .members
        .iter()
        .enumerate()
        .map(|(i, m)| build_observable(m, i))
        .collect::<Result<Vec<_>, _>>()?;
    let certificate = match q.certificate.unwrap_or(CertificateSpec::Uncertified) {
        CertificateSpec::Exhausting => Certificate::Exhausting,
        CertificateSpec::Faithful => Certificate::Faithful,
        CertificateSpec::Uncertified => Certificate::Uncertified,
    };
    Ok(ObservableFamily::new("members", members, certificate)?)
}

/// Executes the queries in order.
pub fn run_scenario(scenario: &Scenario, opts: RunOptions) -> Result<Report, CliError> {
    let start = Instant::now();
    let model = build_model(&scenario.model)?;
    let family = scenario.family.as_ref().map(|f| build_family(&model, f)).transpose()?;
    let ctx = Context {
        scenario,
        model,
        family,
    };
    let queries = scenario
        .queries
        .iter()
        .map(|q| {
            Ok(QueryReport {
                id: q.id.clone(),
                result: run_query(&ctx, q)?,
            })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(Report {
        format: REPORT_FORMAT.into(),
        version: env!("CARGO_PKG_VERSION").into(),
        scenario: scenario.name.clone(),
        model: summarize_model(&ctx.model),
        family: ctx.family.as_ref().map(|f| FamilySummary {
            label: f.label().to_string(),
            members: f.members().iter().map(|m| m.to_string()).collect(),
        }),
        queries,
        timing_ms: opts.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}

/// CSV with header `re,im,resolution,truncated`, one row per point in the
/// set's canonical (sorted) order.
pub fn spectrum_csv(s: &SpectrumSet) -> String {
    let mut out = String::from("re,im,resolution,truncated\n");
    for z in s.points() {
        out.push_str(&format!("{},{},{},{}\n", z.re, z.im, s.resolution(), s.truncated()));
    }
    out
}
