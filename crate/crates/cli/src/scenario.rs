//! Scenario files: a model, an optional representation family, named
//! elements and operators, and a list of queries.
//!
//! Scenarios are YAML documents whose first key must be
//! `format: repfam-scenario/1`. Matrix entries of function-model elements
//! are expressions in the base parameter `t`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use repfam::affiliated::Observable;
use repfam::families::RepFamily;
use repfam::linalg::ComplexMatrix;
use repfam::model::{
    AlgebraElement, AlgebraModel, BaseSpace, BlockStructure, Constraint, Element, FunctionModel, Representation,
    ToeplitzElement, ToeplitzModel, TrigPoly, DEFAULT_SECTIONS,
};
use repfam::parametric::{BaseManifold, Coupling, InvariantOperator, Monomial};
use serde::Deserialize;

use crate::error::CliError;

pub const FORMAT_TAG: &str = "repfam-scenario/1";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub format: String,
    pub name: String,
    #[serde(default)]
    pub description: Option<String>,
    pub model: ModelSpec,
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub elements: BTreeMap<String, ElementSpec>,
    #[serde(default)]
    pub operators: BTreeMap<String, OperatorSpec>,
    #[serde(default)]
    pub queries: Vec<QuerySpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub at: f64,
    #[serde(default)]
    pub diagonal: bool,
    #[serde(default)]
    pub blocks: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RefineSpec {
    pub toward: Vec<f64>,
    pub depth: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Discrete {
        points: usize,
        fiber_dim: usize,
        #[serde(default)]
        constraints: Vec<ConstraintSpec>,
    },
    Interval {
        intervals: usize,
        fiber_dim: usize,
        #[serde(default)]
        constraints: Vec<ConstraintSpec>,
        #[serde(default)]
        refine: Option<RefineSpec>,
    },
    Circle {
        points: usize,
        fiber_dim: usize,
        #[serde(default)]
        constraints: Vec<ConstraintSpec>,
    },
    Toeplitz {
        characters: usize,
    },
    Parametric {
        base: BaseManifold,
        n: usize,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Point evaluations on the grid, minus `exclude`, plus `extra`.
    EvGrid {
        #[serde(default)]
        exclude: Vec<f64>,
        #[serde(default)]
        extra: Vec<Representation>,
    },
    Full,
    ToeplitzPi,
    ToeplitzCharacters,
    Members {
        members: Vec<Representation>,
    },
}

/// A matrix entry: a number, an expression, or a complex pair of either.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Expr(String),
    Complex { re: Box<Entry>, im: Box<Entry> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub k: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ElementSpec {
    /// Matrix-valued function sampled on the grid.
    Function { matrix: Vec<Vec<Entry>> },
    /// Scalar function times the identity.
    Scalar { value: Entry },
    /// `T(symbol) + correction`.
    Toeplitz {
        symbol: Vec<TermSpec>,
        #[serde(default)]
        correction: Option<Vec<Vec<Entry>>>,
        #[serde(default)]
        sections: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonomialSpec {
    #[serde(default)]
    pub k: u32,
    #[serde(default)]
    pub lambda: Vec<u32>,
    pub coeff: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub shift: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
    #[serde(default)]
    pub k: u32,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub symbol: Vec<MonomialSpec>,
    #[serde(default)]
    pub couplings: Vec<CouplingSpec>,
    /// Source Sobolev index; defaults to the order.
    #[serde(default)]
    pub sobolev: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QueryKind {
    Norm,
    Invertible,
    Fredholm,
    Spectrum,
    FamilyReport,
    ParametricSpectrum,
    ParametricInvertible,
    SymbolRestriction,
    ObservableSpectrum,
    ObservableInvertible,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObservableSpec {
    Bounded { matrix: Vec<Vec<Entry>> },
    Infinite,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CertificateSpec {
    Exhausting,
    Faithful,
    Uncertified,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuerySpec {
    pub id: String,
    pub kind: QueryKind,
    #[serde(default)]
    pub element: Option<String>,
    #[serde(default)]
    pub operator: Option<String>,
    #[serde(default)]
    pub probes: Vec<String>,
    #[serde(default)]
    pub bounds: Vec<f64>,
    #[serde(default)]
    pub window: Option<f64>,
    #[serde(default)]
    pub step: Option<f64>,
    #[serde(default)]
    pub delta_dir: Option<f64>,
    #[serde(default)]
    pub delta_sym: Option<f64>,
    #[serde(default)]
    pub members: Vec<ObservableSpec>,
    #[serde(default)]
    pub certificate: Option<CertificateSpec>,
    #[serde(default)]
    pub bound: Option<f64>,
}

impl QuerySpec {
    pub fn require_element(&self) -> Result<&str, CliError> {
        self.element
            .as_deref()
            .ok_or_else(|| CliError::Parse(format!("query '{}' needs an 'element'", self.id)))
    }

    pub fn require_operator(&self) -> Result<&str, CliError> {
        self.operator
            .as_deref()
            .ok_or_else(|| CliError::Parse(format!("query '{}' needs an 'operator'", self.id)))
    }

    pub fn positive(&self, name: &str, value: Option<f64>) -> Result<f64, CliError> {
        match value {
            Some(v) if v > 0.0 && v.is_finite() => Ok(v),
            Some(v) => Err(CliError::Parse(format!("query '{}': {name} must be positive, got {v}", self.id))),
            None => Err(CliError::Parse(format!("query '{}' needs '{name}'", self.id))),
        }
    }
}

/// Parses a scenario, checking the format tag on the first key.
pub fn parse(text: &str) -> Result<Scenario, CliError> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#') && l != &"---");
    match first {
        Some(l) if l.starts_with("format:") => {}
        _ => {
            return Err(CliError::Parse(format!(
                "line 1: the first key must be 'format: {FORMAT_TAG}'"
            )))
        }
    }
    let scenario: Scenario = serde_yaml::from_str(text).map_err(|e| match e.location() {
        Some(loc) => CliError::Parse(format!("line {} column {}: {e}", loc.line(), loc.column())),
        None => CliError::Parse(e.to_string()),
    })?;
    if scenario.format != FORMAT_TAG {
        return Err(CliError::Parse(format!(
            "unsupported format '{}', expected '{FORMAT_TAG}'",
            scenario.format
        )));
    }
    let mut seen = std::collections::BTreeSet::new();
    for q in &scenario.queries {
        if !seen.insert(q.id.as_str()) {
            return Err(CliError::Parse(format!("duplicate query id '{}'", q.id)));
        }
    }
    Ok(scenario)
}

/// The model a scenario works in.
#[derive(Debug, Clone)]
pub enum BuiltModel {
    Algebra(AlgebraModel),
    Parametric { base: BaseManifold, n: usize },
}

impl BuiltModel {
    pub fn algebra(&self) -> Option<&AlgebraModel> {
        match self {
            Self::Algebra(a) => Some(a),
            Self::Parametric { .. } => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Algebra(a) => a.name(),
            Self::Parametric { .. } => "parametric",
        }
    }
}

fn constraints(specs: &[ConstraintSpec]) -> Result<Vec<Constraint>, CliError> {
    specs
        .iter()
        .map(|c| match (&c.blocks, c.diagonal) {
            (Some(_), true) => Err(CliError::Parse(format!(
                "constraint at {}: give either 'diagonal' or 'blocks', not both",
                c.at
            ))),
            (Some(b), false) => Ok(Constraint::blocks_at(c.at, b.clone())),
            (None, true) => Ok(Constraint::diagonal_at(c.at)),
            (None, false) => Err(CliError::Parse(format!("constraint at {} has no block structure", c.at))),
        })
        .collect()
}

fn function_model(base: BaseSpace, fiber_dim: usize, specs: &[ConstraintSpec]) -> Result<AlgebraModel, CliError> {
    let blocks = BlockStructure::new(fiber_dim, constraints(specs)?)?;
    Ok(AlgebraModel::Function(Arc::new(FunctionModel::new(base, blocks)?)))
}

pub fn build_model(spec: &ModelSpec) -> Result<BuiltModel, CliError> {
    Ok(match spec {
        ModelSpec::Discrete {
            points,
            fiber_dim,
            constraints,
        } => BuiltModel::Algebra(function_model(BaseSpace::discrete(*points)?, *fiber_dim, constraints)?),
        ModelSpec::Interval {
            intervals,
            fiber_dim,
            constraints,
            refine,
        } => {
            let mut base = BaseSpace::interval(*intervals)?;
            if let Some(r) = refine {
                base = base.refined_toward(&r.toward, r.depth)?;
            }
            BuiltModel::Algebra(function_model(base, *fiber_dim, constraints)?)
        }
        ModelSpec::Circle {
            points,
            fiber_dim,
            constraints,
        } => BuiltModel::Algebra(function_model(BaseSpace::circle(*points)?, *fiber_dim, constraints)?),
        ModelSpec::Toeplitz { characters } => {
            BuiltModel::Algebra(AlgebraModel::Toeplitz(Arc::new(ToeplitzModel::new(*characters)?)))
        }
        ModelSpec::Parametric { base, n } => BuiltModel::Parametric {
            base: base.clone(),
            n: *n,
        },
    })
}

pub fn build_family(model: &BuiltModel, spec: &FamilySpec) -> Result<RepFamily, CliError> {
    let algebra = model.algebra().ok_or_else(|| {
        CliError::IncompatibleQuery("representation families need an algebra model, not a parametric one".into())
    })?;
    Ok(match spec {
        FamilySpec::EvGrid { exclude, extra } => match algebra {
            AlgebraModel::Function(m) => {
                let mut label = "ev-grid".to_string();
                if !exclude.is_empty() {
                    let ex: Vec<String> = exclude.iter().map(|x| x.to_string()).collect();
                    label.push_str(&format!(" exclude {}", ex.join(",")));
                }
                if !extra.is_empty() {
                    let ex: Vec<String> = extra.iter().map(|x| x.to_string()).collect();
                    label.push_str(&format!(" + {}", ex.join(",")));
                }
                RepFamily::eval_grid(m, exclude, extra.clone(), label)?
            }
            AlgebraModel::Toeplitz(_) => {
                return Err(CliError::IncompatibleQuery("ev-grid families need a function model".into()))
            }
        },
        FamilySpec::Full => RepFamily::full(algebra, "full")?,
        FamilySpec::ToeplitzPi => RepFamily::toeplitz_pi(algebra)?,
        FamilySpec::ToeplitzCharacters => RepFamily::toeplitz_characters(algebra)?,
        FamilySpec::Members { members } => RepFamily::new(algebra.clone(), members.clone(), "members")?,
    })
}

fn eval_entry(e: &Entry, t: Option<f64>, ctx: &str) -> Result<Complex64, CliError> {
    match e {
        Entry::Number(x) => Ok(Complex64::new(*x, 0.0)),
        Entry::Expr(s) => {
            let expr: meval::Expr = s
                .parse()
                .map_err(|err| CliError::Parse(format!("{ctx}: cannot parse '{s}': {err}")))?;
            let mut c = meval::Context::new();
            if let Some(t) = t {
                c.var("t", t);
            }
            let v = expr
                .eval_with_context(c)
                .map_err(|err| CliError::Parse(format!("{ctx}: cannot evaluate '{s}': {err}")))?;
            if !v.is_finite() {
                return Err(CliError::Parse(format!("{ctx}: '{s}' is not finite at t = {t:?}")));
            }
            Ok(Complex64::new(v, 0.0))
        }
        Entry::Complex { re, im } => {
            let r = eval_entry(re, t, ctx)?;
            let i = eval_entry(im, t, ctx)?;
            Ok(r + Complex64::new(0.0, 1.0) * i)
        }
    }
}

pub fn eval_matrix(rows: &[Vec<Entry>], t: Option<f64>, ctx: &str) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<Complex64>> = rows
        .iter()
        .map(|r| r.iter().map(|e| eval_entry(e, t, ctx)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()?;
    Ok(ComplexMatrix::from_rows(&rows)?)
}

pub fn build_element(model: &BuiltModel, name: &str, spec: &ElementSpec) -> Result<Element, CliError> {
    let ctx = format!("element '{name}'");
    match (model.algebra(), spec) {
        (Some(AlgebraModel::Function(m)), ElementSpec::Function { matrix }) => {
            if matrix.len() != m.fiber_dim() {
                return Err(CliError::IncompatibleQuery(format!(
                    "{ctx} is {}×…, the model fiber is {}×{}",
                    matrix.len(),
                    m.fiber_dim(),
                    m.fiber_dim()
                )));
            }
            let values = m
                .base()
                .grid()
                .iter()
                .map(|&t| eval_matrix(matrix, Some(t), &ctx))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(AlgebraElement::from_samples(m, m.base().grid().to_vec(), values)?.into())
        }
        (Some(AlgebraModel::Function(m)), ElementSpec::Scalar { value }) => {
            let d = m.fiber_dim();
            let values = m
                .base()
                .grid()
                .iter()
                .map(|&t| Ok(ComplexMatrix::identity(d).scale(eval_entry(value, Some(t), &ctx)?)))
                .collect::<Result<Vec<_>, CliError>>()?;
            Ok(AlgebraElement::from_samples(m, m.base().grid().to_vec(), values)?.into())
        }
        (Some(AlgebraModel::Toeplitz(_)), ElementSpec::Toeplitz {
            symbol,
            correction,
            sections,
        }) => {
            let terms: Vec<(i64, Complex64)> = symbol.iter().map(|s| (s.k, Complex64::new(s.re, s.im))).collect();
            let correction = correction.as_ref().map(|c| eval_matrix(c, None, &ctx)).transpose()?;
            let sections = sections.clone().unwrap_or_else(|| DEFAULT_SECTIONS.to_vec());
            Ok(ToeplitzElement::new(TrigPoly::from_terms(&terms), correction, sections)?.into())
        }
        _ => Err(CliError::IncompatibleQuery(format!(
            "{ctx} does not fit the {} model",
            model.name()
        ))),
    }
}

pub fn build_operator(model: &BuiltModel, name: &str, spec: &OperatorSpec) -> Result<InvariantOperator, CliError> {
    let BuiltModel::Parametric { base, n } = model else {
        return Err(CliError::IncompatibleQuery(format!(
            "operator '{name}' needs a parametric model, not {}",
            model.name()
        )));
    };
    let symbol = spec
        .symbol
        .iter()
        .map(|m| {
            let lambda = if m.lambda.is_empty() { vec![0; *n] } else { m.lambda.clone() };
            Monomial::new(m.k, lambda, m.coeff)
        })
        .collect();
    let couplings = spec
        .couplings
        .iter()
        .map(|c| Coupling {
            shift: c.shift,
            coeff: Complex64::new(c.re, c.im),
            k_power: c.k,
        })
        .collect();
    let op = InvariantOperator::new(base.clone(), *n, symbol, couplings, spec.sobolev.unwrap_or(0.0))?;
    Ok(match spec.sobolev {
        Some(_) => op,
        None => InvariantOperator {
            sobolev: op.order as f64,
            ..op
        },
    })
}

pub fn build_observable(spec: &ObservableSpec, index: usize) -> Result<Observable, CliError> {
    let label = format!("member[{index}]");
    match spec {
        ObservableSpec::Bounded { matrix } => Ok(Observable::bounded(label.clone(), eval_matrix(matrix, None, &label)?)?),
        ObservableSpec::Infinite => Ok(Observable::infinite(label)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_tag_must_come_first() {
        let text = "name: x\nformat: repfam-scenario/1\nmodel: {kind: toeplitz, characters: 4}\n";
        assert!(matches!(parse(text), Err(CliError::Parse(_))));
        let text = "# comment\nformat: repfam-scenario/1\nname: x\nmodel: {kind: toeplitz, characters: 4}\n";
        assert!(parse(text).is_ok());
    }

    #[test]
    fn parse_errors_carry_location() {
        let text = "format: repfam-scenario/1\nname: x\nmodel:\n  kind: nowhere\n";
        match parse(text) {
            Err(CliError::Parse(msg)) => assert!(msg.starts_with("line "), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn expressions_are_evaluated_in_t() {
        let m = build_model(&ModelSpec::Interval {
            intervals: 4,
            fiber_dim: 2,
            constraints: vec![],
            refine: None,
        })
        .unwrap();
        let spec = ElementSpec::Function {
            matrix: vec![
                vec![Entry::Number(1.0), Entry::Expr("0".into())],
                vec![Entry::Expr("0".into()), Entry::Expr("1 - t".into())],
            ],
        };
        let Element::Function(f) = build_element(&m, "f", &spec).unwrap() else {
            unreachable!()
        };
        assert_eq!(f.eval(0.25).unwrap()[(1, 1)], Complex64::new(0.75, 0.0));
        let bad = ElementSpec::Scalar {
            value: Entry::Expr("t +* 2".into()),
        };
        assert!(matches!(build_element(&m, "g", &bad), Err(CliError::Parse(_))));
    }
}
