//! Translation-invariant operators on `M × Rⁿ` through their fibers.
//!
//! An invariant operator is determined by its fibers `T̂(λ)`, operators on a
//! truncated basis of `M` indexed by the frequency `λ ∈ Rⁿ`. `M` is either
//! the circle in a Fourier basis with modes `|k| ≤ K` or a finite graph.
//! Spectra are unions of fiber spectra over a λ-grid; invertibility needs
//! invertible fibers together with a principal symbol that does not vanish
//! on directions with nonzero λ-component.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::affiliated::{spec_observable, Observable};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, min_singular_value, ComplexMatrix, SpectrumSet, DEFAULT_TOL};

/// The compact factor `M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum BaseManifold {
    /// Fourier modes `k = −K..=K` on the circle; `D = −i d/dx` acts as `k`.
    CircleFourier { cutoff: usize },
    /// A finite graph; even powers `D²` act as the graph Laplacian.
    Graph { adjacency: Vec<Vec<f64>> },
}

impl BaseManifold {
    pub fn dim(&self) -> usize {
        match self {
            Self::CircleFourier { cutoff } => 2 * cutoff + 1,
            Self::Graph { adjacency } => adjacency.len(),
        }
    }

    /// The nonnegative operator `−Δ_M` on the truncated basis.
    pub fn laplacian(&self) -> ComplexMatrix {
        match self {
            Self::CircleFourier { cutoff } => {
                let k = *cutoff as i64;
                ComplexMatrix::real_diag(&(-k..=k).map(|j| (j * j) as f64).collect::<Vec<_>>())
            }
            Self::Graph { adjacency } => {
                let n = adjacency.len();
                let mut l = ComplexMatrix::zeros(n);
                for i in 0..n {
                    let deg: f64 = adjacency[i].iter().sum();
                    l[(i, i)] = Complex64::new(deg, 0.0);
                    for j in 0..n {
                        if i != j {
                            l[(i, j)] = Complex64::new(-adjacency[i][j], 0.0);
                        }
                    }
                }
                l
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Self::CircleFourier { .. } => Ok(()),
            Self::Graph { adjacency } => {
                let n = adjacency.len();
                if n == 0 || adjacency.iter().any(|r| r.len() != n) {
                    return Err(Error::InvalidInput("graph adjacency must be a nonempty square table".into()));
                }
                for i in 0..n {
                    for j in 0..n {
                        let w = adjacency[i][j];
                        if !w.is_finite() || w < 0.0 || w != adjacency[j][i] {
                            return Err(Error::InvalidInput(
                                "graph adjacency must be symmetric with nonnegative finite weights".into(),
                            ));
                        }
                    }
                }
                Ok(())
            }
        }
    }
}

/// `coeff · D^k_power · λ^lambda_powers`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub k_power: u32,
    pub lambda_powers: Vec<u32>,
    pub coeff: Complex64,
}

impl Monomial {
    pub fn new(k_power: u32, lambda_powers: Vec<u32>, coeff: f64) -> Self {
        Self {
            k_power,
            lambda_powers,
            coeff: Complex64::new(coeff, 0.0),
        }
    }

    pub fn degree(&self) -> u32 {
        self.k_power + self.lambda_powers.iter().sum::<u32>()
    }

    fn lambda_factor(&self, lambda: &[f64]) -> f64 {
        self.lambda_powers
            .iter()
            .zip(lambda)
            .map(|(&p, &l)| l.powi(p as i32))
            .product()
    }
}

/// A lower-order, `x`-dependent term `coeff · e^{i·shift·x} · D^k_power`,
/// mapping mode `k` to mode `k + shift`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub shift: i64,
    pub coeff: Complex64,
    pub k_power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantOperator {
    pub base: BaseManifold,
    /// Dimension of the `Rⁿ` factor.
    pub n: usize,
    pub symbol: Vec<Monomial>,
    pub couplings: Vec<Coupling>,
    pub order: u32,
    /// Source Sobolev index `s`; the operator maps `Hˢ → H^{s−m}`.
    pub sobolev: f64,
}

impl InvariantOperator {
    pub fn new(
        base: BaseManifold,
        n: usize,
        symbol: Vec<Monomial>,
        couplings: Vec<Coupling>,
        sobolev: f64,
    ) -> Result<Self> {
        base.validate()?;
        if n == 0 {
            return Err(Error::InvalidInput("the Rⁿ factor needs n ≥ 1".into()));
        }
        let symbol: Vec<Monomial> = symbol.into_iter().filter(|t| t.coeff != Complex64::new(0.0, 0.0)).collect();
        if symbol.is_empty() {
            return Err(Error::InvalidInput("symbol has no nonzero terms".into()));
        }
        for t in &symbol {
            if t.lambda_powers.len() != n {
                return Err(Error::InvalidInput(format!(
                    "monomial has {} λ-exponents, expected {n}",
                    t.lambda_powers.len()
                )));
            }
            if !t.coeff.re.is_finite() || !t.coeff.im.is_finite() {
                return Err(Error::InvalidInput("symbol coefficients must be finite".into()));
            }
            if matches!(base, BaseManifold::Graph { .. }) && t.k_power % 2 != 0 {
                return Err(Error::InvalidInput("graph bases only support even powers of D".into()));
            }
        }
        let order = symbol.iter().map(Monomial::degree).max().expect("nonempty");
        for c in &couplings {
            if matches!(base, BaseManifold::Graph { .. }) {
                return Err(Error::InvalidInput("mode couplings need a circle base".into()));
            }
            if c.k_power >= order && !(order == 0 && c.k_power == 0) {
                return Err(Error::InvalidInput(format!(
                    "coupling of order {} is not lower order than {order}",
                    c.k_power
                )));
            }
        }
        if !sobolev.is_finite() {
            return Err(Error::InvalidInput("Sobolev index must be finite".into()));
        }
        Ok(Self {
            base,
            n,
            symbol,
            couplings,
            order,
            sobolev,
        })
    }

    /// `c − Δ` on `S¹ × Rⁿ`.
    pub fn shifted_laplacian(cutoff: usize, n: usize, c: f64) -> Result<Self> {
        let mut symbol = vec![Monomial::new(2, vec![0; n], 1.0)];
        for i in 0..n {
            let mut p = vec![0; n];
            p[i] = 2;
            symbol.push(Monomial::new(0, p, 1.0));
        }
        if c != 0.0 {
            symbol.push(Monomial::new(0, vec![0; n], c));
        }
        Self::new(BaseManifold::CircleFourier { cutoff }, n, symbol, Vec::new(), 2.0)
    }

    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        match self.base {
            BaseManifold::CircleFourier { .. } => {
                let mut out = self.clone();
                out.base = BaseManifold::CircleFourier { cutoff };
                Ok(out)
            }
            BaseManifold::Graph { .. } => Err(Error::UnsupportedModel("graph bases have no mode cutoff".into())),
        }
    }

    pub fn principal_symbol(&self) -> PrincipalSymbol {
        PrincipalSymbol {
            n: self.n,
            order: self.order,
            terms: self.symbol.iter().filter(|t| t.degree() == self.order).cloned().collect(),
        }
    }

    /// Fibers at `0` and a generic frequency are Hermitian.
    pub fn is_formally_self_adjoint(&self) -> Result<bool> {
        let generic: Vec<f64> = (0..self.n).map(|i| 0.731 + 0.113 * i as f64).collect();
        Ok(self.fiber(&vec![0.0; self.n])?.is_hermitian(DEFAULT_TOL)
            && self.fiber(&generic)?.is_hermitian(DEFAULT_TOL))
    }

    fn check_lambda(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.n {
            return Err(Error::InvalidInput(format!(
                "frequency has {} components, expected {}",
                lambda.len(),
                self.n
            )));
        }
        if lambda.iter().any(|l| !l.is_finite()) {
            return Err(Error::InvalidInput("frequency must be finite".into()));
        }
        Ok(())
    }
}

/// Anything with fibers over `Rⁿ`.
pub trait FiberFamily: Sync {
    fn n(&self) -> usize;
    fn fiber(&self, lambda: &[f64]) -> Result<ComplexMatrix>;
}

impl FiberFamily for InvariantOperator {
    fn n(&self) -> usize {
        self.n
    }

    /// `T̂(λ)` on the truncated basis of `M`.
    fn fiber(&self, lambda: &[f64]) -> Result<ComplexMatrix> {
        self.check_lambda(lambda)?;
        match &self.base {
            BaseManifold::CircleFourier { cutoff } => {
                let k_max = *cutoff as i64;
                let dim = self.base.dim();
                let mut m = ComplexMatrix::zeros(dim);
                for (idx, k) in (-k_max..=k_max).enumerate() {
                    let kf = k as f64;
                    m[(idx, idx)] = self
                        .symbol
                        .iter()
                        .map(|t| t.coeff * kf.powi(t.k_power as i32) * t.lambda_factor(lambda))
                        .sum();
                }
                for c in &self.couplings {
                    if c.shift.unsigned_abs() as usize >= dim {
                        return Err(Error::CutoffTooSmall(format!(
                            "coupling shift {} exceeds the mode window [−{k_max}, {k_max}]",
                            c.shift
                        )));
                    }
                    for (idx, k) in (-k_max..=k_max).enumerate() {
                        let target = k + c.shift;
                        if target.abs() <= k_max {
                            let row = (target + k_max) as usize;
                            m[(row, idx)] += c.coeff * (k as f64).powi(c.k_power as i32);
                        }
                    }
                }
                Ok(m)
            }
            BaseManifold::Graph { .. } => {
                let lap = self.base.laplacian();
                let dim = lap.dim();
                let mut m = ComplexMatrix::zeros(dim);
                for t in &self.symbol {
                    let term = lap.pow(t.k_power / 2).scale(t.coeff * t.lambda_factor(lambda));
                    m = &m + &term;
                }
                Ok(m)
            }
        }
    }
}

/// `W^{(s−m)/2} P̂(λ) W^{−s/2}` with `W = 1 + |λ|² − Δ_M`: an order-zero
/// operator whose fiber invertibility matches `P : Hˢ → H^{s−m}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedOperator {
    pub source: InvariantOperator,
}

impl FiberFamily for ReducedOperator {
    fn n(&self) -> usize {
        self.source.n
    }

    fn fiber(&self, lambda: &[f64]) -> Result<ComplexMatrix> {
        let p = self.source.fiber(lambda)?;
        let s = self.source.sobolev;
        let m = self.source.order as f64;
        let lam2: f64 = lambda.iter().map(|l| l * l).sum();
        let lap = self.source.base.laplacian();
        let w = &lap + &ComplexMatrix::identity(lap.dim()).scale(Complex64::new(1.0 + lam2, 0.0));
        let eig = hermitian_eigen(&w)?;
        let left = eig.reconstruct_with(|x| Complex64::new(x.powf((s - m) / 2.0), 0.0));
        let right = eig.reconstruct_with(|x| Complex64::new(x.powf(-s / 2.0), 0.0));
        Ok(&(&left * &p) * &right)
    }
}

pub fn order_reduction(p: &InvariantOperator) -> ReducedOperator {
    ReducedOperator { source: p.clone() }
}

/// Frequencies `j·step`, `|j·step| ≤ window` per axis; always contains `0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaGrid {
    pub n: usize,
    pub window: f64,
    pub step: f64,
    nodes: Vec<Vec<f64>>,
}

impl LambdaGrid {
    pub fn new(n: usize, window: f64, step: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidInput("grid dimension must be positive".into()));
        }
        if !(step > 0.0) || !(window > 0.0) || !step.is_finite() || !window.is_finite() || step > window {
            return Err(Error::InvalidInput(format!(
                "need 0 < step ≤ window, got step {step}, window {window}"
            )));
        }
        let per_axis = (window / step + 1e-9).floor() as i64;
        let axis: Vec<f64> = (-per_axis..=per_axis).map(|j| j as f64 * step).collect();
        let mut nodes: Vec<Vec<f64>> = vec![Vec::new()];
        for _ in 0..n {
            nodes = nodes
                .into_iter()
                .flat_map(|prefix| {
                    axis.iter().map(move |&x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        Ok(Self { n, window, step, nodes })
    }

    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }
}

/// The top-order part `σ_m(ξ, λ)` of a symbol. Mode couplings are lower
/// order except for order-zero operators, where their `x`-dependent
/// contribution is not part of this field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrincipalSymbol {
    pub n: usize,
    pub order: u32,
    pub terms: Vec<Monomial>,
}

impl PrincipalSymbol {
    pub fn eval(&self, xi: f64, lambda: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coeff * xi.powi(t.k_power as i32) * t.lambda_factor(lambda))
            .sum()
    }

    /// Unit directions `(ξ, λ)` from a grid on the surface of the cube
    /// `[−1, 1]^{1+n}` with `subdivisions` steps per edge, keeping those with
    /// `|λ| ≥ min_lambda`.
    pub fn direction_sample(&self, subdivisions: usize, min_lambda: f64) -> Vec<Vec<f64>> {
        let d = self.n + 1;
        let s = subdivisions.max(1) as i64;
        let mut out = Vec::new();
        let mut idx = vec![-s; d];
        loop {
            if idx.iter().any(|&i| i.abs() == s) {
                let v: Vec<f64> = idx.iter().map(|&i| i as f64 / s as f64).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                let u: Vec<f64> = v.iter().map(|x| x / norm).collect();
                let lam = u[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
                if lam >= min_lambda - 1e-12 {
                    out.push(u);
                }
            }
            let mut pos = 0;
            loop {
                if pos == d {
                    return out;
                }
                idx[pos] += 1;
                if idx[pos] > s {
                    idx[pos] = -s;
                    pos += 1;
                } else {
                    break;
                }
            }
        }
    }
}

/// Subdivisions per cube edge for direction sampling.
pub const DIRECTION_SUBDIVISIONS: usize = 8;

fn fibers_on<F: FiberFamily + ?Sized>(op: &F, grid: &LambdaGrid) -> Result<Vec<ComplexMatrix>> {
    if grid.n != op.n() {
        return Err(Error::InvalidInput(format!(
            "grid dimension {} does not match the operator's {}",
            grid.n,
            op.n()
        )));
    }
    grid.nodes().par_iter().map(|l| op.fiber(l)).collect()
}

/// The fibered observable `λ ↦ T̂(λ)` over the grid, flagged truncated.
pub fn fibered_observable(t: &InvariantOperator, grid: &LambdaGrid) -> Result<Observable> {
    let fibers = fibers_on(t, grid)?;
    Observable::fibered("parametric", grid.nodes().to_vec(), fibers, true)
}

/// `∪_λ Spec(T̂(λ))` over the grid. The result is always truncated.
pub fn spectrum_parametric(t: &InvariantOperator, grid: &LambdaGrid) -> Result<SpectrumSet> {
    let sigma = t.principal_symbol();
    for dir in sigma.direction_sample(DIRECTION_SUBDIVISIONS, 0.0) {
        if sigma.eval(dir[0], &dir[1..]).norm() <= DEFAULT_TOL {
            return Err(Error::NotElliptic { direction: dir });
        }
    }
    spec_observable(&fibered_observable(t, grid)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParametricInvertibility {
    pub invertible: bool,
    /// Smallest singular value of the order-reduced fibers.
    #[serde(with = "crate::serde_float")]
    pub min_fiber_singular: f64,
    pub failing_fiber: Option<Vec<f64>>,
    /// Smallest `|σ_m|` over the sampled directions.
    #[serde(with = "crate::serde_float")]
    pub min_symbol_modulus: f64,
    pub failing_direction: Option<Vec<f64>>,
    pub delta_dir: f64,
    pub delta_sym: f64,
    pub cutoff: Option<usize>,
    pub directions_checked: usize,
}

/// Invertibility of `T : Hˢ → H^{s−m}`: every order-reduced fiber is
/// invertible beyond resolution and `|σ_m| ≥ delta_sym` on sampled unit
/// directions with `|λ| ≥ delta_dir`.
pub fn invertible_parametric(
    t: &InvariantOperator,
    grid: &LambdaGrid,
    delta_dir: f64,
    delta_sym: f64,
) -> Result<ParametricInvertibility> {
    if !(delta_dir > 0.0 && delta_dir < 1.0) {
        return Err(Error::InvalidInput("direction threshold must lie in (0, 1)".into()));
    }
    if !(delta_sym > 0.0) {
        return Err(Error::InvalidInput("symbol threshold must be positive".into()));
    }
    let reduced = order_reduction(t);
    let sv: Vec<f64> = fibers_on(&reduced, grid)?
        .par_iter()
        .map(min_singular_value)
        .collect::<Result<_>>()?;
    let (worst, min_fiber_singular) = argmin(&sv);
    let fibers_ok = min_fiber_singular > DEFAULT_TOL;

    let sigma = t.principal_symbol();
    let dirs = sigma.direction_sample(DIRECTION_SUBDIVISIONS, delta_dir);
    let mods: Vec<f64> = dirs.iter().map(|d| sigma.eval(d[0], &d[1..]).norm()).collect();
    let min_symbol_modulus = mods.iter().copied().fold(f64::INFINITY, f64::min);
    let symbol_ok = min_symbol_modulus >= delta_sym;
    // Among minimizing directions, report the one with the largest component sum.
    let failing_direction = (!symbol_ok).then(|| {
        dirs.iter()
            .zip(&mods)
            .filter(|(_, &m)| m <= min_symbol_modulus + 1e-14)
            .map(|(d, _)| d)
            .max_by(|a, b| a.iter().sum::<f64>().total_cmp(&b.iter().sum::<f64>()))
            .cloned()
            .expect("nonempty")
    });
    Ok(ParametricInvertibility {
        invertible: fibers_ok && symbol_ok,
        min_fiber_singular,
        failing_fiber: (!fibers_ok).then(|| grid.nodes()[worst].clone()),
        min_symbol_modulus,
        failing_direction,
        delta_dir,
        delta_sym,
        cutoff: match t.base {
            BaseManifold::CircleFourier { cutoff } => Some(cutoff),
            BaseManifold::Graph { .. } => None,
        },
        directions_checked: dirs.len(),
    })
}

/// Index of the first minimum.
fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, b), (i, &x)| if x < b { (i, x) } else { (bi, b) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictionCheck {
    pub holds: bool,
    /// `max_{±K} |r(K, λ₁) − r(K, λ₀)|` with `r = fiber entry / σ_m(k, 0)`.
    #[serde(with = "crate::serde_float")]
    pub deviation_at_cutoff: f64,
    #[serde(with = "crate::serde_float")]
    pub deviation_at_double: f64,
    pub detail: String,
}

/// Checks that the top-order growth of the fibers in `k` does not depend on
/// `λ`: the normalized diagonal entries at the extreme modes agree for
/// `λ = 0` and a unit `λ`, with the discrepancy shrinking as the cutoff
/// doubles.
pub fn symbol_restriction_check(t: &InvariantOperator) -> Result<RestrictionCheck> {
    let cutoff = match t.base {
        BaseManifold::CircleFourier { cutoff } => cutoff,
        BaseManifold::Graph { .. } => {
            return Err(Error::UnsupportedModel("symbol restriction check needs a circle base".into()))
        }
    };
    if cutoff < 1 {
        return Err(Error::CutoffTooSmall("symbol restriction check needs K ≥ 1".into()));
    }
    let sigma = t.principal_symbol();
    let zero = vec![0.0; t.n];
    let plus = sigma.eval(1.0, &zero);
    let minus = sigma.eval(-1.0, &zero);
    if plus.norm() <= DEFAULT_TOL || minus.norm() <= DEFAULT_TOL {
        return Ok(RestrictionCheck {
            holds: false,
            deviation_at_cutoff: f64::INFINITY,
            deviation_at_double: f64::INFINITY,
            detail: "principal symbol vanishes in the pure k-direction; top order sits in λ".into(),
        });
    }
    let mut unit = vec![0.0; t.n];
    unit[0] = 1.0;
    let deviation = |k_cut: usize| -> Result<f64> {
        let op = t.with_cutoff(k_cut)?;
        let f0 = op.fiber(&zero)?;
        let f1 = op.fiber(&unit)?;
        let last = 2 * k_cut;
        let kf = k_cut as f64;
        let scale = kf.powi(t.order as i32);
        let d_minus = (f1[(0, 0)] - f0[(0, 0)]).norm() / (minus.norm() * scale);
        let d_plus = (f1[(last, last)] - f0[(last, last)]).norm() / (plus.norm() * scale);
        Ok(d_minus.max(d_plus))
    };
    let d1 = deviation(cutoff)?;
    let d2 = deviation(2 * cutoff)?;
    let holds = d2 <= 0.55 * d1 + 1e-12;
    Ok(RestrictionCheck {
        holds,
        deviation_at_cutoff: d1,
        deviation_at_double: d2,
        detail: format!("normalized λ-dependence {d1:.3e} at K={cutoff}, {d2:.3e} at K={}", 2 * cutoff),
    })
}
