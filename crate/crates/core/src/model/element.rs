use std::sync::Arc;

use num_complex::Complex64;

use super::base::{BaseKind, FunctionModel, PARAM_EPS};
use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix, ZERO};

/// Off-block entries at constrained points must vanish to this precision.
pub const CONSTRAINT_TOL: f64 = 1e-12;

/// A piecewise-linear matrix-valued function on the model's base space.
///
/// Values are stored at breakpoints (a superset of the sample grid) and
/// interpolated linearly in between; on the circle the last segment wraps
/// back to the first breakpoint. `lipschitz_bound` is the exact Lipschitz
/// constant of the interpolant in operator norm.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    model: Arc<FunctionModel>,
    breakpoints: Vec<f64>,
    values: Vec<ComplexMatrix>,
    lipschitz_bound: f64,
}

/// A norm value with a certified error bar.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct NormEstimate {
    pub value: f64,
    pub error_bar: f64,
}

impl AlgebraElement {
    /// Samples `f` on the model grid.
    pub fn from_fn<F>(model: &Arc<FunctionModel>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> ComplexMatrix,
    {
        let bps = model.base().grid().to_vec();
        let values = bps.iter().map(|&t| f(t)).collect();
        Self::from_samples(model, bps, values)
    }

    /// Scalar function times the identity.
    pub fn from_scalar_fn<F>(model: &Arc<FunctionModel>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let d = model.fiber_dim();
        Self::from_fn(model, |t| ComplexMatrix::identity(d).scale(f(t)))
    }

    pub fn from_samples(
        model: &Arc<FunctionModel>,
        breakpoints: Vec<f64>,
        values: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        let base = model.base();
        if breakpoints.len() != values.len() || breakpoints.is_empty() {
            return Err(Error::InvalidInput("breakpoints and values must match and be nonempty".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] - w[0] <= PARAM_EPS) {
            return Err(Error::InvalidInput("breakpoints must be strictly increasing".into()));
        }
        if breakpoints.iter().any(|&t| !base.contains(t)) {
            return Err(Error::InvalidInput("breakpoint outside the base space".into()));
        }
        let d = model.fiber_dim();
        if values.iter().any(|m| m.dim() != d || !m.is_finite()) {
            return Err(Error::InvalidInput(format!("values must be finite {d}x{d} matrices")));
        }
        for &g in base.grid() {
            if !breakpoints.iter().any(|&b| (b - g).abs() <= PARAM_EPS) {
                return Err(Error::InvalidInput(format!("grid point {g} missing from breakpoints")));
            }
        }
        if let BaseKind::Discrete(_) = base.kind() {
            if breakpoints.len() != base.grid().len() {
                return Err(Error::InvalidInput("discrete elements are defined on grid points only".into()));
            }
        }
        let mut el = Self {
            model: Arc::clone(model),
            breakpoints,
            values,
            lipschitz_bound: 0.0,
        };
        el.check_constraints()?;
        el.lipschitz_bound = el.compute_lipschitz();
        Ok(el)
    }

    pub fn constant(model: &Arc<FunctionModel>, m: &ComplexMatrix) -> Result<Self> {
        Self::from_fn(model, |_| m.clone())
    }

    pub fn identity(model: &Arc<FunctionModel>) -> Self {
        Self::constant(model, &ComplexMatrix::identity(model.fiber_dim())).expect("identity satisfies every constraint")
    }

    pub fn zero(model: &Arc<FunctionModel>) -> Self {
        Self::constant(model, &ComplexMatrix::zeros(model.fiber_dim())).expect("zero satisfies every constraint")
    }

    fn check_constraints(&self) -> Result<()> {
        for c in self.model.blocks().constraints() {
            let blocks = c.blocks(self.model.fiber_dim());
            let value = self.eval(c.at)?;
            let scale = value.max_abs().max(1.0);
            for (i, j) in off_block_entries(&blocks) {
                if value[(i, j)].norm() > CONSTRAINT_TOL * scale {
                    return Err(Error::InvalidInput(format!(
                        "value at {} violates its block constraint at entry ({i}, {j})",
                        c.at
                    )));
                }
            }
        }
        Ok(())
    }

    fn compute_lipschitz(&self) -> f64 {
        if !self.model.base().is_continuous() {
            return 0.0;
        }
        let mut l: f64 = 0.0;
        for k in 1..self.breakpoints.len() {
            let dt = self.breakpoints[k] - self.breakpoints[k - 1];
            l = l.max(op_norm(&(&self.values[k] - &self.values[k - 1])) / dt);
        }
        if self.model.base().kind() == BaseKind::Circle && self.breakpoints.len() > 1 {
            let last = self.breakpoints.len() - 1;
            let dt = self.breakpoints[0] + 1.0 - self.breakpoints[last];
            l = l.max(op_norm(&(&self.values[0] - &self.values[last])) / dt);
        }
        l
    }

    pub fn model(&self) -> &Arc<FunctionModel> {
        &self.model
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[ComplexMatrix] {
        &self.values
    }

    pub fn lipschitz_bound(&self) -> f64 {
        self.lipschitz_bound
    }

    pub fn fiber_dim(&self) -> usize {
        self.model.fiber_dim()
    }

    /// Value at `t` by linear interpolation between breakpoints.
    pub fn eval(&self, t: f64) -> Result<ComplexMatrix> {
        let base = self.model.base();
        if !base.contains(t) {
            return Err(Error::InvalidInput(format!("parameter {t} outside the base space")));
        }
        let bps = &self.breakpoints;
        let idx = bps.partition_point(|&b| b < t - PARAM_EPS);
        if idx < bps.len() && (bps[idx] - t).abs() <= PARAM_EPS {
            return Ok(self.values[idx].clone());
        }
        let (lo, hi, t0, t1) = match base.kind() {
            BaseKind::Discrete(_) => {
                return Err(Error::InvalidInput(format!("{t} is not a point of the discrete base")));
            }
            BaseKind::Interval => (idx - 1, idx, bps[idx - 1], bps[idx]),
            BaseKind::Circle => {
                let n = bps.len();
                if idx == 0 {
                    (n - 1, 0, bps[n - 1] - 1.0, bps[0])
                } else if idx == n {
                    (n - 1, 0, bps[n - 1], bps[0] + 1.0)
                } else {
                    (idx - 1, idx, bps[idx - 1], bps[idx])
                }
            }
        };
        let w = (t - t0) / (t1 - t0);
        Ok(&self.values[lo].scale(Complex64::new(1.0 - w, 0.0)) + &self.values[hi].scale(Complex64::new(w, 0.0)))
    }

    fn ensure_same_model(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.model, &other.model) || *self.model == *other.model {
            Ok(())
        } else {
            Err(Error::IncompatibleModel("elements belong to different models".into()))
        }
    }

    /// Combines two elements pointwise on the union of their breakpoints.
    fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(&ComplexMatrix, &ComplexMatrix) -> ComplexMatrix,
    {
        self.ensure_same_model(other)?;
        let mut bps: Vec<f64> = self.breakpoints.iter().chain(&other.breakpoints).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup_by(|a, b| (*a - *b).abs() <= PARAM_EPS);
        let values = bps
            .iter()
            .map(|&t| Ok(f(&self.eval(t)?, &other.eval(t)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_samples(&self.model, bps, values)
    }

    fn map_values<F: Fn(&ComplexMatrix) -> ComplexMatrix>(&self, f: F) -> Result<Self> {
        let values = self.values.iter().map(f).collect();
        Self::from_samples(&self.model, self.breakpoints.clone(), values)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Pointwise product, stored as the interpolant through breakpoint products.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map_values(|m| m.scale(s)).expect("scaling preserves validity")
    }

    pub fn adjoint(&self) -> Self {
        self.map_values(|m| m.adjoint()).expect("adjoint preserves validity")
    }

    /// `c·1 − self`.
    pub fn shifted_neg(&self, c: Complex64) -> Self {
        let d = self.fiber_dim();
        self.map_values(|m| &ComplexMatrix::identity(d).scale(c) - m)
            .expect("identity shift preserves validity")
    }

    /// `‖a‖²·1 − a*a`, the positive element whose invertibility-detection
    /// certifies the reduction from `a` to the family.
    pub fn norm_defect_element(&self) -> Result<Self> {
        let n = elem_norm(self).value;
        let ata = self.adjoint().mul(self)?;
        Ok(ata.shifted_neg(Complex64::new(n * n, 0.0)))
    }

    /// Zeroes off-block entries at constrained points of the stored data.
    pub fn projected<F>(model: &Arc<FunctionModel>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> ComplexMatrix,
    {
        Self::from_fn(model, |t| {
            let mut m = f(t);
            if let Some(blocks) = model.blocks().blocks_at(t) {
                for (i, j) in off_block_entries(&blocks) {
                    m[(i, j)] = ZERO;
                }
            }
            m
        })
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        self.values.iter().all(|m| m.is_hermitian(tol))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.sub(other)
            .map(|d| d.values.iter().all(|m| m.max_abs() <= tol))
            .unwrap_or(false)
    }
}

pub(crate) fn off_block_entries(blocks: &[std::ops::Range<usize>]) -> Vec<(usize, usize)> {
    let n = blocks.last().map(|b| b.end).unwrap_or(0);
    let owner: Vec<usize> = (0..n)
        .map(|i| blocks.iter().position(|b| b.contains(&i)).expect("blocks cover"))
        .collect();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if owner[i] != owner[j] {
                out.push((i, j));
            }
        }
    }
    out
}

/// Sup-norm over the sample grid with error bar `lipschitz·grid_step/2`.
pub fn elem_norm(a: &AlgebraElement) -> NormEstimate {
    let base = a.model.base();
    let value = base
        .grid()
        .iter()
        .map(|&t| op_norm(&a.eval(t).expect("grid point is in the base")))
        .fold(0.0, f64::max);
    NormEstimate {
        value,
        error_bar: a.lipschitz_bound * base.grid_step() / 2.0,
    }
}

/// The 2×2 example model: matrix functions on `[0, 1]` diagonal at `t = 1`.
pub fn diagonal_endpoint_model(intervals: usize, refine_depth: u32) -> Result<Arc<FunctionModel>> {
    use super::base::{BaseSpace, BlockStructure, Constraint};
    let base = BaseSpace::interval(intervals)?.refined_toward(&[1.0], refine_depth)?;
    let blocks = BlockStructure::new(2, vec![Constraint::diagonal_at(1.0)])?;
    Ok(Arc::new(FunctionModel::new(base, blocks)?))
}

#[cfg(test)]
pub(crate) fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

#[cfg(test)]
pub(crate) fn diag2(a: f64, b: f64) -> ComplexMatrix {
    ComplexMatrix::diag(&[real(a), real(b)])
}
