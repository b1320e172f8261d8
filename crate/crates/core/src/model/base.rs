use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Two grid parameters closer than this are the same point.
pub const PARAM_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseKind {
    /// `m` isolated points labelled `0, 1, …, m−1`.
    Discrete(usize),
    /// `[0, 1]`.
    Interval,
    /// `ℝ / ℤ`, parametrized by `[0, 1)`.
    Circle,
}

/// A base space together with the grid used for sampling norms and spectra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaseSpace {
    kind: BaseKind,
    grid: Vec<f64>,
    grid_step: f64,
}

impl BaseSpace {
    pub fn discrete(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidInput("discrete base needs at least one point".into()));
        }
        Ok(Self {
            kind: BaseKind::Discrete(m),
            grid: (0..m).map(|i| i as f64).collect(),
            grid_step: 0.0,
        })
    }

    /// Uniform grid on `[0, 1]` with `intervals` cells.
    pub fn interval(intervals: usize) -> Result<Self> {
        if intervals == 0 {
            return Err(Error::InvalidInput("interval grid needs at least one cell".into()));
        }
        let grid = (0..=intervals).map(|j| j as f64 / intervals as f64).collect();
        Self::from_grid(BaseKind::Interval, grid)
    }

    /// Uniform grid of `points` parameters `j / points` on the circle.
    pub fn circle(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidInput("circle grid needs at least two points".into()));
        }
        let grid = (0..points).map(|j| j as f64 / points as f64).collect();
        Self::from_grid(BaseKind::Circle, grid)
    }

    /// Validates an explicit grid. Sorts and deduplicates.
    pub fn from_grid(kind: BaseKind, mut grid: Vec<f64>) -> Result<Self> {
        if grid.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidInput("grid values must be finite".into()));
        }
        grid.sort_by(f64::total_cmp);
        grid.dedup_by(|a, b| (*a - *b).abs() <= PARAM_EPS);
        if grid.is_empty() {
            return Err(Error::InvalidInput("grid must be nonempty".into()));
        }
        let grid_step = match kind {
            BaseKind::Discrete(m) => {
                let expected: Vec<f64> = (0..m).map(|i| i as f64).collect();
                if grid != expected {
                    return Err(Error::InvalidInput("discrete grid must list every point".into()));
                }
                0.0
            }
            BaseKind::Interval => {
                if grid[0] != 0.0 || *grid.last().expect("nonempty") != 1.0 {
                    return Err(Error::InvalidInput("interval grid must contain 0 and 1".into()));
                }
                max_gap(&grid)
            }
            BaseKind::Circle => {
                if grid[0] < 0.0 || *grid.last().expect("nonempty") >= 1.0 {
                    return Err(Error::InvalidInput("circle grid must lie in [0, 1)".into()));
                }
                let wrap = grid[0] + 1.0 - grid.last().expect("nonempty");
                max_gap(&grid).max(wrap)
            }
        };
        Ok(Self { kind, grid, grid_step })
    }

    /// Adds dyadic points `p ± step·2^{-j}`, `j = 1..=depth`, around each
    /// anchor (clipped to the space). Used to resolve behaviour near
    /// constrained points.
    pub fn refined_toward(&self, anchors: &[f64], depth: u32) -> Result<Self> {
        if matches!(self.kind, BaseKind::Discrete(_)) {
            return Ok(self.clone());
        }
        let step = self.grid_step;
        let mut grid = self.grid.clone();
        for &p in anchors {
            if !self.contains(p) {
                return Err(Error::InvalidInput(format!("refinement anchor {p} not in base space")));
            }
            for j in 1..=depth {
                let d = step * 0.5f64.powi(j as i32);
                for q in [p - d, p + d] {
                    match self.kind {
                        BaseKind::Interval if (0.0..=1.0).contains(&q) => grid.push(q),
                        BaseKind::Circle => grid.push(q.rem_euclid(1.0)),
                        _ => {}
                    }
                }
            }
        }
        Self::from_grid(self.kind, grid)
    }

    pub fn kind(&self) -> BaseKind {
        self.kind
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Largest gap between neighbouring samples; zero on discrete bases.
    pub fn grid_step(&self) -> f64 {
        self.grid_step
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self.kind, BaseKind::Discrete(_))
    }

    pub fn contains(&self, t: f64) -> bool {
        match self.kind {
            BaseKind::Discrete(_) => self.grid_index(t).is_some(),
            BaseKind::Interval => (0.0..=1.0).contains(&t),
            BaseKind::Circle => (0.0..1.0).contains(&t),
        }
    }

    pub fn grid_index(&self, t: f64) -> Option<usize> {
        let i = self.grid.partition_point(|&g| g < t - PARAM_EPS);
        (i < self.grid.len() && (self.grid[i] - t).abs() <= PARAM_EPS).then_some(i)
    }

    /// Distance in the base space (wrapping on the circle).
    pub fn distance(&self, s: f64, t: f64) -> f64 {
        let d = (s - t).abs();
        match self.kind {
            BaseKind::Circle => d.min(1.0 - d),
            _ => d,
        }
    }
}

fn max_gap(grid: &[f64]) -> f64 {
    grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstraintKind {
    /// The value is diagonal.
    Diagonal,
    /// The value is block diagonal along consecutive index ranges that
    /// partition `0..fiber_dim`.
    Blocks(Vec<(usize, usize)>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub at: f64,
    pub kind: ConstraintKind,
}

impl Constraint {
    pub fn diagonal_at(at: f64) -> Self {
        Self {
            at,
            kind: ConstraintKind::Diagonal,
        }
    }

    pub fn blocks_at(at: f64, ranges: Vec<(usize, usize)>) -> Self {
        Self {
            at,
            kind: ConstraintKind::Blocks(ranges),
        }
    }

    pub fn blocks(&self, fiber_dim: usize) -> Vec<Range<usize>> {
        match &self.kind {
            ConstraintKind::Diagonal => (0..fiber_dim).map(|i| i..i + 1).collect(),
            ConstraintKind::Blocks(r) => r.iter().map(|&(a, b)| a..b).collect(),
        }
    }
}

/// Matrix size at generic points plus the pointwise block constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStructure {
    fiber_dim: usize,
    constraints: Vec<Constraint>,
}

impl BlockStructure {
    pub fn new(fiber_dim: usize, mut constraints: Vec<Constraint>) -> Result<Self> {
        if fiber_dim == 0 {
            return Err(Error::InvalidInput("fiber dimension must be positive".into()));
        }
        for c in &constraints {
            let blocks = c.blocks(fiber_dim);
            let mut next = 0;
            for b in &blocks {
                if b.start != next || b.end <= b.start {
                    return Err(Error::InvalidInput(format!(
                        "blocks at {} must be consecutive nonempty ranges covering 0..{fiber_dim}",
                        c.at
                    )));
                }
                next = b.end;
            }
            if next != fiber_dim {
                return Err(Error::InvalidInput(format!(
                    "blocks at {} do not cover 0..{fiber_dim}",
                    c.at
                )));
            }
        }
        constraints.sort_by(|a, b| a.at.total_cmp(&b.at));
        if constraints.windows(2).any(|w| (w[1].at - w[0].at).abs() <= PARAM_EPS) {
            return Err(Error::InvalidInput("at most one constraint per point".into()));
        }
        Ok(Self {
            fiber_dim,
            constraints,
        })
    }

    pub fn unconstrained(fiber_dim: usize) -> Result<Self> {
        Self::new(fiber_dim, Vec::new())
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint_at(&self, t: f64) -> Option<&Constraint> {
        self.constraints.iter().find(|c| (c.at - t).abs() <= PARAM_EPS)
    }

    pub fn blocks_at(&self, t: f64) -> Option<Vec<Range<usize>>> {
        self.constraint_at(t).map(|c| c.blocks(self.fiber_dim))
    }
}

/// A base space with a block structure: the algebra of continuous
/// `fiber_dim × fiber_dim` matrix functions obeying the constraints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionModel {
    base: BaseSpace,
    blocks: BlockStructure,
}

impl FunctionModel {
    pub fn new(base: BaseSpace, blocks: BlockStructure) -> Result<Self> {
        for c in blocks.constraints() {
            if base.grid_index(c.at).is_none() {
                return Err(Error::InvalidInput(format!(
                    "constraint point {} must be a grid point of the base space",
                    c.at
                )));
            }
        }
        Ok(Self { base, blocks })
    }

    pub fn base(&self) -> &BaseSpace {
        &self.base
    }

    pub fn blocks(&self) -> &BlockStructure {
        &self.blocks
    }

    pub fn fiber_dim(&self) -> usize {
        self.blocks.fiber_dim()
    }
}
