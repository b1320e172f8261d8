//! Finite point clouds in the complex plane with a merge radius.

use std::cmp::Ordering;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A canonicalized finite set of complex points.
///
/// Points closer than `resolution` are identified: after a lexicographic sort
/// on `(re, im)` each point is kept only if no previously kept point lies
/// within `resolution` of it. `truncated` marks a sample of a possibly larger
/// set (finite window, mode cutoff, discarded points near infinity).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    points: Vec<Complex64>,
    resolution: f64,
    truncated: bool,
}

fn lex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

impl SpectrumSet {
    pub fn new(points: Vec<Complex64>, resolution: f64) -> Self {
        assert!(resolution >= 0.0 && resolution.is_finite(), "resolution must be finite and >= 0");
        Self {
            points: canonicalize(points, resolution),
            resolution,
            truncated: false,
        }
    }

    pub fn from_real(values: &[f64], resolution: f64) -> Self {
        Self::new(values.iter().map(|&x| Complex64::new(x, 0.0)).collect(), resolution)
    }

    pub fn empty(resolution: f64) -> Self {
        Self::new(Vec::new(), resolution)
    }

    pub fn with_truncated(mut self, truncated: bool) -> Self {
        self.truncated = truncated;
        self
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Union; the coarser resolution wins and truncation propagates.
    pub fn union(&self, other: &SpectrumSet) -> SpectrumSet {
        let resolution = self.resolution.max(other.resolution);
        let mut pts = self.points.clone();
        pts.extend_from_slice(&other.points);
        SpectrumSet::new(pts, resolution).with_truncated(self.truncated || other.truncated)
    }

    /// Union of many sets in a single canonicalization pass.
    pub fn union_all<'a, I>(sets: I, resolution: f64) -> SpectrumSet
    where
        I: IntoIterator<Item = &'a SpectrumSet>,
    {
        let mut pts = Vec::new();
        let mut res = resolution;
        let mut truncated = false;
        for s in sets {
            pts.extend_from_slice(&s.points);
            res = res.max(s.resolution);
            truncated |= s.truncated;
        }
        SpectrumSet::new(pts, res).with_truncated(truncated)
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> SpectrumSet {
        SpectrumSet::new(self.points.iter().map(|&z| f(z)).collect(), self.resolution)
            .with_truncated(self.truncated)
    }

    /// True if some stored point lies within `resolution` of `z`.
    pub fn contains(&self, z: Complex64) -> bool {
        self.distance_to(z)
            .map(|d| d <= self.resolution)
            .unwrap_or(false)
    }

    /// Distance from `z` to the nearest stored point.
    pub fn distance_to(&self, z: Complex64) -> Option<f64> {
        nearest_distance(&self.points, z)
    }

    pub fn min_real(&self) -> Option<f64> {
        self.points.iter().map(|z| z.re).min_by(f64::total_cmp)
    }

    pub fn max_real(&self) -> Option<f64> {
        self.points.iter().map(|z| z.re).max_by(f64::total_cmp)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.points.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
    }
}

fn canonicalize(mut points: Vec<Complex64>, resolution: f64) -> Vec<Complex64> {
    points.sort_by(lex);
    let mut kept: Vec<Complex64> = Vec::with_capacity(points.len());
    for p in points {
        // Kept points are sorted by real part; only a trailing window can be close.
        let near = kept
            .iter()
            .rev()
            .take_while(|q| p.re - q.re <= resolution)
            .any(|q| (p - q).norm() <= resolution);
        if !near {
            kept.push(p);
        }
    }
    kept
}

/// Nearest-point distance against a slice sorted lexicographically.
fn nearest_distance(sorted: &[Complex64], z: Complex64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let start = sorted.partition_point(|q| q.re < z.re);
    let mut best = f64::INFINITY;
    for q in &sorted[start..] {
        if q.re - z.re > best {
            break;
        }
        best = best.min((q - z).norm());
    }
    for q in sorted[..start].iter().rev() {
        if z.re - q.re > best {
            break;
        }
        best = best.min((q - z).norm());
    }
    Some(best)
}

/// `max_{a ∈ from} min_{b ∈ to} |a − b|`.
pub fn directed_hausdorff(from: &SpectrumSet, to: &SpectrumSet) -> Result<f64> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(from
        .points
        .iter()
        .map(|&a| nearest_distance(&to.points, a).expect("nonempty"))
        .fold(0.0, f64::max))
}

/// Symmetric Hausdorff distance between two point clouds.
pub fn hausdorff(a: &SpectrumSet, b: &SpectrumSet) -> Result<f64> {
    Ok(directed_hausdorff(a, b)?.max(directed_hausdorff(b, a)?))
}
