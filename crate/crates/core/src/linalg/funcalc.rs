//! Continuous functional calculus for normal matrices with real spectrum.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hermitian::conjugate_diag;
use super::matrix::ComplexMatrix;
use super::normal::normal_eigen;
use crate::error::{Error, Result};

/// A function of one real variable, possibly restricted to a closed interval.
pub trait RealFunction {
    fn eval(&self, x: f64) -> Result<Complex64>;

    /// Closed domain, or `None` for all of ℝ.
    fn domain(&self) -> Option<(f64, f64)> {
        None
    }
}

impl<F> RealFunction for F
where
    F: Fn(f64) -> Complex64,
{
    fn eval(&self, x: f64) -> Result<Complex64> {
        Ok(self(x))
    }
}

/// Piecewise-linear function through explicit breakpoints. Evaluation outside
/// `[first, last]` is an error, never an extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear {
    breakpoints: Vec<f64>,
    values: Vec<Complex64>,
}

impl PiecewiseLinear {
    pub fn new(breakpoints: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != values.len() {
            return Err(Error::InvalidInput(
                "piecewise-linear function needs matching, nonempty breakpoints and values".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) || breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("breakpoints must be finite and strictly increasing".into()));
        }
        Ok(Self { breakpoints, values })
    }

    /// Samples `f` at the given breakpoints.
    pub fn sample<F: Fn(f64) -> Complex64>(breakpoints: Vec<f64>, f: F) -> Result<Self> {
        let values = breakpoints.iter().map(|&x| f(x)).collect();
        Self::new(breakpoints, values)
    }

    /// `t ↦ t` on `[0, 1]` and `1` beyond, sampled on `[0, hi]`.
    pub fn clamp_at_one(hi: f64) -> Result<Self> {
        let mut bps = vec![0.0, 1.0];
        let mut vals = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        if hi > 1.0 {
            bps.push(hi);
            vals.push(Complex64::new(1.0, 0.0));
        }
        Self::new(bps, vals)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
}

impl RealFunction for PiecewiseLinear {
    fn eval(&self, x: f64) -> Result<Complex64> {
        let (lo, hi) = self.domain().expect("bounded");
        if !(lo..=hi).contains(&x) {
            return Err(Error::DomainError { value: x, lo, hi });
        }
        let idx = self.breakpoints.partition_point(|&b| b <= x);
        if idx == self.breakpoints.len() {
            return Ok(*self.values.last().expect("nonempty"));
        }
        if idx == 0 {
            return Ok(self.values[0]);
        }
        let (x0, x1) = (self.breakpoints[idx - 1], self.breakpoints[idx]);
        let w = (x - x0) / (x1 - x0);
        Ok(self.values[idx - 1] * (1.0 - w) + self.values[idx] * w)
    }

    fn domain(&self) -> Option<(f64, f64)> {
        Some((self.breakpoints[0], *self.breakpoints.last().expect("nonempty")))
    }
}

/// `U f(D) Uᴴ` for `A = U D Uᴴ` normal with real spectrum.
///
/// Eigenvalues within `tol·max(1, ‖A‖)` of the domain are clamped onto it;
/// anything further out is a `DomainError`.
pub fn func_calc<F: RealFunction + ?Sized>(a: &ComplexMatrix, f: &F, tol: f64) -> Result<ComplexMatrix> {
    let eig = normal_eigen(a, tol)?;
    let scale = a.max_abs().max(1.0);
    let slack = tol * scale;
    let mut mapped = Vec::with_capacity(eig.values.len());
    for z in &eig.values {
        if z.im.abs() > slack {
            return Err(Error::DomainError {
                value: z.im,
                lo: 0.0,
                hi: 0.0,
            });
        }
        let mut x = z.re;
        if let Some((lo, hi)) = f.domain() {
            if x < lo && lo - x <= slack {
                x = lo;
            } else if x > hi && x - hi <= slack {
                x = hi;
            }
        }
        mapped.push(f.eval(x)?);
    }
    Ok(conjugate_diag(&eig.vectors, &mapped))
}
