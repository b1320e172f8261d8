//! The Toeplitz algebra: trigonometric-polynomial symbols plus finitely
//! supported corrections from the compact ideal.
//!
//! On `ℓ²(ℕ)` the element with symbol `Σ c_k e^{ikθ}` acts by the matrix
//! `(c_{i−j})_{i,j ≥ 0}`, so the unilateral shift `ε_k ↦ ε_{k+1}` has the
//! single coefficient `c₁ = 1`. Everything is computed on finite sections
//! `P_N x P_N`, whose norms increase to `‖x‖`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{op_norm, ComplexMatrix, ZERO};

/// Finite Fourier series `Σ_{k=−K}^{K} c_k e^{ikθ}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    /// `coeffs[k + degree]` holds `c_k`.
    coeffs: Vec<Complex64>,
    degree: usize,
}

impl TrigPoly {
    /// Builds from `(k, c_k)` pairs; repeated frequencies add up.
    pub fn from_terms(terms: &[(i64, Complex64)]) -> Self {
        let degree = terms.iter().map(|(k, _)| k.unsigned_abs() as usize).max().unwrap_or(0);
        let mut coeffs = vec![ZERO; 2 * degree + 1];
        for &(k, c) in terms {
            coeffs[(k + degree as i64) as usize] += c;
        }
        Self { coeffs, degree }.trimmed()
    }

    pub fn constant(c: Complex64) -> Self {
        Self::from_terms(&[(0, c)])
    }

    fn trimmed(mut self) -> Self {
        while self.degree > 0
            && self.coeffs[0] == ZERO
            && *self.coeffs.last().expect("nonempty") == ZERO
        {
            self.coeffs.remove(0);
            self.coeffs.pop();
            self.degree -= 1;
        }
        self
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.degree {
            ZERO
        } else {
            self.coeffs[(k + self.degree as i64) as usize]
        }
    }

    pub fn terms(&self) -> Vec<(i64, Complex64)> {
        let d = self.degree as i64;
        (-d..=d).map(|k| (k, self.coeff(k))).filter(|(_, c)| *c != ZERO).collect()
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        let d = self.degree as i64;
        (-d..=d)
            .map(|k| self.coeff(k) * Complex64::from_polar(1.0, k as f64 * theta))
            .sum()
    }

    /// `Σ |k|·|c_k|`, a Lipschitz constant for `θ ↦ p(θ)`.
    pub fn lipschitz(&self) -> f64 {
        let d = self.degree as i64;
        (-d..=d).map(|k| k.abs() as f64 * self.coeff(k).norm()).sum()
    }

    /// Symbol of the adjoint: `c'_k = conj(c_{−k})`.
    pub fn conj_reflect(&self) -> Self {
        let d = self.degree as i64;
        let terms: Vec<_> = (-d..=d).map(|k| (k, self.coeff(-k).conj())).collect();
        Self::from_terms(&terms)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms();
        terms.extend(other.terms());
        Self::from_terms(&terms)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let terms: Vec<_> = self.terms().into_iter().map(|(k, c)| (k, c * s)).collect();
        Self::from_terms(&terms)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = Vec::new();
        for (k, a) in self.terms() {
            for (l, b) in other.terms() {
                terms.push((k + l, a * b));
            }
        }
        Self::from_terms(&terms)
    }

    /// Section of the Toeplitz matrix `(c_{i−j})`.
    pub fn section(&self, n: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        let d = self.degree as i64;
        for i in 0..n as i64 {
            for j in (i - d).max(0)..=(i + d).min(n as i64 - 1) {
                m[(i as usize, j as usize)] = self.coeff(i - j);
            }
        }
        m
    }
}

/// Default truncation ladder for norm certification.
pub const DEFAULT_SECTIONS: [usize; 4] = [16, 32, 64, 128];

/// `T(symbol) + correction`, the correction living in a top-left corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzElement {
    symbol: TrigPoly,
    correction: Option<ComplexMatrix>,
    section_sizes: Vec<usize>,
}

impl ToeplitzElement {
    pub fn new(symbol: TrigPoly, correction: Option<ComplexMatrix>, section_sizes: Vec<usize>) -> Result<Self> {
        if section_sizes.is_empty() || section_sizes.contains(&0) {
            return Err(Error::InvalidInput("section sizes must be nonempty and positive".into()));
        }
        let mut sizes = section_sizes;
        sizes.sort_unstable();
        sizes.dedup();
        if let Some(c) = &correction {
            if !c.is_finite() {
                return Err(Error::InvalidInput("correction must be finite".into()));
            }
        }
        Ok(Self {
            symbol,
            correction,
            section_sizes: sizes,
        }
        .trimmed())
    }

    pub fn from_symbol(symbol: TrigPoly) -> Self {
        Self::new(symbol, None, DEFAULT_SECTIONS.to_vec()).expect("default sections are valid")
    }

    pub fn identity() -> Self {
        Self::from_symbol(TrigPoly::constant(Complex64::new(1.0, 0.0)))
    }

    /// The unilateral shift.
    pub fn shift() -> Self {
        Self::from_symbol(TrigPoly::from_terms(&[(1, Complex64::new(1.0, 0.0))]))
    }

    /// A pure compact element.
    pub fn compact(correction: ComplexMatrix) -> Self {
        Self::new(TrigPoly::constant(ZERO), Some(correction), DEFAULT_SECTIONS.to_vec())
            .expect("default sections are valid")
    }

    pub fn with_sections(mut self, sizes: Vec<usize>) -> Result<Self> {
        let el = Self::new(self.symbol.clone(), self.correction.take(), sizes)?;
        Ok(el)
    }

    /// Drops all-zero trailing rows/columns of the correction.
    fn trimmed(mut self) -> Self {
        if let Some(c) = &self.correction {
            let n = c.dim();
            let support = (0..n)
                .rev()
                .find(|&k| (0..n).any(|j| c[(k, j)] != ZERO || c[(j, k)] != ZERO))
                .map(|k| k + 1)
                .unwrap_or(0);
            self.correction = if support == 0 { None } else { Some(c.corner(support)) };
        }
        self
    }

    pub fn symbol(&self) -> &TrigPoly {
        &self.symbol
    }

    pub fn correction(&self) -> Option<&ComplexMatrix> {
        self.correction.as_ref()
    }

    pub fn section_sizes(&self) -> &[usize] {
        &self.section_sizes
    }

    /// Size of the corner that holds the correction (0 if none).
    pub fn correction_support(&self) -> usize {
        self.correction.as_ref().map(|c| c.dim()).unwrap_or(0)
    }

    pub fn largest_section(&self) -> usize {
        *self.section_sizes.last().expect("nonempty")
    }

    /// Compression `P_N x P_N`, defined for every `N`.
    pub fn compression(&self, n: usize) -> ComplexMatrix {
        let mut m = self.symbol.section(n);
        if let Some(c) = &self.correction {
            let k = c.dim().min(n);
            for i in 0..k {
                for j in 0..k {
                    m[(i, j)] += c[(i, j)];
                }
            }
        }
        m
    }

    /// Finite section that carries the whole correction.
    pub fn section(&self, n: usize) -> Result<ComplexMatrix> {
        let needed = self.correction_support();
        if n < needed {
            return Err(Error::TruncationTooSmall { needed, got: n });
        }
        Ok(self.compression(n))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            symbol: self.symbol.conj_reflect(),
            correction: self.correction.as_ref().map(|c| c.adjoint()),
            section_sizes: self.section_sizes.clone(),
        }
    }

    fn merged_sizes(&self, other: &Self) -> Vec<usize> {
        let mut s = self.section_sizes.clone();
        s.extend_from_slice(&other.section_sizes);
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.correction_support().max(other.correction_support());
        let correction = (n > 0).then(|| {
            let a = self.correction.as_ref().map(|c| c.embed(n)).unwrap_or_else(|| ComplexMatrix::zeros(n));
            let b = other.correction.as_ref().map(|c| c.embed(n)).unwrap_or_else(|| ComplexMatrix::zeros(n));
            &a + &b
        });
        Self::new(self.symbol.add(&other.symbol), correction, self.merged_sizes(other)).expect("valid parts")
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            symbol: self.symbol.scale(s),
            correction: self.correction.as_ref().map(|c| c.scale(s)),
            section_sizes: self.section_sizes.clone(),
        }
        .trimmed()
    }

    /// Product. The symbol multiplies; `T(p)T(q) − T(pq)` and the products
    /// involving corrections are finite rank and are computed on a section
    /// large enough that band truncation cannot reach them.
    pub fn mul(&self, other: &Self) -> Self {
        let kp = self.symbol.degree();
        let kq = other.symbol.degree();
        let m = self.correction_support() + other.correction_support() + kp + kq + 1;
        let big = m + kp + kq;
        let prod = &self.compression(big) * &other.compression(big);
        let symbol = self.symbol.mul(&other.symbol);
        let diff = &prod.corner(m) - &symbol.section(m);
        Self::new(symbol, Some(diff), self.merged_sizes(other)).expect("valid parts")
    }

    pub fn is_self_adjoint(&self, tol: f64) -> bool {
        let sym_ok = self
            .symbol
            .terms()
            .iter()
            .all(|&(k, c)| (c - self.symbol.coeff(-k).conj()).norm() <= tol);
        let corr_ok = self.correction.as_ref().map(|c| c.is_hermitian(tol)).unwrap_or(true);
        sym_ok && corr_ok
    }

    /// `‖x‖²·1 − x*x` with the norm taken from the finite-section ladder.
    pub fn norm_defect_element(&self) -> Self {
        let n = toeplitz_norm(self).value;
        let xtx = self.adjoint().mul(self);
        Self::identity().scale(Complex64::new(n * n, 0.0)).add(&xtx.scale(Complex64::new(-1.0, 0.0)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzNorm {
    /// Largest finite-section norm.
    pub value: f64,
    /// Difference between the last two section norms.
    pub last_increment: f64,
    pub sections: Vec<(usize, f64)>,
}

/// Finite-section norms over the element's truncation ladder.
pub fn toeplitz_norm(x: &ToeplitzElement) -> ToeplitzNorm {
    let sections: Vec<(usize, f64)> = x
        .section_sizes
        .iter()
        .map(|&n| (n, op_norm(&x.compression(n))))
        .collect();
    let value = sections.iter().map(|s| s.1).fold(0.0, f64::max);
    let last_increment = match sections.len() {
        0 | 1 => 0.0,
        k => sections[k - 1].1 - sections[k - 2].1,
    };
    ToeplitzNorm {
        value,
        last_increment,
        sections,
    }
}

/// Characters sampled on the circle, plus the section ladder used by `π`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ToeplitzModel {
    thetas: Vec<f64>,
}

impl ToeplitzModel {
    /// `count` equally spaced characters `θ_j = 2πj / count`.
    pub fn new(count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidInput("need at least one sampled character".into()));
        }
        Ok(Self {
            thetas: (0..count).map(|j| 2.0 * PI * j as f64 / count as f64).collect(),
        })
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    /// Largest angular gap between sampled characters (with wraparound).
    pub fn theta_gap(&self) -> f64 {
        max_circle_gap(&self.thetas)
    }
}

pub(crate) fn max_circle_gap(thetas: &[f64]) -> f64 {
    let mut t: Vec<f64> = thetas.iter().map(|x| x.rem_euclid(2.0 * PI)).collect();
    t.sort_by(f64::total_cmp);
    if t.is_empty() {
        return 2.0 * PI;
    }
    let inner = t.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    inner.max(t[0] + 2.0 * PI - t[t.len() - 1])
}
