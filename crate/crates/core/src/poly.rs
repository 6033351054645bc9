//! Complex polynomials in `z^{-1}` and Laurent polynomials in `z`.
//!
//! A [`CausalPolynomial`] stores `p(z) = sum_i c_i z^{-i}`. This is the
//! representation of the scattering coefficients `a(z)`, `b(z)`, of the
//! filter `psi(z)` and of its spectral factors. Transfer-matrix entries
//! carry non-negative powers of `z` and live in [`LaurentPolynomial`].

use num_complex::Complex64;

use crate::error::{NftError, Result};
use crate::fft;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `sum_{i=0}^{N-1} c_i z^{-i}` with `N >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalPolynomial {
    coeffs: Vec<Complex64>,
}

impl CausalPolynomial {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(NftError::InvalidInput(
                "a polynomial needs at least one coefficient".into(),
            ));
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(NftError::InvalidInput("non-finite coefficient".into()));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Self { coeffs: vec![c] }
    }

    pub fn one() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    /// `n` zero coefficients.
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![ZERO; n.max(1)],
        }
    }

    /// `c * z^{-k}`.
    pub fn monomial(k: usize, c: Complex64) -> Self {
        let mut coeffs = vec![ZERO; k + 1];
        coeffs[k] = c;
        Self { coeffs }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of `z^{-i}`, zero beyond the stored length.
    pub fn coeff(&self, i: usize) -> Complex64 {
        self.coeffs.get(i).copied().unwrap_or(ZERO)
    }

    /// The `z^0` coefficient, i.e. `lim_{z -> inf} p(z)`.
    pub fn leading(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// Keeps the first `n` coefficients (zero-padding if shorter).
    pub fn resized(&self, n: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(n.max(1), ZERO);
        Self { coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.len().max(other.len());
        Self {
            coeffs: (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect(),
        }
    }

    /// Product; length `len(p) + len(q) - 1`.
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            coeffs: fft::convolve(&self.coeffs, &other.coeffs),
        }
    }

    /// Horner evaluation in `w = 1/z0`.
    pub fn eval(&self, z0: Complex64) -> Result<Complex64> {
        if self.coeffs.len() == 1 {
            return Ok(self.coeffs[0]);
        }
        if z0 == ZERO {
            return Err(NftError::Domain(
                "evaluation of negative powers of z at z = 0".into(),
            ));
        }
        let w = z0.inv();
        Ok(self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * w + c))
    }

    /// Values `p(exp(2 pi i m / M))` for `m = 0..M`.
    pub fn circle_samples(&self, m: usize) -> Result<Vec<Complex64>> {
        if m < self.len() {
            return Err(NftError::Aliasing {
                grid: m,
                len: self.len(),
            });
        }
        let mut buf = vec![ZERO; m];
        buf[..self.len()].copy_from_slice(&self.coeffs);
        fft::forward(&mut buf);
        Ok(buf)
    }

    /// Inverse of [`circle_samples`](Self::circle_samples): recovers the
    /// coefficients from unit-circle samples and keeps the first `keep`.
    ///
    /// The returned energy `sum_{i >= keep} |c_i|^2` measures what the
    /// truncation threw away.
    pub fn from_circle(samples: &[Complex64], keep: usize) -> Result<(Self, f64)> {
        if keep == 0 || keep > samples.len() {
            return Err(NftError::InvalidInput(format!(
                "cannot keep {keep} of {} coefficients",
                samples.len()
            )));
        }
        let mut buf = samples.to_vec();
        fft::inverse(&mut buf);
        let tail = buf[keep..].iter().map(|c| c.norm_sqr()).sum();
        buf.truncate(keep);
        Ok((Self { coeffs: buf }, tail))
    }

    /// `dp/dz = sum_i (-i) c_i z^{-i-1}`.
    pub fn dz(&self) -> LaurentPolynomial {
        let n = self.len();
        if n == 1 {
            return LaurentPolynomial::zero();
        }
        // ascending powers of z: z^{-n} .. z^{-1}
        let coeffs = (0..n)
            .map(|j| {
                let i = n - 1 - j;
                -(i as f64) * self.coeffs[i]
            })
            .collect();
        LaurentPolynomial::new(coeffs, -(n as i64)).expect("derivative of a non-empty polynomial")
    }

    pub fn to_laurent(&self) -> LaurentPolynomial {
        let n = self.len() as i64;
        let coeffs = self.coeffs.iter().rev().copied().collect();
        LaurentPolynomial {
            coeffs,
            offset: -(n - 1),
        }
    }

    /// Largest coefficient magnitude.
    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// `sum_i c_i z^{offset + i}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LaurentPolynomial {
    coeffs: Vec<Complex64>,
    offset: i64,
}

impl LaurentPolynomial {
    pub fn new(coeffs: Vec<Complex64>, offset: i64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(NftError::InvalidInput(
                "a polynomial needs at least one coefficient".into(),
            ));
        }
        Ok(Self { coeffs, offset })
    }

    pub fn zero() -> Self {
        Self {
            coeffs: vec![ZERO],
            offset: 0,
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            coeffs: vec![c],
            offset: 0,
        }
    }

    /// `c * z^k`.
    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self {
            coeffs: vec![c],
            offset: k,
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Lowest power of `z` represented.
    pub fn offset(&self) -> i64 {
        self.offset
    }

    /// Highest power of `z` represented.
    pub fn top(&self) -> i64 {
        self.offset + self.coeffs.len() as i64 - 1
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let idx = k - self.offset;
        if idx < 0 {
            return ZERO;
        }
        self.coeffs.get(idx as usize).copied().unwrap_or(ZERO)
    }

    /// Product; offsets add.
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            coeffs: fft::convolve(&self.coeffs, &other.coeffs),
            offset: self.offset + other.offset,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.offset.min(other.offset);
        let hi = self.top().max(other.top());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Self { coeffs, offset: lo }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|&c| c * s).collect(),
            offset: self.offset,
        }
    }

    pub fn eval(&self, z0: Complex64) -> Result<Complex64> {
        if z0 == ZERO {
            if self.offset < 0 && self.coeffs.iter().any(|c| *c != ZERO) {
                return Err(NftError::Domain(
                    "evaluation of negative powers of z at z = 0".into(),
                ));
            }
            return Ok(self.coeff(0));
        }
        let horner = self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z0 + c);
        Ok(horner * z0.powi(self.offset as i32))
    }

    /// Coefficients of `z^0, z^{-1}, ..., z^{-(n-1)}` as a causal polynomial.
    pub fn causal_window(&self, n: usize) -> CausalPolynomial {
        CausalPolynomial {
            coeffs: (0..n.max(1)).map(|i| self.coeff(-(i as i64))).collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
