//! Many-samples predictions for the generated spectra.
//!
//! As `D -> inf` the truncated sinc filter tends to the amplitude
//! `|Psi(w)| = |Si(w + wc) - Si(w - wc)| / pi`, which fixes the limit of
//! the reflection coefficient. The norming constants only have a
//! semi-asymptotic prediction that still evaluates the finite-`D` factors
//! `b(z_k)` and `u(z_k)`.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;

use serde::Serialize;

use crate::error::{NftError, Result};
use crate::forward::ReflectionSample;
use crate::poly::CausalPolynomial;
use crate::synthesis::lambda_to_z;

/// Switch from quadrature to the asymptotic expansion of `Si`.
const SI_ASYMPTOTIC_FROM: f64 = 30.0;

fn sinc_integrand(theta: f64) -> f64 {
    if theta == 0.0 {
        1.0
    } else {
        theta.sin() / theta
    }
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    whole: f64,
    m: f64,
    fm: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_simpson(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
        + adaptive_simpson(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
}

/// Auxiliary functions `f(s)`, `g(s)` of the large-argument expansion
/// `Si(s) = pi/2 - f(s) cos(s) - g(s) sin(s)`.
fn si_auxiliary(s: f64) -> (f64, f64) {
    let inv2 = 1.0 / (s * s);
    // f ~ (1/s)   (1 - 2!/s^2 + 4!/s^4 - 6!/s^6 + 8!/s^8)
    // g ~ (1/s^2) (1 - 3!/s^2 + 5!/s^4 - 7!/s^6 + 9!/s^8)
    let f_terms = [1.0, -2.0, 24.0, -720.0, 40320.0];
    let g_terms = [1.0, -6.0, 120.0, -5040.0, 362880.0];
    let series = |terms: &[f64]| terms.iter().rev().fold(0.0, |acc, &t| acc * inv2 + t);
    (series(&f_terms) / s, series(&g_terms) * inv2)
}

/// Sine integral `Si(s) = int_0^s sin(t)/t dt`.
pub fn sine_integral(s: f64) -> f64 {
    if s.is_nan() {
        return f64::NAN;
    }
    if s < 0.0 {
        return -sine_integral(-s);
    }
    if s.is_infinite() {
        return FRAC_PI_2;
    }
    if s >= SI_ASYMPTOTIC_FROM {
        let (f, g) = si_auxiliary(s);
        return FRAC_PI_2 - f * s.cos() - g * s.sin();
    }
    if s == 0.0 {
        return 0.0;
    }
    let f = sinc_integrand;
    let (fa, fb) = (f(0.0), f(s));
    let (m, fm, whole) = simpson(&f, 0.0, fa, s, fb);
    adaptive_simpson(&f, 0.0, fa, s, fb, whole, m, fm, 1e-14, 48)
}

/// Many-samples amplitude of the truncated sinc filter.
pub fn filter_amplitude(omega: f64, omega_c: f64) -> f64 {
    (sine_integral(omega + omega_c) - sine_integral(omega - omega_c)).abs() / PI
}

/// Limit of `|Q(w)|^2`: `d^2 |Psi|^2 / (1 - d^2 |Psi|^2)`.
pub fn asymptotic_reflection(omega: f64, delta: f64, omega_c: f64) -> Result<f64> {
    let psi = filter_amplitude(omega, omega_c);
    let g = delta * delta * psi * psi;
    if g >= 1.0 {
        return Err(NftError::Domain(format!(
            "delta^2 |Psi|^2 = {g} >= 1 at omega = {omega}"
        )));
    }
    Ok(g / (1.0 - g))
}

/// How the eigenvalue interaction product is oriented.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductOrientation {
    /// `prod_{i != k} -(l_k - conj(l_i)) / (l_k - l_i)`; the orientation
    /// that follows from dividing by the Blaschke derivative.
    ConjugateOverRoot,
    /// `prod_{i != k} -(l_k - l_i) / (l_k - conj(l_i))`.
    RootOverConjugate,
}

/// Semi-asymptotic norming constant of the `k`-th eigenvalue:
/// `-(b(z_k)/u(z_k)) (l_k - conj(l_k)) prod_{i != k} -(l_k - conj(l_i))/(l_k - l_i)`.
pub fn semi_asymptotic_norming(
    b: &CausalPolynomial,
    u: &CausalPolynomial,
    lambdas: &[Complex64],
    k: usize,
    eps: f64,
) -> Result<Complex64> {
    semi_asymptotic_norming_oriented(b, u, lambdas, k, eps, ProductOrientation::ConjugateOverRoot)
}

pub fn semi_asymptotic_norming_oriented(
    b: &CausalPolynomial,
    u: &CausalPolynomial,
    lambdas: &[Complex64],
    k: usize,
    eps: f64,
    orientation: ProductOrientation,
) -> Result<Complex64> {
    let lk = *lambdas
        .get(k)
        .ok_or_else(|| NftError::InvalidInput(format!("eigenvalue index {k} out of range")))?;
    let zk = lambda_to_z(lk, eps)?;
    let uz = u.eval(zk)?;
    if uz == Complex64::new(0.0, 0.0) {
        return Err(NftError::Domain("u(z_k) vanishes".into()));
    }
    let mut pred = -(b.eval(zk)? / uz) * (lk - lk.conj());
    for (i, &li) in lambdas.iter().enumerate() {
        if i == k {
            continue;
        }
        let (num, den) = match orientation {
            ProductOrientation::ConjugateOverRoot => (lk - li.conj(), lk - li),
            ProductOrientation::RootOverConjugate => (lk - li, lk - li.conj()),
        };
        if den.norm() == 0.0 || (lk - li).norm() == 0.0 {
            return Err(NftError::Domain(format!(
                "coincident eigenvalues {lk} and {li}"
            )));
        }
        pred *= -num / den;
    }
    Ok(pred)
}

/// Agreement between a measured reflection coefficient and
/// [`asymptotic_reflection`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReflectionDeviation {
    /// Largest pointwise relative error of `|Q(w)|^2` over `|w| <= wc`.
    pub passband_max_rel: f64,
    /// `||meas - pred||_2 / ||pred||_2` over `wc < |w| <= 2 wc`.
    pub transition_rel_l2: f64,
    /// Largest pointwise relative error over `wc < |w| <= 2 wc`. Dominated
    /// by the nulls of the prediction between side lobes.
    pub transition_max_rel: f64,
    /// Grid points skipped because `a` vanishes there.
    pub poles: usize,
}

/// Compares `|Q(w)|^2` samples against the many-samples prediction.
pub fn reflection_deviation(
    samples: &[ReflectionSample],
    delta: f64,
    omega_c: f64,
) -> Result<ReflectionDeviation> {
    let mut out = ReflectionDeviation {
        passband_max_rel: 0.0,
        transition_rel_l2: 0.0,
        transition_max_rel: 0.0,
        poles: 0,
    };
    let (mut num, mut den) = (0.0, 0.0);
    for s in samples {
        let w = s.omega.abs();
        if w > 2.0 * omega_c {
            continue;
        }
        let Some(v) = s.value else {
            out.poles += 1;
            continue;
        };
        let pred = asymptotic_reflection(s.omega, delta, omega_c)?;
        let meas = v.norm_sqr();
        let rel = (meas - pred).abs() / pred;
        if w <= omega_c {
            out.passband_max_rel = out.passband_max_rel.max(rel);
        } else {
            out.transition_max_rel = out.transition_max_rel.max(rel);
            num += (meas - pred).powi(2);
            den += pred * pred;
        }
    }
    if den > 0.0 {
        out.transition_rel_l2 = (num / den).sqrt();
    }
    Ok(out)
}

/// Predictions for one synthesis setup.
#[derive(Debug, Clone)]
pub struct AsymptoticPrediction {
    pub delta: f64,
    pub omega_c: f64,
    pub norming_predictions: Vec<Complex64>,
}

impl AsymptoticPrediction {
    pub fn new(
        delta: f64,
        omega_c: f64,
        b: &CausalPolynomial,
        u: &CausalPolynomial,
        lambdas: &[Complex64],
        eps: f64,
    ) -> Result<Self> {
        let norming_predictions = (0..lambdas.len())
            .map(|k| semi_asymptotic_norming(b, u, lambdas, k, eps))
            .collect::<Result<_>>()?;
        Ok(Self {
            delta,
            omega_c,
            norming_predictions,
        })
    }

    /// `|q(w)|^2` in the many-samples limit.
    pub fn reflection_magnitude(&self, omega: f64) -> Result<f64> {
        asymptotic_reflection(omega, self.delta, self.omega_c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Power series `sum (-1)^n s^{2n+1} / ((2n+1)(2n+1)!)`.
    fn si_series(s: f64) -> f64 {
        let mut term = s;
        let mut sum = s;
        let mut n = 0;
        loop {
            let k = (2 * n + 1) as f64;
            term *= -s * s / ((k + 1.0) * (k + 2.0));
            let add = term / (k + 2.0);
            sum += add;
            n += 1;
            if add.abs() < 1e-18 * sum.abs().max(1.0) || n > 200 {
                return sum;
            }
        }
    }

    #[test]
    fn si_at_zero_and_ten() {
        assert_eq!(sine_integral(0.0), 0.0);
        assert!((sine_integral(10.0) - 1.6583476).abs() < 1e-7);
        assert!((sine_integral(10.0) - si_series(10.0)).abs() < 1e-11);
    }

    #[test]
    fn si_matches_series_on_moderate_arguments() {
        for &s in &[0.1, 0.5, 1.0, 2.5, 5.0, 7.5, 12.0, 15.0] {
            assert!(
                (sine_integral(s) - si_series(s)).abs() < 1e-10,
                "s = {s}: {} vs {}",
                sine_integral(s),
                si_series(s)
            );
        }
    }

    #[test]
    fn si_expansion_is_continuous_at_switch() {
        let below = sine_integral(SI_ASYMPTOTIC_FROM - 1e-9);
        let above = sine_integral(SI_ASYMPTOTIC_FROM);
        assert!((below - above).abs() < 1e-9, "{below} vs {above}");
    }

    #[test]
    fn si_limits() {
        assert_eq!(sine_integral(f64::INFINITY), FRAC_PI_2);
        assert_eq!(sine_integral(f64::NEG_INFINITY), -FRAC_PI_2);
        assert!((sine_integral(1e6) - FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn filter_amplitude_at_dc() {
        let want = 2.0 * sine_integral(10.0) / PI;
        assert!((filter_amplitude(0.0, 10.0) - want).abs() < 1e-15);
        assert!((want - 1.05574).abs() < 1e-5);
        assert!(filter_amplitude(1e7, 10.0) < 1e-6);
    }

    #[test]
    fn reflection_prediction_values() {
        assert_eq!(asymptotic_reflection(3.0, 0.0, 10.0).unwrap(), 0.0);
        let r0 = asymptotic_reflection(0.0, 0.01, 10.0).unwrap();
        assert!((r0 - 1.1147e-4).abs() < 1e-8, "{r0}");
        assert!(matches!(
            asymptotic_reflection(0.0, 0.99, 10.0),
            Err(NftError::Domain(_))
        ));
    }

    #[test]
    fn single_eigenvalue_prediction_has_empty_product() {
        let b = CausalPolynomial::from_real(&[0.3, 0.1]).unwrap();
        let u = CausalPolynomial::from_real(&[0.9, -0.05]).unwrap();
        let lam = Complex64::new(0.0, 20.0);
        let eps = 1.0 / 512.0;
        let z = lambda_to_z(lam, eps).unwrap();
        let want = -(b.eval(z).unwrap() / u.eval(z).unwrap()) * Complex64::new(0.0, 40.0);
        let got = semi_asymptotic_norming(&b, &u, &[lam], 0, eps).unwrap();
        assert!((got - want).norm() < 1e-14);
    }

    #[test]
    fn coincident_eigenvalues_rejected() {
        let p = CausalPolynomial::one();
        let lam = Complex64::new(0.0, 1.0);
        assert!(semi_asymptotic_norming(&p, &p, &[lam, lam], 0, 0.01).is_err());
    }
}
