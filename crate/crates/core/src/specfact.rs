//! Low-pass filter design and cepstral spectral factorization.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{NftError, Result};
use crate::fft;
use crate::poly::CausalPolynomial;

/// Added inside the logarithm so that stopband zeros stay finite.
pub const LOG_FLOOR: f64 = 1e-20;

/// Minimum ratio of factorization grid size to polynomial degree.
pub const FACTOR_OVERSAMPLING: usize = 8;

/// Grid density (relative to `D`) used to validate factor pairs.
pub const VALIDATION_OVERSAMPLING: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub d: usize,
    pub omega_c: f64,
    pub delta: f64,
}

impl FilterSpec {
    pub fn new(d: usize, omega_c: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(NftError::InvalidInput(format!(
                "delta out of range (0, 1): {delta}"
            )));
        }
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(NftError::InvalidInput(format!(
                "omega_c must be positive: {omega_c}"
            )));
        }
        if d < 2 || !d.is_power_of_two() {
            return Err(NftError::NotPowerOfTwo(d));
        }
        Ok(Self { d, omega_c, delta })
    }
}

/// Spectral factors `u`, `b` with `|u|^2 = 1 - d^2|psi|^2` and
/// `|b|^2 = d^2|psi|^2` on the unit circle.
#[derive(Debug, Clone)]
pub struct FactorPair {
    pub u: CausalPolynomial,
    pub b: CausalPolynomial,
    pub psi: CausalPolynomial,
    /// `max | |u|^2 + |b|^2 - 1 |` on a `16 D` grid.
    pub residual: f64,
    /// `max | |b|^2 - d^2 |psi|^2 |` on the same grid.
    pub b_power_error: f64,
    /// Largest `|psi|` seen on the factorization grid.
    pub psi_peak: f64,
}

fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        (PI * x).sin() / (PI * x)
    }
}

/// Truncated ideal low-pass,
/// `psi_i = r sinc(r (i - (D-1)/2))` with `r = 2 wc / (D pi)`.
pub fn design_lowpass(d: usize, omega_c: f64) -> Result<CausalPolynomial> {
    if d < 2 {
        return Err(NftError::InvalidInput(format!(
            "filter length must be at least 2, got {d}"
        )));
    }
    let r = 2.0 * omega_c / (d as f64 * PI);
    let center = (d as f64 - 1.0) / 2.0;
    let half: Vec<f64> = (0..d.div_ceil(2))
        .map(|i| r * sinc(r * (i as f64 - center)))
        .collect();
    // mirror so that psi_i == psi_{D-1-i} bit for bit
    let coeffs = (0..d)
        .map(|i| {
            let j = if i < half.len() { i } else { d - 1 - i };
            Complex64::new(half[j], 0.0)
        })
        .collect();
    CausalPolynomial::new(coeffs)
}

/// Minimum-phase factor `m(z)` with `|m(xi)|^2 = power` on the grid
/// `xi_k = exp(2 pi i k / M)`, `M = power.len()`.
///
/// Cepstral method: log, inverse FFT, fold onto the causal half, FFT,
/// exponentiate, inverse FFT. Returns `degree + 1` coefficients.
pub fn spectral_factor(power: &[f64], degree: usize) -> Result<CausalPolynomial> {
    spectral_factor_with_tail(power, degree).map(|(p, _)| p)
}

/// Like [`spectral_factor`] but also reports the energy of the discarded
/// coefficients beyond `degree`.
pub fn spectral_factor_with_tail(power: &[f64], degree: usize) -> Result<(CausalPolynomial, f64)> {
    let m = power.len();
    if m < FACTOR_OVERSAMPLING * degree.max(1) {
        return Err(NftError::InvalidInput(format!(
            "grid of {m} points is below {FACTOR_OVERSAMPLING}x oversampling for degree {degree}"
        )));
    }
    if let Some(bad) = power.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(NftError::Domain(format!(
            "power spectrum sample {bad} is not a finite non-negative number"
        )));
    }
    if power.iter().all(|&p| p == 0.0) {
        return Err(NftError::DegenerateSpectrum);
    }
    let mut cep: Vec<Complex64> = power
        .iter()
        .map(|&p| Complex64::new((p + LOG_FLOOR).ln(), 0.0))
        .collect();
    fft::inverse(&mut cep);
    // log|m|^2 -> log m: halve c_0 (and Nyquist), keep positive quefrencies
    // (they multiply z^{-n}), drop the anti-causal half
    let half = m / 2;
    cep[0] *= 0.5;
    for c in cep.iter_mut().skip(half + 1) {
        *c = Complex64::new(0.0, 0.0);
    }
    if m.is_multiple_of(2) && half > 0 {
        cep[half] *= 0.5;
    }
    fft::forward(&mut cep);
    for v in cep.iter_mut() {
        *v = v.exp();
    }
    CausalPolynomial::from_circle(&cep, degree + 1)
}

/// Unit-circle grid index to frequency `omega` with `z = exp(-2 i omega / D)`.
pub(crate) fn grid_omega(k: usize, m: usize, d: usize) -> f64 {
    let mut theta = 2.0 * PI * k as f64 / m as f64;
    if theta > PI {
        theta -= 2.0 * PI;
    }
    -theta * d as f64 / 2.0
}

/// Builds `u` and `b` for the given filter parameters.
pub fn make_ub(spec: &FilterSpec) -> Result<FactorPair> {
    let psi = design_lowpass(spec.d, spec.omega_c)?;
    let m = FACTOR_OVERSAMPLING * spec.d;
    let psi_s = psi.circle_samples(m)?;
    let d2 = spec.delta * spec.delta;
    let mut psi_peak = 0.0f64;
    let mut worst = (0usize, 0.0f64);
    for (k, v) in psi_s.iter().enumerate() {
        let a = v.norm();
        psi_peak = psi_peak.max(a);
        if spec.delta * a > worst.1 {
            worst = (k, spec.delta * a);
        }
    }
    if worst.1 >= 1.0 {
        return Err(NftError::FilterGain {
            omega: grid_omega(worst.0, m, spec.d),
            value: worst.1,
        });
    }
    let power_b: Vec<f64> = psi_s.iter().map(|v| d2 * v.norm_sqr()).collect();
    let b = spectral_factor(&power_b, spec.d - 1)?;
    // factor u against the b actually obtained: the stopband floor then
    // perturbs |b| slightly but not |u|^2 + |b|^2
    let power_u: Vec<f64> = b
        .circle_samples(m)?
        .iter()
        .map(|v| 1.0 - v.norm_sqr())
        .collect();
    let u = spectral_factor(&power_u, spec.d - 1)?;

    let check = VALIDATION_OVERSAMPLING * spec.d;
    let us = u.circle_samples(check)?;
    let bs = b.circle_samples(check)?;
    let ps = psi.circle_samples(check)?;
    let mut residual = 0.0f64;
    let mut b_power_error = 0.0f64;
    for ((uv, bv), pv) in us.iter().zip(&bs).zip(&ps) {
        residual = residual.max((uv.norm_sqr() + bv.norm_sqr() - 1.0).abs());
        b_power_error = b_power_error.max((bv.norm_sqr() - d2 * pv.norm_sqr()).abs());
    }
    Ok(FactorPair {
        u,
        b,
        psi,
        residual,
        b_power_error,
        psi_peak,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lowpass_center_and_symmetry() {
        let psi = design_lowpass(512, 10.0).unwrap();
        let r = 20.0 / (512.0 * PI);
        let x = r * 0.5;
        let want = r * (PI * x).sin() / (PI * x);
        assert!((psi.coeff(255).re - want).abs() < 1e-17);
        assert!((psi.coeff(256).re - 0.0124340).abs() < 1e-6);
        assert_eq!(psi.coeff(255), psi.coeff(256));
        for i in 0..512 {
            assert_eq!(psi.coeff(i), psi.coeff(511 - i));
            assert_eq!(psi.coeff(i).im, 0.0);
        }
    }

    #[test]
    fn lowpass_rejects_tiny_length() {
        assert!(design_lowpass(1, 10.0).is_err());
    }

    #[test]
    fn flat_spectrum_factors_to_constant() {
        let p = spectral_factor(&[4.0; 64], 3).unwrap();
        assert!((p.coeff(0) - c(2.0, 0.0)).norm() < 1e-12);
        for i in 1..4 {
            assert!(p.coeff(i).norm() < 1e-12);
        }
    }

    #[test]
    fn recovers_minimum_phase_first_order() {
        let m = 64;
        let power: Vec<f64> = (0..m)
            .map(|k| {
                let z = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
                (c(1.0, 0.0) + 0.5 / z).norm_sqr()
            })
            .collect();
        let p = spectral_factor(&power, 1).unwrap();
        assert!((p.coeff(0) - c(1.0, 0.0)).norm() < 1e-8);
        assert!((p.coeff(1) - c(0.5, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn factorization_errors() {
        assert!(matches!(
            spectral_factor(&[0.0; 16], 1),
            Err(NftError::DegenerateSpectrum)
        ));
        let mut p = vec![1.0; 16];
        p[3] = -0.1;
        assert!(matches!(spectral_factor(&p, 1), Err(NftError::Domain(_))));
        assert!(spectral_factor(&[1.0; 8], 4).is_err());
    }

    #[test]
    fn filter_spec_validation() {
        assert!(FilterSpec::new(512, 10.0, 1.5).is_err());
        assert!(FilterSpec::new(500, 10.0, 0.01).is_err());
        assert!(FilterSpec::new(512, -1.0, 0.01).is_err());
        assert!(FilterSpec::new(512, 10.0, 0.01).is_ok());
    }

    #[test]
    fn vanishing_contrast() {
        let fp = make_ub(&FilterSpec::new(256, 10.0, 1e-8).unwrap()).unwrap();
        let bs = fp.b.circle_samples(16 * 256).unwrap();
        let us = fp.u.circle_samples(16 * 256).unwrap();
        assert!(bs.iter().all(|v| v.norm() <= 2e-8));
        assert!(us.iter().all(|v| (v - c(1.0, 0.0)).norm() <= 1e-12));
    }

    #[test]
    fn u_complements_b_and_tracks_prescribed_power() {
        let spec = FilterSpec::new(512, 10.0, 0.01).unwrap();
        let fp = make_ub(&spec).unwrap();
        let m = 16 * 512;
        let us = fp.u.circle_samples(m).unwrap();
        let ps = fp.psi.circle_samples(m).unwrap();
        let worst = us
            .iter()
            .zip(&ps)
            .map(|(u, p)| (u.norm_sqr() - (1.0 - 1e-4 * p.norm_sqr())).abs())
            .fold(0.0, f64::max);
        // u is built from the computed b, so it inherits b's deviation from
        // the target power and nothing more
        assert!(fp.residual <= 1e-12, "residual {}", fp.residual);
        assert!(
            fp.b_power_error <= 1e-7,
            "b power error {}",
            fp.b_power_error
        );
        assert!(worst <= fp.b_power_error * (1.0 + 1e-6) + 1e-14, "{worst}");
    }

    #[test]
    fn excessive_gain_is_reported_with_frequency() {
        // psi peaks near 1.09; delta = 0.95 pushes delta*|psi| above one
        let err = make_ub(&FilterSpec::new(64, 10.0, 0.95).unwrap()).unwrap_err();
        match err {
            NftError::FilterGain { omega, value } => {
                assert!(value >= 1.0);
                assert!(omega.abs() <= 10.0 * 1.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
