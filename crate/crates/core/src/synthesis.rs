//! Construction of a valid scattering pair `(a, b)` whose roots outside
//! the unit circle sit exactly at the prescribed eigenvalues.
//!
//! `a_ideal(z) = u(z) B(z)` with the Blaschke product
//! `B(z) = prod_k (z - z_k) / (1 - z conj(z_k))`. Since `|B| = 1` on the
//! unit circle, `|a_ideal|^2 + |b|^2 = 1` there. `a_ideal` is rational with
//! poles inside the circle, so its `z^{-1}` expansion decays geometrically
//! and truncating it to `D` terms costs only the reported tail energy.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{NftError, Result};
use crate::poly::CausalPolynomial;
use crate::specfact::{make_ub, FactorPair, FilterSpec, VALIDATION_OVERSAMPLING};

/// Largest acceptable energy in the truncated `a_ideal` tail.
pub const MAX_TAIL_ENERGY: f64 = 1e-4;

/// Oversampling of the grid on which `a_ideal` is sampled.
pub const IDEAL_OVERSAMPLING: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSpec {
    pub lambdas: Vec<Complex64>,
    pub delta: f64,
    pub d: usize,
    pub omega_c: f64,
}

impl SpectrumSpec {
    pub fn new(lambdas: Vec<Complex64>, delta: f64, d: usize, omega_c: f64) -> Result<Self> {
        let spec = Self {
            lambdas,
            delta,
            d,
            omega_c,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn eps(&self) -> f64 {
        1.0 / self.d as f64
    }

    pub fn filter(&self) -> Result<FilterSpec> {
        FilterSpec::new(self.d, self.omega_c, self.delta)
    }

    pub fn validate(&self) -> Result<()> {
        self.filter()?;
        let half_width = PI / (2.0 * self.eps());
        for (i, l) in self.lambdas.iter().enumerate() {
            if !(l.re.is_finite() && l.im.is_finite() && l.im > 0.0) {
                return Err(NftError::InvalidInput(format!(
                    "eigenvalue {l} is not in the open upper half-plane"
                )));
            }
            if l.re.abs() > half_width {
                return Err(NftError::InvalidInput(format!(
                    "eigenvalue {l} lies outside the strip |Re| <= {half_width}"
                )));
            }
            if self.lambdas[..i].contains(l) {
                return Err(NftError::InvalidInput(format!(
                    "eigenvalue {l} is repeated; only simple eigenvalues are supported"
                )));
            }
        }
        Ok(())
    }

    /// Eigenvalues mapped to the `z` plane.
    pub fn z_roots(&self) -> Result<Vec<Complex64>> {
        self.lambdas
            .iter()
            .map(|&l| lambda_to_z(l, self.eps()))
            .collect()
    }
}

/// `z = exp(-2 i lambda eps)`.
pub fn lambda_to_z(lambda: Complex64, eps: f64) -> Result<Complex64> {
    let half_width = PI / (2.0 * eps);
    if !(eps.is_finite() && eps > 0.0) || lambda.re.abs() > half_width * (1.0 + 1e-12) {
        return Err(NftError::Domain(format!(
            "Re(lambda) = {} outside [-{half_width}, {half_width}]",
            lambda.re
        )));
    }
    Ok((Complex64::new(0.0, -2.0 * eps) * lambda).exp())
}

/// Principal-branch inverse of [`lambda_to_z`].
pub fn z_to_lambda(z: Complex64, eps: f64) -> Result<Complex64> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(NftError::Domain("z = 0 has no spectral parameter".into()));
    }
    Ok(z.ln() / Complex64::new(0.0, -2.0 * eps))
}

/// Blaschke product `prod_k (z - z_k) / (1 - z conj(z_k))`.
pub fn blaschke_eval(z: Complex64, roots: &[Complex64]) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for &zk in roots {
        let den = Complex64::new(1.0, 0.0) - z * zk.conj();
        if den.norm() <= 1e-14 * (1.0 + z.norm() * zk.norm()) {
            return Err(NftError::Domain(format!(
                "Blaschke product evaluated at its pole {}",
                zk.conj().inv()
            )));
        }
        acc *= (z - zk) / den;
    }
    Ok(acc)
}

/// Rotation `-arg(a_0)` that synthesis applies to make the `z^0`
/// coefficient of `u B` real and positive. `B` tends to
/// `prod -1/conj(z_k)` as `z` grows, so this needs no sampling.
pub fn leading_phase(u: &CausalPolynomial, z_roots: &[Complex64]) -> f64 {
    let lead = z_roots
        .iter()
        .fold(u.coeff(0), |acc, &zk| acc * (-zk.conj().inv()));
    -lead.arg()
}

/// `max | |a|^2 + |b|^2 - 1 |` over a `16 D` point unit-circle grid.
pub fn unimodularity_residual(a: &CausalPolynomial, b: &CausalPolynomial) -> f64 {
    let d = a.len().max(b.len()).max(1);
    let m = (VALIDATION_OVERSAMPLING * d).next_power_of_two();
    let as_ = a.circle_samples(m).expect("grid exceeds polynomial length");
    let bs = b.circle_samples(m).expect("grid exceeds polynomial length");
    as_.iter()
        .zip(&bs)
        .map(|(x, y)| (x.norm_sqr() + y.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Polynomials `a(z)`, `b(z)` of length `D` handed to the inversion.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringPair {
    pub a: CausalPolynomial,
    pub b: CausalPolynomial,
    pub unimodularity_residual: f64,
    pub truncation_tail_energy: f64,
}

impl ScatteringPair {
    /// Wraps `a` and `b` (zero-padded to a common length) and measures
    /// their unimodularity residual.
    pub fn new(a: CausalPolynomial, b: CausalPolynomial) -> Self {
        let n = a.len().max(b.len());
        let (a, b) = (a.resized(n), b.resized(n));
        let unimodularity_residual = unimodularity_residual(&a, &b);
        Self {
            a,
            b,
            unimodularity_residual,
            truncation_tail_energy: 0.0,
        }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eps(&self) -> f64 {
        1.0 / self.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub a0: Complex64,
    pub a0_real_nonnegative: bool,
    pub residual: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Checks both conditions under which samples reproducing `(a, b)` exist:
/// `a_0` real and non-negative, and unimodularity on the circle.
pub fn validate_pair(pair: &ScatteringPair, tol: f64) -> ValidationReport {
    let a0 = pair.a.leading();
    let a0_real_nonnegative = a0.im.abs() <= tol && a0.re >= -tol;
    let residual = unimodularity_residual(&pair.a, &pair.b);
    ValidationReport {
        a0,
        a0_real_nonnegative,
        residual,
        tol,
        pass: a0_real_nonnegative && residual <= tol,
    }
}

/// Everything produced while synthesizing a pair.
#[derive(Debug, Clone)]
pub struct Synthesis {
    pub pair: ScatteringPair,
    pub factors: FactorPair,
    /// Phase applied to the truncated `a_ideal` so that `a_0 >= 0`.
    pub phase: f64,
    pub z_roots: Vec<Complex64>,
}

/// Synthesizes `(a, b)` for the prescribed eigenvalues.
pub fn synthesize_ab(spec: &SpectrumSpec) -> Result<Synthesis> {
    spec.validate()?;
    let factors = make_ub(&spec.filter()?)?;
    synthesize_with_factors(spec, factors)
}

/// Synthesis step after `u`, `b` are known; the filter design is
/// independent of the eigenvalues and may be reused across spectra.
pub fn synthesize_with_factors(spec: &SpectrumSpec, factors: FactorPair) -> Result<Synthesis> {
    let d = spec.d;
    if factors.u.len() != d || factors.b.len() != d {
        return Err(NftError::InvalidInput(format!(
            "factor length {} does not match D = {d}",
            factors.u.len()
        )));
    }
    let z_roots = spec.z_roots()?;
    let m = IDEAL_OVERSAMPLING * d;
    let mut samples = factors.u.circle_samples(m)?;
    for (k, s) in samples.iter_mut().enumerate() {
        let xi = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
        *s *= blaschke_eval(xi, &z_roots)?;
    }
    let (p, tail) = CausalPolynomial::from_circle(&samples, d)?;
    if tail > MAX_TAIL_ENERGY {
        return Err(NftError::TruncationTail {
            tail,
            limit: MAX_TAIL_ENERGY,
        });
    }
    let phase = -p.leading().arg();
    let mut a = p.scale(Complex64::from_polar(1.0, phase));
    // remove the rounding residue so that a_0 is exactly real
    let mut coeffs = a.clone().into_coeffs();
    coeffs[0] = Complex64::new(coeffs[0].norm(), 0.0);
    a = CausalPolynomial::new(coeffs)?;

    let mut pair = ScatteringPair::new(a, factors.b.clone());
    pair.truncation_tail_energy = tail;
    Ok(Synthesis {
        pair,
        factors,
        phase,
        z_roots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn coordinate_map_examples() {
        let eps = 1.0 / 512.0;
        assert_eq!(lambda_to_z(c(0.0, 0.0), eps).unwrap(), c(1.0, 0.0));
        let z = lambda_to_z(c(0.0, 20.0), eps).unwrap();
        assert!((z - c((40.0f64 / 512.0).exp(), 0.0)).norm() < 1e-15);
        assert!((z.re - 1.0812578).abs() < 1e-7);
        for &re in &[-800.0, -3.0, 0.5, 100.0, 804.0] {
            assert!((lambda_to_z(c(re, 0.0), eps).unwrap().norm() - 1.0).abs() < 1e-15);
        }
        let back = z_to_lambda(c(1.0812578, 0.0), eps).unwrap();
        assert!((back - c(0.0, 20.0)).norm() < 1e-4);
        assert_eq!(z_to_lambda(c(1.0, 0.0), eps).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn coordinate_map_errors() {
        assert!(lambda_to_z(c(1000.0, 1.0), 1.0 / 512.0).is_err());
        assert!(z_to_lambda(c(0.0, 0.0), 0.01).is_err());
    }

    #[test]
    fn blaschke_basic_identities() {
        assert_eq!(blaschke_eval(c(0.3, 0.2), &[]).unwrap(), c(1.0, 0.0));
        let roots = [c(1.2, 0.1), c(-0.3, 1.5)];
        assert_eq!(blaschke_eval(roots[1], &roots).unwrap(), c(0.0, 0.0));
        let pole = roots[0].conj().inv();
        assert!(matches!(
            blaschke_eval(pole, &roots),
            Err(NftError::Domain(_))
        ));
    }

    #[test]
    fn trivial_pairs_validate() {
        let one = CausalPolynomial::one();
        let zero = CausalPolynomial::zeros(1);
        let ok = validate_pair(&ScatteringPair::new(one.clone(), zero), 1e-6);
        assert!(ok.pass);
        assert_eq!(ok.residual, 0.0);
        let bad = validate_pair(&ScatteringPair::new(one.clone(), one), 1e-6);
        assert!(!bad.pass);
        assert!((bad.residual - 1.0).abs() < 1e-15);
    }

    #[test]
    fn negative_a0_fails_validation() {
        let a = CausalPolynomial::constant(c(-1.0, 0.0));
        let r = validate_pair(&ScatteringPair::new(a, CausalPolynomial::zeros(1)), 1e-6);
        assert!(!r.a0_real_nonnegative);
        assert!(!r.pass);
    }

    #[test]
    fn spec_validation() {
        let l = vec![c(0.0, 20.0)];
        assert!(SpectrumSpec::new(l.clone(), 0.01, 512, 10.0).is_ok());
        assert!(SpectrumSpec::new(l.clone(), 1.5, 512, 10.0).is_err());
        assert!(SpectrumSpec::new(l.clone(), 0.01, 500, 10.0).is_err());
        assert!(SpectrumSpec::new(vec![c(0.0, -1.0)], 0.01, 512, 10.0).is_err());
        assert!(SpectrumSpec::new(vec![c(0.0, 1.0); 2], 0.01, 512, 10.0).is_err());
        assert!(SpectrumSpec::new(vec![c(900.0, 1.0)], 0.01, 512, 10.0).is_err());
    }

    #[test]
    fn pure_radiation_synthesis() {
        let spec = SpectrumSpec::new(vec![], 0.01, 256, 10.0).unwrap();
        let syn = synthesize_ab(&spec).unwrap();
        assert!(syn.pair.unimodularity_residual <= 1e-7);
        // a = e^{i phi} u with phi = 0 because u_0 > 0
        for i in 0..256 {
            assert!((syn.pair.a.coeff(i) - syn.factors.u.coeff(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn a0_is_real_in_unit_interval() {
        let spec = SpectrumSpec::new(vec![c(0.0, 20.0)], 0.01, 256, 10.0).unwrap();
        let syn = synthesize_ab(&spec).unwrap();
        let a0 = syn.pair.a.leading();
        assert_eq!(a0.im, 0.0);
        assert!(a0.re > 0.0 && a0.re <= 1.0);
        assert!(validate_pair(&syn.pair, 1e-6).pass);
    }

    #[test]
    fn tail_energy_rejects_small_d() {
        // a root barely outside the unit circle decays too slowly for D = 8
        let spec = SpectrumSpec::new(vec![c(0.0, 0.05)], 0.01, 8, 10.0).unwrap();
        assert!(matches!(
            synthesize_ab(&spec),
            Err(NftError::TruncationTail { .. })
        ));
    }
}
