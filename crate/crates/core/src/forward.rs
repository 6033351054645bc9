//! Forward discrete nonlinear Fourier transform.
//!
//! Each sample contributes the normalized matrix
//!
//! ```text
//!            z^{1/2}   [ 1          z^{-1} Q ]
//!  M_n = -------------- [                    ],
//!        sqrt(1+|Q|^2) [ -conj(Q)   z^{-1}   ]
//! ```
//!
//! starting from `z^{-D/2} (1, 0)`. The half powers add up to zero after
//! `D` steps, leaving `a(z)` and `b(z)` as polynomials in `z^{-1}` with
//! `D` coefficients.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{NftError, Result};
use crate::inverse::Signal;
use crate::poly::CausalPolynomial;
use crate::roots::{polish_root, polynomial_roots};
use crate::synthesis::{lambda_to_z, z_to_lambda, ScatteringPair};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Roots closer than this to the unit circle are not eigenvalues.
pub const ROOT_MIN_MODULUS_GAP: f64 = 1e-6;

/// Pole flag threshold on `|a(z(w))|`.
pub const POLE_THRESHOLD: f64 = 1e-12;

/// Reflection grid density relative to `D`.
pub const REFLECTION_OVERSAMPLING: usize = 4;

/// `(a, b)` during the forward recursion; `half_power` is the exponent of
/// the pending `z^{1/2}` scalar.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringState {
    pub a: CausalPolynomial,
    pub b: CausalPolynomial,
    pub half_power: i64,
}

impl ScatteringState {
    /// `z^{-D/2} (1, 0)`.
    pub fn initial(d: usize) -> Self {
        Self {
            a: CausalPolynomial::one(),
            b: CausalPolynomial::zeros(1),
            half_power: -(d as i64),
        }
    }
}

fn theta(q: Complex64) -> f64 {
    (1.0 + q.norm_sqr()).sqrt()
}

/// Applies one sample. The coefficient sequences grow by one.
pub fn forward_step(state: &ScatteringState, q: Complex64) -> ScatteringState {
    let len = state.a.len().max(state.b.len()) + 1;
    let s = 1.0 / theta(q);
    let qc = q.conj();
    let (a, b) = (&state.a, &state.b);
    let shifted_b = |i: usize| if i == 0 { ZERO } else { b.coeff(i - 1) };
    let na = (0..len)
        .map(|i| (a.coeff(i) + q * shifted_b(i)) * s)
        .collect();
    let nb = (0..len)
        .map(|i| (-qc * a.coeff(i) + shifted_b(i)) * s)
        .collect();
    ScatteringState {
        a: CausalPolynomial::new(na).expect("finite"),
        b: CausalPolynomial::new(nb).expect("finite"),
        half_power: state.half_power + 1,
    }
}

/// `D` forward steps, `O(D^2)` operations.
pub fn forward_sequential(signal: &Signal) -> ScatteringPair {
    let d = signal.len();
    let mut a = vec![ZERO; d];
    let mut b = vec![ZERO; d];
    a[0] = Complex64::new(1.0, 0.0);
    for (n, &q) in signal.samples().iter().enumerate() {
        // step n writes coefficients 0..=n+1, the last one is dropped at the end
        let s = 1.0 / theta(q);
        let qc = q.conj();
        let top = (n + 2).min(d);
        for i in (0..top).rev() {
            let bprev = if i == 0 { ZERO } else { b[i - 1] };
            let ai = a[i];
            a[i] = (ai + q * bprev) * s;
            b[i] = (-qc * ai + bprev) * s;
        }
    }
    ScatteringPair::new(
        CausalPolynomial::new(a).expect("finite"),
        CausalPolynomial::new(b).expect("finite"),
    )
}

type Matrix = [[CausalPolynomial; 2]; 2];

fn leaf(q: Complex64) -> Matrix {
    let s = 1.0 / theta(q);
    let c = |v: Complex64| Complex64::new(v.re * s, v.im * s);
    let poly = |v: Vec<Complex64>| CausalPolynomial::new(v).expect("finite");
    [
        [
            poly(vec![c(Complex64::new(1.0, 0.0))]),
            poly(vec![ZERO, c(q)]),
        ],
        [
            poly(vec![c(-q.conj())]),
            poly(vec![ZERO, c(Complex64::new(1.0, 0.0))]),
        ],
    ]
}

fn mat_mul(l: &Matrix, r: &Matrix) -> Matrix {
    let entry = |i: usize, j: usize| l[i][0].mul(&r[0][j]).add(&l[i][1].mul(&r[1][j]));
    [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]]
}

/// `M_{hi} ... M_{lo+1}` for the samples `q[lo..hi]`.
fn tree_product(q: &[Complex64]) -> Matrix {
    if q.len() == 1 {
        return leaf(q[0]);
    }
    let mid = q.len() / 2;
    let early = tree_product(&q[..mid]);
    let late = tree_product(&q[mid..]);
    mat_mul(&late, &early)
}

/// Tree-structured product of the sample matrices with fast polynomial
/// multiplication, `O(D log^2 D)` operations.
pub fn forward_fast(signal: &Signal) -> Result<ScatteringPair> {
    let d = signal.len();
    if !d.is_power_of_two() {
        return Err(NftError::NotPowerOfTwo(d));
    }
    let q = signal.samples();
    if d == 1 {
        let m = leaf(q[0]);
        return Ok(ScatteringPair::new(m[0][0].resized(1), m[1][0].resized(1)));
    }
    // only the first column is needed at the root
    let early = tree_product(&q[..d / 2]);
    let late = tree_product(&q[d / 2..]);
    let a = late[0][0]
        .mul(&early[0][0])
        .add(&late[0][1].mul(&early[1][0]));
    let b = late[1][0]
        .mul(&early[0][0])
        .add(&late[1][1].mul(&early[1][0]));
    Ok(ScatteringPair::new(a.resized(d), b.resized(d)))
}

/// One reflection-coefficient sample; `value` is `None` at a pole.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionSample {
    pub omega: f64,
    pub value: Option<Complex64>,
}

fn check_strip(omega: f64, eps: f64) -> Result<()> {
    let w = PI / (2.0 * eps);
    if !omega.is_finite() || omega.abs() > w * (1.0 + 1e-12) {
        return Err(NftError::Domain(format!(
            "omega = {omega} outside [-{w}, {w}]"
        )));
    }
    Ok(())
}

/// `Q(w) = b(z(w)) / a(z(w))` on an arbitrary frequency grid.
pub fn reflection_coefficient(
    pair: &ScatteringPair,
    omegas: &[f64],
) -> Result<Vec<ReflectionSample>> {
    let eps = pair.eps();
    omegas
        .iter()
        .map(|&omega| {
            check_strip(omega, eps)?;
            let z = lambda_to_z(Complex64::new(omega, 0.0), eps)?;
            let av = pair.a.eval(z)?;
            let bv = pair.b.eval(z)?;
            Ok(ReflectionSample {
                omega,
                value: (av.norm() >= POLE_THRESHOLD).then(|| bv / av),
            })
        })
        .collect()
}

/// Symmetric grid of `M + 1` frequencies covering `[-pi/(2 eps), pi/(2 eps)]`
/// with `M = 4 D`.
pub fn default_omega_grid(d: usize) -> Vec<f64> {
    let m = REFLECTION_OVERSAMPLING * d;
    let step = PI * d as f64 / m as f64;
    let half = m / 2;
    (0..=m).map(|j| (j as f64 - half as f64) * step).collect()
}

/// [`reflection_coefficient`] on [`default_omega_grid`], evaluated with two FFTs.
pub fn reflection_default_grid(pair: &ScatteringPair) -> Result<Vec<ReflectionSample>> {
    let d = pair.len();
    let m = REFLECTION_OVERSAMPLING * d;
    let as_ = pair.a.circle_samples(m)?;
    let bs = pair.b.circle_samples(m)?;
    let grid = default_omega_grid(d);
    let half = m / 2;
    Ok(grid
        .iter()
        .enumerate()
        .map(|(j, &omega)| {
            // z(w_j) = exp(i (pi - 2 pi j / M)) is grid point (M/2 - j) mod M
            let k = (half + m - j % m) % m;
            let av = as_[k];
            ReflectionSample {
                omega,
                value: (av.norm() >= POLE_THRESHOLD).then(|| bs[k] / av),
            }
        })
        .collect())
}

/// Trapezoidal `integral |Q(w)|^2 dw` over the samples, which must be sorted
/// by frequency. Intervals touching a pole are skipped.
pub fn radiation_energy(samples: &[ReflectionSample]) -> f64 {
    samples
        .windows(2)
        .filter_map(|w| {
            let (l, r) = (w[0].value?, w[1].value?);
            Some(0.5 * (l.norm_sqr() + r.norm_sqr()) * (w[1].omega - w[0].omega))
        })
        .sum()
}

fn descending(a: &CausalPolynomial) -> Vec<Complex64> {
    // z^{N-1} a(z) = a_0 z^{N-1} + a_1 z^{N-2} + ... + a_{N-1}
    a.coeffs().to_vec()
}

/// Whether `z` lies in the region where eigenvalues are accepted,
/// `1 + 1e-6 < |z| < e^pi`.
pub fn in_eigenvalue_annulus(z: Complex64) -> bool {
    let r = z.norm();
    r > 1.0 + ROOT_MIN_MODULUS_GAP && r < PI.exp()
}

/// Roots of `a(z)` outside the unit circle, after the annulus filter.
/// Sorted by increasing modulus.
pub fn find_eigenvalues(a: &CausalPolynomial) -> Result<Vec<Complex64>> {
    if a.len() < 2 {
        return Ok(Vec::new());
    }
    if a.leading() == ZERO {
        return Err(NftError::InvalidInput(
            "a(z) has a zero z^0 coefficient".into(),
        ));
    }
    let desc = descending(a);
    let mut roots: Vec<Complex64> = polynomial_roots(&desc)?
        .into_iter()
        .filter(|z| z.norm() > 1.0)
        .map(|z| polish_root(&desc, z, 8))
        .filter(|&z| in_eigenvalue_annulus(z))
        .collect();
    roots.sort_by(|x, y| x.norm().total_cmp(&y.norm()));
    Ok(roots)
}

/// Newton refinement of an approximate eigenvalue on `a(z)`; for large `D`
/// where the companion matrix becomes expensive.
pub fn refine_eigenvalue(a: &CausalPolynomial, guess: Complex64) -> Complex64 {
    polish_root(&descending(a), guess, 50)
}

/// `Q_k = -b(z_k) / (2 i eps z_k) / a'(z_k)`.
pub fn norming_constants(pair: &ScatteringPair, z_list: &[Complex64]) -> Result<Vec<Complex64>> {
    let eps = pair.eps();
    let da = pair.a.dz();
    z_list
        .iter()
        .map(|&z| {
            let av = pair.a.eval(z)?;
            let scale: f64 = pair
                .a
                .coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| c.norm() * z.norm().powi(-(i as i32)))
                .sum();
            if av.norm() > 1e-6 * scale.max(1.0) {
                return Err(NftError::NotARoot(format!("{z} (|a| = {:.3e})", av.norm())));
            }
            let dv = da.eval(z)?;
            if dv.norm() < 1e-12 {
                return Err(NftError::MultipleRoot(z.to_string()));
            }
            let bv = pair.b.eval(z)?;
            Ok(-bv / (Complex64::new(0.0, 2.0 * eps) * z) / dv)
        })
        .collect()
}

/// Discrete nonlinear Fourier spectrum of a pair.
#[derive(Debug, Clone, PartialEq)]
pub struct NftSpectrum {
    pub eps: f64,
    pub reflection: Vec<ReflectionSample>,
    pub eigen_z: Vec<Complex64>,
    pub eigen_lambda: Vec<Complex64>,
    pub norming: Vec<Complex64>,
}

impl NftSpectrum {
    /// Full spectrum: default-grid reflection coefficient, companion-matrix
    /// eigenvalues and their norming constants.
    pub fn of_pair(pair: &ScatteringPair) -> Result<Self> {
        let eigen_z = find_eigenvalues(&pair.a)?;
        Self::with_eigenvalues(pair, eigen_z)
    }

    /// Like [`of_pair`](Self::of_pair) with externally located eigenvalues.
    pub fn with_eigenvalues(pair: &ScatteringPair, eigen_z: Vec<Complex64>) -> Result<Self> {
        let eps = pair.eps();
        let reflection = reflection_default_grid(pair)?;
        let eigen_lambda = eigen_z
            .iter()
            .map(|&z| z_to_lambda(z, eps))
            .collect::<Result<_>>()?;
        let norming = norming_constants(pair, &eigen_z)?;
        Ok(Self {
            eps,
            reflection,
            eigen_z,
            eigen_lambda,
            norming,
        })
    }
}

/// Spectrum of `q(t - t0)`.
pub fn shift_spectrum(spec: &NftSpectrum, t0: f64) -> NftSpectrum {
    let i = Complex64::new(0.0, 1.0);
    let mut out = spec.clone();
    for s in out.reflection.iter_mut() {
        if let Some(v) = s.value.as_mut() {
            *v *= (-2.0 * i * s.omega * t0).exp();
        }
    }
    for (qt, &l) in out.norming.iter_mut().zip(&spec.eigen_lambda) {
        *qt *= (-2.0 * i * l * t0).exp();
    }
    out
}

/// Spectrum of `eta q(eta t)`: eigenvalues and frequencies scale by `eta`,
/// norming constants by `eta`. `eta` must be positive so that eigenvalues
/// stay in the upper half-plane.
pub fn dilate_spectrum(spec: &NftSpectrum, eta: f64) -> Result<NftSpectrum> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(NftError::Domain(format!(
            "dilation factor {eta} must be positive"
        )));
    }
    let mut out = spec.clone();
    for s in out.reflection.iter_mut() {
        s.omega *= eta;
    }
    out.eigen_lambda = spec.eigen_lambda.iter().map(|l| l * eta).collect();
    out.norming = spec.norming.iter().map(|q| q * eta).collect();
    out.eigen_z = Vec::with_capacity(out.eigen_lambda.len());
    for &l in &out.eigen_lambda {
        out.eigen_z.push(lambda_to_z(l, spec.eps)?);
    }
    Ok(out)
}

/// Scales prescribed eigenvalues by `eta`.
pub fn dilate_eigenvalues(lambdas: &[Complex64], eta: f64) -> Result<Vec<Complex64>> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(NftError::Domain(format!(
            "dilation factor {eta} must be positive"
        )));
    }
    Ok(lambdas.iter().map(|l| l * eta).collect())
}
