//! Recovery of the samples `Q[1..D]` from a scattering pair.
//!
//! One inverse step reads `Q[n] = -conj(b_0) / conj(a_0)` off the `z^0`
//! coefficients and applies
//!
//! ```text
//! [a_{n-1}]            1      [ 1       -Q ] [a_n]
//! [b_{n-1}] = z^{-1/2} ----- [ z conj(Q)  z ] [b_n],   theta = sqrt(1 + |Q|^2).
//!                      theta
//! ```
//!
//! The scalar `z^{-1/2}` multiplies both components and cancels in the
//! recovery ratio, so it is only counted ([`TransferMatrix::half_power`]).
//!
//! The `m`-th recovered sample depends on the first `m` coefficients of
//! `(a, b)` only. [`invert_fast`] exploits this: the leading half of the
//! coefficients yields `Q[D], ..., Q[D/2+1]` together with the transfer
//! matrix of those steps, which is then applied to the full pair with
//! fast polynomial products to continue on the remaining half.

use num_complex::Complex64;

use crate::error::{NftError, Result};
use crate::poly::{CausalPolynomial, LaurentPolynomial};
use crate::synthesis::{validate_pair, ScatteringPair};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `|a_0|` below which recovery is considered singular.
pub const SINGULAR_A0: f64 = 1e-14;

/// Unimodularity tolerance required before inverting.
pub const INVERSION_PAIR_TOL: f64 = 1e-4;

/// `D` scaled samples `Q[n] = eps q(-1 + n eps - eps/2)` on `[-1, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal {
    samples: Vec<Complex64>,
}

impl Signal {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        if samples.is_empty() || !samples.len().is_power_of_two() {
            return Err(NftError::NotPowerOfTwo(samples.len()));
        }
        if samples
            .iter()
            .any(|q| !q.re.is_finite() || !q.im.is_finite())
        {
            return Err(NftError::InvalidInput("non-finite sample".into()));
        }
        Ok(Self { samples })
    }

    /// Samples a pulse `q(t)` at the cell midpoints of `[-1, 0]`.
    pub fn from_pulse(d: usize, q: impl Fn(f64) -> Complex64) -> Result<Self> {
        let eps = 1.0 / d as f64;
        Self::new((1..=d).map(|n| q(time_of(n, eps)) * eps).collect())
    }

    /// `Q[1], ..., Q[D]` stored zero-based.
    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn eps(&self) -> f64 {
        1.0 / self.len() as f64
    }

    /// Time `t_n = -1 + n eps - eps/2` of the 1-based sample `n`.
    pub fn time(&self, n: usize) -> f64 {
        time_of(n, self.eps())
    }

    /// `prod_n (1 + |Q[n]|^2)`; equals `1 / a_0^2` for the generating pair.
    pub fn energy_product(&self) -> f64 {
        self.samples.iter().map(|q| 1.0 + q.norm_sqr()).product()
    }

    /// Relative mismatch of `prod (1 + |Q|^2) = 1 / a_0^2`.
    pub fn energy_identity_residual(&self, a0: f64) -> f64 {
        let lhs = self.energy_product() * a0 * a0;
        (lhs - 1.0).abs()
    }
}

fn time_of(n: usize, eps: f64) -> f64 {
    -1.0 + n as f64 * eps - eps / 2.0
}

fn theta(q: Complex64) -> f64 {
    (1.0 + q.norm_sqr()).sqrt()
}

/// 2x2 matrix of Laurent polynomials; represents `z^{-h/2} * entries` with
/// `h = half_power`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferMatrix {
    pub entries: [[LaurentPolynomial; 2]; 2],
    pub half_power: i64,
}

impl TransferMatrix {
    pub fn identity() -> Self {
        let one = LaurentPolynomial::constant(Complex64::new(1.0, 0.0));
        let zero = LaurentPolynomial::zero();
        Self {
            entries: [[one.clone(), zero.clone()], [zero, one]],
            half_power: 0,
        }
    }

    /// Single inverse step for sample `q`.
    pub fn step(q: Complex64) -> Self {
        let t = theta(q);
        let s = 1.0 / t;
        Self {
            entries: [
                [
                    LaurentPolynomial::constant(Complex64::new(s, 0.0)),
                    LaurentPolynomial::constant(-q * s),
                ],
                [
                    LaurentPolynomial::monomial(1, q.conj() * s),
                    LaurentPolynomial::monomial(1, Complex64::new(s, 0.0)),
                ],
            ],
            half_power: 1,
        }
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let e = &self.entries;
        let r = &rhs.entries;
        let entry = |i: usize, j: usize| e[i][0].mul(&r[0][j]).add(&e[i][1].mul(&r[1][j]));
        Self {
            entries: [[entry(0, 0), entry(0, 1)], [entry(1, 0), entry(1, 1)]],
            half_power: self.half_power + rhs.half_power,
        }
    }

    /// Determinant of the entries (without the `z^{-h/2}` scalar); a product
    /// of `h` inverse steps gives exactly `z^h`.
    pub fn determinant(&self) -> LaurentPolynomial {
        let e = &self.entries;
        e[0][0].mul(&e[1][1]).sub(&e[0][1].mul(&e[1][0]))
    }

    /// First `keep` causal coefficients of `entries * (a, b)`.
    pub fn apply_window(
        &self,
        a: &CausalPolynomial,
        b: &CausalPolynomial,
        keep: usize,
    ) -> (CausalPolynomial, CausalPolynomial) {
        let (la, lb) = (a.to_laurent(), b.to_laurent());
        let e = &self.entries;
        let top = e[0][0].mul(&la).add(&e[0][1].mul(&lb));
        let bottom = e[1][0].mul(&la).add(&e[1][1].mul(&lb));
        (top.causal_window(keep), bottom.causal_window(keep))
    }
}

/// `Q = -conj(b_0) / conj(a_0)`.
pub fn recover_sample(a: &CausalPolynomial, b: &CausalPolynomial) -> Result<Complex64> {
    recover_at(a.leading(), b.leading(), 0)
}

fn recover_at(a0: Complex64, b0: Complex64, step: usize) -> Result<Complex64> {
    if a0.norm() < SINGULAR_A0 {
        return Err(NftError::SingularRecovery {
            step,
            a0: a0.norm(),
        });
    }
    Ok(-b0.conj() / a0.conj())
}

/// One inverse step. The input length `L` shrinks to `max(L - 1, 1)`: the
/// top coefficient of `a` vanishes for a consistent `q` and the
/// `z^1` term of `b` is dropped.
pub fn step_inverse(
    a: &CausalPolynomial,
    b: &CausalPolynomial,
    q: Complex64,
) -> (CausalPolynomial, CausalPolynomial) {
    let len = a.len().max(b.len());
    let out = (len - 1).max(1);
    let s = 1.0 / theta(q);
    let qc = q.conj();
    let na = (0..out)
        .map(|i| (a.coeff(i) - q * b.coeff(i)) * s)
        .collect();
    let nb = (0..out)
        .map(|i| (qc * a.coeff(i + 1) + b.coeff(i + 1)) * s)
        .collect();
    (
        CausalPolynomial::new(na).expect("finite"),
        CausalPolynomial::new(nb).expect("finite"),
    )
}

fn check_pair(pair: &ScatteringPair) -> Result<()> {
    let report = validate_pair(pair, INVERSION_PAIR_TOL);
    if !report.pass {
        return Err(NftError::InvalidPair(format!(
            "a0 = {}, unimodularity residual = {:.3e}",
            report.a0, report.residual
        )));
    }
    Ok(())
}

/// Layer peeling: `D` recoveries and steps, `O(D^2)` operations.
pub fn invert_sequential(pair: &ScatteringPair) -> Result<Signal> {
    check_pair(pair)?;
    let d = pair.len();
    let mut a = pair.a.coeffs().to_vec();
    let mut b = pair.b.coeffs().to_vec();
    let mut q = vec![ZERO; d];
    for n in (1..=d).rev() {
        // `a`, `b` hold n coefficients here
        let qn = recover_at(a[0], b[0], n)?;
        q[n - 1] = qn;
        let s = 1.0 / theta(qn);
        let qc = qn.conj();
        let len = a.len();
        for i in 0..len {
            let (ai, bi) = (a[i], b[i]);
            a[i] = (ai - qn * bi) * s;
            let (an, bn) = if i + 1 < len {
                (a[i + 1], b[i + 1])
            } else {
                (ZERO, ZERO)
            };
            b[i] = (qc * an + bn) * s;
        }
        if len > 1 {
            a.truncate(len - 1);
            b.truncate(len - 1);
        }
    }
    Signal::new(q)
}

/// Divide-and-conquer inversion in `O(D log^2 D)` operations. Returns the
/// samples and the transfer matrix `T_1 T_2 ... T_D`, which maps `(a, b)`
/// back to the trivial state `(1, 0)`.
pub fn invert_fast(pair: &ScatteringPair) -> Result<(Signal, TransferMatrix)> {
    let d = pair.len();
    if !d.is_power_of_two() {
        return Err(NftError::NotPowerOfTwo(d));
    }
    check_pair(pair)?;
    let mut q = vec![ZERO; d];
    let t = invert_rec(&pair.a, &pair.b, &mut q)?;
    Ok((Signal::new(q)?, t))
}

/// Recovers `q[n-1] = Q[n]` for `n = N..1`, `N = q.len()`, from the first
/// `N` coefficients of `(a, b)`.
fn invert_rec(
    a: &CausalPolynomial,
    b: &CausalPolynomial,
    q: &mut [Complex64],
) -> Result<TransferMatrix> {
    let n = q.len();
    if n == 1 {
        let qn = recover_at(a.leading(), b.leading(), 1)?;
        q[0] = qn;
        return Ok(TransferMatrix::step(qn));
    }
    let half = n / 2;
    let (lower, upper) = q.split_at_mut(half);
    let upper_t =
        invert_rec(&a.resized(half), &b.resized(half), upper).map_err(|e| shift_step(e, half))?;
    let (a_mid, b_mid) = upper_t.apply_window(a, b, half);
    let lower_t = invert_rec(&a_mid, &b_mid, lower)?;
    Ok(lower_t.mul(&upper_t))
}

fn shift_step(err: NftError, by: usize) -> NftError {
    match err {
        NftError::SingularRecovery { step, a0 } => NftError::SingularRecovery {
            step: step + by,
            a0,
        },
        other => other,
    }
}
