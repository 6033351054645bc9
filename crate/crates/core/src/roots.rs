//! Polynomial roots as eigenvalues of the companion matrix.
//!
//! The companion matrix is already upper Hessenberg, so the eigenvalues
//! come straight from shifted QR iterations with Givens rotations and
//! deflation; no reduction step is needed.

use num_complex::Complex64;

use crate::error::{NftError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MAX_ITER_PER_EIGENVALUE: usize = 60;

fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Eigenvalues of an upper Hessenberg matrix stored row-major (`n * n`).
fn hessenberg_eigenvalues(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    let idx = |r: usize, c: usize| r * n + c;
    let mut eig = vec![ZERO; n];
    if n == 0 {
        return Ok(eig);
    }
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut rot = Vec::with_capacity(n);
    loop {
        if hi == 0 {
            eig[0] = h[idx(0, 0)];
            break;
        }
        // look for a negligible subdiagonal entry
        let mut lo = hi;
        while lo > 0 {
            let s = abs1(h[idx(lo - 1, lo - 1)]) + abs1(h[idx(lo, lo)]);
            let sub = abs1(h[idx(lo, lo - 1)]);
            if sub <= f64::EPSILON * s || sub < f64::MIN_POSITIVE {
                h[idx(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eig[hi] = h[idx(hi, hi)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > MAX_ITER_PER_EIGENVALUE {
            return Err(NftError::NoConvergence(iter));
        }
        // Wilkinson shift from the trailing 2x2 block
        let a = h[idx(hi - 1, hi - 1)];
        let b = h[idx(hi - 1, hi)];
        let c = h[idx(hi, hi - 1)];
        let d = h[idx(hi, hi)];
        let shift = if iter % 11 == 10 {
            // exceptional shift to break cycles
            d + Complex64::new(0.75 * abs1(c), 0.0)
        } else {
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let mu1 = d - b * c / (half + disc);
            let mu2 = d - b * c / (half - disc);
            let pick = |m: Complex64| {
                if m.re.is_finite() && m.im.is_finite() {
                    Some(m)
                } else {
                    None
                }
            };
            match (pick(mu1), pick(mu2)) {
                (Some(x), Some(y)) => {
                    if (x - d).norm() <= (y - d).norm() {
                        x
                    } else {
                        y
                    }
                }
                (Some(x), None) | (None, Some(x)) => x,
                (None, None) => d,
            }
        };
        // explicit shifted QR sweep on the active block [lo, hi]
        for k in lo..=hi {
            h[idx(k, k)] -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let x = h[idx(k, k)];
            let y = h[idx(k + 1, k)];
            let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
            let (cs, sn) = if r == 0.0 {
                (Complex64::new(1.0, 0.0), ZERO)
            } else {
                (x / r, y / r)
            };
            // G = [conj(cs) conj(sn); -sn cs] applied from the left
            for j in k..=hi {
                let u = h[idx(k, j)];
                let v = h[idx(k + 1, j)];
                h[idx(k, j)] = cs.conj() * u + sn.conj() * v;
                h[idx(k + 1, j)] = -sn * u + cs * v;
            }
            rot.push((cs, sn));
        }
        for (off, &(cs, sn)) in rot.iter().enumerate() {
            let k = lo + off;
            // right-multiply by G^H on columns k, k+1
            for r in lo..=(k + 1).min(hi) {
                let u = h[idx(r, k)];
                let v = h[idx(r, k + 1)];
                h[idx(r, k)] = u * cs + v * sn;
                h[idx(r, k + 1)] = -u * sn.conj() + v * cs.conj();
            }
        }
        for k in lo..=hi {
            h[idx(k, k)] += shift;
        }
    }
    Ok(eig)
}

/// All roots of `c_0 x^{n} + c_1 x^{n-1} + ... + c_n` (descending powers).
/// Trailing zero coefficients produce roots at zero.
pub fn polynomial_roots(desc: &[Complex64]) -> Result<Vec<Complex64>> {
    let lead = desc.iter().position(|c| *c != ZERO);
    let Some(lead) = lead else {
        return Err(NftError::InvalidInput(
            "zero polynomial has no roots".into(),
        ));
    };
    let coeffs = &desc[lead..];
    let n = coeffs.len() - 1;
    if n == 0 {
        return Ok(Vec::new());
    }
    let c0 = coeffs[0];
    let mut h = vec![ZERO; n * n];
    for j in 0..n {
        h[j] = -coeffs[j + 1] / c0;
    }
    for i in 1..n {
        h[i * n + i - 1] = Complex64::new(1.0, 0.0);
    }
    hessenberg_eigenvalues(&mut h, n)
}

/// Newton refinement of a root of `desc` (descending powers).
pub fn polish_root(desc: &[Complex64], mut z: Complex64, steps: usize) -> Complex64 {
    for _ in 0..steps {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in desc {
            dp = dp * z + p;
            p = p * z + c;
        }
        if dp == ZERO {
            break;
        }
        let step = p / dp;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        z -= step;
        if step.norm() <= 4.0 * f64::EPSILON * z.norm() {
            break;
        }
    }
    z
}
