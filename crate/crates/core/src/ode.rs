//! Continuous-time scattering problem integrated with an adaptive
//! Dormand-Prince 5(4) scheme. Reference for the discrete transform.

use num_complex::Complex64;

use crate::error::{NftError, Result};

type State = [Complex64; 2];

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        out[0] += k[0] * (c * h);
        out[1] += k[1] * (c * h);
    }
    out
}

/// Integrates `d phi/dt = [[-i l, q], [-conj(q), i l]] phi` over `[-1, 0]`
/// with `phi(-1) = (exp(i l), 0)` and returns `(alpha, beta) = phi(0)`.
pub fn continuous_oracle(
    q: impl Fn(f64) -> Complex64,
    lambda: Complex64,
    tol: f64,
) -> Result<(Complex64, Complex64)> {
    if lambda.im < 0.0 {
        return Err(NftError::Domain(format!(
            "lambda = {lambda} lies in the lower half-plane"
        )));
    }
    let il = Complex64::new(0.0, 1.0) * lambda;
    let rhs = |t: f64, y: &State| -> State {
        let qt = q(t);
        [-il * y[0] + qt * y[1], -qt.conj() * y[0] + il * y[1]]
    };
    let (t0, t1) = (-1.0, 0.0);
    let mut t = t0;
    let mut y: State = [il.exp(), Complex64::new(0.0, 0.0)];
    let mut h = 1e-3;
    let mut k1 = rhs(t, &y);
    let mut steps = 0usize;
    while t < t1 {
        if steps > 5_000_000 {
            return Err(NftError::Integrator("step budget exhausted".into()));
        }
        steps += 1;
        if t + h > t1 {
            h = t1 - t;
        }
        let k2 = rhs(t + h / 5.0, &axpy(&y, &[(A21, &k1)], h));
        let k3 = rhs(t + 3.0 * h / 10.0, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = rhs(
            t + 4.0 * h / 5.0,
            &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h),
        );
        let k5 = rhs(
            t + 8.0 * h / 9.0,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = rhs(
            t + h,
            &axpy(
                &y,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                h,
            ),
        );
        let y5 = axpy(
            &y,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            h,
        );
        let k7 = rhs(t + h, &y5);
        let err_vec = axpy(
            &[Complex64::new(0.0, 0.0); 2],
            &[
                (E1, &k1),
                (E3, &k3),
                (E4, &k4),
                (E5, &k5),
                (E6, &k6),
                (E7, &k7),
            ],
            h,
        );
        let scale = |i: usize| tol * (1.0 + y[i].norm().max(y5[i].norm()));
        let err = (0..2)
            .map(|i| err_vec[i].norm() / scale(i))
            .fold(0.0, f64::max);
        if !err.is_finite() {
            return Err(NftError::Integrator(format!("non-finite state at t = {t}")));
        }
        if err <= 1.0 {
            t += h;
            y = y5;
            k1 = k7;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
        if h < 1e-14 {
            return Err(NftError::Integrator(format!(
                "step size underflow at t = {t}"
            )));
        }
    }
    Ok((y[0], y[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_potential() {
        let lam = Complex64::new(1.3, 0.7);
        let (alpha, beta) = continuous_oracle(|_| Complex64::new(0.0, 0.0), lam, 1e-12).unwrap();
        assert!((alpha - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(beta.norm() < 1e-14);
    }

    #[test]
    fn constant_potential_closed_form() {
        // constant q on [-1, 0]: phi(0) = exp(A) phi(-1), exp(A) = cosh(k) I + sinh(k)/k A,
        // k^2 = -(l^2 + |q|^2)
        let q0 = Complex64::new(0.8, -0.3);
        let lam = Complex64::new(0.4, 0.2);
        let i = Complex64::new(0.0, 1.0);
        let k = (-(lam * lam) - q0.norm_sqr()).sqrt();
        let y0 = (i * lam).exp();
        let alpha_want = (k.cosh() + k.sinh() / k * (-i * lam)) * y0;
        let beta_want = (k.sinh() / k * (-q0.conj())) * y0;
        let (alpha, beta) = continuous_oracle(|_| q0, lam, 1e-12).unwrap();
        assert!((alpha - alpha_want).norm() < 1e-9);
        assert!((beta - beta_want).norm() < 1e-9);
    }

    #[test]
    fn lower_half_plane_rejected() {
        assert!(continuous_oracle(
            |_| Complex64::new(0.0, 0.0),
            Complex64::new(0.0, -1.0),
            1e-8
        )
        .is_err());
    }
}
