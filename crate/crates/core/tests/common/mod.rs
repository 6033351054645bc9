#![allow(dead_code)]

use nftsoliton::{forward_sequential, ScatteringPair, Signal};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Random samples inside a disk whose radius keeps `prod (1 + |Q|^2)`
/// bounded, so that `a_0` stays well away from zero.
pub fn random_signal(rng: &mut ChaCha8Rng, d: usize) -> Signal {
    let radius = rng.gen_range(0.05..3.0) / (d as f64).sqrt();
    Signal::new(
        (0..d)
            .map(|_| {
                Complex64::from_polar(
                    radius * rng.gen::<f64>().sqrt(),
                    rng.gen_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect(),
    )
    .unwrap()
}

pub fn random_valid_pair(rng: &mut ChaCha8Rng, d: usize) -> (Signal, ScatteringPair) {
    let s = random_signal(rng, d);
    let p = forward_sequential(&s);
    (s, p)
}

pub fn max_abs_diff(x: &[Complex64], y: &[Complex64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(p, q)| (p - q).norm())
        .fold(0.0, f64::max)
}

pub fn max_abs(x: &[Complex64]) -> f64 {
    x.iter().map(|p| p.norm()).fold(0.0, f64::max)
}

pub fn four_soliton() -> Vec<Complex64> {
    (1..=4).map(|k| c(0.0, 12.5 * k as f64)).collect()
}

/// `q(t) = s sech(s (t + 1/2))`, eigenvalue `i s / 2`.
pub fn sech_pulse(s: f64) -> impl Fn(f64) -> Complex64 {
    move |t: f64| c(s / (s * (t + 0.5)).cosh(), 0.0)
}
