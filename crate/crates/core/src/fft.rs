//! Thin wrappers over `rustfft` with a per-thread planner cache.

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place forward DFT: `X[k] = sum_n x[n] exp(-2 pi i k n / N)`.
pub fn forward(buf: &mut [Complex64]) {
    if buf.len() <= 1 {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()));
    fft.process(buf);
}

/// In-place inverse DFT, normalized by `1/N`.
pub fn inverse(buf: &mut [Complex64]) {
    let n = buf.len();
    if n <= 1 {
        return;
    }
    let fft = PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n));
    fft.process(buf);
    let scale = 1.0 / n as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Below this length (of the shorter operand) the direct sum beats the FFT.
const DIRECT_CUTOFF: usize = 48;

/// Linear convolution of two coefficient sequences.
pub fn convolve(p: &[Complex64], q: &[Complex64]) -> Vec<Complex64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let out_len = p.len() + q.len() - 1;
    if p.len().min(q.len()) <= DIRECT_CUTOFF {
        let mut out = vec![Complex64::new(0.0, 0.0); out_len];
        for (i, &pi) in p.iter().enumerate() {
            for (j, &qj) in q.iter().enumerate() {
                out[i + j] += pi * qj;
            }
        }
        return out;
    }
    let n = out_len.next_power_of_two();
    let mut fp = vec![Complex64::new(0.0, 0.0); n];
    let mut fq = vec![Complex64::new(0.0, 0.0); n];
    fp[..p.len()].copy_from_slice(p);
    fq[..q.len()].copy_from_slice(q);
    forward(&mut fp);
    forward(&mut fq);
    for (x, y) in fp.iter_mut().zip(&fq) {
        *x *= y;
    }
    inverse(&mut fp);
    fp.truncate(out_len);
    fp
}
