mod common;

use common::*;
use nftsoliton::forward::{find_eigenvalues, forward_step, ScatteringState};
use nftsoliton::inverse::{recover_sample, step_inverse, TransferMatrix};
use nftsoliton::synthesis::{lambda_to_z, validate_pair};
use nftsoliton::{
    forward_sequential, invert_fast, invert_sequential, synthesize_ab, CausalPolynomial, NftError,
    ScatteringPair, Signal, SpectrumSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn recover_sample_examples() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let a = CausalPolynomial::from_real(&[r]).unwrap();
    let q = recover_sample(&a, &CausalPolynomial::from_real(&[-r]).unwrap()).unwrap();
    assert!((q - c(1.0, 0.0)).norm() < 1e-15);
    let q = recover_sample(&a, &CausalPolynomial::new(vec![c(0.0, r)]).unwrap()).unwrap();
    assert!((q - c(0.0, 1.0)).norm() < 1e-15);
    assert_eq!(
        recover_sample(&a, &CausalPolynomial::zeros(1)).unwrap(),
        c(0.0, 0.0)
    );
    let tiny = CausalPolynomial::from_real(&[1e-16]).unwrap();
    assert!(matches!(
        recover_sample(&tiny, &CausalPolynomial::zeros(1)),
        Err(NftError::SingularRecovery { .. })
    ));
}

#[test]
fn trivial_medium() {
    let pair = ScatteringPair::new(
        CausalPolynomial::one().resized(16),
        CausalPolynomial::zeros(16),
    );
    assert!(invert_sequential(&pair)
        .unwrap()
        .samples()
        .iter()
        .all(|q| q.norm() == 0.0));
    let (fast, _) = invert_fast(&pair).unwrap();
    assert!(fast.samples().iter().all(|q| q.norm() == 0.0));
    let (a, b) = step_inverse(&pair.a, &pair.b, c(0.0, 0.0));
    assert_eq!(a.coeff(0), c(1.0, 0.0));
    assert!(b.coeffs().iter().all(|v| v.norm() == 0.0));
}

#[test]
fn two_sample_hand_example() {
    let samples = vec![c(0.3, 0.0), c(0.0, -0.2)];
    let pair = forward_sequential(&Signal::new(samples.clone()).unwrap());
    let (mut a, mut b) = (pair.a.clone(), pair.b.clone());
    let mut got = Vec::new();
    for _ in 0..2 {
        let q = recover_sample(&a, &b).unwrap();
        got.push(q);
        (a, b) = step_inverse(&a, &b, q);
    }
    got.reverse();
    assert!(max_abs_diff(&got, &samples) < 1e-12);
}

#[test]
fn step_inverse_undoes_forward_step() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let len = rng.gen_range(1..12);
        let a: Vec<_> = (0..len)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let b: Vec<_> = (0..len)
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let q = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let st = ScatteringState {
            a: CausalPolynomial::new(a.clone()).unwrap(),
            b: CausalPolynomial::new(b.clone()).unwrap(),
            half_power: 0,
        };
        let next = forward_step(&st, q);
        let (a2, b2) = step_inverse(&next.a, &next.b, q);
        assert!(max_abs_diff(&a2.coeffs()[..len], &a) < 1e-12);
        assert!(max_abs_diff(&b2.coeffs()[..len], &b) < 1e-12);
    }
}

#[test]
fn sequential_round_trip_64() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let (signal, pair) = random_valid_pair(&mut rng, 64);
    let back = invert_sequential(&pair).unwrap();
    assert!(max_abs_diff(back.samples(), signal.samples()) <= 1e-9);
}

#[test]
fn fast_matches_sequential_64() {
    let mut rng = ChaCha8Rng::seed_from_u64(65);
    let (_, pair) = random_valid_pair(&mut rng, 64);
    let seq = invert_sequential(&pair).unwrap();
    let (fast, _) = invert_fast(&pair).unwrap();
    assert!(max_abs_diff(fast.samples(), seq.samples()) <= 1e-10 * max_abs(seq.samples()).max(1.0));
}

#[test]
fn fast_base_case() {
    let pair = forward_sequential(&Signal::new(vec![c(0.25, -0.5)]).unwrap());
    let (s, t) = invert_fast(&pair).unwrap();
    assert!((s.samples()[0] - c(0.25, -0.5)).norm() < 1e-15);
    assert_eq!(t, TransferMatrix::step(s.samples()[0]));
}

#[test]
fn fast_requires_power_of_two() {
    let pair = ScatteringPair::new(
        CausalPolynomial::one().resized(6),
        CausalPolynomial::zeros(6),
    );
    assert_eq!(invert_fast(&pair).unwrap_err(), NftError::NotPowerOfTwo(6));
}

#[test]
fn invalid_pair_is_rejected() {
    let pair = ScatteringPair::new(
        CausalPolynomial::from_real(&[1.0, 0.0]).unwrap(),
        CausalPolynomial::from_real(&[1.0, 0.0]).unwrap(),
    );
    assert!(!validate_pair(&pair, 1e-6).pass);
    assert!(matches!(
        invert_sequential(&pair),
        Err(NftError::InvalidPair(_))
    ));
    assert!(matches!(invert_fast(&pair), Err(NftError::InvalidPair(_))));
}

/// The transfer matrix returned by the fast inversion has determinant
/// `z^D` and maps `(a, b)` to `(1, 0)` in its `z^0` coefficients.
#[test]
fn transfer_matrix_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (_, pair) = random_valid_pair(&mut rng, 32);
    let (_, t) = invert_fast(&pair).unwrap();
    assert_eq!(t.half_power, 32);
    let det = t.determinant();
    for k in det.offset()..=det.top() {
        let want = if k == 32 { 1.0 } else { 0.0 };
        assert!((det.coeff(k) - c(want, 0.0)).norm() < 1e-10, "z^{k}");
    }
    let (a, b) = t.apply_window(&pair.a, &pair.b, 1);
    assert!((a.coeff(0) - c(1.0, 0.0)).norm() < 1e-10);
    assert!(b.coeff(0).norm() < 1e-10);
}

/// For `m < D/2`, the `z^0` coefficients reached after `m` inverse steps
/// are the same whether the steps run on the full pair or on its leading
/// half only.
#[test]
fn leading_half_determines_upper_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for d in [4usize, 8, 16] {
        let (_, pair) = random_valid_pair(&mut rng, d);
        let half = d / 2;
        let (mut fa, mut fb) = (pair.a.clone(), pair.b.clone());
        let (mut ha, mut hb) = (pair.a.resized(half), pair.b.resized(half));
        for m in 0..half {
            assert!(
                (fa.coeff(0) - ha.coeff(0)).norm() < 1e-14,
                "D = {d}, m = {m}"
            );
            assert!(
                (fb.coeff(0) - hb.coeff(0)).norm() < 1e-14,
                "D = {d}, m = {m}"
            );
            let q = recover_sample(&fa, &fb).unwrap();
            (fa, fb) = step_inverse(&fa, &fb, q);
            let q = recover_sample(&ha, &hb).unwrap();
            (ha, hb) = step_inverse(&ha, &hb, q);
        }
    }
}

#[test]
fn energy_identity_on_inversions() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [2usize, 16, 128] {
        let (_, pair) = random_valid_pair(&mut rng, d);
        let (s, _) = invert_fast(&pair).unwrap();
        assert!(s.energy_identity_residual(pair.a.coeff(0).re) <= 1e-8);
    }
}

#[test]
fn single_soliton_hump() {
    let spec = SpectrumSpec::new(vec![c(0.0, 20.0)], 0.01, 256, 10.0).unwrap();
    let syn = synthesize_ab(&spec).unwrap();
    let s = invert_sequential(&syn.pair).unwrap();
    // one dominant hump: the magnitude rises to a single maximum and falls
    let mags: Vec<f64> = s.samples().iter().map(|q| q.norm()).collect();
    let peak = mags.iter().cloned().fold(0.0, f64::max);
    let above: Vec<usize> = (0..mags.len()).filter(|&i| mags[i] > 0.5 * peak).collect();
    assert!(above.last().unwrap() - above.first().unwrap() + 1 == above.len());
    // sech(20 t) with eigenvalue 20i has height 40, i.e. 40 eps per sample
    assert!(
        (peak / s.eps() - 40.0).abs() < 2.0,
        "peak {}",
        peak / s.eps()
    );
    let fwd = forward_sequential(&s);
    let roots = find_eigenvalues(&fwd.a).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0] - lambda_to_z(c(0.0, 20.0), s.eps()).unwrap()).norm() < 1e-6);
}

#[test]
fn fast_matches_sequential_on_synthesized_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in [64usize, 128, 256] {
        let k = rng.gen_range(1..4);
        let lambdas = (0..k)
            .map(|j| {
                c(
                    rng.gen_range(-5.0..5.0),
                    15.0 + 10.0 * j as f64 + rng.gen_range(0.0..5.0),
                )
            })
            .collect();
        let spec = SpectrumSpec::new(lambdas, 0.05, d, 10.0).unwrap();
        let pair = synthesize_ab(&spec).unwrap().pair;
        let seq = invert_sequential(&pair).unwrap();
        let (fast, _) = invert_fast(&pair).unwrap();
        assert!(max_abs_diff(fast.samples(), seq.samples()) <= 1e-8 * max_abs(seq.samples()));
    }
}
