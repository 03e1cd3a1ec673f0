use std::f64::consts::{FRAC_1_SQRT_2, PI};

use kaonsim_core::dynamics::{
    apply_sequence, driven_lab_frame, driven_lab_frame_samples, h_det, h_int, propagate_const,
    run_sequence, LabDrive, Segment, TwoQubitParams,
};
use kaonsim_core::kaon::{flavor_states, h_rwa, KaonParams};
use kaonsim_core::qmath::{expm, kron, rotation, Operator, StateVec};
use kaonsim_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Hermitian part plus `-i/2 diag(gamma)` with `gamma >= 0`.
fn decaying(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    let mut e = vec![c(0.0, 0.0); dim * dim];
    for r in 0..dim {
        e[r * dim + r] = c(rng.gen_range(-3.0..3.0), -0.5 * rng.gen_range(0.0..2.0));
        for k in r + 1..dim {
            let z = c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            e[r * dim + k] = z;
            e[k * dim + r] = z.conj();
        }
    }
    Operator::new(dim, e).unwrap()
}

fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> Operator {
    let mut rot = || {
        let axis = [
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0) + 2.0,
        ];
        rotation(axis, rng.gen_range(-PI..PI)).unwrap()
    };
    match dim {
        2 => rot(),
        _ => kron(&rot(), &rot()).unwrap(),
    }
}

fn random_state(rng: &mut ChaCha8Rng, dim: usize) -> StateVec {
    let raw: Vec<C64> = (0..dim)
        .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let psi = StateVec::new(raw).unwrap();
    psi.scaled(c(1.0 / psi.norm(), 0.0))
}

#[test]
fn norms_never_grow_under_decay_and_gates() {
    let mut rng = ChaCha8Rng::seed_from_u64(1964);
    for trial in 0..1000 {
        let dim = if trial % 3 == 0 { 4 } else { 2 };
        let n_segs = rng.gen_range(1..8);
        let mut segs = Vec::new();
        let mut total = 0.0;
        for _ in 0..n_segs {
            if rng.gen_bool(0.5) {
                segs.push(Segment::gate(random_unitary(&mut rng, dim)).unwrap());
            } else {
                let d = rng.gen_range(0.0..2.0);
                total += d;
                segs.push(Segment::free(decaying(&mut rng, dim), d).unwrap());
            }
        }
        let samples: Vec<f64> = (0..25).map(|i| total * i as f64 / 24.0).collect();
        let samples = if total == 0.0 { vec![0.0] } else { samples };
        let traj = run_sequence(&segs, &random_state(&mut rng, dim), &samples).unwrap();
        for w in traj.norms.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "trial {trial}: {} > {}", w[1], w[0]);
        }
        for (row, n) in traj.probs.iter().zip(&traj.norms) {
            let sum: f64 = row.iter().sum();
            assert!((sum - n * n).abs() < 1e-12);
        }
    }
}

#[test]
fn gate_only_sequences_preserve_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let dim = if rng.gen_bool(0.5) { 2 } else { 4 };
        let segs: Vec<Segment> = (0..10)
            .map(|_| Segment::gate(random_unitary(&mut rng, dim)).unwrap())
            .collect();
        let psi = random_state(&mut rng, dim);
        let out = apply_sequence(&segs, &psi).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn free_decay_of_k0_matches_closed_form() {
    let k = KaonParams::new(0.4, 0.477, 1.0, 584.0, 0.0).unwrap();
    let (k0, _) = flavor_states();
    let h = h_rwa(&k);
    for t in [0.0, 0.3, 1.0, 4.5, 17.0] {
        let psi = propagate_const(&h, &k0, t).unwrap();
        let k2 = c(0.0, -k.m2() * t).exp() * (-t / (2.0 * k.tau2)).exp() * FRAC_1_SQRT_2;
        let k1 = c(0.0, -k.m1() * t).exp() * (-t / (2.0 * k.tau1)).exp() * FRAC_1_SQRT_2;
        assert!((psi.amplitude(0) - k2).norm() < 1e-12);
        assert!((psi.amplitude(1) - k1).norm() < 1e-12);
        let norm2 = ((-t / k.tau1).exp() + (-t / k.tau2).exp()) / 2.0;
        assert!((psi.norm_sqr() - norm2).abs() < 1e-12);
    }
}

#[test]
fn undriven_lab_frame_is_a_phase() {
    let de = 2.0;
    let drive = LabDrive::lossless(de, 0.0, de);
    let psi0 = StateVec::new(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
    let t = 100.0 / de;
    // global RK4 error scales as dt^4; the admissible maximum leaves ~1e-5
    let out = driven_lab_frame(&drive, &psi0, t, drive.max_step() / 32.0).unwrap();
    let want = [
        psi0.amplitude(0) * c(0.0, 0.5 * de * t).exp(),
        psi0.amplitude(1) * c(0.0, -0.5 * de * t).exp(),
    ];
    assert!((out.amplitude(0) - want[0]).norm() < 1e-10);
    assert!((out.amplitude(1) - want[1]).norm() < 1e-10);
}

#[test]
fn lab_frame_decay_rates() {
    let drive = LabDrive {
        tau0: 3.0,
        tau1: 0.5,
        ..LabDrive::lossless(1.0, 0.0, 1.0)
    };
    let psi0 = StateVec::new(vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
    let t = 2.0;
    let out = driven_lab_frame(&drive, &psi0, t, drive.max_step() / 32.0).unwrap();
    let want0 = 0.5 * (-t / drive.tau0).exp();
    let want1 = 0.5 * (-t / drive.tau1).exp();
    assert!((out.amplitude(0).norm_sqr() - want0).abs() < 1e-10);
    assert!((out.amplitude(1).norm_sqr() - want1).abs() < 1e-10);
}

#[test]
fn resonant_drive_follows_rotating_wave_prediction() {
    let de = 1.0;
    let omega = de / 300.0;
    let drive = LabDrive::lossless(de, omega, de);
    let psi0 = StateVec::basis(2, 0).unwrap();
    let t = PI / omega;
    let out = driven_lab_frame(&drive, &psi0, t, drive.max_step()).unwrap();
    let rwa = (0.5 * omega * t).sin().powi(2);
    assert!((out.amplitude(1).norm_sqr() - rwa).abs() < 2.0 * omega / de);
}

#[test]
fn rk4_step_halving() {
    let drive = LabDrive::lossless(1.0, 1.0 / 300.0, 1.0);
    let psi0 = StateVec::basis(2, 0).unwrap();
    let dt = drive.max_step() / 8.0;
    let a = driven_lab_frame(&drive, &psi0, 200.0, dt).unwrap();
    let b = driven_lab_frame(&drive, &psi0, 200.0, 0.5 * dt).unwrap();
    assert!(a.max_abs_diff(&b) < 1e-8, "{}", a.max_abs_diff(&b));
}

#[test]
fn lab_frame_stays_within_rwa_contract() {
    for ratio in [1e-2, 1.0 / 300.0, 1e-3] {
        let de = 1.0;
        let omega = ratio * de;
        let drive = LabDrive::lossless(de, omega, de);
        let period = 2.0 * PI / omega;
        let ts: Vec<f64> = (0..=400).map(|i| period * i as f64 / 400.0).collect();
        let traj = driven_lab_frame_samples(
            &drive,
            &StateVec::basis(2, 0).unwrap(),
            &ts,
            drive.max_step(),
        )
        .unwrap();
        let worst = ts
            .iter()
            .zip(&traj.probs)
            .map(|(t, row)| (row[1] - (0.5 * omega * t).sin().powi(2)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= 5.0 * ratio, "ratio {ratio}: {worst}");
    }
}

proptest! {
    #[test]
    fn two_qubit_block_is_closed(
        e01 in -5.0f64..5.0, e10 in -5.0f64..5.0,
        tau01 in 0.1f64..10.0, tau10 in 0.1f64..1000.0,
        g in 0.01f64..10.0, t in 0.0f64..20.0, a in 0.0f64..1.0, phase in 0.0f64..6.3,
    ) {
        let p = TwoQubitParams::new(e01, e10, tau01, tau10, g).unwrap();
        let h = h_det(&p).add(&h_int(g).unwrap()).unwrap();
        let b = (1.0 - a * a).sqrt();
        let psi = StateVec::new(vec![c(0.0, 0.0), c(a, 0.0), c(b * phase.cos(), b * phase.sin()), c(0.0, 0.0)]).unwrap();
        let out = expm(&h, t).unwrap().apply(&psi).unwrap();
        prop_assert!(out.amplitude(0).norm() < 1e-14);
        prop_assert!(out.amplitude(3).norm() < 1e-14);
    }
}
