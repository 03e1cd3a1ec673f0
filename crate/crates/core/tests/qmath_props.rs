use kaonsim_core::qmath::{expm, kron, rotation, Operator, StateVec};
use kaonsim_core::C64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut ChaCha8Rng, dim: usize, scale: f64) -> Operator {
    let entries = (0..dim * dim)
        .map(|_| C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale)))
        .collect();
    Operator::new(dim, entries).unwrap()
}

/// Plain 64-term Taylor series of `exp(-i H t)`.
fn taylor_oracle(h: &Operator, t: f64) -> Operator {
    let dim = h.dim();
    let a = h.scale(C64::new(0.0, -t));
    let mut term = Operator::identity(dim).unwrap();
    let mut sum = term.clone();
    for k in 1..64 {
        term = term
            .matmul(&a)
            .unwrap()
            .scale(C64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term).unwrap();
    }
    sum
}

#[test]
fn expm_agrees_with_taylor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b616f6e);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let dim = if i % 2 == 0 { 2 } else { 4 };
        let h = random_matrix(&mut rng, dim, 1.0);
        let t = rng.gen_range(0.0..2.0);
        let got = expm(&h, t).unwrap();
        let want = taylor_oracle(&h, t);
        let err = got.max_abs_diff(&want) / want.max_abs().max(1.0);
        worst = worst.max(err);
    }
    assert!(worst < 1e-12, "worst relative deviation {worst}");
}

#[test]
fn expm_near_degenerate_agrees_with_taylor_oracle() {
    // eigenvalue gaps straddling the series/spectral switch
    for gap in [0.0, 1e-14, 1e-10, 1e-9, 1e-8, 1e-7, 1e-4] {
        let h = Operator::from_rows2([
            [C64::new(0.3 + gap, -0.2), C64::new(0.0, 0.0)],
            [C64::new(0.7, 0.1), C64::new(0.3, -0.2)],
        ]);
        let got = expm(&h, 1.7).unwrap();
        let want = taylor_oracle(&h, 1.7);
        assert!(got.max_abs_diff(&want) < 1e-12, "gap {gap}");
    }
}

fn hermitian(dim: usize, vals: &[f64]) -> Operator {
    let mut e = vec![C64::new(0.0, 0.0); dim * dim];
    let mut it = vals.iter();
    for r in 0..dim {
        e[r * dim + r] = C64::new(*it.next().unwrap(), 0.0);
        for c in r + 1..dim {
            let z = C64::new(*it.next().unwrap(), *it.next().unwrap());
            e[r * dim + c] = z;
            e[c * dim + r] = z.conj();
        }
    }
    Operator::new(dim, e).unwrap()
}

fn general(dim: usize, vals: &[f64]) -> Operator {
    let e = vals
        .chunks(2)
        .take(dim * dim)
        .map(|p| C64::new(p[0], p[1]))
        .collect();
    Operator::new(dim, e).unwrap()
}

proptest! {
    #[test]
    fn expm_semigroup(
        dim in prop_oneof![Just(2usize), Just(4usize)],
        vals in proptest::collection::vec(-2.0f64..2.0, 32),
        s in 0.0f64..3.0,
        t in 0.0f64..3.0,
    ) {
        let h = general(dim, &vals);
        let lhs = expm(&h, s).unwrap().matmul(&expm(&h, t).unwrap()).unwrap();
        let rhs = expm(&h, s + t).unwrap();
        let scale = rhs.max_abs().max(1.0);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-10 * scale);
    }

    #[test]
    fn hermitian_generator_is_unitary(
        dim in prop_oneof![Just(2usize), Just(4usize)],
        vals in proptest::collection::vec(-5.0f64..5.0, 16),
        t in -10.0f64..10.0,
    ) {
        let h = hermitian(dim, &vals);
        prop_assert!(expm(&h, t).unwrap().unitarity_defect() < 1e-12);
    }

    #[test]
    fn rotations_are_unitary(
        x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0,
        theta in -20.0f64..20.0,
    ) {
        prop_assume!(x * x + y * y + z * z > 1e-6);
        let r = rotation([x, y, z], theta).unwrap();
        prop_assert!(r.is_unitary());
        prop_assert!(r.unitarity_defect() < 1e-12);
        // R(n, theta) R(n, -theta) = I
        let back = r.matmul(&rotation([x, y, z], -theta).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&Operator::identity(2).unwrap()) < 1e-12);
    }

    #[test]
    fn kron_of_rotations_preserves_norm(
        a in -7.0f64..7.0, b in -7.0f64..7.0,
        re in proptest::collection::vec(-1.0f64..1.0, 8),
    ) {
        let u = kron(&rotation([0.0, 1.0, 0.0], a).unwrap(), &rotation([1.0, 0.0, 1.0], b).unwrap()).unwrap();
        prop_assert!(u.is_unitary());
        let psi = StateVec::new(re.chunks(2).map(|p| C64::new(p[0], p[1])).collect()).unwrap();
        let out = u.apply(&psi).unwrap();
        prop_assert!((out.norm() - psi.norm()).abs() < 1e-12);
    }
}
