use std::f64::consts::{FRAC_1_SQRT_2, PI};

use kaonsim_core::junction::{
    consts::HBAR, critical_points, derived_energies, detuning, find_well_minima,
    momentum_identity_residual, reduce_to_qubit, solve_well, solve_well_in, well_window,
    JunctionParams, Potential,
};

// Shooting-method reference (Numerov, 2^15 steps, node-count bisection) for
// the default bias point, frozen from scripts/junction_shooting_oracle.py.
const ORACLE_DELTA_MIN: f64 = -4.770283362104895;
const ORACLE_LEVELS_OVER_EC: [f64; 3] = [41.826238601670596, 121.50213410358185, 195.7948764903893];
const ORACLE_SPLITTING_HZ: f64 = 6173361470.078389;
const ORACLE_DELTA_01: f64 = 0.11066885977976473;
const ORACLE_DRIVE_RATIO: f64 = 0.0016366152296604826;

fn default_params() -> JunctionParams {
    JunctionParams::new(1e-12, 2e-6, 7.2e-10, -0.064, 6.4e-5, 3.8787e10).unwrap()
}

fn first_spacing(pot: &Potential, n: usize) -> f64 {
    let grid = well_window(pot, 0, n).unwrap();
    let s = solve_well_in(pot, 0, &grid, 2).unwrap();
    s.energies[1] - s.energies[0]
}

#[test]
fn harmonic_limit_spacing() {
    let p = default_params();
    let d = derived_energies(&p);
    let pot = Potential::quadratic_only(&p);
    let expect = (2.0 * d.charging * d.josephson / d.beta).sqrt();
    let got = first_spacing(&pot, 4096);
    assert!(((got - expect) / expect).abs() < 1e-6, "{got} vs {expect}");
}

#[test]
fn harmonic_limit_dipole_element() {
    // <0|delta|1> = l / sqrt2 for an oscillator of length l
    let p = default_params();
    let pot = Potential::quadratic_only(&p);
    let grid = well_window(&pot, 0, 4096).unwrap();
    let s = solve_well_in(&pot, 0, &grid, 3).unwrap();
    let l = pot.harmonic_length(s.minimum.delta);
    let got = s.delta_elements[0][1];
    assert!((got - l * FRAC_1_SQRT_2).abs() < 1e-6 * l, "{got}");
    // second neighbour vanishes by parity
    assert!(s.delta_elements[0][2].abs() < 1e-6 * l);
}

#[test]
fn convergence_is_second_order() {
    let p = default_params();
    let pot = Potential::washboard(&p);
    // N + 1 doubles, so the spacing h halves exactly
    let e: Vec<Vec<f64>> = [511, 1023, 2047]
        .iter()
        .map(|&n| {
            let grid = well_window(&pot, 0, n).unwrap();
            solve_well(&p, 0, &grid, 3).unwrap().energies
        })
        .collect();
    for level in 0..3 {
        let (a, b, c) = (e[0][level], e[1][level], e[2][level]);
        // finite differences converge from below for the kinetic term
        assert!(a < b && b < c, "level {level} not monotone");
        let order = ((b - a) / (c - b)).log2();
        assert!((1.8..=2.2).contains(&order), "level {level}: order {order}");
    }
}

#[test]
fn momentum_identity_holds() {
    let p = default_params();
    let d = derived_energies(&p);
    let grid = well_window(&Potential::washboard(&p), 0, 2048).unwrap();
    let s = solve_well(&p, 0, &grid, 3).unwrap();
    let r = momentum_identity_residual(&s, d.charging);
    assert!(r < 1e-6, "residual {r}");
}

#[test]
fn eigenvectors_orthonormal() {
    let p = default_params();
    let grid = well_window(&Potential::washboard(&p), 0, 2048).unwrap();
    let s = solve_well(&p, 0, &grid, 3).unwrap();
    let h = grid.spacing();
    for i in 0..3 {
        for j in 0..3 {
            let dot: f64 = s.wavefunctions[i]
                .iter()
                .zip(&s.wavefunctions[j])
                .map(|(a, b)| a * b * h)
                .sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            assert!((dot - expect).abs() < 1e-10, "<{i}|{j}> = {dot}");
        }
    }
}

#[test]
fn default_bias_matches_shooting_oracle() {
    let p = default_params();
    let d = derived_energies(&p);
    let pot = Potential::washboard(&p);
    let grid = well_window(&pot, 0, 4096).unwrap();
    let s = solve_well(&p, 0, &grid, 3).unwrap();
    assert!((s.minimum.delta - ORACLE_DELTA_MIN).abs() < 1e-12);
    for (k, want) in ORACLE_LEVELS_OVER_EC.iter().enumerate() {
        let got = (s.energies[k] - s.minimum.energy) / d.charging;
        assert!(
            ((got - want) / want).abs() < 1e-5,
            "level {k}: {got} vs {want}"
        );
    }
    let q = reduce_to_qubit(&p, &s).unwrap();
    let hz = q.delta_eps / (2.0 * PI * HBAR);
    assert!(((hz - ORACLE_SPLITTING_HZ) / ORACLE_SPLITTING_HZ).abs() < 1e-5);
    assert!((1e9..=20e9).contains(&hz));
    // transition time 1/f of order 1e-10 s
    assert!((1e-11..1e-9).contains(&(1.0 / hz)));
    assert!(((q.delta_01 - ORACLE_DELTA_01) / ORACLE_DELTA_01).abs() < 1e-5);
    let ratio = HBAR * q.omega_x / q.delta_eps;
    assert!(((ratio - ORACLE_DRIVE_RATIO) / ORACLE_DRIVE_RATIO).abs() < 1e-5);
}

/// Independent root finder on `U'/E_J` by plain bisection.
fn bisect_slope(beta: f64, phi: f64, mut a: f64, mut b: f64) -> f64 {
    let g = |x: f64| x.sin() + (x - 2.0 * PI * phi) / beta;
    let ga = g(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (g(m) > 0.0) == (ga > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn minima_match_dense_scan_at_large_beta() {
    // beta = 10 exactly: I0 L = 10 Phi0 / 2 pi
    let phi0 = kaonsim_core::junction::consts::FLUX_QUANTUM;
    let ic = 2e-6;
    let l = 10.0 * phi0 / (2.0 * PI * ic);
    let phi = 0.13;
    let p = JunctionParams::new(1e-12, ic, l, phi, 0.0, 0.0).unwrap();
    let beta = derived_energies(&p).beta;
    assert!((beta - 10.0).abs() < 1e-12);

    // oracle: sign changes of U' rising through zero on a dense scan
    let g = |x: f64| x.sin() + (x - 2.0 * PI * phi) / beta;
    let (lo, hi) = (2.0 * PI * phi - beta - PI, 2.0 * PI * phi + beta + PI);
    let n = 200_000;
    let mut oracle = Vec::new();
    for i in 0..n {
        let a = lo + (hi - lo) * i as f64 / n as f64;
        let b = lo + (hi - lo) * (i + 1) as f64 / n as f64;
        if g(a) < 0.0 && g(b) >= 0.0 {
            oracle.push(bisect_slope(beta, phi, a, b));
        }
    }
    let found = find_well_minima(&p);
    assert!(found.skipped.is_empty());
    assert_eq!(found.minima.len(), oracle.len());
    for (m, o) in found.minima.iter().zip(&oracle) {
        assert!((m.delta - o).abs() < 1e-12, "{} vs {o}", m.delta);
        assert!(m.residual < 1e-12);
    }
}

#[test]
fn symmetric_minima_at_zero_flux() {
    let phi0 = kaonsim_core::junction::consts::FLUX_QUANTUM;
    let ic = 2e-6;
    let l = 10.0 * phi0 / (2.0 * PI * ic);
    let p = JunctionParams::new(1e-12, ic, l, 0.0, 0.0, 0.0).unwrap();
    let found = find_well_minima(&p);
    let xs: Vec<f64> = found.minima.iter().map(|m| m.delta).collect();
    assert!(xs.iter().any(|x| x.abs() < 1e-12));
    for x in &xs {
        assert!(
            xs.iter().any(|y| (x + y).abs() < 1e-10),
            "no mirror for {x}"
        );
    }
    let cp = critical_points(&Potential::washboard(&p));
    assert_eq!(cp.minima.len(), xs.len());
}

#[test]
fn detuning_from_two_bias_points() {
    let p_ref = default_params();
    let p = JunctionParams {
        phi_dc: -0.0645,
        ..p_ref
    };
    let split = |p: &JunctionParams| {
        let grid = well_window(&Potential::washboard(p), 0, 2048).unwrap();
        reduce_to_qubit(p, &solve_well(p, 0, &grid, 2).unwrap())
            .unwrap()
            .delta_eps
    };
    let (e_ref, e) = (split(&p_ref), split(&p));
    let dm = detuning(e, e_ref);
    assert_eq!(dm, (e_ref - e) / HBAR);
    // pushing the bias towards the well edge shrinks the splitting
    assert!(e != e_ref);
    assert_eq!(dm > 0.0, e < e_ref);
    // relative to the splitting the detuning is small
    assert!((dm * HBAR / e_ref).abs() < 0.05);
}
