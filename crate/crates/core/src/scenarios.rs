//! Named experiments: free mixing, the single- and two-qubit emulation
//! sequences, regeneration in a slab and the CP-violating sequence, together
//! with the closed-form mixing probabilities they are checked against.

use std::f64::consts::PI;
use std::str::FromStr;

use log::warn;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use thiserror::Error;

use crate::dynamics::{
    apply_sequence, flip_qubit1, h_det, u_int, DynamicsError, Segment, Trajectory, TwoQubitParams,
};
use crate::kaon::{cp_violating_rotations, flavor_states, h_rwa, CpEpsilon, KaonError, KaonParams};
use crate::qmath::{ry, QmathError, StateVec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("canonical kaon sequence requires Omega_x = 0, got {0}")]
    DriveNotAllowed(f64),
    #[error("sample times must be finite, non-negative and strictly increasing (index {0})")]
    BadSampleTimes(usize),
    #[error("unknown scenario '{0}'")]
    UnknownScenario(String),
    #[error("empty parameter grid")]
    EmptyGrid,
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Kaon(#[from] KaonError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}

/// Parameter sets of the published curves, in units of `tau1`.
pub mod figures {
    pub const FIG1_TAU2_OVER_TAU1: f64 = 0.52 / 0.89 * 1000.0;
    pub const FIG1_TAU1_DELTA_M: f64 = 0.477;
    pub const FIG2_TAU2_OVER_TAU1: f64 = 1000.0;
    pub const FIG2_TAU1_DELTA_M: f64 = 2.0;
    /// `epsilon = a (1 + i)`.
    pub const FIG3_EPSILON_PART: f64 = 0.525;
    /// Physical kaon value, `epsilon = a (1 + i)`.
    pub const KAON_EPSILON_PART: f64 = 1.621e-3;
    pub const T_MAX_OVER_TAU1: f64 = 10.0;
    pub const N_POINTS: usize = 1000;
}

/// `n` uniform samples `t_max * i / (n - 1)`.
pub fn uniform_times(t_max: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect(),
    }
}

fn check_times(ts: &[f64]) -> Result<(), ScenarioError> {
    if let Some(i) = ts.iter().position(|t| !t.is_finite() || *t < 0.0) {
        return Err(ScenarioError::BadSampleTimes(i));
    }
    if let Some(i) = ts.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(ScenarioError::BadSampleTimes(i + 1));
    }
    Ok(())
}

/// `(P_K0, P_K0bar) = [e^{-t/tau1} + e^{-t/tau2} +- 2 e^{-t/2tau1 - t/2tau2} cos(dm t)] / 4`.
pub fn analytic_mixing(t: f64, tau1: f64, tau2: f64, delta_m: f64) -> (f64, f64) {
    let a = (-t / tau1).exp();
    let b = (-t / tau2).exp();
    let cross = 2.0 * (-0.5 * t / tau1 - 0.5 * t / tau2).exp() * (delta_m * t).cos();
    ((a + b + cross) / 4.0, (a + b - cross) / 4.0)
}

/// [`analytic_mixing`] sampled on `ts`; `norms` holds `sqrt(P_K0 + P_K0bar)`.
pub fn analytic_trajectory(ts: &[f64], k: &KaonParams) -> Result<Trajectory, ScenarioError> {
    k.validate()?;
    check_times(ts)?;
    let mut traj = Trajectory::default();
    for &t in ts {
        let (p, q) = analytic_mixing(t, k.tau1, k.tau2, k.delta_m);
        traj.times.push(t);
        traj.probs.push(vec![p, q]);
        traj.norms.push((p + q).sqrt());
    }
    Ok(traj)
}

/// Prepares `K0 = R_y(pi/2)|0>`, lets it decay freely for `t` and rotates
/// back with `R_y(-pi/2)`. Records `(P_0, P_1)`, which equal `(P_K0, P_K0bar)`.
pub fn single_qubit_sequence(ts: &[f64], k: &KaonParams) -> Result<Trajectory, ScenarioError> {
    k.validate()?;
    if k.omega_x != 0.0 {
        return Err(ScenarioError::DriveNotAllowed(k.omega_x));
    }
    check_times(ts)?;
    let psi0 = StateVec::basis(2, 0)?;
    let h = h_rwa(k);
    let mut traj = Trajectory::default();
    for &t in ts {
        let segs = [
            Segment::gate(ry(PI / 2.0))?,
            Segment::free(h.clone(), t)?,
            Segment::gate(ry(-PI / 2.0))?,
        ];
        traj.push(t, &apply_sequence(&segs, &psi0)?);
    }
    Ok(traj)
}

/// Two-qubit parameters emulating `k`: `tau01 = tau1`, `tau10 = tau2`,
/// `E01 - E10 = delta_m`.
pub fn mapped_two_qubit(k: &KaonParams, g: f64) -> Result<TwoQubitParams, ScenarioError> {
    Ok(TwoQubitParams::new(
        k.m + 0.5 * k.delta_m,
        k.m - 0.5 * k.delta_m,
        k.tau1,
        k.tau2,
        g,
    )?)
}

/// `U_int U_det(t) U_int R_y^1(pi) |00>`. The trajectory holds all four
/// basis populations; `P_|10>` plays `P_K0` and `P_|01>` plays `P_K0bar`.
pub fn two_qubit_sequence(ts: &[f64], p: &TwoQubitParams) -> Result<Trajectory, ScenarioError> {
    p.validate()?;
    check_times(ts)?;
    let entangle = u_int(p.g)?;
    let start = entangle.apply(&flip_qubit1().apply(&StateVec::basis(4, 0)?)?)?;
    let h = h_det(p);
    let mut traj = Trajectory::default();
    for &t in ts {
        let segs = [
            Segment::free(h.clone(), t)?,
            Segment::gate(entangle.clone())?,
        ];
        traj.push(t, &apply_sequence(&segs, &start)?);
    }
    Ok(traj)
}

/// Index of `|01>` in the two-qubit ordering.
pub const STATE_01: usize = 1;
/// Index of `|10>` in the two-qubit ordering.
pub const STATE_10: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct Regeneration {
    /// State on arrival at the slab.
    pub before: StateVec,
    /// State after crossing the slab.
    pub after: StateVec,
    /// Raw `K1` amplitude after the slab.
    pub c1: C64,
    /// Raw `K2` amplitude after the slab.
    pub c2: C64,
}

impl Regeneration {
    /// `|C1| / |C2|` on arrival at the slab.
    pub fn ratio_before(&self) -> f64 {
        self.before.amplitude(1).norm() / self.before.amplitude(0).norm()
    }

    /// `|C1| / |C2|` after the slab.
    pub fn ratio_after(&self) -> f64 {
        self.c1.norm() / self.c2.norm()
    }
}

/// A `K0` beam decays freely for `t1`, then crosses a slab of matter for `t2`
/// where the Rabi term `k.omega_x` mixes `K1` and `K2`.
pub fn regeneration(t1: f64, t2: f64, k: &KaonParams) -> Result<Regeneration, ScenarioError> {
    k.validate()?;
    for (name, v) in [("t1", t1), ("t2", t2)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(ScenarioError::InvalidParams(format!(
                "{name} must be finite and non-negative, got {v}"
            )));
        }
    }
    if !(k.tau2 >= 10.0 * t1 && t1 >= 10.0 * k.tau1) {
        warn!(
            "regeneration expects tau2 >> t1 >> tau1 (got tau1 = {}, t1 = {t1}, tau2 = {})",
            k.tau1, k.tau2
        );
    }
    if t2 > 0.1 * t1 {
        warn!("slab time t2 = {t2} is not small against t1 = {t1}");
    }
    if k.omega_x == 0.0 {
        warn!("Omega_x = 0: the slab does not mix K1 and K2");
    }
    let (k0, _) = flavor_states();
    let flight = [Segment::free(h_rwa(&k.without_drive()), t1)?];
    let before = apply_sequence(&flight, &k0)?;
    let slab = [Segment::free(h_rwa(k), t2)?];
    let after = apply_sequence(&slab, &before)?;
    Ok(Regeneration {
        c1: after.amplitude(1),
        c2: after.amplitude(0),
        before,
        after,
    })
}

/// As [`single_qubit_sequence`] but starting from the CP-violating long-lived
/// state: `R_y(-pi/2) U(t) R_y(pi/2) U_L |0>` with `U_L |0> = K_L`.
pub fn cpv_sequence(ts: &[f64], k: &KaonParams, e: CpEpsilon) -> Result<Trajectory, ScenarioError> {
    k.validate()?;
    if k.omega_x != 0.0 {
        return Err(ScenarioError::DriveNotAllowed(k.omega_x));
    }
    check_times(ts)?;
    let (ul, _) = cp_violating_rotations(e)?;
    let psi0 = StateVec::basis(2, 0)?;
    let h = h_rwa(k);
    let mut traj = Trajectory::default();
    for &t in ts {
        let segs = [
            Segment::gate(ul.clone())?,
            Segment::gate(ry(PI / 2.0))?,
            Segment::free(h.clone(), t)?,
            Segment::gate(ry(-PI / 2.0))?,
        ];
        traj.push(t, &apply_sequence(&segs, &psi0)?);
    }
    Ok(traj)
}

/// Scenario selector for [`sweep`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioKind {
    AnalyticMixing,
    SingleQubit,
    /// Two-qubit emulation with coupling `g`.
    TwoQubit {
        g: f64,
    },
    Cpv(CpEpsilon),
}

impl FromStr for ScenarioKind {
    type Err = ScenarioError;

    /// Names as used on the command line. The two-qubit coupling defaults to
    /// `g = 1` (the ideal entangler does not depend on it) and `cpv` uses the
    /// `0.525 (1 + i)` admixture.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mix-analytic" => Ok(Self::AnalyticMixing),
            "mix-qubit" => Ok(Self::SingleQubit),
            "mix-two-qubit" => Ok(Self::TwoQubit { g: 1.0 }),
            "cpv" => Ok(Self::Cpv(CpEpsilon::along_one_plus_i(
                figures::FIG3_EPSILON_PART,
            ))),
            other => Err(ScenarioError::UnknownScenario(other.to_string())),
        }
    }
}

impl ScenarioKind {
    pub fn run(&self, ts: &[f64], k: &KaonParams) -> Result<Trajectory, ScenarioError> {
        match self {
            Self::AnalyticMixing => analytic_trajectory(ts, k),
            Self::SingleQubit => single_qubit_sequence(ts, k),
            Self::TwoQubit { g } => {
                let traj = two_qubit_sequence(ts, &mapped_two_qubit(k, *g)?)?;
                Ok(Trajectory {
                    probs: traj
                        .probs
                        .iter()
                        .map(|row| vec![row[STATE_10], row[STATE_01]])
                        .collect(),
                    ..traj
                })
            }
            Self::Cpv(e) => cpv_sequence(ts, k, *e),
        }
    }
}

/// Runs one scenario per grid point in parallel; output order follows `grid`.
/// Two-qubit results are reduced to `(P_|10>, P_|01>)`.
pub fn sweep(
    kind: ScenarioKind,
    grid: &[KaonParams],
    ts: &[f64],
) -> Result<Vec<Trajectory>, ScenarioError> {
    if grid.is_empty() {
        return Err(ScenarioError::EmptyGrid);
    }
    grid.par_iter().map(|k| kind.run(ts, k)).collect()
}

/// [`sweep`] with the scenario given by name.
pub fn sweep_named(
    name: &str,
    grid: &[KaonParams],
    ts: &[f64],
) -> Result<Vec<Trajectory>, ScenarioError> {
    sweep(name.parse()?, grid, ts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig2() -> KaonParams {
        KaonParams::dimensionless(figures::FIG2_TAU2_OVER_TAU1, figures::FIG2_TAU1_DELTA_M).unwrap()
    }

    #[test]
    fn analytic_at_zero_is_exact() {
        assert_eq!(analytic_mixing(0.0, 1.0, 584.0, 0.477), (1.0, 0.0));
    }

    #[test]
    fn analytic_quarter_period() {
        let dm = 0.477;
        let (p, q) = analytic_mixing(PI / (2.0 * dm), 1.0, 584.0, dm);
        assert!((p - q).abs() < 1e-12);
    }

    #[test]
    fn fig1_ratio_is_the_exact_expression() {
        assert_eq!(figures::FIG1_TAU2_OVER_TAU1, 0.52 / 0.89 * 1000.0);
        assert!((figures::FIG1_TAU2_OVER_TAU1 - 584.269_662_921_348_3).abs() < 1e-9);
    }

    #[test]
    fn uniform_grid_endpoints() {
        let ts = uniform_times(10.0, 1000);
        assert_eq!(ts.len(), 1000);
        assert_eq!(ts[0], 0.0);
        assert_eq!(ts[999], 10.0);
        assert_eq!(ts[1], 10.0 / 999.0);
        assert!(uniform_times(1.0, 0).is_empty());
    }

    #[test]
    fn single_qubit_starts_in_zero() {
        let traj = single_qubit_sequence(&[0.0], &fig2()).unwrap();
        assert!((traj.probs[0][0] - 1.0).abs() < 1e-15);
        assert!(traj.probs[0][1].abs() < 1e-15);
    }

    #[test]
    fn single_qubit_rejects_drive() {
        let mut k = fig2();
        k.omega_x = 0.1;
        assert_eq!(
            single_qubit_sequence(&[0.0], &k),
            Err(ScenarioError::DriveNotAllowed(0.1))
        );
    }

    #[test]
    fn single_qubit_matches_formula() {
        let k = fig2();
        let ts = uniform_times(10.0, 200);
        let traj = single_qubit_sequence(&ts, &k).unwrap();
        for (t, row) in ts.iter().zip(&traj.probs) {
            let (p, q) = analytic_mixing(*t, k.tau1, k.tau2, k.delta_m);
            assert!((row[0] - p).abs() < 1e-12);
            assert!((row[1] - q).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_time_grids() {
        let k = fig2();
        assert_eq!(
            single_qubit_sequence(&[0.0, 1.0, 1.0], &k),
            Err(ScenarioError::BadSampleTimes(2))
        );
        assert_eq!(
            analytic_trajectory(&[-1.0], &k),
            Err(ScenarioError::BadSampleTimes(0))
        );
    }

    #[test]
    fn two_qubit_at_zero_is_full_rotation() {
        let p = mapped_two_qubit(&fig2(), 5.0).unwrap();
        let traj = two_qubit_sequence(&[0.0], &p).unwrap();
        let row = &traj.probs[0];
        assert!((row[STATE_01] + row[STATE_10] - 1.0).abs() < 1e-14);
        assert!((row[STATE_10] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn regeneration_without_drive_does_not_regenerate() {
        let k = KaonParams::new(0.0, 0.477, 1.0, 1000.0, 0.0).unwrap();
        let r = regeneration(20.0, 0.1, &k).unwrap();
        let bound = (-20.0 * (0.5 / k.tau1 - 0.5 / k.tau2)).exp();
        assert!(r.ratio_after() <= bound * (1.0 + 1e-12));
    }

    #[test]
    fn regeneration_stage_one_phase() {
        let k = KaonParams::new(0.3, 0.477, 1.0, 1000.0, 2.0).unwrap();
        let t1 = 20.0;
        let r = regeneration(t1, 0.1, &k).unwrap();
        let expect = C64::new(0.0, -k.m2() * t1).exp()
            * (-t1 / (2.0 * k.tau2)).exp()
            * std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.before.amplitude(0) - expect).norm() < 1e-12);
    }

    #[test]
    fn cpv_with_zero_epsilon_is_the_plain_sequence() {
        let k = fig2();
        let ts = uniform_times(10.0, 50);
        let a = cpv_sequence(&ts, &k, CpEpsilon::new(0.0, 0.0)).unwrap();
        let b = single_qubit_sequence(&ts, &k).unwrap();
        for (x, y) in a.probs.iter().zip(&b.probs) {
            assert!((x[0] - y[0]).abs() < 1e-15 && (x[1] - y[1]).abs() < 1e-15);
        }
    }

    #[test]
    fn cpv_rejects_bad_epsilon() {
        let k = fig2();
        assert!(matches!(
            cpv_sequence(&[0.0], &k, CpEpsilon::new(0.5, 0.0)),
            Err(ScenarioError::Kaon(KaonError::EpsilonPhase(_)))
        ));
    }

    #[test]
    fn scenario_names() {
        assert_eq!(
            "mix-qubit".parse::<ScenarioKind>(),
            Ok(ScenarioKind::SingleQubit)
        );
        assert_eq!(
            "bogus".parse::<ScenarioKind>(),
            Err(ScenarioError::UnknownScenario("bogus".into()))
        );
        assert!(sweep_named("bogus", &[fig2()], &[0.0]).is_err());
        assert_eq!(
            sweep(ScenarioKind::SingleQubit, &[], &[0.0]),
            Err(ScenarioError::EmptyGrid)
        );
    }
}
