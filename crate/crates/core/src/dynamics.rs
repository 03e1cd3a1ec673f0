//! Time evolution: constant-generator propagation, gate/free-evolution
//! sequences, explicit lab-frame integration of the driven qubit, and the
//! two-qubit detuned and coupling Hamiltonians.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::qmath::{expm, kron, pauli, ry, Axis, Operator, QmathError, StateVec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("dimension mismatch: operator {operator} vs state {state}")]
    DimensionMismatch { operator: usize, state: usize },
    #[error("duration must be finite and non-negative, got {0}")]
    BadDuration(f64),
    #[error("gate operators must be flagged unitary")]
    NonUnitaryGate,
    #[error("sample times must be strictly increasing (index {0})")]
    UnsortedSamples(usize),
    #[error("sample time {time} outside [0, {total}]")]
    SampleOutOfRange { time: f64, total: f64 },
    #[error("under-resolved drive: dt = {dt:e} exceeds {limit:e}")]
    UnderResolved { dt: f64, limit: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}

/// `psi(t) = exp(-i H t) psi0`, without renormalization.
pub fn propagate_const(h: &Operator, psi0: &StateVec, t: f64) -> Result<StateVec, DynamicsError> {
    if h.dim() != psi0.dim() {
        return Err(DynamicsError::DimensionMismatch {
            operator: h.dim(),
            state: psi0.dim(),
        });
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(DynamicsError::BadDuration(t));
    }
    Ok(expm(h, t)?.apply(psi0)?)
}

/// One step of a control sequence. Gates act instantaneously.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    FreeEvolution { h: Operator, duration: f64 },
    Gate(Operator),
}

impl Segment {
    pub fn free(h: Operator, duration: f64) -> Result<Self, DynamicsError> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(DynamicsError::BadDuration(duration));
        }
        Ok(Segment::FreeEvolution { h, duration })
    }

    pub fn gate(u: Operator) -> Result<Self, DynamicsError> {
        if !u.is_unitary() {
            return Err(DynamicsError::NonUnitaryGate);
        }
        Ok(Segment::Gate(u))
    }

    fn dim(&self) -> usize {
        match self {
            Segment::FreeEvolution { h, .. } => h.dim(),
            Segment::Gate(u) => u.dim(),
        }
    }

    pub fn duration(&self) -> f64 {
        match self {
            Segment::FreeEvolution { duration, .. } => *duration,
            Segment::Gate(_) => 0.0,
        }
    }
}

/// Sampled probabilities of the computational basis states.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `probs[i][k] = |<k|psi(times[i])>|^2`.
    pub probs: Vec<Vec<f64>>,
    pub norms: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn push(&mut self, t: f64, psi: &StateVec) {
        self.times.push(t);
        self.probs.push(psi.probabilities());
        self.norms.push(psi.norm());
    }

    /// Probability series of basis state `k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.probs.iter().map(|row| row[k]).collect()
    }
}

fn check_samples(samples: &[f64]) -> Result<(), DynamicsError> {
    for (i, w) in samples.windows(2).enumerate() {
        if !(w[1] > w[0]) {
            return Err(DynamicsError::UnsortedSamples(i + 1));
        }
    }
    if let Some(&t) = samples.iter().find(|t| !t.is_finite() || **t < 0.0) {
        return Err(DynamicsError::SampleOutOfRange {
            time: t,
            total: f64::NAN,
        });
    }
    Ok(())
}

fn check_segments(segs: &[Segment], dim: usize) -> Result<(), DynamicsError> {
    for s in segs {
        if s.dim() != dim {
            return Err(DynamicsError::DimensionMismatch {
                operator: s.dim(),
                state: dim,
            });
        }
        if let Segment::Gate(u) = s {
            if !u.is_unitary() {
                return Err(DynamicsError::NonUnitaryGate);
            }
        }
    }
    Ok(())
}

/// Applies the segments in order and samples the state at the given times,
/// measured along the free evolutions. A sample at time `t` sees every gate
/// placed at or before `t`.
pub fn run_sequence(
    segs: &[Segment],
    psi0: &StateVec,
    sample_times: &[f64],
) -> Result<Trajectory, DynamicsError> {
    check_segments(segs, psi0.dim())?;
    check_samples(sample_times)?;
    let total: f64 = segs.iter().map(Segment::duration).sum();
    let mut traj = Trajectory::default();
    let mut state = psi0.clone();
    let mut start = 0.0;
    let mut next = 0;
    for seg in segs {
        match seg {
            Segment::Gate(u) => state = u.apply(&state)?,
            Segment::FreeEvolution { h, duration } => {
                let end = start + duration;
                while next < sample_times.len() && sample_times[next] < end {
                    let t = sample_times[next];
                    traj.push(t, &propagate_const(h, &state, (t - start).max(0.0))?);
                    next += 1;
                }
                state = propagate_const(h, &state, *duration)?;
                start = end;
            }
        }
    }
    let slack = 1e-12 * total.max(1.0);
    while next < sample_times.len() && sample_times[next] <= start + slack {
        traj.push(sample_times[next], &state);
        next += 1;
    }
    if next < sample_times.len() {
        return Err(DynamicsError::SampleOutOfRange {
            time: sample_times[next],
            total,
        });
    }
    Ok(traj)
}

/// Final state after the whole sequence.
pub fn apply_sequence(segs: &[Segment], psi0: &StateVec) -> Result<StateVec, DynamicsError> {
    check_segments(segs, psi0.dim())?;
    segs.iter().try_fold(psi0.clone(), |state, seg| match seg {
        Segment::Gate(u) => Ok(u.apply(&state)?),
        Segment::FreeEvolution { h, duration } => propagate_const(h, &state, *duration),
    })
}

/// Lab-frame single-qubit drive
/// `H(t) = -(de/2) sz + Omega_x cos(w_rf t) sx - (i/2) diag(1/tau0, 1/tau1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabDrive {
    /// Level splitting (rad/s).
    pub delta_eps: f64,
    pub omega_x: f64,
    pub omega_rf: f64,
    /// Lifetime of `|0>`; `f64::INFINITY` disables decay.
    pub tau0: f64,
    /// Lifetime of `|1>`.
    pub tau1: f64,
}

impl LabDrive {
    pub fn lossless(delta_eps: f64, omega_x: f64, omega_rf: f64) -> Self {
        Self {
            delta_eps,
            omega_x,
            omega_rf,
            tau0: f64::INFINITY,
            tau1: f64::INFINITY,
        }
    }

    /// Largest admissible step, `2 pi / (50 max(de, w_rf))`.
    pub fn max_step(&self) -> f64 {
        2.0 * PI / (50.0 * self.delta_eps.abs().max(self.omega_rf.abs()))
    }

    fn derivative(&self, t: f64, psi: [C64; 2]) -> [C64; 2] {
        let half = 0.5 * self.delta_eps;
        let drive = self.omega_x * (self.omega_rf * t).cos();
        let g0 = 0.5 / self.tau0;
        let g1 = 0.5 / self.tau1;
        let h_psi = [
            C64::new(-half, -g0) * psi[0] + drive * psi[1],
            drive * psi[0] + C64::new(half, -g1) * psi[1],
        ];
        // d psi / dt = -i H psi
        [
            C64::new(0.0, -1.0) * h_psi[0],
            C64::new(0.0, -1.0) * h_psi[1],
        ]
    }

    fn rk4_step(&self, t: f64, dt: f64, psi: [C64; 2]) -> [C64; 2] {
        let add = |a: [C64; 2], b: [C64; 2], s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
        let k1 = self.derivative(t, psi);
        let k2 = self.derivative(t + 0.5 * dt, add(psi, k1, 0.5 * dt));
        let k3 = self.derivative(t + 0.5 * dt, add(psi, k2, 0.5 * dt));
        let k4 = self.derivative(t + dt, add(psi, k3, dt));
        [
            psi[0] + (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) * (dt / 6.0),
            psi[1] + (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) * (dt / 6.0),
        ]
    }

    fn validate(&self, dt: f64) -> Result<(), DynamicsError> {
        if ![self.delta_eps, self.omega_x, self.omega_rf]
            .iter()
            .all(|v| v.is_finite())
            || self.tau0.is_nan()
            || self.tau1.is_nan()
            || self.tau0 <= 0.0
            || self.tau1 <= 0.0
        {
            return Err(DynamicsError::InvalidParams(
                "drive frequencies must be finite and lifetimes positive".into(),
            ));
        }
        if !(dt > 0.0) {
            return Err(DynamicsError::BadDuration(dt));
        }
        let limit = self.max_step();
        if dt > limit * (1.0 + 1e-12) {
            return Err(DynamicsError::UnderResolved { dt, limit });
        }
        Ok(())
    }

    fn integrate(&self, mut psi: [C64; 2], from: f64, to: f64, dt: f64) -> [C64; 2] {
        let span = to - from;
        if span <= 0.0 {
            return psi;
        }
        let steps = (span / dt).ceil().max(1.0) as usize;
        let h = span / steps as f64;
        for i in 0..steps {
            psi = self.rk4_step(from + h * i as f64, h, psi);
        }
        psi
    }
}

fn as_pair(psi: &StateVec) -> Result<[C64; 2], DynamicsError> {
    match psi.amplitudes() {
        [a, b] => Ok([*a, *b]),
        _ => Err(DynamicsError::DimensionMismatch {
            operator: 2,
            state: psi.dim(),
        }),
    }
}

/// Integrates the driven lab-frame equation with fixed-step classical RK4 and
/// returns `psi(t_final)`. The step is shrunk so that it divides `t_final`.
pub fn driven_lab_frame(
    drive: &LabDrive,
    psi0: &StateVec,
    t_final: f64,
    dt: f64,
) -> Result<StateVec, DynamicsError> {
    drive.validate(dt)?;
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(DynamicsError::BadDuration(t_final));
    }
    let out = drive.integrate(as_pair(psi0)?, 0.0, t_final, dt);
    Ok(StateVec::new(out.to_vec())?)
}

/// As [`driven_lab_frame`], recording the state at each sample time.
pub fn driven_lab_frame_samples(
    drive: &LabDrive,
    psi0: &StateVec,
    sample_times: &[f64],
    dt: f64,
) -> Result<Trajectory, DynamicsError> {
    drive.validate(dt)?;
    check_samples(sample_times)?;
    let mut psi = as_pair(psi0)?;
    let mut t = 0.0;
    let mut traj = Trajectory::default();
    for &s in sample_times {
        psi = drive.integrate(psi, t, s, dt);
        t = s;
        traj.push(s, &StateVec::new(psi.to_vec())?);
    }
    Ok(traj)
}

/// Two capacitively coupled, detuned qubits (rad/s and s, `hbar = 1`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitParams {
    pub e01: f64,
    pub e10: f64,
    pub tau01: f64,
    pub tau10: f64,
    pub g: f64,
}

impl TwoQubitParams {
    pub fn new(e01: f64, e10: f64, tau01: f64, tau10: f64, g: f64) -> Result<Self, DynamicsError> {
        let p = Self {
            e01,
            e10,
            tau01,
            tau10,
            g,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), DynamicsError> {
        if !(self.g.is_finite() && self.g > 0.0) {
            return Err(DynamicsError::InvalidParams(format!(
                "coupling g must be positive, got {}",
                self.g
            )));
        }
        if self.tau01.is_nan() || self.tau10.is_nan() || self.tau01 <= 0.0 || self.tau10 <= 0.0 {
            return Err(DynamicsError::InvalidParams(
                "lifetimes must be positive".into(),
            ));
        }
        if !(self.e01.is_finite() && self.e10.is_finite()) {
            return Err(DynamicsError::InvalidParams(
                "energies must be finite".into(),
            ));
        }
        if self.e01 - self.e10 <= 0.0 {
            warn!(
                "detuning E01 - E10 = {} is not positive",
                self.e01 - self.e10
            );
        }
        if self.tau01 >= self.tau10 {
            warn!(
                "tau01 = {} is not shorter than tau10 = {}",
                self.tau01, self.tau10
            );
        }
        Ok(())
    }

    /// `E01 - E10`.
    pub fn detuning(&self) -> f64 {
        self.e01 - self.e10
    }
}

/// Detuned, non-interacting Hamiltonian: `E10 - i/2 tau10` on the excited
/// level of qubit 2 plus `E01 - i/2 tau01` on the excited level of qubit 1.
pub fn h_det(p: &TwoQubitParams) -> Operator {
    let zero = C64::new(0.0, 0.0);
    let q2 = Operator::diag(&[zero, C64::new(p.e10, -0.5 / p.tau10)]).expect("finite");
    let q1 = Operator::diag(&[zero, C64::new(p.e01, -0.5 / p.tau01)]).expect("finite");
    let id = Operator::identity(2).expect("dim 2");
    let left = kron(&q2, &id).expect("2x2 factors");
    let right = kron(&id, &q1).expect("2x2 factors");
    left.add(&right).expect("4x4")
}

/// `(g/2)(sx (x) sx + sy (x) sy)`.
pub fn h_int(g: f64) -> Result<Operator, DynamicsError> {
    if !(g.is_finite() && g > 0.0) {
        return Err(DynamicsError::InvalidParams(format!(
            "coupling g must be positive, got {g}"
        )));
    }
    let xx = kron(&pauli(Axis::X), &pauli(Axis::X))?;
    let yy = kron(&pauli(Axis::Y), &pauli(Axis::Y))?;
    Ok(xx.add(&yy)?.scale(C64::new(0.5 * g, 0.0)))
}

/// Ideal entangler: decay-free evolution under `h_int(g)` for `pi / 4g`.
pub fn u_int(g: f64) -> Result<Operator, DynamicsError> {
    let h = h_int(g)?;
    Ok(expm(&h, PI / (4.0 * g))?.into_unitary()?)
}

/// Entangler including the detuned, decaying terms during the coupling
/// window: evolution under `h_det + h_int` for `pi / 4g`. Not unitary.
pub fn u_int_lossy(p: &TwoQubitParams) -> Result<Operator, DynamicsError> {
    let h = h_det(p).add(&h_int(p.g)?)?;
    Ok(expm(&h, PI / (4.0 * p.g))?)
}

/// `R_y(pi)` on qubit 1 (right ket digit).
pub fn flip_qubit1() -> Operator {
    let id = Operator::identity(2).expect("dim 2");
    kron(&id, &ry(PI)).expect("2x2 factors")
}
