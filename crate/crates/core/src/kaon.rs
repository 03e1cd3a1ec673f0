//! Kaon side of the mapping: the rotating-frame Hamiltonian with metastable
//! decay terms, flavor states, the CP operator and CP-violating modes.
//!
//! Basis: `|K2> = |0>` (long-lived, first component), `|K1> = |1>`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};

use log::warn;
use num_complex::Complex64 as C64;
use thiserror::Error;

use crate::qmath::{pauli, rotation, rz, Axis, Operator, QmathError, StateVec};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KaonError {
    #[error("invalid kaon parameter: {0}")]
    InvalidParams(String),
    #[error("|epsilon| = {0} must be below 1")]
    EpsilonTooLarge(f64),
    #[error(
        "rotation construction valid only for epsilon proportional to (1+i); arg(epsilon) = {0}"
    )]
    EpsilonPhase(f64),
    #[error(transparent)]
    Qmath(#[from] QmathError),
}

/// Rotating-frame parameters, `hbar = c = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KaonParams {
    /// Mean mass `m`; contributes a global phase only.
    pub m: f64,
    /// `Delta m = m2 - m1`.
    pub delta_m: f64,
    /// Short lifetime of `|K1>`.
    pub tau1: f64,
    /// Long lifetime of `|K2>`.
    pub tau2: f64,
    pub omega_x: f64,
}

impl KaonParams {
    pub fn new(
        m: f64,
        delta_m: f64,
        tau1: f64,
        tau2: f64,
        omega_x: f64,
    ) -> Result<Self, KaonError> {
        let k = Self {
            m,
            delta_m,
            tau1,
            tau2,
            omega_x,
        };
        k.validate()?;
        Ok(k)
    }

    /// Parameters in units of the short lifetime: `tau1 = 1`, `m = 0`.
    pub fn dimensionless(tau2_over_tau1: f64, tau1_delta_m: f64) -> Result<Self, KaonError> {
        Self::new(0.0, tau1_delta_m, 1.0, tau2_over_tau1, 0.0)
    }

    pub fn validate(&self) -> Result<(), KaonError> {
        for (name, v) in [("tau1", self.tau1), ("tau2", self.tau2)] {
            if !(v > 0.0) {
                return Err(KaonError::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if ![self.m, self.delta_m, self.omega_x]
            .iter()
            .all(|v| v.is_finite())
        {
            return Err(KaonError::InvalidParams(
                "m, delta_m and omega_x must be finite".into(),
            ));
        }
        if self.tau2 <= self.tau1 {
            warn!(
                "tau2 = {} is not longer than tau1 = {}; |K2> is meant to be the long-lived mode",
                self.tau2, self.tau1
            );
        }
        Ok(())
    }

    pub fn m2(&self) -> f64 {
        self.m + 0.5 * self.delta_m
    }

    pub fn m1(&self) -> f64 {
        self.m - 0.5 * self.delta_m
    }

    pub fn without_drive(&self) -> Self {
        Self {
            omega_x: 0.0,
            ..*self
        }
    }
}

/// Diagonal strong+weak part `diag(m2 - i/2 tau2, m1 - i/2 tau1)`.
pub fn h_strong_weak(k: &KaonParams) -> Operator {
    Operator::diag(&[
        C64::new(k.m2(), -0.5 / k.tau2),
        C64::new(k.m1(), -0.5 / k.tau1),
    ])
    .expect("finite diagonal")
}

/// `H_RWA = diag(m2 - i/2 tau2, m1 - i/2 tau1) + (Omega_x / 2) sigma_x`.
pub fn h_rwa(k: &KaonParams) -> Operator {
    let rabi = pauli(Axis::X).scale(C64::new(0.5 * k.omega_x, 0.0));
    h_strong_weak(k).add(&rabi).expect("both 2x2")
}

/// `(K0, K0bar) = ((|K1> + |K2>)/sqrt2, (|K1> - |K2>)/sqrt2)`.
pub fn flavor_states() -> (StateVec, StateVec) {
    let s = FRAC_1_SQRT_2;
    let k0 = StateVec::new(vec![C64::new(s, 0.0), C64::new(s, 0.0)]).expect("dim 2");
    let k0bar = StateVec::new(vec![C64::new(-s, 0.0), C64::new(s, 0.0)]).expect("dim 2");
    (k0, k0bar)
}

pub fn k2() -> StateVec {
    StateVec::basis(2, 0).expect("dim 2")
}

pub fn k1() -> StateVec {
    StateVec::basis(2, 1).expect("dim 2")
}

/// `CP = -i sigma_z = R_z(pi)`.
pub fn cp_operator() -> Operator {
    rz(PI)
}

/// Complex CP-violation parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpEpsilon(pub C64);

impl CpEpsilon {
    pub fn new(re: f64, im: f64) -> Self {
        Self(C64::new(re, im))
    }

    /// `a (1 + i)`.
    pub fn along_one_plus_i(a: f64) -> Self {
        Self(C64::new(a, a))
    }

    pub fn modulus(&self) -> f64 {
        self.0.norm()
    }

    /// `2 arctan |epsilon|`.
    pub fn rotation_angle(&self) -> f64 {
        2.0 * self.modulus().atan()
    }
}

/// `K_L = (|K2> + eps |K1>)/sqrt(1+|eps|^2)`, `K_S = (eps |K2> + |K1>)/sqrt(1+|eps|^2)`.
pub fn cp_violating_states(e: CpEpsilon) -> (StateVec, StateVec) {
    let n = (1.0 + e.0.norm_sqr()).sqrt().recip();
    let one = C64::new(n, 0.0);
    let eps = e.0 * n;
    let kl = StateVec::new(vec![one, eps]).expect("dim 2");
    let ks = StateVec::new(vec![eps, one]).expect("dim 2");
    (kl, ks)
}

/// `U_L = exp(+i theta (sx - sy)/(2 sqrt2))`, `U_S = exp(+i theta (sx + sy)/(2 sqrt2))`
/// with `theta = 2 arctan |eps|`, so that `U_L |0> = K_L` and `U_S |1> = K_S`.
/// Only defined for `arg(eps) = pi/4`.
pub fn cp_violating_rotations(e: CpEpsilon) -> Result<(Operator, Operator), KaonError> {
    let modulus = e.modulus();
    if !modulus.is_finite() {
        return Err(KaonError::InvalidParams("epsilon must be finite".into()));
    }
    if modulus >= 1.0 {
        return Err(KaonError::EpsilonTooLarge(modulus));
    }
    if modulus > 0.0 {
        let arg = e.0.arg();
        if (arg - FRAC_PI_4).abs() > 1e-9 {
            return Err(KaonError::EpsilonPhase(arg));
        }
    }
    let theta = e.rotation_angle();
    let ul = rotation([1.0, -1.0, 0.0], -theta)?;
    let us = rotation([1.0, 1.0, 0.0], -theta)?;
    Ok((ul, us))
}
