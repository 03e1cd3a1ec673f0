//! Stationary problem of the dc-biased junction.
//!
//! `H_dc = E_c p^2 / hbar^2 - E_J cos(delta) + (E_J / 2 beta)(delta - 2 pi phi_dc)^2`
//! is discretized with second-order central differences on a window around one
//! well of the corrugated parabola, with hard walls at the window edges. The
//! lowest eigenpairs give the qubit levels, the phase matrix elements
//! `delta_mn`, and the momentum matrix elements used to cross-check the
//! commutator identity `p_mn = (i hbar / 2 E_c)(E_m - E_n) delta_mn`.
//!
//! All energies are in joules, phases in radians, momenta in J*s.

use std::f64::consts::PI;

use log::warn;
use num_complex::Complex64 as C64;
use thiserror::Error;

/// Exact SI values.
pub mod consts {
    pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
    pub const PLANCK: f64 = 6.626_070_15e-34;
    pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);
    /// `h / 2e`.
    pub const FLUX_QUANTUM: f64 = PLANCK / (2.0 * ELEMENTARY_CHARGE);
}

use consts::{ELEMENTARY_CHARGE, FLUX_QUANTUM, HBAR};

const MAX_NEWTON_ITERS: usize = 100;
const SCAN_POINTS: usize = 20_000;
/// Half-width of the window, in oscillator lengths, for a well with no barriers.
const PARABOLA_HALF_WIDTH: f64 = 5.0;
/// Height (in units of the barrier) at which an open side of the window is cut.
const OPEN_SIDE_HEIGHT: f64 = 3.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum JunctionError {
    #[error("invalid junction parameter: {0}")]
    InvalidParams(String),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("no well with index {index} ({available} wells found)")]
    NoSuchWell { index: usize, available: usize },
    #[error("window [{lo}, {hi}] does not contain the well minimum at {minimum}")]
    WindowMissesMinimum { lo: f64, hi: f64, minimum: f64 },
    #[error("states not metastable in window: level {level} at {energy:e} J is above the barrier top {barrier:e} J")]
    NotMetastable {
        level: usize,
        energy: f64,
        barrier: f64,
    },
    #[error("need at least {needed} levels, have {have}")]
    TooFewLevels { needed: usize, have: usize },
    #[error("drive too strong for the two-level reduction: hbar*Omega_x / delta_eps = {0:e}")]
    DriveTooStrong(f64),
    #[error("level splitting is not positive: {0:e} J")]
    NonPositiveSplitting(f64),
}

/// Physical junction and loop parameters with the bias drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionParams {
    /// Junction capacitance (F).
    pub capacitance: f64,
    /// Critical current (A).
    pub critical_current: f64,
    /// Loop inductance (H).
    pub inductance: f64,
    /// Dimensionless dc flux bias.
    pub phi_dc: f64,
    /// Dimensionless ac flux amplitude.
    pub phi_ac: f64,
    /// Drive angular frequency (rad/s).
    pub omega_rf: f64,
}

impl JunctionParams {
    pub fn new(
        capacitance: f64,
        critical_current: f64,
        inductance: f64,
        phi_dc: f64,
        phi_ac: f64,
        omega_rf: f64,
    ) -> Result<Self, JunctionError> {
        let p = Self {
            capacitance,
            critical_current,
            inductance,
            phi_dc,
            phi_ac,
            omega_rf,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), JunctionError> {
        let bad = |what: &str| Err(JunctionError::InvalidParams(what.to_string()));
        for (name, v) in [
            ("capacitance", self.capacitance),
            ("critical_current", self.critical_current),
            ("inductance", self.inductance),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive and finite, got {v}"));
            }
        }
        if !self.phi_dc.is_finite() || !self.phi_ac.is_finite() || !self.omega_rf.is_finite() {
            return bad("flux bias and drive frequency must be finite");
        }
        let ratio = if self.phi_ac == 0.0 {
            0.0
        } else {
            (self.phi_ac / self.phi_dc).abs()
        };
        if ratio >= 0.1 {
            return bad(&format!(
                "|phi_ac / phi_dc| = {ratio} violates the small-drive condition (< 0.1)"
            ));
        }
        if ratio > 0.01 {
            warn!("|phi_ac / phi_dc| = {ratio} exceeds 0.01; the drive is not small");
        }
        Ok(())
    }
}

/// Charging energy, Josephson energy and dimensionless loop inductance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedEnergies {
    /// `E_c = (2e)^2 / 2C` (J).
    pub charging: f64,
    /// `E_J = (hbar / 2e) I0` (J).
    pub josephson: f64,
    /// `beta = 2 pi I0 L / Phi0`.
    pub beta: f64,
}

pub fn derived_energies(p: &JunctionParams) -> DerivedEnergies {
    let two_e = 2.0 * ELEMENTARY_CHARGE;
    DerivedEnergies {
        charging: two_e * two_e / (2.0 * p.capacitance),
        josephson: HBAR / two_e * p.critical_current,
        beta: 2.0 * PI * p.critical_current * p.inductance / FLUX_QUANTUM,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PotentialShape {
    /// `-E_J cos(delta) + (E_J / 2 beta)(delta - 2 pi phi)^2`
    Washboard,
    /// The parabola alone; the harmonic reference case.
    QuadraticOnly,
}

/// The dc potential `U(delta)` together with the kinetic scale `E_c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Potential {
    pub charging: f64,
    pub josephson: f64,
    pub beta: f64,
    pub phi_dc: f64,
    pub shape: PotentialShape,
}

impl Potential {
    pub fn washboard(p: &JunctionParams) -> Self {
        Self::from_params(p, PotentialShape::Washboard)
    }

    pub fn quadratic_only(p: &JunctionParams) -> Self {
        Self::from_params(p, PotentialShape::QuadraticOnly)
    }

    fn from_params(p: &JunctionParams, shape: PotentialShape) -> Self {
        let d = derived_energies(p);
        Self {
            charging: d.charging,
            josephson: d.josephson,
            beta: d.beta,
            phi_dc: p.phi_dc,
            shape,
        }
    }

    fn center(&self) -> f64 {
        2.0 * PI * self.phi_dc
    }

    fn cos_weight(&self) -> f64 {
        match self.shape {
            PotentialShape::Washboard => 1.0,
            PotentialShape::QuadraticOnly => 0.0,
        }
    }

    pub fn value(&self, delta: f64) -> f64 {
        let x = delta - self.center();
        self.josephson * (-self.cos_weight() * delta.cos() + x * x / (2.0 * self.beta))
    }

    /// `U'(delta) / E_J`.
    pub fn reduced_slope(&self, delta: f64) -> f64 {
        self.cos_weight() * delta.sin() + (delta - self.center()) / self.beta
    }

    /// `U''(delta) / E_J`.
    pub fn reduced_curvature(&self, delta: f64) -> f64 {
        self.cos_weight() * delta.cos() + 1.0 / self.beta
    }

    /// Oscillator length `(2 E_c / U'')^(1/4)` of the harmonic approximation at `delta`.
    pub fn harmonic_length(&self, delta: f64) -> f64 {
        (2.0 * self.charging / (self.josephson * self.reduced_curvature(delta))).powf(0.25)
    }

    /// Search interval `[2 pi phi - beta - pi, 2 pi phi + beta + pi]`.
    pub fn search_range(&self) -> (f64, f64) {
        let reach = self.beta + PI;
        (self.center() - reach, self.center() + reach)
    }
}

/// `U(delta)` for the washboard potential at the dc bias.
pub fn potential(p: &JunctionParams, delta: f64) -> f64 {
    Potential::washboard(p).value(delta)
}

/// A stationary point of `U`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub delta: f64,
    pub energy: f64,
    /// `|U'(delta)| / E_J` at the returned point.
    pub residual: f64,
}

/// A seed whose Newton polish did not converge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeedFailure {
    pub seed: f64,
    pub last_delta: f64,
    pub last_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CriticalPoints {
    /// Local minima sorted ascending in `delta`.
    pub minima: Vec<Extremum>,
    /// Local maxima sorted ascending in `delta`.
    pub maxima: Vec<Extremum>,
    pub skipped: Vec<SeedFailure>,
}

impl CriticalPoints {
    /// The barrier tops adjacent to a minimum, `(left, right)`.
    pub fn neighbours(&self, minimum: f64) -> (Option<Extremum>, Option<Extremum>) {
        let left = self
            .maxima
            .iter()
            .filter(|m| m.delta < minimum)
            .max_by(|a, b| a.delta.total_cmp(&b.delta))
            .copied();
        let right = self
            .maxima
            .iter()
            .filter(|m| m.delta > minimum)
            .min_by(|a, b| a.delta.total_cmp(&b.delta))
            .copied();
        (left, right)
    }
}

/// Locates all stationary points of `U` in the search range: sign changes of
/// `U'` on a dense scan seed a Newton iteration that is kept inside the
/// bracket, polished until `|U'| < 1e-14 E_J` or the step stalls at rounding
/// level.
pub fn critical_points(pot: &Potential) -> CriticalPoints {
    let (lo, hi) = pot.search_range();
    let step = (hi - lo) / SCAN_POINTS as f64;
    let mut out = CriticalPoints::default();
    let mut prev_x = lo;
    let mut prev_g = pot.reduced_slope(lo);
    for i in 1..=SCAN_POINTS {
        let x = lo + step * i as f64;
        let g = pot.reduced_slope(x);
        if prev_g == 0.0 || prev_g.signum() != g.signum() && g != 0.0 {
            let is_min = prev_g < 0.0 || (prev_g == 0.0 && g > 0.0);
            match polish(pot, prev_x, x) {
                Ok(delta) => {
                    let e = Extremum {
                        delta,
                        energy: pot.value(delta),
                        residual: pot.reduced_slope(delta).abs(),
                    };
                    if is_min {
                        out.minima.push(e);
                    } else {
                        out.maxima.push(e);
                    }
                }
                Err(fail) => out.skipped.push(fail),
            }
        }
        prev_x = x;
        prev_g = g;
    }
    out
}

fn polish(pot: &Potential, mut a: f64, mut b: f64) -> Result<f64, SeedFailure> {
    let seed = 0.5 * (a + b);
    let ga = pot.reduced_slope(a);
    let mut x = seed;
    let mut g = pot.reduced_slope(x);
    for _ in 0..MAX_NEWTON_ITERS {
        if g.abs() < 1e-14 {
            return Ok(x);
        }
        // shrink the bracket, then try Newton inside it
        if g.signum() == ga.signum() {
            a = x;
        } else {
            b = x;
        }
        let curv = pot.reduced_curvature(x);
        let newton = x - g / curv;
        let next = if curv != 0.0 && newton > a.min(b) && newton < a.max(b) {
            newton
        } else {
            0.5 * (a + b)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1.0) {
            let gn = pot.reduced_slope(next);
            return Ok(if gn.abs() < g.abs() { next } else { x });
        }
        x = next;
        g = pot.reduced_slope(x);
    }
    Err(SeedFailure {
        seed,
        last_delta: x,
        last_residual: g.abs(),
    })
}

/// Local minima of the washboard potential with the skipped seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct WellMinima {
    pub minima: Vec<Extremum>,
    pub skipped: Vec<SeedFailure>,
}

pub fn find_well_minima(p: &JunctionParams) -> WellMinima {
    let cp = critical_points(&Potential::washboard(p));
    WellMinima {
        minima: cp.minima,
        skipped: cp.skipped,
    }
}

/// Uniform grid of `n` interior nodes on `(delta_min, delta_max)`; the wave
/// function vanishes on both end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub delta_min: f64,
    pub delta_max: f64,
    pub n: usize,
}

impl Grid {
    pub fn new(delta_min: f64, delta_max: f64, n: usize) -> Result<Self, JunctionError> {
        if n < 64 {
            return Err(JunctionError::InvalidGrid(format!(
                "need at least 64 points, got {n}"
            )));
        }
        if !(delta_min.is_finite() && delta_max.is_finite() && delta_max > delta_min) {
            return Err(JunctionError::InvalidGrid(format!(
                "empty window [{delta_min}, {delta_max}]"
            )));
        }
        Ok(Self {
            delta_min,
            delta_max,
            n,
        })
    }

    pub fn spacing(&self) -> f64 {
        (self.delta_max - self.delta_min) / (self.n + 1) as f64
    }

    /// Interior node `i` in `0..n`.
    pub fn point(&self, i: usize) -> f64 {
        self.delta_min + self.spacing() * (i + 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|i| self.point(i))
    }

    pub fn with_points(&self, n: usize) -> Result<Self, JunctionError> {
        Self::new(self.delta_min, self.delta_max, n)
    }
}

fn select_well(cp: &CriticalPoints, well_index: usize) -> Result<Extremum, JunctionError> {
    cp.minima
        .get(well_index)
        .copied()
        .ok_or(JunctionError::NoSuchWell {
            index: well_index,
            available: cp.minima.len(),
        })
}

/// Standard window for a well: between the two adjacent barrier tops. A side
/// with no barrier is cut where `U - U_min` reaches three times the barrier
/// height of the other side; a well with no barrier at all (the bare parabola)
/// spans five oscillator lengths on each side.
pub fn well_window(pot: &Potential, well_index: usize, n: usize) -> Result<Grid, JunctionError> {
    let cp = critical_points(pot);
    let well = select_well(&cp, well_index)?;
    let (left, right) = cp.neighbours(well.delta);
    let (lo, hi) = match (left, right) {
        (Some(l), Some(r)) => (l.delta, r.delta),
        (None, None) => {
            let half = PARABOLA_HALF_WIDTH * pot.harmonic_length(well.delta);
            (well.delta - half, well.delta + half)
        }
        (Some(l), None) => {
            let height = OPEN_SIDE_HEIGHT * (l.energy - well.energy);
            (l.delta, rise_to(pot, well, height, 1.0))
        }
        (None, Some(r)) => {
            let height = OPEN_SIDE_HEIGHT * (r.energy - well.energy);
            (rise_to(pot, well, height, -1.0), r.delta)
        }
    };
    Grid::new(lo, hi, n)
}

/// Point on the barrier-free side (`direction` = +-1) where `U - U_min = height`.
fn rise_to(pot: &Potential, well: Extremum, height: f64, direction: f64) -> f64 {
    let f = |d: f64| pot.value(d) - well.energy - height;
    let mut near = well.delta;
    let mut step = 0.01;
    let mut far = near + direction * step;
    while f(far) < 0.0 {
        near = far;
        step *= 2.0;
        far = well.delta + direction * step;
    }
    for _ in 0..200 {
        let mid = 0.5 * (near + far);
        if mid == near || mid == far {
            break;
        }
        if f(mid) < 0.0 {
            near = mid;
        } else {
            far = mid;
        }
    }
    0.5 * (near + far)
}

/// Eigen-decomposition of one well.
#[derive(Debug, Clone)]
pub struct WellSpectrum {
    pub grid: Grid,
    pub minimum: Extremum,
    /// Lowest barrier top adjacent to the well, if any (J).
    pub barrier_top: Option<f64>,
    /// `E_n` (J), ascending.
    pub energies: Vec<f64>,
    /// `psi_n` at the interior grid nodes, normalized to `sum |psi|^2 h = 1`.
    pub wavefunctions: Vec<Vec<f64>>,
    /// `delta_mn` (rad), real symmetric.
    pub delta_elements: Vec<Vec<f64>>,
    /// `<m| -i hbar d/d delta |n>` by central-difference quadrature (J*s).
    pub p_direct: Vec<Vec<C64>>,
    /// `(i hbar / 2 E_c)(E_m - E_n) delta_mn` (J*s).
    pub p_identity: Vec<Vec<C64>>,
    /// `E_c` used in the kinetic term (J).
    pub charging: f64,
}

impl WellSpectrum {
    pub fn n_levels(&self) -> usize {
        self.energies.len()
    }
}

pub fn solve_well(
    p: &JunctionParams,
    well_index: usize,
    grid: &Grid,
    n_levels: usize,
) -> Result<WellSpectrum, JunctionError> {
    solve_well_in(&Potential::washboard(p), well_index, grid, n_levels)
}

pub fn solve_well_in(
    pot: &Potential,
    well_index: usize,
    grid: &Grid,
    n_levels: usize,
) -> Result<WellSpectrum, JunctionError> {
    if n_levels == 0 || n_levels > grid.n {
        return Err(JunctionError::InvalidGrid(format!(
            "cannot extract {n_levels} levels from {} points",
            grid.n
        )));
    }
    let cp = critical_points(pot);
    let well = select_well(&cp, well_index)?;
    if !(grid.delta_min < well.delta && well.delta < grid.delta_max) {
        return Err(JunctionError::WindowMissesMinimum {
            lo: grid.delta_min,
            hi: grid.delta_max,
            minimum: well.delta,
        });
    }
    let (left, right) = cp.neighbours(well.delta);
    let barrier_top = [left, right]
        .iter()
        .flatten()
        .map(|m| m.energy)
        .min_by(f64::total_cmp);

    // operator in units of E_c, potential measured from the well bottom
    let h = grid.spacing();
    let kin = 1.0 / (h * h);
    let diag: Vec<f64> = grid
        .points()
        .map(|d| 2.0 * kin + (pot.value(d) - well.energy) / pot.charging)
        .collect();
    let tri = Tridiagonal { diag, off: -kin };

    let reduced = tri.lowest_eigenvalues(n_levels);
    let energies: Vec<f64> = reduced
        .iter()
        .map(|l| l * pot.charging + well.energy)
        .collect();
    if let Some(top) = barrier_top {
        if let Some((level, &energy)) = energies.iter().enumerate().find(|(_, &e)| e >= top) {
            return Err(JunctionError::NotMetastable {
                level,
                energy,
                barrier: top,
            });
        }
    }

    let min_node = ((well.delta - grid.delta_min) / h).round() as usize;
    let min_node = min_node.saturating_sub(1).min(grid.n - 1);
    let mut wavefunctions: Vec<Vec<f64>> = Vec::with_capacity(n_levels);
    for (k, &lambda) in reduced.iter().enumerate() {
        let mut v = tri.eigenvector(lambda);
        for prev in &wavefunctions {
            let overlap = dot(prev, &v) * h;
            v.iter_mut().zip(prev).for_each(|(x, p)| *x -= overlap * p);
        }
        let norm = (dot(&v, &v) * h).sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
        let sign = if k == 0 {
            v[min_node]
        } else {
            // <psi_n | (delta - delta*)^n psi_0> > 0
            let psi0 = &wavefunctions[0];
            grid.points()
                .zip(psi0.iter().zip(&v))
                .map(|(d, (a, b))| (d - well.delta).powi(k as i32) * a * b)
                .sum::<f64>()
        };
        if sign < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        wavefunctions.push(v);
    }

    let nodes: Vec<f64> = grid.points().collect();
    let n = n_levels;
    let mut delta_elements = vec![vec![0.0; n]; n];
    let mut p_direct = vec![vec![C64::new(0.0, 0.0); n]; n];
    let mut p_identity = vec![vec![C64::new(0.0, 0.0); n]; n];
    for m in 0..n {
        for k in 0..n {
            let (a, b) = (&wavefunctions[m], &wavefunctions[k]);
            let d_mk: f64 = a
                .iter()
                .zip(b)
                .zip(&nodes)
                .map(|((x, y), d)| x * y * d)
                .sum::<f64>()
                * h;
            delta_elements[m][k] = d_mk;
            // central difference with psi = 0 on the walls
            let deriv: f64 = (0..grid.n)
                .map(|i| {
                    let up = if i + 1 < grid.n { b[i + 1] } else { 0.0 };
                    let down = if i > 0 { b[i - 1] } else { 0.0 };
                    a[i] * (up - down) / (2.0 * h)
                })
                .sum::<f64>()
                * h;
            p_direct[m][k] = C64::new(0.0, -HBAR * deriv);
            p_identity[m][k] = C64::new(
                0.0,
                HBAR / (2.0 * pot.charging) * (energies[m] - energies[k]) * d_mk,
            );
        }
    }

    Ok(WellSpectrum {
        grid: *grid,
        minimum: well,
        barrier_top,
        energies,
        wavefunctions,
        delta_elements,
        p_direct,
        p_identity,
        charging: pot.charging,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Symmetric tridiagonal matrix with constant off-diagonal.
struct Tridiagonal {
    diag: Vec<f64>,
    off: f64,
}

impl Tridiagonal {
    fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let b2 = self.off * self.off;
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for (i, &a) in self.diag.iter().enumerate() {
            q = if i == 0 { a - x } else { a - x - b2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &a| m.min(a - r));
        let hi = self
            .diag
            .iter()
            .fold(f64::NEG_INFINITY, |m, &a| m.max(a + r));
        (lo, hi)
    }

    fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        (0..k)
            .map(|j| {
                let (mut lo, mut hi) = (glo, ghi);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.count_below(mid) > j {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }

    /// Inverse iteration at the shift `lambda` with a pivoted tridiagonal LU.
    fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let (glo, ghi) = self.gershgorin();
        let pivot_floor = f64::EPSILON * (ghi - glo).abs().max(1.0);
        let lu = TriLu::factor(&self.diag, self.off, lambda, pivot_floor);
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i % 7) as f64)).collect();
        for _ in 0..4 {
            v = lu.solve(&v);
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

/// LU factorization with partial pivoting of `T - lambda I`, in the layout of
/// LAPACK `gttrf`: `u0` diagonal, `u1` first and `u2` second super-diagonal.
struct TriLu {
    l: Vec<f64>,
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TriLu {
    fn factor(diag: &[f64], off: f64, lambda: f64, floor: f64) -> Self {
        let n = diag.len();
        let mut u0: Vec<f64> = diag.iter().map(|a| a - lambda).collect();
        let mut u1 = vec![off; n.saturating_sub(1)];
        let mut u2 = vec![0.0; n.saturating_sub(2)];
        let mut l = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let sub = off;
        for i in 0..n.saturating_sub(1) {
            if u0[i].abs() >= sub.abs() {
                if u0[i].abs() < floor {
                    u0[i] = floor.copysign(if u0[i] == 0.0 { 1.0 } else { u0[i] });
                }
                let f = sub / u0[i];
                l[i] = f;
                u0[i + 1] -= f * u1[i];
            } else {
                // swap rows i and i+1
                let f = u0[i] / sub;
                u0[i] = sub;
                l[i] = f;
                let tmp = u1[i];
                u1[i] = u0[i + 1];
                u0[i + 1] = tmp - f * u0[i + 1];
                if i + 1 < n - 1 {
                    u2[i] = u1[i + 1];
                    u1[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        if let Some(last) = u0.last_mut() {
            if last.abs() < floor {
                *last = floor.copysign(if *last == 0.0 { 1.0 } else { *last });
            }
        }
        Self {
            l,
            u0,
            u1,
            u2,
            swapped,
        }
    }

    fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.u0.len();
        let mut x = rhs.to_vec();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let tmp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = tmp - self.l[i] * x[i];
            } else {
                x[i + 1] -= self.l[i] * x[i];
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            if i + 1 < n {
                s -= self.u1[i] * x[i + 1];
            }
            if i + 2 < n {
                s -= self.u2[i] * x[i + 2];
            }
            x[i] = s / self.u0[i];
        }
        x
    }
}

/// `max_{m,n} |p_direct - p_identity| / max(|p_direct|, hbar)`.
pub fn momentum_identity_residual(s: &WellSpectrum, charging: f64) -> f64 {
    let n = s.n_levels();
    let mut worst: f64 = 0.0;
    for m in 0..n {
        for k in 0..n {
            let ident = C64::new(
                0.0,
                HBAR / (2.0 * charging) * (s.energies[m] - s.energies[k]) * s.delta_elements[m][k],
            );
            let direct = s.p_direct[m][k];
            let scale = direct.norm().max(HBAR);
            worst = worst.max((direct - ident).norm() / scale);
        }
    }
    worst
}

/// Two-level description of the driven well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    /// `E_1 - E_0` (J).
    pub delta_eps: f64,
    /// Rabi angular frequency (rad/s).
    pub omega_x: f64,
    /// Mean level energy above the well bottom (J); a global phase only.
    pub const_term: f64,
    pub delta_00: f64,
    pub delta_11: f64,
    pub delta_01: f64,
}

/// Projects the drive term `-(2 pi E_J / beta) phi_ac cos(w t) delta` onto the
/// two lowest levels.
pub fn reduce_to_qubit(p: &JunctionParams, s: &WellSpectrum) -> Result<QubitParams, JunctionError> {
    if s.n_levels() < 2 {
        return Err(JunctionError::TooFewLevels {
            needed: 2,
            have: s.n_levels(),
        });
    }
    let d = derived_energies(p);
    let delta_eps = s.energies[1] - s.energies[0];
    if delta_eps <= 0.0 {
        return Err(JunctionError::NonPositiveSplitting(delta_eps));
    }
    let delta_01 = s.delta_elements[0][1];
    let omega_x = 2.0 * PI * d.josephson * p.phi_ac.abs() / d.beta * delta_01.abs() / HBAR;
    let ratio = HBAR * omega_x / delta_eps;
    if ratio >= 0.1 {
        return Err(JunctionError::DriveTooStrong(ratio));
    }
    Ok(QubitParams {
        delta_eps,
        omega_x,
        const_term: 0.5 * (s.energies[0] + s.energies[1]) - s.minimum.energy,
        delta_00: s.delta_elements[0][0],
        delta_11: s.delta_elements[1][1],
        delta_01,
    })
}

/// `Delta m = (Delta eps_ref - Delta eps) / hbar` in rad/s.
pub fn detuning(delta_eps: f64, delta_eps_ref: f64) -> f64 {
    (delta_eps_ref - delta_eps) / HBAR
}
