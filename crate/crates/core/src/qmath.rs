//! Dense complex linear algebra for one qubit (dimension 2) and two qubits
//! (dimension 4).
//!
//! Basis convention: the first component is `|0>` and `sigma_z |0> = +|0>`.
//! Two-qubit kets are ordered `|q2 q1>` = (`|00>`, `|01>`, `|10>`, `|11>`), so
//! the left factor of [`kron`] acts on qubit 2 and the right factor on qubit 1.

use std::fmt;

use num_complex::Complex64 as C64;
use thiserror::Error;

const UNITARY_TOL: f64 = 1e-12;
/// Half-gap `|t root|` below which the 2x2 propagator is summed as a series.
const SERIES_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QmathError {
    #[error("unsupported dimension {0} (expected 2 or 4)")]
    BadDimension(usize),
    #[error("expected {expected} entries, got {got}")]
    BadLength { expected: usize, got: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("degenerate axis")]
    DegenerateAxis,
    #[error("non-finite entries")]
    NonFinite,
    #[error("operator is not unitary (max deviation {0:e})")]
    NotUnitary(f64),
    #[error("basis index {index} out of range for dimension {dim}")]
    BasisIndex { index: usize, dim: usize },
}

fn check_dim(dim: usize) -> Result<(), QmathError> {
    match dim {
        2 | 4 => Ok(()),
        _ => Err(QmathError::BadDimension(dim)),
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// A ket of dimension 2 or 4. Amplitudes are never renormalized, so decay shows
/// up as a norm below one.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVec {
    amps: Vec<C64>,
}

impl StateVec {
    pub fn new(amps: Vec<C64>) -> Result<Self, QmathError> {
        check_dim(amps.len())?;
        if amps.iter().any(|a| !a.is_finite()) {
            return Err(QmathError::NonFinite);
        }
        Ok(Self { amps })
    }

    /// Computational basis ket `|index>`.
    pub fn basis(dim: usize, index: usize) -> Result<Self, QmathError> {
        check_dim(dim)?;
        if index >= dim {
            return Err(QmathError::BasisIndex { index, dim });
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVec) -> Result<C64, QmathError> {
        if self.dim() != other.dim() {
            return Err(QmathError::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn scaled(&self, factor: C64) -> StateVec {
        StateVec {
            amps: self.amps.iter().map(|a| a * factor).collect(),
        }
    }

    /// Largest component-wise distance `max_i |a_i - b_i|`.
    pub fn max_abs_diff(&self, other: &StateVec) -> f64 {
        assert_eq!(self.dim(), other.dim());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        probabilities(self)
    }
}

/// Component-wise `|amplitude|^2`, not renormalized.
pub fn probabilities(psi: &StateVec) -> Vec<f64> {
    psi.amps.iter().map(|a| a.norm_sqr()).collect()
}

/// Square complex matrix of dimension 2 or 4, row-major.
///
/// The `unitary` flag is only set by constructors that have verified
/// `max |U^dagger U - I| < 1e-12`.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<C64>,
    unitary: bool,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator(dim={}, unitary={}) [", self.dim, self.unitary)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|col| format!("{:.6}", self.get(r, col)))
                .collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Operator {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self, QmathError> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(QmathError::BadLength {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(QmathError::NonFinite);
        }
        Ok(Self {
            dim,
            entries,
            unitary: false,
        })
    }

    /// Builds an operator and flags it unitary after checking `U^dagger U = I`.
    pub fn unitary(dim: usize, entries: Vec<C64>) -> Result<Self, QmathError> {
        Self::new(dim, entries)?.into_unitary()
    }

    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            entries: rows.iter().flatten().copied().collect(),
            unitary: false,
        }
    }

    pub fn identity(dim: usize) -> Result<Self, QmathError> {
        check_dim(dim)?;
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = c(1.0, 0.0);
        }
        Ok(Self {
            dim,
            entries,
            unitary: true,
        })
    }

    pub fn diag(values: &[C64]) -> Result<Self, QmathError> {
        let dim = values.len();
        check_dim(dim)?;
        let mut entries = vec![c(0.0, 0.0); dim * dim];
        for (i, v) in values.iter().enumerate() {
            entries[i * dim + i] = *v;
        }
        Self::new(dim, entries)
    }

    /// Verifies unitarity and sets the flag.
    pub fn into_unitary(mut self) -> Result<Self, QmathError> {
        let defect = self.unitarity_defect();
        if defect < UNITARY_TOL {
            self.unitary = true;
            Ok(self)
        } else {
            Err(QmathError::NotUnitary(defect))
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_unitary(&self) -> bool {
        self.unitary
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn dagger(&self) -> Operator {
        let d = self.dim;
        let mut entries = vec![c(0.0, 0.0); d * d];
        for r in 0..d {
            for col in 0..d {
                entries[col * d + r] = self.entries[r * d + col].conj();
            }
        }
        Operator {
            dim: d,
            entries,
            unitary: self.unitary,
        }
    }

    fn same_dim(&self, other: &Operator) -> Result<(), QmathError> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(QmathError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }

    /// Matrix product `self * other`. Products of unitary operators stay flagged.
    pub fn matmul(&self, other: &Operator) -> Result<Operator, QmathError> {
        self.same_dim(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Operator) -> Operator {
        let d = self.dim;
        let mut entries = vec![c(0.0, 0.0); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == c(0.0, 0.0) {
                    continue;
                }
                for col in 0..d {
                    entries[r * d + col] += a * other.entries[k * d + col];
                }
            }
        }
        Operator {
            dim: d,
            entries,
            unitary: self.unitary && other.unitary,
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator, QmathError> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator, QmathError> {
        self.same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    fn zip_with(&self, other: &Operator, f: impl Fn(C64, C64) -> C64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(*a, *b))
                .collect(),
            unitary: false,
        }
    }

    pub fn scale(&self, factor: C64) -> Operator {
        Operator {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
            unitary: self.unitary && (factor.norm() - 1.0).abs() < UNITARY_TOL,
        }
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Operator) -> Result<Operator, QmathError> {
        let ab = self.matmul(other)?;
        let ba = other.matmul(self)?;
        ab.sub(&ba)
    }

    pub fn apply(&self, psi: &StateVec) -> Result<StateVec, QmathError> {
        if self.dim != psi.dim() {
            return Err(QmathError::DimensionMismatch {
                left: self.dim,
                right: psi.dim(),
            });
        }
        let d = self.dim;
        let amps = (0..d)
            .map(|r| (0..d).map(|k| self.entries[r * d + k] * psi.amps[k]).sum())
            .collect();
        Ok(StateVec { amps })
    }

    /// Entry-wise maximum modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        let d = self.dim;
        (0..d)
            .map(|col| {
                (0..d)
                    .map(|r| self.entries[r * d + col].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.dagger().mul_unchecked(self);
        let d = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for col in 0..d {
                let target = if r == col { c(1.0, 0.0) } else { c(0.0, 0.0) };
                worst = worst.max((prod.entries[r * d + col] - target).norm());
            }
        }
        worst
    }

    /// Sub-matrix on the listed basis indices (length 2 or 4).
    pub fn restrict(&self, indices: &[usize]) -> Result<Operator, QmathError> {
        check_dim(indices.len())?;
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.dim) {
            return Err(QmathError::BasisIndex {
                index: bad,
                dim: self.dim,
            });
        }
        let entries = indices
            .iter()
            .flat_map(|&r| indices.iter().map(move |&col| (r, col)))
            .map(|(r, col)| self.get(r, col))
            .collect();
        Operator::new(indices.len(), entries)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

pub fn pauli(axis: Axis) -> Operator {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    let rows = match axis {
        Axis::X => [[o, l], [l, o]],
        Axis::Y => [[o, -i], [i, o]],
        Axis::Z => [[l, o], [o, -l]],
    };
    Operator {
        dim: 2,
        entries: rows.iter().flatten().copied().collect(),
        unitary: true,
    }
}

/// `exp(-i theta (n . sigma) / 2)` with `n = axis / |axis|`.
pub fn rotation(axis: [f64; 3], theta: f64) -> Result<Operator, QmathError> {
    if !theta.is_finite() || axis.iter().any(|a| !a.is_finite()) {
        return Err(QmathError::NonFinite);
    }
    let len = axis.iter().map(|a| a * a).sum::<f64>().sqrt();
    if len == 0.0 {
        return Err(QmathError::DegenerateAxis);
    }
    let [nx, ny, nz] = axis.map(|a| a / len);
    let (s, co) = (0.5 * theta).sin_cos();
    // cos(theta/2) I - i sin(theta/2) (n . sigma)
    let entries = vec![
        c(co, -s * nz),
        c(-s * ny, -s * nx),
        c(s * ny, -s * nx),
        c(co, s * nz),
    ];
    Operator::unitary(2, entries)
}

pub fn ry(theta: f64) -> Operator {
    rotation([0.0, 1.0, 0.0], theta).expect("y axis is non-degenerate")
}

pub fn rz(theta: f64) -> Operator {
    rotation([0.0, 0.0, 1.0], theta).expect("z axis is non-degenerate")
}

/// Tensor product `a (x) b`; `a` acts on qubit 2 (left ket digit), `b` on qubit 1.
pub fn kron(a: &Operator, b: &Operator) -> Result<Operator, QmathError> {
    if a.dim != 2 || b.dim != 2 {
        return Err(QmathError::DimensionMismatch {
            left: a.dim,
            right: b.dim,
        });
    }
    let mut entries = vec![c(0.0, 0.0); 16];
    for (ar, ac) in (0..2).flat_map(|r| (0..2).map(move |col| (r, col))) {
        for (br, bc) in (0..2).flat_map(|r| (0..2).map(move |col| (r, col))) {
            entries[(2 * ar + br) * 4 + (2 * ac + bc)] = a.get(ar, ac) * b.get(br, bc);
        }
    }
    Ok(Operator {
        dim: 4,
        entries,
        unitary: a.unitary && b.unitary,
    })
}

/// The propagator `exp(-i H t)`.
///
/// Dimension 2 uses the spectral decomposition of the general complex matrix,
/// or a power series in the squared half-gap when `|t| * gap / 2 <= 1`, which
/// also covers defective matrices. Dimension 4 uses scaling and squaring with a
/// Taylor kernel.
pub fn expm(h: &Operator, t: f64) -> Result<Operator, QmathError> {
    if !t.is_finite() || h.entries.iter().any(|e| !e.is_finite()) {
        return Err(QmathError::NonFinite);
    }
    let out = match h.dim {
        2 => expm2(h, t),
        4 => expm_scaled_taylor(h, t),
        d => return Err(QmathError::BadDimension(d)),
    };
    if out.entries.iter().any(|e| !e.is_finite()) {
        return Err(QmathError::NonFinite);
    }
    Ok(out)
}

fn expm2(h: &Operator, t: f64) -> Operator {
    let minus_it = c(0.0, -t);
    let (h00, h01, h10, h11) = (h.get(0, 0), h.get(0, 1), h.get(1, 0), h.get(1, 1));
    let mean = 0.5 * (h00 + h11);
    let half_diff = 0.5 * (h00 - h11);
    // eigenvalues of H are mean +/- root; root^2 = half_diff^2 + h01 h10
    let root_sq = half_diff * half_diff + h01 * h10;
    let root = root_sq.sqrt();

    // traceless part B = -i t (H - mean I)
    let b = [
        minus_it * half_diff,
        minus_it * h01,
        minus_it * h10,
        -minus_it * half_diff,
    ];
    let phase = (minus_it * mean).exp();

    // the projectors lose eps/|s| to cancellation, the series is exact for small |s|
    let entries = if root.norm() * t.abs() <= SERIES_RADIUS {
        // B^2 = z I with z = (-i t)^2 root^2 = -t^2 root^2
        let z = -t * t * root_sq;
        let (cosh_like, sinh_like) = even_odd_series(z);
        vec![
            phase * (cosh_like + sinh_like * b[0]),
            phase * sinh_like * b[1],
            phase * sinh_like * b[2],
            phase * (cosh_like + sinh_like * b[3]),
        ]
    } else {
        // spectral projectors P+- = (B -+ s I)/(+-2s) with s = -i t root
        let s = minus_it * root;
        let e_plus = (minus_it * mean + s).exp();
        let e_minus = (minus_it * mean - s).exp();
        let inv = 1.0 / (2.0 * s);
        let one = c(1.0, 0.0);
        let proj = |bij: C64, diag: bool| {
            let id = if diag { one } else { c(0.0, 0.0) };
            (e_plus * (bij + s * id) - e_minus * (bij - s * id)) * inv
        };
        vec![
            proj(b[0], true),
            proj(b[1], false),
            proj(b[2], false),
            proj(b[3], true),
        ]
    };
    Operator {
        dim: 2,
        entries,
        unitary: false,
    }
}

/// `(cosh(sqrt z), sinh(sqrt z)/sqrt z)` by their power series in `z`.
fn even_odd_series(z: C64) -> (C64, C64) {
    let mut even = c(1.0, 0.0);
    let mut odd = c(1.0, 0.0);
    let mut term_even = c(1.0, 0.0);
    let mut term_odd = c(1.0, 0.0);
    for k in 1..200 {
        let k = k as f64;
        term_even *= z / ((2.0 * k - 1.0) * (2.0 * k));
        term_odd *= z / ((2.0 * k) * (2.0 * k + 1.0));
        even += term_even;
        odd += term_odd;
        if term_even.norm() <= 1e-18 * even.norm() && term_odd.norm() <= 1e-18 * odd.norm() {
            break;
        }
    }
    (even, odd)
}

fn expm_scaled_taylor(h: &Operator, t: f64) -> Operator {
    let a = h.scale(c(0.0, -t));
    let norm = a.one_norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale(c(0.5f64.powi(squarings), 0.0));

    let d = a.dim;
    let mut result = Operator::identity(d).expect("dimension checked");
    result.unitary = false;
    let mut term = result.clone();
    for k in 1..40 {
        term = term.mul_unchecked(&a).scale(c(1.0 / k as f64, 0.0));
        result = result.zip_with(&term, |x, y| x + y);
        if term.max_abs() < 1e-18 * result.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.mul_unchecked(&result);
    }
    result.unitary = false;
    result
}
