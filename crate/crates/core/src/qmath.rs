//! Dense complex linear algebra for one- and two-qubit operators.
//!
//! Operators are stored as fixed 4×4 arrays with an active dimension of 2 or
//! 4. Basis convention: computational basis, `Z = diag(1, -1)`, `X` has ones
//! off the diagonal, and `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.

use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use libm::{cos, sin, sqrt};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix of dimension 2 or 4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: [C64; 16],
}

impl CMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::Dimension { expected: 2, found: dim });
        }
        Ok(CMatrix { dim, data: [ZERO; 16] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from row-major entries; `entries.len()` must be 4 or 16.
    pub fn from_entries(entries: &[C64]) -> Result<Self> {
        let dim = match entries.len() {
            4 => 2,
            16 => 4,
            n => return Err(Error::Dimension { expected: 4, found: n }),
        };
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator("non-finite entry"));
        }
        let mut m = Self::zeros(dim)?;
        m.data[..entries.len()].copy_from_slice(entries);
        Ok(m)
    }

    pub fn real2(rows: [[f64; 2]; 2]) -> Self {
        let mut data = [ZERO; 16];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                data[i * 2 + j] = C64::new(*v, 0.0);
            }
        }
        CMatrix { dim: 2, data }
    }

    pub fn pauli_x() -> Self {
        Self::real2([[0.0, 1.0], [1.0, 0.0]])
    }

    pub fn pauli_y() -> Self {
        let mut m = Self::real2([[0.0, 0.0], [0.0, 0.0]]);
        m.data[1] = C64::new(0.0, -1.0);
        m.data[2] = C64::new(0.0, 1.0);
        m
    }

    pub fn pauli_z() -> Self {
        Self::real2([[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn eye2() -> Self {
        Self::real2([[1.0, 0.0], [0.0, 1.0]])
    }

    /// `(Z + X)/√2`.
    pub fn h_axis() -> Self {
        (Self::pauli_z() + Self::pauli_x()) * core::f64::consts::FRAC_1_SQRT_2
    }

    /// `(Z − X)/√2`.
    pub fn m_axis() -> Self {
        (Self::pauli_z() - Self::pauli_x()) * core::f64::consts::FRAC_1_SQRT_2
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        assert!(i < self.dim && j < self.dim, "index out of bounds");
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        assert!(i < self.dim && j < self.dim, "index out of bounds");
        self.data[i * self.dim + j] = v;
    }

    fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn scale(&self, k: C64) -> Self {
        let mut out = *self;
        for z in out.data.iter_mut() {
            *z *= k;
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for i in 0..self.dim {
            for j in 0..self.dim {
                out.data[i * self.dim + j] = self.data[j * self.dim + i].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.same_dim(rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// `tr(self · rhs)` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Result<C64> {
        self.same_dim(rhs)?;
        let n = self.dim;
        let mut acc = ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * rhs.data[k * n + i];
            }
        }
        Ok(acc)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> f64 {
        if self.dim != rhs.dim {
            return f64::INFINITY;
        }
        self.entries().iter().zip(rhs.entries()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// True when the Hermitian part has no eigenvalue below `-tol`.
    ///
    /// Runs a Cholesky factorization of `A + tol·I`, which succeeds exactly
    /// when the smallest eigenvalue of `A` exceeds `-tol`.
    pub fn is_psd(&self, tol: f64) -> bool {
        let n = self.dim;
        let mut a = [ZERO; 16];
        for i in 0..n {
            for j in 0..n {
                let h = 0.5 * (self.data[i * n + j] + self.data[j * n + i].conj());
                a[i * n + j] = h;
            }
            a[i * n + i] += tol;
        }
        let mut l = [ZERO; 16];
        for j in 0..n {
            let mut d = a[j * n + j].re;
            for k in 0..j {
                d -= l[j * n + k].norm_sqr();
            }
            if d <= 0.0 || !d.is_finite() {
                return false;
            }
            let d = sqrt(d);
            l[j * n + j] = C64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / d;
            }
        }
        true
    }

    fn same_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::Dimension { expected: self.dim, found: rhs.dim })
        }
    }
}

impl Add for CMatrix {
    type Output = CMatrix;
    fn add(mut self, rhs: CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in add");
        for (a, b) in self.data.iter_mut().zip(rhs.data) {
            *a += b;
        }
        self
    }
}

impl Sub for CMatrix {
    type Output = CMatrix;
    fn sub(mut self, rhs: CMatrix) -> CMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in sub");
        for (a, b) in self.data.iter_mut().zip(rhs.data) {
            *a -= b;
        }
        self
    }
}

impl Neg for CMatrix {
    type Output = CMatrix;
    fn neg(self) -> CMatrix {
        self * -1.0
    }
}

impl Mul<f64> for CMatrix {
    type Output = CMatrix;
    fn mul(self, k: f64) -> CMatrix {
        self.scale(C64::new(k, 0.0))
    }
}

/// Kronecker product of two 2×2 matrices.
pub fn kron(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    for m in [a, b] {
        if m.dim != 2 {
            return Err(Error::Dimension { expected: 2, found: m.dim });
        }
    }
    let mut out = CMatrix::zeros(4)?;
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out.data[(2 * i + k) * 4 + (2 * j + l)] = a.get(i, j) * b.get(k, l);
                }
            }
        }
    }
    Ok(out)
}

/// `cos θ · Z + sin θ · X`.
pub fn bloch_observable(theta: f64) -> CMatrix {
    let (c, s) = (cos(theta), sin(theta));
    CMatrix::real2([[c, s], [s, -c]])
}

/// `r · σ` for a Bloch vector `r = (x, y, z)`.
pub fn bloch_observable_3d(r: [f64; 3]) -> CMatrix {
    CMatrix::pauli_x() * r[0] + CMatrix::pauli_y() * r[1] + CMatrix::pauli_z() * r[2]
}

/// `(I + r·σ)/2`; a pure-state projector when `|r| = 1`.
pub fn bloch_projector(r: [f64; 3]) -> CMatrix {
    (CMatrix::eye2() + bloch_observable_3d(r)) * 0.5
}

/// Validated density matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_hermitian(tol::HERMITIAN) {
            return Err(Error::InvalidOperator("density matrix is not Hermitian"));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > tol::TRACE || tr.im.abs() > tol::TRACE {
            return Err(Error::InvalidOperator("density matrix trace is not 1"));
        }
        if !mat.is_psd(tol::STRUCTURAL) {
            return Err(Error::InvalidOperator("density matrix is not positive semidefinite"));
        }
        Ok(DensityMatrix { mat })
    }

    /// `|ψ⟩⟨ψ|` for a normalized amplitude vector of length 2 or 4.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let n = psi.len();
        let mut m = CMatrix::zeros(n)?;
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, psi[i] * psi[j].conj());
            }
        }
        Self::new(m)
    }

    pub fn phi_plus() -> Self {
        let h = core::f64::consts::FRAC_1_SQRT_2;
        let psi = [C64::new(h, 0.0), ZERO, ZERO, C64::new(h, 0.0)];
        Self::pure(&psi).expect("Φ⁺ is a valid state")
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let id = CMatrix::identity(dim)?;
        Self::new(id * (1.0 / dim as f64))
    }

    /// `p·self + (1 − p)·other`.
    pub fn mix(&self, other: &Self, p: f64) -> Result<Self> {
        crate::error::check_unit("mixing weight", p)?;
        if self.dim() != other.dim() {
            return Err(Error::Dimension { expected: self.dim(), found: other.dim() });
        }
        Self::new(self.mat * p + other.mat * (1.0 - p))
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim
    }

    /// `tr ρ²`.
    pub fn purity(&self) -> f64 {
        self.mat.trace_product(&self.mat).map(|z| z.re).unwrap_or(f64::NAN)
    }

    /// Bloch vector `(⟨X⟩, ⟨Y⟩, ⟨Z⟩)` of a qubit state.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        Ok([
            born_expectation(self, &CMatrix::pauli_x())?,
            born_expectation(self, &CMatrix::pauli_y())?,
            born_expectation(self, &CMatrix::pauli_z())?,
        ])
    }
}

/// `Re tr(ρ · obs)`.
pub fn born_expectation(rho: &DensityMatrix, obs: &CMatrix) -> Result<f64> {
    let t = rho.mat.trace_product(obs)?;
    if obs.is_hermitian(tol::STRUCTURAL) {
        debug_assert!(t.im.abs() < tol::STRUCTURAL, "imaginary residue {}", t.im);
    }
    Ok(t.re)
}

/// Measurement outcome label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Value(u8),
    NoClick,
}

/// Validated positive operator-valued measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
    labels: Vec<Outcome>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>, labels: Vec<Outcome>) -> Result<Self> {
        if elements.is_empty() || elements.len() != labels.len() {
            return Err(Error::InvalidOperator("POVM needs one label per element"));
        }
        let dim = elements[0].dim;
        let mut sum = CMatrix::zeros(dim)?;
        for e in &elements {
            if e.dim != dim {
                return Err(Error::Dimension { expected: dim, found: e.dim });
            }
            if !e.is_hermitian(tol::STRUCTURAL) || !e.is_psd(tol::STRUCTURAL) {
                return Err(Error::InvalidOperator("POVM element is not positive"));
            }
            sum = sum + *e;
        }
        if sum.max_abs_diff(&CMatrix::identity(dim)?) > tol::STRUCTURAL {
            return Err(Error::InvalidOperator("POVM elements do not sum to identity"));
        }
        Ok(Povm { elements, labels })
    }

    /// Two-outcome measurement `{(I + A)/2, (I − A)/2}` of an observable with
    /// spectrum in `[-1, 1]`.
    pub fn from_observable(obs: &CMatrix) -> Result<Self> {
        let id = CMatrix::identity(obs.dim)?;
        Self::new(alloc::vec![(id + *obs) * 0.5, (id - *obs) * 0.5], alloc::vec![Outcome::Value(0), Outcome::Value(1)])
    }

    /// Same measurement behind a detector of efficiency `eta`; the missing
    /// weight becomes a `NoClick` element.
    pub fn lossy(&self, eta: f64) -> Result<Self> {
        crate::error::check_unit("efficiency", eta)?;
        let dim = self.elements[0].dim;
        let mut elements: Vec<CMatrix> = self.elements.iter().map(|e| *e * eta).collect();
        let mut labels = self.labels.clone();
        elements.push(CMatrix::identity(dim)? * (1.0 - eta));
        labels.push(Outcome::NoClick);
        Self::new(elements, labels)
    }

    /// Merges the `NoClick` element into the element labelled `target`.
    pub fn binned(&self, target: Outcome) -> Result<Self> {
        let Some(dst) = self.labels.iter().position(|l| *l == target) else {
            return Err(Error::InvalidOperator("binning target is not an outcome"));
        };
        let mut elements = Vec::new();
        let mut labels = Vec::new();
        let mut merged = self.elements[dst];
        for (e, l) in self.elements.iter().zip(&self.labels) {
            if *l == Outcome::NoClick {
                merged = merged + *e;
            }
        }
        for (i, (e, l)) in self.elements.iter().zip(&self.labels).enumerate() {
            if *l == Outcome::NoClick {
                continue;
            }
            elements.push(if i == dst { merged } else { *e });
            labels.push(*l);
        }
        Self::new(elements, labels)
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }

    pub fn labels(&self) -> &[Outcome] {
        &self.labels
    }

    pub fn element(&self, label: Outcome) -> Option<&CMatrix> {
        self.labels.iter().position(|l| *l == label).map(|i| &self.elements[i])
    }
}
