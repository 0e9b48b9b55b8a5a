//! Dense complex linear algebra for one to three qubits.
//!
//! Matrices and vectors are restricted to dimensions 2, 4 and 8. Multi-qubit
//! indices are big-endian: qubit 1 is the most significant bit, so the basis
//! state `|q1 q2 q3>` sits at index `4*q1 + 2*q2 + q3`.

use std::fmt;
use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on the norm of measurement vectors.
pub const NORM_TOL: f64 = 1e-9;
/// Largest imaginary residue tolerated when reading off a real expectation value.
pub const IMAG_TOL: f64 = 1e-9;
/// Largest anti-Hermitian residue tolerated by the eigen-solver.
pub const HERMITIAN_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

fn check_dim(dim: usize) -> Result<()> {
    match dim {
        2 | 4 | 8 => Ok(()),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Square complex matrix of dimension 2, 4 or 8, stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, data: Vec<C64>) -> Result<Self> {
        check_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::EntryCount {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self {
            dim,
            data: vec![ZERO; dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        Ok(m)
    }

    /// Builds a 2×2 matrix from its rows.
    pub fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        Self {
            dim: 2,
            data: vec![rows[0][0], rows[0][1], rows[1][0], rows[1][1]],
        }
    }

    /// Real diagonal matrix.
    pub fn diag(entries: &[f64]) -> Result<Self> {
        let mut m = Self::zeros(entries.len())?;
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * entries.len() + i] = C64::new(v, 0.0);
        }
        Ok(m)
    }

    /// The projector `|v><v|`.
    pub fn outer(v: &StateVector) -> Self {
        let dim = v.dim();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(v.amps[r] * v.amps[c].conj());
            }
        }
        Self { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.data
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        let n = self.dim;
        let mut data = vec![ZERO; n * n];
        for r in 0..n {
            for k in 0..n {
                let a = self.data[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    data[r * n + c] += a * other.data[k * n + c];
                }
            }
        }
        Ok(Self { dim: n, data })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_dim(other)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        if v.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: v.dim(),
            });
        }
        let n = self.dim;
        let amps = (0..n)
            .map(|r| (0..n).map(|c| self.data[r * n + c] * v.amps[c]).sum())
            .collect();
        Ok(StateVector { amps })
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_dim(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Largest entrywise modulus of `self - self†`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    fn same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            })
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on a dimension mismatch; use [`ComplexMatrix::matmul`] for the checked form.
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix dimensions must agree")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

/// Pure-state amplitudes for one or three qubits (two-qubit vectors are allowed
/// as intermediates).
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    amps: Vec<C64>,
}

impl StateVector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        check_dim(amps.len())?;
        Ok(Self { amps })
    }

    /// Computational basis vector `|index>` in `dim` dimensions.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: index,
            });
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { amps })
    }

    pub fn qubit(a0: C64, a1: C64) -> Self {
        Self { amps: vec![a0, a1] }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
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

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            amps: self.amps.iter().map(|z| z * factor).collect(),
        }
    }

    fn check_normalized(&self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            Err(Error::NotNormalized { norm })
        } else {
            Ok(())
        }
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ZERO, ONE], [ONE, ZERO]])
}

pub fn pauli_y() -> ComplexMatrix {
    let i = C64::i();
    ComplexMatrix::from_rows2([[ZERO, -i], [i, ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ONE, ZERO], [ZERO, -ONE]])
}

pub fn identity2() -> ComplexMatrix {
    ComplexMatrix::from_rows2([[ONE, ZERO], [ZERO, ONE]])
}

/// Kronecker product `a ⊗ b`; `a` occupies the more significant qubits.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let dim = a.dim * b.dim;
    if dim > 8 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let mut data = vec![ZERO; dim * dim];
    for ar in 0..a.dim {
        for ac in 0..a.dim {
            let x = a.get(ar, ac);
            for br in 0..b.dim {
                for bc in 0..b.dim {
                    data[(ar * b.dim + br) * dim + ac * b.dim + bc] = x * b.get(br, bc);
                }
            }
        }
    }
    ComplexMatrix::new(dim, data)
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.dim;
    let mut data = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            data.push(a.get(c, r).conj());
        }
    }
    ComplexMatrix { dim: n, data }
}

/// `K ρ K†`.
pub fn sandwich(k: &ComplexMatrix, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    k.matmul(rho)?.matmul(&dagger(k))
}

/// Contracts one qubit of `rho` against the bra `<v|`, returning the
/// unnormalized operator on the remaining qubits: `<v| rho |v>`.
///
/// `position` counts qubits of `rho` from the most significant, starting at 0.
pub fn contract_qubit(rho: &ComplexMatrix, position: usize, v: &StateVector) -> Result<ComplexMatrix> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: v.dim(),
        });
    }
    let n_qubits = rho.dim.trailing_zeros() as usize;
    if n_qubits < 2 || position >= n_qubits {
        return Err(Error::UnsupportedDimension(rho.dim / 2));
    }
    let out_dim = rho.dim / 2;
    let shift = n_qubits - 1 - position;
    let low_mask = (1usize << shift) - 1;
    // Reinsert the contracted bit at `shift` inside a reduced index.
    let widen = |idx: usize, bit: usize| ((idx & !low_mask) << 1) | (bit << shift) | (idx & low_mask);
    let bra = [v.amps[0].conj(), v.amps[1].conj()];
    let ket = [v.amps[0], v.amps[1]];

    let mut data = vec![ZERO; out_dim * out_dim];
    for r in 0..out_dim {
        for c in 0..out_dim {
            let mut acc = ZERO;
            for (i, bi) in bra.iter().enumerate() {
                for (j, kj) in ket.iter().enumerate() {
                    acc += bi * rho.get(widen(r, i), widen(c, j)) * kj;
                }
            }
            data[r * out_dim + c] = acc;
        }
    }
    ComplexMatrix::new(out_dim, data)
}

/// Conditional (unnormalized) state of qubit 3 after projecting qubit 1 on
/// `a` and qubit 2 on `b`. Its trace is the outcome probability.
pub fn project_and_reduce(rho: &ComplexMatrix, a: &StateVector, b: &StateVector) -> Result<ComplexMatrix> {
    if rho.dim != 8 {
        return Err(Error::DimensionMismatch {
            left: 8,
            right: rho.dim,
        });
    }
    a.check_normalized()?;
    b.check_normalized()?;
    let after_bob = contract_qubit(rho, 1, b)?;
    contract_qubit(&after_bob, 0, a)
}

/// `<ψ|ρ|ψ>` for a single-qubit ket.
pub fn fidelity_pure(psi: &StateVector, rho: &ComplexMatrix) -> Result<f64> {
    if psi.dim() != rho.dim {
        return Err(Error::DimensionMismatch {
            left: psi.dim(),
            right: rho.dim,
        });
    }
    let mut acc = ZERO;
    for r in 0..rho.dim {
        for c in 0..rho.dim {
            acc += psi.amps[r].conj() * rho.get(r, c) * psi.amps[c];
        }
    }
    if acc.im.abs() > IMAG_TOL {
        return Err(Error::NotHermitian { residual: acc.im.abs() });
    }
    Ok(acc.re)
}

pub fn min_eigenvalue_hermitian(rho: &ComplexMatrix) -> Result<f64> {
    let residual = rho.hermitian_residual();
    if residual > HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let m = DMatrix::from_row_slice(rho.dim, rho.dim, &rho.data);
    Ok(m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min))
}
