//! Truncated double-ladder Fock space.
//!
//! States are labelled by (n, m) with m = n + σℓ ≥ 0. The a-ladder moves n,
//! the b-ladder moves m, so every operator here is a Kronecker product of a
//! one-mode matrix with an identity.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_defect, CMatrix, CVector, C64};
use crate::params::{DerivedScales, Sigma};

/// Tolerance for the `hermitian_hint` invariant.
pub const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FockBasis {
    pub n_max: usize,
    pub m_max: usize,
    pub sigma: Sigma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Raise,
    Lower,
}

impl FockBasis {
    pub fn new(n_max: usize, m_max: usize, sigma: Sigma) -> Self {
        FockBasis { n_max, m_max, sigma }
    }

    pub fn dim(&self) -> usize {
        (self.n_max + 1) * (self.m_max + 1)
    }

    pub fn index(&self, n: usize, m: usize) -> Option<usize> {
        (n <= self.n_max && m <= self.m_max).then(|| n * (self.m_max + 1) + m)
    }

    pub fn quantum_numbers(&self, idx: usize) -> (usize, usize) {
        (idx / (self.m_max + 1), idx % (self.m_max + 1))
    }

    /// Angular momentum quantum number ℓ = σ(m − n).
    pub fn ell(&self, n: usize, m: usize) -> i64 {
        self.sigma.as_int() * (m as i64 - n as i64)
    }

    pub fn states(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.dim()).map(|i| self.quantum_numbers(i))
    }

    /// Flat indices with n < n_max and m < m_max, where the truncated
    /// ladders still satisfy the canonical commutators.
    pub fn interior(&self) -> Vec<usize> {
        self.states()
            .enumerate()
            .filter(|(_, (n, m))| *n < self.n_max && *m < self.m_max)
            .map(|(i, _)| i)
            .collect()
    }

    /// Flat indices with n ≤ `n_cut` (all m).
    pub fn levels_up_to(&self, n_cut: usize) -> Vec<usize> {
        self.states()
            .enumerate()
            .filter(|(_, (n, _))| *n <= n_cut)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn unit_vector(&self, n: usize, m: usize) -> Result<CVector> {
        let idx = self.index(n, m).ok_or_else(|| {
            Error::OutOfRange(format!(
                "state ({n}, {m}) outside basis n<={}, m<={}",
                self.n_max, self.m_max
            ))
        })?;
        let mut v = CVector::zeros(self.dim());
        v[idx] = c(1.0, 0.0);
        Ok(v)
    }

    fn from_map(&self, f: impl Fn(usize, usize) -> Option<(usize, usize, f64)>) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim(), self.dim());
        for (col, (n, m)) in self.states().enumerate() {
            if let Some((n2, m2, amp)) = f(n, m) {
                if let Some(row) = self.index(n2, m2) {
                    out[(row, col)] = c(amp, 0.0);
                }
            }
        }
        out
    }
}

/// Checked constructor: signed-integer bounds as they arrive from the outside.
pub fn build_basis(n_max: i64, m_max: i64, sigma: Sigma) -> Result<FockBasis> {
    if n_max < 0 || m_max < 0 {
        return Err(Error::InvalidBasis(format!(
            "bounds must be non-negative, got n_max={n_max}, m_max={m_max}"
        )));
    }
    Ok(FockBasis::new(n_max as usize, m_max as usize, sigma))
}

/// Dense operator over a [`FockBasis`].
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMatrix,
    pub hermitian_hint: bool,
}

impl OperatorMatrix {
    pub fn new(entries: CMatrix) -> Self {
        OperatorMatrix {
            entries,
            hermitian_hint: false,
        }
    }

    /// Marks the matrix Hermitian, rejecting it if ‖A − A†‖_max > 1e-12.
    pub fn hermitian(entries: CMatrix) -> Result<Self> {
        let defect = hermiticity_defect(&entries);
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidBasis(format!(
                "matrix flagged Hermitian has defect {defect:e}"
            )));
        }
        Ok(OperatorMatrix {
            entries,
            hermitian_hint: true,
        })
    }

    pub fn dims(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> OperatorMatrix {
        OperatorMatrix {
            entries: self.entries.adjoint(),
            hermitian_hint: self.hermitian_hint,
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        &self.entries * v
    }
}

impl std::ops::Mul for &OperatorMatrix {
    type Output = OperatorMatrix;
    fn mul(self, rhs: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(&self.entries * &rhs.entries)
    }
}

/// a₊|n,m⟩ = √(n+1)|n+1,m⟩, a₋|n,m⟩ = √n|n−1,m⟩.
pub fn ladder_a(basis: &FockBasis, direction: Ladder) -> OperatorMatrix {
    let entries = match direction {
        Ladder::Raise => basis.from_map(|n, m| Some((n + 1, m, ((n + 1) as f64).sqrt()))),
        Ladder::Lower => basis.from_map(|n, m| (n > 0).then(|| (n - 1, m, (n as f64).sqrt()))),
    };
    OperatorMatrix::new(entries)
}

/// `Lower` is b₊ (m → m−1, amplitude √m); `Raise` is b₋ (m → m+1, √(m+1)).
///
/// For σ = −1 the b₊ operator raises ℓ, which is why the direction is named
/// after its action on m rather than on ℓ.
pub fn ladder_b(basis: &FockBasis, direction: Ladder) -> OperatorMatrix {
    let entries = match direction {
        Ladder::Lower => basis.from_map(|n, m| (m > 0).then(|| (n, m - 1, (m as f64).sqrt()))),
        Ladder::Raise => basis.from_map(|n, m| Some((n, m + 1, ((m + 1) as f64).sqrt()))),
    };
    OperatorMatrix::new(entries)
}

fn diagonal(basis: &FockBasis, f: impl Fn(usize, usize) -> f64) -> OperatorMatrix {
    let d = CVector::from_iterator(basis.dim(), basis.states().map(|(n, m)| c(f(n, m), 0.0)));
    OperatorMatrix {
        entries: CMatrix::from_diagonal(&d),
        hermitian_hint: true,
    }
}

/// Ĥ = ħ|ω|(a₊a₋ + ½), built directly as its diagonal.
pub fn hamiltonian_matrix(basis: &FockBasis, scales: &DerivedScales) -> OperatorMatrix {
    let hw = scales.hbar * scales.omega;
    diagonal(basis, |n, _| hw * (n as f64 + 0.5))
}

/// L̂z = σħ(b₋b₊ − a₊a₋) = ħσ(m − n).
pub fn lz_matrix(basis: &FockBasis, scales: &DerivedScales) -> OperatorMatrix {
    let sigma = basis.sigma.value();
    diagonal(basis, |n, m| scales.hbar * sigma * (m as f64 - n as f64))
}

/// |n,m⟩ = a₊ⁿ b₋ᵐ |0,0⟩ / √(n! m!), built by repeated ladder application.
pub fn state_from_ground(basis: &FockBasis, n: usize, m: usize) -> Result<CVector> {
    basis.index(n, m).ok_or_else(|| {
        Error::OutOfRange(format!(
            "state ({n}, {m}) outside basis n<={}, m<={}",
            basis.n_max, basis.m_max
        ))
    })?;
    let a_up = ladder_a(basis, Ladder::Raise);
    let b_up = ladder_b(basis, Ladder::Raise);
    let mut v = basis.unit_vector(0, 0)?;
    for k in 1..=m {
        v = b_up.apply(&v);
        v /= C64::new((k as f64).sqrt(), 0.0);
    }
    for k in 1..=n {
        v = a_up.apply(&v);
        v /= C64::new((k as f64).sqrt(), 0.0);
    }
    Ok(v)
}

pub fn commutator(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if a.dims() != b.dims() {
        return Err(Error::DimensionMismatch {
            left: a.dims(),
            right: b.dims(),
        });
    }
    Ok(OperatorMatrix::new(
        &a.entries * &b.entries - &b.entries * &a.entries,
    ))
}
