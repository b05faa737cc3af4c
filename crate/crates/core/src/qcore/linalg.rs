use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

const UNITARY_TOL: f64 = 1e-10;
const DENSITY_TOL: f64 = 1e-10;

/// Largest elementwise modulus of `a - b`.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn trace(a: &CMatrix) -> C64 {
    a.diagonal().iter().sum()
}

pub fn is_hermitian(a: &CMatrix, tol: f64) -> bool {
    a.is_square() && max_abs_diff(a, &a.adjoint()) <= tol
}

/// Kronecker product `a ⊗ b`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

fn check_square(m: &CMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        })
    }
}

/// A unitary propagator on `n` spins (dimension `2^n`).
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(CMatrix);

impl Unitary {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        if !m.nrows().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(m.nrows()));
        }
        let dev = max_abs_diff(
            &(&m * m.adjoint()),
            &CMatrix::identity(m.nrows(), m.ncols()),
        );
        if dev > UNITARY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix already known to be unitary (products of unitaries,
    /// closed-form rotations).
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        debug_assert!(m.is_square());
        Self(m)
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Matrix product `self · other`, i.e. `other` acts first.
    pub fn compose(&self, other: &Unitary) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(Self(&self.0 * &other.0))
    }

    /// Applies `next` after `self`: returns `next · self`.
    pub fn then(&self, next: &Unitary) -> Result<Self> {
        next.compose(self)
    }

    pub fn tensor(&self, other: &Unitary) -> Self {
        Self(tensor(&self.0, &other.0))
    }

    /// `U^k` by repeated squaring.
    pub fn pow(&self, mut k: u32) -> Self {
        let mut base = self.0.clone();
        let mut acc = CMatrix::identity(self.dim(), self.dim());
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            k >>= 1;
        }
        Self(acc)
    }

    /// Largest elementwise deviation of `U U†` from the identity.
    pub fn unitarity_error(&self) -> f64 {
        max_abs_diff(
            &(&self.0 * self.0.adjoint()),
            &CMatrix::identity(self.dim(), self.dim()),
        )
    }
}

/// `|Tr(V U†)| / Tr(U U†)`; insensitive to the global phase of either argument.
pub fn propagator_fidelity(v: &Unitary, u: &Unitary) -> Result<f64> {
    if v.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: v.dim(),
            right: u.dim(),
        });
    }
    // Tr(V U†) = Σ_ij V_ij conj(U_ij)
    let overlap: C64 = v.0.iter().zip(u.0.iter()).map(|(a, b)| a * b.conj()).sum();
    Ok((overlap.norm() / u.dim() as f64).min(1.0))
}

/// A trace-one, Hermitian, positive semidefinite density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(CMatrix);

impl DensityMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        check_square(&m)?;
        if !m.nrows().is_power_of_two() {
            return Err(Error::NotPowerOfTwo(m.nrows()));
        }
        let herm = max_abs_diff(&m, &m.adjoint());
        if herm > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = trace(&m);
        if (tr - C64::new(1.0, 0.0)).norm() > DENSITY_TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let min_eig = m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -DENSITY_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(Self(m))
    }

    /// Pure computational basis state `|index⟩⟨index|` on `n_spins` spins.
    pub fn basis_state(n_spins: usize, index: usize) -> Result<Self> {
        let dim = dim_for(n_spins)?;
        if index >= dim {
            return Err(Error::InvalidDensity(format!(
                "basis index {index} >= {dim}"
            )));
        }
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = C64::new(1.0, 0.0);
        Ok(Self(m))
    }

    /// Product state in which the listed spins are polarized in `|0⟩` and all
    /// others are maximally mixed.
    pub fn polarized(n_spins: usize, polarized: &[usize]) -> Result<Self> {
        dim_for(n_spins)?;
        for &s in polarized {
            if s >= n_spins {
                return Err(Error::SpinIndex { spin: s, n_spins });
            }
        }
        let up = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            C64::new(1.0, 0.0),
            C64::new(0.0, 0.0),
        ]));
        let mixed = CMatrix::identity(2, 2) * C64::new(0.5, 0.0);
        let m = (0..n_spins).fold(CMatrix::identity(1, 1), |acc, s| {
            tensor(&acc, if polarized.contains(&s) { &up } else { &mixed })
        });
        Ok(Self(m))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn n_spins(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    /// `Tr(ρ A)`.
    pub fn expectation(&self, observable: &CMatrix) -> Result<C64> {
        if observable.shape() != self.0.shape() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: observable.nrows(),
            });
        }
        // Tr(ρA) = Σ_ij ρ_ij A_ji
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                acc += self.0[(i, j)] * observable[(j, i)];
            }
        }
        Ok(acc)
    }

    /// Twice the expectation of the raising operator `I⁺` of `spin`; equal to 1
    /// after a perfect 90°_y pulse on a spin polarized in `|0⟩`.
    pub fn transverse_signal(&self, spin: usize) -> Result<C64> {
        let op = super::raising_operator(self.n_spins(), spin)?;
        Ok(self.expectation(&op)? * 2.0)
    }
}

fn dim_for(n_spins: usize) -> Result<usize> {
    if n_spins == 0 || n_spins > super::MAX_SPINS {
        return Err(Error::SpinCount(n_spins));
    }
    Ok(1 << n_spins)
}

/// `ρ → U ρ U†`.
pub fn evolve_state(rho: &DensityMatrix, u: &Unitary) -> Result<DensityMatrix> {
    if rho.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: u.dim(),
        });
    }
    let m = &u.0 * &rho.0 * u.0.adjoint();
    // re-symmetrize so Hermiticity does not drift across long sequences
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    Ok(DensityMatrix(m))
}
