use nalgebra::SymmetricEigen;

use super::linalg::{is_hermitian, CMatrix, Unitary, C64};
use crate::error::{Error, Result};

const HERMITIAN_TOL: f64 = 1e-10;

/// `exp(-i·scale·H)` for Hermitian `H`.
///
/// Diagonal inputs (every coupling Hamiltonian in the weak-coupling limit)
/// are exponentiated entrywise; anything else goes through a Hermitian
/// eigendecomposition.
pub fn hermitian_exponential(h: &CMatrix, scale: f64) -> Result<Unitary> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    if !scale.is_finite() {
        return Err(Error::NonFinite("scale"));
    }
    if !is_hermitian(h, HERMITIAN_TOL) {
        let dev = super::max_abs_diff(h, &h.adjoint());
        return Err(Error::NotHermitian(dev));
    }
    let n = h.nrows();
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    let phase = |e: f64| C64::from_polar(1.0, -scale * e);

    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || h[(i, j)] == C64::new(0.0, 0.0)));
    if diagonal {
        let mut u = CMatrix::zeros(n, n);
        for i in 0..n {
            u[(i, i)] = phase(h[(i, i)].re);
        }
        return Ok(Unitary::from_matrix_unchecked(u));
    }

    // symmetrize so the eigensolver sees an exactly Hermitian input
    let herm = (h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(herm);
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &e) in eig.eigenvalues.iter().enumerate() {
        let p = phase(e);
        scaled.column_mut(j).iter_mut().for_each(|x| *x *= p);
    }
    Ok(Unitary::from_matrix_unchecked(&scaled * v.adjoint()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{max_abs_diff, spin_operator, Axis};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Independent route: scale down, sum a 30-term Taylor series, square back up.
    fn power_series_exp(h: &CMatrix, scale: f64) -> CMatrix {
        let n = h.nrows();
        let a = h * C64::new(0.0, -scale);
        let norm = a.iter().map(|x| x.norm()).sum::<f64>();
        let mut squarings = 0;
        while norm / f64::powi(2.0, squarings) > 0.5 {
            squarings += 1;
        }
        let a = a / C64::from(f64::powi(2.0, squarings));
        let mut term = CMatrix::identity(n, n);
        let mut sum = term.clone();
        for k in 1..30 {
            term = &term * &a / C64::from(k as f64);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    fn random_hermitian(dim: usize, entries: &[(f64, f64)]) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        let mut it = entries.iter();
        for i in 0..dim {
            for j in i..dim {
                let &(re, im) = it.next().unwrap();
                if i == j {
                    m[(i, i)] = C64::new(re, 0.0);
                } else {
                    m[(i, j)] = C64::new(re, im);
                    m[(j, i)] = C64::new(re, -im);
                }
            }
        }
        m
    }

    #[test]
    fn zero_scale_is_identity() {
        let h = spin_operator(2, 0, Axis::X).unwrap().into_matrix();
        let u = hermitian_exponential(&h, 0.0).unwrap();
        assert!(max_abs_diff(u.matrix(), &CMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn ix_by_pi() {
        let h = spin_operator(1, 0, Axis::X).unwrap().into_matrix();
        let u = hermitian_exponential(&h, PI).unwrap();
        let z = C64::new(0.0, 0.0);
        let want = CMatrix::from_row_slice(2, 2, &[z, C64::new(0.0, -1.0), C64::new(0.0, -1.0), z]);
        assert!(max_abs_diff(u.matrix(), &want) < 1e-12);
    }

    #[test]
    fn zz_coupling_by_pi() {
        let iz = spin_operator(2, 0, Axis::Z).unwrap().into_matrix();
        let sz = spin_operator(2, 1, Axis::Z).unwrap().into_matrix();
        let h = (&iz * &sz) * C64::from(2.0);
        let u = hermitian_exponential(&h, PI).unwrap();
        // 2IzSz has eigenvalues ±1/2
        let m = C64::from_polar(1.0, -PI / 2.0);
        let p = C64::from_polar(1.0, PI / 2.0);
        let want = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![m, p, p, m]));
        assert!(max_abs_diff(u.matrix(), &want) < 1e-14);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = CMatrix::zeros(2, 2);
        h[(0, 1)] = C64::new(1.0, 0.0);
        assert!(matches!(
            hermitian_exponential(&h, 1.0),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn degenerate_spectrum_stays_unitary() {
        // 2IzSx on three spins: heavily degenerate eigenvalues ±1/2
        let iz = spin_operator(3, 0, Axis::Z).unwrap().into_matrix();
        let sx = spin_operator(3, 1, Axis::X).unwrap().into_matrix();
        let h = (&iz * &sx) * C64::from(2.0);
        let u = hermitian_exponential(&h, 2.3).unwrap();
        assert!(u.unitarity_error() < 1e-12);
        assert!(max_abs_diff(u.matrix(), &power_series_exp(&h, 2.3)) < 1e-10);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn agrees_with_power_series(
            n_spins in 1usize..=3,
            entries in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 36),
            target_norm in 0.0f64..(8.0 * PI),
        ) {
            let dim = 1 << n_spins;
            let h = random_hermitian(dim, &entries);
            // normalize so the spectral norm bound ‖scale·H‖ stays ≤ 8π
            let frob = h.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            prop_assume!(frob > 1e-6);
            let scale = target_norm / frob;
            let u = hermitian_exponential(&h, scale).unwrap();
            prop_assert!(u.unitarity_error() < 1e-12);
            let oracle = power_series_exp(&h, scale);
            prop_assert!(max_abs_diff(u.matrix(), &oracle) < 1e-10);
        }
    }
}
