use super::linalg::{tensor, CMatrix, C64};
use crate::error::{Error, Result};

pub const MAX_SPINS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// A one-spin operator `I_a` embedded in an `n`-spin product space.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinOperator {
    spin: usize,
    axis: Axis,
    matrix: CMatrix,
}

impl SpinOperator {
    pub fn spin(&self) -> usize {
        self.spin
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

fn single(axis: Axis) -> CMatrix {
    let z = C64::new(0.0, 0.0);
    let h = C64::new(0.5, 0.0);
    let ih = C64::new(0.0, 0.5);
    match axis {
        Axis::X => CMatrix::from_row_slice(2, 2, &[z, h, h, z]),
        Axis::Y => CMatrix::from_row_slice(2, 2, &[z, -ih, ih, z]),
        Axis::Z => CMatrix::from_row_slice(2, 2, &[h, z, z, -h]),
    }
}

fn check(n_spins: usize, spin: usize) -> Result<()> {
    if n_spins == 0 || n_spins > MAX_SPINS {
        return Err(Error::SpinCount(n_spins));
    }
    if spin >= n_spins {
        return Err(Error::SpinIndex { spin, n_spins });
    }
    Ok(())
}

/// Places a 2×2 operator on `spin` with identities elsewhere.
pub(crate) fn embed(n_spins: usize, spin: usize, op: &CMatrix) -> CMatrix {
    let eye = CMatrix::identity(2, 2);
    (0..n_spins).fold(CMatrix::identity(1, 1), |acc, k| {
        tensor(&acc, if k == spin { op } else { &eye })
    })
}

/// `I_axis` for `spin` in an `n_spins` system; spin 0 is the leftmost factor.
pub fn spin_operator(n_spins: usize, spin: usize, axis: Axis) -> Result<SpinOperator> {
    check(n_spins, spin)?;
    Ok(SpinOperator {
        spin,
        axis,
        matrix: embed(n_spins, spin, &single(axis)),
    })
}

/// `I⁺ = Iₓ + i I_y` for `spin`.
pub fn raising_operator(n_spins: usize, spin: usize) -> Result<CMatrix> {
    check(n_spins, spin)?;
    let z = C64::new(0.0, 0.0);
    let plus = CMatrix::from_row_slice(2, 2, &[z, C64::new(1.0, 0.0), z, z]);
    Ok(embed(n_spins, spin, &plus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::max_abs_diff;

    fn comm(a: &CMatrix, b: &CMatrix) -> CMatrix {
        a * b - b * a
    }

    #[test]
    fn single_spin_z() {
        let iz = spin_operator(1, 0, Axis::Z).unwrap();
        let want = CMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, -0.5].map(C64::from));
        assert_eq!(iz.matrix(), &want);
    }

    #[test]
    fn placement_on_second_spin() {
        let op = spin_operator(2, 1, Axis::X).unwrap();
        let want = tensor(&CMatrix::identity(2, 2), &single(Axis::X));
        assert_eq!(op.matrix(), &want);
        assert_eq!(op.matrix()[(0, 1)], C64::new(0.5, 0.0));
        assert_eq!(op.matrix()[(0, 2)], C64::new(0.0, 0.0));
    }

    #[test]
    fn distinct_spin_z_operators_commute() {
        let a = spin_operator(2, 0, Axis::Z).unwrap();
        let b = spin_operator(2, 1, Axis::Z).unwrap();
        assert!(comm(a.matrix(), b.matrix()).iter().all(|x| x.norm() == 0.0));
    }

    #[test]
    fn angular_momentum_commutators() {
        for n in 1..=3 {
            for s in 0..n {
                let x = spin_operator(n, s, Axis::X).unwrap().into_matrix();
                let y = spin_operator(n, s, Axis::Y).unwrap().into_matrix();
                let z = spin_operator(n, s, Axis::Z).unwrap().into_matrix();
                let i = C64::new(0.0, 1.0);
                assert!(max_abs_diff(&comm(&x, &y), &(&z * i)) < 1e-15);
                assert!(max_abs_diff(&comm(&y, &z), &(&x * i)) < 1e-15);
                assert!(max_abs_diff(&comm(&z, &x), &(&y * i)) < 1e-15);
            }
        }
    }

    #[test]
    fn operators_on_disjoint_spins_commute() {
        let axes = [Axis::X, Axis::Y, Axis::Z];
        for &a in &axes {
            for &b in &axes {
                let p = spin_operator(3, 0, a).unwrap().into_matrix();
                let q = spin_operator(3, 2, b).unwrap().into_matrix();
                assert!(comm(&p, &q).iter().all(|x| x.norm() == 0.0));
            }
        }
    }

    #[test]
    fn eigenvalues_are_plus_minus_half() {
        for axis in [Axis::X, Axis::Y, Axis::Z] {
            let op = spin_operator(2, 1, axis).unwrap().into_matrix();
            let mut ev: Vec<f64> = op.symmetric_eigenvalues().iter().cloned().collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (got, want) in ev.iter().zip([-0.5, -0.5, 0.5, 0.5]) {
                assert!((got - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn index_errors() {
        assert_eq!(
            spin_operator(2, 2, Axis::X),
            Err(Error::SpinIndex {
                spin: 2,
                n_spins: 2
            })
        );
        assert_eq!(spin_operator(0, 0, Axis::X), Err(Error::SpinCount(0)));
        assert_eq!(spin_operator(7, 0, Axis::Z), Err(Error::SpinCount(7)));
    }
}
