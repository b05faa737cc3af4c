//! Dense complex linear algebra for small spin-1/2 systems.
//!
//! Operators follow the product-operator convention `I_a = σ_a / 2`, with
//! spin 0 as the leftmost tensor factor and `|0⟩` the `m = +1/2` state.
//! Everything here is sized for at most six spins (dimension 64).

mod expm;
mod linalg;
mod spin;

pub use expm::hermitian_exponential;
pub use linalg::{
    evolve_state, is_hermitian, max_abs_diff, propagator_fidelity, tensor, trace, CMatrix,
    DensityMatrix, Unitary, C64,
};
pub use spin::{raising_operator, spin_operator, Axis, SpinOperator, MAX_SPINS};

use std::f64::consts::FRAC_PI_2;

/// `U(θ, φ) = exp[-iθ(Iₓ cos φ + I_y sin φ)]` for a single spin.
///
/// Negative `theta` is allowed and is the same operator as `(|θ|, φ + π)`.
pub fn rotation_unitary(theta: f64, phi: f64) -> Unitary {
    axis_rotation(theta, [phi.cos(), phi.sin(), 0.0])
}

/// Rotation about the z axis, `exp(-i·angle·I_z)`.
pub fn z_rotation(angle: f64) -> Unitary {
    axis_rotation(angle, [0.0, 0.0, 1.0])
}

/// `exp[-i·angle·(n·I)]` for a (not necessarily normalized) axis vector `n`.
///
/// The rotation angle is `angle·|n|`; a zero axis gives the identity.
pub fn axis_rotation(angle: f64, axis: [f64; 3]) -> Unitary {
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let half = 0.5 * angle * norm;
    let (s, c) = half.sin_cos();
    let (nx, ny, nz) = if norm > 0.0 {
        (axis[0] / norm, axis[1] / norm, axis[2] / norm)
    } else {
        (0.0, 0.0, 0.0)
    };
    // cos(α/2)·1 − i sin(α/2)·(n·σ)
    let m = CMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(c, -s * nz),
            C64::new(-s * ny, -s * nx),
            C64::new(s * ny, -s * nx),
            C64::new(c, s * nz),
        ],
    );
    Unitary::from_matrix_unchecked(m)
}

/// NMR pseudo-Hadamard, a 90° rotation about +y.
pub fn pseudo_hadamard() -> Unitary {
    rotation_unitary(FRAC_PI_2, FRAC_PI_2)
}
