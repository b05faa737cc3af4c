//! Composite rotation families and the systematic error model.
//!
//! A composite sequence is an ordered list of `(θ)_φ` rotations; the first
//! listed element acts first. B4 and P4 carry negative central rotations,
//! which are kept signed until [`CompositeSequence::canonicalized`] rewrites
//! them as positive rotations about the opposite phase.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::qcore::{axis_rotation, Unitary};

/// Largest rotation any family uses (the P4 central element).
pub const MAX_ELEMENT_ANGLE: f64 = 8.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Naive,
    Bb1,
    Nb1,
    Pb1,
    B4,
    P4,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::Naive,
        Family::Bb1,
        Family::Nb1,
        Family::Pb1,
        Family::B4,
        Family::P4,
    ];

    /// Families that have a coupling-gate counterpart.
    pub const COUPLING: [Family; 4] = [Family::Naive, Family::Bb1, Family::Nb1, Family::Pb1];

    pub fn name(self) -> &'static str {
        match self {
            Family::Naive => "naive",
            Family::Bb1 => "BB1",
            Family::Nb1 => "NB1",
            Family::Pb1 => "PB1",
            Family::B4 => "B4",
            Family::P4 => "P4",
        }
    }

    pub fn supports_coupling(self) -> bool {
        Self::COUPLING.contains(&self)
    }

    /// Number of elements after expanding repetitions.
    pub fn element_count(self) -> usize {
        match self {
            Family::Naive => 1,
            Family::Bb1 | Family::Nb1 | Family::Pb1 => 5,
            Family::B4 | Family::P4 => 29,
        }
    }

    /// Whether `theta` is inside the family's construction domain.
    pub fn accepts_theta(self, theta: f64) -> bool {
        match self {
            Family::Naive => theta.is_finite(),
            _ => theta > 0.0 && theta <= TAU,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Family::ALL
            .iter()
            .copied()
            .find(|f| f.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                format!("unknown family {s:?} (expected one of naive, BB1, NB1, PB1, B4, P4)")
            })
    }
}

/// Normalizes an angle to `[0, 2π)`.
pub fn normalize_phase(phase: f64) -> f64 {
    let p = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if p >= TAU {
        0.0
    } else {
        p
    }
}

/// One rotation `(θ)_φ`; `theta` is signed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseElement {
    theta: f64,
    phase: f64,
}

impl PulseElement {
    pub fn new(theta: f64, phase: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        if !phase.is_finite() {
            return Err(Error::NonFinite("phase"));
        }
        if theta.abs() > MAX_ELEMENT_ANGLE * (1.0 + 1e-12) {
            return Err(Error::InvalidProblem(format!(
                "element angle {theta} exceeds 8π"
            )));
        }
        Ok(Self {
            theta,
            phase: normalize_phase(phase),
        })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The equivalent element with a non-negative angle.
    pub fn canonical(&self) -> Self {
        if self.theta < 0.0 {
            Self {
                theta: -self.theta,
                phase: normalize_phase(self.phase + PI),
            }
        } else {
            *self
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompositeSequence {
    elements: Vec<PulseElement>,
    family: Family,
    target_theta: f64,
    target_phi: f64,
}

impl CompositeSequence {
    pub fn elements(&self) -> &[PulseElement] {
        &self.elements
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn target_theta(&self) -> f64 {
        self.target_theta
    }

    pub fn target_phi(&self) -> f64 {
        self.target_phi
    }

    /// Rewrites every negative rotation as a positive one about `φ + π`.
    pub fn canonicalized(&self) -> Self {
        Self {
            elements: self.elements.iter().map(PulseElement::canonical).collect(),
            ..self.clone()
        }
    }

    /// The ideal target rotation this sequence implements.
    pub fn target(&self) -> Unitary {
        crate::qcore::rotation_unitary(self.target_theta, self.target_phi)
    }
}

/// Systematic control errors.
///
/// * `f`: fractional pulse-length (field-strength) error; the nutation angle is `(1+f)|θ|`.
/// * `g`: resonance offset as a fraction of the nominal field strength; adds
///   `g·I_z` to the generator for the duration of each element.
/// * `epsilon`: phase offset added to every element phase.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ErrorModel {
    pub f: f64,
    pub g: f64,
    pub epsilon: f64,
}

impl ErrorModel {
    pub fn new(f: f64, g: f64, epsilon: f64) -> Self {
        Self { f, g, epsilon }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn pulse_length(f: f64) -> Self {
        Self {
            f,
            ..Self::default()
        }
    }

    pub fn off_resonance(g: f64) -> Self {
        Self {
            g,
            ..Self::default()
        }
    }
}

/// Correction phase `ψ` (or `ψ′`) used by a family at target angle `theta`.
pub fn correction_phase(family: Family, theta: f64) -> Option<f64> {
    let denom = match family {
        Family::Naive => return None,
        Family::Bb1 | Family::Nb1 => 4.0 * PI,
        Family::Pb1 => 8.0 * PI,
        Family::B4 => 24.0 * PI,
        Family::P4 => 48.0 * PI,
    };
    Some((-theta / denom).acos())
}

fn check_domain(family: Family, theta: f64, phi: f64) -> Result<()> {
    if !phi.is_finite() {
        return Err(Error::NonFinite("phi"));
    }
    if !family.accepts_theta(theta) {
        return Err(Error::ThetaOutOfDomain {
            family: family.name(),
            theta,
        });
    }
    Ok(())
}

fn assemble(family: Family, theta: f64, phi: f64, raw: &[(f64, f64)]) -> Result<CompositeSequence> {
    let elements = raw
        .iter()
        .map(|&(t, p)| PulseElement::new(t, p))
        .collect::<Result<Vec<_>>>()?;
    debug_assert_eq!(elements.len(), family.element_count());
    Ok(CompositeSequence {
        elements,
        family,
        target_theta: theta,
        target_phi: phi,
    })
}

pub fn naive(theta: f64, phi: f64) -> Result<CompositeSequence> {
    check_domain(Family::Naive, theta, phi)?;
    assemble(Family::Naive, theta, phi, &[(theta, phi)])
}

/// `(θ/2)_φ (π)_{φ+ψ} (2π)_{φ+3ψ} (π)_{φ+ψ} (θ/2)_φ`, `ψ = arccos(−θ/4π)`.
pub fn bb1(theta: f64, phi: f64) -> Result<CompositeSequence> {
    check_domain(Family::Bb1, theta, phi)?;
    let psi = correction_phase(Family::Bb1, theta).unwrap();
    assemble(
        Family::Bb1,
        theta,
        phi,
        &[
            (theta / 2.0, phi),
            (PI, phi + psi),
            (2.0 * PI, phi + 3.0 * psi),
            (PI, phi + psi),
            (theta / 2.0, phi),
        ],
    )
}

/// BB1 with the central phase replaced by `φ − ψ`.
pub fn nb1(theta: f64, phi: f64) -> Result<CompositeSequence> {
    check_domain(Family::Nb1, theta, phi)?;
    let psi = correction_phase(Family::Nb1, theta).unwrap();
    assemble(
        Family::Nb1,
        theta,
        phi,
        &[
            (theta / 2.0, phi),
            (PI, phi + psi),
            (2.0 * PI, phi - psi),
            (PI, phi + psi),
            (theta / 2.0, phi),
        ],
    )
}

/// `(θ/2)_φ (2π)_{φ+ψ′} (4π)_{φ−ψ′} (2π)_{φ+ψ′} (θ/2)_φ`, `ψ′ = arccos(−θ/8π)`.
pub fn pb1(theta: f64, phi: f64) -> Result<CompositeSequence> {
    check_domain(Family::Pb1, theta, phi)?;
    let psi = correction_phase(Family::Pb1, theta).unwrap();
    assemble(
        Family::Pb1,
        theta,
        phi,
        &[
            (theta / 2.0, phi),
            (2.0 * PI, phi + psi),
            (4.0 * PI, phi - psi),
            (2.0 * PI, phi + psi),
            (theta / 2.0, phi),
        ],
    )
}

/// Shared layout of B4 and P4: half rotation, a three-element block repeated
/// four times, a negative central block, the repeated block again, and the
/// closing half rotation.
fn fourth_order(
    family: Family,
    theta: f64,
    phi: f64,
    block: [(f64, f64); 3],
    center: [(f64, f64); 3],
) -> Result<CompositeSequence> {
    let mut raw = Vec::with_capacity(29);
    raw.push((theta / 2.0, phi));
    for _ in 0..4 {
        raw.extend_from_slice(&block);
    }
    raw.extend_from_slice(&center);
    for _ in 0..4 {
        raw.extend_from_slice(&block);
    }
    raw.push((theta / 2.0, phi));
    assemble(family, theta, phi, &raw)
}

/// B4 with `ψ = arccos(−θ/24π)`.
pub fn b4(theta: f64, phi: f64) -> Result<CompositeSequence> {
    check_domain(Family::B4, theta, phi)?;
    let psi = correction_phase(Family::B4, theta).unwrap();
    fourth_order(
        Family::B4,
        theta,
        phi,
        [
            (PI, phi + psi),
            (2.0 * PI, phi + 3.0 * psi),
            (PI, phi + psi),
        ],
        [
            (-2.0 * PI, phi + psi),
            (-4.0 * PI, phi - psi),
            (-2.0 * PI, phi + psi),
        ],
    )
}

/// P4 with `ψ′ = arccos(−θ/48π)`.
pub fn p4(theta: f64, phi: f64) -> Result<CompositeSequence> {
    check_domain(Family::P4, theta, phi)?;
    let psi = correction_phase(Family::P4, theta).unwrap();
    fourth_order(
        Family::P4,
        theta,
        phi,
        [
            (2.0 * PI, phi + psi),
            (4.0 * PI, phi - psi),
            (2.0 * PI, phi + psi),
        ],
        [
            (-4.0 * PI, phi + psi),
            (-8.0 * PI, phi - psi),
            (-4.0 * PI, phi + psi),
        ],
    )
}

pub fn build_sequence(family: Family, theta: f64, phi: f64) -> Result<CompositeSequence> {
    match family {
        Family::Naive => naive(theta, phi),
        Family::Bb1 => bb1(theta, phi),
        Family::Nb1 => nb1(theta, phi),
        Family::Pb1 => pb1(theta, phi),
        Family::B4 => b4(theta, phi),
        Family::P4 => p4(theta, phi),
    }
}

/// `exp[−i|θ|((1+f)(Iₓ cos φ̃ + I_y sin φ̃) + g I_z)]` with
/// `φ̃ = φ + ε (+ π when θ < 0)`.
pub fn element_propagator(e: &PulseElement, err: &ErrorModel) -> Unitary {
    let flip = if e.theta < 0.0 { PI } else { 0.0 };
    let p = e.phase + err.epsilon + flip;
    let amp = 1.0 + err.f;
    axis_rotation(e.theta.abs(), [amp * p.cos(), amp * p.sin(), err.g])
}

/// Time-ordered product of element propagators (first element rightmost).
pub fn sequence_propagator(seq: &CompositeSequence, err: &ErrorModel) -> Unitary {
    seq.elements.iter().fold(Unitary::identity(2), |acc, e| {
        element_propagator(e, err)
            .compose(&acc)
            .expect("2x2 propagators")
    })
}

/// Closed-form fidelity where one is known: `cos(fθ/2)` for a naive pulse and
/// the sixth-order expansion `1 − f⁶(32π⁴θ² + 14π²θ⁴ − θ⁶)/9216` for BB1.
pub fn analytic_fidelity(family: Family, theta: f64, f: f64) -> Option<f64> {
    match family {
        Family::Naive => Some((f * theta / 2.0).cos()),
        Family::Bb1 => Some(1.0 - f.powi(6) * bb1_sixth_order_coefficient(theta)),
        _ => None,
    }
}

/// Coefficient of `f⁶` in the BB1 infidelity.
pub fn bb1_sixth_order_coefficient(theta: f64) -> f64 {
    let pi2 = PI * PI;
    (32.0 * pi2 * pi2 * theta.powi(2) + 14.0 * pi2 * theta.powi(4) - theta.powi(6)) / 9216.0
}

/// Total nominal rotation `Σ|θᵢ|`, i.e. the duration in units of the inverse
/// nominal nutation rate.
pub fn nominal_duration(seq: &CompositeSequence) -> f64 {
    seq.elements.iter().map(|e| e.theta.abs()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{max_abs_diff, propagator_fidelity, rotation_unitary, z_rotation};
    use std::f64::consts::FRAC_PI_2;

    fn infidelity(family: Family, theta: f64, err: ErrorModel) -> f64 {
        let seq = build_sequence(family, theta, 0.0).unwrap();
        1.0 - propagator_fidelity(&sequence_propagator(&seq, &err), &seq.target()).unwrap()
    }

    #[test]
    fn correction_phases() {
        let deg = |x: f64| x.to_degrees();
        let bb1 = deg(correction_phase(Family::Bb1, FRAC_PI_2).unwrap());
        assert!((bb1 - 97.18).abs() < 0.01, "{bb1}");
        assert!((deg(correction_phase(Family::Bb1, PI).unwrap()) - 104.4775).abs() < 1e-3);
        assert!((deg(correction_phase(Family::Pb1, FRAC_PI_2).unwrap()) - 93.5833).abs() < 1e-3);
        assert!((deg(correction_phase(Family::B4, FRAC_PI_2).unwrap()) - 91.1937).abs() < 1e-3);
        assert!((deg(correction_phase(Family::P4, FRAC_PI_2).unwrap()) - 90.5968).abs() < 1e-3);
        assert_eq!(correction_phase(Family::Naive, 1.0), None);
    }

    #[test]
    fn element_counts() {
        for family in Family::ALL {
            let seq = build_sequence(family, FRAC_PI_2, 0.3).unwrap();
            assert_eq!(seq.elements().len(), family.element_count(), "{family}");
        }
        let b4 = b4(FRAC_PI_2, 0.0).unwrap();
        let negatives: Vec<_> = b4.elements().iter().filter(|e| e.theta() < 0.0).collect();
        assert_eq!(negatives.len(), 3);
        assert_eq!(b4.elements()[13].theta(), -2.0 * PI);
        assert_eq!(b4.elements()[14].theta(), -4.0 * PI);
        let p4 = p4(FRAC_PI_2, 0.0).unwrap();
        assert_eq!(p4.elements()[14].theta(), -8.0 * PI);
    }

    #[test]
    fn nb1_differs_from_bb1_only_in_central_phase() {
        let b = bb1(FRAC_PI_2, 0.4).unwrap();
        let n = nb1(FRAC_PI_2, 0.4).unwrap();
        let psi = correction_phase(Family::Bb1, FRAC_PI_2).unwrap();
        for i in [0, 1, 3, 4] {
            assert_eq!(b.elements()[i], n.elements()[i]);
        }
        assert!((b.elements()[2].phase() - normalize_phase(0.4 + 3.0 * psi)).abs() < 1e-15);
        assert!((n.elements()[2].phase() - normalize_phase(0.4 - psi)).abs() < 1e-15);
    }

    #[test]
    fn phases_are_normalized() {
        for family in Family::ALL {
            for e in build_sequence(family, PI, -5.0).unwrap().elements() {
                assert!((0.0..TAU).contains(&e.phase()));
            }
        }
        assert_eq!(normalize_phase(-1e-300), 0.0);
    }

    #[test]
    fn domain_guard() {
        for family in Family::ALL.into_iter().filter(|f| *f != Family::Naive) {
            for theta in [0.0, -0.1, TAU + 1e-9, f64::NAN] {
                assert!(
                    matches!(
                        build_sequence(family, theta, 0.0),
                        Err(Error::ThetaOutOfDomain { .. })
                    ),
                    "{family} {theta}"
                );
            }
            assert!(build_sequence(family, TAU, 0.0).is_ok());
        }
        assert!(naive(-3.0, 0.0).is_ok());
        assert!(matches!(
            bb1(1.0, f64::INFINITY),
            Err(Error::NonFinite("phi"))
        ));
    }

    #[test]
    fn zero_error_reproduces_target() {
        for family in Family::ALL {
            for theta in [PI / 4.0, FRAC_PI_2, PI, 1.5 * PI] {
                let inf = infidelity(family, theta, ErrorModel::none());
                assert!(inf < 1e-10, "{family} θ={theta}: {inf:e}");
            }
        }
    }

    #[test]
    fn error_free_element_is_ideal_rotation() {
        let e = PulseElement::new(FRAC_PI_2, 0.0).unwrap();
        let u = element_propagator(&e, &ErrorModel::none());
        assert!(max_abs_diff(u.matrix(), rotation_unitary(FRAC_PI_2, 0.0).matrix()) < 1e-15);
    }

    #[test]
    fn pulse_length_error_on_pi_pulse() {
        let e = PulseElement::new(PI, 0.0).unwrap();
        let v = element_propagator(&e, &ErrorModel::pulse_length(0.2));
        let fid = propagator_fidelity(&v, &rotation_unitary(PI, 0.0)).unwrap();
        assert!((fid - (0.1 * PI).cos()).abs() < 1e-12);
    }

    #[test]
    fn signed_and_canonical_forms_agree() {
        let a = PulseElement::new(-2.0 * PI, 1.3).unwrap();
        let b = PulseElement::new(2.0 * PI, 1.3 + PI).unwrap();
        assert_eq!(a.canonical(), b);
        for err in [ErrorModel::none(), ErrorModel::new(0.1, 0.05, 0.02)] {
            let (ua, ub) = (element_propagator(&a, &err), element_propagator(&b, &err));
            assert!(max_abs_diff(ua.matrix(), ub.matrix()) < 1e-14);
        }
        for family in [Family::B4, Family::P4] {
            let seq = build_sequence(family, FRAC_PI_2, 0.2).unwrap();
            let canon = seq.canonicalized();
            assert!(canon.elements().iter().all(|e| e.theta() >= 0.0));
            for err in [ErrorModel::none(), ErrorModel::new(-0.2, 0.03, 0.01)] {
                let d = max_abs_diff(
                    sequence_propagator(&seq, &err).matrix(),
                    sequence_propagator(&canon, &err).matrix(),
                );
                assert!(d < 1e-12, "{family}: {d:e}");
            }
        }
    }

    #[test]
    fn first_element_acts_first() {
        let seq = CompositeSequence {
            elements: vec![
                PulseElement::new(FRAC_PI_2, 0.0).unwrap(),
                PulseElement::new(FRAC_PI_2, FRAC_PI_2).unwrap(),
            ],
            family: Family::Naive,
            target_theta: 0.0,
            target_phi: 0.0,
        };
        let want = rotation_unitary(FRAC_PI_2, FRAC_PI_2)
            .compose(&rotation_unitary(FRAC_PI_2, 0.0))
            .unwrap();
        let got = sequence_propagator(&seq, &ErrorModel::none());
        assert!(max_abs_diff(got.matrix(), want.matrix()) < 1e-15);
    }

    #[test]
    fn naive_sequence_is_single_element() {
        let seq = naive(1.1, 0.4).unwrap();
        let err = ErrorModel::new(0.3, 0.1, 0.2);
        let d = max_abs_diff(
            sequence_propagator(&seq, &err).matrix(),
            element_propagator(&seq.elements()[0], &err).matrix(),
        );
        assert_eq!(d, 0.0);
    }

    #[test]
    fn naive_matches_cosine_law() {
        for theta in [FRAC_PI_2, PI] {
            for i in 0..=200 {
                let f = -1.0 + 0.01 * i as f64;
                let fid = 1.0 - infidelity(Family::Naive, theta, ErrorModel::pulse_length(f));
                let want = analytic_fidelity(Family::Naive, theta, f).unwrap();
                assert!((fid - want).abs() < 1e-10, "θ={theta} f={f}");
            }
        }
    }

    #[test]
    fn bb1_sixth_order_law() {
        let coef = bb1_sixth_order_coefficient(PI);
        assert!((coef - 45.0 * PI.powi(6) / 9216.0).abs() < 1e-12);
        assert!((coef - 4.694).abs() < 1e-3);
        for f in [0.02, 0.04, 0.06, 0.08, 0.1] {
            let ratio = infidelity(Family::Bb1, PI, ErrorModel::pulse_length(f)) / f.powi(6);
            assert!((ratio / coef - 1.0).abs() < 0.02, "f={f}: {ratio}");
        }
        let a = analytic_fidelity(Family::Bb1, PI, 0.1).unwrap();
        assert!((a - 0.999_995_306).abs() < 1e-9, "{a}");
        assert_eq!(analytic_fidelity(Family::Pb1, PI, 0.1), None);
    }

    #[test]
    fn bb1_small_error_fidelity() {
        let inf = infidelity(Family::Bb1, FRAC_PI_2, ErrorModel::pulse_length(0.1));
        assert!(inf < 1e-5);
    }

    #[test]
    fn robustness_ordering() {
        for f in [-0.1, -0.05, 0.02, 0.05, 0.1] {
            let err = ErrorModel::pulse_length(f);
            let inf = |fam| infidelity(fam, FRAC_PI_2, err);
            assert!(inf(Family::Bb1) < inf(Family::Naive), "f={f}");
            assert!(inf(Family::B4) <= inf(Family::Bb1), "f={f}");
            assert!(inf(Family::P4) <= inf(Family::Pb1), "f={f}");
        }
    }

    #[test]
    fn nb1_is_more_error_prone_than_naive() {
        for i in 1..=50 {
            let f = 0.01 * i as f64;
            let err = ErrorModel::pulse_length(f);
            assert!(
                infidelity(Family::Nb1, FRAC_PI_2, err) > infidelity(Family::Naive, FRAC_PI_2, err),
                "f={f}"
            );
        }
    }

    #[test]
    fn nb1_approximates_identity_for_weak_fields() {
        let identity = Unitary::identity(2);
        for f in [-0.95, -0.9] {
            let err = ErrorModel::pulse_length(f);
            let fid = |fam| {
                let seq = build_sequence(fam, FRAC_PI_2, 0.0).unwrap();
                propagator_fidelity(&sequence_propagator(&seq, &err), &identity).unwrap()
            };
            assert!(fid(Family::Nb1) > fid(Family::Naive), "f={f}");
            assert!(fid(Family::Nb1) > 0.9999);
        }
    }

    #[test]
    fn phase_covariance() {
        for family in Family::ALL {
            for phi in [0.3, 2.0, 4.5] {
                for err in [ErrorModel::none(), ErrorModel::new(0.1, 0.05, 0.0)] {
                    let u0 =
                        sequence_propagator(&build_sequence(family, FRAC_PI_2, 0.0).unwrap(), &err);
                    let u =
                        sequence_propagator(&build_sequence(family, FRAC_PI_2, phi).unwrap(), &err);
                    let rz = z_rotation(phi);
                    let conj = rz.compose(&u0).unwrap().compose(&rz.adjoint()).unwrap();
                    assert!(
                        max_abs_diff(u.matrix(), conj.matrix()) < 1e-12,
                        "{family} φ={phi}"
                    );
                }
            }
        }
    }

    #[test]
    fn fourth_order_families_lose_robustness_off_resonance() {
        // With pulse-length and resonance-offset errors together, B4 and P4
        // fall behind their second-order counterparts.
        for f in [0.05, 0.1] {
            let err = ErrorModel::new(f, 0.05, 0.0);
            assert!(
                infidelity(Family::B4, FRAC_PI_2, err) > infidelity(Family::Bb1, FRAC_PI_2, err)
            );
            assert!(
                infidelity(Family::P4, FRAC_PI_2, err) > infidelity(Family::Pb1, FRAC_PI_2, err)
            );
        }
        let err = ErrorModel::off_resonance(0.3);
        assert!(infidelity(Family::B4, FRAC_PI_2, err) > infidelity(Family::Bb1, FRAC_PI_2, err));
        // A pure offset at g = 0.05 is the one regime where B4 still edges out BB1.
        let err = ErrorModel::off_resonance(0.05);
        let (b4, bb1) = (
            infidelity(Family::B4, FRAC_PI_2, err),
            infidelity(Family::Bb1, FRAC_PI_2, err),
        );
        assert!(
            (b4 - 5.4586e-4).abs() < 1e-7 && (bb1 - 6.1228e-4).abs() < 1e-7,
            "{b4} {bb1}"
        );
    }

    #[test]
    fn durations() {
        let d = |fam| nominal_duration(&build_sequence(fam, FRAC_PI_2, 0.0).unwrap());
        assert!((d(Family::Naive) - 0.5 * PI).abs() < 1e-14);
        assert!((d(Family::Bb1) - 4.5 * PI).abs() < 1e-14);
        assert!((d(Family::Pb1) - 8.5 * PI).abs() < 1e-14);
        assert!((d(Family::Pb1) / d(Family::Bb1) - 17.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn family_names_parse() {
        for family in Family::ALL {
            assert_eq!(family.name().parse::<Family>().unwrap(), family);
            assert_eq!(
                family.name().to_lowercase().parse::<Family>().unwrap(),
                family
            );
        }
        assert!("BB2".parse::<Family>().is_err());
    }
}
