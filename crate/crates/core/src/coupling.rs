//! Two-qubit coupling gates and multi-spin weak-coupling dynamics.
//!
//! A coupling element `θ_φ = exp[−iθ(2I_zS_z cos φ + 2I_zS_x sin φ)]` is a
//! rotation about an axis tilted from `2I_zS_z` towards `2I_zS_x`. It is
//! realized as free evolution under the scalar coupling sandwiched between
//! `φ_{−y}` and `φ_{+y}` pulses on spin `S`. Delays are measured in units of
//! `t = 1/(4J)` of the reference coupling, so a coupling angle `θ` takes
//! `4θ/π` units.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pulses::{build_sequence, normalize_phase, CompositeSequence, ErrorModel, Family};
use crate::qcore::{
    axis_rotation, hermitian_exponential, spin_operator, Axis, CMatrix, DensityMatrix, Unitary,
    C64, MAX_SPINS,
};

const PHASE_PLUS_Y: f64 = FRAC_PI_2;
const PHASE_MINUS_Y: f64 = 3.0 * FRAC_PI_2;

/// One tilted coupling rotation; `theta` is signed, `phase` in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingElement {
    pub theta: f64,
    pub phase: f64,
}

impl CouplingElement {
    pub fn new(theta: f64, phase: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        if !phase.is_finite() {
            return Err(Error::NonFinite("phase"));
        }
        Ok(Self {
            theta,
            phase: normalize_phase(phase),
        })
    }
}

/// One step of a pulse program.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SequenceEvent {
    /// Hard pulse on every spin sharing the kind of `spin`.
    Pulse { spin: usize, theta: f64, phase: f64 },
    /// Free evolution, in units of `t = 1/(4 J_ref)`.
    Delay { duration: f64 },
    /// Zero-duration frame rotation `exp(−i·angle·I_z)` on every spin sharing
    /// the kind of `spin`; no control error applies.
    FrameRotation { spin: usize, angle: f64 },
}

/// `exp[−iθ(2I_zS_z cos φ + 2I_zS_x sin φ)]` on a two-spin system (I = spin 0).
pub fn tilted_coupling_unitary(theta: f64, phi: f64) -> Unitary {
    tilted_coupling_in(2, 0, 1, theta, phi).expect("two-spin coupling")
}

/// Tilted coupling rotation between `i_spin` and `s_spin` in an `n_spins` system.
pub fn tilted_coupling_in(
    n_spins: usize,
    i_spin: usize,
    s_spin: usize,
    theta: f64,
    phi: f64,
) -> Result<Unitary> {
    let iz = spin_operator(n_spins, i_spin, Axis::Z)?.into_matrix();
    let sz = spin_operator(n_spins, s_spin, Axis::Z)?.into_matrix();
    let sx = spin_operator(n_spins, s_spin, Axis::X)?.into_matrix();
    let gen = &iz * (sz * C64::from(2.0 * phi.cos()) + sx * C64::from(2.0 * phi.sin()));
    hermitian_exponential(&gen, theta)
}

/// The coupling-gate version of a composite family: the same angle and phase
/// schedule, applied to tilted coupling rotations.
pub fn composite_coupling(family: Family, theta: f64) -> Result<Vec<CouplingElement>> {
    if !family.supports_coupling() {
        return Err(Error::UnsupportedFamily(family.name()));
    }
    let seq: CompositeSequence = build_sequence(family, theta, 0.0)?;
    seq.elements()
        .iter()
        .map(|e| CouplingElement::new(e.theta(), e.phase()))
        .collect()
}

/// Wraps an angle into `(−π, π]`.
fn wrap_signed(a: f64) -> f64 {
    let w = normalize_phase(a);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Compiles one tilted coupling element into `[tilt pulse, delay, untilt pulse]`
/// on `tilt_spin`. Delays are in units of `1/(4J)`.
pub fn compile_coupling_element(
    e: &CouplingElement,
    j_hz: f64,
    tilt_spin: usize,
) -> Result<Vec<SequenceEvent>> {
    if !j_hz.is_finite() || j_hz <= 0.0 {
        return Err(Error::NonPositiveCoupling(j_hz));
    }
    if e.theta == 0.0 {
        return Ok(Vec::new());
    }
    // a negative coupling angle is the positive one about the opposite tilt
    let (theta, phase) = if e.theta < 0.0 {
        (-e.theta, e.phase + PI)
    } else {
        (e.theta, e.phase)
    };
    let tilt = wrap_signed(phase);
    // exp(−iθ(…)) = R D R† with R = exp(−i·tilt·S_y): R† acts first (−y), then R (+y)
    let (first, last) = if tilt >= 0.0 {
        (PHASE_MINUS_Y, PHASE_PLUS_Y)
    } else {
        (PHASE_PLUS_Y, PHASE_MINUS_Y)
    };
    let angle = tilt.abs();
    Ok(vec![
        SequenceEvent::Pulse {
            spin: tilt_spin,
            theta: angle,
            phase: first,
        },
        SequenceEvent::Delay {
            duration: 4.0 * theta / PI,
        },
        SequenceEvent::Pulse {
            spin: tilt_spin,
            theta: angle,
            phase: last,
        },
    ])
}

/// Compiles a whole composite coupling gate.
pub fn compile_coupling(
    elements: &[CouplingElement],
    j_hz: f64,
    tilt_spin: usize,
) -> Result<Vec<SequenceEvent>> {
    let mut out = Vec::with_capacity(3 * elements.len());
    for e in elements {
        out.extend(compile_coupling_element(e, j_hz, tilt_spin)?);
    }
    Ok(out)
}

/// Product of `θᵢ → (1+f)θᵢ` tilted rotations, first element acting first.
pub fn coupling_error_propagator(elements: &[CouplingElement], f: f64) -> Unitary {
    elements.iter().fold(Unitary::identity(4), |acc, e| {
        tilted_coupling_unitary((1.0 + f) * e.theta, e.phase)
            .compose(&acc)
            .expect("4x4")
    })
}

/// Pulse events for a single-qubit composite sequence on `spin`.
pub fn pulse_events(seq: &CompositeSequence, spin: usize) -> Vec<SequenceEvent> {
    seq.elements()
        .iter()
        .map(|e| SequenceEvent::Pulse {
            spin,
            theta: e.theta(),
            phase: e.phase(),
        })
        .collect()
}

/// Total free-evolution time of a program, in units of `t`.
pub fn program_duration(events: &[SequenceEvent]) -> f64 {
    events
        .iter()
        .map(|e| match e {
            SequenceEvent::Delay { duration } => *duration,
            _ => 0.0,
        })
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spin {
    pub name: String,
    /// Nucleus label (e.g. `"13C"`, `"1H"`); hard pulses address a kind.
    pub kind: String,
    /// Magnetically equivalent spins share a group label (e.g. `"methyl"`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
}

#[derive(Deserialize)]
struct RawSpinSystem {
    spins: Vec<Spin>,
    couplings: Vec<Vec<f64>>,
}

/// Spins with a symmetric table of scalar couplings in Hz.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpinSystem")]
pub struct SpinSystem {
    spins: Vec<Spin>,
    couplings: Vec<Vec<f64>>,
}

impl TryFrom<RawSpinSystem> for SpinSystem {
    type Error = Error;

    fn try_from(raw: RawSpinSystem) -> Result<Self> {
        SpinSystem::new(raw.spins, raw.couplings)
    }
}

/// Default alanine stand-in couplings (Hz).
pub const ALANINE_J_CH: f64 = 145.0;
pub const ALANINE_J_C_METHYL: f64 = 4.5;
pub const ALANINE_J_H_METHYL: f64 = 7.3;
pub const FORMATE_J_CH: f64 = 195.0;

impl SpinSystem {
    pub fn new(spins: Vec<Spin>, couplings: Vec<Vec<f64>>) -> Result<Self> {
        let n = spins.len();
        if n == 0 || n > MAX_SPINS {
            return Err(Error::SpinCount(n));
        }
        if couplings.len() != n || couplings.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidSpinSystem(format!(
                "coupling table must be {n}x{n}"
            )));
        }
        for i in 0..n {
            if couplings[i][i] != 0.0 {
                return Err(Error::InvalidSpinSystem(format!(
                    "nonzero self-coupling on spin {i}"
                )));
            }
            for j in 0..n {
                if !couplings[i][j].is_finite() {
                    return Err(Error::InvalidSpinSystem(format!("non-finite J[{i}][{j}]")));
                }
                if couplings[i][j] != couplings[j][i] {
                    return Err(Error::InvalidSpinSystem(format!(
                        "J[{i}][{j}] != J[{j}][{i}]"
                    )));
                }
            }
        }
        if spins.iter().any(|s| s.kind.is_empty()) {
            return Err(Error::InvalidSpinSystem("empty spin kind".into()));
        }
        Ok(Self { spins, couplings })
    }

    fn spin(name: &str, kind: &str, group: Option<&str>) -> Spin {
        Spin {
            name: name.into(),
            kind: kind.into(),
            group: group.map(Into::into),
        }
    }

    /// Isolated ¹³C–¹H pair: spin 0 is the carbon, spin 1 the proton.
    pub fn formate() -> Self {
        Self::new(
            vec![Self::spin("C", "13C", None), Self::spin("H", "1H", None)],
            vec![vec![0.0, FORMATE_J_CH], vec![FORMATE_J_CH, 0.0]],
        )
        .expect("valid preset")
    }

    pub fn alanine() -> Self {
        Self::alanine_with(ALANINE_J_CH, ALANINE_J_C_METHYL, ALANINE_J_H_METHYL)
    }

    /// Cα (spin 0), Hα (spin 1) and three methyl protons (spins 2–4).
    /// Couplings among the equivalent methyl protons have no observable
    /// effect and are left at zero.
    pub fn alanine_with(j_ch: f64, j_c_methyl: f64, j_h_methyl: f64) -> Self {
        let mut j = vec![vec![0.0; 5]; 5];
        j[0][1] = j_ch;
        j[1][0] = j_ch;
        for m in 2..5 {
            j[0][m] = j_c_methyl;
            j[m][0] = j_c_methyl;
            j[1][m] = j_h_methyl;
            j[m][1] = j_h_methyl;
        }
        let mut spins = vec![Self::spin("C", "13C", None), Self::spin("H", "1H", None)];
        for k in 1..=3 {
            spins.push(Self::spin(&format!("Me{k}"), "1H", Some("methyl")));
        }
        Self::new(spins, j).expect("valid preset")
    }

    pub fn n_spins(&self) -> usize {
        self.spins.len()
    }

    pub fn dim(&self) -> usize {
        1 << self.n_spins()
    }

    pub fn spins(&self) -> &[Spin] {
        &self.spins
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.couplings[i][j]
    }

    pub fn couplings(&self) -> &[Vec<f64>] {
        &self.couplings
    }

    /// Copy with `J[i][j]` (and `J[j][i]`) replaced.
    pub fn with_coupling(&self, i: usize, j: usize, hz: f64) -> Result<Self> {
        let n = self.n_spins();
        if i >= n || j >= n {
            return Err(Error::SpinIndex {
                spin: i.max(j),
                n_spins: n,
            });
        }
        let mut c = self.couplings.clone();
        c[i][j] = hz;
        c[j][i] = hz;
        Self::new(self.spins.clone(), c)
    }

    /// The largest coupling; it sets the delay unit `t = 1/(4 J_ref)`.
    pub fn reference_coupling(&self) -> f64 {
        self.couplings
            .iter()
            .flatten()
            .fold(0.0, |m: f64, j| m.max(j.abs()))
    }

    pub fn spins_of_kind(&self, kind: &str) -> Vec<usize> {
        self.spins
            .iter()
            .enumerate()
            .filter(|(_, s)| s.kind == kind)
            .map(|(i, _)| i)
            .collect()
    }

    fn check_spin(&self, spin: usize) -> Result<()> {
        if spin >= self.n_spins() {
            return Err(Error::SpinIndex {
                spin,
                n_spins: self.n_spins(),
            });
        }
        Ok(())
    }
}

/// `Σ_{i<j} πJᵢⱼ·2I_{iz}I_{jz}` in rad/s (rotating frame, zero offsets).
pub fn system_hamiltonian(sys: &SpinSystem) -> CMatrix {
    let n = sys.n_spins();
    let dim = sys.dim();
    let mut h = CMatrix::zeros(dim, dim);
    // every term is diagonal: 2·IzJz = ±1/2
    for idx in 0..dim {
        let m = |s: usize| {
            if (idx >> (n - 1 - s)) & 1 == 0 {
                0.5
            } else {
                -0.5
            }
        };
        let mut e = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                e += PI * sys.couplings[i][j] * 2.0 * m(i) * m(j);
            }
        }
        h[(idx, idx)] = C64::new(e, 0.0);
    }
    h
}

/// `exp(−iHτ)` for `τ` in seconds.
pub fn free_evolution(sys: &SpinSystem, seconds: f64) -> Result<Unitary> {
    if seconds < 0.0 {
        return Err(Error::NegativeDuration(seconds));
    }
    hermitian_exponential(&system_hamiltonian(sys), seconds)
}

fn kind_product(sys: &SpinSystem, kind: &str, single: &Unitary) -> Result<Unitary> {
    if sys.spins_of_kind(kind).is_empty() {
        return Err(Error::UnknownSpinKind(kind.to_string()));
    }
    let eye = Unitary::identity(2);
    Ok(sys.spins.iter().fold(Unitary::identity(1), |acc, s| {
        acc.tensor(if s.kind == kind { single } else { &eye })
    }))
}

/// Nonselective pulse on every spin of `kind`, each with the element error
/// `exp[−i|θ|((1+f)(Iₓ cos φ̃ + I_y sin φ̃) + g I_z)]`.
pub fn hard_pulse(
    sys: &SpinSystem,
    kind: &str,
    theta: f64,
    phase: f64,
    err: &ErrorModel,
) -> Result<Unitary> {
    let flip = if theta < 0.0 { PI } else { 0.0 };
    let p = phase + err.epsilon + flip;
    let amp = 1.0 + err.f;
    let single = axis_rotation(theta.abs(), [amp * p.cos(), amp * p.sin(), err.g]);
    kind_product(sys, kind, &single)
}

/// Frame rotation `exp(−i·angle·I_z)` on every spin of `kind`.
pub fn frame_rotation(sys: &SpinSystem, kind: &str, angle: f64) -> Result<Unitary> {
    kind_product(sys, kind, &axis_rotation(angle, [0.0, 0.0, 1.0]))
}

/// Errors applied while executing a program.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProgramErrors {
    pub pulse: ErrorModel,
    /// Fractional error in every coupling constant during delays.
    pub coupling_f: f64,
}

/// Propagator of a pulse program on `sys`; delays use `t = 1/(4 J_ref)`.
pub fn program_propagator(
    sys: &SpinSystem,
    events: &[SequenceEvent],
    errors: &ProgramErrors,
) -> Result<Unitary> {
    let j_ref = sys.reference_coupling();
    let h = system_hamiltonian(sys) * C64::from(1.0 + errors.coupling_f);
    let mut u = Unitary::identity(sys.dim());
    for ev in events {
        let step = match *ev {
            SequenceEvent::Pulse { spin, theta, phase } => {
                sys.check_spin(spin)?;
                hard_pulse(sys, &sys.spins[spin].kind, theta, phase, &errors.pulse)?
            }
            SequenceEvent::FrameRotation { spin, angle } => {
                sys.check_spin(spin)?;
                frame_rotation(sys, &sys.spins[spin].kind, angle)?
            }
            SequenceEvent::Delay { duration } => {
                if duration < 0.0 {
                    return Err(Error::NegativeDuration(duration));
                }
                if j_ref == 0.0 {
                    Unitary::identity(sys.dim())
                } else {
                    hermitian_exponential(&h, duration / (4.0 * j_ref))?
                }
            }
        };
        u = step.compose(&u)?;
    }
    Ok(u)
}

/// One line of a multiplet: the observed spin's coherence restricted to a
/// fixed z-configuration of the other spins.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipletComponent {
    /// z-state (0 = up, 1 = down) of each ungrouped spin other than the
    /// observed one, in spin order.
    pub singles: Vec<u8>,
    /// Number of down spins in each equivalent group, in group order.
    pub group_down: Vec<usize>,
    /// Number of spin configurations merged into this line (1:3:3:1 for a methyl).
    pub weight: usize,
    pub amplitude: C64,
}

/// Splits the observed spin's transverse signal into multiplet lines.
///
/// Amplitudes are normalized per configuration, so a freshly excited spin
/// with all other spins maximally mixed gives amplitude 1 on every line.
/// Without equivalent groups this is the plain doublet (or its products).
pub fn multiplet_phases(
    rho: &DensityMatrix,
    sys: &SpinSystem,
    observed: usize,
) -> Result<Vec<MultipletComponent>> {
    sys.check_spin(observed)?;
    if rho.dim() != sys.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sys.dim(),
        });
    }
    let n = sys.n_spins();
    let singles: Vec<usize> = (0..n)
        .filter(|&s| s != observed && sys.spins[s].group.is_none())
        .collect();
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for s in (0..n).filter(|&s| s != observed) {
        if let Some(g) = &sys.spins[s].group {
            match groups.iter_mut().find(|(name, _)| name == g) {
                Some((_, members)) => members.push(s),
                None => groups.push((g.clone(), vec![s])),
            }
        }
    }

    let bit = |idx: usize, s: usize| ((idx >> (n - 1 - s)) & 1) as u8;
    let obs_mask = 1usize << (n - 1 - observed);
    let mut comps: Vec<MultipletComponent> = Vec::new();
    let m = rho.matrix();
    for up in (0..sys.dim()).filter(|idx| idx & obs_mask == 0) {
        let key_singles: Vec<u8> = singles.iter().map(|&s| bit(up, s)).collect();
        let key_groups: Vec<usize> = groups
            .iter()
            .map(|(_, members)| members.iter().map(|&s| bit(up, s) as usize).sum())
            .collect();
        // ⟨I⁺⟩ picks ρ[(down, config), (up, config)]
        let coherence = m[(up | obs_mask, up)];
        match comps
            .iter_mut()
            .find(|c| c.singles == key_singles && c.group_down == key_groups)
        {
            Some(c) => {
                c.weight += 1;
                c.amplitude += coherence;
            }
            None => comps.push(MultipletComponent {
                singles: key_singles,
                group_down: key_groups,
                weight: 1,
                amplitude: coherence,
            }),
        }
    }
    let configs = (sys.dim() / 2) as f64;
    for c in &mut comps {
        c.amplitude *= 2.0 * configs / c.weight as f64;
    }
    comps.sort_by(|a, b| (&a.singles, &a.group_down).cmp(&(&b.singles, &b.group_down)));
    Ok(comps)
}

/// Wrapped phase of `z` relative to `reference`, in `(−π, π]`.
pub fn relative_phase(z: C64, reference: C64) -> f64 {
    (z * reference.conj()).arg()
}

/// Largest pairwise phase difference among lines that share the same
/// ungrouped-spin states, i.e. the spread inside each 1:3:3:1 pattern.
pub fn phase_spread(components: &[MultipletComponent]) -> f64 {
    let mut worst = 0.0f64;
    for a in components {
        for b in components.iter().filter(|b| b.singles == a.singles) {
            worst = worst.max(relative_phase(a.amplitude, b.amplitude).abs());
        }
    }
    worst
}

/// Configuration of the multiplet experiment: excite the observed spin with
/// a 90°_y pulse, then apply `n` quarter-period coupling gates
/// (`θ = π/2` each, i.e. an effective evolution time `n/2J`).
#[derive(Debug, Clone, PartialEq)]
pub struct MultipletSetup {
    pub system: SpinSystem,
    pub observed: usize,
    pub partner: usize,
    /// Spin receiving the tilt pulses.
    pub tilt_spin: usize,
    /// Coherence decay per unit `t` of free evolution.
    pub damping: f64,
}

impl MultipletSetup {
    /// Alanine with the carbon observed and tilted, coupled to Hα.
    pub fn alanine() -> Self {
        Self {
            system: SpinSystem::alanine(),
            observed: 0,
            partner: 1,
            tilt_spin: 0,
            damping: 0.0,
        }
    }
}

/// Result for one gate count `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultipletPoint {
    pub n: usize,
    pub duration: f64,
    pub components: Vec<MultipletComponent>,
    /// Ideal amplitude for each component (pure partner coupling, no decay).
    pub ideal: Vec<C64>,
    /// Phase of each component relative to its ideal, unwrapped along `n`.
    pub unwrapped_phase: Vec<f64>,
    /// Max-minus-min unwrapped relative phase within each multiplet.
    pub phase_spread: f64,
    /// Largest `|a − a_ideal|` over components.
    pub deviation: f64,
}

/// Runs the multiplet experiment for `n = 1..=n_max` with a coupling family.
pub fn multiplet_series(
    setup: &MultipletSetup,
    family: Family,
    n_max: usize,
) -> Result<Vec<MultipletPoint>> {
    let sys = &setup.system;
    if setup.damping < 0.0 || !setup.damping.is_finite() {
        return Err(Error::InvalidProblem(format!(
            "damping rate {} must be >= 0",
            setup.damping
        )));
    }
    for s in [setup.observed, setup.partner, setup.tilt_spin] {
        sys.check_spin(s)?;
    }
    if setup.observed == setup.partner {
        return Err(Error::InvalidProblem(
            "observed and partner spins must differ".into(),
        ));
    }
    let j = sys.coupling(setup.observed, setup.partner);
    let gate_events = compile_coupling(
        &composite_coupling(family, FRAC_PI_2)?,
        j.abs(),
        setup.tilt_spin,
    )?;
    let gate = program_propagator(sys, &gate_events, &ProgramErrors::default())?;
    let gate_duration = program_duration(&gate_events);

    let mut rho = DensityMatrix::polarized(sys.n_spins(), &[setup.observed])?;
    let excite = hard_pulse(
        sys,
        &sys.spins[setup.observed].kind,
        FRAC_PI_2,
        FRAC_PI_2,
        &ErrorModel::none(),
    )?;
    rho = crate::qcore::evolve_state(&rho, &excite)?;

    let partner_pos = (0..sys.n_spins())
        .filter(|&s| s != setup.observed && sys.spins[s].group.is_none())
        .position(|s| s == setup.partner);
    let sign = if j >= 0.0 { 1.0 } else { -1.0 };

    let mut prev: Option<Vec<f64>> = None;
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        rho = crate::qcore::evolve_state(&rho, &gate)?;
        let duration = gate_duration * n as f64;
        let decay = (-setup.damping * duration).exp();
        let mut components = multiplet_phases(&rho, sys, setup.observed)?;
        for c in &mut components {
            c.amplitude *= decay;
        }
        // coherence of the observed spin picks up e^{±iθ} with the partner up/down
        let angle = sign * FRAC_PI_2 * n as f64;
        let ideal: Vec<C64> = components
            .iter()
            .map(|c| {
                let down = partner_pos.map(|p| c.singles[p] == 1).unwrap_or(false);
                C64::from_polar(1.0, if down { -angle } else { angle })
            })
            .collect();
        let raw: Vec<f64> = components
            .iter()
            .zip(&ideal)
            .map(|(c, i)| relative_phase(c.amplitude, *i))
            .collect();
        let unwrapped: Vec<f64> = match &prev {
            None => raw.to_vec(),
            Some(last) => raw
                .iter()
                .zip(last)
                .map(|(&p, &l)| l + wrap_signed(p - l))
                .collect(),
        };
        let mut spread = 0.0f64;
        for (a, ca) in components.iter().enumerate() {
            for (b, cb) in components.iter().enumerate() {
                if ca.singles == cb.singles {
                    spread = spread.max((unwrapped[a] - unwrapped[b]).abs());
                }
            }
        }
        let deviation = components
            .iter()
            .zip(&ideal)
            .map(|(c, i)| (c.amplitude - i).norm())
            .fold(0.0, f64::max);
        prev = Some(unwrapped.clone());
        out.push(MultipletPoint {
            n,
            duration,
            components,
            ideal,
            unwrapped_phase: unwrapped,
            phase_spread: spread,
            deviation,
        });
    }
    Ok(out)
}
