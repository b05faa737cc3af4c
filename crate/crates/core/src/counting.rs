//! Approximate quantum counting on a two-spin register.
//!
//! Spin `control` is the observed spin; it is put into superposition and
//! controls the Grover iterate `G = H U₀ H⁻¹ U_f̄` acting on the one-bit
//! search spin. After `r` iterations its transverse signal is
//! `⟨s|Gʳ|s⟩`, which oscillates at the Grover eigenphase and so encodes the
//! number of solutions `k`.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::coupling::{
    compile_coupling, composite_coupling, program_duration, program_propagator, pulse_events,
    ProgramErrors, SequenceEvent, SpinSystem,
};
use crate::error::{Error, Result};
use crate::pulses::{build_sequence, ErrorModel, Family};
use crate::qcore::{evolve_state, CMatrix, DensityMatrix, Unitary, C64};

/// Largest register the matrix-level reference accepts.
pub const MAX_REGISTER_BITS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountingProblem {
    pub n_bits: usize,
    /// Number of inputs with `f(x) = 1`.
    pub k: usize,
    pub r_max: usize,
}

impl CountingProblem {
    pub fn new(n_bits: usize, k: usize, r_max: usize) -> Result<Self> {
        if n_bits == 0 || n_bits > MAX_REGISTER_BITS {
            return Err(Error::InvalidProblem(format!(
                "n_bits = {n_bits} outside 1..={MAX_REGISTER_BITS}"
            )));
        }
        if k > 1 << n_bits {
            return Err(Error::InvalidProblem(format!(
                "k = {k} exceeds N = {}",
                1usize << n_bits
            )));
        }
        Ok(Self { n_bits, k, r_max })
    }

    pub fn search_space(&self) -> usize {
        1 << self.n_bits
    }

    /// Marks the `k` highest inputs, so `k = 1` on one bit is `f(x) = x`.
    pub fn default_assignment(&self) -> Vec<bool> {
        let n = self.search_space();
        (0..n).map(|x| x >= n - self.k).collect()
    }

    /// Grover rotation per iteration, `2·arcsin(√(k/N))`.
    pub fn eigenphase(&self) -> f64 {
        2.0 * (self.k as f64 / self.search_space() as f64).sqrt().asin()
    }
}

/// Gate families, control errors and decoherence for a pulse-level run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateBackend {
    pub single: Family,
    pub coupling: Family,
    pub error: ErrorModel,
    /// Coherence decay per unit `t` of free evolution.
    pub damping: f64,
    /// Fractional error in the coupling constants.
    pub coupling_error: f64,
    /// Standard deviation of a Gaussian spread of `f` across the sample
    /// (RF inhomogeneity); zero means a single coherent `f`.
    pub rf_spread: f64,
    /// Quadrature points used when `rf_spread > 0`.
    pub rf_points: usize,
}

impl Default for GateBackend {
    fn default() -> Self {
        Self {
            single: Family::Naive,
            coupling: Family::Naive,
            error: ErrorModel::none(),
            damping: 0.0,
            coupling_error: 0.0,
            rf_spread: 0.0,
            rf_points: 16,
        }
    }
}

impl GateBackend {
    pub fn new(single: Family, coupling: Family, error: ErrorModel) -> Self {
        Self {
            single,
            coupling,
            error,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.coupling.supports_coupling() {
            return Err(Error::UnsupportedFamily(self.coupling.name()));
        }
        for (name, v) in [
            ("f", self.error.f),
            ("g", self.error.g),
            ("epsilon", self.error.epsilon),
            ("damping", self.damping),
            ("coupling_error", self.coupling_error),
            ("rf_spread", self.rf_spread),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite(name));
            }
        }
        if self.damping < 0.0 {
            return Err(Error::InvalidProblem(format!(
                "damping rate {} must be >= 0",
                self.damping
            )));
        }
        if self.rf_spread < 0.0 {
            return Err(Error::InvalidProblem(format!(
                "rf_spread {} must be >= 0",
                self.rf_spread
            )));
        }
        if self.rf_spread > 0.0 && self.rf_points == 0 {
            return Err(Error::InvalidProblem("rf_points must be positive".into()));
        }
        Ok(())
    }
}

fn check_assignment(problem: &CountingProblem, which_f: &[bool]) -> Result<()> {
    if which_f.len() != problem.search_space() {
        return Err(Error::InvalidProblem(format!(
            "assignment has {} entries, expected {}",
            which_f.len(),
            problem.search_space()
        )));
    }
    let ones = which_f.iter().filter(|&&b| b).count();
    if ones != problem.k {
        return Err(Error::InvalidProblem(format!(
            "assignment has {ones} solutions, expected k = {}",
            problem.k
        )));
    }
    Ok(())
}

fn diagonal(entries: impl Iterator<Item = f64>) -> CMatrix {
    let v: Vec<C64> = entries.map(C64::from).collect();
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(v))
}

/// `U_f̄ |x⟩ = (−1)^{f(x)+1} |x⟩` on the register.
pub fn oracle_unitary(problem: &CountingProblem, which_f: &[bool]) -> Result<Unitary> {
    check_assignment(problem, which_f)?;
    Ok(Unitary::from_matrix_unchecked(diagonal(
        which_f.iter().map(|&b| if b { 1.0 } else { -1.0 }),
    )))
}

/// `U₀` flips the sign of `|00…0⟩`.
pub fn zero_phase_unitary(problem: &CountingProblem) -> Unitary {
    Unitary::from_matrix_unchecked(diagonal((0..problem.search_space()).map(|x| {
        if x == 0 {
            -1.0
        } else {
            1.0
        }
    })))
}

fn hadamard(n_bits: usize) -> Unitary {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = Unitary::from_matrix_unchecked(CMatrix::from_row_slice(
        2,
        2,
        &[C64::from(s), C64::from(s), C64::from(s), C64::from(-s)],
    ));
    (0..n_bits).fold(Unitary::identity(1), |acc, _| acc.tensor(&h))
}

/// `G = H U₀ H⁻¹ U_f̄`.
pub fn grover_iterate_matrix(problem: &CountingProblem, which_f: &[bool]) -> Result<Unitary> {
    let h = hadamard(problem.n_bits);
    let uf = oracle_unitary(problem, which_f)?;
    uf.then(&h.adjoint())?
        .then(&zero_phase_unitary(problem))?
        .then(&h)
}

/// `|0⟩⟨0| ⊗ 1 + |1⟩⟨1| ⊗ Gʳ` with the control as the leftmost factor.
pub fn controlled_iterate(problem: &CountingProblem, which_f: &[bool], r: u32) -> Result<Unitary> {
    let g = grover_iterate_matrix(problem, which_f)?.pow(r);
    let n = problem.search_space();
    let mut m = CMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        m[(i, i)] = C64::from(1.0);
    }
    m.view_mut((n, n), (n, n)).copy_from(g.matrix());
    Ok(Unitary::from_matrix_unchecked(m))
}

/// Ideal control-spin signal `⟨s|Gʳ|s⟩` for `r = 0..=r_max`, with `|s⟩` the
/// uniform superposition.
pub fn reference_signal(problem: &CountingProblem, which_f: &[bool]) -> Result<Vec<C64>> {
    let g = grover_iterate_matrix(problem, which_f)?;
    let n = problem.search_space();
    let s = nalgebra::DVector::from_element(n, C64::from(1.0 / (n as f64).sqrt()));
    let mut v = s.clone();
    let mut out = Vec::with_capacity(problem.r_max + 1);
    for _ in 0..=problem.r_max {
        out.push(s.dotc(&v));
        v = g.matrix() * v;
    }
    Ok(out)
}

/// Which spins play which role in the pulse-level experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct CountingLayout {
    pub system: SpinSystem,
    pub control: usize,
    pub search: usize,
}

impl CountingLayout {
    /// ¹³C control and ¹H search spin.
    pub fn two_spin() -> Self {
        Self {
            system: SpinSystem::formate(),
            control: 0,
            search: 1,
        }
    }

    /// The alanine stand-in: Cα control, Hα search, methyl spectators.
    pub fn alanine(system: SpinSystem) -> Self {
        Self {
            system,
            control: 0,
            search: 1,
        }
    }

    fn validate(&self) -> Result<()> {
        let n = self.system.n_spins();
        for s in [self.control, self.search] {
            if s >= n {
                return Err(Error::SpinIndex {
                    spin: s,
                    n_spins: n,
                });
            }
        }
        if self.control == self.search {
            return Err(Error::InvalidProblem(
                "control and search spins must differ".into(),
            ));
        }
        if self.system.spins()[self.control].kind == self.system.spins()[self.search].kind {
            return Err(Error::InvalidProblem(
                "control and search spins must be different nuclei".into(),
            ));
        }
        let j = self.system.coupling(self.control, self.search);
        if j.abs() != self.system.reference_coupling() || j <= 0.0 {
            return Err(Error::InvalidProblem(
                "the control-search coupling must be the largest (positive) coupling".into(),
            ));
        }
        Ok(())
    }
}

struct Gadgets {
    h_control: Vec<SequenceEvent>,
    h_search: Vec<SequenceEvent>,
    h_inv_search: Vec<SequenceEvent>,
    coupling: Vec<SequenceEvent>,
}

fn gadgets(layout: &CountingLayout, backend: &GateBackend) -> Result<Gadgets> {
    let h = build_sequence(backend.single, FRAC_PI_2, FRAC_PI_2)?;
    let h_inv = build_sequence(backend.single, FRAC_PI_2, 3.0 * FRAC_PI_2)?;
    let j = layout.system.coupling(layout.control, layout.search);
    let coupling = compile_coupling(
        &composite_coupling(backend.coupling, FRAC_PI_2)?,
        j,
        layout.control,
    )?;
    Ok(Gadgets {
        h_control: pulse_events(&h, layout.control),
        h_search: pulse_events(&h, layout.search),
        h_inv_search: pulse_events(&h_inv, layout.search),
        coupling,
    })
}

fn frame(spin: usize, angle: f64) -> SequenceEvent {
    SequenceEvent::FrameRotation { spin, angle }
}

/// Controlled phase `diag(1, 1, u₀, u₁)` for a one-bit diagonal `diag(u₀, u₁)`.
fn controlled_diagonal(layout: &CountingLayout, g: &Gadgets, u: [bool; 2]) -> Vec<SequenceEvent> {
    let (c, s) = (layout.control, layout.search);
    let mut out = Vec::new();
    match u {
        // −1 on both: a control-only Z
        [false, false] => out.push(frame(c, PI)),
        // diag(1,1,−1,1) ∝ coupling(π/2) then z(π/2) on c, z(−π/2) on s
        [false, true] => {
            out.extend_from_slice(&g.coupling);
            out.push(frame(c, FRAC_PI_2));
            out.push(frame(s, -FRAC_PI_2));
        }
        // diag(1,1,1,−1) ∝ coupling(π/2) then z(−π/2) on both
        [true, false] => {
            out.extend_from_slice(&g.coupling);
            out.push(frame(c, -FRAC_PI_2));
            out.push(frame(s, -FRAC_PI_2));
        }
        [true, true] => {}
    }
    out
}

fn check_pulse_problem(problem: &CountingProblem) -> Result<()> {
    if problem.n_bits != 1 {
        return Err(Error::InvalidProblem(format!(
            "pulse-level counting is built for a one-bit register, got n_bits = {}",
            problem.n_bits
        )));
    }
    Ok(())
}

/// Initial pseudo-Hadamards on both spins.
pub fn preparation_events(
    layout: &CountingLayout,
    backend: &GateBackend,
) -> Result<Vec<SequenceEvent>> {
    let g = gadgets(layout, backend)?;
    Ok([g.h_control, g.h_search].concat())
}

/// One controlled Grover iterate: `ctrl(U_f̄)`, `h⁻¹`, `ctrl(U₀)`, `h` in time order.
pub fn iterate_events(
    layout: &CountingLayout,
    problem: &CountingProblem,
    which_f: &[bool],
    backend: &GateBackend,
) -> Result<Vec<SequenceEvent>> {
    check_pulse_problem(problem)?;
    check_assignment(problem, which_f)?;
    layout.validate()?;
    let g = gadgets(layout, backend)?;
    let mut out = controlled_diagonal(layout, &g, [which_f[0], which_f[1]]);
    out.extend_from_slice(&g.h_inv_search);
    out.extend(controlled_diagonal(layout, &g, [false, true]));
    out.extend_from_slice(&g.h_search);
    Ok(out)
}

/// Full program for `r` iterations on the two-spin layout.
pub fn counting_pulse_program(
    problem: &CountingProblem,
    backend: &GateBackend,
    r: usize,
) -> Result<Vec<SequenceEvent>> {
    counting_pulse_program_on(
        &CountingLayout::two_spin(),
        problem,
        &problem.default_assignment(),
        backend,
        r,
    )
}

pub fn counting_pulse_program_on(
    layout: &CountingLayout,
    problem: &CountingProblem,
    which_f: &[bool],
    backend: &GateBackend,
    r: usize,
) -> Result<Vec<SequenceEvent>> {
    backend.validate()?;
    let iterate = iterate_events(layout, problem, which_f, backend)?;
    let mut out = preparation_events(layout, backend)?;
    for _ in 0..r {
        out.extend_from_slice(&iterate);
    }
    Ok(out)
}

/// Ideal propagator of the `r`-iteration program (pseudo-Hadamards on both
/// spins followed by the controlled `Gʳ`).
pub fn reference_program_propagator(
    problem: &CountingProblem,
    which_f: &[bool],
    r: u32,
) -> Result<Unitary> {
    let h = crate::qcore::pseudo_hadamard();
    h.tensor(&h).then(&controlled_iterate(problem, which_f, r)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignalRecord {
    pub r: usize,
    /// Free-evolution time of the program, in units of `t`.
    pub duration: f64,
    pub amplitude: C64,
}

/// Runs the two-spin experiment with the default assignment.
pub fn run_counting(problem: &CountingProblem, backend: &GateBackend) -> Result<Vec<SignalRecord>> {
    run_counting_on(
        &CountingLayout::two_spin(),
        problem,
        &problem.default_assignment(),
        backend,
    )
}

/// Control-spin signal for `r = 0..=r_max`.
///
/// Starts from the pseudo-pure state with control and search in `|0⟩` and
/// any other spins maximally mixed. With `rf_spread > 0` the signal is the
/// Gauss–Hermite average over a normal distribution of `f`.
pub fn run_counting_on(
    layout: &CountingLayout,
    problem: &CountingProblem,
    which_f: &[bool],
    backend: &GateBackend,
) -> Result<Vec<SignalRecord>> {
    backend.validate()?;
    let iterate = iterate_events(layout, problem, which_f, backend)?;
    let prep = preparation_events(layout, backend)?;
    let iterate_duration = program_duration(&iterate);
    let prep_duration = program_duration(&prep);

    let nodes = if backend.rf_spread > 0.0 {
        gauss_hermite(backend.rf_points)?
    } else {
        vec![(0.0, 1.0)]
    };
    let mut signal = vec![C64::new(0.0, 0.0); problem.r_max + 1];
    for (x, w) in nodes {
        let errors = ProgramErrors {
            pulse: ErrorModel {
                f: backend.error.f + backend.rf_spread * x,
                ..backend.error
            },
            coupling_f: backend.coupling_error,
        };
        let u_prep = program_propagator(&layout.system, &prep, &errors)?;
        let u_iter = program_propagator(&layout.system, &iterate, &errors)?;
        let mut rho =
            DensityMatrix::polarized(layout.system.n_spins(), &[layout.control, layout.search])?;
        rho = evolve_state(&rho, &u_prep)?;
        for (r, acc) in signal.iter_mut().enumerate() {
            if r > 0 {
                rho = evolve_state(&rho, &u_iter)?;
            }
            *acc += rho.transverse_signal(layout.control)? * w;
        }
    }
    Ok(signal
        .into_iter()
        .enumerate()
        .map(|(r, a)| {
            let duration = prep_duration + iterate_duration * r as f64;
            SignalRecord {
                r,
                duration,
                amplitude: a * (-backend.damping * duration).exp(),
            }
        })
        .collect())
}

/// Nodes and weights of the `n`-point probabilists' Gauss–Hermite rule
/// (weight `e^{−x²/2}/√(2π)`), weights summing to one.
pub fn gauss_hermite(n: usize) -> Result<Vec<(f64, f64)>> {
    if n == 0 {
        return Err(Error::InvalidProblem(
            "quadrature needs at least one point".into(),
        ));
    }
    // Golub–Welsch: eigen-decomposition of the Jacobi matrix of He_n
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let b = (i as f64).sqrt();
        jac[(i - 1, i)] = b;
        jac[(i, i - 1)] = b;
    }
    let eig = SymmetricEigen::new(jac);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(out)
}

/// Fitted exponential decay per iteration of `|signal|`, using only the
/// iterations where the ideal signal has magnitude at least one half.
pub fn envelope_decay_rate(signal: &[SignalRecord], ideal: &[C64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = signal
        .iter()
        .zip(ideal)
        .filter(|(s, i)| i.norm() >= 0.5 && s.amplitude.norm() > 0.0)
        .map(|(s, i)| (s.r as f64, (s.amplitude.norm() / i.norm()).ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

/// Dominant frequency of the signal in cycles per iteration, from a
/// finely sampled discrete-time Fourier transform over `[0, 1/2]`.
pub fn dominant_frequency(signal: &[C64]) -> f64 {
    let n = signal.len().max(1);
    let steps = 16 * n;
    let mut best = (0.0, f64::NEG_INFINITY);
    for i in 0..=steps {
        let nu = 0.5 * i as f64 / steps as f64;
        let power: C64 = signal
            .iter()
            .enumerate()
            .map(|(r, s)| s * C64::from_polar(1.0, -2.0 * PI * nu * r as f64))
            .sum();
        if power.norm() > best.1 + 1e-12 {
            best = (nu, power.norm());
        }
    }
    best.0
}

/// Grover eigenphase estimated from a signal, `2π × dominant frequency`.
pub fn estimate_eigenphase(signal: &[C64]) -> f64 {
    2.0 * PI * dominant_frequency(signal)
}
