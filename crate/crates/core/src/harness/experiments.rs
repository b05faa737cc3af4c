use std::path::PathBuf;

use rayon::prelude::*;

use super::config::{parse_family, Experiment, OutputFormat, SimplifyParams, SweepSpec};
use super::table::{Table, Value};
use super::HarnessError;
use crate::counting::{
    reference_signal, run_counting_on, CountingLayout, CountingProblem, GateBackend, SignalRecord,
};
use crate::coupling::{multiplet_series, MultipletSetup, SpinSystem};
use crate::pulses::{build_sequence, sequence_propagator, ErrorModel, Family};
use crate::qcore::{evolve_state, propagator_fidelity, DensityMatrix, C64};

type HResult<T> = Result<T, HarnessError>;

/// Transverse signal after a (composite) `θ_φ` pulse on a spin in `|0⟩`.
/// A perfect 90°_y pulse gives `1 + 0i`.
pub fn excitation_amplitude(
    family: Family,
    theta: f64,
    phi: f64,
    err: &ErrorModel,
) -> crate::Result<C64> {
    let u = sequence_propagator(&build_sequence(family, theta, phi)?, err);
    let rho = evolve_state(&DensityMatrix::basis_state(1, 0)?, &u)?;
    rho.transverse_signal(0)
}

/// Amplitude versus pulse-length error for one family.
pub fn excitation_profile(
    family: Family,
    f_grid: &[f64],
    theta: f64,
    phi: f64,
    g: f64,
    epsilon: f64,
) -> crate::Result<Vec<(f64, C64)>> {
    f_grid
        .par_iter()
        .map(|&f| {
            Ok((
                f,
                excitation_amplitude(family, theta, phi, &ErrorModel::new(f, g, epsilon))?,
            ))
        })
        .collect()
}

fn family_grid(spec: &SweepSpec) -> Vec<(Family, f64)> {
    let pts = spec.error_grid.points();
    spec.families
        .iter()
        .flat_map(|&fam| pts.iter().map(move |&f| (fam, f)))
        .collect()
}

fn profile_table(spec: &SweepSpec) -> HResult<Table> {
    let g = spec.error_grid.g;
    let eps = spec.error_grid.epsilon;
    let rows: Vec<Vec<Value>> = family_grid(spec)
        .par_iter()
        .map(|&(fam, f)| {
            let a = excitation_amplitude(fam, spec.theta, spec.phi, &ErrorModel::new(f, g, eps))?;
            Ok(vec![
                fam.name().into(),
                spec.theta.into(),
                spec.phi.into(),
                f.into(),
                g.into(),
                eps.into(),
                a.re.into(),
                a.im.into(),
            ])
        })
        .collect::<crate::Result<_>>()?;
    let mut t = Table::new(&[
        "family",
        "theta",
        "phi",
        "f",
        "g",
        "epsilon",
        "in_phase",
        "quadrature",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Propagator fidelity against the ideal rotation over the error grid.
pub fn fidelity_sweep(spec: &SweepSpec) -> HResult<Table> {
    let g = spec.error_grid.g;
    let eps = spec.error_grid.epsilon;
    let rows: Vec<Vec<Value>> = family_grid(spec)
        .par_iter()
        .map(|&(fam, f)| {
            let seq = build_sequence(fam, spec.theta, spec.phi)?;
            let fid = propagator_fidelity(
                &sequence_propagator(&seq, &ErrorModel::new(f, g, eps)),
                &seq.target(),
            )?;
            Ok(vec![
                fam.name().into(),
                spec.theta.into(),
                spec.phi.into(),
                f.into(),
                g.into(),
                eps.into(),
                fid.into(),
                (1.0 - fid).into(),
            ])
        })
        .collect::<crate::Result<_>>()?;
    let mut t = Table::new(&[
        "family",
        "theta",
        "phi",
        "f",
        "g",
        "epsilon",
        "fidelity",
        "infidelity",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

/// Counting signals for every single-qubit family, `k` and `f`.
pub fn counting_sweep(spec: &SweepSpec) -> HResult<Table> {
    let c = &spec.counting;
    let coupling = parse_family("counting.coupling_family", &c.coupling_family)?;
    let layout = CountingLayout {
        system: spec.spin_system.clone(),
        control: 0,
        search: 1,
    };
    let pts = spec.error_grid.points();
    let mut jobs: Vec<(Family, usize, f64)> = Vec::new();
    for &fam in &spec.families {
        for &k in &c.k {
            jobs.extend(pts.iter().map(|&f| (fam, k, f)));
        }
    }
    let blocks: Vec<Vec<Vec<Value>>> = jobs
        .par_iter()
        .map(|&(fam, k, f)| {
            let problem = CountingProblem::new(1, k, c.r_max)?;
            let which = problem.default_assignment();
            let backend = GateBackend {
                single: fam,
                coupling,
                error: ErrorModel::new(f, spec.error_grid.g, spec.error_grid.epsilon),
                damping: c.damping,
                coupling_error: c.coupling_error,
                rf_spread: c.rf_spread,
                rf_points: c.rf_points,
            };
            let signal = run_counting_on(&layout, &problem, &which, &backend)?;
            let ideal = reference_signal(&problem, &which)?;
            Ok(signal
                .iter()
                .zip(&ideal)
                .map(|(s, i)| {
                    vec![
                        fam.name().into(),
                        coupling.name().into(),
                        k.into(),
                        f.into(),
                        spec.error_grid.g.into(),
                        spec.error_grid.epsilon.into(),
                        s.r.into(),
                        s.duration.into(),
                        s.amplitude.re.into(),
                        s.amplitude.im.into(),
                        i.re.into(),
                        i.im.into(),
                    ]
                })
                .collect())
        })
        .collect::<crate::Result<_>>()?;
    let mut t = Table::new(&[
        "single_family",
        "coupling_family",
        "k",
        "f",
        "g",
        "epsilon",
        "r",
        "duration",
        "signal_re",
        "signal_im",
        "ideal_re",
        "ideal_im",
    ]);
    blocks.into_iter().flatten().for_each(|r| t.push(r));
    Ok(t)
}

fn singles_label(singles: &[u8]) -> String {
    if singles.is_empty() {
        "-".into()
    } else {
        singles
            .iter()
            .map(|&b| if b == 0 { 'u' } else { 'd' })
            .collect()
    }
}

fn group_label(groups: &[usize]) -> String {
    if groups.is_empty() {
        "-".into()
    } else {
        groups
            .iter()
            .map(|g| g.to_string())
            .collect::<Vec<_>>()
            .join("/")
    }
}

/// Per-component multiplet amplitudes and phases for `n = 1..=n_max` gates.
pub fn coupling_multiplet(spec: &SweepSpec) -> HResult<Table> {
    let m = &spec.multiplet;
    let setup = MultipletSetup {
        system: spec.spin_system.clone(),
        observed: m.observed,
        partner: m.partner,
        tilt_spin: m.tilt_spin,
        damping: m.damping,
    };
    let series: Vec<_> = spec
        .families
        .par_iter()
        .map(|&fam| multiplet_series(&setup, fam, m.n_max).map(|s| (fam, s)))
        .collect::<crate::Result<_>>()?;
    let mut t = Table::new(&[
        "family",
        "n",
        "duration",
        "singles",
        "group_down",
        "weight",
        "amplitude_re",
        "amplitude_im",
        "relative_phase",
        "phase_spread",
        "deviation",
    ]);
    for (fam, points) in series {
        for p in points {
            for (c, phase) in p.components.iter().zip(&p.unwrapped_phase) {
                t.push(vec![
                    fam.name().into(),
                    p.n.into(),
                    p.duration.into(),
                    singles_label(&c.singles).into(),
                    group_label(&c.group_down).into(),
                    c.weight.into(),
                    c.amplitude.re.into(),
                    c.amplitude.im.into(),
                    (*phase).into(),
                    p.phase_spread.into(),
                    p.deviation.into(),
                ]);
            }
        }
    }
    Ok(t)
}

/// Counting on a spin system with spectators, against the isolated oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplifyVariant {
    pub label: &'static str,
    pub system: SpinSystem,
    pub signal: Vec<SignalRecord>,
    /// Largest `|signal − oracle|` over `r`.
    pub corruption: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplifyReport {
    pub oracle: Vec<C64>,
    pub variants: Vec<SimplifyVariant>,
}

/// Runs counting with the control on spin 0 and the search bit on spin 1,
/// once on `system` as given and once with every coupling between the
/// search spin and grouped (equivalent) spins removed.
pub fn simplify_demo(
    system: &SpinSystem,
    params: &SimplifyParams,
    coupling: Family,
    err: &ErrorModel,
) -> HResult<SimplifyReport> {
    let single = parse_family("simplify.single_family", &params.single_family)?;
    let problem = CountingProblem::new(1, params.k, params.r_max)?;
    let which = problem.default_assignment();
    let oracle = reference_signal(&problem, &which)?;

    let mut decoupled = system.clone();
    for (i, s) in system.spins().iter().enumerate() {
        if s.group.is_some() {
            decoupled = decoupled.with_coupling(1, i, 0.0)?;
        }
    }
    let backend = GateBackend {
        single,
        coupling,
        error: *err,
        ..GateBackend::default()
    };
    let variants = [
        ("full", system.clone()),
        ("search-group-decoupled", decoupled),
    ]
    .into_par_iter()
    .map(|(label, sys)| {
        let layout = CountingLayout::alanine(sys.clone());
        let signal = run_counting_on(&layout, &problem, &which, &backend)?;
        let corruption = signal
            .iter()
            .zip(&oracle)
            .map(|(s, o)| (s.amplitude - o).norm())
            .fold(0.0, f64::max);
        Ok(SimplifyVariant {
            label,
            system: sys,
            signal,
            corruption,
        })
    })
    .collect::<crate::Result<Vec<_>>>()?;
    Ok(SimplifyReport { oracle, variants })
}

fn simplify_table(spec: &SweepSpec) -> HResult<Table> {
    let g = &spec.error_grid;
    let report = simplify_demo(
        &spec.spin_system,
        &spec.simplify,
        spec.families[0],
        &ErrorModel::new(g.f_min, g.g, g.epsilon),
    )?;
    let mut t = Table::new(&[
        "variant",
        "coupling_family",
        "r",
        "signal_re",
        "signal_im",
        "oracle_re",
        "oracle_im",
        "deviation",
        "corruption",
    ]);
    for v in &report.variants {
        for (s, o) in v.signal.iter().zip(&report.oracle) {
            t.push(vec![
                v.label.into(),
                spec.families[0].name().into(),
                s.r.into(),
                s.amplitude.re.into(),
                s.amplitude.im.into(),
                o.re.into(),
                o.im.into(),
                (s.amplitude - o).norm().into(),
                v.corruption.into(),
            ]);
        }
    }
    Ok(t)
}

/// Evaluates a validated spec into a table (rows in grid order).
pub fn run_experiment(spec: &SweepSpec) -> HResult<Table> {
    spec.validate()?;
    match spec.experiment {
        Experiment::ExcitationProfile => profile_table(spec),
        Experiment::FidelitySweep => fidelity_sweep(spec),
        Experiment::Counting => counting_sweep(spec),
        Experiment::CouplingMultiplet => coupling_multiplet(spec),
        Experiment::SimplifyDemo => simplify_table(spec),
    }
}

/// Runs the experiment and writes the table to the spec's output.
pub fn run_sweep(spec: &SweepSpec) -> HResult<PathBuf> {
    let out = spec
        .output
        .as_ref()
        .ok_or_else(|| HarnessError::field("output", "no output path given"))?;
    let table = run_experiment(spec)?;
    let text = match out.resolved_format() {
        OutputFormat::Csv => table.to_csv()?,
        OutputFormat::Json => table.to_json()?,
    };
    let path = out.resolved_path();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| HarnessError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(&path, text).map_err(|source| HarnessError::Write {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
