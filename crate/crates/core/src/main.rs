use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use robust_gates::harness::{
    load_config, run_sweep, Experiment, HarnessError, OutputSpec, SweepSpec,
};
use robust_gates::pulses::Family;

#[derive(Parser)]
#[command(
    name = "robust-gates",
    version,
    about = "Composite-pulse gate simulations and sweeps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transverse signal after a composite 90° pulse versus pulse-length error.
    Profile(Common),
    /// Propagator fidelity versus pulse-length error.
    Fidelity(Common),
    /// Quantum-counting signal versus iteration count.
    Counting(Common),
    /// Multiplet phases under repeated coupling gates.
    Multiplet(Common),
    /// Counting on a spin system with spectator couplings.
    Simplify(Common),
}

#[derive(Args)]
struct Common {
    /// JSON scenario file; defaults are used when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (.csv or .json).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Gate families, repeatable or comma separated.
    #[arg(long, value_delimiter = ',')]
    family: Vec<String>,
    /// Target rotation angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    f_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    f_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    f_step: Option<f64>,
}

fn build_spec(experiment: Experiment, args: &Common) -> Result<SweepSpec, HarnessError> {
    let mut spec = match &args.config {
        Some(path) => load_config(path)?,
        None => SweepSpec::defaults(experiment),
    };
    if spec.experiment != experiment {
        return Err(HarnessError::InvalidField {
            field: "experiment".into(),
            reason: format!(
                "config describes {}, not {}",
                spec.experiment.name(),
                experiment.name()
            ),
        });
    }
    if !args.family.is_empty() {
        spec.families = args
            .family
            .iter()
            .map(|name| {
                name.parse::<Family>()
                    .map_err(|_| HarnessError::InvalidField {
                        field: "--family".into(),
                        reason: format!("unknown family {name:?}"),
                    })
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(t) = args.theta {
        spec.theta = t;
    }
    if let Some(v) = args.f_min {
        spec.error_grid.f_min = v;
    }
    if let Some(v) = args.f_max {
        spec.error_grid.f_max = v;
    }
    if let Some(v) = args.f_step {
        spec.error_grid.f_step = v;
    }
    if let Some(out) = &args.out {
        spec.output = Some(OutputSpec {
            path: out.clone(),
            format: None,
        });
    }
    spec.validate()?;
    Ok(spec)
}

/// Runs one invocation and returns the process exit code.
fn run(cli: Cli) -> u8 {
    let (experiment, args) = match &cli.command {
        Command::Profile(a) => (Experiment::ExcitationProfile, a),
        Command::Fidelity(a) => (Experiment::FidelitySweep, a),
        Command::Counting(a) => (Experiment::Counting, a),
        Command::Multiplet(a) => (Experiment::CouplingMultiplet, a),
        Command::Simplify(a) => (Experiment::SimplifyDemo, a),
    };
    match build_spec(experiment, args).and_then(|spec| run_sweep(&spec)) {
        Ok(path) => {
            println!("{}", path.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(Cli::parse()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    use robust_gates::harness::{Table, Value};

    fn invoke(args: &[&str]) -> u8 {
        let mut full = vec!["robust-gates"];
        full.extend_from_slice(args);
        run(Cli::try_parse_from(full).unwrap())
    }

    #[test]
    fn fidelity_sweep_emits_1206_rows() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("fid.csv");
        assert_eq!(invoke(&["fidelity", "--out", out.to_str().unwrap()]), 0);
        let text = std::fs::read_to_string(&out).unwrap();
        let table = Table::from_csv(&text).unwrap();
        assert_eq!(table.len(), 1206);
        assert_eq!(
            table.columns,
            [
                "family",
                "theta",
                "phi",
                "f",
                "g",
                "epsilon",
                "fidelity",
                "infidelity"
            ]
        );
        assert_eq!(table.to_csv().unwrap(), text);
    }

    #[test]
    fn overrides_narrow_the_sweep() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("p.json");
        let code = invoke(&[
            "profile",
            "--family",
            "naive,BB1",
            "--f-min",
            "-0.2",
            "--f-max",
            "0.2",
            "--f-step",
            "0.1",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let rows: Vec<serde_json::Value> =
            serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(rows.len(), 10);
        assert_eq!(rows[5]["family"], "BB1");
        let keys: Vec<&String> = rows[0].as_object().unwrap().keys().collect();
        assert_eq!(
            keys,
            [
                "family",
                "theta",
                "phi",
                "f",
                "g",
                "epsilon",
                "in_phase",
                "quadrature"
            ]
        );
    }

    #[test]
    fn validation_errors_exit_with_2() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("x.csv");
        let out = out.to_str().unwrap();
        for args in [
            vec!["fidelity", "--f-step", "0", "--out", out],
            vec!["fidelity", "--f-step", "-0.1", "--out", out],
            vec!["fidelity", "--family", "BB7", "--out", out],
            vec!["fidelity", "--theta", "7", "--out", out],
            vec!["multiplet", "--family", "P4", "--out", out],
            vec!["fidelity"],
        ] {
            assert_eq!(invoke(&args), 2, "{args:?}");
        }
        let cfg = dir.path().join("cfg.json");
        std::fs::write(&cfg, r#"{"schema_version":1,"experiment":"counting"}"#).unwrap();
        assert_eq!(
            invoke(&["fidelity", "--config", cfg.to_str().unwrap(), "--out", out]),
            2
        );
        assert_eq!(
            invoke(&["fidelity", "--config", "/nonexistent.json", "--out", out]),
            1
        );
        assert!(!Path::new(out).exists());
        assert!(Cli::try_parse_from(["robust-gates", "plot"]).is_err());
    }

    #[test]
    fn out_dir_override_applies_to_relative_paths() {
        let dir = tempfile::tempdir().unwrap();
        // the only test that touches the variable; the others write to absolute paths
        std::env::set_var(robust_gates::harness::OUT_DIR_ENV, dir.path());
        let code = invoke(&["simplify", "--out", "nested/simplify.csv"]);
        std::env::remove_var(robust_gates::harness::OUT_DIR_ENV);
        assert_eq!(code, 0);
        let text = std::fs::read_to_string(dir.path().join("nested/simplify.csv")).unwrap();
        let t = Table::from_csv(&text).unwrap();
        assert_eq!(t.rows[0][0], Value::Text("full".into()));
        assert_eq!(t.len(), 42);
    }

    #[test]
    fn config_file_drives_counting() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.json");
        let out = dir.path().join("c.csv");
        std::fs::write(
            &cfg,
            format!(
                r#"{{"schema_version": 1, "experiment": "counting", "families": ["naive"],
                     "error_grid": {{"f_min": 0, "f_max": 0, "f_step": 0.1}},
                     "counting": {{"k": [1], "r_max": 8}},
                     "output": {{"path": "{}"}}}}"#,
                out.display()
            ),
        )
        .unwrap();
        assert_eq!(invoke(&["counting", "--config", cfg.to_str().unwrap()]), 0);
        let t = Table::from_csv(&std::fs::read_to_string(&out).unwrap()).unwrap();
        assert_eq!(t.len(), 9);
        let (re, ideal) = (
            t.column("signal_re").unwrap(),
            t.column("ideal_re").unwrap(),
        );
        for row in &t.rows {
            assert!((row[re].as_f64().unwrap() - row[ideal].as_f64().unwrap()).abs() < 1e-10);
        }
    }
}
