//! Command-line harness for the GRLW solver experiments.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on solver
//! or I/O failures.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use grlw::error::Error;
use grlw::experiment::{run_experiment, Problem, RunConfig};

#[derive(Parser, Debug)]
#[command(
    name = "grlw",
    version,
    about = "Petrov-Galerkin B-spline solver for the generalized regularized long wave equation",
    after_help = "Defaults not overridden by flags can come from --config <file> with flat \
                  key=value lines (same keys as the long flags). Flags override file values, \
                  which override built-in defaults. GRLW_OUT_DIR sets the default output \
                  directory."
)]
struct Cli {
    #[command(subcommand)]
    problem: ProblemCommand,
}

#[derive(Subcommand, Debug)]
enum ProblemCommand {
    /// Single solitary wave with analytic error norms (requires --p --c --h --dt --tend).
    Soliton(CommonArgs),
    /// Two-wave collision with peak tracking (requires --p --c1 --c2 --h --dt --tend).
    Interaction(CommonArgs),
    /// Maxwellian pulse invariant sweep over mu in {0.1,0.05,0.025} and p in {2,3,4}.
    Maxwellian(CommonArgs),
    /// Von Neumann growth-factor scan of the linearized scheme.
    Stability(CommonArgs),
    /// L2 error under mesh refinement h, h/2, h/4 with dt reduced proportionally.
    Convergence(CommonArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Nonlinearity exponent p.
    #[arg(long)]
    p: Option<u32>,
    /// Wave speed parameter c (soliton, stability, convergence).
    #[arg(long)]
    c: Option<f64>,
    /// First (faster) wave speed parameter (interaction).
    #[arg(long)]
    c1: Option<f64>,
    /// Second (slower) wave speed parameter (interaction).
    #[arg(long)]
    c2: Option<f64>,
    /// Dispersion coefficient mu.
    #[arg(long)]
    mu: Option<f64>,
    /// Mesh spacing.
    #[arg(long)]
    h: Option<f64>,
    /// Time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long)]
    tend: Option<f64>,
    /// Wave center (soliton).
    #[arg(long)]
    x0: Option<f64>,
    /// First wave center (interaction).
    #[arg(long)]
    x1: Option<f64>,
    /// Second wave center (interaction).
    #[arg(long)]
    x2: Option<f64>,
    /// Left end of the spatial interval.
    #[arg(long)]
    xmin: Option<f64>,
    /// Right end of the spatial interval.
    #[arg(long)]
    xmax: Option<f64>,
    /// Total assemble-and-solve passes per time step.
    #[arg(long = "inner-iters")]
    inner_iters: Option<usize>,
    /// Comma-separated diagnostic report times.
    #[arg(long = "report-times", value_delimiter = ',')]
    report_times: Option<Vec<f64>>,
    /// Output directory (default: $GRLW_OUT_DIR, else current directory).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of sampled Fourier modes (stability only).
    #[arg(long)]
    samples: Option<usize>,
    /// Flat key=value config file supplying values for any flag above.
    #[arg(long)]
    config: Option<PathBuf>,
}

/// Values read from a `--config` file; same shape as the flags plus the
/// early-exit tolerance of the inner iteration, which has no flag.
#[derive(Debug, Default)]
struct FileValues {
    args: CommonArgs,
    correction_tolerance: Option<f64>,
}

fn parse_config_file(path: &PathBuf) -> Result<FileValues, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut values = FileValues::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!(
                "{}:{}: expected key=value, got {line:?}",
                path.display(),
                lineno + 1
            ))
        })?;
        let key = key.trim().replace('-', "_");
        let value = value.trim();
        let bad = |what: &str| {
            Error::InvalidConfig(format!(
                "{}:{}: invalid {what} value {value:?} for key {key:?}",
                path.display(),
                lineno + 1
            ))
        };
        let float = |slot: &mut Option<f64>| -> Result<(), Error> {
            *slot = Some(value.parse().map_err(|_| bad("numeric"))?);
            Ok(())
        };
        match key.as_str() {
            "p" => values.args.p = Some(value.parse().map_err(|_| bad("integer"))?),
            "c" => float(&mut values.args.c)?,
            "c1" => float(&mut values.args.c1)?,
            "c2" => float(&mut values.args.c2)?,
            "mu" => float(&mut values.args.mu)?,
            "h" => float(&mut values.args.h)?,
            "dt" => float(&mut values.args.dt)?,
            "tend" | "t_end" => float(&mut values.args.tend)?,
            "x0" => float(&mut values.args.x0)?,
            "x1" => float(&mut values.args.x1)?,
            "x2" => float(&mut values.args.x2)?,
            "xmin" => float(&mut values.args.xmin)?,
            "xmax" => float(&mut values.args.xmax)?,
            "inner_iters" | "inner_iterations" => {
                values.args.inner_iters = Some(value.parse().map_err(|_| bad("integer"))?)
            }
            "correction_tolerance" => float(&mut values.correction_tolerance)?,
            "samples" => values.args.samples = Some(value.parse().map_err(|_| bad("integer"))?),
            "report_times" => {
                let mut times = Vec::new();
                for part in value.split(',') {
                    times.push(part.trim().parse().map_err(|_| bad("numeric list"))?);
                }
                values.args.report_times = Some(times);
            }
            "out" => values.args.out = Some(PathBuf::from(value)),
            other => {
                return Err(Error::InvalidConfig(format!(
                    "{}:{}: unknown key {other:?}",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(values)
}

/// Flags override config-file values.
fn merge(flags: CommonArgs, file: CommonArgs) -> CommonArgs {
    CommonArgs {
        p: flags.p.or(file.p),
        c: flags.c.or(file.c),
        c1: flags.c1.or(file.c1),
        c2: flags.c2.or(file.c2),
        mu: flags.mu.or(file.mu),
        h: flags.h.or(file.h),
        dt: flags.dt.or(file.dt),
        tend: flags.tend.or(file.tend),
        x0: flags.x0.or(file.x0),
        x1: flags.x1.or(file.x1),
        x2: flags.x2.or(file.x2),
        xmin: flags.xmin.or(file.xmin),
        xmax: flags.xmax.or(file.xmax),
        inner_iters: flags.inner_iters.or(file.inner_iters),
        report_times: flags.report_times.or(file.report_times),
        out: flags.out.or(file.out),
        samples: flags.samples.or(file.samples),
        config: flags.config,
    }
}

fn require<T>(value: Option<T>, key: &str, problem: &str) -> Result<T, Error> {
    value.ok_or_else(|| {
        Error::InvalidConfig(format!(
            "missing required parameter '{key}' for '{problem}'"
        ))
    })
}

/// Default report times: the standard table rows for the problem, clipped to
/// `[0, tend]`, with `tend` itself always included.
fn default_report_times(base: &[f64], tend: f64) -> Vec<f64> {
    let mut times: Vec<f64> = base.iter().copied().filter(|&t| t <= tend + 1e-9).collect();
    if times.last().is_none_or(|&last| (last - tend).abs() > 1e-9) {
        times.push(tend);
    }
    times
}

fn out_dir(args: &CommonArgs) -> PathBuf {
    args.out.clone().unwrap_or_else(|| {
        std::env::var_os("GRLW_OUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
    })
}

fn build_config(command: &ProblemCommand) -> Result<RunConfig, Error> {
    let (name, flags) = match command {
        ProblemCommand::Soliton(a) => ("soliton", a),
        ProblemCommand::Interaction(a) => ("interaction", a),
        ProblemCommand::Maxwellian(a) => ("maxwellian", a),
        ProblemCommand::Stability(a) => ("stability", a),
        ProblemCommand::Convergence(a) => ("convergence", a),
    };
    let file = match &flags.config {
        Some(path) => parse_config_file(path)?,
        None => FileValues::default(),
    };
    let correction_tolerance = file.correction_tolerance;
    let args = merge(flags.clone(), file.args);
    let out = out_dir(&args);

    let config = match command {
        ProblemCommand::Soliton(_) => {
            let tend = require(args.tend, "tend", name)?;
            let soliton_rows: Vec<f64> = (0..)
                .map(|k| 2.0 * k as f64)
                .take_while(|&t| t <= tend + 1e-9)
                .collect();
            RunConfig {
                problem: Problem::Soliton,
                p: require(args.p, "p", name)?,
                mu: args.mu.unwrap_or(1.0),
                c: require(args.c, "c", name)?,
                c2: 0.0,
                x0: args.x0.unwrap_or(40.0),
                x2: 0.0,
                xmin: args.xmin.unwrap_or(0.0),
                xmax: args.xmax.unwrap_or(100.0),
                h: require(args.h, "h", name)?,
                dt: require(args.dt, "dt", name)?,
                t_end: tend,
                inner_iterations: args.inner_iters.unwrap_or(2),
                correction_tolerance: correction_tolerance.unwrap_or(0.0),
                report_times: args
                    .report_times
                    .unwrap_or_else(|| default_report_times(&soliton_rows, tend)),
                out_dir: out,
            }
        }
        ProblemCommand::Interaction(_) => {
            let tend = require(args.tend, "tend", name)?;
            RunConfig {
                problem: Problem::Interaction,
                p: require(args.p, "p", name)?,
                mu: args.mu.unwrap_or(1.0),
                c: require(args.c1, "c1", name)?,
                c2: require(args.c2, "c2", name)?,
                x0: args.x1.unwrap_or(20.0),
                x2: args.x2.unwrap_or(45.0),
                xmin: args.xmin.unwrap_or(0.0),
                xmax: args.xmax.unwrap_or(120.0),
                h: require(args.h, "h", name)?,
                dt: require(args.dt, "dt", name)?,
                t_end: tend,
                // Collisions need the inner iteration driven to convergence;
                // a dozen passes with an early exit keeps it cheap away from
                // the collision window.
                inner_iterations: args.inner_iters.unwrap_or(12),
                correction_tolerance: correction_tolerance.unwrap_or(1e-10),
                report_times: args
                    .report_times
                    .unwrap_or_else(|| default_report_times(&[0.0, 2.0, 3.0, 4.0, 5.0], tend)),
                out_dir: out,
            }
        }
        ProblemCommand::Maxwellian(_) => {
            let tend = args.tend.unwrap_or(0.05);
            RunConfig {
                problem: Problem::Maxwellian,
                // Zero means "sweep all standard values".
                p: args.p.unwrap_or(0),
                mu: args.mu.unwrap_or(0.0),
                c: 1.0,
                c2: 0.0,
                x0: 40.0,
                x2: 0.0,
                xmin: args.xmin.unwrap_or(0.0),
                xmax: args.xmax.unwrap_or(100.0),
                h: args.h.unwrap_or(0.1),
                dt: args.dt.unwrap_or(0.001),
                t_end: tend,
                inner_iterations: args.inner_iters.unwrap_or(2),
                correction_tolerance: correction_tolerance.unwrap_or(0.0),
                report_times: args
                    .report_times
                    .unwrap_or_else(|| default_report_times(&[0.01, 0.03, 0.05], tend)),
                out_dir: out,
            }
        }
        ProblemCommand::Stability(_) => RunConfig {
            problem: Problem::Stability {
                n_samples: args.samples.unwrap_or(10_000),
            },
            p: args.p.unwrap_or(2),
            mu: args.mu.unwrap_or(1.0),
            c: args.c.unwrap_or(1.0),
            c2: 0.0,
            x0: args.x0.unwrap_or(40.0),
            x2: 0.0,
            xmin: args.xmin.unwrap_or(0.0),
            xmax: args.xmax.unwrap_or(100.0),
            h: args.h.unwrap_or(0.2),
            dt: args.dt.unwrap_or(0.025),
            t_end: 0.0,
            inner_iterations: 1,
            correction_tolerance: 0.0,
            report_times: Vec::new(),
            out_dir: out,
        },
        ProblemCommand::Convergence(_) => {
            let tend = args.tend.unwrap_or(1.0);
            RunConfig {
                problem: Problem::Convergence,
                p: args.p.unwrap_or(2),
                mu: args.mu.unwrap_or(1.0),
                c: args.c.unwrap_or(1.0),
                c2: 0.0,
                x0: args.x0.unwrap_or(40.0),
                x2: 0.0,
                xmin: args.xmin.unwrap_or(0.0),
                xmax: args.xmax.unwrap_or(100.0),
                h: args.h.unwrap_or(0.4),
                dt: args.dt.unwrap_or(0.05),
                t_end: tend,
                inner_iterations: args.inner_iters.unwrap_or(2),
                correction_tolerance: correction_tolerance.unwrap_or(0.0),
                report_times: Vec::new(),
                out_dir: out,
            }
        }
    };
    Ok(config)
}

/// Usage and validation problems exit 1; solver and I/O failures exit 2.
fn exit_code_for(error: &Error) -> u8 {
    match error {
        Error::InvalidConfig(_)
        | Error::InvalidParams(_)
        | Error::InvalidMesh(_)
        | Error::InvalidTimeGrid(_)
        | Error::PointOutsideMesh { .. }
        | Error::CoordinateOutOfRange { .. }
        | Error::UnsupportedDerivativeOrder { .. }
        | Error::DimensionMismatch(_) => 1,
        Error::StepFailed { .. }
        | Error::Diverged { .. }
        | Error::SingularMatrix { .. }
        | Error::DegenerateMode
        | Error::Io { .. } => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let config = match build_config(&cli.problem) {
        Ok(config) => config,
        Err(err) => {
            eprintln!("error: {err}");
            return ExitCode::from(exit_code_for(&err));
        }
    };
    match run_experiment(&config) {
        Ok(outcome) => {
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write as _;

    fn parse(line: &str) -> ProblemCommand {
        let argv: Vec<&str> = std::iter::once("grlw")
            .chain(line.split_whitespace())
            .collect();
        Cli::try_parse_from(argv).unwrap().problem
    }

    // --- defaults and required fields ---

    #[test]
    fn table_1_invocation_resolves_to_reference_configuration() {
        let cmd = parse(
            "soliton --p 2 --c 1 --h 0.2 --dt 0.025 --mu 1 --x0 40 --xmin 0 --xmax 100 --tend 10",
        );
        let config = build_config(&cmd).unwrap();
        assert_eq!(config.problem, Problem::Soliton);
        assert_eq!(config.p, 2);
        assert_eq!(config.h, 0.2);
        assert_eq!(config.dt, 0.025);
        assert_eq!(config.report_times, vec![0.0, 2.0, 4.0, 6.0, 8.0, 10.0]);
    }

    #[test]
    fn missing_dt_is_reported_by_name() {
        let cmd = parse("soliton --p 2 --c 1 --h 0.2 --tend 10");
        let err = build_config(&cmd).unwrap_err();
        assert!(err.to_string().contains("'dt'"), "message: {err}");
    }

    #[test]
    fn maxwellian_needs_no_flags() {
        let config = build_config(&parse("maxwellian")).unwrap();
        assert_eq!(config.h, 0.1);
        assert_eq!(config.dt, 0.001);
        assert_eq!(config.report_times, vec![0.01, 0.03, 0.05]);
        assert_eq!(config.p, 0, "sweep sentinel");
    }

    #[test]
    fn interaction_defaults_use_converged_inner_iteration() {
        let cmd =
            parse("interaction --p 3 --c1 9.6 --c2 1.2 --h 0.1 --dt 0.01 --tend 6 --xmax 120");
        let config = build_config(&cmd).unwrap();
        assert_eq!(config.inner_iterations, 12);
        assert_eq!(config.correction_tolerance, 1e-10);
        assert_eq!(config.report_times, vec![0.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(config.x0, 20.0);
        assert_eq!(config.x2, 45.0);
    }

    #[test]
    fn report_times_clip_to_tend() {
        let cmd = parse("soliton --p 2 --c 1 --h 0.2 --dt 0.025 --tend 5");
        let config = build_config(&cmd).unwrap();
        assert_eq!(config.report_times, vec![0.0, 2.0, 4.0, 5.0]);
    }

    // --- config file handling ---

    #[test]
    fn flags_override_config_file_values() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# reference configuration\np = 2\nc = 1\nh = 0.2\ndt = 0.025\ntend = 10\nreport_times = 0, 5, 10").unwrap();
        let cmd = parse(&format!(
            "soliton --config {} --dt 0.05",
            file.path().display()
        ));
        let config = build_config(&cmd).unwrap();
        assert_eq!(config.dt, 0.05, "flag wins");
        assert_eq!(config.h, 0.2, "file fills the gap");
        assert_eq!(config.report_times, vec![0.0, 5.0, 10.0]);
    }

    #[test]
    fn unknown_config_key_is_rejected_with_location() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "p = 2\nwavelength = 3").unwrap();
        let cmd = parse(&format!("maxwellian --config {}", file.path().display()));
        let err = build_config(&cmd).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("wavelength") && msg.contains(":2"),
            "message: {msg}"
        );
    }

    #[test]
    fn exit_codes_separate_usage_from_solver_failures() {
        assert_eq!(exit_code_for(&Error::InvalidConfig("x".into())), 1);
        assert_eq!(exit_code_for(&Error::InvalidTimeGrid("x".into())), 1);
        assert_eq!(exit_code_for(&Error::Diverged { t: 1.0 }), 2);
        assert_eq!(exit_code_for(&Error::SingularMatrix { row: 3 }), 2);
    }
}
