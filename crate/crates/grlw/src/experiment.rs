//! Canned experiments behind the command-line interface: each runs the
//! solver on a standard problem and writes CSV tables into an output
//! directory.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::analytic::{
    maxwellian_initial, nodal_local_maxima, two_soliton_initial, RunDiagnostics, SolitonProfile,
};
use crate::assembly::fit_initial_coefficients;
use crate::element::ModelParams;
use crate::error::{Error, Result};
use crate::integrator::{run, SolverState, TimeParams};
use crate::spline::{evaluate_spline, Mesh, SplineCoefVector};
use crate::stability::{growth_factor, GrowthFactorInputs};

/// Which experiment to run.
#[derive(Debug, Clone, PartialEq)]
pub enum Problem {
    /// Single solitary wave with analytic error norms.
    Soliton,
    /// Two-wave interaction with peak tracking.
    Interaction,
    /// Maxwellian initial data sweep over μ and p.
    Maxwellian,
    /// Von Neumann growth-factor scan.
    Stability { n_samples: usize },
    /// L₂ error under mesh refinement.
    Convergence,
}

/// Fully resolved configuration for one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: Problem,
    pub p: u32,
    pub mu: f64,
    pub c: f64,
    /// Second wave speed (interaction only).
    pub c2: f64,
    pub x0: f64,
    /// Second wave center (interaction only).
    pub x2: f64,
    pub xmin: f64,
    pub xmax: f64,
    pub h: f64,
    pub dt: f64,
    pub t_end: f64,
    pub inner_iterations: usize,
    pub correction_tolerance: f64,
    pub report_times: Vec<f64>,
    pub out_dir: PathBuf,
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(io_err)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents.as_bytes()).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Writes a profile snapshot `x,u` sampled at every node.
fn emit_snapshot(
    out_dir: &Path,
    stem: &str,
    t: f64,
    delta: &SplineCoefVector,
    mesh: &Mesh,
) -> Result<PathBuf> {
    let mut csv = String::from("x,u\n");
    for m in 0..=mesh.n_elements {
        let x = mesh.node(m);
        let u = evaluate_spline(delta, mesh, x).expect("node inside mesh");
        let _ = writeln!(csv, "{:.16e},{:.16e}", x, u);
    }
    let path = out_dir.join(format!("{stem}_t{t}.csv"));
    write_atomic(&path, &csv)?;
    Ok(path)
}

fn format_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x}"))
}

/// Abbreviated run summary returned to the caller for logging.
#[derive(Debug)]
pub struct ExperimentOutcome {
    pub files: Vec<PathBuf>,
    pub diagnostics: Vec<RunDiagnostics>,
}

/// Runs the configured experiment and writes its output files.
///
/// If a solve fails mid-run, the partially collected table is still written
/// (with a trailing `# error:` comment line) before the error is returned.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentOutcome> {
    match &config.problem {
        Problem::Soliton => run_soliton(config),
        Problem::Interaction => run_interaction(config),
        Problem::Maxwellian => run_maxwellian(config),
        Problem::Stability { n_samples } => run_stability(config, *n_samples),
        Problem::Convergence => run_convergence(config),
    }
}

fn time_params(config: &RunConfig) -> TimeParams {
    TimeParams {
        dt: config.dt,
        t_end: config.t_end,
        inner_iterations: config.inner_iterations,
        correction_tolerance: config.correction_tolerance,
        report_times: config.report_times.clone(),
    }
}

fn finish_table(
    path: &Path,
    mut csv: String,
    failure: Option<Error>,
    files: Vec<PathBuf>,
    diagnostics: Vec<RunDiagnostics>,
) -> Result<ExperimentOutcome> {
    if let Some(err) = failure {
        let _ = writeln!(csv, "# error: {err}");
        write_atomic(path, &csv)?;
        return Err(err);
    }
    write_atomic(path, &csv)?;
    let mut all = files;
    all.insert(0, path.to_path_buf());
    Ok(ExperimentOutcome {
        diagnostics,
        files: all,
    })
}

fn run_soliton(config: &RunConfig) -> Result<ExperimentOutcome> {
    let params = ModelParams::new(config.p, config.mu, config.c, config.x0)?;
    let mesh = Mesh::with_spacing(config.xmin, config.xmax, config.h)?;
    let profile = SolitonProfile::new(&params)?;
    let initial = fit_initial_coefficients(|x| profile.eval(x, 0.0), &mesh)?;
    let exact = move |x: f64, t: f64| profile.eval(x, t);
    let tp = time_params(config);

    let mut final_state: Option<SolverState> = None;
    let result = run(&initial, &params, &mesh, &tp, Some(&exact), |state| {
        final_state = Some(state.clone());
    })?;

    let mut csv = String::from("t,i1,i2,i3,l2e3,linfe3,amplitude,peak_x\n");
    for d in &result.diagnostics {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{}",
            d.t,
            d.i1,
            d.i2,
            d.i3,
            format_opt(d.l2.map(|v| v * 1e3)),
            format_opt(d.linf.map(|v| v * 1e3)),
            d.amplitude,
            d.peak_x
        );
    }
    let mut files = Vec::new();
    if result.failure.is_none() {
        if let Some(state) = &final_state {
            files.push(emit_snapshot(
                &config.out_dir,
                "soliton_snapshot",
                state.t,
                &state.delta,
                &mesh,
            )?);
        }
    }
    finish_table(
        &config.out_dir.join("soliton_invariants.csv"),
        csv,
        result.failure,
        files,
        result.diagnostics,
    )
}

fn run_interaction(config: &RunConfig) -> Result<ExperimentOutcome> {
    // The second wave must be the slower one so the faster wave, seeded
    // behind it, overtakes and the waves collide mid-run.
    let params = ModelParams::new(config.p, config.mu, config.c, config.x0)?;
    let mesh = Mesh::with_spacing(config.xmin, config.xmax, config.h)?;
    let c1 = config.c;
    let c2 = config.c2;
    let initial = fit_initial_coefficients(
        |x| two_soliton_initial(x, c1, c2, config.x0, config.x2, config.p, config.mu).unwrap(),
        &mesh,
    )?;
    let tp = time_params(config);

    // Amplitude threshold for counting a nodal maximum as a wave peak:
    // half the smaller wave's amplitude.
    let small_amp = SolitonProfile::new(&ModelParams::new(config.p, config.mu, c2, config.x2)?)?
        .amplitude
        .min(SolitonProfile::new(&params)?.amplitude);
    let threshold = 0.5 * small_amp;

    let mut snapshots = Vec::new();
    let mut peaks_csv = String::from("t,rank,x,u\n");
    let result = run(&initial, &params, &mesh, &tp, None, |state| {
        snapshots.push(state.clone());
        for (rank, (u, x)) in nodal_local_maxima(&state.delta, &mesh, threshold)
            .into_iter()
            .enumerate()
        {
            let _ = writeln!(peaks_csv, "{},{},{},{}", state.t, rank + 1, x, u);
        }
    })?;

    let mut csv = String::from("t,i1,i2,i3,amplitude,peak_x\n");
    for d in &result.diagnostics {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{}",
            d.t, d.i1, d.i2, d.i3, d.amplitude, d.peak_x
        );
    }
    let mut files = Vec::new();
    if result.failure.is_none() {
        for state in &snapshots {
            files.push(emit_snapshot(
                &config.out_dir,
                "interaction_snapshot",
                state.t,
                &state.delta,
                &mesh,
            )?);
        }
        let peaks_path = config.out_dir.join("interaction_peaks.csv");
        write_atomic(&peaks_path, &peaks_csv)?;
        files.push(peaks_path);
    }
    finish_table(
        &config.out_dir.join("interaction_invariants.csv"),
        csv,
        result.failure,
        files,
        result.diagnostics,
    )
}

/// μ and p values swept by the Maxwellian experiment when not restricted on
/// the command line.
pub const MAXWELLIAN_MU_SWEEP: [f64; 3] = [0.1, 0.05, 0.025];
pub const MAXWELLIAN_P_SWEEP: [u32; 3] = [2, 3, 4];

fn run_maxwellian(config: &RunConfig) -> Result<ExperimentOutcome> {
    let mesh = Mesh::with_spacing(config.xmin, config.xmax, config.h)?;
    let tp = time_params(config);
    let mut csv = String::from("p,mu,t,i1,i2,i3\n");
    let mut diagnostics = Vec::new();
    let path = config.out_dir.join("maxwellian_invariants.csv");
    for &p in &MAXWELLIAN_P_SWEEP {
        if config.p != 0 && p != config.p {
            continue;
        }
        for &mu in &MAXWELLIAN_MU_SWEEP {
            if config.mu != 0.0 && (mu - config.mu).abs() > 1e-12 {
                continue;
            }
            // c is irrelevant here (no analytic wave); any valid value works.
            let params = ModelParams::new(p, mu, 1.0, config.x0)?;
            let initial = fit_initial_coefficients(maxwellian_initial, &mesh)?;
            let result = run(&initial, &params, &mesh, &tp, None, |_| {})?;
            for d in &result.diagnostics {
                let _ = writeln!(csv, "{},{},{},{},{},{}", p, mu, d.t, d.i1, d.i2, d.i3);
            }
            diagnostics.extend(result.diagnostics);
            if let Some(err) = result.failure {
                return finish_table(&path, csv, Some(err), Vec::new(), diagnostics);
            }
        }
    }
    finish_table(&path, csv, None, Vec::new(), diagnostics)
}

fn run_stability(config: &RunConfig, n_samples: usize) -> Result<ExperimentOutcome> {
    let beta = config.mu / (config.h * config.h);
    // Freeze λ at the crest of the reference soliton: û = amplitude.
    let params = ModelParams::new(config.p, config.mu, config.c, config.x0)?;
    let amplitude = SolitonProfile::new(&params)?.amplitude;
    let u_pow = amplitude.powi(config.p as i32);
    let lambda_bar = (1.0 + (config.p * (config.p + 1)) as f64 * u_pow) / config.h;

    let mut csv = String::from("theta,re_g,im_g,abs_g\n");
    for k in 0..n_samples {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / n_samples as f64;
        let inputs = GrowthFactorInputs {
            theta,
            beta,
            lambda_bar,
            dt: config.dt,
            h: config.h,
        };
        match growth_factor(&inputs) {
            Ok(g) => {
                let _ = writeln!(csv, "{},{},{},{}", theta, g.re, g.im, g.norm());
            }
            Err(Error::DegenerateMode) => {
                let _ = writeln!(csv, "# theta = {theta}: degenerate mode skipped");
            }
            Err(e) => return Err(e),
        }
    }
    let path = config.out_dir.join("stability_scan.csv");
    write_atomic(&path, &csv)?;
    Ok(ExperimentOutcome {
        files: vec![path],
        diagnostics: Vec::new(),
    })
}

fn run_convergence(config: &RunConfig) -> Result<ExperimentOutcome> {
    let params = ModelParams::new(config.p, config.mu, config.c, config.x0)?;
    let profile = SolitonProfile::new(&params)?;
    let exact = move |x: f64, t: f64| profile.eval(x, t);

    let mut csv = String::from("h,l2,observed_order\n");
    let mut prev: Option<(f64, f64)> = None;
    let path = config.out_dir.join("convergence.csv");
    for level in 0..3 {
        let factor = f64::powi(2.0, level);
        let h = config.h / factor;
        // Refine dt with h so the spatial rate is not polluted once the
        // temporal error catches up.
        let dt = config.dt / factor;
        let mesh = Mesh::with_spacing(config.xmin, config.xmax, h)?;
        let initial = fit_initial_coefficients(|x| profile.eval(x, 0.0), &mesh)?;
        let tp = TimeParams {
            dt,
            t_end: config.t_end,
            inner_iterations: config.inner_iterations,
            correction_tolerance: config.correction_tolerance,
            report_times: vec![config.t_end],
        };
        let result = run(&initial, &params, &mesh, &tp, Some(&exact), |_| {})?;
        if let Some(err) = result.failure {
            let _ = writeln!(csv, "# error: {err}");
            write_atomic(&path, &csv)?;
            return Err(err);
        }
        let l2 = result
            .diagnostics
            .last()
            .and_then(|d| d.l2)
            .unwrap_or(f64::NAN);
        let order = prev.map(|(ph, pl2)| (pl2 / l2).log2() / (ph / h).log2());
        let _ = writeln!(
            csv,
            "{},{},{}",
            h,
            l2,
            order.map_or_else(String::new, |o| format!("{o}"))
        );
        prev = Some((h, l2));
    }
    write_atomic(&path, &csv)?;
    Ok(ExperimentOutcome {
        files: vec![path],
        diagnostics: Vec::new(),
    })
}
