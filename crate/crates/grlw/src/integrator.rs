//! Crank–Nicolson time stepping with iterative re-linearization of the
//! lumped nonlinear coefficient λ.
//!
//! Each step performs `inner_iterations` assemble-and-solve passes. The
//! first pass linearizes λ at the current state `δⁿ`; every further pass
//! re-linearizes at the Crank–Nicolson midpoint `(δⁿ + δ̂^{n+1})/2` of the
//! latest iterate and re-solves. The default of two total passes is the
//! variant whose error levels the reference single-soliton tables report;
//! stronger nonlinearities (`p ≥ 3`) and wave collisions profit from more
//! passes, optionally with an early-exit tolerance (see
//! [`TimeParams::correction_tolerance`]).

use crate::analytic::{error_norms, invariants, nodal_peak, RunDiagnostics};
use crate::assembly::assemble_step_system;
use crate::banded::{banded_lu_solve, banded_matvec};
use crate::element::ModelParams;
use crate::error::{Error, Result};
use crate::spline::{Mesh, SplineCoefVector};

/// Default number of assemble-and-solve passes per step.
pub const DEFAULT_INNER_ITERATIONS: usize = 2;

/// Time-stepping parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeParams {
    pub dt: f64,
    pub t_end: f64,
    /// Total assemble-and-solve passes per step (≥ 1).
    pub inner_iterations: usize,
    /// Early exit for the re-linearization passes: once two successive
    /// iterates agree to this absolute tolerance the step stops iterating.
    /// Zero disables the early exit (fixed pass count).
    pub correction_tolerance: f64,
    /// Times at which diagnostics are collected; must be sorted and lie on
    /// the step grid.
    pub report_times: Vec<f64>,
}

impl TimeParams {
    pub fn new(dt: f64, t_end: f64) -> Self {
        TimeParams {
            dt,
            t_end,
            inner_iterations: DEFAULT_INNER_ITERATIONS,
            correction_tolerance: 0.0,
            report_times: Vec::new(),
        }
    }
}

/// Evolving solver state.
#[derive(Debug, Clone)]
pub struct SolverState {
    pub t: f64,
    pub delta: SplineCoefVector,
}

fn step_failure(t: f64, source: Error) -> Error {
    Error::StepFailed {
        t,
        source: Box::new(source),
    }
}

/// Elementwise midpoint of two coefficient vectors.
fn midpoint(a: &SplineCoefVector, b: &SplineCoefVector) -> SplineCoefVector {
    let values = a
        .as_slice()
        .iter()
        .zip(b.as_slice())
        .map(|(x, y)| 0.5 * (x + y))
        .collect();
    SplineCoefVector::from_values(values)
}

/// Advances the state by one time step of `tp.dt`.
pub fn step(
    state: &mut SolverState,
    params: &ModelParams,
    mesh: &Mesh,
    tp: &TimeParams,
) -> Result<()> {
    assert!(tp.inner_iterations >= 1, "at least one solve pass per step");
    let t = state.t;
    let reduced_n = state.delta.reduced().to_vec();

    // Pass 1: linearize λ at δⁿ.
    let mut sys = assemble_step_system(&state.delta, params, mesh, tp.dt);
    let rhs = banded_matvec(&sys.rhs_matrix, &reduced_n).map_err(|e| step_failure(t, e))?;
    let mut iterate = banded_lu_solve(&sys.lhs, &rhs)
        .map_err(|e| step_failure(t, e))?
        .x;

    // Further passes: re-linearize at the Crank–Nicolson midpoint.
    for _ in 1..tp.inner_iterations {
        let mid = midpoint(&state.delta, &sys.elimination.expand(&iterate));
        sys = assemble_step_system(&mid, params, mesh, tp.dt);
        let rhs = banded_matvec(&sys.rhs_matrix, &reduced_n).map_err(|e| step_failure(t, e))?;
        let next = banded_lu_solve(&sys.lhs, &rhs)
            .map_err(|e| step_failure(t, e))?
            .x;
        let change = iterate
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        iterate = next;
        if tp.correction_tolerance > 0.0 && change < tp.correction_tolerance {
            break;
        }
    }

    let full = sys.elimination.expand(&iterate);
    if !full.is_finite() {
        return Err(Error::Diverged { t: t + tp.dt });
    }
    state.delta = full;
    state.t = t + tp.dt;
    Ok(())
}

/// Diagnostics plus, when the run aborted early, the error that stopped it.
#[derive(Debug)]
pub struct RunResult {
    pub diagnostics: Vec<RunDiagnostics>,
    /// `Some` if a step failed; the diagnostics collected up to that point
    /// are preserved.
    pub failure: Option<Error>,
}

/// Exact solution used for error norms, as a function of `(x, t)`.
pub type ExactSolution<'a> = &'a dyn Fn(f64, f64) -> f64;

fn collect(
    state: &SolverState,
    mesh: &Mesh,
    params: &ModelParams,
    exact: Option<ExactSolution>,
    t: f64,
) -> RunDiagnostics {
    let (i1, i2, i3) = invariants(&state.delta, mesh, params.mu);
    let (amplitude, peak_x) = nodal_peak(&state.delta, mesh);
    let (l2, linf) = match exact {
        Some(f) => {
            let (l2, linf) = error_norms(&state.delta, mesh, |x| f(x, t));
            (Some(l2), Some(linf))
        }
        None => (None, None),
    };
    RunDiagnostics {
        t,
        i1,
        i2,
        i3,
        l2,
        linf,
        amplitude,
        peak_x,
    }
}

/// Steps from `t = 0` to `tp.t_end`, collecting diagnostics and invoking
/// `observer` at every report time.
///
/// Returns `Err` for invalid time-grid configuration; solver failures during
/// the run are reported through [`RunResult::failure`] with the diagnostics
/// gathered so far preserved.
pub fn run(
    initial: &SplineCoefVector,
    params: &ModelParams,
    mesh: &Mesh,
    tp: &TimeParams,
    exact: Option<ExactSolution>,
    mut observer: impl FnMut(&SolverState),
) -> Result<RunResult> {
    if !(tp.dt.is_finite() && tp.dt > 0.0) {
        return Err(Error::InvalidTimeGrid(format!(
            "dt = {} must be positive",
            tp.dt
        )));
    }
    if tp.inner_iterations < 1 {
        return Err(Error::InvalidTimeGrid(
            "inner_iterations must be at least 1 (total solve passes per step)".into(),
        ));
    }
    if !(tp.t_end.is_finite() && tp.t_end >= 0.0) {
        return Err(Error::InvalidTimeGrid(format!(
            "t_end = {} must be nonnegative",
            tp.t_end
        )));
    }
    let ratio = tp.t_end / tp.dt;
    if (ratio - ratio.round()).abs() > 1e-9 {
        return Err(Error::InvalidTimeGrid(format!(
            "t_end/dt = {ratio} is not an integer; t_end must be a multiple of dt"
        )));
    }
    let steps = ratio.round() as usize;

    // Map report times onto step indices.
    let mut report_steps = Vec::with_capacity(tp.report_times.len());
    let mut prev = f64::NEG_INFINITY;
    for &rt in &tp.report_times {
        if rt < prev {
            return Err(Error::InvalidTimeGrid(format!(
                "report times must be sorted, got {rt} after {prev}"
            )));
        }
        prev = rt;
        if rt < 0.0 || rt > tp.t_end + 1e-9 {
            return Err(Error::InvalidTimeGrid(format!(
                "report time {rt} outside [0, {}]",
                tp.t_end
            )));
        }
        let steps_in = rt / tp.dt;
        if (steps_in - steps_in.round()).abs() > 1e-6 {
            return Err(Error::InvalidTimeGrid(format!(
                "report time {rt} does not lie on the dt = {} step grid",
                tp.dt
            )));
        }
        report_steps.push(steps_in.round() as usize);
    }

    let mut state = SolverState {
        t: 0.0,
        delta: initial.clone(),
    };
    let mut diagnostics = Vec::new();
    let mut next_report = 0;
    let mut emit = |k: usize, state: &mut SolverState, diagnostics: &mut Vec<RunDiagnostics>| {
        while next_report < report_steps.len() && report_steps[next_report] == k {
            // Observers see the requested report time, not the accumulated
            // grid product (3·0.1 ≠ 0.3 in floating point).
            let rt = tp.report_times[next_report];
            state.t = rt;
            diagnostics.push(collect(state, mesh, params, exact, rt));
            observer(state);
            next_report += 1;
        }
    };

    emit(0, &mut state, &mut diagnostics);
    for k in 0..steps {
        if let Err(e) = step(&mut state, params, mesh, tp) {
            return Ok(RunResult {
                diagnostics,
                failure: Some(e),
            });
        }
        // Pin the clock to the grid; accumulation drift would desynchronize
        // report matching on long runs.
        state.t = (k + 1) as f64 * tp.dt;
        emit(k + 1, &mut state, &mut diagnostics);
    }
    Ok(RunResult {
        diagnostics,
        failure: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::SolitonProfile;
    use crate::assembly::fit_initial_coefficients;
    use approx::assert_abs_diff_eq;

    fn p2_setup() -> (Mesh, ModelParams, SplineCoefVector) {
        let mesh = Mesh::with_spacing(0.0, 100.0, 0.2).unwrap();
        let params = ModelParams::new(2, 1.0, 1.0, 40.0).unwrap();
        let profile = SolitonProfile::new(&params).unwrap();
        let delta = fit_initial_coefficients(|x| profile.eval(x, 0.0), &mesh).unwrap();
        (mesh, params, delta)
    }

    // --- fixed points and exactness ---

    #[test]
    fn zero_state_is_an_exact_fixed_point() {
        let mesh = Mesh::new(0.0, 10.0, 50).unwrap();
        let params = ModelParams::new(2, 1.0, 1.0, 5.0).unwrap();
        let tp = TimeParams::new(0.1, 1.0);
        let mut state = SolverState {
            t: 0.0,
            delta: SplineCoefVector::zeros(50),
        };
        for _ in 0..10 {
            step(&mut state, &params, &mesh, &tp).unwrap();
        }
        // Bitwise zero: the right-hand side is exactly zero, and triangular
        // solves of a zero vector stay zero.
        assert!(state.delta.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn boundary_values_stay_zero_after_steps() {
        let (mesh, params, delta) = p2_setup();
        let tp = TimeParams::new(0.025, 1.0);
        let mut state = SolverState { t: 0.0, delta };
        for _ in 0..8 {
            step(&mut state, &params, &mesh, &tp).unwrap();
        }
        let ua = crate::spline::nodal_values(&state.delta, &mesh, 0).0;
        let ub = crate::spline::nodal_values(&state.delta, &mesh, mesh.n_elements).0;
        assert_abs_diff_eq!(ua, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(ub, 0.0, epsilon = 1e-13);
    }

    // --- reversibility of the linearized scheme ---

    #[test]
    fn frozen_lambda_step_is_time_reversible() {
        use crate::assembly::assemble_step_system;
        let (mesh, params, delta) = p2_setup();
        let dt = 0.025;
        // Forward step with λ frozen at δ⁰; stepping backward swaps the
        // implicit and explicit matrices of the same system.
        let sys = assemble_step_system(&delta, &params, &mesh, dt);
        let fwd_rhs = banded_matvec(&sys.rhs_matrix, delta.reduced()).unwrap();
        let fwd = banded_lu_solve(&sys.lhs, &fwd_rhs).unwrap().x;
        let bwd_rhs = banded_matvec(&sys.lhs, &fwd).unwrap();
        let back = banded_lu_solve(&sys.rhs_matrix, &bwd_rhs).unwrap().x;
        for (a, b) in back.iter().zip(delta.reduced()) {
            // 1e-10: two solves of well-conditioned banded systems.
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    // --- inner iteration self-convergence ---

    #[test]
    fn extra_inner_pass_converges_cubically_in_dt() {
        let (mesh, params, delta) = p2_setup();
        let diff_for = |dt: f64| {
            let mut two_pass = SolverState {
                t: 0.0,
                delta: delta.clone(),
            };
            let mut tp = TimeParams::new(dt, dt);
            tp.inner_iterations = 2;
            step(&mut two_pass, &params, &mesh, &tp).unwrap();

            let mut converged = SolverState {
                t: 0.0,
                delta: delta.clone(),
            };
            tp.inner_iterations = 60;
            tp.correction_tolerance = 1e-14;
            step(&mut converged, &params, &mesh, &tp).unwrap();

            two_pass
                .delta
                .as_slice()
                .iter()
                .zip(converged.delta.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let d1 = diff_for(0.05);
        let d2 = diff_for(0.025);
        let d3 = diff_for(0.0125);
        let order_12 = (d1 / d2).log2();
        let order_23 = (d2 / d3).log2();
        // The distance from the two-pass iterate to the fixed point shrinks
        // like Δt³ (one contraction factor of O(Δt) on an O(Δt²) start).
        assert!(
            order_12 > 2.5 && order_23 > 2.5,
            "orders {order_12:.2}, {order_23:.2} below cubic"
        );
    }

    // --- run driver ---

    #[test]
    fn zero_t_end_reports_initial_diagnostics_only() {
        let (mesh, params, delta) = p2_setup();
        let mut tp = TimeParams::new(0.025, 0.0);
        tp.report_times = vec![0.0];
        let result = run(&delta, &params, &mesh, &tp, None, |_| {}).unwrap();
        assert!(result.failure.is_none());
        assert_eq!(result.diagnostics.len(), 1);
        assert_eq!(result.diagnostics[0].t, 0.0);
        assert_abs_diff_eq!(result.diagnostics[0].amplitude, 1.0, epsilon = 1e-4);
    }

    #[test]
    fn observer_fires_once_per_report_time() {
        let (mesh, params, delta) = p2_setup();
        let mut tp = TimeParams::new(0.025, 0.5);
        tp.report_times = vec![0.0, 0.25, 0.5];
        let mut calls = 0;
        let result = run(&delta, &params, &mesh, &tp, None, |_| calls += 1).unwrap();
        assert!(result.failure.is_none());
        assert_eq!(calls, 3);
        assert_eq!(result.diagnostics.len(), 3);
        let times: Vec<f64> = result.diagnostics.iter().map(|d| d.t).collect();
        assert_eq!(times, vec![0.0, 0.25, 0.5]);
    }

    #[test]
    fn misaligned_grids_are_rejected() {
        let (mesh, params, delta) = p2_setup();
        // t_end not a multiple of dt.
        let tp = TimeParams::new(0.3, 1.0);
        assert!(matches!(
            run(&delta, &params, &mesh, &tp, None, |_| {}),
            Err(Error::InvalidTimeGrid(_))
        ));
        // Report time off the step grid.
        let mut tp = TimeParams::new(0.25, 1.0);
        tp.report_times = vec![0.1];
        assert!(matches!(
            run(&delta, &params, &mesh, &tp, None, |_| {}),
            Err(Error::InvalidTimeGrid(_))
        ));
        // Unsorted report times.
        let mut tp = TimeParams::new(0.25, 1.0);
        tp.report_times = vec![0.5, 0.25];
        assert!(matches!(
            run(&delta, &params, &mesh, &tp, None, |_| {}),
            Err(Error::InvalidTimeGrid(_))
        ));
    }

    #[test]
    fn non_finite_state_reports_divergence() {
        let (mesh, params, _) = p2_setup();
        let mut bad = SplineCoefVector::zeros(mesh.n_elements);
        bad.set(10, f64::NAN);
        let tp = TimeParams::new(0.025, 0.025);
        let result = run(&bad, &params, &mesh, &tp, None, |_| {}).unwrap();
        match result.failure {
            Some(Error::Diverged { .. }) | Some(Error::StepFailed { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn short_soliton_run_keeps_error_small() {
        let (mesh, params, delta) = p2_setup();
        let profile = SolitonProfile::new(&params).unwrap();
        let exact = move |x: f64, t: f64| profile.eval(x, t);
        let mut tp = TimeParams::new(0.025, 1.0);
        tp.report_times = vec![1.0];
        let result = run(&delta, &params, &mesh, &tp, Some(&exact), |_| {}).unwrap();
        assert!(result.failure.is_none());
        let d = &result.diagnostics[0];
        // The error of this configuration climbs to ≈1.9e-3 by t = 2 and
        // saturates near 2.4e-3 by t = 10; at t = 1 it measures ≈1.28e-3.
        assert!(d.l2.unwrap() < 1.5e-3, "L2 = {:?}", d.l2);
        assert!(d.linf.unwrap() < 1.5e-3);
        assert_abs_diff_eq!(d.amplitude, 1.0, epsilon = 5e-3);
        assert_abs_diff_eq!(d.peak_x, 42.0, epsilon = 0.2 + 1e-12);
    }
}
