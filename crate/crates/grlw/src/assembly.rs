//! Global assembly of the Crank–Nicolson stepping system, boundary
//! elimination, and the initial-condition fit.
//!
//! Each time step solves
//!
//! ```text
//! [A + β(B − C) + (Δt/2) λ D] δ^{n+1} = [A + β(B − C) − (Δt/2) λ D] δ^n
//! ```
//!
//! assembled element by element (λ varies per element through the lumped
//! nonlinearity). Every weight-function row `m` touches the six trials
//! `δ_{m−2}..δ_{m+3}`; with uniform λ the interior rows collapse to the
//! closed-form six-term γ stencil. Homogeneous Dirichlet conditions eliminate
//! the phantom coefficients `δ_{−1} = −4δ_0 − δ_1` and
//! `δ_{N+1} = −4δ_N − δ_{N−1}`, leaving an (N+1)×(N+1) banded system with
//! bandwidths (2, 3).

use crate::banded::{banded_lu_solve, BandedMatrix};
use crate::element::{beta, element_matrices, lumped_lambda, ModelParams};
use crate::error::Result;
use crate::spline::{Mesh, SplineCoefVector};

/// One interior row of the stepping system for uniform λ: the implicit-side
/// coefficients `γ₁..γ₆` of `δ_{m−2}..δ_{m+3}`, and the explicit side, which
/// is exactly the reversed row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaStencil {
    pub implicit: [f64; 6],
    pub explicit: [f64; 6],
}

impl GammaStencil {
    pub fn new(beta: f64, lambda: f64, dt: f64) -> Self {
        let t = lambda * dt / 20.0;
        let m1 = 1.0 / 60.0 - beta / 2.0;
        let m2 = 57.0 / 60.0 - 4.5 * beta;
        let m3 = 302.0 / 60.0 + 5.0 * beta;
        let implicit = [
            m1 - t,
            m2 - 25.0 * t,
            m3 - 40.0 * t,
            m3 + 40.0 * t,
            m2 + 25.0 * t,
            m1 + t,
        ];
        let explicit = [
            m1 + t,
            m2 + 25.0 * t,
            m3 + 40.0 * t,
            m3 - 40.0 * t,
            m2 - 25.0 * t,
            m1 - t,
        ];
        GammaStencil { implicit, explicit }
    }
}

/// The Dirichlet eliminations `δ_{−1} = −4δ_0 − δ_1` and
/// `δ_{N+1} = −4δ_N − δ_{N−1}` (both follow from `u = 0` at the ends via the
/// nodal stencil `δ_{m−1} + 4δ_m + δ_{m+1}`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryElimination;

impl BoundaryElimination {
    pub fn phantom_left(delta0: f64, delta1: f64) -> f64 {
        -4.0 * delta0 - delta1
    }

    pub fn phantom_right(delta_nm1: f64, delta_n: f64) -> f64 {
        -4.0 * delta_n - delta_nm1
    }

    /// Rebuilds the full coefficient vector `δ_{−1}..δ_{N+1}` from the
    /// reduced unknowns `δ_0..δ_N`.
    pub fn expand(&self, reduced: &[f64]) -> SplineCoefVector {
        assert!(
            reduced.len() > Mesh::MIN_ELEMENTS,
            "reduced vector too short"
        );
        let n = reduced.len();
        let mut values = Vec::with_capacity(n + 2);
        values.push(Self::phantom_left(reduced[0], reduced[1]));
        values.extend_from_slice(reduced);
        values.push(Self::phantom_right(reduced[n - 2], reduced[n - 1]));
        SplineCoefVector::from_values(values)
    }
}

/// Stepping system before boundary elimination: row `m` holds the six
/// stencil coefficients of `δ_{m−2}..δ_{m+3}` (entries reaching past the
/// coefficient range are identically zero).
#[derive(Debug, Clone)]
pub struct RawStepSystem {
    pub n_elements: usize,
    pub implicit_rows: Vec<[f64; 6]>,
    pub explicit_rows: Vec<[f64; 6]>,
}

/// Reduced (N+1)×(N+1) stepping system.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub lhs: BandedMatrix,
    pub rhs_matrix: BandedMatrix,
    pub elimination: BoundaryElimination,
}

/// Assembles the raw per-row stencils by direct summation of element
/// contributions, with λ evaluated on each element from `delta_star`.
/// Elements beyond the ends do not exist, so rows 0 and N simply receive
/// fewer contributions.
pub fn assemble_raw_rows(
    delta_star: &SplineCoefVector,
    params: &ModelParams,
    mesh: &Mesh,
    dt: f64,
) -> RawStepSystem {
    let n = mesh.n_elements;
    assert_eq!(
        delta_star.n_elements(),
        n,
        "coefficient vector does not match mesh"
    );
    let em = element_matrices();
    let b = beta(params.mu, mesh.h);
    let mut implicit_rows = vec![[0.0; 6]; n + 1];
    let mut explicit_rows = vec![[0.0; 6]; n + 1];
    for e in 0..n {
        let lam = lumped_lambda(delta_star, e, params, mesh.h);
        for i in 0..3 {
            let r = e as isize - 1 + i as isize;
            if r < 0 || r > n as isize {
                continue;
            }
            let r = r as usize;
            // Trial j addresses δ_{e−1+j}; its slot in row r's stencil over
            // δ_{r−2}..δ_{r+3} is (e−1+j) − (r−2).
            let base = e + 1 - r; // = (e−1) − (r−2), always in 0..=2
            for j in 0..4 {
                let mass = em.a[i][j] + b * (em.b[i][j] - em.c[i][j]);
                let transport = 0.5 * dt * lam * em.d[i][j];
                implicit_rows[r][base + j] += mass + transport;
                explicit_rows[r][base + j] += mass - transport;
            }
        }
    }
    RawStepSystem {
        n_elements: n,
        implicit_rows,
        explicit_rows,
    }
}

/// Folds the phantom-coefficient columns of a raw system into the reduced
/// (N+1)×(N+1) banded pair.
pub fn apply_boundary_elimination(raw: &RawStepSystem) -> GlobalSystem {
    let n = raw.n_elements;
    let mut lhs = BandedMatrix::zeros(n + 1, 2, 3);
    let mut rhs_matrix = BandedMatrix::zeros(n + 1, 2, 3);
    let fold = |matrix: &mut BandedMatrix, rows: &[[f64; 6]]| {
        for (m, row) in rows.iter().enumerate() {
            for (pos, &v) in row.iter().enumerate() {
                if v == 0.0 {
                    continue;
                }
                let t = m as isize - 2 + pos as isize;
                if t == -1 {
                    matrix.add(m, 0, -4.0 * v);
                    matrix.add(m, 1, -v);
                } else if t == n as isize + 1 {
                    matrix.add(m, n, -4.0 * v);
                    matrix.add(m, n - 1, -v);
                } else {
                    debug_assert!(
                        (0..=n as isize).contains(&t),
                        "stencil entry beyond phantom range"
                    );
                    matrix.add(m, t as usize, v);
                }
            }
        }
    };
    fold(&mut lhs, &raw.implicit_rows);
    fold(&mut rhs_matrix, &raw.explicit_rows);
    GlobalSystem {
        lhs,
        rhs_matrix,
        elimination: BoundaryElimination,
    }
}

/// Assembles the reduced stepping system with λ linearized at `delta_star`.
pub fn assemble_step_system(
    delta_star: &SplineCoefVector,
    params: &ModelParams,
    mesh: &Mesh,
    dt: f64,
) -> GlobalSystem {
    apply_boundary_elimination(&assemble_raw_rows(delta_star, params, mesh, dt))
}

/// Fits the initial coefficients `δ⁰` so the spline interpolates `f` at all
/// nodes with zero end slopes: the (N+3)×(N+3) system whose first and last
/// rows are the end-slope stencils `(−3, 0, 3)` (right-hand side 0) and whose
/// interior rows are the nodal stencils `(1, 4, 1)` with values `f(x_m)`.
pub fn fit_initial_coefficients(f: impl Fn(f64) -> f64, mesh: &Mesh) -> Result<SplineCoefVector> {
    let n = mesh.n_elements;
    let size = n + 3;
    let mut matrix = BandedMatrix::zeros(size, 2, 2);
    let mut rhs = vec![0.0; size];
    matrix.set(0, 0, -3.0);
    matrix.set(0, 2, 3.0);
    for m in 0..=n {
        let row = m + 1;
        matrix.set(row, row - 1, 1.0);
        matrix.set(row, row, 4.0);
        matrix.set(row, row + 1, 1.0);
        rhs[row] = f(mesh.node(m));
    }
    matrix.set(size - 1, size - 3, -3.0);
    matrix.set(size - 1, size - 1, 3.0);
    let sol = banded_lu_solve(&matrix, &rhs)?;
    Ok(SplineCoefVector::from_values(sol.x))
}
