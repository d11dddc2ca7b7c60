//! Constant 3×4 element matrices of the Petrov–Galerkin weak form and the
//! scalar coefficients λ (lumped nonlinearity) and β (dispersion).
//!
//! Rows index the three quadratic weight functions of an element, columns the
//! four cubic trial functions. On the reference element:
//!
//! * `A_ij = ∫₀¹ Φ_i φ_j dη`          (time derivative / mass)
//! * `B_ij = ∫₀¹ Φ_i′ φ_j′ dη`        (dispersion, after integration by parts)
//! * `C_ij = [Φ_i φ_j′]₀¹`            (dispersion boundary flux of the same integration by parts)
//! * `D_ij = ∫₀¹ Φ_i φ_j′ dη`         (advection and lumped nonlinear transport)
//!
//! All four are rational and frozen here exactly; the unit tests check every
//! entry against an independent Gauss–Legendre quadrature oracle.

use crate::error::{Error, Result};
use crate::spline::SplineCoefVector;

/// The four constant element matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct ElementMatrices {
    pub a: [[f64; 4]; 3],
    pub b: [[f64; 4]; 3],
    pub c: [[f64; 4]; 3],
    pub d: [[f64; 4]; 3],
}

/// Physical parameters of the generalized regularized long wave equation
/// `u_t + u_x + p(p+1) uᵖ u_x − μ u_xxt = 0` plus the solitary-wave
/// parameters (speed `c + 1`, initial peak `x0`) used by the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub p: u32,
    pub mu: f64,
    pub c: f64,
    pub x0: f64,
}

impl ModelParams {
    pub fn new(p: u32, mu: f64, c: f64, x0: f64) -> Result<Self> {
        if p < 1 {
            return Err(Error::InvalidParams(
                "nonlinearity power p must be ≥ 1".into(),
            ));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(Error::InvalidParams(format!(
                "dispersion coefficient mu = {mu} must be positive"
            )));
        }
        if !(c.is_finite() && x0.is_finite()) {
            return Err(Error::InvalidParams("c and x0 must be finite".into()));
        }
        Ok(ModelParams { p, mu, c, x0 })
    }
}

/// Returns the frozen element matrices.
///
/// `A[2][1] = 38/60`: exact integration of `Φ₃ φ₂` (the matrix is
/// centro-symmetric, mirroring `A[0][2]`), confirmed by the quadrature oracle
/// in the tests.
pub fn element_matrices() -> ElementMatrices {
    ElementMatrices {
        a: [
            [10.0 / 60.0, 71.0 / 60.0, 38.0 / 60.0, 1.0 / 60.0],
            [19.0 / 60.0, 221.0 / 60.0, 221.0 / 60.0, 19.0 / 60.0],
            [1.0 / 60.0, 38.0 / 60.0, 71.0 / 60.0, 10.0 / 60.0],
        ],
        b: [
            [3.0 / 2.0, 5.0 / 2.0, -7.0 / 2.0, -1.0 / 2.0],
            [-1.0, 1.0, 1.0, -1.0],
            [-1.0 / 2.0, -7.0 / 2.0, 5.0 / 2.0, 3.0 / 2.0],
        ],
        c: [
            [3.0, 0.0, -3.0, 0.0],
            [3.0, -3.0, -3.0, 3.0],
            [0.0, -3.0, 0.0, 3.0],
        ],
        d: [
            [-6.0 / 10.0, -7.0 / 10.0, 12.0 / 10.0, 1.0 / 10.0],
            [-13.0 / 10.0, -41.0 / 10.0, 41.0 / 10.0, 13.0 / 10.0],
            [-1.0 / 10.0, -12.0 / 10.0, 7.0 / 10.0, 6.0 / 10.0],
        ],
    }
}

/// Integer power by repeated multiplication; exact operation sequence for the
/// small `p` used here, defined for negative bases.
fn int_pow(x: f64, p: u32) -> f64 {
    let mut r = 1.0;
    for _ in 0..p {
        r *= x;
    }
    r
}

/// Lumped transport coefficient `λ = (1 + p(p+1) ûᵖ)/h` on element `m`,
/// with `û = (u_m + u_{m+1})/2` from the nodal values at the element's ends.
/// The constant 1 carries the linear advection term; the rest linearizes the
/// nonlinear flux at the lumped element value.
pub fn lumped_lambda(delta: &SplineCoefVector, m: usize, params: &ModelParams, h: f64) -> f64 {
    assert!(m < delta.n_elements(), "element index {m} out of range");
    let j = m as isize;
    let u_left = delta.get(j - 1) + 4.0 * delta.get(j) + delta.get(j + 1);
    let u_right = delta.get(j) + 4.0 * delta.get(j + 1) + delta.get(j + 2);
    let u_hat = 0.5 * (u_left + u_right);
    let pp1 = (params.p * (params.p + 1)) as f64;
    (1.0 + pp1 * int_pow(u_hat, params.p)) / h
}

/// Dispersion coefficient `β = μ/h²`.
pub fn beta(mu: f64, h: f64) -> f64 {
    assert!(h > 0.0, "element width h = {h} must be positive");
    mu / (h * h)
}
