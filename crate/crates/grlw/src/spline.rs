//! Cubic B-spline trial functions and quadratic B-spline weight functions on
//! the unit reference element, plus nodal evaluation of the spline expansion.
//!
//! The numerical field is `u(x) = Σ_j δ_j φ_j(x)` where the cubic B-splines
//! `φ_j` are normalized so that at a node the expansion reduces to the
//! three-term stencil `u_m = δ_{m−1} + 4δ_m + δ_{m+1}`. Each element
//! `[x_m, x_{m+1}]` carries four nonzero trials (`δ_{m−1}..δ_{m+2}`) and three
//! nonzero quadratic weights. All shape evaluations use the dimensionless
//! local coordinate `η = (x − x_m)/h ∈ [0, 1]`.

use crate::error::{Error, Result};

/// Dimensionless reference-element coordinate, guaranteed inside `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalCoordinate(f64);

impl LocalCoordinate {
    pub fn new(eta: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&eta) {
            Ok(LocalCoordinate(eta))
        } else {
            Err(Error::CoordinateOutOfRange { eta })
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Uniform mesh of `n_elements` elements on `[a, b]`, node spacing `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub a: f64,
    pub b: f64,
    pub n_elements: usize,
    pub h: f64,
}

impl Mesh {
    /// Minimum element count: the boundary eliminations at the two ends touch
    /// rows 0..2 and N−2..N, which must not overlap.
    pub const MIN_ELEMENTS: usize = 5;

    pub fn new(a: f64, b: f64, n_elements: usize) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(Error::InvalidMesh(format!(
                "interval [{a}, {b}] is not a finite, nonempty range"
            )));
        }
        if n_elements < Self::MIN_ELEMENTS {
            return Err(Error::InvalidMesh(format!(
                "need at least {} elements, got {n_elements}",
                Self::MIN_ELEMENTS
            )));
        }
        Ok(Mesh {
            a,
            b,
            n_elements,
            h: (b - a) / n_elements as f64,
        })
    }

    /// Builds a mesh from a requested spacing; `(b − a)/h` must be an integer
    /// to within 1e−9 so that experiment parameters tile the interval exactly.
    pub fn with_spacing(a: f64, b: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::InvalidMesh(format!(
                "spacing h = {h} must be positive"
            )));
        }
        let ratio = (b - a) / h;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(Error::InvalidMesh(format!(
                "(b − a)/h = {ratio} is not an integer; h must tile [{a}, {b}]"
            )));
        }
        Self::new(a, b, ratio.round() as usize)
    }

    pub fn n_nodes(&self) -> usize {
        self.n_elements + 1
    }

    /// Coordinate of node `m` (`0 ≤ m ≤ N`).
    pub fn node(&self, m: usize) -> f64 {
        debug_assert!(m <= self.n_elements);
        self.a + m as f64 * self.h
    }
}

/// Coefficients `δ_{−1}..δ_{N+1}` of the cubic B-spline expansion (N+3 values,
/// one per basis function whose support meets `[a, b]`).
#[derive(Debug, Clone, PartialEq)]
pub struct SplineCoefVector {
    /// Storage index `i` holds `δ_{i−1}`.
    values: Vec<f64>,
}

impl SplineCoefVector {
    pub fn zeros(n_elements: usize) -> Self {
        SplineCoefVector {
            values: vec![0.0; n_elements + 3],
        }
    }

    /// Wraps a raw coefficient slice ordered `δ_{−1}, δ_0, ..., δ_{N+1}`.
    pub fn from_values(values: Vec<f64>) -> Self {
        assert!(
            values.len() >= Mesh::MIN_ELEMENTS + 3,
            "coefficient vector must cover at least {} elements",
            Mesh::MIN_ELEMENTS
        );
        SplineCoefVector { values }
    }

    pub fn n_elements(&self) -> usize {
        self.values.len() - 3
    }

    /// Coefficient `δ_j` for `−1 ≤ j ≤ N+1`. Panics on out-of-range `j`.
    pub fn get(&self, j: isize) -> f64 {
        self.values[usize::try_from(j + 1).expect("spline index below -1")]
    }

    pub fn set(&mut self, j: isize, value: f64) {
        self.values[usize::try_from(j + 1).expect("spline index below -1")] = value;
    }

    /// Full backing slice in storage order `δ_{−1}..δ_{N+1}`.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// The reduced unknowns `δ_0..δ_N` (phantom boundary coefficients
    /// excluded), as used by the eliminated stepping system.
    pub fn reduced(&self) -> &[f64] {
        &self.values[1..self.values.len() - 1]
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Values of the four cubic trial shapes `(φ_{m−1}, φ_m, φ_{m+1}, φ_{m+2})`
/// at `η`; they sum to 6 everywhere (the B-spline partition constant).
pub fn cubic_shape_values(eta: LocalCoordinate) -> [f64; 4] {
    let e = eta.value();
    let s = 1.0 - e;
    [
        s * s * s,
        1.0 + 3.0 * s + 3.0 * s * s - 3.0 * s * s * s,
        1.0 + 3.0 * e + 3.0 * e * e - 3.0 * e * e * e,
        e * e * e,
    ]
}

/// First or second η-derivatives of the four cubic shapes, in reference
/// coordinates. Physical derivatives carry an extra `1/h` (order 1) or
/// `1/h²` (order 2); see [`nodal_values`].
pub fn cubic_shape_derivs(eta: LocalCoordinate, order: u32) -> Result<[f64; 4]> {
    let e = eta.value();
    let s = 1.0 - e;
    match order {
        1 => Ok([
            -3.0 * s * s,
            -3.0 - 6.0 * s + 9.0 * s * s,
            3.0 + 6.0 * e - 9.0 * e * e,
            3.0 * e * e,
        ]),
        2 => Ok([6.0 * s, 6.0 - 18.0 * s, 6.0 - 18.0 * e, 6.0 * e]),
        order => Err(Error::UnsupportedDerivativeOrder { order }),
    }
}

/// Values of the three quadratic weight functions `(Φ_{m−1}, Φ_m, Φ_{m+1})`
/// at `η`; they sum to 2 everywhere.
pub fn quadratic_weight_values(eta: LocalCoordinate) -> [f64; 3] {
    let e = eta.value();
    let s = 1.0 - e;
    [s * s, 1.0 + 2.0 * e - 2.0 * e * e, e * e]
}

/// Physical `(u, u_x, u_xx)` at node `m`, from the three-term nodal stencils
/// of the cubic B-spline expansion. Panics if `m` exceeds the node range.
pub fn nodal_values(delta: &SplineCoefVector, mesh: &Mesh, m: usize) -> (f64, f64, f64) {
    assert!(m <= mesh.n_elements, "node index {m} out of range");
    let j = m as isize;
    let (dl, dm, dr) = (delta.get(j - 1), delta.get(j), delta.get(j + 1));
    let u = dl + 4.0 * dm + dr;
    let ux = 3.0 * (-dl + dr) / mesh.h;
    let uxx = 6.0 * (dl - 2.0 * dm + dr) / (mesh.h * mesh.h);
    (u, ux, uxx)
}

/// Evaluates the spline expansion at an arbitrary `x ∈ [a, b]`.
///
/// `x = b` maps to the last element with `η = 1` (elements are half-open with
/// a closed right end at the domain boundary).
pub fn evaluate_spline(delta: &SplineCoefVector, mesh: &Mesh, x: f64) -> Result<f64> {
    if x < mesh.a || x > mesh.b || !x.is_finite() {
        return Err(Error::PointOutsideMesh {
            x,
            a: mesh.a,
            b: mesh.b,
        });
    }
    let raw = (x - mesh.a) / mesh.h;
    let m = (raw.floor() as usize).min(mesh.n_elements - 1);
    // Clamp against roundoff so the local coordinate stays in [0, 1].
    let eta = LocalCoordinate::new((raw - m as f64).clamp(0.0, 1.0))?;
    let shapes = cubic_shape_values(eta);
    let j = m as isize;
    Ok(shapes[0] * delta.get(j - 1)
        + shapes[1] * delta.get(j)
        + shapes[2] * delta.get(j + 1)
        + shapes[3] * delta.get(j + 2))
}
