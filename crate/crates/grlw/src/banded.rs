//! Banded matrix storage, matrix–vector products, and direct solution by
//! banded LU without pivoting (the Thomas algorithm generalized to wider
//! bands).
//!
//! The stepping systems assembled elsewhere in this crate are strongly
//! diagonally dominant, so unpivoted elimination is stable there and keeps
//! the factorization inside the original band (no fill-in). A pivot below
//! tolerance aborts with [`Error::SingularMatrix`] rather than returning
//! garbage.

use crate::error::{Error, Result};

/// Square banded matrix with `kl` sub- and `ku` superdiagonals.
///
/// Diagonal-major dense storage: entry `(i, j)` with `−kl ≤ j − i ≤ ku` lives
/// at `bands[(ku + i − j) * n + j]`; everything outside the band is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct BandedMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    bands: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0, "matrix dimension must be positive");
        BandedMatrix {
            n,
            kl,
            ku,
            bands: vec![0.0; (kl + ku + 1) * n],
        }
    }

    pub fn identity(n: usize, kl: usize, ku: usize) -> Self {
        let mut m = Self::zeros(n, kl, ku);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kl(&self) -> usize {
        self.kl
    }

    pub fn ku(&self) -> usize {
        self.ku
    }

    fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && i + self.ku >= j
    }

    fn slot(&self, i: usize, j: usize) -> usize {
        (self.ku + i - j) * self.n + j
    }

    /// Entry `(i, j)`; implicit zeros outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index ({i}, {j}) out of range");
        if self.in_band(i, j) {
            self.bands[self.slot(i, j)]
        } else {
            0.0
        }
    }

    /// Sets entry `(i, j)`. Panics outside the band: the assembly routines
    /// must never generate out-of-band coefficients.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={}, ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j);
        self.bands[s] = value;
    }

    pub fn add(&mut self, i: usize, j: usize, value: f64) {
        assert!(
            self.in_band(i, j),
            "entry ({i}, {j}) outside band kl={}, ku={}",
            self.kl,
            self.ku
        );
        let s = self.slot(i, j);
        self.bands[s] += value;
    }
}

/// `y = M x` over the stored band only.
#[allow(clippy::needless_range_loop)] // band-offset index arithmetic
pub fn banded_matvec(m: &BandedMatrix, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != m.n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}×{n} but vector has length {}",
            x.len(),
            n = m.n
        )));
    }
    let mut y = vec![0.0; m.n];
    for (i, yi) in y.iter_mut().enumerate() {
        let lo = i.saturating_sub(m.kl);
        let hi = (i + m.ku).min(m.n - 1);
        let mut acc = 0.0;
        for j in lo..=hi {
            acc += m.bands[m.slot(i, j)] * x[j];
        }
        *yi = acc;
    }
    Ok(y)
}

/// Solution of a banded system together with its achieved residual.
#[derive(Debug, Clone)]
pub struct BandedSolution {
    pub x: Vec<f64>,
    /// `‖Mx − rhs‖∞`, computed against the original matrix.
    pub residual_inf: f64,
}

/// Pivots smaller than this are treated as singular. The stepping systems
/// have pivots of order 1; anything this small means the dominance
/// assumption underlying unpivoted elimination has broken down.
const PIVOT_TOLERANCE: f64 = 1e-300;

/// Solves `M x = rhs` by banded LU without pivoting.
///
/// The factorization is recomputed on every call (the system matrix changes
/// with the solution between time steps) and never writes outside the band.
#[allow(clippy::needless_range_loop)] // band-offset index arithmetic
pub fn banded_lu_solve(m: &BandedMatrix, rhs: &[f64]) -> Result<BandedSolution> {
    if rhs.len() != m.n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}×{n} but right-hand side has length {}",
            rhs.len(),
            n = m.n
        )));
    }
    let n = m.n;
    let mut work = m.clone();
    let mut x = rhs.to_vec();

    // Forward elimination; multipliers are applied to the right-hand side
    // immediately instead of being stored.
    for k in 0..n {
        let pivot = work.bands[work.slot(k, k)];
        if pivot.abs() < PIVOT_TOLERANCE {
            return Err(Error::SingularMatrix { row: k });
        }
        let i_max = (k + m.kl).min(n - 1);
        for i in (k + 1)..=i_max {
            let factor = work.bands[work.slot(i, k)] / pivot;
            if factor != 0.0 {
                let j_max = (k + m.ku).min(n - 1);
                for j in k..=j_max {
                    let upper = work.bands[work.slot(k, j)];
                    let s = work.slot(i, j);
                    work.bands[s] -= factor * upper;
                }
                x[i] -= factor * x[k];
            }
        }
    }

    // Back substitution.
    for k in (0..n).rev() {
        let j_max = (k + m.ku).min(n - 1);
        let mut acc = x[k];
        for j in (k + 1)..=j_max {
            acc -= work.bands[work.slot(k, j)] * x[j];
        }
        let pivot = work.bands[work.slot(k, k)];
        if pivot.abs() < PIVOT_TOLERANCE {
            return Err(Error::SingularMatrix { row: k });
        }
        x[k] = acc / pivot;
    }

    let mx = banded_matvec(m, &x)?;
    let residual_inf = mx
        .iter()
        .zip(rhs)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(BandedSolution { x, residual_inf })
}
