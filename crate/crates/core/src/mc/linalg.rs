//! Hermitian positive-definite factorisation helpers.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Cholesky factor of a Hermitian positive-definite matrix.
pub struct HermitianFactor {
    chol: Cholesky<Complex64, Dyn>,
}

impl HermitianFactor {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Decomposition(format!(
                "matrix is {}×{}, not square",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let asym = (&m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if !(asym <= 1e-12 * scale.max(1.0)) {
            return Err(Error::Decomposition(format!(
                "matrix is not Hermitian (max |M − Mᴴ| = {asym:e})"
            )));
        }
        let chol = Cholesky::new(m).ok_or_else(|| {
            Error::Decomposition("non-positive pivot in Cholesky factorisation".into())
        })?;
        // The complex factorisation takes principal square roots of the pivots, so
        // a negative pivot shows up as a non-real diagonal entry instead of a failure.
        let l = chol.l_dirty();
        if let Some(i) = (0..l.nrows()).find(|&i| {
            let d = l[(i, i)];
            !(d.re > 0.0 && d.re.is_finite()) || d.im != 0.0
        }) {
            return Err(Error::Decomposition(format!(
                "pivot {i} is not positive ({})",
                l[(i, i)]
            )));
        }
        Ok(Self { chol })
    }

    pub fn log_det(&self) -> f64 {
        let l = self.chol.l_dirty();
        2.0 * (0..l.nrows()).map(|i| l[(i, i)].re.ln()).sum::<f64>()
    }

    /// `Z` with `M Z = B`.
    pub fn solve(&self, b: &CMatrix) -> CMatrix {
        self.chol.solve(b)
    }

    /// `tr(Bᴴ M⁻¹ B) = ‖L⁻¹ B‖²_F`, from a single triangular solve.
    pub fn inverse_quadratic_trace(&self, b: &CMatrix) -> Result<f64> {
        let z = self
            .chol
            .l_dirty()
            .solve_lower_triangular(b)
            .ok_or_else(|| Error::Decomposition("singular triangular factor".into()))?;
        Ok(z.iter().map(|v| v.norm_sqr()).sum())
    }
}

/// Log-determinant of `M` and the solution of `M Z = B`, without forming `M⁻¹`.
pub fn hermitian_logdet_solve(m: &CMatrix, b: &CMatrix) -> Result<(f64, CMatrix)> {
    if b.nrows() != m.nrows() {
        return Err(Error::Decomposition(format!(
            "right-hand side has {} rows, matrix has {}",
            b.nrows(),
            m.nrows()
        )));
    }
    let f = HermitianFactor::new(m.clone())?;
    Ok((f.log_det(), f.solve(b)))
}
