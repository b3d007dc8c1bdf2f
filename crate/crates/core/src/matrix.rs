//! Dense Hermitian matrices over `Complex64`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance on `‖H − H†‖_max / ‖H‖_max`.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// A square complex matrix equal to its conjugate transpose.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    data: DMatrix<Complex64>,
}

impl HermitianMatrix {
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::Contract(format!(
                "matrix is {}x{}, not square",
                data.nrows(),
                data.ncols()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("matrix has non-finite entries".into()));
        }
        let scale = max_abs(&data);
        let asym = hermitian_defect(&data);
        if asym > HERMITICITY_TOL * scale {
            return Err(Error::Contract(format!(
                "matrix is not Hermitian: max |H - H^dag| = {asym:e} against scale {scale:e}"
            )));
        }
        Ok(Self { data })
    }

    pub fn from_real(data: DMatrix<f64>) -> Result<Self> {
        Self::new(data.map(|x| Complex64::new(x, 0.0)))
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.data
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[(row, col)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[(i, i)].re).collect()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == 0.0)
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.data.map(|z| z.re)
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.data)
    }
}

pub(crate) fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}
