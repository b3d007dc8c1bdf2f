//! Exact propagation under time-independent Hamiltonians.
//!
//! Every evolution goes through a full spectral decomposition `H = V Λ V†`,
//! so `e^{−iHt}` is exact up to the accuracy of the eigensolver. Fidelity
//! scans reuse the decomposition and cost `O(d)` per time point.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{max_abs, HermitianMatrix};

/// Largest dimension accepted by [`eigendecompose`].
pub const MAX_DIM: usize = 10_000;
/// Norm drift allowed on a [`StateVector`].
pub const NORM_TOL: f64 = 1e-10;
/// Reconstruction and orthonormality tolerance of a decomposition.
pub const DECOMPOSITION_TOL: f64 = 1e-10;
/// Minimum coarse-grid points per period `2π / spread` in peak searches.
pub const PEAK_POINTS_PER_PERIOD: f64 = 40.0;
/// Golden-section refinement stops at this fraction of the search window.
pub const PEAK_REL_TOL: f64 = 1e-6;

const EIGEN_MAX_ITER: usize = 0;

/// A unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Contract(format!(
                "state vector must have unit norm, got {norm}"
            )));
        }
        Ok(Self { amps })
    }

    /// Scales `amps` to unit norm.
    pub fn normalized(amps: DVector<Complex64>) -> Result<Self> {
        let norm = amps.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Contract("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amps: amps.unscale(norm),
        })
    }

    /// The computational basis state `|index⟩` (0-based).
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut amps = DVector::zeros(dim);
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps })
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    /// `|⟨other|self⟩|²`.
    pub fn fidelity_with(&self, other: &StateVector) -> Result<f64> {
        if other.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(other.amps.dotc(&self.amps).norm_sqr())
    }

    /// Total probability on the given basis indices.
    pub fn population(&self, indices: &[usize]) -> f64 {
        indices.iter().map(|&i| self.amps[i].norm_sqr()).sum()
    }
}

/// Eigenvalues in ascending order with orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    /// `λ_max − λ_min`, an upper bound on every Bohr frequency.
    pub fn spectral_spread(&self) -> f64 {
        match (self.eigenvalues.first(), self.eigenvalues.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let lambda = DVector::from_iterator(
            self.dim(),
            self.eigenvalues.iter().map(|&l| Complex64::new(l, 0.0)),
        );
        let scaled = DMatrix::from_fn(self.dim(), self.dim(), |i, k| {
            self.eigenvectors[(i, k)] * lambda[k]
        });
        &scaled * self.eigenvectors.adjoint()
    }

    /// `max |V†V − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let gram = self.eigenvectors.adjoint() * &self.eigenvectors;
        let id = DMatrix::<Complex64>::identity(self.dim(), self.dim());
        max_abs(&(gram - id))
    }

    /// Coefficients of `psi` in the eigenbasis, `V†ψ`.
    pub fn to_eigenbasis(&self, psi: &StateVector) -> Result<DVector<Complex64>> {
        self.check_dim(psi.dim())?;
        Ok(self.eigenvectors.adjoint() * psi.amplitudes())
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found,
            });
        }
        Ok(())
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index,
                dim: self.dim(),
            });
        }
        Ok(())
    }
}

/// Diagonalizes `h`.
pub fn eigendecompose(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    let d = h.dim();
    if d == 0 {
        return Err(Error::Contract("cannot decompose an empty matrix".into()));
    }
    if d > MAX_DIM {
        return Err(Error::Contract(format!(
            "dimension {d} exceeds the limit of {MAX_DIM}"
        )));
    }

    let scale = h.max_abs().max(1.0);
    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if h.is_real() {
        let real = h.real_part();
        let eig = SymmetricEigen::try_new(real.clone(), f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or_else(|| {
                Error::Numerical(format!("symmetric eigensolver did not converge (d = {d})"))
            })?;
        let (mut values, mut vectors) = (eig.eigenvalues.as_slice().to_vec(), eig.eigenvectors);
        let recon = &vectors * DMatrix::from_diagonal(&DVector::from_column_slice(&values))
            * vectors.transpose()
            - &real;
        if recon.amax() > DECOMPOSITION_TOL * scale {
            // the QR sweep occasionally stalls on heavily degenerate spectra
            (values, vectors) = jacobi_refine(&real, vectors, scale);
        }
        (values, vectors.map(|x| Complex64::new(x, 0.0)))
    } else {
        let eig = SymmetricEigen::try_new(h.as_matrix().clone(), f64::EPSILON, EIGEN_MAX_ITER)
            .ok_or_else(|| {
                Error::Numerical(format!("Hermitian eigensolver did not converge (d = {d})"))
            })?;
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical(format!(
            "eigensolver produced non-finite eigenvalues (d = {d})"
        )));
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = DMatrix::from_fn(d, d, |i, k| vectors[(i, order[k])]);

    let decomp = SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    };

    let recon = max_abs(&(decomp.reconstruct() - h.as_matrix()));
    let ortho = decomp.orthonormality_defect();
    if recon > DECOMPOSITION_TOL * scale || ortho > DECOMPOSITION_TOL {
        return Err(Error::Numerical(format!(
            "decomposition failed its checks (d = {d}): reconstruction error {recon:e}, \
             orthonormality error {ortho:e}"
        )));
    }
    Ok(decomp)
}

const JACOBI_MAX_SWEEPS: usize = 30;

/// Threshold cyclic Jacobi on `VᵀHV`, starting from an approximate eigenbasis
/// `V`. Only rotates pairs that are still coupled, so a nearly diagonal start
/// costs little more than a scan.
fn jacobi_refine(h: &DMatrix<f64>, mut v: DMatrix<f64>, scale: f64) -> (Vec<f64>, DMatrix<f64>) {
    let d = h.nrows();
    let mut a = v.transpose() * h * &v;
    let threshold = 1e-15 * scale;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for q in 1..d {
            for p in 0..q {
                let apq = a[(p, q)];
                if apq.abs() <= threshold {
                    continue;
                }
                rotated = true;
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..d {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..d {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..d {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    ((0..d).map(|k| a[(k, k)]).collect(), v)
}

fn phases(eigenvalues: &[f64], t: f64) -> impl Iterator<Item = Complex64> + '_ {
    eigenvalues
        .iter()
        .map(move |&l| Complex64::from_polar(1.0, -l * t))
}

/// `V e^{−iΛt} V† ψ₀`. Negative `t` evolves backwards.
pub fn evolve(decomp: &SpectralDecomposition, psi0: &StateVector, t: f64) -> Result<StateVector> {
    if !t.is_finite() {
        return Err(Error::Contract(format!("time must be finite, got {t}")));
    }
    let coeffs = decomp.to_eigenbasis(psi0)?;
    if t == 0.0 {
        return Ok(psi0.clone());
    }
    let rotated = DVector::from_iterator(
        decomp.dim(),
        coeffs
            .iter()
            .zip(phases(&decomp.eigenvalues, t))
            .map(|(c, p)| c * p),
    );
    Ok(StateVector {
        amps: &decomp.eigenvectors * rotated,
    })
}

/// Evolves a fixed initial state to many times while projecting onto a set
/// of target basis states. Each evaluation costs `O(d · targets)`.
#[derive(Debug, Clone)]
pub struct Projector<'a> {
    eigenvalues: &'a [f64],
    // weights[t][k] = V[target_t, k] * (V^dag psi0)_k
    weights: Vec<Vec<Complex64>>,
}

impl<'a> Projector<'a> {
    pub fn new(
        decomp: &'a SpectralDecomposition,
        psi0: &StateVector,
        targets: &[usize],
    ) -> Result<Self> {
        let coeffs = decomp.to_eigenbasis(psi0)?;
        let mut weights = Vec::with_capacity(targets.len());
        for &target in targets {
            decomp.check_index(target)?;
            weights.push(
                (0..decomp.dim())
                    .map(|k| decomp.eigenvectors[(target, k)] * coeffs[k])
                    .collect(),
            );
        }
        Ok(Self {
            eigenvalues: &decomp.eigenvalues,
            weights,
        })
    }

    /// Amplitudes on each target at time `t`.
    pub fn amplitudes(&self, t: f64) -> Vec<Complex64> {
        let ph: Vec<Complex64> = phases(self.eigenvalues, t).collect();
        self.weights
            .iter()
            .map(|w| w.iter().zip(&ph).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Summed population of the targets at time `t`.
    pub fn population(&self, t: f64) -> f64 {
        self.amplitudes(t).iter().map(|a| a.norm_sqr()).sum()
    }
}

/// `|⟨target| e^{−iHt} |source⟩|²`.
pub fn transfer_fidelity(
    decomp: &SpectralDecomposition,
    source: usize,
    target: usize,
    t: f64,
) -> Result<f64> {
    decomp.check_index(source)?;
    let psi0 = StateVector::basis(decomp.dim(), source)?;
    Ok(Projector::new(decomp, &psi0, &[target])?
        .population(t)
        .clamp(0.0, 1.0))
}

/// Sampled fidelity as a function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityTrace {
    pub times: Vec<f64>,
    pub fidelities: Vec<f64>,
}

impl FidelityTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest sampled value and its time.
    pub fn max(&self) -> Option<(f64, f64)> {
        self.times
            .iter()
            .zip(&self.fidelities)
            .fold(None, |best, (&t, &f)| match best {
                Some((_, bf)) if bf >= f => best,
                _ => Some((t, f)),
            })
    }

    /// Samples `f` on the uniform grid `[0, t_max]` with `n_points` points.
    pub fn sample<F: Fn(f64) -> f64>(t_max: f64, n_points: usize, f: F) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::Contract(format!(
                "a scan needs at least 2 points, got {n_points}"
            )));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::Contract(format!(
                "scan length must be positive, got {t_max}"
            )));
        }
        let times = uniform_grid(0.0, t_max, n_points);
        let fidelities = times.iter().map(|&t| f(t).clamp(0.0, 1.0)).collect();
        Ok(Self { times, fidelities })
    }
}

fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
        .collect()
}

/// Transfer fidelity on a uniform grid over `[0, t_max]`.
pub fn fidelity_scan(
    decomp: &SpectralDecomposition,
    source: usize,
    target: usize,
    t_max: f64,
    n_points: usize,
) -> Result<FidelityTrace> {
    decomp.check_index(source)?;
    let psi0 = StateVector::basis(decomp.dim(), source)?;
    let proj = Projector::new(decomp, &psi0, &[target])?;
    FidelityTrace::sample(t_max, n_points, |t| proj.population(t))
}

/// Coarse-grid size for a window of length `width` given a spectral spread.
pub fn coarse_grid_points(spread: f64, width: f64) -> usize {
    let periods = spread * width / (2.0 * std::f64::consts::PI);
    ((PEAK_POINTS_PER_PERIOD * periods).ceil() as usize).max(64) + 1
}

/// Golden-section search for a maximum of `f` on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, f(t))
}

/// Refines the grid point `k` of `grid` with golden-section search on its
/// neighbouring cells, keeping whichever of the grid and refined value is
/// larger.
fn refine<F: Fn(f64) -> f64>(f: &F, grid: &[f64], values: &[f64], k: usize, tol: f64) -> (f64, f64) {
    let lo = grid[k.saturating_sub(1)];
    let hi = grid[(k + 1).min(grid.len() - 1)];
    let (t, v) = golden_section_max(f, lo, hi, tol);
    if v >= values[k] {
        (t, v)
    } else {
        (grid[k], values[k])
    }
}

/// Global maximum of `f` on `[t_lo, t_hi]`: coarse grid of `n_grid` points,
/// then golden-section refinement around the best grid point.
pub fn maximize_on_window<F: Fn(f64) -> f64>(f: F, t_lo: f64, t_hi: f64, n_grid: usize) -> (f64, f64) {
    let grid = uniform_grid(t_lo, t_hi, n_grid.max(3));
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let k = argmax(&values);
    refine(&f, &grid, &values, k, PEAK_REL_TOL * (t_hi - t_lo))
}

/// The earliest local maximum of `f` on `[t_lo, t_hi]` whose value reaches
/// `threshold`, refined like [`maximize_on_window`]. `None` if no grid
/// point reaches the threshold.
pub fn first_peak_above<F: Fn(f64) -> f64>(
    f: F,
    t_lo: f64,
    t_hi: f64,
    n_grid: usize,
    threshold: f64,
) -> Option<(f64, f64)> {
    let grid = uniform_grid(t_lo, t_hi, n_grid.max(3));
    let values: Vec<f64> = grid.iter().map(|&t| f(t)).collect();
    let first = values.iter().position(|&v| v >= threshold)?;
    // climb to the top of this peak
    let mut k = first;
    while k + 1 < values.len() && values[k + 1] >= values[k] {
        k += 1;
    }
    Some(refine(&f, &grid, &values, k, PEAK_REL_TOL * (t_hi - t_lo)))
}

fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .fold(0, |best, (k, &v)| if v > values[best] { k } else { best })
}

/// Peak transfer fidelity over `[0, t_window]`.
pub fn peak_fidelity(
    decomp: &SpectralDecomposition,
    source: usize,
    target: usize,
    t_window: f64,
) -> Result<(f64, f64)> {
    peak_fidelity_between(decomp, source, target, 0.0, t_window)
}

/// Peak transfer fidelity over `[t_lo, t_hi]`.
pub fn peak_fidelity_between(
    decomp: &SpectralDecomposition,
    source: usize,
    target: usize,
    t_lo: f64,
    t_hi: f64,
) -> Result<(f64, f64)> {
    if !(t_lo.is_finite() && t_hi.is_finite() && t_hi > t_lo) {
        return Err(Error::Contract(format!(
            "peak search needs a non-empty window, got [{t_lo}, {t_hi}]"
        )));
    }
    decomp.check_index(source)?;
    let psi0 = StateVector::basis(decomp.dim(), source)?;
    let proj = Projector::new(decomp, &psi0, &[target])?;
    let n = coarse_grid_points(decomp.spectral_spread(), t_hi - t_lo);
    let (t, f) = maximize_on_window(|t| proj.population(t), t_lo, t_hi, n);
    Ok((t, f.clamp(0.0, 1.0)))
}
