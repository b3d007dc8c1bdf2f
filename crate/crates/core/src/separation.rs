//! Separating two electrons that start on the same dot of a double dot.
//!
//! Starting from `|1,1⟩`, the separated configurations `|1,2⟩` and `|2,1⟩`
//! keep equal amplitudes, so the four-state walk reduces exactly to a
//! three-node chain `|1,1⟩ - |s⟩ - |2,2⟩` with bonds `√2Γ`. Detuning `|2,2⟩`
//! by `δ` suppresses the second hop and leaves a near-perfect half
//! oscillation into `|s⟩`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

use crate::chain::{build_h2, ChainSpec};
use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;
use crate::propagator::{
    coarse_grid_points, eigendecompose, first_peak_above, maximize_on_window, FidelityTrace,
    Projector, SpectralDecomposition, StateVector,
};

/// Flat indices of the double-dot basis.
pub const BOUND_LEFT: usize = 0; // |1,1>
pub const SEPARATED: [usize; 2] = [1, 2]; // |1,2>, |2,1>
pub const BOUND_RIGHT: usize = 3; // |2,2>

/// A peak must reach this population to count as the separation operating point.
pub const OPERATING_PEAK_THRESHOLD: f64 = 0.5;
/// Trace resolution used by [`separate`].
pub const DEFAULT_TRACE_POINTS: usize = 2001;

/// Two dots holding two electrons; all energies in units of the reference rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DoubleDotSpec {
    pub gamma: f64,
    pub onsite_u: f64,
    pub capacitive_v: f64,
    pub eps1: f64,
    pub eps2: f64,
}

impl DoubleDotSpec {
    pub fn new(gamma: f64, onsite_u: f64, capacitive_v: f64, eps1: f64, eps2: f64) -> Result<Self> {
        let spec = Self {
            gamma,
            onsite_u,
            capacitive_v,
            eps1,
            eps2,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// `ε₂` set by [`optimal_detuning_field`].
    pub fn with_optimal_detuning(gamma: f64, onsite_u: f64, capacitive_v: f64, eps1: f64) -> Result<Self> {
        Self::new(
            gamma,
            onsite_u,
            capacitive_v,
            eps1,
            optimal_detuning_field(onsite_u, capacitive_v, eps1),
        )
    }

    /// `U = 20Γ`, `V = 10Γ`, `ε₂ = 10Γ` at `Γ = 1`.
    pub fn typical() -> Self {
        Self {
            gamma: 1.0,
            onsite_u: 20.0,
            capacitive_v: 10.0,
            eps1: 0.0,
            eps2: 10.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidChain(format!(
                "double-dot tunnel coupling must be positive, got {}",
                self.gamma
            )));
        }
        self.chain_spec().map(|_| ())
    }

    pub fn chain_spec(&self) -> Result<ChainSpec> {
        ChainSpec::new(
            vec![self.gamma],
            vec![self.eps1, self.eps2],
            self.onsite_u,
            self.capacitive_v,
        )
    }

    pub fn hamiltonian(&self) -> Result<HermitianMatrix> {
        build_h2(&self.chain_spec()?)
    }

    /// Diagonal energies of `|1,1⟩`, `|1,2⟩`, `|2,1⟩`, `|2,2⟩`.
    pub fn diagonal_energies(&self) -> Result<[f64; 4]> {
        let d = self.hamiltonian()?.diagonal();
        Ok([d[0], d[1], d[2], d[3]])
    }

    /// Detuning of `|2,2⟩` from the separated states, read off the matrix.
    pub fn detuning(&self) -> Result<f64> {
        let d = self.diagonal_energies()?;
        Ok(d[BOUND_RIGHT] - d[SEPARATED[0]])
    }

    /// One full period of the reduced model, `2π / (√2Γ)`.
    pub fn default_window(&self) -> f64 {
        2.0 * PI / (SQRT_2 * self.gamma)
    }

    /// Half oscillation of `|1,1⟩ ↔ |s⟩` at coupling `√2Γ`.
    pub fn analytic_separation_time(&self) -> f64 {
        PI / (2.0 * SQRT_2 * self.gamma)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparationResult {
    pub t_opt: f64,
    pub fidelity: f64,
    pub trace: FidelityTrace,
    pub detuning_delta: f64,
    pub suppression_m: f64,
}

/// `ε₂ = ε₁ + U − V`: equalizes `|1,1⟩`, `|1,2⟩` and `|2,1⟩`.
pub fn optimal_detuning_field(onsite_u: f64, capacitive_v: f64, eps1: f64) -> f64 {
    eps1 + onsite_u - capacitive_v
}

/// Shared dynamics of a double dot started in `|1,1⟩`.
pub struct DoubleDotDynamics {
    spec: DoubleDotSpec,
    decomp: SpectralDecomposition,
}

impl DoubleDotDynamics {
    pub fn new(spec: &DoubleDotSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Self {
            spec: *spec,
            decomp: eigendecompose(&spec.hamiltonian()?)?,
        })
    }

    pub fn decomposition(&self) -> &SpectralDecomposition {
        &self.decomp
    }

    fn projector_from_bound_left(&self, targets: &[usize]) -> Result<Projector<'_>> {
        Projector::new(&self.decomp, &StateVector::basis(4, BOUND_LEFT)?, targets)
    }

    /// Population of the separated subspace at `t`.
    pub fn separated_population(&self, t: f64) -> Result<f64> {
        Ok(self.projector_from_bound_left(&SEPARATED)?.population(t))
    }

    /// Populations of `(|1,1⟩, separated, |2,2⟩)` at `t`.
    pub fn populations(&self, t: f64) -> Result<[f64; 3]> {
        let amps = self.projector_from_bound_left(&[0, 1, 2, 3])?.amplitudes(t);
        Ok([
            amps[0].norm_sqr(),
            amps[1].norm_sqr() + amps[2].norm_sqr(),
            amps[3].norm_sqr(),
        ])
    }

    /// Amplitudes on `|1,2⟩` and `|2,1⟩` at `t`.
    pub fn separated_amplitudes(&self, t: f64) -> Result<[Complex64; 2]> {
        let a = self.projector_from_bound_left(&SEPARATED)?.amplitudes(t);
        Ok([a[0], a[1]])
    }

    /// Largest population of `|2,2⟩` over `[0, window]`.
    pub fn max_leakage(&self, window: f64) -> Result<f64> {
        let proj = self.projector_from_bound_left(&[BOUND_RIGHT])?;
        let n = coarse_grid_points(self.decomp.spectral_spread(), window);
        Ok(maximize_on_window(|t| proj.population(t), 0.0, window, n).1)
    }

    /// Runs the time-reversed step: starts from `(|1,2⟩ + |2,1⟩)/√2` and
    /// returns the `|1,1⟩` population after `t`.
    pub fn recombination_fidelity(&self, t: f64) -> Result<f64> {
        let mut amps = nalgebra::DVector::zeros(4);
        amps[SEPARATED[0]] = Complex64::new(1.0, 0.0);
        amps[SEPARATED[1]] = Complex64::new(1.0, 0.0);
        let split = StateVector::normalized(amps)?;
        Ok(Projector::new(&self.decomp, &split, &[BOUND_LEFT])?.population(t))
    }

    /// Trace of the separated population over `[0, t_max]` plus the
    /// operating point: the first peak reaching
    /// [`OPERATING_PEAK_THRESHOLD`], or the window maximum when none does.
    pub fn separation(&self, t_max: f64, n_points: usize) -> Result<SeparationResult> {
        let proj = self.projector_from_bound_left(&SEPARATED)?;
        let f = |t: f64| proj.population(t);
        let trace = FidelityTrace::sample(t_max, n_points, f)?;
        let n = coarse_grid_points(self.decomp.spectral_spread(), t_max).max(n_points);
        let (t_opt, fidelity) = first_peak_above(f, 0.0, t_max, n, OPERATING_PEAK_THRESHOLD)
            .unwrap_or_else(|| maximize_on_window(f, 0.0, t_max, n));
        let delta = self.spec.detuning()?;
        Ok(SeparationResult {
            t_opt,
            fidelity: fidelity.clamp(0.0, 1.0),
            trace,
            detuning_delta: delta,
            suppression_m: delta / self.spec.gamma,
        })
    }
}

/// Separation trace and operating point for `spec` over `[0, t_max]`.
pub fn separation_fidelity_trace(spec: &DoubleDotSpec, t_max: f64, n_points: usize) -> Result<SeparationResult> {
    DoubleDotDynamics::new(spec)?.separation(t_max, n_points)
}

/// [`separation_fidelity_trace`] over the default window.
pub fn separate(spec: &DoubleDotSpec) -> Result<SeparationResult> {
    separation_fidelity_trace(spec, spec.default_window(), DEFAULT_TRACE_POINTS)
}

/// Three-node chain `(|1,1⟩, |s⟩, |2,2⟩)` with bonds `√2Γ` and `|2,2⟩`
/// detuned by `delta`.
pub fn reduced_three_node_hamiltonian(gamma: f64, delta: f64) -> Result<HermitianMatrix> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::Contract(format!("gamma must be positive, got {gamma}")));
    }
    let b = SQRT_2 * gamma;
    HermitianMatrix::from_real(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, b, 0.0, b, 0.0, b, 0.0, b, delta],
    ))
}

/// The symmetric-subspace Hamiltonian for arbitrary fields, shifted so
/// `|1,1⟩` sits at zero. Coincides with [`reduced_three_node_hamiltonian`]
/// when the fields are optimal.
pub fn symmetric_subspace_hamiltonian(spec: &DoubleDotSpec) -> Result<HermitianMatrix> {
    let [e11, e12, e21, e22] = spec.diagonal_energies()?;
    debug_assert_eq!(e12, e21);
    let b = SQRT_2 * spec.gamma;
    HermitianMatrix::from_real(DMatrix::from_row_slice(
        3,
        3,
        &[0.0, b, 0.0, b, e12 - e11, b, 0.0, b, e22 - e11],
    ))
}

/// `(γ²/n²) sin²(n t)` with `n = √(γ² + (δ/2)²)`.
pub fn two_level_transition_probability(gamma: f64, delta: f64, t: f64) -> f64 {
    let n2 = gamma * gamma + 0.25 * delta * delta;
    if n2 == 0.0 {
        return 0.0;
    }
    let s = (n2.sqrt() * t).sin();
    gamma * gamma / n2 * s * s
}

/// Peak of [`two_level_transition_probability`] at `δ = mγ`: `1/(1 + m²/4)`.
pub fn max_suppressed_transfer(m: f64) -> f64 {
    1.0 / (1.0 + 0.25 * m * m)
}
