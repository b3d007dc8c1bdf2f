//! Restricted-subspace Hamiltonians of an N-dot chain.
//!
//! With particle number and spins conserved, the extended Hubbard model
//! reduces to an `N`-dimensional single-electron block `H1` and an
//! `N²`-dimensional block `H2` for one up and one down electron. Rates are in
//! units of a caller-chosen reference rate with ħ = 1.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::HermitianMatrix;

/// Relative tolerance used when comparing diagonal entries of `H2`.
pub const DIAGONAL_CONSTANCY_TOL: f64 = 1e-12;

/// Declarative description of an `n_dots` chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub n_dots: usize,
    /// `Γ_{i,i+1}` for `i = 1..N-1`.
    pub tunnel_couplings: Vec<f64>,
    /// `ε_i` for every dot.
    pub onsite_fields: Vec<f64>,
    pub onsite_interaction: f64,
    pub capacitive_coupling: f64,
}

impl ChainSpec {
    /// Chain with the given couplings, zero fields and no interactions.
    pub fn from_couplings(tunnel_couplings: Vec<f64>) -> Result<Self> {
        let n_dots = tunnel_couplings.len() + 1;
        Self::new(tunnel_couplings, vec![0.0; n_dots], 0.0, 0.0)
    }

    pub fn new(
        tunnel_couplings: Vec<f64>,
        onsite_fields: Vec<f64>,
        onsite_interaction: f64,
        capacitive_coupling: f64,
    ) -> Result<Self> {
        let spec = Self {
            n_dots: onsite_fields.len(),
            tunnel_couplings,
            onsite_fields,
            onsite_interaction,
            capacitive_coupling,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_interactions(mut self, u: f64, v: f64) -> Result<Self> {
        self.onsite_interaction = u;
        self.capacitive_coupling = v;
        self.validate()?;
        Ok(self)
    }

    pub fn with_fields(mut self, fields: Vec<f64>) -> Result<Self> {
        self.onsite_fields = fields;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n_dots;
        if n < 2 {
            return Err(Error::InvalidChain(format!("need at least 2 dots, got {n}")));
        }
        if self.tunnel_couplings.len() != n - 1 {
            return Err(Error::InvalidChain(format!(
                "{} dots need {} couplings, got {}",
                n,
                n - 1,
                self.tunnel_couplings.len()
            )));
        }
        if self.onsite_fields.len() != n {
            return Err(Error::InvalidChain(format!(
                "{} dots need {} onsite fields, got {}",
                n,
                n,
                self.onsite_fields.len()
            )));
        }
        if let Some(g) = self
            .tunnel_couplings
            .iter()
            .find(|g| !g.is_finite() || **g < 0.0)
        {
            return Err(Error::InvalidChain(format!(
                "tunnel couplings must be finite and nonnegative, got {g}"
            )));
        }
        if self.onsite_fields.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidChain("onsite fields must be finite".into()));
        }
        for (name, x) in [
            ("onsite interaction", self.onsite_interaction),
            ("capacitive coupling", self.capacitive_coupling),
        ] {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::InvalidChain(format!(
                    "{name} must be finite and nonnegative, got {x}"
                )));
            }
        }
        Ok(())
    }

    pub fn one_electron_dim(&self) -> usize {
        self.n_dots
    }

    pub fn two_electron_dim(&self) -> usize {
        self.n_dots * self.n_dots
    }
}

/// Families of coupling profiles used for transfer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CouplingProfile {
    Uniform { gamma: f64 },
    /// `Γ_i ∝ √(i(N−i))`, scaled so the central bond equals `gamma_max`.
    EngineeredPst { gamma_max: f64 },
    /// Weak end bonds `epsilon` around a bulk chain of `gamma_bulk`.
    Superexchange { epsilon: f64, gamma_bulk: f64 },
}

impl CouplingProfile {
    pub fn couplings(&self, n: usize) -> Result<Vec<f64>> {
        match *self {
            CouplingProfile::Uniform { gamma } => {
                if n < 2 {
                    return Err(Error::InvalidChain(format!("need at least 2 dots, got {n}")));
                }
                if !(gamma.is_finite() && gamma >= 0.0) {
                    return Err(Error::InvalidChain(format!("bad uniform coupling {gamma}")));
                }
                Ok(vec![gamma; n - 1])
            }
            CouplingProfile::EngineeredPst { gamma_max } => pst_couplings(n, gamma_max),
            CouplingProfile::Superexchange {
                epsilon,
                gamma_bulk,
            } => superexchange_couplings(n, epsilon, gamma_bulk),
        }
    }

    /// Superexchange only behaves as such when the end bonds are much weaker
    /// than the bulk (`epsilon ≤ gamma_bulk / 10`). Other profiles always pass.
    pub fn in_weak_coupling_regime(&self) -> bool {
        match *self {
            CouplingProfile::Superexchange {
                epsilon,
                gamma_bulk,
            } => epsilon > 0.0 && epsilon <= gamma_bulk / 10.0,
            _ => true,
        }
    }
}

/// Engineered couplings `gamma_max · √(i(n−i)) / √(⌊n/2⌋⌈n/2⌉)`.
pub fn pst_couplings(n: usize, gamma_max: f64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::InvalidChain(format!("need at least 2 dots, got {n}")));
    }
    if !(gamma_max.is_finite() && gamma_max > 0.0) {
        return Err(Error::InvalidChain(format!(
            "gamma_max must be positive and finite, got {gamma_max}"
        )));
    }
    let central = ((n / 2) * n.div_ceil(2)) as f64;
    let couplings = (1..n)
        .map(|i| {
            let raw = (i * (n - i)) as f64;
            // i(n-i) == central exactly at the middle bond(s), giving gamma_max to the ulp
            if raw == central {
                gamma_max
            } else {
                gamma_max * (raw / central).sqrt()
            }
        })
        .collect();
    Ok(couplings)
}

/// Unnormalized engineered couplings `√(i(n−i))`.
pub fn pst_couplings_unnormalized(n: usize) -> Result<Vec<f64>> {
    let central = (((n / 2) * n.div_ceil(2)) as f64).sqrt();
    pst_couplings(n, central)
}

/// Time at which an engineered chain maps site 1 onto site `n`.
pub fn pst_transfer_time(n: usize, gamma_max: f64) -> f64 {
    std::f64::consts::FRAC_PI_2 * (((n / 2) * n.div_ceil(2)) as f64).sqrt() / gamma_max
}

/// `[ε, γ, …, γ, ε]`.
pub fn superexchange_couplings(n: usize, epsilon: f64, gamma_bulk: f64) -> Result<Vec<f64>> {
    if n < 3 {
        return Err(Error::InvalidChain(format!(
            "superexchange needs at least 3 dots, got {n}"
        )));
    }
    if !(epsilon.is_finite() && epsilon >= 0.0 && gamma_bulk.is_finite() && gamma_bulk >= 0.0) {
        return Err(Error::InvalidChain(format!(
            "bad superexchange couplings epsilon={epsilon}, gamma_bulk={gamma_bulk}"
        )));
    }
    let mut couplings = vec![gamma_bulk; n - 1];
    couplings[0] = epsilon;
    couplings[n - 2] = epsilon;
    Ok(couplings)
}

/// Two-electron basis label `|i,j⟩` (up electron on dot `i`, down on dot `j`),
/// with 1-based sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoElectronIndex {
    pub up_site: usize,
    pub down_site: usize,
}

impl TwoElectronIndex {
    pub fn new(up_site: usize, down_site: usize) -> Self {
        Self { up_site, down_site }
    }

    /// `p = (i−1)·N + (j−1)`.
    pub fn flat(&self, n: usize) -> Result<usize> {
        if self.up_site == 0 || self.down_site == 0 || self.up_site > n || self.down_site > n {
            return Err(Error::IndexOutOfRange {
                index: self.up_site.max(self.down_site),
                dim: n,
            });
        }
        Ok((self.up_site - 1) * n + (self.down_site - 1))
    }

    pub fn from_flat(p: usize, n: usize) -> Result<Self> {
        if p >= n * n {
            return Err(Error::IndexOutOfRange { index: p, dim: n * n });
        }
        Ok(Self {
            up_site: p / n + 1,
            down_site: p % n + 1,
        })
    }
}

/// Tridiagonal single-electron Hamiltonian.
pub fn build_h1(spec: &ChainSpec) -> Result<HermitianMatrix> {
    spec.validate()?;
    let n = spec.n_dots;
    let mut h = DMatrix::<f64>::zeros(n, n);
    for (i, &eps) in spec.onsite_fields.iter().enumerate() {
        h[(i, i)] = eps;
    }
    for (i, &g) in spec.tunnel_couplings.iter().enumerate() {
        h[(i, i + 1)] = g;
        h[(i + 1, i)] = g;
    }
    HermitianMatrix::from_real(h)
}

fn h2_diagonal(spec: &ChainSpec, i: usize, j: usize) -> f64 {
    let mut d = spec.onsite_fields[i] + spec.onsite_fields[j];
    if i == j {
        d += spec.onsite_interaction;
    }
    if i == j + 1 || i + 1 == j {
        d += spec.capacitive_coupling;
    }
    d
}

/// Two-electron Hamiltonian on the `N²` basis `|i,j⟩`, up-spin index major.
pub fn build_h2(spec: &ChainSpec) -> Result<HermitianMatrix> {
    spec.validate()?;
    let n = spec.n_dots;
    let dim = n * n;
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..n {
        for j in 0..n {
            let p = i * n + j;
            h[(p, p)] = h2_diagonal(spec, i, j);
            if i + 1 < n {
                let q = (i + 1) * n + j;
                h[(p, q)] = spec.tunnel_couplings[i];
                h[(q, p)] = spec.tunnel_couplings[i];
            }
            if j + 1 < n {
                let q = i * n + j + 1;
                h[(p, q)] = spec.tunnel_couplings[j];
                h[(q, p)] = spec.tunnel_couplings[j];
            }
        }
    }
    HermitianMatrix::from_real(h)
}

/// Whether every diagonal entry of `H2` coincides, the precondition for two
/// independent engineered transfers.
pub fn pst_diagonal_constant(spec: &ChainSpec) -> Result<bool> {
    spec.validate()?;
    let n = spec.n_dots;
    let diag: Vec<f64> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| h2_diagonal(spec, i, j))
        .collect();
    let scale = diag.iter().fold(0.0_f64, |m, d| m.max(d.abs())).max(f64::MIN_POSITIVE);
    let first = diag[0];
    Ok(diag
        .iter()
        .all(|d| (d - first).abs() <= DIAGONAL_CONSTANCY_TOL * scale))
}
