//! Heitler-London / Hund-Mulliken model of a biquadratic double dot.
//!
//! Geometry enters through the barrier ratio `η = m*ω₀l²/ħ`; single-particle
//! matrix elements are in units of the confinement energy `ħω₀`. On top of
//! the model sit the charging energy, the onsite repulsion, and the freeze
//! curve that says how much a confinement increase suppresses tunnelling.

mod constants;
pub mod cost;

pub use constants::*;
pub use cost::*;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::special::erfc;

/// Above this `η` the orthogonalization parameter uses `g ≈ s/2 + s³/8`.
pub const G_SERIES_ETA: f64 = 20.0;
/// Bracket for the `η` solve.
pub const ETA_BRACKET: (f64, f64) = (1.0, 6.0);
pub const ETA_TOL: f64 = 1e-8;
/// Relative tolerance of the freeze-energy inversion.
pub const FREEZE_ENERGY_REL_TOL: f64 = 1e-6;
/// The freeze-energy search covers `[0, 20·E_C]`.
pub const FREEZE_BRACKET_EC: f64 = 20.0;

/// An energy, stored in joules.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
pub struct Energy(f64);

impl Energy {
    pub const ZERO: Energy = Energy(0.0);

    pub fn from_joules(j: f64) -> Self {
        Self(j)
    }

    pub fn from_mev(mev: f64) -> Self {
        Self(mev * 1e-3 * ELEMENTARY_CHARGE)
    }

    pub fn from_uev(uev: f64) -> Self {
        Self(uev * 1e-6 * ELEMENTARY_CHARGE)
    }

    pub fn joules(self) -> f64 {
        self.0
    }

    pub fn mev(self) -> f64 {
        self.0 / ELEMENTARY_CHARGE * 1e3
    }

    pub fn uev(self) -> f64 {
        self.0 / ELEMENTARY_CHARGE * 1e6
    }

    /// Angular frequency `E/ħ`.
    pub fn angular_frequency(self) -> f64 {
        self.0 / HBAR
    }

    /// `ħ/E` in seconds.
    pub fn inverse_time(self) -> f64 {
        HBAR / self.0
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }
}

impl std::ops::Add for Energy {
    type Output = Energy;
    fn add(self, rhs: Energy) -> Energy {
        Energy(self.0 + rhs.0)
    }
}

impl std::ops::Sub for Energy {
    type Output = Energy;
    fn sub(self, rhs: Energy) -> Energy {
        Energy(self.0 - rhs.0)
    }
}

impl std::ops::Mul<f64> for Energy {
    type Output = Energy;
    fn mul(self, rhs: f64) -> Energy {
        Energy(self.0 * rhs)
    }
}

impl std::ops::Div for Energy {
    type Output = f64;
    fn div(self, rhs: Energy) -> f64 {
        self.0 / rhs.0
    }
}

/// Number of electrons held by the dot being frozen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Electrons {
    #[serde(rename = "1e")]
    One,
    #[serde(rename = "2e")]
    Two,
}

/// Material and confinement parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaterialParams {
    /// Effective mass in kg.
    pub m_eff: f64,
    pub eps_r: f64,
    pub hbar_omega0: Energy,
    /// Barrier ratio `η`.
    pub eta: f64,
}

impl Default for MaterialParams {
    fn default() -> Self {
        Self::gaas()
    }
}

impl MaterialParams {
    /// GaAs: `m* = 0.067 mₑ`, `ε_r = 12.9`, `ħω₀ = 3 meV`, `η = 1.86`.
    pub fn gaas() -> Self {
        Self {
            m_eff: GAAS_MASS_RATIO * ELECTRON_MASS,
            eps_r: GAAS_EPS_R,
            hbar_omega0: Energy::from_mev(GAAS_HBAR_OMEGA0_MEV),
            eta: GAAS_ETA,
        }
    }

    pub fn new(m_eff: f64, eps_r: f64, hbar_omega0: Energy, eta: f64) -> Result<Self> {
        let p = Self {
            m_eff,
            eps_r,
            hbar_omega0,
            eta,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [
            ("effective mass", self.m_eff),
            ("relative permittivity", self.eps_r),
            ("confinement energy", self.hbar_omega0.joules()),
            ("eta", self.eta),
        ] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Contract(format!("{name} must be positive, got {x}")));
            }
        }
        if self.eta <= 1.0 {
            return Err(Error::Contract(format!(
                "the separated-dot model needs eta > 1, got {}",
                self.eta
            )));
        }
        Ok(())
    }

    pub fn omega0(&self) -> f64 {
        self.hbar_omega0.angular_frequency()
    }

    /// Oscillator length `a = √(ħ/m*ω₀)`.
    pub fn bohr_radius(&self) -> f64 {
        (HBAR / (self.m_eff * self.omega0())).sqrt()
    }

    /// Half the dot separation, `l = √(ηħ/m*ω₀)`.
    pub fn half_separation(&self, eta: f64) -> f64 {
        eta.sqrt() * self.bohr_radius()
    }

    /// `η₀ = l²m*/ħ`, so that `η = η₀ω₀`.
    pub fn eta0(&self) -> f64 {
        self.eta / self.omega0()
    }

    /// Barrier height `V_B = V₀l² = η ħω₀ / 2`. Diagnostic only.
    pub fn barrier_height(&self, eta: f64) -> Energy {
        self.hbar_omega0 * (0.5 * eta)
    }

    pub fn with_hbar_omega0(mut self, hbar_omega0: Energy) -> Self {
        self.hbar_omega0 = hbar_omega0;
        self
    }
}

/// Overlap and single-particle matrix elements at a given `η`, energies in
/// units of `ħω₀`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HmQuantities {
    pub eta: f64,
    /// `⟨L|R⟩ = e^{−η}`.
    pub s: f64,
    pub g: f64,
    /// `𝒩² = 1 − 2sg + g²`.
    pub norm_sq: f64,
    /// `⟨L|h|R⟩`.
    pub w: f64,
    /// `⟨L|h|L⟩`.
    pub u: f64,
    /// Signed bare tunnelling `[(1+g²)w − 2gu]/𝒩²`.
    pub gamma_bare: f64,
}

impl HmQuantities {
    /// `⟨Φ|h|Φ⟩ = [(1+g²)u − 2gw]/𝒩²`.
    pub fn orthogonal_onsite(&self) -> f64 {
        ((1.0 + self.g * self.g) * self.u - 2.0 * self.g * self.w) / self.norm_sq
    }
}

pub fn hm_quantities(eta: f64) -> Result<HmQuantities> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::Contract(format!("eta must be positive, got {eta}")));
    }
    let s = (-eta).exp();
    let g = if eta > G_SERIES_ETA {
        s / 2.0 + s * s * s / 8.0
    } else {
        // (1 − √(1−s²))/s without the cancellation at small s
        s / (1.0 + (1.0 - s * s).sqrt())
    };
    let norm_sq = 1.0 - 2.0 * s * g + g * g;
    let root = (eta / PI).sqrt();
    let w = (1.0 - root) * s;
    let u = 1.0 - root * s + eta * erfc(eta.sqrt());
    let gamma_bare = ((1.0 + g * g) * w - 2.0 * g * u) / norm_sq;
    Ok(HmQuantities {
        eta,
        s,
        g,
        norm_sq,
        w,
        u,
        gamma_bare,
    })
}

/// `c₀ = √(πm*/2) e²/(4πε_rε₀ħ^{3/2})` in Hz^½.
pub fn coulomb_ratio_c0(params: &MaterialParams) -> f64 {
    (PI * params.m_eff / 2.0).sqrt() * ELEMENTARY_CHARGE * ELEMENTARY_CHARGE
        / (4.0 * PI * params.eps_r * VACUUM_PERMITTIVITY * HBAR.powf(1.5))
}

/// `c = (e²/4πε_rε₀ã)/ħω₀` with `ã = √(2/π) a`.
pub fn coulomb_ratio_c(params: &MaterialParams) -> f64 {
    let a_tilde = (2.0 / PI).sqrt() * params.bohr_radius();
    let coulomb = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE
        / (4.0 * PI * params.eps_r * VACUUM_PERMITTIVITY * a_tilde);
    coulomb / params.hbar_omega0.joules()
}

/// Onsite repulsion `U₀ = c ħω₀`.
pub fn onsite_u0(params: &MaterialParams) -> Energy {
    params.hbar_omega0 * coulomb_ratio_c(params)
}

/// `E_C ≈ (1+c)ħω₀` for two electrons, `ħω₀` for one.
pub fn charging_energy(params: &MaterialParams, electrons: Electrons) -> Energy {
    match electrons {
        Electrons::Two => params.hbar_omega0 * (1.0 + coulomb_ratio_c(params)),
        Electrons::One => params.hbar_omega0,
    }
}

/// Two electrons on one dot without the `⟨Φ|h|Φ⟩ ≈ ħω₀` approximation:
/// `2⟨Φ|h|Φ⟩ + U₀`.
pub fn two_electron_onsite_energy_hm(eta: f64, params: &MaterialParams) -> Result<Energy> {
    let q = hm_quantities(eta)?;
    Ok(params.hbar_omega0 * (2.0 * q.orthogonal_onsite()) + onsite_u0(params))
}

/// Charging energy from the full HM diagonal, `E₀⁽²⁾ − ħω₀`.
pub fn charging_energy_hm(eta: f64, params: &MaterialParams) -> Result<Energy> {
    Ok(two_electron_onsite_energy_hm(eta, params)? - params.hbar_omega0)
}

/// Signed bare tunnel coupling `ħΓ(η)`.
pub fn tunnel_coupling(eta: f64, params: &MaterialParams) -> Result<Energy> {
    Ok(params.hbar_omega0 * hm_quantities(eta)?.gamma_bare)
}

/// `U₀ / ħ|Γ(η)|`.
pub fn interaction_ratio(eta: f64, params: &MaterialParams) -> Result<f64> {
    Ok(onsite_u0(params) / tunnel_coupling(eta, params)?.abs())
}

/// The `η` at which `U₀/ħ|Γ| = ratio`, by bisection on [`ETA_BRACKET`].
pub fn solve_eta_for_interaction_ratio(params: &MaterialParams, ratio: f64) -> Result<f64> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(Error::Contract(format!("ratio must be positive, got {ratio}")));
    }
    let f = |eta: f64| match interaction_ratio(eta, params) {
        Ok(r) => r - ratio,
        Err(_) => f64::NAN,
    };
    bisect(f, ETA_BRACKET.0, ETA_BRACKET.1, ETA_TOL, "U0/|Gamma| - ratio")
}

/// How raising the confinement rescales the tunnel coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FreezeScaling {
    /// `|Γ(η̃)| / |Γ(η)|` in units of the respective confinement energy; only
    /// the barrier ratio changes. Reproduces the reference freeze curve.
    #[default]
    BarrierOnly,
    /// Physical ratio including the `ħω̃₀/ħω₀` prefactor.
    WithConfinementScale,
}

/// `ω̃₀/ω₀ = 1 + ΔE/ħω₀`.
pub fn confinement_ratio(params: &MaterialParams, delta_e: Energy) -> f64 {
    1.0 + delta_e / params.hbar_omega0
}

/// `Γ̃/Γ` after adding `delta_e` to the confinement energy.
pub fn freeze_ratio(eta: f64, params: &MaterialParams, delta_e: Energy) -> Result<f64> {
    freeze_ratio_with(eta, params, delta_e, FreezeScaling::default())
}

pub fn freeze_ratio_with(
    eta: f64,
    params: &MaterialParams,
    delta_e: Energy,
    scaling: FreezeScaling,
) -> Result<f64> {
    if !(delta_e.joules().is_finite() && delta_e.joules() >= 0.0) {
        return Err(Error::Contract(format!(
            "applied energy must be nonnegative, got {} meV",
            delta_e.mev()
        )));
    }
    let r = confinement_ratio(params, delta_e);
    let before = hm_quantities(eta)?.gamma_bare.abs();
    let after = hm_quantities(eta * r)?.gamma_bare.abs();
    let ratio = after / before;
    Ok(match scaling {
        FreezeScaling::BarrierOnly => ratio,
        FreezeScaling::WithConfinementScale => ratio * r,
    })
}

/// Smallest `ΔE` with `freeze_ratio = target_ratio`.
pub fn required_freeze_energy(eta: f64, params: &MaterialParams, target_ratio: f64) -> Result<Energy> {
    required_freeze_energy_with(eta, params, target_ratio, FreezeScaling::default())
}

pub fn required_freeze_energy_with(
    eta: f64,
    params: &MaterialParams,
    target_ratio: f64,
    scaling: FreezeScaling,
) -> Result<Energy> {
    if !(target_ratio > 0.0 && target_ratio < 1.0) {
        return Err(Error::Contract(format!(
            "target ratio must lie in (0, 1), got {target_ratio}"
        )));
    }
    let hi = charging_energy(params, Electrons::Two) * FREEZE_BRACKET_EC;
    let f = |mev: f64| match freeze_ratio_with(eta, params, Energy::from_mev(mev), scaling) {
        Ok(r) => r.ln() - target_ratio.ln(),
        Err(_) => f64::NAN,
    };
    // relative tolerance holds for any root above hi/1000
    let tol = FREEZE_ENERGY_REL_TOL * hi.mev() * 1e-3;
    let mev = bisect(f, 0.0, hi.mev(), tol, "freeze ratio - target")?;
    Ok(Energy::from_mev(mev))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hm_limits() {
        let q = hm_quantities(1e-6).unwrap();
        assert!((q.s - 1.0).abs() < 1e-5);
        assert!((q.g - 1.0).abs() < 2e-3);
        let q = hm_quantities(40.0).unwrap();
        assert!(q.w.abs() < 1e-15);
        assert!((q.u - 1.0).abs() < 1e-15);
        assert!(q.gamma_bare.abs() < 1e-15);
        assert!(hm_quantities(0.0).is_err());
        assert!(hm_quantities(-1.0).is_err());
    }

    #[test]
    fn hm_invariants() {
        for k in 1..=60 {
            let q = hm_quantities(0.5 * k as f64).unwrap();
            assert!(q.s > 0.0 && q.s <= 1.0);
            assert!(q.g >= 0.0 && q.g < 1.0);
            assert!(q.norm_sq > 0.0);
            assert_relative_eq!(q.norm_sq, 1.0 - 2.0 * q.s * q.g + q.g * q.g, epsilon = 1e-15);
        }
    }

    #[test]
    fn g_series_matches_closed_form_at_switch() {
        let s = (-G_SERIES_ETA).exp();
        let stable = s / (1.0 + (1.0 - s * s).sqrt());
        let q = hm_quantities(G_SERIES_ETA + 1e-9).unwrap();
        assert_relative_eq!(q.g, stable, max_relative = 1e-12);
    }

    #[test]
    fn g_orthogonalizes_the_orbitals() {
        // <Φ_L|Φ_R> ∝ (1 + g²)s − 2g = 0
        for eta in [0.3, 1.0, 1.86, 4.0, 8.0] {
            let q = hm_quantities(eta).unwrap();
            assert!(((1.0 + q.g * q.g) * q.s - 2.0 * q.g).abs() < 1e-14);
        }
    }

    #[test]
    fn gaas_constants() {
        let p = MaterialParams::gaas();
        let c = coulomb_ratio_c(&p);
        assert_relative_eq!(c, 2.39, epsilon = 0.01);
        assert_relative_eq!(coulomb_ratio_c0(&p), 5.11e6, max_relative = 2e-3);
        assert_relative_eq!(coulomb_ratio_c0(&p) / p.omega0().sqrt(), c, max_relative = 1e-12);
        assert_relative_eq!(charging_energy(&p, Electrons::Two).mev(), 10.0, epsilon = 0.3);
        assert_relative_eq!(charging_energy(&p, Electrons::One).mev(), 3.0, max_relative = 1e-12);
        assert_relative_eq!(onsite_u0(&p).mev(), 7.17, epsilon = 0.02);
    }

    #[test]
    fn confinement_scaling_laws() {
        let p = MaterialParams::gaas();
        let p4 = p.with_hbar_omega0(p.hbar_omega0 * 4.0);
        assert_relative_eq!(coulomb_ratio_c(&p4), coulomb_ratio_c(&p) / 2.0, max_relative = 1e-12);
        assert_relative_eq!(onsite_u0(&p4) / onsite_u0(&p), 2.0, max_relative = 1e-12);
        assert_relative_eq!(
            confinement_ratio(&p, charging_energy(&p, Electrons::Two)),
            4.39,
            epsilon = 0.02
        );
    }

    #[test]
    fn vanishing_coulomb_makes_charging_energies_coincide() {
        let p = MaterialParams {
            eps_r: 1e30,
            ..MaterialParams::gaas()
        };
        assert!(onsite_u0(&p).mev() < 1e-20);
        assert_relative_eq!(
            charging_energy(&p, Electrons::Two).mev(),
            charging_energy(&p, Electrons::One).mev(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn hm_charging_energy_is_close_to_approximation() {
        let p = MaterialParams::gaas();
        let exact = charging_energy_hm(1.86, &p).unwrap();
        let approx = charging_energy(&p, Electrons::Two);
        assert!((exact / approx - 1.0).abs() < 0.05);
    }

    #[test]
    fn eta_solve() {
        let p = MaterialParams::gaas();
        let eta = solve_eta_for_interaction_ratio(&p, 20.0).unwrap();
        assert!((eta - 1.86).abs() <= 0.02, "eta = {eta}");
        assert_relative_eq!(interaction_ratio(eta, &p).unwrap(), 20.0, max_relative = 1e-6);
        let gamma = tunnel_coupling(eta, &p).unwrap().abs();
        assert_relative_eq!(gamma.uev(), 360.0, max_relative = 0.05);
        assert!(solve_eta_for_interaction_ratio(&p, 40.0).unwrap() > eta);
        assert!(matches!(
            solve_eta_for_interaction_ratio(&p, 1.0),
            Err(Error::Bracketing { .. })
        ));
    }

    #[test]
    fn tunnel_coupling_decays_monotonically() {
        let p = MaterialParams::gaas();
        let mut prev = f64::INFINITY;
        for k in 0..200 {
            let eta = 1.5 + 10.5 * k as f64 / 199.0;
            let g = tunnel_coupling(eta, &p).unwrap().abs().joules();
            assert!(g < prev, "not decreasing at eta = {eta}");
            prev = g;
        }
    }

    #[test]
    fn freeze_ratio_values() {
        let p = MaterialParams::gaas();
        assert_eq!(freeze_ratio(1.86, &p, Energy::ZERO).unwrap(), 1.0);
        let ec = charging_energy(&p, Electrons::Two);
        let r = freeze_ratio(1.86, &p, ec).unwrap();
        assert!((r / 0.0039 - 1.0).abs() < 0.1, "ratio = {r}");
        let r1 = freeze_ratio(1.86, &p, p.hbar_omega0).unwrap();
        assert!((r1 / 0.22 - 1.0).abs() < 0.1, "ratio = {r1}");
        let rs = freeze_ratio_with(1.86, &p, ec, FreezeScaling::WithConfinementScale).unwrap();
        assert_relative_eq!(rs, r * confinement_ratio(&p, ec), max_relative = 1e-12);
        assert!(freeze_ratio(1.86, &p, Energy::from_mev(-1.0)).is_err());
    }

    #[test]
    fn freeze_ratio_decreases_with_energy() {
        let p = MaterialParams::gaas();
        let mut prev = 1.0 + 1e-12;
        for k in 0..100 {
            let r = freeze_ratio(1.86, &p, Energy::from_mev(0.2 * k as f64)).unwrap();
            assert!(r < prev);
            prev = r;
        }
    }

    #[test]
    fn freeze_energy_inversion() {
        let p = MaterialParams::gaas();
        let ec = charging_energy(&p, Electrons::Two);
        let e1 = required_freeze_energy(1.86, &p, 0.01).unwrap();
        assert!((e1 / ec - 0.83).abs() <= 0.02, "{}", e1 / ec);
        assert_relative_eq!(freeze_ratio(1.86, &p, e1).unwrap(), 0.01, max_relative = 1e-5);
        let e2 = required_freeze_energy(1.86, &p, 0.004).unwrap();
        assert!((e2 / ec - 1.0).abs() < 0.05, "{}", e2 / ec);
        assert!(required_freeze_energy(1.86, &p, 1.5).is_err());
        assert!(matches!(
            required_freeze_energy(1.86, &p, 1e-300),
            Err(Error::Bracketing { .. })
        ));
    }

    #[test]
    fn energy_units() {
        let e = Energy::from_mev(3.0);
        assert_relative_eq!(e.uev(), 3000.0, max_relative = 1e-12);
        assert_relative_eq!(Energy::from_uev(360.0).inverse_time(), 1.828e-12, max_relative = 1e-3);
    }

    #[test]
    fn params_validation() {
        assert!(MaterialParams::gaas().validate().is_ok());
        let p = MaterialParams {
            eta: 0.9,
            ..MaterialParams::gaas()
        };
        assert!(p.validate().is_err());
        assert!(MaterialParams::new(-1.0, 12.9, Energy::from_mev(3.0), 1.86).is_err());
        let p = MaterialParams::gaas();
        assert_relative_eq!(p.half_separation(p.eta).powi(2) / p.bohr_radius().powi(2), p.eta, max_relative = 1e-12);
        assert_relative_eq!(p.eta0() * p.omega0(), p.eta, max_relative = 1e-12);
        assert_relative_eq!(p.barrier_height(2.0).mev(), 3.0, max_relative = 1e-12);
    }
}
