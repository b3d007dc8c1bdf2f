//! The four-step two-electron bus and its budgets.
//!
//! (1) split the pair across a double dot, (2)–(3) send each electron down an
//! engineered chain, (4) recombine. Stages are treated as independent ideal
//! steps separated by freezing, so the end-to-end fidelity is the product of
//! stage fidelities.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::chain::{build_h1, build_h2, pst_couplings, pst_couplings_unnormalized, pst_transfer_time, ChainSpec};
use crate::energetics::{pst_cost, CostConfig, CostReport, Electrons, Energy, MaterialParams};
use crate::error::{Error, Result};
use crate::propagator::{eigendecompose, peak_fidelity_between, transfer_fidelity};
use crate::separation::{DoubleDotDynamics, DoubleDotSpec};

/// Charge-qubit coherence times.
pub const CHARGE_QUBIT_T1_S: f64 = 30e-9;
pub const CHARGE_QUBIT_T2_S: f64 = 7e-9;
/// Largest two-electron basis accepted by [`pretty_good_two_electron_transfer`].
pub const MAX_TWO_ELECTRON_DIM: usize = 4096;
/// Half-width of the search window around `π/2`, relative.
pub const PRETTY_GOOD_WINDOW: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceBudget {
    pub t1_s: f64,
    pub t2_s: f64,
    pub transfer_time_s: f64,
}

impl CoherenceBudget {
    pub fn new(t1_s: f64, t2_s: f64, transfer_time_s: f64) -> Result<Self> {
        for (name, x) in [("T1", t1_s), ("T2", t2_s), ("transfer time", transfer_time_s)] {
            if !(x.is_finite() && x > 0.0) {
                return Err(Error::Contract(format!("{name} must be positive, got {x}")));
            }
        }
        Ok(Self {
            t1_s,
            t2_s,
            transfer_time_s,
        })
    }

    pub fn charge_qubit(transfer_time_s: f64) -> Result<Self> {
        Self::new(CHARGE_QUBIT_T1_S, CHARGE_QUBIT_T2_S, transfer_time_s)
    }
}

/// Whether the transfer finishes inside the dephasing time.
pub fn coherence_feasibility(budget: &CoherenceBudget) -> bool {
    budget.transfer_time_s < budget.t2_s
}

/// Material, cost and coherence settings shared by the bus runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BusContext {
    pub params: MaterialParams,
    pub costs: CostConfig,
    pub t1_s: f64,
    pub t2_s: f64,
}

impl Default for BusContext {
    fn default() -> Self {
        Self {
            params: MaterialParams::gaas(),
            costs: CostConfig::default(),
            t1_s: CHARGE_QUBIT_T1_S,
            t2_s: CHARGE_QUBIT_T2_S,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolReport {
    pub n_dots: usize,
    /// Separate, transfer up, transfer down, recombine.
    pub stage_fidelities: [f64; 4],
    pub total_fidelity: f64,
    pub separation_time_ps: f64,
    pub chain_transfer_time_ps: f64,
    pub total_time_ps: f64,
    #[serde(flatten)]
    pub energy: CostReport,
    pub feasible_within_t2: bool,
}

impl ProtocolReport {
    pub fn total_time_s(&self) -> f64 {
        self.total_time_ps * 1e-12
    }
}

/// Fidelity of `1 → N` on the engineered chain at its transfer time.
pub fn chain_transfer_fidelity(n_dots: usize) -> Result<f64> {
    let spec = ChainSpec::from_couplings(pst_couplings(n_dots, 1.0)?)?;
    let decomp = eigendecompose(&build_h1(&spec)?)?;
    transfer_fidelity(&decomp, 0, n_dots - 1, pst_transfer_time(n_dots, 1.0))
}

fn check_rate(hbar_gamma: Energy) -> Result<()> {
    if !(hbar_gamma.joules().is_finite() && hbar_gamma.joules() > 0.0) {
        return Err(Error::Contract(format!(
            "tunnel coupling must be positive, got {} ueV",
            hbar_gamma.uev()
        )));
    }
    Ok(())
}

/// Runs the four-step protocol over `n_dots` with maximum coupling `ħΓ`.
pub fn run_two_electron_bus(
    n_dots: usize,
    hbar_gamma: Energy,
    separation: &DoubleDotSpec,
    ctx: &BusContext,
) -> Result<ProtocolReport> {
    check_rate(hbar_gamma)?;
    let dynamics = DoubleDotDynamics::new(separation)?;
    let sep = dynamics.separation(separation.default_window(), 2)?;
    let recombine = dynamics.recombination_fidelity(sep.t_opt)?;
    let chain = chain_transfer_fidelity(n_dots)?;
    let stage_fidelities = [sep.fidelity, chain, chain, recombine];

    let unit = hbar_gamma.inverse_time() * 1e12;
    let separation_time_ps = sep.t_opt * unit;
    let chain_transfer_time_ps = pst_transfer_time(n_dots, 1.0) * unit;
    let total_time_ps = 2.0 * separation_time_ps + 2.0 * chain_transfer_time_ps;

    let energy = pst_cost(&ctx.params, Electrons::Two, sep.suppression_m.abs(), &ctx.costs)?.for_chain(n_dots);
    let budget = CoherenceBudget::new(ctx.t1_s, ctx.t2_s, total_time_ps * 1e-12)?;
    Ok(ProtocolReport {
        n_dots,
        stage_fidelities,
        total_fidelity: stage_fidelities.iter().product(),
        separation_time_ps,
        chain_transfer_time_ps,
        total_time_ps,
        energy,
        feasible_within_t2: coherence_feasibility(&budget),
    })
}

/// A single electron needs only one chain transfer.
pub fn run_single_electron_bus(n_dots: usize, hbar_gamma: Energy, ctx: &BusContext) -> Result<ProtocolReport> {
    check_rate(hbar_gamma)?;
    let chain = chain_transfer_fidelity(n_dots)?;
    let stage_fidelities = [1.0, chain, 1.0, 1.0];
    let chain_transfer_time_ps = pst_transfer_time(n_dots, 1.0) * hbar_gamma.inverse_time() * 1e12;
    let energy = pst_cost(&ctx.params, Electrons::One, 0.0, &ctx.costs)?.for_chain(n_dots);
    let budget = CoherenceBudget::new(ctx.t1_s, ctx.t2_s, chain_transfer_time_ps * 1e-12)?;
    Ok(ProtocolReport {
        n_dots,
        stage_fidelities,
        total_fidelity: stage_fidelities.iter().product(),
        separation_time_ps: 0.0,
        chain_transfer_time_ps,
        total_time_ps: chain_transfer_time_ps,
        energy,
        feasible_within_t2: coherence_feasibility(&budget),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrettyGoodTransfer {
    pub t_peak: f64,
    pub fidelity: f64,
}

/// Both electrons on the unnormalized engineered chain with `U =
/// u_over_gamma_min · Γ_{1,2}` and `V = 0`; peak `|1,1⟩ → |N,N⟩` fidelity near
/// `t = π/2`.
pub fn pretty_good_two_electron_transfer(n_dots: usize, u_over_gamma_min: f64) -> Result<PrettyGoodTransfer> {
    if n_dots < 2 {
        return Err(Error::InvalidChain(format!("need at least 2 dots, got {n_dots}")));
    }
    let dim = n_dots * n_dots;
    if dim > MAX_TWO_ELECTRON_DIM {
        return Err(Error::Contract(format!(
            "two-electron dimension {dim} exceeds {MAX_TWO_ELECTRON_DIM}"
        )));
    }
    let couplings = pst_couplings_unnormalized(n_dots)?;
    let gamma_min = couplings[0];
    let spec = ChainSpec::from_couplings(couplings)?.with_interactions(u_over_gamma_min * gamma_min, 0.0)?;
    let decomp = eigendecompose(&build_h2(&spec)?)?;
    let (t_peak, fidelity) = peak_fidelity_between(
        &decomp,
        0,
        dim - 1,
        FRAC_PI_2 * (1.0 - PRETTY_GOOD_WINDOW),
        FRAC_PI_2 * (1.0 + PRETTY_GOOD_WINDOW),
    )?;
    Ok(PrettyGoodTransfer { t_peak, fidelity })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentedTransfer {
    pub segments: usize,
    pub fidelity: f64,
    pub energy_mev: f64,
}

/// Composes `⌈n_total/segment_length⌉` identical segments.
pub fn segmented_transfer(
    n_total: usize,
    segment_length: usize,
    per_segment_fidelity: f64,
    per_segment_energy: Energy,
) -> Result<SegmentedTransfer> {
    if segment_length < 2 {
        return Err(Error::Contract(format!(
            "segments need at least 2 dots, got {segment_length}"
        )));
    }
    if n_total < segment_length {
        return Err(Error::Contract(format!(
            "chain of {n_total} dots is shorter than one segment of {segment_length}"
        )));
    }
    let segments = n_total.div_ceil(segment_length);
    Ok(SegmentedTransfer {
        segments,
        fidelity: per_segment_fidelity.powi(segments as i32),
        energy_mev: (per_segment_energy * segments as f64).mev(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SegmentedReport {
    pub n_total: usize,
    pub segment_length: usize,
    pub segments: usize,
    pub total_fidelity: f64,
    pub energy_mev: f64,
    pub total_time_ps: f64,
    pub feasible_within_t2: bool,
    pub segment: ProtocolReport,
}

/// Two-electron bus over `n_total` dots made of repeated segments.
pub fn run_segmented_two_electron_bus(
    n_total: usize,
    segment_length: usize,
    hbar_gamma: Energy,
    separation: &DoubleDotSpec,
    ctx: &BusContext,
) -> Result<SegmentedReport> {
    let segment = run_two_electron_bus(segment_length, hbar_gamma, separation, ctx)?;
    let composed = segmented_transfer(n_total, segment_length, segment.total_fidelity, segment.energy.energy())?;
    let total_time_ps = segment.total_time_ps * composed.segments as f64;
    let budget = CoherenceBudget::new(ctx.t1_s, ctx.t2_s, segment.total_time_s())?;
    Ok(SegmentedReport {
        n_total,
        segment_length,
        segments: composed.segments,
        total_fidelity: composed.fidelity,
        energy_mev: composed.energy_mev,
        total_time_ps,
        // phase only has to survive one segment
        feasible_within_t2: coherence_feasibility(&budget),
        segment,
    })
}

/// Probability that a majority of `m` independent runs succeed.
pub fn majority_vote_success(p_single: f64, m_repetitions: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_single) {
        return Err(Error::Contract(format!(
            "probability must lie in [0, 1], got {p_single}"
        )));
    }
    if m_repetitions.is_multiple_of(2) {
        return Err(Error::Contract(format!(
            "majority vote needs an odd number of runs, got {m_repetitions}"
        )));
    }
    let m = m_repetitions;
    if p_single == 0.0 || p_single == 1.0 {
        return Ok(p_single);
    }
    // sum whichever tail is small so the result keeps full relative precision
    let (lp, lq) = (p_single.ln(), (1.0 - p_single).ln());
    let ln_m_fact = libm::lgamma(f64::from(m) + 1.0);
    let term = |k: u32| {
        let ln_binom = ln_m_fact - libm::lgamma(f64::from(k) + 1.0) - libm::lgamma(f64::from(m - k) + 1.0);
        (ln_binom + f64::from(k) * lp + f64::from(m - k) * lq).exp()
    };
    let half = m.div_ceil(2);
    if p_single >= 0.5 {
        let fail: f64 = (0..half).map(term).sum();
        Ok((1.0 - fail).clamp(0.0, 1.0))
    } else {
        let win: f64 = (half..=m).map(term).sum();
        Ok(win.clamp(0.0, 1.0))
    }
}
