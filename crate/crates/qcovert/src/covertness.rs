//! Covert photon budgets, Eve bounds, square-root-law planning and key accounting.

use serde::Serialize;
use std::f64::consts::{LN_2, PI};

use crate::error::{invalid, Error, Result};
use crate::gaussian::{closed_form_eve_relent, relent_leading_order};
use crate::metrics::bose_factor;

/// Slack on n·D ≤ 8δ² that absorbs third-order terms in N_S.
pub const BUDGET_SLACK: f64 = 0.05;

/// Photon-budget constant 4√(η²N_B(1+η²N_B))/(1−η²).
pub fn a_const(eta: f64, nb: f64) -> Result<f64> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("eta {eta} must lie in (0,1)")));
    }
    if nb < 0.0 {
        return invalid("N_B must be >= 0");
    }
    let e2 = eta * eta;
    Ok(4.0 * (e2 * nb * (1.0 + e2 * nb)).sqrt() / (1.0 - e2))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CovertBudget {
    pub eta: f64,
    pub nb: f64,
    pub delta: f64,
    pub n: f64,
    pub a_const: f64,
    pub ns_max: f64,
    /// n · D(on ‖ off) at N_S_max from the closed form.
    pub total_relent: f64,
    /// n · D from the second-order expansion (equals 8δ² by construction).
    pub total_relent_leading: f64,
    pub verified: bool,
}

fn check_delta_n(delta: f64, n: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 0.5) {
        return invalid(format!("delta {delta} outside (0, 1/2)"));
    }
    if n < 1.0 {
        return invalid("n must be >= 1");
    }
    Ok(())
}

pub fn covert_photon_budget(eta: f64, nb: f64, delta: f64, n: f64) -> Result<CovertBudget> {
    check_delta_n(delta, n)?;
    let a = a_const(eta, nb)?;
    let ns_max = a * delta / n.sqrt();
    let total = n * closed_form_eve_relent(eta, nb, ns_max)?;
    let leading = n * relent_leading_order(eta, nb, ns_max)?;
    let verified = total <= 8.0 * delta * delta * (1.0 + BUDGET_SLACK);
    Ok(CovertBudget { eta, nb, delta, n, a_const: a, ns_max, total_relent: total, total_relent_leading: leading, verified })
}

/// Pinsker-type lower bound ½ − √(D/8) on Eve's error, clamped at 0.
pub fn eve_error_lower_bound(total_relative_entropy: f64) -> f64 {
    (0.5 - (total_relative_entropy.max(0.0) / 8.0).sqrt()).max(0.0)
}

/// Fraction of modes usable at a fixed per-mode power N_S.
pub fn covert_fraction(eta: f64, nb: f64, delta: f64, n: f64, ns_fixed: f64) -> Result<f64> {
    check_delta_n(delta, n)?;
    if ns_fixed <= 0.0 {
        return invalid("N_S must be > 0");
    }
    Ok((a_const(eta, nb)? * delta / (ns_fixed * n.sqrt())).min(1.0))
}

/// Channel constant (8/(π ln 2)) c_B η⁴.
pub fn beta_cov(eta: f64, nb: f64) -> f64 {
    8.0 / (PI * LN_2) * bose_factor(nb) * eta.powi(4)
}

fn check_beta_det(beta_det: u8) -> Result<()> {
    if ![1u8, 2, 4].contains(&beta_det) {
        return invalid(format!("beta_det {beta_det} must be 1, 2 or 4"));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SqrtLawBits {
    pub m_bar: u64,
    /// β_det β_cov δ √n
    pub leading: f64,
    /// log₂ ε
    pub log2_epsilon: f64,
}

pub fn sqrt_law_bits(eta: f64, nb: f64, delta: f64, epsilon: f64, n: f64, beta_det: u8) -> Result<SqrtLawBits> {
    check_beta_det(beta_det)?;
    check_delta_n(delta, n)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return invalid("epsilon must lie in (0,1)");
    }
    let leading = beta_det as f64 * beta_cov(eta, nb) * delta * n.sqrt();
    let l2 = epsilon.log2();
    let raw = (leading + l2).floor();
    Ok(SqrtLawBits { m_bar: if raw > 0.0 { raw as u64 } else { 0 }, leading, log2_epsilon: l2 })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolPlan {
    pub n: u64,
    pub m: u64,
    pub modes_per_symbol: u64,
    pub m_bar: u64,
    pub epsilon: f64,
    pub delta: f64,
    pub ns: f64,
    pub beta_det: u8,
    pub beta_cov: f64,
    pub probabilistic: bool,
    pub tau_fraction: f64,
    pub warnings: Vec<String>,
}

/// Plan with n = m·M modes at the deterministic photon budget.
pub fn plan_protocol(
    eta: f64,
    nb: f64,
    delta: f64,
    epsilon: f64,
    m: u64,
    modes_per_symbol: u64,
    beta_det: u8,
) -> Result<ProtocolPlan> {
    if m == 0 || modes_per_symbol == 0 {
        return invalid("m and M must be >= 1");
    }
    let n = m * modes_per_symbol;
    let budget = covert_photon_budget(eta, nb, delta, n as f64)?;
    let bits = sqrt_law_bits(eta, nb, delta, epsilon, n as f64, beta_det)?;
    let mut warnings = Vec::new();
    let mns = modes_per_symbol as f64 * budget.ns_max;
    if mns > 0.1 {
        warnings.push(format!("M*N_S = {mns:.3} is not small; the random-coding bound assumes M*N_S -> 0"));
    }
    if bits.m_bar == 0 {
        warnings.push("no covert bits at these parameters".into());
    }
    Ok(ProtocolPlan {
        n,
        m,
        modes_per_symbol,
        m_bar: bits.m_bar,
        epsilon,
        delta,
        ns: budget.ns_max,
        beta_det,
        beta_cov: beta_cov(eta, nb),
        probabilistic: false,
        tau_fraction: 1.0,
        warnings,
    })
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq, Eq)]
pub struct KeyCost {
    pub phase_bits: u64,
    pub selection_bits: u64,
    pub frame_bits: u64,
    pub total: u64,
}

/// Shared-secret bit counts. Deterministic: n·log₂|A| phase bits.
/// Probabilistic: ⌈√n⌉·⌈log₂n⌉ selection bits plus phase bits for the
/// ⌈√n⌉ selected modes. An optional frame mask costs one bit per frame.
/// The constants are a planning convention, not a bound.
pub fn key_cost(n: u64, probabilistic: bool, frames: Option<u64>, alphabet: u32) -> Result<KeyCost> {
    if n == 0 || alphabet < 2 {
        return invalid("n >= 1 and alphabet >= 2 required");
    }
    let per_mode = (alphabet as f64).log2().ceil() as u64;
    let (phase, sel) = if probabilistic {
        let used = (n as f64).sqrt().ceil() as u64;
        let l = (n as f64).log2().ceil().max(1.0) as u64;
        (used * per_mode, used * l)
    } else {
        (n * per_mode, 0)
    };
    let frame_bits = frames.unwrap_or(0);
    Ok(KeyCost { phase_bits: phase, selection_bits: sel, frame_bits, total: phase + sel + frame_bits })
}
