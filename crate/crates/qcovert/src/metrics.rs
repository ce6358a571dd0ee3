//! Closed-form receiver exponents, bounds, gains and link-level estimates.
//!
//! Exponents are per η² (amplitude transmissivity squared) and per mode.
//! `beta_col`/`beta_loc` default to BPSK; `Keying::Ook` returns the on-off
//! keying values, which are four times smaller.

use serde::Serialize;
use statrs::function::erf::erfc;

use crate::error::{invalid, Result};
use crate::transmitters::{cat_weights, SchmidtData};

/// Planck constant (J s) and Boltzmann constant (J/K).
pub const PLANCK: f64 = 6.626_070_15e-34;
pub const BOLTZMANN: f64 = 1.380_649e-23;

pub fn bose_factor(n: f64) -> f64 {
    n / (1.0 + n)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelParams {
    pub eta: f64,
    pub nb: f64,
}

impl ChannelParams {
    pub fn new(eta: f64, nb: f64) -> Result<Self> {
        if !(eta > 0.0 && eta <= 1.0) {
            return invalid(format!("eta {eta} outside (0,1]"));
        }
        if nb < 0.0 {
            return invalid("N_B must be >= 0");
        }
        Ok(Self { eta, nb })
    }
    pub fn c_b(&self) -> f64 {
        bose_factor(self.nb)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Keying {
    Bpsk,
    Ook,
}

impl Keying {
    fn factor(self) -> f64 {
        match self {
            Keying::Bpsk => 1.0,
            Keying::Ook => 0.25,
        }
    }
}

fn pair_sum(s: &SchmidtData, term: impl Fn(f64, f64) -> f64) -> f64 {
    let p = &s.probabilities;
    let mut acc = 0.0;
    for (k, &pk) in p.iter().enumerate() {
        for (kp, &pkp) in p.iter().enumerate() {
            let w = pk * pkp;
            if w == 0.0 {
                continue;
            }
            let m2 = s.elements[(kp, k)].norm_sqr();
            if m2 == 0.0 {
                continue;
            }
            acc += w * m2 / term(pk, pkp);
        }
    }
    acc
}

/// Collective (Chernoff) exponent per η².
pub fn beta_col(s: &SchmidtData, nb: f64) -> f64 {
    beta_col_keyed(s, nb, Keying::Bpsk)
}

pub fn beta_col_keyed(s: &SchmidtData, nb: f64, keying: Keying) -> f64 {
    let cb = bose_factor(nb);
    let sum = pair_sum(s, |pk, pkp| (pkp.sqrt() + pk.sqrt() * cb.sqrt()).powi(2));
    4.0 / (1.0 + nb) * sum * keying.factor()
}

/// Local (QFI-based) exponent per η², equal to F/2 for BPSK.
pub fn beta_loc(s: &SchmidtData, nb: f64) -> f64 {
    beta_loc_keyed(s, nb, Keying::Bpsk)
}

pub fn beta_loc_keyed(s: &SchmidtData, nb: f64, keying: Keying) -> f64 {
    let cb = bose_factor(nb);
    let sum = pair_sum(s, |pk, pkp| pkp + pk * cb);
    2.0 / (1.0 + nb) * sum * keying.factor()
}

/// Quantum Fisher information for the amplitude parameter at zero signal.
pub fn fisher_information(s: &SchmidtData, nb: f64) -> f64 {
    2.0 * beta_loc(s, nb)
}

/// Upper bounds (collective, local) over all transmitters with N_S photons.
pub fn ultimate_bounds(ns: f64, nb: f64) -> (f64, f64) {
    let cb = bose_factor(nb);
    let second = if cb == 0.0 { f64::INFINITY } else { (ns + 0.5) / (cb.sqrt() * (1.0 + nb)) };
    let col = (4.0 * ns / (1.0 + nb)).min(second);
    let loc = (2.0 * ns / (1.0 + nb)).min(second);
    (col, loc)
}

pub fn coherent_closed_forms(ns: f64, nb: f64) -> (f64, f64) {
    let cb = bose_factor(nb);
    (4.0 * ns / ((1.0 + cb.sqrt()).powi(2) * (1.0 + nb)), 2.0 * ns / ((1.0 + cb) * (1.0 + nb)))
}

pub fn tmsv_closed_forms(ns: f64, nb: f64) -> (f64, f64) {
    let (cb, cs) = (bose_factor(nb), bose_factor(ns));
    (
        4.0 * ns / ((1.0 + (cs * cb).sqrt()).powi(2) * (1.0 + nb)),
        2.0 * ns / ((1.0 + cs * cb) * (1.0 + nb)),
    )
}

/// (f_col, f_loc) for the cat-state transmitter, β = f·N_S/(1+N_B).
pub fn sc_f_factors(ns: f64, nb: f64) -> (f64, f64) {
    let cb = bose_factor(nb);
    let (lp, lm) = cat_weights(ns);
    let sq = |x: f64| x.sqrt();
    let mut fcol = 4.0 * lp * lp / (sq(lp) + sq(lm) * sq(cb)).powi(2);
    let mut floc = 2.0 * lp * lp / (lp + lm * cb);
    if lm > 0.0 {
        fcol += 4.0 * lm * lm / (sq(lm) + sq(lp) * sq(cb)).powi(2);
        floc += 2.0 * lm * lm / (lm + lp * cb);
    }
    (fcol, floc)
}

pub fn sc_closed_forms(ns: f64, nb: f64) -> (f64, f64) {
    let (fc, fl) = sc_f_factors(ns, nb);
    (fc * ns / (1.0 + nb), fl * ns / (1.0 + nb))
}

pub fn gain_db(ratio: f64) -> f64 {
    10.0 * ratio.log10()
}

/// Largest collective gain over coherent states, reached as N_S → 0.
pub fn max_collective_gain(nb: f64) -> f64 {
    (1.0 + bose_factor(nb).sqrt()).powi(2)
}

pub fn max_local_gain(nb: f64) -> f64 {
    1.0 + bose_factor(nb)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReceiverReport {
    pub beta_col: f64,
    pub beta_loc: f64,
    pub bound_col: f64,
    pub bound_loc: f64,
    pub gain_col_db: f64,
    pub gain_loc_db: f64,
}

/// Exponents of a transmitter with gains over a coherent state of equal energy.
pub fn receiver_report(s: &SchmidtData, nb: f64) -> ReceiverReport {
    let (bc, bl) = (beta_col(s, nb), beta_loc(s, nb));
    let (cc, cl) = coherent_closed_forms(s.mean_photons, nb);
    let (uc, ul) = ultimate_bounds(s.mean_photons, nb);
    ReceiverReport {
        beta_col: bc,
        beta_loc: bl,
        bound_col: uc,
        bound_loc: ul,
        gain_col_db: gain_db(bc / cc),
        gain_loc_db: gain_db(bl / cl),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorProbability {
    /// ½ exp(−β η² M)
    pub exponential_bound: f64,
    /// ½ erfc(√(β η² M)): a threshold on a Gaussian statistic whose
    /// squared SNR is 2βη²M. Differs from 1 − erf(·) by the ½ prefactor.
    pub gaussian_threshold: f64,
}

pub fn error_probability(beta: f64, eta: f64, m: u64) -> Result<ErrorProbability> {
    if m < 1 {
        return invalid("M must be >= 1");
    }
    if beta < 0.0 {
        return invalid("beta must be >= 0");
    }
    let x = beta * eta * eta * m as f64;
    Ok(ErrorProbability { exponential_bound: 0.5 * (-x).exp(), gaussian_threshold: 0.5 * erfc(x.sqrt()) })
}

/// Exponent per η² of homodyne detection on coherent BPSK at finite η.
/// Tends to the coherent local exponent as η → 0.
pub fn homodyne_exponent(eta: f64, ns: f64, nb: f64) -> f64 {
    2.0 * ns / (1.0 + 2.0 * (1.0 - eta * eta) * nb)
}

/// Free-space link: η = 10^{−R l/10} · A/(4πR²), R in km for the loss and
/// in metres for the geometric spread.
pub fn link_budget(range_km: f64, loss_db_per_km: f64, antenna_area_m2: f64) -> Result<f64> {
    if range_km <= 0.0 || loss_db_per_km < 0.0 || antenna_area_m2 < 0.0 {
        return invalid("range must be > 0, loss and area >= 0");
    }
    let r_m = range_km * 1e3;
    Ok(10f64.powf(-range_km * loss_db_per_km / 10.0) * antenna_area_m2 / (4.0 * std::f64::consts::PI * r_m * r_m))
}

/// M ≈ ratio · N_B/(η² N_S) · ln(1/p_err).
pub fn time_bandwidth(p_err: f64, eta: f64, ns: f64, nb: f64, beta_ratio: f64) -> Result<f64> {
    if !(p_err > 0.0 && p_err < 0.5) {
        return invalid("target error must lie in (0, 1/2)");
    }
    if eta <= 0.0 || ns <= 0.0 || nb < 0.0 || beta_ratio <= 0.0 {
        return invalid("eta, N_S, ratio must be > 0");
    }
    Ok(beta_ratio * nb / (eta * eta * ns) * (1.0 / p_err).ln())
}

/// Bose-Einstein occupation at `frequency_ghz` and `temperature_k`.
pub fn thermal_occupation(frequency_ghz: f64, temperature_k: f64) -> Result<f64> {
    if frequency_ghz <= 0.0 || temperature_k < 0.0 {
        return invalid("frequency must be > 0 and temperature >= 0");
    }
    if temperature_k == 0.0 {
        return Ok(0.0);
    }
    let x = PLANCK * frequency_ghz * 1e9 / (BOLTZMANN * temperature_k);
    Ok(1.0 / x.exp_m1())
}
