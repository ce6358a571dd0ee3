//! Shot-level simulation: one-time-pad BPSK over the thermal-loss channel,
//! homodyne and correlation receivers, Eve's discrimination problem and a
//! toy random-coding experiment.
//!
//! Every experiment splits its trials into fixed chunks; chunk `k` draws
//! from a ChaCha stream `k` under the experiment seed, so results do not
//! depend on the thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal as StatNormal};

use crate::error::{invalid, Result};
use crate::fock::{helstrom_error, relative_entropy, thermal_cutoff, DensityOperator, DEFAULT_CUTOFF_CAP, TAIL_TOL};
use crate::gaussian::{
    closed_form_eve_relent, correlation_observable_moments, gaussian_loss_channel, passive_two_mode_fock,
    EveChannelInputs, GaussianState,
};
use crate::linalg::c;

pub const CHUNK: u64 = 4096;
/// Above this many shots a slot's sample mean is drawn as a single Gaussian.
pub const PER_SHOT_LIMIT: u64 = 4096;
const WILSON_Z: f64 = 1.959_963_984_540_054;

const TAG_HOMODYNE: u64 = 0x686f_6d6f;
const TAG_TMSV: u64 = 0x746d_7376;
const TAG_CODING: u64 = 0x636f_6465;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlotConfig {
    pub eta: f64,
    pub ns: f64,
    pub nb: f64,
    /// Shots per symbol.
    pub m: u64,
    pub seed: u64,
    /// Apply and remove a random {0, π} phase per symbol.
    pub pad: bool,
}

impl SlotConfig {
    pub fn new(eta: f64, ns: f64, nb: f64, m: u64, seed: u64) -> Result<Self> {
        let s = Self { eta, ns, nb, m, seed, pad: true };
        s.validate()?;
        Ok(s)
    }
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 {
            return invalid("M must be >= 1");
        }
        if !(0.0..=1.0).contains(&self.eta) || self.ns < 0.0 || self.nb < 0.0 {
            return invalid("eta in [0,1], N_S >= 0, N_B >= 0 required");
        }
        Ok(())
    }
}

/// Empirical probability with a 95% Wilson interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub successes: u64,
    pub trials: u64,
    pub p: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Binomial standard error √(p(1−p)/n).
    pub sigma: f64,
}

pub fn wilson(successes: u64, trials: u64) -> Estimate {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Estimate {
        successes,
        trials,
        p,
        ci_low: if successes == 0 { 0.0 } else { (centre - half).max(0.0) },
        ci_high: if successes == trials { 1.0 } else { (centre + half).min(1.0) },
        sigma: (p * (1.0 - p) / n).sqrt(),
    }
}

/// Per-shot exponent from an error rate at M shots, inverting
/// p = ½ erfc(√(βM)): β = [Q⁻¹(p)]²/(2M). Less biased than −ln p / M,
/// which carries the erfc prefactor.
pub fn exponent_from_error(p: f64, m: u64) -> Result<f64> {
    if !(p > 0.0 && p < 0.5) {
        return invalid(format!("error rate {p} must lie in (0, 1/2)"));
    }
    let q = StatNormal::new(0.0, 1.0).unwrap().inverse_cdf(1.0 - p);
    Ok(q * q / (2.0 * m as f64))
}

fn rng_for(seed: u64, tag: u64, chunk: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed ^ tag.rotate_left(32));
    r.set_stream(chunk);
    r
}

/// Runs `trials` Bernoulli trials in deterministic chunks and counts errors.
fn count_errors<F>(trials: u64, seed: u64, tag: u64, trial: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(seed, tag, k);
            let n = CHUNK.min(trials - k * CHUNK);
            (0..n).filter(|_| trial(&mut rng)).count() as u64
        })
        .sum()
}

/// One BPSK symbol: random bit and pad, signal amplitude ±`amp` per shot,
/// noise drawn in the decoded frame. Returns true on a decision error.
fn bpsk_symbol(rng: &mut ChaCha8Rng, amp: f64, shot_sd: f64, m: u64, pad: bool, per_shot: bool) -> bool {
    let bit = rng.gen::<bool>();
    // the key is drawn either way so pad on/off runs share one random stream
    let key = rng.gen::<bool>() && pad;
    let sent = bit ^ key;
    let sign = |b: bool| if b { -1.0 } else { 1.0 };
    // channel output mean, then the pad is removed at Bob
    let decoded_mean = sign(sent) * amp * sign(key);
    let mean = if per_shot && m <= PER_SHOT_LIMIT {
        let noise = Normal::new(0.0, shot_sd).unwrap();
        let total: f64 = (0..m).map(|_| decoded_mean + noise.sample(rng)).sum();
        total / m as f64
    } else {
        let z: f64 = StandardNormal.sample(rng);
        decoded_mean + z * shot_sd / (m as f64).sqrt()
    };
    (mean < 0.0) != bit
}

/// Per-shot x-quadrature mean η√(2N_S) and variance ½ + (1−η²)N_B.
pub fn homodyne_shot_moments(eta: f64, ns: f64, nb: f64) -> (f64, f64) {
    (eta * (2.0 * ns).sqrt(), 0.5 + (1.0 - eta * eta) * nb)
}

pub fn simulate_coherent_homodyne(cfg: &SlotConfig, trials: u64) -> Result<Estimate> {
    cfg.validate()?;
    if trials < 100 {
        return invalid("trials must be >= 100");
    }
    let (amp, var) = homodyne_shot_moments(cfg.eta, cfg.ns, cfg.nb);
    let sd = var.sqrt();
    let errors = count_errors(trials, cfg.seed, TAG_HOMODYNE, |r| bpsk_symbol(r, amp, sd, cfg.m, cfg.pad, true));
    Ok(wilson(errors, trials))
}

/// Per-shot mean and variance of x_I x_R − p_I p_R on the (idler, return)
/// state of a TMSV sent through the thermal-loss channel (φ = 0).
pub fn tmsv_shot_moments(eta: f64, ns: f64, nb: f64) -> Result<(f64, f64)> {
    let st = gaussian_loss_channel(&GaussianState::tmsv(ns)?, eta * eta, nb, 1)?;
    correlation_observable_moments(&st)
}

/// Correlation receiver at the level of M-shot sample means.
pub fn simulate_tmsv_local(cfg: &SlotConfig, trials: u64) -> Result<Estimate> {
    cfg.validate()?;
    if trials < 100 {
        return invalid("trials must be >= 100");
    }
    let (mean, var) = tmsv_shot_moments(cfg.eta, cfg.ns, cfg.nb)?;
    let sd = var.sqrt();
    // per-shot values are not Gaussian: only the M-shot mean is drawn
    let errors = count_errors(trials, cfg.seed, TAG_TMSV, |r| bpsk_symbol(r, mean, sd, cfg.m, cfg.pad, false));
    Ok(wilson(errors, trials))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EveOutcome {
    /// Exact Helstrom error on the n-pair problem, when tractable.
    pub helstrom: Option<f64>,
    /// n · D(on ‖ off), exact for one pair when tractable, Gaussian closed
    /// form (an upper bound for the phase-averaged state) otherwise.
    pub total_relent: f64,
    /// ½ − √(D/8)
    pub lower_bound: f64,
    pub exact: bool,
}

/// Largest Fock dimension handled by the exact branch.
pub const EVE_EXACT_DIM: usize = 2500;

/// Eve's (outbound, return) state with the BPSK phase averaged out.
pub fn eve_state(eta: f64, nb: f64, ns: f64, cutoff: usize) -> Result<DensityOperator> {
    let mut acc: Option<DensityOperator> = None;
    for phase in [0.0, std::f64::consts::PI] {
        let inp = EveChannelInputs { eta, nb, ns, phase };
        let r = passive_two_mode_fock(inp.correlations(), Some(cutoff))?;
        acc = Some(match acc {
            None => r,
            Some(a) => DensityOperator { space: a.space, matrix: (a.matrix + r.matrix) * c(0.5) },
        });
    }
    Ok(acc.unwrap())
}

/// Per-mode cutoff bounding the largest normal-mode occupation of Eve's state.
pub fn eve_cutoff(eta: f64, nb: f64, ns: f64) -> Result<usize> {
    let n = EveChannelInputs { eta, nb, ns, phase: 0.0 }.correlations();
    let top = n[0][0].re.max(n[1][1].re) + n[0][1].norm();
    thermal_cutoff(top, TAIL_TOL, DEFAULT_CUTOFF_CAP)
}

/// `cutoff` None picks one from the state's occupations.
pub fn simulate_eve_helstrom(eta: f64, nb: f64, ns: f64, modes_n: u32, cutoff: Option<usize>) -> Result<EveOutcome> {
    if modes_n == 0 {
        return invalid("modes_n must be >= 1");
    }
    if ns == 0.0 {
        return Ok(EveOutcome { helstrom: Some(0.5), total_relent: 0.0, lower_bound: 0.5, exact: true });
    }
    let cutoff = match cutoff {
        Some(c) => c,
        None => eve_cutoff(eta, nb, ns)?,
    };
    let pair_dim = (cutoff + 1).pow(2);
    let exact = nb <= 5.0 && pair_dim.checked_pow(modes_n).is_some_and(|d| d <= EVE_EXACT_DIM);
    if !exact {
        let d = modes_n as f64 * closed_form_eve_relent(eta, nb, ns)?;
        return Ok(EveOutcome { helstrom: None, total_relent: d, lower_bound: lower(d), exact: false });
    }
    let on1 = eve_state(eta, nb, ns, cutoff)?;
    let off1 = eve_state(eta, nb, 0.0, cutoff)?;
    // truncation can leave on-state weight where the off state is below the
    // eigenvalue floor; the Gaussian value bounds the phase-averaged one
    let d1 = relative_entropy(&on1, &off1)?.min(closed_form_eve_relent(eta, nb, ns)?);
    let (mut on, mut off) = (on1.clone(), off1.clone());
    for _ in 1..modes_n {
        on = on.tensor(&on1);
        off = off.tensor(&off1);
    }
    let h = helstrom_error(&on, &off)?;
    let d = modes_n as f64 * d1;
    Ok(EveOutcome { helstrom: Some(h), total_relent: d, lower_bound: lower(d), exact: true })
}

fn lower(d: f64) -> f64 {
    (0.5 - (d / 8.0).sqrt()).max(0.0)
}

/// AWGN channel induced by a receiver with exponent β after M shots:
/// σ² = (1+N_B)/(2βη²M). Symbols are ±√N_S.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AwgnReduction {
    pub sigma_beta_sq: f64,
    pub beta_det: u8,
    pub ns: f64,
}

impl AwgnReduction {
    pub fn new(beta: f64, eta: f64, nb: f64, m: u64, ns: f64, beta_det: u8) -> Result<Self> {
        if beta <= 0.0 || eta <= 0.0 || m == 0 || ns <= 0.0 {
            return invalid("beta, eta, M and N_S must be positive");
        }
        Self::with_variance((1.0 + nb) / (2.0 * beta * eta * eta * m as f64), ns, beta_det)
    }
    pub fn with_variance(sigma_beta_sq: f64, ns: f64, beta_det: u8) -> Result<Self> {
        if !(sigma_beta_sq > 0.0) || !(ns > 0.0) {
            return invalid("variance and N_S must be positive");
        }
        Ok(Self { sigma_beta_sq, beta_det, ns })
    }
    pub fn snr(&self) -> f64 {
        self.ns / self.sigma_beta_sq
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CodingRegime {
    /// m̄ below m N_S/(π ln2 σ²): the bound predicts vanishing error.
    Below,
    Between,
    /// m̄ above the BPSK low-SNR capacity m N_S/(2 ln2 σ²).
    Above,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CodingOutcome {
    pub block_error: Estimate,
    pub threshold_bits: f64,
    pub capacity_bits: f64,
    pub regime: CodingRegime,
}

pub const MAX_CODE_BITS: u32 = 16;

pub fn random_coding_experiment(m: usize, m_bar: u32, awgn: &AwgnReduction, trials: u64, seed: u64) -> Result<CodingOutcome> {
    if m_bar > MAX_CODE_BITS {
        return invalid(format!("2^{m_bar} codewords exceed the toy scale 2^{MAX_CODE_BITS}"));
    }
    if m == 0 || trials == 0 {
        return invalid("m and trials must be >= 1");
    }
    let snr = awgn.snr();
    let threshold = m as f64 * snr / (std::f64::consts::PI * std::f64::consts::LN_2);
    let capacity = m as f64 * snr / (2.0 * std::f64::consts::LN_2);
    let regime = if (m_bar as f64) < threshold {
        CodingRegime::Below
    } else if (m_bar as f64) > capacity {
        CodingRegime::Above
    } else {
        CodingRegime::Between
    };
    let words = 1usize << m_bar;
    let amp = awgn.ns.sqrt();
    let sd = awgn.sigma_beta_sq.sqrt();
    let errors = count_errors(trials, seed, TAG_CODING, |rng| {
        if words == 1 {
            return false;
        }
        // fresh codebook per trial; codewords packed as sign bits
        let book: Vec<Vec<bool>> = (0..words).map(|_| (0..m).map(|_| rng.gen::<bool>()).collect()).collect();
        let sent = rng.gen_range(0..words);
        let y: Vec<f64> = book[sent]
            .iter()
            .map(|&b| {
                let z: f64 = StandardNormal.sample(rng);
                (if b { -amp } else { amp }) + sd * z
            })
            .collect();
        let score = |w: &Vec<bool>| w.iter().zip(&y).map(|(&b, &v)| if b { -v } else { v }).sum::<f64>();
        let s_sent = score(&book[sent]);
        book.iter().enumerate().any(|(i, w)| i != sent && score(w) >= s_sent)
    });
    Ok(CodingOutcome { block_error: wilson(errors, trials), threshold_bits: threshold, capacity_bits: capacity, regime })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_point() {
        let e = wilson(30, 100);
        assert!(e.ci_low < 0.3 && 0.3 < e.ci_high);
        let z = wilson(0, 100);
        assert_eq!(z.ci_low, 0.0);
        assert!(z.ci_high > 0.0);
    }

    #[test]
    fn exponent_inverts_erfc() {
        let beta: f64 = 0.01;
        let m = 300;
        let p = 0.5 * statrs::function::erf::erfc((beta * m as f64).sqrt());
        assert!((exponent_from_error(p, m).unwrap() - beta).abs() < 1e-9);
    }
}
