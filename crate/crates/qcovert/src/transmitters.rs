//! Transmitter families in Schmidt form and the small-signal expansion check.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::fock::{coherent_state, thermal_state, DensityOperator, FockSpace};
use crate::linalg::{c, CMat};

pub const RANK_TAIL_TOL: f64 = 1e-10;
pub const RANK_CAP: usize = 64;

/// Schmidt weights p_k and signal matrix elements M[k′,k] = ⟨w_k′|a_S|w_k⟩.
#[derive(Clone, Debug)]
pub struct SchmidtData {
    pub probabilities: Vec<f64>,
    pub elements: CMat,
    pub mean_photons: f64,
    /// Set when a Schmidt weight vanishes exactly (cat state at N_S = 0).
    pub degenerate: bool,
}

impl SchmidtData {
    pub fn new(probabilities: Vec<f64>, elements: CMat, mean_photons: f64) -> Result<Self> {
        let r = probabilities.len();
        if elements.nrows() != r || elements.ncols() != r {
            return Err(Error::DimensionMismatch("elements must be rank x rank".into()));
        }
        let s = Self { probabilities, elements, mean_photons, degenerate: false };
        s.validate()?;
        Ok(s)
    }

    pub fn rank(&self) -> usize {
        self.probabilities.len()
    }

    /// Σ_k p_k (M†M)[k,k], which equals N_S by completeness.
    pub fn photon_check(&self) -> f64 {
        let mtm = self.elements.adjoint() * &self.elements;
        self.probabilities.iter().enumerate().map(|(k, p)| p * mtm[(k, k)].re).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let total: f64 = self.probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-9 || self.probabilities.iter().any(|&p| p < 0.0) {
            return invalid(format!("Schmidt weights sum to {total}"));
        }
        let pc = self.photon_check();
        if (pc - self.mean_photons).abs() > 1e-6 {
            return invalid(format!("photon check {pc} vs N_S {}", self.mean_photons));
        }
        Ok(())
    }
}

pub fn coherent_schmidt(ns: f64) -> Result<SchmidtData> {
    if ns < 0.0 {
        return invalid("N_S must be >= 0");
    }
    SchmidtData::new(vec![1.0], CMat::from_element(1, 1, c(ns.sqrt())), ns)
}

/// Smallest rank whose TMSV tail weight c_S^r is below the tolerance.
pub fn tmsv_rank(ns: f64) -> Result<usize> {
    if ns == 0.0 {
        return Ok(1);
    }
    let cs = ns / (1.0 + ns);
    let r = (RANK_TAIL_TOL.ln() / cs.ln()).ceil().max(1.0) as usize;
    if r > RANK_CAP {
        return Err(Error::TruncationOverflow(format!("TMSV at N_S={ns} needs rank {r} > {RANK_CAP}")));
    }
    Ok(r)
}

pub fn tmsv_schmidt(ns: f64, rank: Option<usize>) -> Result<SchmidtData> {
    if ns < 0.0 {
        return invalid("N_S must be >= 0");
    }
    let r = match rank {
        Some(r) => r.max(1),
        None => tmsv_rank(ns)?,
    };
    let cs = ns / (1.0 + ns);
    let tail = cs.powi(r as i32);
    if tail > RANK_TAIL_TOL && ns > 0.0 {
        return Err(Error::TruncationOverflow(format!("TMSV tail {tail:e} at rank {r}")));
    }
    let raw: Vec<f64> = (0..r).map(|k| cs.powi(k as i32) / (1.0 + ns)).collect();
    let s: f64 = raw.iter().sum();
    let p: Vec<f64> = raw.into_iter().map(|x| x / s).collect();
    let mut m = CMat::zeros(r, r);
    for k in 1..r {
        m[(k - 1, k)] = c((k as f64).sqrt());
    }
    let mean = p.iter().enumerate().map(|(k, x)| k as f64 * x).sum();
    SchmidtData::new(p, m, mean)
}

/// Cat-state weights λ± = ½(1 ± e^{−2N_S}).
pub fn cat_weights(ns: f64) -> (f64, f64) {
    let e = (-2.0 * ns).exp();
    (0.5 * (1.0 + e), 0.5 * (1.0 - e))
}

pub fn sc_schmidt(ns: f64) -> Result<SchmidtData> {
    if ns < 0.0 {
        return invalid("N_S must be >= 0");
    }
    let (lp, lm) = cat_weights(ns);
    let mut m = CMat::zeros(2, 2);
    let degenerate = lm == 0.0;
    if !degenerate {
        m[(1, 0)] = c(ns.sqrt() * (lm / lp).sqrt());
        m[(0, 1)] = c(ns.sqrt() * (lp / lm).sqrt());
    }
    let mut s = SchmidtData::new(vec![lp, lm], m, ns)?;
    s.degenerate = degenerate;
    Ok(s)
}

/// Coefficients of ρ_S = σ₀ + N_S σ₁ + N_S² σ₂ + … and the fitted c.
#[derive(Clone, Debug)]
pub struct SignalMomentExpansion {
    pub sigma0: CMat,
    pub sigma1: CMat,
    pub sigma2: CMat,
    pub c: f64,
    /// Max deviation of σ₀, σ₁, σ₂ from the template.
    pub template_residual: f64,
    /// Max entry of the fitted third-order coefficient (reported only).
    pub third_order_residual: f64,
}

pub const EXPANSION_STEP: f64 = 1e-3;
/// The cubic fit through N_S ∈ {0, h, 2h, 4h} leaves an O(h²) error in σ₂.
pub const EXPANSION_TOL: f64 = 1e-4;

/// Fits the expansion of a signal family at N_S → 0 and checks it against
/// the template σ₀ = |0⟩⟨0|, σ₁ = |1⟩⟨1| − |0⟩⟨0|, σ₂ = c(|2⟩⟨2| − 2|1⟩⟨1| + |0⟩⟨0|).
pub fn check_second_order_expansion<F>(family: F) -> Result<SignalMomentExpansion>
where
    F: Fn(f64) -> Result<DensityOperator>,
{
    let h = EXPANSION_STEP;
    let nodes = [0.0, h, 2.0 * h, 4.0 * h];
    let states: Vec<CMat> = nodes.iter().map(|&x| family(x).map(|r| r.matrix)).collect::<Result<_>>()?;
    let dim = states[0].nrows();
    if dim < 3 || states.iter().any(|m| m.nrows() != dim) {
        return invalid("family needs a fixed single-mode space with cutoff >= 2");
    }
    let v = nalgebra::Matrix4::from_fn(|i, j| nodes[i].powi(j as i32));
    let vinv = v.try_inverse().ok_or_else(|| Error::Convergence("singular fit".into()))?;
    let mut coef: Vec<CMat> = vec![CMat::zeros(dim, dim); 4];
    for (j, cm) in coef.iter_mut().enumerate() {
        for (i, s) in states.iter().enumerate() {
            *cm += s * c(vinv[(j, i)]);
        }
    }
    let mut t0 = CMat::zeros(dim, dim);
    t0[(0, 0)] = c(1.0);
    let mut t1 = CMat::zeros(dim, dim);
    t1[(1, 1)] = c(1.0);
    t1[(0, 0)] = c(-1.0);
    let mut t2 = CMat::zeros(dim, dim);
    t2[(2, 2)] = c(1.0);
    t2[(1, 1)] = c(-2.0);
    t2[(0, 0)] = c(1.0);
    let cfit = coef[2].dotc(&t2).re / t2.dotc(&t2).re;
    let dev = |a: &CMat, b: &CMat| (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
    let residual = dev(&coef[0], &t0).max(dev(&coef[1], &t1)).max(dev(&coef[2], &(&t2 * c(cfit))));
    let third = coef[3].iter().map(|z| z.norm()).fold(0.0, f64::max);
    if residual > EXPANSION_TOL || !(-EXPANSION_TOL..=1.0 + EXPANSION_TOL).contains(&cfit) {
        return Err(Error::NotCovertEligible(format!(
            "signal expansion deviates from template by {residual:e} (c = {cfit})"
        )));
    }
    let mut it = coef.into_iter();
    Ok(SignalMomentExpansion {
        sigma0: it.next().unwrap(),
        sigma1: it.next().unwrap(),
        sigma2: it.next().unwrap(),
        c: cfit.clamp(0.0, 1.0),
        template_residual: residual,
        third_order_residual: third,
    })
}

/// Thermal signal family (the TMSV signal marginal).
pub fn thermal_family(cutoff: usize) -> impl Fn(f64) -> Result<DensityOperator> {
    move |ns| thermal_state(ns, &FockSpace::single(cutoff))
}

/// Equal mixture of `phases` coherent states √N_S e^{−2πik/phases}.
pub fn phase_mixture_family(cutoff: usize, phases: usize) -> impl Fn(f64) -> Result<DensityOperator> {
    move |ns| {
        let sp = FockSpace::single(cutoff);
        let mut m = CMat::zeros(cutoff + 1, cutoff + 1);
        for k in 0..phases {
            let a = C64::from_polar(ns.sqrt(), -2.0 * std::f64::consts::PI * k as f64 / phases as f64);
            m += coherent_state(a, &sp)?.to_density().matrix;
        }
        Ok(DensityOperator { space: sp, matrix: m / c(phases as f64) })
    }
}

/// Fixed-phase coherent family |√N_S⟩.
pub fn coherent_family(cutoff: usize) -> impl Fn(f64) -> Result<DensityOperator> {
    move |ns| Ok(coherent_state(c(ns.sqrt()), &FockSpace::single(cutoff))?.to_density())
}
