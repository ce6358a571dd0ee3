//! Covariance-matrix Gaussian states.
//!
//! Convention: quadratures ordered x₁,p₁,x₂,p₂,… with x = (a+a†)/√2,
//! covariance Σ_ab = ⟨{r_a, r_b}⟩ − 2⟨r_a⟩⟨r_b⟩ so that vacuum = identity,
//! and Ω = ⊕ [[0,1],[−1,0]] so [r_a, r_b] = iΩ_ab.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};
use crate::fock::{thermal_cutoff, thermal_state, DensityOperator, FockSpace, GaussianUnitary, DEFAULT_CUTOFF_CAP, TAIL_TOL};
use crate::linalg::{c, CMat, I};

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Guard band around ±1 for symplectic eigenvalues.
pub const FAITHFUL_GUARD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianState {
    pub mean: RVec,
    pub covariance: RMat,
}

pub fn omega(modes: usize) -> RMat {
    let mut o = RMat::zeros(2 * modes, 2 * modes);
    for k in 0..modes {
        o[(2 * k, 2 * k + 1)] = 1.0;
        o[(2 * k + 1, 2 * k)] = -1.0;
    }
    o
}

fn complexify(m: &RMat) -> CMat {
    m.map(c)
}

fn sym_sqrt(m: &RMat) -> Result<RMat> {
    let e = nalgebra::SymmetricEigen::new(m.clone());
    if e.eigenvalues.iter().any(|&x| x <= 0.0) {
        return Err(Error::Domain("covariance is not positive definite".into()));
    }
    let d = RMat::from_diagonal(&e.eigenvalues.map(f64::sqrt));
    Ok(&e.eigenvectors * d * e.eigenvectors.transpose())
}

fn arccoth(x: f64) -> f64 {
    0.5 * ((x + 1.0) / (x - 1.0)).ln()
}

impl GaussianState {
    pub fn new(mean: RVec, covariance: RMat) -> Result<Self> {
        let n = covariance.nrows();
        if n % 2 != 0 || covariance.ncols() != n || mean.len() != n {
            return Err(Error::DimensionMismatch("covariance must be 2k x 2k with matching mean".into()));
        }
        let asym = (&covariance - covariance.transpose()).abs().max();
        if asym > 1e-12 {
            return invalid(format!("covariance asymmetric by {asym:e}"));
        }
        let g = Self { mean, covariance };
        g.check_uncertainty()?;
        Ok(g)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self { mean: RVec::zeros(2 * modes), covariance: RMat::identity(2 * modes, 2 * modes) }
    }

    pub fn thermal(n: f64) -> Result<Self> {
        if n < 0.0 {
            return invalid("occupation must be >= 0");
        }
        Ok(Self { mean: RVec::zeros(2), covariance: RMat::identity(2, 2) * (2.0 * n + 1.0) })
    }

    /// Two-mode squeezed vacuum on (idler, signal).
    pub fn tmsv(ns: f64) -> Result<Self> {
        if ns < 0.0 {
            return invalid("N_S must be >= 0");
        }
        let a = 2.0 * ns + 1.0;
        let b = 2.0 * (ns * (1.0 + ns)).sqrt();
        let mut s = RMat::identity(4, 4) * a;
        s[(0, 2)] = b;
        s[(2, 0)] = b;
        s[(1, 3)] = -b;
        s[(3, 1)] = -b;
        Ok(Self { mean: RVec::zeros(4), covariance: s })
    }

    pub fn modes(&self) -> usize {
        self.covariance.nrows() / 2
    }

    /// Eigenvalues of Σ + iΩ must be non-negative.
    pub fn check_uncertainty(&self) -> Result<()> {
        let m = complexify(&self.covariance) + complexify(&omega(self.modes())) * I;
        let e = nalgebra::SymmetricEigen::new(m);
        let min = e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        if min < -1e-9 {
            return Err(Error::Domain(format!("uncertainty relation violated (min eigenvalue {min:e})")));
        }
        Ok(())
    }

    /// Symplectic eigenvalues ν_j (one per mode, ascending).
    pub fn symplectic_eigenvalues(&self) -> Result<Vec<f64>> {
        let (vals, _, _) = self.k_spectrum()?;
        let mut nu: Vec<f64> = vals.iter().filter(|&&x| x > 0.0).copied().collect();
        nu.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(nu)
    }

    /// Eigen-decomposition of K = S iΩ S with S = Σ^{1/2}.
    fn k_spectrum(&self) -> Result<(Vec<f64>, CMat, RMat)> {
        let s = sym_sqrt(&self.covariance)?;
        let k = complexify(&s) * complexify(&omega(self.modes())) * I * complexify(&s);
        let k = (&k + k.adjoint()) * c(0.5);
        let e = nalgebra::SymmetricEigen::new(k);
        Ok((e.eigenvalues.iter().copied().collect(), e.eigenvectors, s))
    }

    /// log det(Σ + iΩ) and the Hamiltonian matrix H = 2 arccoth(iΩΣ) iΩ.
    fn log_det_and_h(&self) -> Result<(f64, CMat)> {
        let (vals, vecs, s) = self.k_spectrum()?;
        if let Some(bad) = vals.iter().find(|v| v.abs() <= 1.0 + FAITHFUL_GUARD) {
            return Err(Error::Domain(format!("symplectic eigenvalue {bad} not faithful")));
        }
        let logdet: f64 = vals.iter().map(|v| 0.5 * (v * v - 1.0).ln()).sum();
        let f = CMat::from_diagonal(&nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|&v| c(arccoth(v)))));
        let acoth_k = &vecs * f * vecs.adjoint();
        let s_inv = s.clone().try_inverse().ok_or_else(|| Error::Domain("singular covariance".into()))?;
        let h = complexify(&s_inv) * acoth_k * complexify(&s) * complexify(&omega(self.modes())) * (I * 2.0);
        Ok((logdet, h))
    }
}

/// D(g0 ‖ g1) in nats for zero-mean states.
pub fn gaussian_relative_entropy(g0: &GaussianState, g1: &GaussianState) -> Result<f64> {
    if g0.modes() != g1.modes() {
        return Err(Error::DimensionMismatch("mode count".into()));
    }
    let (ld0, h0) = g0.log_det_and_h()?;
    let (ld1, h1) = g1.log_det_and_h()?;
    let t = (complexify(&g0.covariance) * (h1 - h0)).trace();
    let mut d = 0.5 * (ld1 - ld0) + 0.25 * t.re;
    // mean contribution ½ δᵀ H₁ δ is only used by callers with displaced states
    let delta = &g0.mean - &g1.mean;
    if delta.amax() > 0.0 {
        let (_, h1) = g1.log_det_and_h()?;
        let dc = delta.map(c);
        let q = (dc.transpose() * h1 * dc)[(0, 0)];
        d += 0.5 * q.re;
    }
    Ok(d.max(0.0))
}

/// Eve's two-mode input parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EveChannelInputs {
    pub eta: f64,
    pub nb: f64,
    pub ns: f64,
    pub phase: f64,
}

impl EveChannelInputs {
    fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta < 1.0) {
            return invalid(format!("eta {} must lie in (0,1)", self.eta));
        }
        if self.nb <= 0.0 || self.ns < 0.0 {
            return invalid("N_B must be > 0 and N_S >= 0");
        }
        Ok(())
    }

    fn abc(&self) -> (f64, f64, f64) {
        let (e, nb, ns) = (self.eta, self.nb, self.ns);
        let a = 0.5 + e * nb + (1.0 - e) * ns;
        let b = (1.0 - e) * e.sqrt() * (nb - ns);
        let cc = 0.5 + ((1.0 - e).powi(2) + e) * nb + (1.0 - e) * e * ns;
        (a, b, cc)
    }

    /// ⟨w_i† w_j⟩ for Eve's (outbound, return) modes.
    pub fn correlations(&self) -> [[C64; 2]; 2] {
        let (a, b, cc) = self.abc();
        let n12 = C64::from_polar(-b, -self.phase);
        [[c(a - 0.5), n12], [n12.conj(), c(cc - 0.5)]]
    }
}

pub fn eve_covariance(inputs: &EveChannelInputs) -> Result<GaussianState> {
    inputs.validate()?;
    let (a, b, cc) = inputs.abc();
    let (cs, sn) = (inputs.phase.cos(), inputs.phase.sin());
    let m = [
        [a, 0.0, -b * cs, b * sn],
        [0.0, a, -b * sn, -b * cs],
        [-b * cs, -b * sn, cc, 0.0],
        [b * sn, -b * cs, 0.0, cc],
    ];
    let cov = RMat::from_fn(4, 4, |i, j| 2.0 * m[i][j]);
    GaussianState::new(RVec::zeros(4), cov)
}

fn check_eta_interior(eta: f64) -> Result<()> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::Domain(format!("eta {eta} must lie strictly inside (0,1)")));
    }
    Ok(())
}

/// Relative entropy between single-mode thermal states, D(th(na) ‖ th(nb)).
pub fn thermal_relative_entropy(na: f64, nb: f64) -> Result<f64> {
    if na <= 0.0 || nb <= 0.0 {
        return Err(Error::Domain("thermal relative entropy needs positive occupations".into()));
    }
    // same as (1+2na)[arccoth(1+2nb) − arccoth(1+2na)] + ½ log(nb(1+nb)/(na(1+na))),
    // rearranged so that na → nb does not cancel catastrophically
    let x = na - nb;
    let d = na * (x / nb).ln_1p() - (1.0 + na) * (x / (1.0 + nb)).ln_1p();
    Ok(d.max(0.0))
}

/// Closed form of Eve's on/off relative entropy: the two-mode problem
/// reduces to thermal states with occupations η²N_B + (1−η²)N_S (on)
/// and η²N_B (off).
pub fn closed_form_eve_relent(eta: f64, nb: f64, ns: f64) -> Result<f64> {
    check_eta_interior(eta)?;
    if nb <= 0.0 || ns < 0.0 {
        return Err(Error::Domain("N_B must be > 0 and N_S >= 0".into()));
    }
    if ns == 0.0 {
        return Ok(0.0);
    }
    let e2 = eta * eta;
    let off = e2 * nb;
    let on = off + (1.0 - e2) * ns;
    thermal_relative_entropy(on, off)
}

/// Second-order expansion (1−η²)²N_S² / (2N_Bη²(1+N_Bη²)).
pub fn relent_leading_order(eta: f64, nb: f64, ns: f64) -> Result<f64> {
    if eta == 0.0 || nb <= 0.0 {
        return Err(Error::Domain("eta and N_B must be nonzero".into()));
    }
    let e2 = eta * eta;
    Ok((1.0 - e2).powi(2) * ns * ns / (2.0 * nb * e2 * (1.0 + nb * e2)))
}

/// Thermal loss on one mode: mean ×√t, Σ → XΣX + (1−t)(2N+1) on the block.
pub fn gaussian_loss_channel(state: &GaussianState, transmissivity: f64, n_env: f64, mode: usize) -> Result<GaussianState> {
    if !(0.0..=1.0).contains(&transmissivity) || transmissivity.is_nan() {
        return invalid(format!("transmissivity {transmissivity} outside [0,1]"));
    }
    if n_env < 0.0 {
        return invalid("N_env must be >= 0");
    }
    if mode >= state.modes() {
        return invalid(format!("mode {mode} out of range"));
    }
    let n = state.covariance.nrows();
    let st = transmissivity.sqrt();
    let mut x = RMat::identity(n, n);
    x[(2 * mode, 2 * mode)] = st;
    x[(2 * mode + 1, 2 * mode + 1)] = st;
    let mut cov = &x * &state.covariance * &x;
    let add = (1.0 - transmissivity) * (2.0 * n_env + 1.0);
    cov[(2 * mode, 2 * mode)] += add;
    cov[(2 * mode + 1, 2 * mode + 1)] += add;
    let cov = (&cov + cov.transpose()) * 0.5;
    Ok(GaussianState { mean: &x * &state.mean, covariance: cov })
}

/// Ordered two-point function ⟨r_a r_b⟩ for zero-mean states.
pub fn two_point(state: &GaussianState) -> CMat {
    complexify(&state.covariance) * c(0.5) + complexify(&omega(state.modes())) * (I * 0.5)
}

/// Fourth-order moment ⟨r_a r_b r_c r_d⟩ of a zero-mean Gaussian state.
pub fn wick4(g: &CMat, a: usize, b: usize, cc: usize, d: usize) -> C64 {
    g[(a, b)] * g[(cc, d)] + g[(a, cc)] * g[(b, d)] + g[(a, d)] * g[(b, cc)]
}

/// Mean and variance of O = a₀a₁ + a₀†a₁† = x₀x₁ − p₀p₁ on a zero-mean
/// two-mode state.
pub fn correlation_observable_moments(state: &GaussianState) -> Result<(f64, f64)> {
    if state.modes() != 2 {
        return invalid("needs a two-mode state");
    }
    let g = two_point(state);
    // O = Σ w (a,b) r_a r_b with a on mode 0, b on mode 1
    let terms = [(0usize, 2usize, 1.0), (1, 3, -1.0)];
    let mut mean = C64::new(0.0, 0.0);
    for &(a, b, w) in &terms {
        mean += g[(a, b)] * w;
    }
    let mut second = C64::new(0.0, 0.0);
    for &(a, b, w1) in &terms {
        for &(cc, d, w2) in &terms {
            second += wick4(&g, a, b, cc, d) * (w1 * w2);
        }
    }
    Ok((mean.re, second.re - mean.re * mean.re))
}

/// Fock density matrix of a two-mode phase-insensitive Gaussian state with
/// correlation matrix N_ij = ⟨a_i† a_j⟩, built as a beamsplitter and phase
/// applied to a product of thermal states. `cutoff` None picks it from the
/// larger normal-mode occupation.
pub fn passive_two_mode_fock(n: [[C64; 2]; 2], cutoff: Option<usize>) -> Result<DensityOperator> {
    let (n11, n22, n12) = (n[0][0].re, n[1][1].re, n[0][1]);
    let r = n12.norm();
    let psi = n12.arg();
    let mid = 0.5 * (n11 + n22);
    let half = (0.25 * (n11 - n22).powi(2) + r * r).sqrt();
    let (n1, n2) = (mid + half, (mid - half).max(0.0));
    let theta = 0.5 * (-2.0 * r).atan2(n11 - n22);
    let d = match cutoff {
        Some(d) => d,
        None => thermal_cutoff(n1, TAIL_TOL, DEFAULT_CUTOFF_CAP)?,
    };
    let sp = FockSpace::single(d);
    let rho = thermal_state(n1, &sp)?.tensor(&thermal_state(n2, &sp)?);
    let rho = rho.apply_gaussian(&GaussianUnitary::BeamsplitterAngle { theta, modes: (0, 1) })?;
    rho.apply_gaussian(&GaussianUnitary::Phase { theta: psi, mode: 1 })
}

/// Complex correlation matrix of a two-mode zero-mean state (assumes no
/// phase-sensitive terms).
pub fn correlations_of(state: &GaussianState) -> Result<[[C64; 2]; 2]> {
    if state.modes() != 2 {
        return invalid("needs two modes");
    }
    let s = &state.covariance;
    let mut n = [[c(0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let re = 0.5 * (s[(2 * i, 2 * j)] - if i == j { 1.0 } else { 0.0 });
            let im = 0.5 * s[(2 * i, 2 * j + 1)];
            n[i][j] = C64::new(re, im);
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_symplectic_eigenvalue() {
        let g = GaussianState::thermal(1.5).unwrap();
        let nu = g.symplectic_eigenvalues().unwrap();
        assert!((nu[0] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_is_not_faithful() {
        let v = GaussianState::vacuum(1);
        let t = GaussianState::thermal(1.0).unwrap();
        assert!(matches!(gaussian_relative_entropy(&t, &v), Err(Error::Domain(_))));
    }

    #[test]
    fn correlations_roundtrip_eve() {
        let inp = EveChannelInputs { eta: 0.3, nb: 1.0, ns: 0.2, phase: 0.7 };
        let g = eve_covariance(&inp).unwrap();
        let n = correlations_of(&g).unwrap();
        let m = inp.correlations();
        for i in 0..2 {
            for j in 0..2 {
                assert!((n[i][j] - m[i][j]).norm() < 1e-12, "{i}{j}");
            }
        }
    }
}
