//! Cat-state preparation and the qubit-mediated Ô_τ receiver.
//!
//! Qubit basis: g = 0, e = 1, σ_z = |e⟩⟨e| − |g⟩⟨g|, σ⁺ = |e⟩⟨g|.
//! States live on qubit ⊗ mode with factor dimensions [2, cutoff+1].

use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::fock::{
    coherent_cutoff, coherent_state, qubit_fock_operator, qubit_matrix, thermal_state, DensityOperator, FockSpace,
    GaussianUnitary, PureState, QubitOp, ThermalLoss, TAIL_TOL,
};
use crate::lindblad::{adjoint_rhs, integrate, schrodinger_rhs, Dissipator, Tolerances};
use crate::linalg::{c, expm_antihermitian, CMat, CVec, I, ONE};
use crate::transmitters::cat_weights;

/// Qubit decoherence and resonator parameters (rates in inverse time units).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecoherenceParams {
    pub gamma: f64,
    pub gamma_up: f64,
    pub gamma_down: f64,
    pub kappa: f64,
    pub n_t: f64,
}

impl DecoherenceParams {
    pub fn qubit(gamma: f64, gamma_up: f64, gamma_down: f64) -> Self {
        Self { gamma, gamma_up, gamma_down, kappa: 0.0, n_t: 0.0 }
    }
    pub fn validate(&self) -> Result<()> {
        if [self.gamma, self.gamma_up, self.gamma_down, self.kappa, self.n_t].iter().any(|&x| x < 0.0 || x.is_nan()) {
            return invalid("rates and occupations must be >= 0");
        }
        Ok(())
    }
    pub fn t1(&self) -> f64 {
        1.0 / (self.gamma_up + self.gamma_down)
    }
    pub fn t2(&self) -> f64 {
        1.0 / (self.gamma + 0.5 * (self.gamma_up + self.gamma_down))
    }
    /// Steady-state ground population Γ↓/(Γ↓+Γ↑).
    pub fn a_g(&self) -> f64 {
        self.gamma_down / (self.gamma_down + self.gamma_up)
    }
    pub fn a_e(&self) -> f64 {
        self.gamma_up / (self.gamma_down + self.gamma_up)
    }

    fn qubit_dissipators(&self, mode_dim: usize) -> Vec<Dissipator> {
        let id = CMat::identity(mode_dim, mode_dim);
        let q = |op| qubit_matrix(op).kronecker(&id);
        vec![
            Dissipator { rate: 0.5 * self.gamma, op: q(QubitOp::SigmaZ) },
            Dissipator { rate: self.gamma_up, op: q(QubitOp::Raise) },
            Dissipator { rate: self.gamma_down, op: q(QubitOp::Lower) },
        ]
    }
}

/// Detailed-balance qubit populations (a_g, a_e) at `freq_ghz` and `temp_k`.
pub fn thermal_populations(freq_ghz: f64, temp_k: f64) -> Result<(f64, f64)> {
    if freq_ghz <= 0.0 || temp_k < 0.0 {
        return invalid("frequency must be > 0 and temperature >= 0");
    }
    if temp_k == 0.0 {
        return Ok((1.0, 0.0));
    }
    let x = crate::metrics::PLANCK * freq_ghz * 1e9 / (crate::metrics::BOLTZMANN * temp_k);
    let w = (-x).exp();
    Ok((1.0 / (1.0 + w), w / (1.0 + w)))
}

/// Jaynes-Cummings parameters; frequencies and coupling share units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct JCParams {
    pub omega_r: f64,
    pub omega_q: f64,
    pub g: f64,
}

pub const DISPERSIVE_THRESHOLD: f64 = 0.01;

impl JCParams {
    /// Values quoted for a feasible device: g = 100 kHz, Δ = 20 MHz (in MHz).
    pub fn reference() -> Self {
        Self { omega_r: 5000.0, omega_q: 4980.0, g: 0.1 }
    }
    pub fn delta(&self) -> f64 {
        self.omega_r - self.omega_q
    }
    pub fn chi(&self) -> f64 {
        self.g * self.g / self.delta()
    }
    pub fn dispersive(&self) -> bool {
        self.delta() != 0.0 && (self.g / self.delta()).abs() <= DISPERSIVE_THRESHOLD
    }
    /// Duration of the conditional π/2-per-photon phase gate.
    pub fn t_chi(&self) -> f64 {
        PI / (2.0 * self.chi().abs())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PrepMode {
    Ideal,
    /// Step 2 runs under a master equation with qubit and cavity loss.
    Noisy(Option<DecoherenceParams>),
}

#[derive(Clone, Debug)]
pub struct ScPreparation {
    pub state: DensityOperator,
    pub after_step2: DensityOperator,
}

fn qm_space(cutoff: usize) -> FockSpace {
    FockSpace::with_dims(&[2, cutoff + 1]).unwrap()
}

fn on_mode(space: &FockSpace, kind: GaussianUnitary) -> Result<CMat> {
    let d = space.dims()[1];
    let local = kind.local_op(&FockSpace::single(d - 1))?.to_dense();
    Ok(CMat::identity(2, 2).kronecker(&local))
}

fn on_qubit(m: &CMat, mode_dim: usize) -> CMat {
    m.kronecker(&CMat::identity(mode_dim, mode_dim))
}

/// π/2 rotation about y taking g → (g+e)/√2.
pub fn y_half_pulse() -> CMat {
    expm_antihermitian(&(qubit_matrix(QubitOp::SigmaY) * (-I * PI / 4.0)))
}

/// Final pulse g → |+⟩, e → |−⟩: a π/2 y-rotation preceded by a z π-flip
/// (global phase dropped).
pub fn hadamard_pulse() -> CMat {
    -(y_half_pulse() * qubit_matrix(QubitOp::SigmaZ))
}

/// Cat state (|+⟩|α⟩ + |−⟩|−α⟩)/√2 with real α.
pub fn target_sc_state(alpha: f64, cutoff: usize) -> Result<PureState> {
    let sp = FockSpace::single(cutoff);
    let a = coherent_state(c(alpha), &sp)?.amplitudes;
    let b = coherent_state(c(-alpha), &sp)?.amplitudes;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let plus = CVec::from_vec(vec![c(s), c(s)]);
    let minus = CVec::from_vec(vec![c(s), c(-s)]);
    let v = (plus.kronecker(&a) + minus.kronecker(&b)) * c(s);
    let n = v.norm();
    PureState::new(qm_space(cutoff), v / c(n))
}

/// Steps 1-3: y π/2 pulse, displacement to |−iα⟩, conditional phase
/// exp(−iχ t σ_z n) for t = π/(2χ), final pulse.
pub fn prepare_sc_state(alpha: f64, cutoff: usize, jc: &JCParams, mode: PrepMode) -> Result<ScPreparation> {
    let sp = qm_space(cutoff);
    let d = cutoff + 1;
    if alpha * alpha > cutoff as f64 / 4.0 {
        return Err(crate::Error::TruncationOverflow(format!("alpha^2 = {} > cutoff/4", alpha * alpha)));
    }
    let mut v = CVec::zeros(2 * d);
    v[0] = ONE;
    v = on_qubit(&y_half_pulse(), d) * v;
    v = on_mode(&sp, GaussianUnitary::Displacement { beta: -I * alpha, mode: 0 })? * v;
    let sz_n = qubit_fock_operator("sz@n", d)?;
    let after2 = match mode {
        PrepMode::Ideal => {
            // exp(−i (π/2) σ_z n) is diagonal
            let u = CMat::from_diagonal(&sz_n.diagonal().map(|x| (-I * (PI / 2.0) * x.re).exp()));
            let w = u * v;
            DensityOperator { space: sp.clone(), matrix: &w * w.adjoint() }
        }
        PrepMode::Noisy(None) => return invalid("noisy preparation needs decoherence parameters"),
        PrepMode::Noisy(Some(p)) => {
            p.validate()?;
            let chi = jc.chi();
            let h = &sz_n * c(chi);
            let mut ds = p.qubit_dissipators(d);
            let a = qubit_fock_operator("I@a", d)?;
            ds.push(Dissipator { rate: p.kappa * (1.0 + p.n_t), op: a.clone() });
            ds.push(Dissipator { rate: p.kappa * p.n_t, op: a.adjoint() });
            let rho0 = &v * v.adjoint();
            let m = integrate(|r| schrodinger_rhs(&h, &ds, r), &rho0, jc.t_chi(), Tolerances { rtol: 1e-9, atol: 1e-12 })?;
            DensityOperator { space: sp.clone(), matrix: (&m + m.adjoint()) * c(0.5) }
        }
    };
    let hq = on_qubit(&hadamard_pulse(), d);
    let fin = &hq * &after2.matrix * hq.adjoint();
    Ok(ScPreparation { state: DensityOperator { space: sp, matrix: fin }, after_step2: after2 })
}

/// Thermally prepared cat: ½ Σ_{k,k′=±} [a_g + k k′ a_e] |k⟩⟨k′| ⊗ D(kα) ρ_T D(k′α)†.
pub fn prepare_sc_state_thermal(alpha: f64, cutoff: usize, n_t: f64, a_g: f64, a_e: f64) -> Result<DensityOperator> {
    if (a_g + a_e - 1.0).abs() > 1e-12 || a_g < 0.0 || a_e < 0.0 {
        return invalid("a_g and a_e must be non-negative and sum to 1");
    }
    let sp1 = FockSpace::single(cutoff);
    let rt = thermal_state(n_t, &sp1)?.matrix;
    let dp = GaussianUnitary::Displacement { beta: c(alpha), mode: 0 }.local_op(&sp1)?.to_dense();
    let dm = GaussianUnitary::Displacement { beta: c(-alpha), mode: 0 }.local_op(&sp1)?.to_dense();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let kets = [CVec::from_vec(vec![c(s), c(s)]), CVec::from_vec(vec![c(s), c(-s)])];
    let disp = [&dp, &dm];
    let sign = [1.0, -1.0];
    let mut m = CMat::zeros(2 * (cutoff + 1), 2 * (cutoff + 1));
    for k in 0..2 {
        for kp in 0..2 {
            let w = 0.5 * (a_g + sign[k] * sign[kp] * a_e);
            let q = &kets[k] * kets[kp].adjoint();
            let f = disp[k] * &rt * disp[kp].adjoint();
            m += q.kronecker(&f) * c(w);
        }
    }
    DensityOperator::new(qm_space(cutoff), (&m + m.adjoint()) * c(0.5))
}

/// Squeeze parameter r = −arcsinh λ₋.
pub fn squeeze_parameter(ns: f64) -> f64 {
    -cat_weights(ns).1.asinh()
}

/// Û_τ = exp(−τ(a†σ⁻ − aσ⁺)).
pub fn jc_unitary(tau: f64, mode_dim: usize) -> Result<CMat> {
    let k = qubit_fock_operator("sm@ad + -1*sp@a", mode_dim)?;
    Ok(expm_antihermitian(&(k * c(-tau))))
}

/// V = Û_τ Ŝ(r) σ_x on qubit ⊗ mode.
pub fn receiver_unitary(tau: f64, r: f64, mode_dim: usize) -> Result<CMat> {
    let sp = qm_space(mode_dim - 1);
    let s = on_mode(&sp, GaussianUnitary::Squeeze { r, mode: 0 })?;
    let x = on_qubit(&qubit_matrix(QubitOp::SigmaX), mode_dim);
    Ok(jc_unitary(tau, mode_dim)? * s * x)
}

/// V†(|e⟩⟨e| ⊗ 1)V: the observable whose mean is the excited-state probability.
pub fn effective_observable(tau: f64, r: f64, mode_dim: usize) -> Result<CMat> {
    let v = receiver_unitary(tau, r, mode_dim)?;
    let pe = on_qubit(&qubit_matrix(QubitOp::ProjE), mode_dim);
    Ok(v.adjoint() * pe * v)
}

/// σ⁻(μa + νa†) + h.c.
pub fn mode_observable(mu: f64, nu: f64, mode_dim: usize) -> Result<CMat> {
    let spec = format!("{mu}*sm@a + {nu}*sm@ad + {mu}*sp@ad + {nu}*sp@a");
    qubit_fock_operator(&spec, mode_dim)
}

/// Ô_opt = σ⁻(λ₊a + λ₋a†) + h.c.
pub fn o_opt(ns: f64, mode_dim: usize) -> Result<CMat> {
    let (lp, lm) = cat_weights(ns);
    mode_observable(lp, lm, mode_dim)
}

/// First-order observable actually produced by the squeezer:
/// σ⁻(cosh r a − sinh r a†) + h.c.
pub fn o_implemented(r: f64, mode_dim: usize) -> Result<CMat> {
    mode_observable(r.cosh(), -r.sinh(), mode_dim)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShotOutcome {
    pub p_excited: f64,
    /// False when τ²(n̄+1) > 0.1, outside the small-τ expansion.
    pub within_validity: bool,
}

pub fn o_tau_receiver_shot(state: &DensityOperator, tau: f64, r_squeeze: Option<f64>, ns: f64) -> Result<ShotOutcome> {
    if state.space.dims().len() != 2 || state.space.dims()[0] != 2 {
        return invalid("state must live on qubit ⊗ mode");
    }
    let d = state.space.dims()[1];
    let r = r_squeeze.unwrap_or_else(|| squeeze_parameter(ns));
    let obs = effective_observable(tau, r, d)?;
    let p = state.expect(&obs).re;
    let nbar = state.partial_trace(&[1])?.mean_photons(0)?;
    Ok(ShotOutcome { p_excited: p, within_validity: tau * tau * (nbar + 1.0) <= 0.1 })
}

/// SNR (⟨O⟩₁ − ⟨O⟩₀)² / [¼(ΔO₁ + ΔO₀)²].
pub fn snr(rho0: &DensityOperator, rho1: &DensityOperator, obs: &CMat) -> f64 {
    let m0 = rho0.expect(obs).re;
    let m1 = rho1.expect(obs).re;
    let o2 = obs * obs;
    let v0 = (rho0.expect(&o2).re - m0 * m0).max(0.0);
    let v1 = (rho1.expect(&o2).re - m1 * m1).max(0.0);
    (m1 - m0).powi(2) / (0.25 * (v0.sqrt() + v1.sqrt()).powi(2))
}

/// Coefficients of Q_τ/Q_opt = τ²/(a + τ²(1+b)) from zero-signal moments
/// with the receiver mode μa + νa† and a thermal return of N_B photons.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SnrCoefficients {
    pub a: f64,
    pub b: f64,
}

pub fn snr_coefficients(ns: f64, nb: f64, mu: f64, nu: f64) -> SnrCoefficients {
    let (lp, lm) = cat_weights(ns);
    let ndag = mu * mu * nb + nu * nu * (nb + 1.0); // ⟨a′†a′⟩
    let nund = mu * mu * (nb + 1.0) + nu * nu * nb; // ⟨a′a′†⟩
    let var = lp * nund + lm * ndag;
    let a_mean = -lp + (lm - lp) * ndag;
    SnrCoefficients { a: lp * lm / var, b: a_mean * (lm - lp) / var - 1.0 }
}

pub fn snr_ratio_from(coef: SnrCoefficients, tau: f64) -> f64 {
    let t2 = tau * tau;
    t2 / (coef.a + t2 * (1.0 + coef.b))
}

/// Ratio Q_τ/Q_opt for the ideal mode λ₊a + λ₋a†.
pub fn snr_ratio_formula(ns: f64, nb: f64, tau: f64) -> f64 {
    let (lp, lm) = cat_weights(ns);
    snr_ratio_from(snr_coefficients(ns, nb, lp, lm), tau)
}

/// τ² that balances the two noise terms, N_S/√N_B.
pub fn optimal_tau_sq(ns: f64, nb: f64) -> f64 {
    ns / nb.sqrt()
}

/// Return state ρ_{η,φ} on (idler qubit, return mode) for the cat
/// transmitter; `flip` selects φ = π. The return mode is truncated at
/// `return_cutoff` with a thermal tail tolerance `tail_tol`.
pub fn sc_return_state(ns: f64, nb: f64, eta: f64, flip: bool, return_cutoff: usize, tail_tol: f64) -> Result<DensityOperator> {
    let alpha = ns.sqrt();
    let sig_cut = (coherent_cutoff(ns, 1e-14, 64)? + 2).max(4).max((4.0 * ns).ceil() as usize);
    let psi = target_sc_state(alpha, sig_cut)?;
    let kappa = if flip { -eta } else { eta };
    let port = sig_cut + 1 + 6;
    let loss = ThermalLoss { kappa, n_env: nb, env_dim: return_cutoff + 1, port_dim: port, tail_tol };
    loss.apply(&psi.to_density(), 1)
}

/// Q^att/Q ≈ η_att N_B/(1 + η_att N_B).
pub fn attenuation_penalty(eta_att: f64, nb: f64) -> Result<f64> {
    if !(eta_att > 0.0 && eta_att <= 1.0) {
        return invalid("eta_att must lie in (0,1]");
    }
    let x = eta_att * nb;
    Ok(x / (1.0 + x))
}

/// e^{−2t/T2}
pub fn decoherence_ratio(t: f64, t2: f64) -> Result<f64> {
    if t < 0.0 || t2 <= 0.0 {
        return invalid("t >= 0 and T2 > 0 required");
    }
    Ok((-2.0 * t / t2).exp())
}

/// (a_g − a_e)²/(1 + 1/c)
pub fn thermal_prep_penalty(a_g: f64, a_e: f64, c_ratio: f64) -> Result<f64> {
    if c_ratio <= 0.0 || (a_g + a_e - 1.0).abs() > 1e-9 {
        return invalid("c > 0 and a_g + a_e = 1 required");
    }
    Ok((a_g - a_e).powi(2) / (1.0 + 1.0 / c_ratio))
}

/// Smallest c keeping an advantage, [2(a_g − a_e)² − 1]⁻¹; +∞ when 2(a_g−a_e)² ≤ 1.
pub fn no_advantage_threshold(a_g: f64, a_e: f64) -> f64 {
    let x = 2.0 * (a_g - a_e).powi(2) - 1.0;
    if x <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / x
    }
}

/// Observables accepted by the closed-form qubit propagation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QubitObservable {
    Lower,
    SigmaZ,
    SigmaX,
    Identity,
}

impl QubitObservable {
    pub fn matrix(self) -> CMat {
        qubit_matrix(match self {
            QubitObservable::Lower => QubitOp::Lower,
            QubitObservable::SigmaZ => QubitOp::SigmaZ,
            QubitObservable::SigmaX => QubitOp::SigmaX,
            QubitObservable::Identity => QubitOp::Identity,
        })
    }
}

/// Heisenberg-picture qubit observable after time t (closed form, any 2×2 O).
pub fn lindblad_qubit_propagate_matrix(o: &CMat, t: f64, p: &DecoherenceParams) -> Result<CMat> {
    p.validate()?;
    if o.nrows() != 2 || o.ncols() != 2 {
        return invalid("qubit observable must be 2x2");
    }
    let oi = (o[(0, 0)] + o[(1, 1)]) * 0.5;
    let oz = (o[(1, 1)] - o[(0, 0)]) * 0.5;
    let (om, op) = (o[(0, 1)], o[(1, 0)]);
    let rate = p.gamma_up + p.gamma_down;
    let (ez, offset) = if rate > 0.0 {
        let e = (-t / p.t1()).exp();
        (e, (1.0 - e) * (p.gamma_up - p.gamma_down) / rate)
    } else {
        (1.0, 0.0)
    };
    let et2 = (-t * (p.gamma + 0.5 * rate)).exp();
    let id = qubit_matrix(QubitOp::Identity);
    let sz = qubit_matrix(QubitOp::SigmaZ);
    Ok(&id * (oi + oz * offset) + sz * (oz * ez) + qubit_matrix(QubitOp::Lower) * (om * et2) + qubit_matrix(QubitOp::Raise) * (op * et2))
}

pub fn lindblad_qubit_propagate(obs: QubitObservable, t: f64, p: &DecoherenceParams) -> Result<CMat> {
    lindblad_qubit_propagate_matrix(&obs.matrix(), t, p)
}

/// Numeric adjoint master equation for a qubit observable.
pub fn lindblad_qubit_numeric(o: &CMat, t: f64, p: &DecoherenceParams, tol: Tolerances) -> Result<CMat> {
    p.validate()?;
    let ds = p.qubit_dissipators(1);
    let h = CMat::zeros(2, 2);
    integrate(|x| adjoint_rhs(&h, &ds, x), o, t, tol)
}

/// Default thermal tail tolerance for return states.
pub const RETURN_TAIL_TOL: f64 = TAIL_TOL;
