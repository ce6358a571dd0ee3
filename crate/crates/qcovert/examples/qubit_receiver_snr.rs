//! Qubit-readout receiver for the cat transmitter: SNR relative to the
//! optimal mode observable, simulated in Fock space and from the small-τ
//! formula, at a few interaction strengths.

use qcovert::sc_receiver::{effective_observable, o_opt, optimal_tau_sq, sc_return_state, snr, snr_ratio_formula, squeeze_parameter};

fn main() -> qcovert::Result<()> {
    let (ns, eta) = (0.01, 0.05);
    for nb in [1.0, 4.0] {
        // cutoff large enough that the thermal tail is negligible
        let r0 = sc_return_state(ns, nb, eta, false, 80, 1e-6)?;
        let r1 = sc_return_state(ns, nb, eta, true, 80, 1e-6)?;
        let d = r0.space.dims()[1];
        let best = snr(&r0, &r1, &o_opt(ns, d)?);
        println!("N_B = {nb}");
        for f in [0.25, 0.5, 1.0, 2.0] {
            let tau2 = f * optimal_tau_sq(ns, nb);
            let obs = effective_observable(tau2.sqrt(), squeeze_parameter(ns), d)?;
            let num = snr(&r0, &r1, &obs) / best;
            println!("  tau^2 = {tau2:.3e}: simulated {num:.4}, formula {:.4}", snr_ratio_formula(ns, nb, tau2.sqrt()));
        }
    }
    Ok(())
}
