//! Brute-force Fock-space check of the coherent-state exponents: push
//! |±α⟩ through a thermal loss channel and compare the quantum Chernoff
//! exponent and the Fisher information with the closed forms.

use qcovert::fock::{chernoff_exponent, coherent_state, qfi_numeric, FockSpace, ThermalLoss, QFI_STEP};
use qcovert::linalg::c;
use qcovert::metrics::coherent_closed_forms;

fn main() -> qcovert::Result<()> {
    let (ns, nb): (f64, f64) = (0.3, 0.5);
    let sp = FockSpace::single(16);
    let alpha = ns.sqrt();

    // per-η² collective exponent: Chernoff at small η divided by η²
    let eta: f64 = 0.02;
    let loss = ThermalLoss::new(eta, nb)?.with_port_dim(17);
    let plus = loss.apply(&coherent_state(c(alpha), &sp)?.to_density(), 0)?;
    let minus = loss.apply(&coherent_state(c(-alpha), &sp)?.to_density(), 0)?;
    let ch = chernoff_exponent(&plus, &minus)?;

    // local exponent is half the Fisher information in the loss parameter
    let coh = coherent_state(c(alpha), &sp)?.to_density();
    let fisher = qfi_numeric(|k| ThermalLoss::new(k, nb)?.with_port_dim(17).apply(&coh, 0), QFI_STEP)?.fisher;

    let (col, loc) = coherent_closed_forms(ns, nb);
    println!("collective: Chernoff/eta^2 = {:.6}  closed form = {col:.6}  (s* = {:.3})", ch.exponent / (eta * eta), ch.s_star);
    println!("local:      F/2           = {:.6}  closed form = {loc:.6}", fisher / 2.0);
    Ok(())
}
