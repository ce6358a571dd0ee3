//! Cat-state preparation on a qubit-resonator pair and the Schmidt
//! weights of the result.

use qcovert::sc_receiver::{prepare_sc_state, target_sc_state, JCParams, PrepMode};
use qcovert::transmitters::sc_schmidt;

fn main() -> qcovert::Result<()> {
    let jc = JCParams::reference();
    for alpha in [0.1, 0.3, 1.0] {
        let cut = 40;
        let p = prepare_sc_state(alpha, cut, &jc, PrepMode::Ideal)?;
        let f = p.state.fidelity_with_pure(&target_sc_state(alpha, cut)?);
        let s = sc_schmidt(alpha * alpha)?;
        println!("alpha = {alpha}: 1 - F = {:.2e}, Schmidt weights {:?}", 1.0 - f, s.probabilities);
    }
    Ok(())
}
