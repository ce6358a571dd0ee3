//! Exponent gains of the entangled and cat transmitters over a coherent
//! state of equal energy, plus the maximal gain against background.

use qcovert::metrics::{coherent_closed_forms, gain_db, max_collective_gain, max_local_gain, sc_closed_forms, tmsv_closed_forms};

fn main() {
    let nb = 1e4;
    println!("N_B = {nb}");
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "N_S", "tmsv col", "tmsv loc", "cat col", "cat loc");
    for k in 0..=8 {
        let ns = 10f64.powf(-4.0 + 0.5 * k as f64);
        let (cc, cl) = coherent_closed_forms(ns, nb);
        let (tc, tl) = tmsv_closed_forms(ns, nb);
        let (sc, sl) = sc_closed_forms(ns, nb);
        println!("{ns:>8.1e} {:>10.4} {:>10.4} {:>10.4} {:>10.4}", tc / cc, tl / cl, sc / cc, sl / cl);
    }

    println!();
    println!("{:>8} {:>12} {:>12}", "N_B", "col [dB]", "loc [dB]");
    for nb in [0.01, 0.1, 1.0, 10.0, 100.0, 1e4] {
        println!("{nb:>8} {:>12.3} {:>12.3}", gain_db(max_collective_gain(nb)), gain_db(max_local_gain(nb)));
    }
}
