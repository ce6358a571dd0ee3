//! Free-space microwave link: transmissivity, background occupation and
//! the number of modes needed for a target error.

use qcovert::metrics::{link_budget, thermal_occupation, time_bandwidth};

fn main() -> qcovert::Result<()> {
    let (ns, p_err) = (0.01, 1e-2);
    let nb = thermal_occupation(5.0, 300.0)?;
    println!("N_B at 5 GHz, 300 K: {nb:.1}");
    println!("{:>8} {:>12} {:>12}", "km", "eta", "modes");
    for km in [0.001, 0.01, 0.1, 1.0] {
        let eta = link_budget(km, 0.01, 0.1)?;
        let m = time_bandwidth(p_err, eta, ns, nb, 0.25)?;
        println!("{km:>8} {eta:>12.4e} {m:>12.3e}");
    }
    Ok(())
}
