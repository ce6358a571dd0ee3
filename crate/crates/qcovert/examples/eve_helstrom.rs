//! Eve's best single-mode discrimination against the relative-entropy
//! bound, and the many-mode bound from the closed form.

use qcovert::montecarlo::{eve_cutoff, simulate_eve_helstrom};

fn main() -> qcovert::Result<()> {
    let (eta, nb) = (0.5, 1.0);
    let cut = eve_cutoff(eta, nb, 0.3)?;
    println!("{:>6} {:>10} {:>12} {:>12}", "N_S", "Helstrom", "bound", "D");
    for ns in [0.01, 0.03, 0.1, 0.3] {
        let o = simulate_eve_helstrom(eta, nb, ns, 1, Some(cut))?;
        println!("{ns:>6} {:>10.5} {:>12.5} {:>12.4e}", o.helstrom.unwrap_or(f64::NAN), o.lower_bound, o.total_relent);
    }
    let many = simulate_eve_helstrom(eta, nb, 1e-4, 10_000, None)?;
    println!("10^4 modes at N_S = 1e-4: Eve error >= {:.4}", many.lower_bound);
    Ok(())
}
