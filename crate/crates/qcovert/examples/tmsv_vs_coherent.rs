//! Local receivers: entangled pairs with a correlation measurement vs
//! coherent states with homodyne, at equal energy.

use qcovert::montecarlo::{simulate_coherent_homodyne, simulate_tmsv_local, SlotConfig};

fn main() -> qcovert::Result<()> {
    let (eta, ns, nb) = (0.2, 0.01, 10.0);
    println!("eta = {eta}, N_S = {ns}, N_B = {nb}");
    println!("{:>7} {:>10} {:>10}", "M", "coherent", "tmsv");
    for m in [20_000, 50_000, 100_000, 200_000] {
        let cfg = SlotConfig::new(eta, ns, nb, m, 3)?;
        let coh = simulate_coherent_homodyne(&cfg, 20_000)?;
        let ent = simulate_tmsv_local(&cfg, 20_000)?;
        println!("{m:>7} {:>10.4} {:>10.4}", coh.p, ent.p);
    }
    Ok(())
}
