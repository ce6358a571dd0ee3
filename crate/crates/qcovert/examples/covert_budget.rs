//! Covert photon budget and square-root-law bit counts.

use qcovert::covertness::{covert_photon_budget, eve_error_lower_bound, plan_protocol, sqrt_law_bits};

fn main() -> qcovert::Result<()> {
    let (eta, nb, delta) = (0.5, 1000.0, 0.05);
    println!("{:>8} {:>12} {:>10} {:>8} {:>8} {:>8}", "n", "N_S max", "Eve P_e", "bits/1", "bits/2", "bits/4");
    for n in [1e4, 1e6, 1e8, 1e10] {
        let b = covert_photon_budget(eta, nb, delta, n)?;
        let bits: Vec<u64> = [1, 2, 4].iter().map(|&d| sqrt_law_bits(eta, nb, delta, 1e-3, n, d).map(|r| r.m_bar)).collect::<Result<_, _>>()?;
        println!("{n:>8.0e} {:>12.4e} {:>10.4} {:>8} {:>8} {:>8}", b.ns_max, eve_error_lower_bound(b.total_relent), bits[0], bits[1], bits[2]);
    }

    let plan = plan_protocol(0.5, 100.0, 0.05, 0.01, 100_000, 10, 2)?;
    println!("\nplan: n = {}, N_S = {:.3e}, m_bar = {}", plan.n, plan.ns, plan.m_bar);
    for w in &plan.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
