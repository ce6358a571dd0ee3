//! Shot-level BPSK with homodyne detection against the threshold
//! prediction, and the exponent recovered from the error rate.

use qcovert::metrics::{error_probability, homodyne_exponent};
use qcovert::montecarlo::{exponent_from_error, simulate_coherent_homodyne, SlotConfig};

fn main() -> qcovert::Result<()> {
    let (eta, ns, nb) = (0.3, 0.5, 2.0);
    let beta = homodyne_exponent(eta, ns, nb);
    println!("{:>5} {:>10} {:>22} {:>10} {:>10} {:>10}", "M", "p_sim", "95% CI", "p_pred", "exp_sim", "exp_pred");
    for m in [25, 50, 100, 200, 400] {
        let e = simulate_coherent_homodyne(&SlotConfig::new(eta, ns, nb, m, 42)?, 200_000)?;
        let pred = error_probability(beta, eta, m)?.gaussian_threshold;
        let ex = exponent_from_error(e.p, m).unwrap_or(f64::NAN);
        println!(
            "{m:>5} {:>10.5} [{:>9.5}, {:>9.5}] {pred:>10.5} {ex:>10.5} {:>10.5}",
            e.p, e.ci_low, e.ci_high, beta * eta * eta
        );
    }
    Ok(())
}
