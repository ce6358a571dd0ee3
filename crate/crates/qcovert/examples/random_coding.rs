//! Random Gaussian codebooks over the AWGN channel the BPSK slots reduce
//! to. Block error collapses below the covert rate and saturates above
//! capacity.

use qcovert::montecarlo::{random_coding_experiment, AwgnReduction};

fn main() -> qcovert::Result<()> {
    let awgn = AwgnReduction::with_variance(2.0, 1.0, 1)?;
    println!("snr = {:.3}", awgn.snr());
    for (m, bits) in [(256, 4), (256, 8), (64, 12), (16, 12)] {
        let r = random_coding_experiment(m, bits, &awgn, 500, 7)?;
        println!(
            "m = {m:>3}, {bits:>2} bits: block error {:.3} (threshold {:.1}, capacity {:.1}, {:?})",
            r.block_error.p, r.threshold_bits, r.capacity_bits, r.regime
        );
    }
    Ok(())
}
