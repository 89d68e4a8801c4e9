//! Martingale lower bounds on the AKLT gap for a range of chain lengths,
//! next to the exact finite-volume gap.

use spinlab::gapbound::{gap_certificate, CertificateOptions, NnChain};

fn main() -> spinlab::Result<()> {
    let chain = NnChain::aklt();
    println!("{:>3} {:>10} {:>12} {:>12} {:>12} {:>8}", "L", "epsilon", "bound73", "bound74", "exact", "ratio");
    for len in 4..=8 {
        let c = gap_certificate(&chain, len, &CertificateOptions::default())?;
        let b_eps = c.epsilon_bound.unwrap_or(f64::NAN);
        println!(
            "{:>3} {:>10.6} {:>12.8} {:>12.8} {:>12.8} {:>8.4}",
            len, c.epsilon, b_eps, c.overlap_bound, c.exact_lambda1, c.overlap_bound / b_eps
        );
    }
    Ok(())
}
