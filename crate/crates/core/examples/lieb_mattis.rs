//! Antiferromagnetic ordering on bipartite graphs: a 4-site chain and an
//! unbalanced star whose ground spin is |S_A - S_B|.

use spinlab::spectra::lieb_mattis_check;
use spinlab::spinops::{Site, SpinGraph, SpinValue};

fn main() -> spinlab::Result<()> {
    let chain = SpinGraph::chain(4, SpinValue::HALF, 1.0)?;
    let r = lieb_mattis_check(&chain, &[0, 2], &[1, 3])?;
    println!("4-chain: ground spin {} (expected {}), E0 = {:.9}", r.ground_spin, r.expected_ground_spin, r.ground_energy);
    for (s, m) in &r.margins {
        println!("  E(H,{s}+1) - E(H,{s}) = {m:.9}");
    }

    // Centre 0 against four leaves: S_A = 1/2, S_B = 2.
    let sites = (0..5).map(|id| Site { id, spin: SpinValue::HALF }).collect();
    let star = SpinGraph::new(sites, (1..5).map(|y| (0, y, 1.0)).collect())?;
    let r = lieb_mattis_check(&star, &[0], &[1, 2, 3, 4])?;
    println!("star: ground spin {} (expected {}), passed {}", r.ground_spin, r.expected_ground_spin, r.passed);
    Ok(())
}
