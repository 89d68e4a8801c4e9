//! Total-spin level table of a ferromagnetic chain and the ordering of its
//! lowest energies by spin, plus a batch of random-coupling spin-1/2 chains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinlab::spectra::{foel_check, spin_level_table};
use spinlab::spinops::{build_hamiltonian, ModelSpec, SpinGraph, SpinValue};

fn main() -> spinlab::Result<()> {
    let chain = SpinGraph::chain(5, SpinValue::ONE, 1.0)?;
    let h = build_hamiltonian(&chain, &ModelSpec::Xxx)?;
    let report = foel_check(&spin_level_table(&h, &chain)?);
    println!("{:>4} {:>14} {:>10}", "S", "E(H,S)", "multiplets");
    for e in &report.table.entries {
        println!("{:>4} {:>14.9} {:>10}", e.s.to_string(), e.e_min, e.multiplets());
    }
    println!("ordered: {} ({:?})", report.ordered, report.verdict);

    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut smallest = f64::INFINITY;
    let mut ordered = 0;
    for _ in 0..20 {
        let couplings: Vec<f64> = (0..5).map(|_| rng.random_range(0.1..2.0)).collect();
        let g = SpinGraph::chain_with_couplings(&[SpinValue::HALF; 6], &couplings)?;
        let r = foel_check(&spin_level_table(&build_hamiltonian(&g, &ModelSpec::Xxx)?, &g)?);
        ordered += r.ordered as usize;
        smallest = r.margins.iter().map(|m| m.1).fold(smallest, f64::min);
    }
    println!("random chains ordered: {ordered}/20, smallest margin {smallest:.3e}");
    Ok(())
}
