//! Two-site AKLT term: the spectrum of the projection onto total spin 2, and
//! the lowest levels of longer open chains by magnetization sector.

use spinlab::spectra::{eigen_spectrum, spectrum_by_sector, SpectrumOptions};
use spinlab::spinops::{build_hamiltonian, ModelSpec, SpinGraph, SpinValue};

fn main() -> spinlab::Result<()> {
    let pair = SpinGraph::chain(2, SpinValue::ONE, 1.0)?;
    let h = build_hamiltonian(&pair, &ModelSpec::Aklt)?;
    let full = eigen_spectrum(&h, None, &SpectrumOptions::default())?;
    println!("two-site eigenvalues: {:?}", full.eigenvalues.iter().map(|e| (e * 1e10).round() / 1e10).collect::<Vec<_>>());

    for len in [4, 6] {
        let chain = SpinGraph::chain(len, SpinValue::ONE, 1.0)?;
        let h = build_hamiltonian(&chain, &ModelSpec::Aklt)?;
        println!("\nL = {len}, dim {}", h.dim());
        for r in spectrum_by_sector(&h, &SpectrumOptions::default())? {
            let low: Vec<String> = r.eigenvalues.iter().take(3).map(|e| format!("{e:.6}")).collect();
            println!("  {:>6} dim {:>4}  lowest {}", r.sector.to_string(), r.dim, low.join(" "));
        }
    }
    Ok(())
}
