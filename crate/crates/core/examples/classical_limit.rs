//! Quantum against classical partition functions for a Heisenberg pair,
//! with normalized spins, for increasing S.

use spinlab::climit::{sandwich_check, QuadratureSpec, NORMALIZATION};
use spinlab::spinops::{ModelSpec, SpinGraph, SpinValue};

fn main() -> spinlab::Result<()> {
    let graph = SpinGraph::chain(2, SpinValue::HALF, 1.0)?;
    let spins: Vec<SpinValue> = (1..=5).map(SpinValue::new).collect::<spinlab::Result<_>>()?;
    let report = sandwich_check(&graph, &ModelSpec::Xxx, &spins, &[0.5, 1.0, 2.0, 4.0], &QuadratureSpec::default(), 10.0)?;
    println!("{NORMALIZATION}");
    for r in &report.rows {
        let zq: Vec<String> = r.z_q.iter().map(|z| format!("{z:.6}")).collect();
        println!("beta {:>4}: Z_C = {:.8}  Z_Q = [{}]", r.beta, r.z_c, zq.join(", "));
    }
    for s in &report.summaries {
        println!("2S = {}: lower side holds {}, fitted c {:?}, free-energy gap {:.4}", s.twice_s, s.lower_holds, s.fitted_c, s.free_energy_gap);
    }
    Ok(())
}
