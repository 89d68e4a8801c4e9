//! Commutator growth on an 8-site spin-1/2 Heisenberg chain against the
//! Lieb-Robinson bound for a few values of lambda.

use std::time::Instant;

use spinlab::linalg::c;
use spinlab::locality::{commutator_profile, compare_with_bound, level_set_velocity, ProfileOptions};
use spinlab::spinops::{interaction_norm, spin_matrices, Interaction, ModelSpec, SpinGraph, SpinValue};

fn main() -> spinlab::Result<()> {
    let graph = SpinGraph::chain(8, SpinValue::HALF, 1.0)?;
    let model = ModelSpec::Xxx;
    let phi = Interaction::from_model(&graph, &model)?;
    // B = σ³ at the left end.
    let b = &spin_matrices(SpinValue::HALF).s3 * c(2.0);
    let xs: Vec<usize> = (0..8).collect();
    let ts: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();

    let start = Instant::now();
    let profile = commutator_profile(&graph, &model, &b, 0, &xs, &ts, &ProfileOptions::default())?;
    let lambdas = [0.5, 1.0, 2.0];
    let cmp = compare_with_bound(&graph, &phi, &profile, &b, &lambdas)?;
    println!("profile in {:.2?}; sound = {}, worst excess = {:e}", start.elapsed(), cmp.sound, cmp.worst_excess);

    println!("{:>3} {:>5} {:>12} {:>12}", "x", "t", "measured", "bound");
    for row in cmp.rows.iter().filter(|r| r.lambda == cmp.tightest_lambda) {
        println!("{:>3} {:>5.2} {:>12.4e} {:>12.4e}", row.x, row.t, row.measured, row.bound);
    }

    let norms: Vec<(f64, f64)> = lambdas
        .iter()
        .map(|&l| Ok((l, interaction_norm(&graph, &phi, l, 2)?)))
        .collect::<spinlab::Result<_>>()?;
    let v = level_set_velocity(&graph, &profile, 0.01, &norms);
    println!("front slope {:.3} vs bound velocity {:.1}", v.slope, v.bound_velocity);
    Ok(())
}
