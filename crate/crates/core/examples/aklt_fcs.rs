//! The AKLT state as a finitely correlated state: transfer spectrum,
//! vanishing edge energy and the geometric two-point function.

use spinlab::fcs::{correlation_length, fcs_expectation_local, two_point_curve, FcsTriple};
use spinlab::spinops::{aklt_term, spin_matrices, SpinValue};

fn main() -> spinlab::Result<()> {
    let triple = FcsTriple::aklt();
    let xi = correlation_length(&triple.map);
    println!("transfer eigenvalues: {:?}", xi.eigenvalues);
    println!("correlation length {:.6} (1/ln 3 = {:.6})", xi.xi, 1.0 / 3f64.ln());
    println!("edge energy {:e}", fcs_expectation_local(&triple, &aklt_term(), 2)?.norm());

    let s3 = spin_matrices(SpinValue::ONE).s3;
    let curve = two_point_curve(&triple, &s3, &s3, 8)?;
    for w in curve.windows(2) {
        println!("r = {}: <S3 S3> = {:+.10}, ratio {:+.10}", w[0].0, w[0].1.re, (w[1].1 / w[0].1).re);
    }
    Ok(())
}
