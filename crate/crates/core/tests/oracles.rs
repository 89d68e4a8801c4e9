//! Values frozen from an independent dense diagonalization (numpy/scipy,
//! built from scratch with its own spin matrices and Kronecker products).

use spinlab::gapbound::{exact_lambda1, martingale_epsilon, NnChain};
use spinlab::halfint::HalfInteger;
use spinlab::spectra::{foel_check, lieb_mattis_check, spin_level_table};
use spinlab::spinops::{build_hamiltonian, ModelSpec, SpinGraph, SpinValue};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn ferromagnetic_spin1_chain_levels() {
    let frozen = [
        -1.6200758584679071,
        -2.293885401361506,
        -2.769370039960058,
        -3.2093910822533918,
        -3.6180339887498976,
        -4.000000000000009,
    ];
    let g = SpinGraph::chain(5, SpinValue::ONE, 1.0).unwrap();
    let table = spin_level_table(&build_hamiltonian(&g, &ModelSpec::Xxx).unwrap(), &g).unwrap();
    for (s, &e) in frozen.iter().enumerate() {
        let got = table.energy(HalfInteger::from_integer(s as i64)).unwrap();
        assert!(close(got, e, 1e-10), "S = {s}: {got} vs {e}");
    }
    let report = foel_check(&table);
    assert!(report.ordered);
    assert!(report.margins.iter().all(|m| m.1 > 1e-6));
}

#[test]
fn antiferromagnetic_four_chain_levels() {
    let frozen = [-1.616025403784438, -0.9571067811865481, 0.7499999999999994];
    let g = SpinGraph::chain(4, SpinValue::HALF, 1.0).unwrap();
    let r = lieb_mattis_check(&g, &[0, 2], &[1, 3]).unwrap();
    for (s, &e) in frozen.iter().enumerate() {
        let got = r.table.energy(HalfInteger::from_integer(s as i64)).unwrap();
        assert!(close(got, e, 1e-10), "S = {s}: {got} vs {e}");
    }
    assert_eq!(r.ground_spin, HalfInteger::ZERO);
    assert!(r.passed);
}

#[test]
fn aklt_finite_volume_gaps() {
    let frozen = [
        (2, 0.9999999999999999),
        (3, 0.4999999999999991),
        (4, 0.4489558658593636),
        (5, 0.4132398059490767),
        (6, 0.398451231780432),
        (7, 0.38659526398230726),
        (8, 0.379349133069819),
    ];
    let chain = NnChain::aklt();
    for (len, gap) in frozen {
        let got = exact_lambda1(&chain, len).unwrap();
        assert!(close(got, gap, 1e-9), "L = {len}: {got} vs {gap}");
    }
}

#[test]
fn aklt_martingale_overlaps() {
    let frozen = [0.0, 0.5000000000000006, 0.4542567625794983, 0.4183300132670379, 0.41378786923808847];
    let eps = martingale_epsilon(&NnChain::aklt(), 6).unwrap();
    assert_eq!(eps.per_n.len(), frozen.len());
    for (n, (&got, &want)) in eps.per_n.iter().zip(&frozen).enumerate() {
        assert!(close(got, want, 1e-9), "n = {}: {got} vs {want}", n + 1);
    }
    assert!(eps.below_threshold);
}
