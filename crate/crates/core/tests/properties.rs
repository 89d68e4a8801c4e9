//! Randomized invariants.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spinlab::fcs::{invariant_state, make_pure_map, random_isometry};
use spinlab::linalg::{c, commutator, identity, max_abs, CMat, I};
use spinlab::spectra::{eigen_spectrum, spectrum_by_sector, SpectrumOptions};
use spinlab::spinops::{build_hamiltonian, sectors_of_basis, spin_matrices, ModelSpec, Site, SpinGraph, SpinValue};
use spinlab::ssep::{aldous_scan, heisenberg_equivalence_check, RateGraph};

fn mixed_chain(twice: &[u32], couplings: &[f64]) -> SpinGraph {
    let spins: Vec<SpinValue> = twice.iter().map(|&t| SpinValue::new(t).unwrap()).collect();
    SpinGraph::chain_with_couplings(&spins, couplings).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn spin_algebra(twice in 1u32..7) {
        let s = spin_matrices(SpinValue::new(twice).unwrap());
        let lhs: CMat = commutator(&s.s1, &s.s2);
        prop_assert!(max_abs(&(lhs - &s.s3 * I)) < 1e-12);
        let v = twice as f64 / 2.0;
        let cas = s.casimir() - identity(s.s3.nrows()) * c(v * (v + 1.0));
        prop_assert!(max_abs(&cas) < 1e-12);
    }

    #[test]
    fn hamiltonians_are_hermitian_and_block_diagonal(
        twice in prop::collection::vec(1u32..4, 2..5),
        delta in 0.2f64..3.0,
        seed in 0u64..1000,
    ) {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let couplings: Vec<f64> = (0..twice.len() - 1).map(|_| rng.random_range(-2.0..2.0)).collect();
        let g = mixed_chain(&twice, &couplings);
        for model in [ModelSpec::Xxx, ModelSpec::Xxz { delta }] {
            let h = build_hamiltonian(&g, &model).unwrap();
            prop_assert!(h.matrix().hermiticity_residual() < 1e-12);
            let sectors = sectors_of_basis(h.basis());
            for (r, c, _) in h.matrix().triplets() {
                prop_assert_eq!(sectors.label_of(r), sectors.label_of(c));
            }
            let opts = SpectrumOptions::default();
            let mut joined: Vec<f64> = spectrum_by_sector(&h, &opts).unwrap().into_iter().flat_map(|r| r.eigenvalues).collect();
            joined.sort_by(f64::total_cmp);
            let full = eigen_spectrum(&h, None, &opts).unwrap().eigenvalues;
            for (a, b) in joined.iter().zip(&full) {
                prop_assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn exclusion_process_matches_spin_chain(
        v in 2usize..6,
        rates in prop::collection::vec(0.05f64..4.0, 15),
        mask in prop::collection::vec(any::<bool>(), 15),
    ) {
        let mut edges = Vec::new();
        let mut k = 0;
        for x in 0..v {
            for y in x + 1..v {
                // Keep a path so the graph is connected.
                if y == x + 1 || mask[k] {
                    edges.push((x, y, rates[k]));
                }
                k += 1;
            }
        }
        let g = RateGraph::new((0..v).collect(), edges).unwrap();
        prop_assert!(heisenberg_equivalence_check(&g).unwrap().equivalent);
        prop_assert!(aldous_scan(&g).unwrap().holds);
    }

    #[test]
    fn pure_maps_are_unital_with_a_state(n in 2usize..4, k in 1usize..4, seed in 0u64..1000) {
        let v = random_isometry(n, k, &mut ChaCha8Rng::seed_from_u64(seed));
        let map = make_pure_map(&v);
        prop_assert!(map.unitality_residual() < 1e-12);
        let inv = invariant_state(&map).unwrap();
        prop_assert!(inv.min_eigenvalue > -1e-10);
        prop_assert!(inv.invariance_residual < 1e-10);
    }
}

#[test]
fn single_site_graph_has_trivial_spectrum() {
    let g = SpinGraph::new(vec![Site { id: 4, spin: SpinValue::ONE }], vec![]).unwrap();
    let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
    let r = eigen_spectrum(&h, None, &SpectrumOptions::default()).unwrap();
    assert_eq!(r.eigenvalues, vec![0.0; 3]);
}
