//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//! Runs without the libtest harness so the lines always reach stdout.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spinlab::climit::{sandwich_check, QuadratureSpec};
use spinlab::fcs::{correlation_length, fcs_expectation_local, two_point_curve, FcsTriple};
use spinlab::gapbound::{gap_certificate, CertificateOptions, MartingaleResolution, NnChain};
use spinlab::halfint::HalfInteger;
use spinlab::linalg::{c, identity, kron, CMat};
use spinlab::locality::{
    capped_aklt_chain, clustering_measure, commutator_profile, compare_with_bound, group_law_residual,
    ClusteringOptions, Evolver, ProfileOptions,
};
use spinlab::spectra::{eigen_spectrum, foel_check, lieb_mattis_check, spin_level_table, SpectrumOptions};
use spinlab::spinops::{
    aklt_term, build_hamiltonian, sectors_of_basis, spin_matrices, Interaction, ModelSpec, Site, SpinGraph, SpinValue,
};
use spinlab::ssep::{aldous_scan, heisenberg_equivalence_check, semigroup_check, ssep_generator, RateGraph};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(ok: bool, detail: String) -> Check {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, budget: Duration, detail: String) -> Check {
    ensure(elapsed <= budget, format!("{detail}; {:.2?} of {:.0?}", elapsed, budget))
}

fn err(e: spinlab::Error) -> String {
    e.to_string()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let g = SpinGraph::chain(2, SpinValue::ONE, 1.0).map_err(err)?;
    let h = build_hamiltonian(&g, &ModelSpec::Aklt).map_err(err)?;
    let ev = eigen_spectrum(&h, None, &SpectrumOptions::default()).map_err(err)?.eigenvalues;
    let expect: Vec<f64> = [0.0; 4].into_iter().chain([1.0; 5]).collect();
    let dev = ev.iter().zip(&expect).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(dev <= 1e-10, format!("max deviation from {{0 x4, 1 x5}} = {dev:.1e}"))?;
    within(start.elapsed(), Duration::from_secs(1), format!("deviation {dev:.1e}"))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let g = SpinGraph::chain(5, SpinValue::ONE, 1.0).map_err(err)?;
    let r = foel_check(&spin_level_table(&build_hamiltonian(&g, &ModelSpec::Xxx).map_err(err)?, &g).map_err(err)?);
    let min_a = r.margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    ensure(r.ordered && min_a > 1e-6, format!("(a) 5-site spin-1 chain min margin {min_a:.3e}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut min_b = f64::INFINITY;
    for k in 0..20 {
        let couplings: Vec<f64> = (0..5).map(|_| rng.random_range(0.05..3.0)).collect();
        let g = SpinGraph::chain_with_couplings(&[SpinValue::HALF; 6], &couplings).map_err(err)?;
        let r = foel_check(&spin_level_table(&build_hamiltonian(&g, &ModelSpec::Xxx).map_err(err)?, &g).map_err(err)?);
        if !r.ordered {
            return Err(format!("random chain {k} not ordered: {:?}", r.margins));
        }
        min_b = r.margins.iter().map(|m| m.1).fold(min_b, f64::min);
    }
    within(
        start.elapsed(),
        Duration::from_secs(30),
        format!("(a) min margin {min_a:.3e}; (b) 20/20 random chains ordered, min margin {min_b:.3e}"),
    )
}

fn criterion_3() -> Check {
    let g = SpinGraph::chain(4, SpinValue::HALF, 1.0).map_err(err)?;
    let r = lieb_mattis_check(&g, &[0, 2], &[1, 3]).map_err(err)?;
    let e = |s: i64| r.table.energy(HalfInteger::from_integer(s)).unwrap_or(f64::NAN);
    let (m1, m2) = (e(1) - e(0), e(2) - e(1));
    ensure(
        r.ground_spin == HalfInteger::ZERO && m1 > 1e-6 && m2 > 1e-6,
        format!("ground spin {}, E(1)-E(0) = {m1:.6}, E(2)-E(1) = {m2:.6}", r.ground_spin),
    )
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let chain = NnChain::aklt();
    let mut worst_ratio: (f64, f64) = (f64::INFINITY, 0.0);
    let mut max_eps: f64 = 0.0;
    for len in 4..=8 {
        let cert = gap_certificate(&chain, len, &CertificateOptions::default()).map_err(err)?;
        let b_eps = cert.epsilon_bound.ok_or(format!("L = {len}: epsilon {} not below 1/sqrt 2", cert.epsilon))?;
        max_eps = max_eps.max(cert.epsilon);
        if cert.epsilon >= std::f64::consts::FRAC_1_SQRT_2 || cert.epsilon.is_nan() {
            return Err(format!("L = {len}: epsilon = {}", cert.epsilon));
        }
        if !(b_eps <= cert.overlap_bound && cert.overlap_bound <= cert.exact_lambda1 + 1e-9) {
            return Err(format!("L = {len}: {b_eps} <= {} <= {} fails", cert.overlap_bound, cert.exact_lambda1));
        }
        let ratio = cert.overlap_bound / b_eps;
        if !(ratio > 1.0 && ratio <= 2.0) {
            return Err(format!("L = {len}: ratio {ratio} outside (1, 2]"));
        }
        worst_ratio = (worst_ratio.0.min(ratio), worst_ratio.1.max(ratio));
    }
    within(
        start.elapsed(),
        Duration::from_secs(120),
        format!("L = 4..8: max epsilon {max_eps:.6}, ratio in [{:.4}, {:.4}]", worst_ratio.0, worst_ratio.1),
    )
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let triple = FcsTriple::aklt();
    let h = aklt_term();
    // Edge term on sites (x, x+1) inside a window of x + 2 sites.
    let mut worst_edge: f64 = 0.0;
    for x in 0..4 {
        let op = kron(&identity(3usize.pow(x as u32)), &h);
        worst_edge = worst_edge.max(fcs_expectation_local(&triple, &op, x + 2).map_err(err)?.norm());
    }
    let xi = correlation_length(&triple.map);
    let sub = xi.subleading.ok_or("no subleading eigenvalue")?;
    let sub_dev = (Complex64::new(sub.0, sub.1) - c(-1.0 / 3.0)).norm();
    let s3 = spin_matrices(SpinValue::ONE).s3;
    let curve = two_point_curve(&triple, &s3, &s3, 9).map_err(err)?;
    let ratio_dev = curve.windows(2).map(|w| (w[1].1 / w[0].1 - c(-1.0 / 3.0)).norm()).fold(0.0, f64::max);
    ensure(worst_edge <= 1e-12, format!("edge expectation {worst_edge:.1e}"))?;
    ensure(sub_dev <= 1e-12, format!("subleading eigenvalue off by {sub_dev:.1e}"))?;
    ensure(ratio_dev <= 1e-10, format!("two-point ratio off by {ratio_dev:.1e}"))?;
    within(
        start.elapsed(),
        Duration::from_secs(1),
        format!("edge {worst_edge:.1e}, subleading dev {sub_dev:.1e}, ratio dev {ratio_dev:.1e} (r = 1..8)"),
    )
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let graph = SpinGraph::chain(8, SpinValue::HALF, 1.0).map_err(err)?;
    let model = ModelSpec::Xxx;
    let b = &spin_matrices(SpinValue::HALF).s3 * c(2.0);
    let xs: Vec<usize> = (0..8).collect();
    let ts: Vec<f64> = (0..=6).map(|k| 0.5 * k as f64).collect();
    let profile = commutator_profile(&graph, &model, &b, 0, &xs, &ts, &ProfileOptions::default()).map_err(err)?;
    let phi = Interaction::from_model(&graph, &model).map_err(err)?;
    let cmp = compare_with_bound(&graph, &phi, &profile, &b, &[0.5, 1.0, 2.0]).map_err(err)?;
    ensure(
        cmp.sound,
        format!("{} points x 3 lambdas, worst measured - bound = {:.3e}", profile.points.len(), cmp.worst_excess),
    )?;
    // How often the bound is below the trivial 2||B|| value; reported, not asserted.
    let informative = cmp.rows.iter().filter(|r| r.bound < 2.0 * profile.b_norm - 1e-12).count();
    within(
        start.elapsed(),
        Duration::from_secs(120),
        format!(
            "sound on {} rows (lambda 0.5, 1, 2), worst excess {:.3e}, {} rows below the trivial bound",
            cmp.rows.len(),
            cmp.worst_excess,
            informative
        ),
    )
}

fn criterion_7() -> Check {
    let (graph, model) = capped_aklt_chain(6).map_err(err)?;
    let s3 = spin_matrices(SpinValue::ONE).s3;
    let opts = ClusteringOptions::for_chain(graph.n_sites(), 1.0);
    let curve = clustering_measure(&graph, &model, &s3, &s3, &opts).map_err(err)?;
    let fit = curve.fit.as_ref().ok_or("no fit")?;
    let ln3 = 3f64.ln();
    let rel = (fit.rate - ln3).abs() / ln3;
    let mu = curve.mu.ok_or("degenerate ground state")?;
    ensure(
        rel <= 0.05 && fit.rate >= mu,
        format!("rate {:.6} (ln 3 = {ln3:.6}, rel. dev {rel:.1e}), mu = {mu:.3e}, gap {:.4}", fit.rate, curve.gamma),
    )
}

fn random_rate_graph(rng: &mut ChaCha8Rng, v: usize, connected: bool) -> RateGraph {
    let mut edges = Vec::new();
    if connected {
        // Random spanning tree, then extra edges.
        for y in 1..v {
            edges.push((rng.random_range(0..y), y, rng.random_range(0.1..3.0)));
        }
    }
    for x in 0..v {
        for y in x + 1..v {
            if !edges.iter().any(|&(a, b, _)| (a, b) == (x, y)) && rng.random_bool(0.35) {
                edges.push((x, y, rng.random_range(0.1..3.0)));
            }
        }
    }
    RateGraph::new((0..v).collect(), edges).expect("valid rate graph")
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst_eq: f64 = 0.0;
    let mut graphs = Vec::new();
    for k in 0..10 {
        let v = rng.random_range(2..=6);
        let g = random_rate_graph(&mut rng, v, k % 3 != 2);
        let eq = heisenberg_equivalence_check(&g).map_err(err)?;
        let dev = eq.sectors.iter().map(|s| s.max_difference).fold(0.0, f64::max);
        if !eq.equivalent {
            return Err(format!("graph {k}: sector blocks differ by {dev:.1e}"));
        }
        worst_eq = worst_eq.max(dev);
        graphs.push(g);
    }
    graphs.push(RateGraph::path(7, 1.0).map_err(err)?);
    graphs.push(RateGraph::complete(7, 0.7).map_err(err)?);
    graphs.push(RateGraph::new((0..7).collect(), (1..7).map(|y| (0, y, 0.5 + 0.3 * y as f64)).collect()).map_err(err)?);
    graphs.push(RateGraph::new((0..7).collect(), (0..7).map(|x| (x, (x + 1) % 7, 1.0 + 0.1 * x as f64)).collect()).map_err(err)?);
    for _ in 0..3 {
        graphs.push(random_rate_graph(&mut rng, 7, true));
    }
    let mut tested = 0;
    let mut worst_gap: f64 = 0.0;
    for (k, g) in graphs.iter().enumerate() {
        if !g.is_connected() {
            continue;
        }
        let r = aldous_scan(g).map_err(err)?;
        let dev = r.components[0].max_deviation;
        if !r.holds {
            return Err(format!("connected graph {k}: lambda(n)/lambda(1) deviates by {dev:.1e}"));
        }
        tested += 1;
        worst_gap = worst_gap.max(dev);
    }
    ensure(
        tested >= 8,
        format!("10 random graphs equivalent (max entry diff {worst_eq:.1e}); {tested} connected graphs, max |lambda(n)/lambda(1) - 1| = {worst_gap:.1e}"),
    )
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let graph = SpinGraph::chain(2, SpinValue::HALF, 1.0).map_err(err)?;
    let spins: Vec<SpinValue> = (1..=5).map(SpinValue::new).collect::<Result<_, _>>().map_err(err)?;
    let report =
        sandwich_check(&graph, &ModelSpec::Xxx, &spins, &[0.5, 1.0, 2.0, 4.0], &QuadratureSpec::default(), 10.0)
            .map_err(err)?;
    let cs: Vec<String> =
        report.summaries.iter().map(|s| s.fitted_c.map_or("none".into(), |c| format!("{c:.4}"))).collect();
    ensure(report.lower_holds && report.c_bounded, format!("lower {} c bounded {} c = [{}]", report.lower_holds, report.c_bounded, cs.join(", ")))?;
    within(start.elapsed(), Duration::from_secs(60), format!("Z_C <= Z_Q everywhere; fitted c = [{}]", cs.join(", ")))
}

fn criterion_10() -> Check {
    let mut lines = Vec::new();
    // Hermiticity and sector structure.
    let models: Vec<(SpinGraph, ModelSpec)> = vec![
        (SpinGraph::ring(6, SpinValue::HALF, 0.7).map_err(err)?, ModelSpec::Xxz { delta: 1.9 }),
        (SpinGraph::chain(4, SpinValue::ONE, 1.0).map_err(err)?, ModelSpec::Aklt),
        (
            SpinGraph::new(
                vec![Site { id: 0, spin: SpinValue::HALF }, Site { id: 1, spin: SpinValue::ONE }, Site { id: 2, spin: SpinValue::new(3).map_err(err)? }],
                vec![(0, 1, 1.3), (1, 2, -0.4), (0, 2, 0.8)],
            )
            .map_err(err)?,
            ModelSpec::Xxx,
        ),
    ];
    let mut herm: f64 = 0.0;
    let mut leak: f64 = 0.0;
    for (g, m) in &models {
        let h = build_hamiltonian(g, m).map_err(err)?;
        herm = herm.max(h.matrix().hermiticity_residual());
        let sectors = sectors_of_basis(h.basis());
        for (r, col, v) in h.matrix().triplets() {
            if sectors.label_of(r) != sectors.label_of(col) {
                leak = leak.max(v.norm());
            }
        }
    }
    ensure(herm <= 1e-12, format!("hermiticity {herm:.1e}"))?;
    ensure(leak == 0.0, format!("entries between sectors {leak:.1e}"))?;
    lines.push(format!("herm {herm:.0e}, sector leak {leak:.0e}"));

    // Resolution of the identity and local gap positivity.
    let chain = NnChain::aklt();
    let res = MartingaleResolution::new(&chain, 5).map_err(err)?;
    let ch = res.checks(&chain);
    let res_err = ch.hermiticity.max(ch.orthogonality).max(ch.completeness);
    ensure(res_err <= 1e-10, format!("resolution residual {res_err:.1e}"))?;
    ensure(ch.local_gap_positivity >= -1e-10, format!("h - gamma2 (1 - G) min eigenvalue {:.1e}", ch.local_gap_positivity))?;
    lines.push(format!("resolution {res_err:.0e}, positivity {:.1e}", ch.local_gap_positivity));

    // Group law of the Heisenberg evolution.
    let g = SpinGraph::chain(6, SpinValue::HALF, 1.0).map_err(err)?;
    let evolver = Evolver::new(&build_hamiltonian(&g, &ModelSpec::Xxx).map_err(err)?).map_err(err)?;
    let a: CMat = kron(&spin_matrices(SpinValue::HALF).s1, &identity(32));
    let group = group_law_residual(&evolver, &a, &[(0.3, 0.7), (-1.1, 2.5), (1.9, -0.4)]).map_err(err)?;
    ensure(group <= 1e-10, format!("group law {group:.1e}"))?;
    lines.push(format!("group law {group:.0e}"));

    // Stochasticity of the exclusion semigroup.
    let rg = RateGraph::new((0..5).collect(), vec![(0, 1, 0.4), (1, 2, 2.0), (2, 3, 1.1), (3, 4, 0.6), (4, 0, 1.5)]).map_err(err)?;
    let mut worst: f64 = 0.0;
    for n in 0..=5 {
        let gen = ssep_generator(&rg, n).map_err(err)?;
        for s in semigroup_check(&gen, &[0.01, 0.5, 3.0, 20.0]) {
            if !s.stochastic {
                return Err(format!("e^(-tL) not stochastic at n = {n}, t = {}", s.t));
            }
            worst = worst.max(s.row_sum_residual).max(-s.min_entry);
        }
    }
    lines.push(format!("stochasticity {worst:.0e}"));
    Ok(lines.join(", "))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("AKLT two-site spectrum", criterion_1),
        ("FOEL on chains", criterion_2),
        ("Lieb-Mattis 4-site chain", criterion_3),
        ("martingale certificates", criterion_4),
        ("FCS/AKLT", criterion_5),
        ("Lieb-Robinson soundness", criterion_6),
        ("exponential clustering", criterion_7),
        ("SSEP equivalence and gaps", criterion_8),
        ("classical-limit lower bound", criterion_9),
        ("structural invariants", criterion_10),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let t = start.elapsed();
        match result {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{t:.2?}]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{t:.2?}]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
