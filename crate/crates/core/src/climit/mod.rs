//! Quantum partition functions at spin `S` against the classical partition
//! function over products of unit spheres.
//!
//! Quantum Hamiltonians are built from normalized spins `S^i / S` and `Z_Q`
//! is divided by `(2S+1)^|V|`, so both sides equal 1 at `β = 0` and the
//! classical Hamiltonian is the literal substitution `S^i / S → Ω^i`.

use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectra::{spectrum_by_sector, SpectrumOptions};
use crate::spinops::{build_hamiltonian, ModelSpec, SpinGraph, SpinValue};

pub const NORMALIZATION: &str =
    "H_S built from S^i/S; Z_Q(beta,S) = Tr exp(-beta H_S) / (2S+1)^|V|; Z_C over the normalized uniform measure on (S^2)^|V|";

/// Largest number of sites handled by product quadrature.
pub const MAX_QUADRATURE_SITES: usize = 3;

fn check_model(model: &ModelSpec) -> Result<()> {
    match model {
        ModelSpec::Xxx | ModelSpec::Xxz { .. } => Ok(()),
        other => Err(Error::ModelMismatch(format!(
            "the classical limit is defined here for xxx and xxz, not {}",
            other.name()
        ))),
    }
}

/// `Z_Q(β, S) / (2S+1)^|V|` for the normalized-spin Hamiltonian with spin
/// `S` on every site.
pub fn quantum_partition(graph: &SpinGraph, model: &ModelSpec, spin: SpinValue, betas: &[f64]) -> Result<Vec<f64>> {
    check_model(model)?;
    let g = graph.with_uniform_spin(spin);
    let s = spin.s();
    let h = build_hamiltonian(&g, model)?.scale(1.0 / (s * s));
    let spectra = spectrum_by_sector(&h, &SpectrumOptions::default())?;
    let energies: Vec<f64> = spectra.iter().flat_map(|r| r.eigenvalues.iter().copied()).collect();
    let dim = energies.len() as f64;
    // Shift by the ground energy for stability, then undo it.
    let e0 = energies.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(betas
        .iter()
        .map(|&b| {
            let sum: f64 = energies.iter().map(|&e| (-b * (e - e0)).exp()).sum();
            sum * (-b * e0).exp() / dim
        })
        .collect())
}

/// Classical energy with unit vectors in place of normalized spins.
pub fn classical_energy(graph: &SpinGraph, model: &ModelSpec, omegas: &[[f64; 3]]) -> f64 {
    graph
        .edges()
        .iter()
        .map(|e| {
            let (a, b) = (omegas[e.x], omegas[e.y]);
            match model {
                ModelSpec::Xxz { delta } => -e.coupling * ((a[0] * b[0] + a[1] * b[1]) / delta + a[2] * b[2]),
                _ => -e.coupling * (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]),
            }
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    /// Gauss-Legendre nodes in `cos θ` at the first level; `φ` uses twice as many.
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Relative agreement required between successive doublings.
    pub tol: f64,
    /// Samples when `|V|` exceeds the quadrature limit.
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec { initial_nodes: 4, max_nodes: 256, tol: 1e-8, mc_samples: 200_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClassicalMethod {
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassicalPartition {
    pub betas: Vec<f64>,
    pub values: Vec<f64>,
    /// Last refinement difference (quadrature) or standard error (Monte Carlo).
    pub errors: Vec<f64>,
    pub method: ClassicalMethod,
    /// `cos θ` nodes at the accepted level.
    pub nodes: usize,
}

/// How the first sphere is shrunk using a symmetry of the model.
#[derive(Clone, Copy, PartialEq)]
enum Reduction {
    None,
    /// Rotation invariance: the first vector is pinned to the north pole.
    Full,
    /// Invariance under rotations about the third axis: `φ = 0` on the first sphere.
    Axial,
}

/// Product rule on one sphere with weights summing to 1.
fn sphere_rule(n: usize, reduction: Reduction) -> Vec<([f64; 3], f64)> {
    if reduction == Reduction::Full {
        return vec![([0.0, 0.0, 1.0], 1.0)];
    }
    let gl = GaussLegendre::new(NonZeroUsize::new(n).expect("n > 0"));
    let n_phi = if reduction == Reduction::Axial { 1 } else { 2 * n };
    let mut out = Vec::with_capacity(n * n_phi);
    for &(z, w) in gl.as_node_weight_pairs() {
        let r = (1.0 - z * z).max(0.0).sqrt();
        for k in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * k as f64 / n_phi as f64;
            out.push(([r * phi.cos(), r * phi.sin(), z], 0.5 * w / n_phi as f64));
        }
    }
    out
}

fn quadrature_level(graph: &SpinGraph, model: &ModelSpec, betas: &[f64], n: usize) -> Vec<f64> {
    let v = graph.n_sites();
    let reduction = match model {
        ModelSpec::Xxx => Reduction::Full,
        _ => Reduction::Axial,
    };
    let first = sphere_rule(n, reduction);
    let rest = sphere_rule(n, Reduction::None);
    // Odometer over sites 1..v, in parallel over the first site's nodes.
    first
        .par_iter()
        .map(|&(o0, w0)| {
            let mut acc = vec![0.0; betas.len()];
            let mut idx = vec![0usize; v.saturating_sub(1)];
            let mut omegas = vec![o0; v];
            loop {
                let mut w = w0;
                for (k, &i) in idx.iter().enumerate() {
                    omegas[k + 1] = rest[i].0;
                    w *= rest[i].1;
                }
                let e = classical_energy(graph, model, &omegas);
                for (a, &b) in acc.iter_mut().zip(betas) {
                    *a += w * (-b * e).exp();
                }
                let mut k = idx.len();
                loop {
                    if k == 0 {
                        return acc;
                    }
                    k -= 1;
                    idx[k] += 1;
                    if idx[k] < rest.len() {
                        break;
                    }
                    idx[k] = 0;
                }
            }
        })
        .reduce(|| vec![0.0; betas.len()], |a, b| a.iter().zip(&b).map(|(x, y)| x + y).collect())
}

fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [StandardNormal.sample(rng), StandardNormal.sample(rng), StandardNormal.sample(rng)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-12 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

/// `Z_C(β) = ∫ e^{−β H(Ω)} Π dΩ_x` with normalized sphere measures.
pub fn classical_partition(
    graph: &SpinGraph,
    model: &ModelSpec,
    betas: &[f64],
    spec: &QuadratureSpec,
) -> Result<ClassicalPartition> {
    check_model(model)?;
    model.validate(graph)?;
    if graph.n_sites() > MAX_QUADRATURE_SITES {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        let mut sum = vec![0.0; betas.len()];
        let mut sum2 = vec![0.0; betas.len()];
        let mut omegas = vec![[0.0; 3]; graph.n_sites()];
        for _ in 0..spec.mc_samples {
            for o in omegas.iter_mut() {
                *o = random_unit(&mut rng);
            }
            let e = classical_energy(graph, model, &omegas);
            for (k, &b) in betas.iter().enumerate() {
                let f = (-b * e).exp();
                sum[k] += f;
                sum2[k] += f * f;
            }
        }
        let n = spec.mc_samples as f64;
        let values: Vec<f64> = sum.iter().map(|s| s / n).collect();
        let errors = values.iter().zip(&sum2).map(|(m, s2)| ((s2 / n - m * m).max(0.0) / (n - 1.0)).sqrt()).collect();
        return Ok(ClassicalPartition { betas: betas.to_vec(), values, errors, method: ClassicalMethod::MonteCarlo, nodes: 0 });
    }
    let mut n = spec.initial_nodes.max(1);
    let mut prev = quadrature_level(graph, model, betas, n);
    loop {
        let next_n = 2 * n;
        if next_n > spec.max_nodes {
            return Err(Error::Quadrature { difference: f64::INFINITY });
        }
        let cur = quadrature_level(graph, model, betas, next_n);
        let errors: Vec<f64> = cur.iter().zip(&prev).map(|(a, b)| (a - b).abs()).collect();
        let worst = errors.iter().zip(&cur).map(|(e, v)| e / v.abs().max(1e-300)).fold(0.0, f64::max);
        if worst <= spec.tol {
            return Ok(ClassicalPartition {
                betas: betas.to_vec(),
                values: cur,
                errors,
                method: ClassicalMethod::Quadrature,
                nodes: next_n,
            });
        }
        if next_n * 2 > spec.max_nodes {
            return Err(Error::Quadrature { difference: worst });
        }
        prev = cur;
        n = next_n;
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichRow {
    pub beta: f64,
    pub z_c: f64,
    pub z_c_error: f64,
    /// Per spin in the order of [`SandwichReport::spins`].
    pub z_q: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinSummary {
    pub twice_s: u32,
    pub lower_holds: bool,
    /// Smallest `c ∈ [0, c_max]` with `Z_Q(β,S) ≤ Z_C(β(1 + c/S))` at every
    /// grid `β`; `None` if no such `c`.
    pub fitted_c: Option<f64>,
    /// `max_β |f_Q − f_C|` with `f = −ln Z / β` (β > 0).
    pub free_energy_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SandwichReport {
    pub normalization: String,
    pub quadrature: QuadratureSpec,
    pub nodes: usize,
    pub c_max: f64,
    pub spins: Vec<u32>,
    pub rows: Vec<SandwichRow>,
    pub summaries: Vec<SpinSummary>,
    pub lower_holds: bool,
    /// `fitted_c` finite for every spin.
    pub c_bounded: bool,
    /// Free-energy gap nonincreasing in `S` over the tested range.
    pub free_energy_monotone: bool,
}

/// Smallest `c` on `[0, c_max]` with `target ≤ Z_C(β(1 + c/S))`: coarse scan
/// then bisection on the first bracket.
fn fit_c(
    graph: &SpinGraph,
    model: &ModelSpec,
    spec: &QuadratureSpec,
    beta: f64,
    s: f64,
    target: f64,
    c_max: f64,
) -> Result<Option<f64>> {
    let z = |c: f64| -> Result<f64> { Ok(classical_partition(graph, model, &[beta * (1.0 + c / s)], spec)?.values[0]) };
    if target <= z(0.0)? {
        return Ok(Some(0.0));
    }
    let steps = 64;
    let mut lo = 0.0;
    for k in 1..=steps {
        let c = c_max * k as f64 / steps as f64;
        if target <= z(c)? {
            let mut hi = c;
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if target <= z(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 1e-10 * hi.max(1.0) {
                    break;
                }
            }
            return Ok(Some(hi));
        }
        lo = c;
    }
    Ok(None)
}

/// `Z_C(β) ≤ Z_Q(β, S)` pointwise, and a fitted `c` for the upper side.
pub fn sandwich_check(
    graph: &SpinGraph,
    model: &ModelSpec,
    spins: &[SpinValue],
    betas: &[f64],
    spec: &QuadratureSpec,
    c_max: f64,
) -> Result<SandwichReport> {
    if spins.is_empty() || betas.is_empty() {
        return Err(Error::InvalidParameter("need at least one spin and one beta".into()));
    }
    let zc = classical_partition(graph, model, betas, spec)?;
    let zq: Vec<Vec<f64>> = spins.iter().map(|&s| quantum_partition(graph, model, s, betas)).collect::<Result<_>>()?;
    let rows: Vec<SandwichRow> = betas
        .iter()
        .enumerate()
        .map(|(k, &beta)| SandwichRow {
            beta,
            z_c: zc.values[k],
            z_c_error: zc.errors[k],
            z_q: zq.iter().map(|z| z[k]).collect(),
        })
        .collect();
    // Monte Carlo errors are widened to three standard errors.
    let slack = |k: usize| if zc.method == ClassicalMethod::MonteCarlo { 3.0 * zc.errors[k] } else { zc.errors[k] };
    let mut summaries = Vec::with_capacity(spins.len());
    for (j, &spin) in spins.iter().enumerate() {
        let lower_holds = (0..betas.len()).all(|k| zc.values[k] <= zq[j][k] + slack(k) + 1e-14);
        let mut fitted: Option<f64> = Some(0.0);
        for (k, &beta) in betas.iter().enumerate() {
            let c = fit_c(graph, model, spec, beta, spin.s(), zq[j][k], c_max)?;
            fitted = match (fitted, c) {
                (Some(a), Some(b)) => Some(a.max(b)),
                _ => None,
            };
        }
        let free_energy_gap = betas
            .iter()
            .enumerate()
            .filter(|(_, &b)| b > 0.0)
            .map(|(k, &b)| ((zc.values[k].ln() - zq[j][k].ln()) / b).abs())
            .fold(0.0, f64::max);
        summaries.push(SpinSummary { twice_s: spin.twice_s(), lower_holds, fitted_c: fitted, free_energy_gap });
    }
    let lower_holds = summaries.iter().all(|s| s.lower_holds);
    let c_bounded = summaries.iter().all(|s| s.fitted_c.is_some());
    let free_energy_monotone = summaries.windows(2).all(|w| w[1].free_energy_gap <= w[0].free_energy_gap + 1e-12);
    Ok(SandwichReport {
        normalization: NORMALIZATION.into(),
        quadrature: *spec,
        nodes: zc.nodes,
        c_max,
        spins: spins.iter().map(|s| s.twice_s()).collect(),
        rows,
        summaries,
        lower_holds,
        c_bounded,
        free_energy_monotone,
    })
}
