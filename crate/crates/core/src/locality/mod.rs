//! Lieb-Robinson experiments on small systems and ground-state clustering.

pub mod clustering;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{eigh, eigvalsh, hermiticity_residual, op_norm, CMat, CVec, I};
use crate::spinops::{
    basis_of, build_hamiltonian, local_operator, spin_matrices, Interaction, ModelSpec, SparseHermitian,
    SparseMatrix, SpinGraph, TensorBasis,
};

pub use clustering::{
    capped_aklt_chain, clustering_measure, imaginary_time_check, ClusteringCurve, ClusteringOptions,
    ClusteringPoint, ImaginaryTimePoint, ImaginaryTimeReport, LogLinearFit,
};

/// Dense cap for time evolution.
pub const EVOLUTION_DIM_CAP: usize = 4096;

/// Spectral decomposition of `H`, shared by every evolved operator.
#[derive(Debug, Clone)]
pub struct Evolver {
    energies: Vec<f64>,
    vectors: CMat,
}

impl Evolver {
    pub fn new(h: &SparseHermitian) -> Result<Self> {
        Self::with_cap(h, EVOLUTION_DIM_CAP)
    }

    pub fn with_cap(h: &SparseHermitian, cap: usize) -> Result<Self> {
        if h.dim() > cap {
            return Err(Error::DimensionCap { dim: h.dim(), cap });
        }
        let e = eigh(&h.to_dense());
        Ok(Evolver { energies: e.values, vectors: e.vectors })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    /// `e^{itH} A e^{−itH}`.
    pub fn evolve(&self, a: &CMat, t: f64) -> Result<CMat> {
        if a.nrows() != self.dim() || a.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, Hamiltonian has dimension {}",
                a.nrows(),
                a.ncols(),
                self.dim()
            )));
        }
        if t == 0.0 {
            return Ok(a.clone());
        }
        let u = &self.vectors;
        let mut rotated = u.adjoint() * a * u;
        let phases: Vec<Complex64> = self.energies.iter().map(|&e| (I * (t * e)).exp()).collect();
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                rotated[(j, k)] *= phases[j] * phases[k].conj();
            }
        }
        Ok(u * rotated * u.adjoint())
    }
}

/// `α_t(A) = e^{itH} A e^{−itH}` by a dense eigendecomposition of `H`.
pub fn heisenberg_evolve(h: &SparseHermitian, a: &CMat, t: f64) -> Result<CMat> {
    Evolver::new(h)?.evolve(a, t)
}

/// Controls the maximization over `A` in `C_B(x, t)`.
#[derive(Debug, Clone)]
pub struct ProfileOptions {
    /// Starting directions: a Fibonacci grid on the upper hemisphere for spin
    /// 1/2 (`A` and `−A` give the same value), seeded random Hermitian
    /// matrices otherwise.
    pub grid_points: usize,
    /// Number of best grid points refined by alternating ascent.
    pub refine_starts: usize,
    pub refine_iters: usize,
    pub seed: u64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions { grid_points: 8, refine_starts: 1, refine_iters: 4, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfilePoint {
    pub x: usize,
    pub t: f64,
    pub measured: f64,
    /// Value on the coarse grid before refinement.
    pub grid_value: f64,
    /// Ascent steps actually taken.
    pub refine_steps: usize,
}

/// `C_B(x, t)` on a grid of sites and times, for `B` at site `y`.
///
/// The supremum over `A` is restricted to Hermitian `A`, normalized so that
/// `‖A‖ = 1` after removing the identity component that minimizes the norm.
/// The result is a lower estimate of the supremum over all of the site
/// algebra (at most a factor 2 below it for Hermitian `B`).
#[derive(Debug, Clone, Serialize)]
pub struct CommutatorProfile {
    pub y: usize,
    pub b_norm: f64,
    pub xs: Vec<usize>,
    pub ts: Vec<f64>,
    /// Row-major over `(x, t)`, `x` outer.
    pub points: Vec<ProfilePoint>,
    pub grid_points: usize,
    pub refine_iters: usize,
}

impl CommutatorProfile {
    pub fn value(&self, x: usize, t: f64) -> Option<f64> {
        self.points.iter().find(|p| p.x == x && p.t == t).map(|p| p.measured)
    }
}

/// `Tr_{sites ≠ x} (u v†)` as a `d × d` matrix.
fn reduced_outer(basis: &TensorBasis, x: usize, u: &CVec, v: &CVec) -> CMat {
    let d = basis.local_dims[x];
    let stride = basis.strides()[x];
    let mut out = CMat::zeros(d, d);
    for i in 0..basis.dim() {
        let a = (i / stride) % d;
        if a != 0 {
            continue;
        }
        for p in 0..d {
            for q in 0..d {
                out[(p, q)] += u[i + p * stride] * v[i + q * stride].conj();
            }
        }
    }
    out
}

/// Shifts and rescales a Hermitian matrix so its spectrum spans `[−1, 1]`.
fn centre_and_normalize(a: &CMat) -> Option<CMat> {
    let ev = eigvalsh(a);
    let (lo, hi) = (ev[0], ev[ev.len() - 1]);
    let half = 0.5 * (hi - lo);
    if half <= 1e-14 {
        return None;
    }
    let n = a.nrows();
    Some((a - crate::linalg::identity(n) * Complex64::new(0.5 * (hi + lo), 0.0)) / Complex64::new(half, 0.0))
}

/// Spectral sign of a Hermitian matrix, with zero eigenvalues sent to zero.
fn spectral_sign(x: &CMat) -> CMat {
    let e = eigh(x);
    let scale = e.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let mut d = CMat::zeros(x.nrows(), x.ncols());
    for (i, &v) in e.values.iter().enumerate() {
        d[(i, i)] = Complex64::new(
            if v > 1e-12 * scale {
                1.0
            } else if v < -1e-12 * scale {
                -1.0
            } else {
                0.0
            },
            0.0,
        );
    }
    &e.vectors * d * e.vectors.adjoint()
}

/// Dense `(op ⊗ 1) M` for a single-site sparse `op`.
fn left_apply(op: &SparseMatrix, m: &CMat) -> CMat {
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for r in 0..op.dim() {
        for (k, v) in op.row(r) {
            for col in 0..m.ncols() {
                out[(r, col)] += v * m[(k, col)];
            }
        }
    }
    out
}

fn commutator_matrix(a_op: &SparseMatrix, m: &CMat) -> CMat {
    let am = left_apply(a_op, m);
    let ma = left_apply(&a_op.adjoint(), &m.adjoint()).adjoint();
    let k = (am - ma) * I;
    (&k + k.adjoint()) * Complex64::new(0.5, 0.0)
}

/// `‖[A_x, M]‖`, the largest `|eigenvalue|` of the Hermitian `i[A_x, M]`.
/// Dense: the extreme eigenvalues of these commutators come in
/// near-degenerate clusters, where Lanczos needs most of the space anyway.
fn commutator_norm(a_op: &SparseMatrix, m: &CMat) -> f64 {
    let ev = eigvalsh(&commutator_matrix(a_op, m));
    ev[0].abs().max(ev[ev.len() - 1].abs())
}

/// As [`commutator_norm`], with an eigenvector for the extreme eigenvalue.
fn commutator_norm_vec(a_op: &SparseMatrix, m: &CMat) -> (f64, CVec) {
    let e = eigh(&commutator_matrix(a_op, m));
    let dim = e.values.len();
    let (lo, hi) = (e.values[0], e.values[dim - 1]);
    if hi.abs() >= lo.abs() {
        (hi.abs(), e.vectors.column(dim - 1).into_owned())
    } else {
        (lo.abs(), e.vectors.column(0).into_owned())
    }
}

fn starting_directions(d: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<CMat> {
    if d == 2 {
        let s = spin_matrices(crate::spinops::SpinValue::HALF);
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        return (0..count)
            .map(|i| {
                let z = 1.0 - (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                // 2 S^i are the Pauli matrices; n·σ has spectrum {−1, 1}.
                (&s.s1 * Complex64::new(2.0 * r * phi.cos(), 0.0))
                    + (&s.s2 * Complex64::new(2.0 * r * phi.sin(), 0.0))
                    + (&s.s3 * Complex64::new(2.0 * z, 0.0))
            })
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let g = CMat::from_fn(d, d, |_, _| {
            Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
        });
        if let Some(a) = centre_and_normalize(&((&g + g.adjoint()) * Complex64::new(0.5, 0.0))) {
            out.push(a);
        }
    }
    out
}

/// `max_A ‖[A_x, M]‖` over normalized Hermitian `A` at `x`: grid search
/// followed by alternating ascent, which is monotone.
fn maximize_commutator(basis: &TensorBasis, x: usize, m: &CMat, opts: &ProfileOptions) -> (f64, f64, usize) {
    let d = basis.local_dims[x];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (x as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));

    let mut scored: Vec<(f64, CMat)> = starting_directions(d, opts.grid_points.max(1), &mut rng)
        .into_iter()
        .map(|a| (commutator_norm(&local_operator(basis, &a, &[x]), m), a))
        .collect();
    scored.sort_by(|p, q| q.0.total_cmp(&p.0));
    let grid_value = scored[0].0;
    let mut best = grid_value;
    let mut steps = 0;
    for (_, a) in scored.into_iter().take(opts.refine_starts.max(1)) {
        let (mut cur, mut v) = commutator_norm_vec(&local_operator(basis, &a, &[x]), m);
        for _ in 0..opts.refine_iters {
            // ⟨v, i[A, M] v⟩ = Tr(A X_x) with X = i(M v v† − v v† M).
            let u = m * &v;
            let x_full = (reduced_outer(basis, x, &u, &v) - reduced_outer(basis, x, &v, &u)) * I;
            let x_h = (&x_full + x_full.adjoint()) * Complex64::new(0.5, 0.0);
            let next = spectral_sign(&x_h);
            if op_norm(&next) == 0.0 {
                break;
            }
            let op = local_operator(basis, &next, &[x]);
            let (val, w) = commutator_norm_vec(&op, m);
            steps += 1;
            if val <= cur * (1.0 + 1e-9) {
                cur = cur.max(val);
                break;
            }
            cur = val;
            v = w;
        }
        best = best.max(cur);
    }
    (best, grid_value, steps)
}

/// `C_B(x, t)` for `B` at site `y` on the grid `xs × ts`.
pub fn commutator_profile(
    graph: &SpinGraph,
    model: &ModelSpec,
    b: &CMat,
    y: usize,
    xs: &[usize],
    ts: &[f64],
    opts: &ProfileOptions,
) -> Result<CommutatorProfile> {
    if y >= graph.n_sites() {
        return Err(Error::InvalidParameter(format!("site {y} outside the graph")));
    }
    if let Some(&bad) = xs.iter().find(|&&x| x >= graph.n_sites()) {
        return Err(Error::InvalidParameter(format!("site {bad} outside the graph")));
    }
    let d = graph.spin(y).dim();
    if b.nrows() != d || b.ncols() != d {
        return Err(Error::DimensionMismatch(format!("B must be {d}x{d}")));
    }
    let h = build_hamiltonian(graph, model)?;
    let evolver = Evolver::new(&h)?;
    let basis = basis_of(graph);
    let b_full = local_operator(&basis, b, &[y]).to_dense();
    // ‖[α_t(A), B]‖ = ‖[A, α_{−t}(B)]‖.
    let evolved: Vec<CMat> = ts.iter().map(|&t| evolver.evolve(&b_full, -t)).collect::<Result<_>>()?;
    let grid: Vec<(usize, usize)> = xs.iter().flat_map(|&x| (0..ts.len()).map(move |k| (x, k))).collect();
    let points: Vec<ProfilePoint> = grid
        .par_iter()
        .map(|&(x, k)| {
            let (measured, grid_value, refine_steps) = maximize_commutator(&basis, x, &evolved[k], opts);
            ProfilePoint { x, t: ts[k], measured, grid_value, refine_steps }
        })
        .collect();
    Ok(CommutatorProfile {
        y,
        b_norm: op_norm(b),
        xs: xs.to_vec(),
        ts: ts.to_vec(),
        points,
        grid_points: opts.grid_points,
        refine_iters: opts.refine_iters,
    })
}

/// `sup_A ‖[A, B]‖ / ‖A‖` over the full algebra at the site of `B`, which
/// equals twice the distance from `B` to the scalars. For Hermitian `B` this
/// is the spectral spread; otherwise the upper estimate `2‖B‖` is used.
pub fn commutator_seed(b: &CMat) -> f64 {
    if hermiticity_residual(b) <= 1e-12 {
        let ev = eigvalsh(b);
        ev[ev.len() - 1] - ev[0]
    } else {
        2.0 * op_norm(b)
    }
}

/// An observable `B` as seen by the bound: its support, `C_B(y, 0)` for each
/// `y` in the support, and `‖B‖`.
#[derive(Debug, Clone, Serialize)]
pub struct LrSource {
    pub support: Vec<usize>,
    pub seeds: Vec<f64>,
    pub norm: f64,
}

impl LrSource {
    pub fn single_site(y: usize, b: &CMat) -> Self {
        LrSource { support: vec![y], seeds: vec![commutator_seed(b)], norm: op_norm(b) }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LrBound {
    pub sum_form: f64,
    /// `None` when `x` lies in the support of `B`.
    pub far_field: Option<f64>,
    pub trivial: f64,
    pub value: f64,
}

/// Evaluates the bound with a precomputed `‖Φ‖_λ` (for unit-norm `A`).
pub fn lr_bound_with_norm(graph: &SpinGraph, phi_norm: f64, lambda: f64, source: &LrSource, x: usize, t: f64) -> LrBound {
    let growth = 2.0 * t.abs() * phi_norm;
    let full = growth.exp();
    let excess = growth.exp_m1();
    let mut sum_form = 0.0;
    for (&y, &seed) in source.support.iter().zip(&source.seeds) {
        if y == x {
            sum_form += full * seed;
        } else {
            sum_form += (-lambda * graph.distance(x, y)).exp() * excess * seed;
        }
    }
    let far_field = if source.support.contains(&x) {
        None
    } else {
        let d = graph.distance_to_set(x, &source.support);
        Some(2.0 * source.support.len() as f64 * source.norm * excess * (-lambda * d).exp())
    };
    let trivial = 2.0 * source.norm;
    let value = far_field.map_or(sum_form, |c| c.min(sum_form)).min(trivial);
    LrBound { sum_form, far_field, trivial, value }
}

/// The commutator bound at `(x, t)` for unit-norm `A` at `x`.
pub fn lr_bound(graph: &SpinGraph, phi: &Interaction, lambda: f64, source: &LrSource, x: usize, t: f64) -> Result<LrBound> {
    let phi_norm = crate::spinops::interaction_norm(graph, phi, lambda, graph.max_local_dim())?;
    Ok(lr_bound_with_norm(graph, phi_norm, lambda, source, x, t))
}

#[derive(Debug, Clone, Serialize)]
pub struct LrComparisonRow {
    pub x: usize,
    pub t: f64,
    pub lambda: f64,
    pub measured: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LrComparison {
    pub lambdas: Vec<f64>,
    pub phi_norms: Vec<f64>,
    pub rows: Vec<LrComparisonRow>,
    /// Largest `measured − bound` over all rows (≤ 0 when sound).
    pub worst_excess: f64,
    pub sound: bool,
    /// λ with the smallest total bound over the grid.
    pub tightest_lambda: f64,
}

/// Compares a profile against the bound for each `λ`.
pub fn compare_with_bound(
    graph: &SpinGraph,
    phi: &Interaction,
    profile: &CommutatorProfile,
    b: &CMat,
    lambdas: &[f64],
) -> Result<LrComparison> {
    if lambdas.is_empty() {
        return Err(Error::InvalidParameter("need at least one lambda".into()));
    }
    let source = LrSource::single_site(profile.y, b);
    let mut rows = Vec::new();
    let mut phi_norms = Vec::new();
    let mut best = (f64::INFINITY, lambdas[0]);
    for &lambda in lambdas {
        let norm = crate::spinops::interaction_norm(graph, phi, lambda, graph.max_local_dim())?;
        phi_norms.push(norm);
        let mut total = 0.0;
        for p in &profile.points {
            let bound = lr_bound_with_norm(graph, norm, lambda, &source, p.x, p.t).value;
            total += bound;
            rows.push(LrComparisonRow { x: p.x, t: p.t, lambda, measured: p.measured, bound });
        }
        if total < best.0 {
            best = (total, lambda);
        }
    }
    // Round-off allowance on the measured side only.
    let worst_excess = rows.iter().map(|r| r.measured - r.bound).fold(f64::NEG_INFINITY, f64::max);
    let sound = rows.iter().all(|r| r.measured <= r.bound + 1e-10 * r.bound.max(1.0));
    Ok(LrComparison { lambdas: lambdas.to_vec(), phi_norms, rows, worst_excess, sound, tightest_lambda: best.1 })
}

/// Motion of the level set `C_B = threshold`.
#[derive(Debug, Clone, Serialize)]
pub struct LevelSetVelocity {
    pub threshold: f64,
    /// `(t, front)`: the largest `d(x, y)` with `C_B(x, t) ≥ threshold`.
    pub fronts: Vec<(f64, f64)>,
    /// Least-squares slope of the front against `t`.
    pub slope: f64,
    /// `min_λ 2‖Φ‖_λ / λ` over the supplied λ.
    pub bound_velocity: f64,
    pub within_bound: bool,
}

pub fn level_set_velocity(
    graph: &SpinGraph,
    profile: &CommutatorProfile,
    threshold: f64,
    lambdas_and_norms: &[(f64, f64)],
) -> LevelSetVelocity {
    let mut fronts = Vec::new();
    for &t in &profile.ts {
        let front = profile
            .points
            .iter()
            .filter(|p| p.t == t && p.measured >= threshold)
            .map(|p| graph.distance(p.x, profile.y))
            .fold(f64::NEG_INFINITY, f64::max);
        if front.is_finite() {
            fronts.push((t, front));
        }
    }
    let slope = if fronts.len() >= 2 {
        let n = fronts.len() as f64;
        let mt = fronts.iter().map(|p| p.0).sum::<f64>() / n;
        let md = fronts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = fronts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let sxy: f64 = fronts.iter().map(|p| (p.0 - mt) * (p.1 - md)).sum();
        if sxx > 0.0 {
            sxy / sxx
        } else {
            0.0
        }
    } else {
        0.0
    };
    let bound_velocity = lambdas_and_norms.iter().map(|&(l, n)| 2.0 * n / l).fold(f64::INFINITY, f64::min);
    LevelSetVelocity { threshold, fronts, slope, bound_velocity, within_bound: slope <= bound_velocity }
}

/// Random samples for the group-law check `α_{t+s} = α_t ∘ α_s`.
pub fn group_law_residual(evolver: &Evolver, a: &CMat, samples: &[(f64, f64)]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &(t, s) in samples {
        let lhs = evolver.evolve(a, t + s)?;
        let rhs = evolver.evolve(&evolver.evolve(a, s)?, t)?;
        worst = worst.max(crate::linalg::max_abs(&(lhs - rhs)));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, max_abs};
    use crate::spinops::SpinValue;

    fn xxx_chain(n: usize) -> SpinGraph {
        SpinGraph::chain(n, SpinValue::HALF, 1.0).unwrap()
    }

    #[test]
    fn evolution_basics() {
        let g = xxx_chain(4);
        let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
        let ev = Evolver::new(&h).unwrap();
        let hd = h.to_dense();
        assert!(max_abs(&(ev.evolve(&hd, 0.7).unwrap() - &hd)) < 1e-10);
        let s = spin_matrices(SpinValue::HALF);
        let a = local_operator(h.basis(), &s.s1, &[1]).to_dense();
        assert_eq!(ev.evolve(&a, 0.0).unwrap(), a);
        let at = ev.evolve(&a, 1.3).unwrap();
        assert!((op_norm(&at) - op_norm(&a)).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let samples: Vec<(f64, f64)> = (0..4).map(|_| (rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))).collect();
        assert!(group_law_residual(&ev, &a, &samples).unwrap() < 1e-9);
    }

    #[test]
    fn profile_at_time_zero() {
        let g = xxx_chain(4);
        let s = spin_matrices(SpinValue::HALF);
        let b = &s.s3 * c(2.0);
        let p = commutator_profile(&g, &ModelSpec::Xxx, &b, 1, &[0, 1, 2], &[0.0], &ProfileOptions::default()).unwrap();
        assert!(p.value(0, 0.0).unwrap() < 1e-12);
        assert!(p.value(2, 0.0).unwrap() < 1e-12);
        // sup over unit Hermitian A of ‖[A, σ³]‖ is 2.
        assert!((p.value(1, 0.0).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn bound_structure() {
        let g = xxx_chain(6);
        let phi = Interaction::from_model(&g, &ModelSpec::Xxx).unwrap();
        let s = spin_matrices(SpinValue::HALF);
        let src = LrSource::single_site(0, &(&s.s3 * c(2.0)));
        assert!((src.seeds[0] - 2.0).abs() < 1e-12);
        let b0 = lr_bound(&g, &phi, 1.0, &src, 3, 0.0).unwrap();
        assert_eq!(b0.far_field, Some(0.0));
        assert_eq!(b0.value, 0.0);
        // Decay in distance is exactly e^{−λ d} away from the trivial cap.
        let t = 1e-4;
        let b2 = lr_bound(&g, &phi, 1.0, &src, 2, t).unwrap();
        let b3 = lr_bound(&g, &phi, 1.0, &src, 3, t).unwrap();
        assert!((b3.sum_form / b2.sum_form - (-1.0f64).exp()).abs() < 1e-12);
        assert!(lr_bound(&g, &phi, 0.0, &src, 2, t).is_err());
        // Hand evaluation: ‖Φ‖_1 = 48 e, seed 2, d = 2.
        let norm = 48.0 * 1f64.exp();
        let expect = (-2.0f64).exp() * (2.0 * t * norm).exp_m1() * 2.0;
        assert!((b2.sum_form - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn small_chain_is_sound() {
        let g = xxx_chain(5);
        let phi = Interaction::from_model(&g, &ModelSpec::Xxx).unwrap();
        let s = spin_matrices(SpinValue::HALF);
        let b = &s.s3 * c(2.0);
        let ts = [0.0, 0.25, 0.5, 1.0];
        let p = commutator_profile(&g, &ModelSpec::Xxx, &b, 0, &[0, 1, 2, 3, 4], &ts, &ProfileOptions::default()).unwrap();
        let cmp = compare_with_bound(&g, &phi, &p, &b, &[0.5, 1.0]).unwrap();
        assert!(cmp.sound, "worst excess {}", cmp.worst_excess);
        // The profile spreads: at t = 1 the far site feels B.
        assert!(p.value(4, 1.0).unwrap() > 1e-6);
    }
}
