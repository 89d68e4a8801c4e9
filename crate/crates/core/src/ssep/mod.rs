//! The symmetric simple exclusion process: generator, its image as a
//! ferromagnetic Heisenberg Hamiltonian, and particle-number gap scans.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{eigh_real, RMat};
use crate::spinops::{build_hamiltonian, sectors_of_basis, ModelSpec, Site, SpinGraph, SpinValue};

/// Dense cap for generator diagonalization.
pub const SSEP_DENSE_CAP: usize = 4096;
pub const GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateEdge {
    pub x: usize,
    pub y: usize,
    pub rate: f64,
}

/// Vertices (by id) and edges with positive exchange rates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateGraph {
    pub vertices: Vec<usize>,
    pub edges: Vec<RateEdge>,
}

impl RateGraph {
    pub fn new(vertices: Vec<usize>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let g = RateGraph { vertices, edges: edges.into_iter().map(|(x, y, rate)| RateEdge { x, y, rate }).collect() };
        g.validate()?;
        Ok(g)
    }

    pub fn path(n: usize, rate: f64) -> Result<Self> {
        Self::new((0..n).collect(), (1..n).map(|i| (i - 1, i, rate)).collect())
    }

    pub fn complete(n: usize, rate: f64) -> Result<Self> {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j, rate))).collect();
        Self::new((0..n).collect(), edges)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(e) = self.edges.iter().find(|e| !(e.rate > 0.0) || !e.rate.is_finite()) {
            return Err(Error::InvalidGraph(format!("rate on ({},{}) must be positive and finite", e.x, e.y)));
        }
        self.spin_graph(1.0).map(|_| ())
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Edges as `(position, position, rate)`.
    pub fn edge_positions(&self) -> Vec<(usize, usize, f64)> {
        let pos: BTreeMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        self.edges.iter().map(|e| (pos[&e.x], pos[&e.y], e.rate)).collect()
    }

    /// Spin-1/2 graph with coupling `factor · r` on each edge.
    pub fn spin_graph(&self, factor: f64) -> Result<SpinGraph> {
        let sites = self.vertices.iter().map(|&id| Site { id, spin: SpinValue::HALF }).collect();
        SpinGraph::new(sites, self.edges.iter().map(|e| (e.x, e.y, factor * e.rate)).collect())
    }

    pub fn is_connected(&self) -> bool {
        self.spin_graph(1.0).map(|g| g.is_connected()).unwrap_or(false)
    }

    /// Connected components as induced subgraphs, in order of first vertex.
    pub fn components(&self) -> Vec<RateGraph> {
        let n = self.n_vertices();
        let mut label = vec![usize::MAX; n];
        let edges = self.edge_positions();
        let mut count = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = count;
            while let Some(v) = stack.pop() {
                for &(a, b, _) in &edges {
                    let w = if a == v { b } else if b == v { a } else { continue };
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (0..count)
            .map(|c| RateGraph {
                vertices: (0..n).filter(|&i| label[i] == c).map(|i| self.vertices[i]).collect(),
                edges: self
                    .edges
                    .iter()
                    .zip(&edges)
                    .filter(|(_, p)| label[p.0] == c)
                    .map(|(e, _)| e.clone())
                    .collect(),
            })
            .collect()
    }

    fn scaled(&self, factor: f64) -> RateGraph {
        RateGraph {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().map(|e| RateEdge { rate: e.rate * factor, ..e.clone() }).collect(),
        }
    }
}

/// Configurations `η ∈ {0,1}^V` with `n` particles, lexicographic in vertex
/// order (`η` of the first vertex most significant).
#[derive(Debug, Clone)]
pub struct ConfigurationSpace {
    pub n_vertices: usize,
    pub n: usize,
    configs: Vec<Vec<u8>>,
}

impl ConfigurationSpace {
    pub fn new(n_vertices: usize, n: usize) -> Result<Self> {
        if n > n_vertices {
            return Err(Error::InvalidParameter(format!("{n} particles on {n_vertices} vertices")));
        }
        let mut configs = Vec::new();
        let mut cur = vec![0u8; n_vertices];
        fn rec(pos: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
            if pos == cur.len() {
                if left == 0 {
                    out.push(cur.clone());
                }
                return;
            }
            if cur.len() - pos > left {
                cur[pos] = 0;
                rec(pos + 1, left, cur, out);
            }
            if left > 0 {
                cur[pos] = 1;
                rec(pos + 1, left - 1, cur, out);
                cur[pos] = 0;
            }
        }
        rec(0, n, &mut cur, &mut configs);
        Ok(ConfigurationSpace { n_vertices, n, configs })
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn configs(&self) -> &[Vec<u8>] {
        &self.configs
    }

    pub fn index_of(&self, eta: &[u8]) -> Option<usize> {
        self.configs.binary_search_by(|c| c.as_slice().cmp(eta)).ok()
    }

    /// Tensor-basis index of `η` under `S³_x = η_x − 1/2` (local index 0 is
    /// `m = +1/2`).
    pub fn tensor_index(eta: &[u8]) -> usize {
        eta.iter().fold(0, |acc, &e| acc * 2 + (1 - e as usize))
    }
}

/// `L f(η) = Σ r_xy (f(η) − f(η^{xy}))` on `Ω_n`.
#[derive(Debug, Clone)]
pub struct SsepGenerator {
    pub space: ConfigurationSpace,
    pub matrix: RMat,
}

pub fn ssep_generator(graph: &RateGraph, n: usize) -> Result<SsepGenerator> {
    graph.validate()?;
    let space = ConfigurationSpace::new(graph.n_vertices(), n)?;
    let dim = space.len();
    if dim > SSEP_DENSE_CAP {
        return Err(Error::DimensionCap { dim, cap: SSEP_DENSE_CAP });
    }
    let mut l = RMat::zeros(dim, dim);
    let edges = graph.edge_positions();
    for (i, eta) in space.configs().iter().enumerate() {
        for &(x, y, r) in &edges {
            if eta[x] != eta[y] {
                let mut swapped = eta.clone();
                swapped.swap(x, y);
                let j = space.index_of(&swapped).expect("exchange keeps the particle number");
                l[(i, i)] += r;
                l[(i, j)] -= r;
            }
        }
    }
    Ok(SsepGenerator { space, matrix: l })
}

impl SsepGenerator {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `max |(L 1)_η|`.
    pub fn row_sum_residual(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.sum().abs()).fold(0.0, f64::max)
    }

    pub fn symmetry_residual(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }

    pub fn max_offdiagonal(&self) -> f64 {
        let n = self.dim();
        let mut m = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    m = m.max(self.matrix[(i, j)]);
                }
            }
        }
        m
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        eigh_real(&self.matrix).0
    }

    /// Eigenvalues below `tol` count as kernel.
    pub fn kernel_dim(&self, tol: f64) -> usize {
        self.eigenvalues().iter().filter(|&&v| v.abs() <= tol).count()
    }

    /// `e^{−tL}` through the spectral decomposition.
    pub fn semigroup(&self, t: f64) -> RMat {
        let (vals, vecs) = eigh_real(&self.matrix);
        let n = self.dim();
        let d = RMat::from_fn(n, n, |i, j| if i == j { (-t * vals[i]).exp() } else { 0.0 });
        &vecs * d * vecs.transpose()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StochasticityCheck {
    pub t: f64,
    pub min_entry: f64,
    pub row_sum_residual: f64,
    pub stochastic: bool,
}

/// Nonnegativity and unit row sums of `e^{−tL}` to `1e-10`.
pub fn semigroup_check(gen: &SsepGenerator, ts: &[f64]) -> Vec<StochasticityCheck> {
    let (vals, vecs) = eigh_real(&gen.matrix);
    let n = gen.dim();
    ts.iter()
        .map(|&t| {
            let d = RMat::from_fn(n, n, |i, j| if i == j { (-t * vals[i]).exp() } else { 0.0 });
            let p = &vecs * d * vecs.transpose();
            let min_entry = p.min();
            let row_sum_residual = p.row_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max);
            StochasticityCheck { t, min_entry, row_sum_residual, stochastic: min_entry >= -1e-10 && row_sum_residual <= 1e-10 }
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SectorComparison {
    pub n: usize,
    pub magnetization: HalfInteger,
    pub dim: usize,
    pub max_difference: f64,
    /// First entry (row, column) with `|H − L| > 1e-12`.
    pub first_mismatch: Option<(usize, usize, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    /// `H = Σ r_xy (1 − t_xy) = H_XXX(J = 2r) + Σ r_xy / 2`.
    pub convention: String,
    pub constant_offset: f64,
    pub sectors: Vec<SectorComparison>,
    /// `max |(1/2 − 2 S_x·S_y) − (1 − t_xy)|` over the two-site basis.
    pub exchange_identity_residual: f64,
    pub equivalent: bool,
}

/// Swap operator on two spin-1/2 sites, `t|ab⟩ = |ba⟩`.
fn transposition() -> RMat {
    let mut t = RMat::zeros(4, 4);
    for a in 0..2 {
        for b in 0..2 {
            t[(b * 2 + a, a * 2 + b)] = 1.0;
        }
    }
    t
}

/// Checks that the sector blocks of `Σ r(1 − t)`, read in the `η` basis,
/// equal the SSEP generator for every particle number.
pub fn heisenberg_equivalence_check(graph: &RateGraph) -> Result<EquivalenceReport> {
    graph.validate()?;
    let sg = graph.spin_graph(2.0)?;
    let offset: f64 = graph.edges.iter().map(|e| e.rate / 2.0).sum();
    let h = build_hamiltonian(&sg, &ModelSpec::Xxx)?.shift(offset);

    let dot = crate::spinops::spin_dot(SpinValue::HALF, SpinValue::HALF);
    let lhs = RMat::from_fn(4, 4, |i, j| if i == j { 0.5 } else { 0.0 } - 2.0 * dot[(i, j)].re);
    let rhs = RMat::identity(4, 4) - transposition();
    let exchange_identity_residual = (lhs - rhs).amax();

    let v = graph.n_vertices();
    let sectors = sectors_of_basis(h.basis());
    let results: Vec<SectorComparison> = (0..=v)
        .into_par_iter()
        .map(|n| -> Result<SectorComparison> {
            let gen = ssep_generator(graph, n)?;
            let magnetization = HalfInteger::from_twice(2 * n as i64 - v as i64);
            debug_assert!(sectors.get(magnetization).is_some());
            let idx: Vec<usize> = gen.space.configs().iter().map(|e| ConfigurationSpace::tensor_index(e)).collect();
            let mut max_difference: f64 = 0.0;
            let mut first_mismatch = None;
            for (i, &ri) in idx.iter().enumerate() {
                for (j, &cj) in idx.iter().enumerate() {
                    let hv = h.matrix().get(ri, cj);
                    let diff = (hv.re - gen.matrix[(i, j)]).abs().max(hv.im.abs());
                    if diff > 1e-12 && first_mismatch.is_none() {
                        first_mismatch = Some((i, j, hv.re, gen.matrix[(i, j)]));
                    }
                    max_difference = max_difference.max(diff);
                }
            }
            Ok(SectorComparison { n, magnetization, dim: idx.len(), max_difference, first_mismatch })
        })
        .collect::<Result<_>>()?;
    let equivalent = exchange_identity_residual <= 1e-12 && results.iter().all(|s| s.first_mismatch.is_none());
    Ok(EquivalenceReport {
        convention: "H = sum r_xy (1 - t_xy) = -sum 2 r_xy S_x.S_y + sum r_xy/2; S3_x = eta_x - 1/2, sector M = n - |V|/2"
            .into(),
        constant_offset: offset,
        sectors: results,
        exchange_identity_residual,
        equivalent,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct AldousRow {
    pub n: usize,
    pub dim: usize,
    /// Smallest nonzero eigenvalue at the original rates.
    pub lambda: f64,
    /// `λ(n)/λ(1)`.
    pub scaled: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AldousScan {
    pub vertices: Vec<usize>,
    pub rows: Vec<AldousRow>,
    pub max_deviation: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AldousReport {
    pub connected: bool,
    pub warning: Option<String>,
    /// One scan per connected component (a single one when connected).
    pub components: Vec<AldousScan>,
    pub holds: bool,
}

fn scan_connected(graph: &RateGraph) -> Result<AldousScan> {
    let v = graph.n_vertices();
    if v < 2 {
        return Ok(AldousScan { vertices: graph.vertices.clone(), rows: Vec::new(), max_deviation: 0.0, holds: true });
    }
    let gap_of = |g: &RateGraph, n: usize| -> Result<(usize, f64)> {
        let gen = ssep_generator(g, n)?;
        let ev = gen.eigenvalues();
        Ok((gen.dim(), ev[1]))
    };
    let (_, lambda1) = gap_of(graph, 1)?;
    if !(lambda1 > 0.0) {
        return Err(Error::InvalidGraph("single-particle gap vanishes".into()));
    }
    // Verdict on rates rescaled so that λ(1) = 1.
    let scaled_graph = graph.scaled(1.0 / lambda1);
    let rows: Vec<AldousRow> = (1..v)
        .into_par_iter()
        .map(|n| -> Result<AldousRow> {
            let (dim, scaled) = gap_of(&scaled_graph, n)?;
            Ok(AldousRow { n, dim, lambda: scaled * lambda1, scaled })
        })
        .collect::<Result<_>>()?;
    let max_deviation = rows.iter().map(|r| (r.scaled - 1.0).abs()).fold(0.0, f64::max);
    Ok(AldousScan { vertices: graph.vertices.clone(), rows, max_deviation, holds: max_deviation <= GAP_TOL })
}

/// `n ↦ λ(n)` for `1 ≤ n ≤ |V| − 1` and the verdict `λ(n) = λ(1)`.
pub fn aldous_scan(graph: &RateGraph) -> Result<AldousReport> {
    graph.validate()?;
    if graph.is_connected() {
        let scan = scan_connected(graph)?;
        let holds = scan.holds;
        return Ok(AldousReport { connected: true, warning: None, components: vec![scan], holds });
    }
    let comps = graph.components();
    let warning = format!("graph is disconnected; analysed {} components separately", comps.len());
    let components: Vec<AldousScan> = comps.iter().map(scan_connected).collect::<Result<_>>()?;
    let holds = components.iter().all(|c| c.holds);
    Ok(AldousReport { connected: false, warning: Some(warning), components, holds })
}

/// Reads a rate graph from JSON `{"vertices": [...], "edges": [{"x", "y", "rate"}]}`.
pub fn rate_graph_from_json(text: &str) -> Result<RateGraph> {
    let g: RateGraph = serde_json::from_str(text)?;
    g.validate()?;
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn enumeration_is_lexicographic() {
        let s = ConfigurationSpace::new(4, 2).unwrap();
        assert_eq!(s.len(), 6);
        assert_eq!(s.configs()[0], vec![0, 0, 1, 1]);
        assert_eq!(s.configs()[5], vec![1, 1, 0, 0]);
        assert!(ConfigurationSpace::new(3, 4).is_err());
    }

    #[test]
    fn single_edge_generator() {
        let g = RateGraph::path(2, 1.0).unwrap();
        let l = ssep_generator(&g, 1).unwrap();
        assert_eq!(l.matrix, RMat::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
        let ev = l.eigenvalues();
        assert!(ev[0].abs() < 1e-14 && (ev[1] - 2.0).abs() < 1e-14);
        for n in [0, 2] {
            assert_eq!(ssep_generator(&g, n).unwrap().matrix, RMat::zeros(1, 1));
        }
    }

    #[test]
    fn path_of_three() {
        let g = RateGraph::path(3, 1.0).unwrap();
        let ev = ssep_generator(&g, 1).unwrap().eigenvalues();
        for (a, b) in ev.iter().zip([0.0, 1.0, 3.0]) {
            assert!((a - b).abs() < 1e-12);
        }
        let rep = aldous_scan(&g).unwrap();
        assert!(rep.holds);
        assert!((rep.components[0].rows[1].lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn complete_graph_gap() {
        let rep = aldous_scan(&RateGraph::complete(3, 1.0).unwrap()).unwrap();
        for r in &rep.components[0].rows {
            assert!((r.lambda - 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_equivalence_random_rates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let edges = (1..4).map(|i| (0, i, rng.random_range(0.1..2.0))).collect();
        let g = RateGraph::new((0..4).collect(), edges).unwrap();
        let rep = heisenberg_equivalence_check(&g).unwrap();
        assert!(rep.equivalent, "{:?}", rep.sectors);
        assert!(rep.exchange_identity_residual < 1e-15);
        let one = heisenberg_equivalence_check(&RateGraph::path(2, 1.0).unwrap()).unwrap();
        assert_eq!(one.sectors[1].dim, 2);
        assert!(one.sectors[1].max_difference < 1e-12);
    }

    #[test]
    fn generator_properties_and_semigroup() {
        let g = RateGraph::new((0..4).collect(), vec![(0, 1, 0.5), (1, 2, 1.5), (2, 3, 0.7), (3, 0, 1.1)]).unwrap();
        let l = ssep_generator(&g, 2).unwrap();
        assert!(l.row_sum_residual() < 1e-14);
        assert!(l.symmetry_residual() == 0.0);
        assert!(l.max_offdiagonal() <= 0.0);
        assert_eq!(l.kernel_dim(1e-10), 1);
        assert!(l.eigenvalues()[0] > -1e-10);
        assert!(semigroup_check(&l, &[0.1, 1.0, 10.0]).iter().all(|c| c.stochastic));
    }

    #[test]
    fn disconnected_graph_is_split() {
        let g = RateGraph::new((0..5).collect(), vec![(0, 1, 1.0), (2, 3, 1.0), (3, 4, 2.0)]).unwrap();
        let rep = aldous_scan(&g).unwrap();
        assert!(!rep.connected && rep.warning.is_some());
        assert_eq!(rep.components.len(), 2);
        assert!(rep.holds);
    }

    #[test]
    fn particle_hole_symmetry() {
        let g = RateGraph::new((0..5).collect(), vec![(0, 1, 0.3), (1, 2, 1.0), (1, 3, 2.0), (3, 4, 0.9)]).unwrap();
        let rows = &aldous_scan(&g).unwrap().components[0].rows;
        for r in rows {
            let mirror = rows.iter().find(|q| q.n == 5 - r.n).unwrap();
            assert!((r.lambda - mirror.lambda).abs() < 1e-10);
        }
    }
}
