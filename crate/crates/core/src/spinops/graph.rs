use std::collections::{HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::spinops::spin::SpinValue;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Site {
    pub id: usize,
    pub spin: SpinValue,
}

/// An undirected edge between two site positions with a real coupling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub x: usize,
    pub y: usize,
    pub coupling: f64,
}

/// Vertices carrying spin magnitudes plus weighted edges.
///
/// Sites are addressed by position in the site list; the ids are kept only
/// for I/O. The site order fixes the tensor-product ordering of every operator
/// built on the graph.
#[derive(Debug, Clone)]
pub struct SpinGraph {
    sites: Vec<Site>,
    edges: Vec<Edge>,
    distances: Vec<Vec<f64>>,
    explicit_metric: bool,
}

impl SpinGraph {
    /// Builds a graph; edges refer to site ids.
    pub fn new(sites: Vec<Site>, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if sites.is_empty() {
            return Err(Error::InvalidGraph("graph has no sites".into()));
        }
        let mut pos = HashMap::new();
        for (i, s) in sites.iter().enumerate() {
            if pos.insert(s.id, i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate site id {}", s.id)));
            }
        }
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (a, b, j) in edges {
            let x = *pos.get(&a).ok_or_else(|| Error::InvalidGraph(format!("edge references unknown site {a}")))?;
            let y = *pos.get(&b).ok_or_else(|| Error::InvalidGraph(format!("edge references unknown site {b}")))?;
            if x == y {
                return Err(Error::InvalidGraph(format!("self-loop at site {a}")));
            }
            if !j.is_finite() {
                return Err(Error::InvalidGraph(format!("non-finite coupling on edge ({a},{b})")));
            }
            if !seen.insert((x.min(y), x.max(y))) {
                return Err(Error::InvalidGraph(format!("edge ({a},{b}) appears more than once")));
            }
            out.push(Edge { x, y, coupling: j });
        }
        let distances = graph_distances(sites.len(), &out);
        Ok(SpinGraph { sites, edges: out, distances, explicit_metric: false })
    }

    /// Open chain `0 - 1 - ... - (len-1)` with uniform spin and coupling.
    pub fn chain(len: usize, spin: SpinValue, coupling: f64) -> Result<Self> {
        Self::chain_with_couplings(&vec![spin; len], &vec![coupling; len.saturating_sub(1)])
    }

    pub fn chain_with_couplings(spins: &[SpinValue], couplings: &[f64]) -> Result<Self> {
        if couplings.len() + 1 != spins.len() {
            return Err(Error::InvalidGraph("a chain of n sites needs n-1 couplings".into()));
        }
        let sites = spins.iter().enumerate().map(|(id, &spin)| Site { id, spin }).collect();
        let edges = couplings.iter().enumerate().map(|(i, &j)| (i, i + 1, j)).collect();
        Self::new(sites, edges)
    }

    /// Periodic chain.
    pub fn ring(len: usize, spin: SpinValue, coupling: f64) -> Result<Self> {
        if len < 3 {
            return Err(Error::InvalidGraph("a ring needs at least 3 sites".into()));
        }
        let sites = (0..len).map(|id| Site { id, spin }).collect();
        let edges = (0..len).map(|i| (i, (i + 1) % len, coupling)).collect();
        Self::new(sites, edges)
    }

    /// Replaces the graph distance by an explicit table indexed by position.
    pub fn with_metric(mut self, table: Vec<Vec<f64>>) -> Result<Self> {
        let n = self.sites.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGraph(format!("metric table must be {n}x{n}")));
        }
        for i in 0..n {
            if table[i][i] != 0.0 {
                return Err(Error::InvalidGraph("metric must vanish on the diagonal".into()));
            }
            for j in 0..n {
                let d = table[i][j];
                if d.is_nan() || d < 0.0 {
                    return Err(Error::InvalidGraph("metric entries must be nonnegative".into()));
                }
                if i != j && d == 0.0 {
                    return Err(Error::InvalidGraph("distinct sites must have positive distance".into()));
                }
                if d != table[j][i] {
                    return Err(Error::InvalidGraph("metric must be symmetric".into()));
                }
                for (via_i, row_k) in table[i].iter().zip(&table) {
                    if d > via_i + row_k[j] + 1e-12 {
                        return Err(Error::InvalidGraph("metric violates the triangle inequality".into()));
                    }
                }
            }
        }
        self.distances = table;
        self.explicit_metric = true;
        Ok(self)
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn spin(&self, pos: usize) -> SpinValue {
        self.sites[pos].spin
    }

    pub fn spins(&self) -> Vec<SpinValue> {
        self.sites.iter().map(|s| s.spin).collect()
    }

    pub fn local_dims(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.spin.dim()).collect()
    }

    pub fn site_ids(&self) -> Vec<usize> {
        self.sites.iter().map(|s| s.id).collect()
    }

    pub fn position_of(&self, id: usize) -> Option<usize> {
        self.sites.iter().position(|s| s.id == id)
    }

    pub fn max_local_dim(&self) -> usize {
        self.sites.iter().map(|s| s.spin.dim()).max().unwrap_or(1)
    }

    /// Total Hilbert-space dimension, or `None` on overflow.
    pub fn total_dim(&self) -> Option<usize> {
        self.sites.iter().try_fold(1usize, |acc, s| acc.checked_mul(s.spin.dim()))
    }

    /// `S_max = Σ s_x`.
    pub fn s_max(&self) -> HalfInteger {
        HalfInteger(self.sites.iter().map(|s| s.spin.twice_s() as i64).sum())
    }

    pub fn has_explicit_metric(&self) -> bool {
        self.explicit_metric
    }

    /// Distance between positions; `f64::INFINITY` across components.
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        self.distances[x][y]
    }

    pub fn diameter(&self, support: &[usize]) -> f64 {
        let mut d: f64 = 0.0;
        for &a in support {
            for &b in support {
                d = d.max(self.distances[a][b]);
            }
        }
        d
    }

    pub fn distance_to_set(&self, x: usize, set: &[usize]) -> f64 {
        set.iter().map(|&y| self.distances[x][y]).fold(f64::INFINITY, f64::min)
    }

    pub fn is_connected(&self) -> bool {
        self.distances[0].iter().all(|d| d.is_finite())
    }

    /// Same vertices and edges with every coupling replaced by `f(edge)`.
    pub fn map_couplings(&self, f: impl Fn(&Edge) -> f64) -> SpinGraph {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.coupling = f(e);
        }
        g
    }

    /// Same edges, every site carrying `spin`.
    pub fn with_uniform_spin(&self, spin: SpinValue) -> SpinGraph {
        let mut g = self.clone();
        for s in &mut g.sites {
            s.spin = spin;
        }
        g
    }
}

fn graph_distances(n: usize, edges: &[Edge]) -> Vec<Vec<f64>> {
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.x].push(e.y);
        adj[e.y].push(e.x);
    }
    (0..n)
        .map(|src| {
            let mut dist = vec![f64::INFINITY; n];
            dist[src] = 0.0;
            let mut queue = VecDeque::from([src]);
            while let Some(v) = queue.pop_front() {
                for &w in &adj[v] {
                    if dist[w].is_infinite() {
                        dist[w] = dist[v] + 1.0;
                        queue.push_back(w);
                    }
                }
            }
            dist
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half_sites(n: usize) -> Vec<Site> {
        (0..n).map(|id| Site { id, spin: SpinValue::HALF }).collect()
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        assert!(SpinGraph::new(half_sites(2), vec![(0, 0, 1.0)]).is_err());
        assert!(SpinGraph::new(half_sites(2), vec![(0, 1, 1.0), (1, 0, 2.0)]).is_err());
        assert!(SpinGraph::new(half_sites(2), vec![(0, 1, f64::NAN)]).is_err());
        assert!(SpinGraph::new(half_sites(2), vec![(0, 5, 1.0)]).is_err());
    }

    #[test]
    fn chain_distances_form_a_metric() {
        let g = SpinGraph::chain(5, SpinValue::ONE, 1.0).unwrap();
        for x in 0..5 {
            assert_eq!(g.distance(x, x), 0.0);
            for y in 0..5 {
                assert_eq!(g.distance(x, y), (x as f64 - y as f64).abs());
                assert_eq!(g.distance(x, y), g.distance(y, x));
                for z in 0..5 {
                    assert!(g.distance(x, z) <= g.distance(x, y) + g.distance(y, z));
                }
            }
        }
        assert_eq!(g.diameter(&[1, 3, 4]), 3.0);
        assert_eq!(g.s_max(), HalfInteger::from_integer(5));
        assert_eq!(g.total_dim(), Some(243));
    }

    #[test]
    fn ring_wraps_around() {
        let g = SpinGraph::ring(6, SpinValue::HALF, 1.0).unwrap();
        assert_eq!(g.distance(0, 5), 1.0);
        assert_eq!(g.distance(0, 3), 3.0);
    }

    #[test]
    fn explicit_metric_is_validated() {
        let g = SpinGraph::chain(3, SpinValue::HALF, 1.0).unwrap();
        let bad = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 1.0], vec![5.0, 1.0, 0.0]];
        assert!(g.clone().with_metric(bad).is_err());
        let ok = vec![vec![0.0, 2.0, 3.0], vec![2.0, 0.0, 1.0], vec![3.0, 1.0, 0.0]];
        let g = g.with_metric(ok).unwrap();
        assert_eq!(g.distance(0, 2), 3.0);
    }

    #[test]
    fn disconnected_graph_has_infinite_distance() {
        let g = SpinGraph::new(half_sites(3), vec![(0, 1, 1.0)]).unwrap();
        assert!(g.distance(0, 2).is_infinite());
        assert!(!g.is_connected());
    }
}
