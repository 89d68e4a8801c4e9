use crate::error::{Error, Result};
use crate::linalg::{hermiticity_residual, op_norm, CMat};
use crate::spinops::graph::SpinGraph;
use crate::spinops::hamiltonian::{edge_term, ModelSpec};

/// A finite-range interaction: Hermitian terms `Φ(X)` on site subsets `X`
/// (positions into a [`SpinGraph`]). The matrix of each term acts on the
/// tensor product of its support in the listed order.
#[derive(Debug, Clone, Default)]
pub struct Interaction {
    terms: Vec<(Vec<usize>, CMat)>,
}

impl Interaction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_term(&mut self, graph: &SpinGraph, support: Vec<usize>, op: CMat) -> Result<()> {
        if support.is_empty() {
            return Err(Error::InvalidParameter("interaction term with empty support".into()));
        }
        if let Some(&bad) = support.iter().find(|&&x| x >= graph.n_sites()) {
            return Err(Error::InvalidParameter(format!("support site {bad} outside the graph")));
        }
        let dim: usize = support.iter().map(|&x| graph.spin(x).dim()).product();
        if op.nrows() != dim || op.ncols() != dim {
            return Err(Error::DimensionMismatch(format!("term on {support:?} must be {dim}x{dim}")));
        }
        let r = hermiticity_residual(&op);
        if r > 1e-12 {
            return Err(Error::NotHermitian { residual: r });
        }
        self.terms.push((support, op));
        Ok(())
    }

    /// One term per edge, as assembled by the Hamiltonian builder.
    pub fn from_model(graph: &SpinGraph, model: &ModelSpec) -> Result<Self> {
        model.validate(graph)?;
        let mut phi = Interaction::new();
        for (k, e) in graph.edges().iter().enumerate() {
            phi.add_term(graph, vec![e.x, e.y], edge_term(graph, model, k))?;
        }
        Ok(phi)
    }

    pub fn terms(&self) -> &[(Vec<usize>, CMat)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// `‖Φ‖_λ = sup_x Σ_{X∋x} |X| ‖Φ(X)‖ N^{2|X|} e^{λ D(X)}`.
pub fn interaction_norm(graph: &SpinGraph, phi: &Interaction, lambda: f64, n: usize) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParameter("lambda must be positive".into()));
    }
    if n < graph.max_local_dim() {
        return Err(Error::InvalidParameter(format!(
            "N = {n} is smaller than the largest local dimension {}",
            graph.max_local_dim()
        )));
    }
    let mut per_site = vec![0.0; graph.n_sites()];
    for (support, op) in &phi.terms {
        let norm = op_norm(op);
        if !norm.is_finite() {
            return Err(Error::InvalidParameter(format!("term on {support:?} has unbounded norm")));
        }
        let size = support.len() as f64;
        let w = size * norm * (n as f64).powf(2.0 * size) * (lambda * graph.diameter(support)).exp();
        for &x in support {
            per_site[x] += w;
        }
    }
    Ok(per_site.into_iter().fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{c, identity};
    use crate::spinops::spin::{spin_dot, SpinValue};

    #[test]
    fn single_unit_term() {
        let g = SpinGraph::chain(2, SpinValue::HALF, 1.0).unwrap();
        let mut phi = Interaction::new();
        phi.add_term(&g, vec![0, 1], identity(4)).unwrap();
        let v = interaction_norm(&g, &phi, 1.0, 2).unwrap();
        assert!((v - 32.0 * std::f64::consts::E).abs() < 1e-12);
    }

    #[test]
    fn empty_is_zero() {
        let g = SpinGraph::chain(3, SpinValue::HALF, 1.0).unwrap();
        assert_eq!(interaction_norm(&g, &Interaction::new(), 1.0, 2).unwrap(), 0.0);
    }

    #[test]
    fn xxx_chain_interior_site_dominates() {
        let g = SpinGraph::chain(4, SpinValue::HALF, 1.0).unwrap();
        let phi = Interaction::from_model(&g, &ModelSpec::Xxx).unwrap();
        // ‖S·S‖ = 3/4 for two spin-1/2; interior sites touch two edges.
        let one = 2.0 * 0.75 * 16.0 * 0.5f64.exp();
        let v = interaction_norm(&g, &phi, 0.5, 2).unwrap();
        assert!((v - 2.0 * one).abs() < 1e-12);
    }

    #[test]
    fn rejects_small_n_and_bad_lambda() {
        let g = SpinGraph::chain(2, SpinValue::ONE, 1.0).unwrap();
        let mut phi = Interaction::new();
        phi.add_term(&g, vec![0, 1], spin_dot(SpinValue::ONE, SpinValue::ONE) * c(1.0)).unwrap();
        assert!(interaction_norm(&g, &phi, 1.0, 2).is_err());
        assert!(interaction_norm(&g, &phi, 0.0, 3).is_err());
    }
}
