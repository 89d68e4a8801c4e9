use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, identity, lanczos_lowest, op_norm, CMat, CVec};
use crate::spinops::{
    aklt_term, basis_of, build_hamiltonian, interaction_norm, local_operator, spin_dot, Interaction, ModelSpec,
    Site, SparseHermitian, SpinGraph, SpinValue,
};

/// Projector onto total spin 3/2 in `1/2 ⊗ 1`: `(2/3)(S·S + 1)`.
fn cap_term(cap_first: bool) -> CMat {
    let ss = if cap_first {
        spin_dot(SpinValue::HALF, SpinValue::ONE)
    } else {
        spin_dot(SpinValue::ONE, SpinValue::HALF)
    };
    (ss + identity(6)) * c(2.0 / 3.0)
}

/// AKLT chain of `bulk` spin-1 sites with a spin-1/2 site at each end,
/// coupled by the projection onto the larger total spin. The open AKLT chain
/// has a fourfold ground state; the end caps pair the dangling edge spins so
/// the ground state is unique.
pub fn capped_aklt_chain(bulk: usize) -> Result<(SpinGraph, ModelSpec)> {
    if bulk < 2 {
        return Err(Error::InvalidParameter("capped AKLT chain needs at least 2 bulk sites".into()));
    }
    let n = bulk + 2;
    let sites: Vec<Site> = (0..n)
        .map(|i| Site { id: i, spin: if i == 0 || i == n - 1 { SpinValue::HALF } else { SpinValue::ONE } })
        .collect();
    let edges: Vec<(usize, usize, f64)> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    let graph = SpinGraph::new(sites, edges)?;
    let mut terms = vec![cap_term(true)];
    terms.extend((0..bulk - 1).map(|_| aklt_term()));
    terms.push(cap_term(false));
    Ok((graph, ModelSpec::CustomTwoSite { terms }))
}

#[derive(Debug, Clone)]
pub struct ClusteringOptions {
    pub lambda: f64,
    /// Site of `A`.
    pub a_site: usize,
    /// Sites where the translated `B` is placed.
    pub b_sites: Vec<usize>,
    /// Sites this close to either end are left out of the fit.
    pub boundary_margin: usize,
    pub dense_cap: usize,
}

impl ClusteringOptions {
    /// `A` at the first site after the margin, `B` at every later site except
    /// the last one (an end cap on the capped chain).
    pub fn for_chain(n_sites: usize, lambda: f64) -> Self {
        let margin = 2;
        ClusteringOptions {
            lambda,
            a_site: margin,
            b_sites: (margin + 1..n_sites.saturating_sub(1)).collect(),
            boundary_margin: margin,
            dense_cap: 1024,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusteringPoint {
    pub site: usize,
    pub d: f64,
    pub truncated: f64,
    pub in_fit: bool,
}

/// `ln|C(d)| ≈ intercept − rate·d`.
#[derive(Debug, Clone, Serialize)]
pub struct LogLinearFit {
    pub rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusteringCurve {
    pub ground_energy: f64,
    /// First excited level minus the ground energy in the finite volume.
    pub gamma: f64,
    pub degenerate: bool,
    pub lambda: f64,
    pub phi_norm: f64,
    /// `γλ / (4‖Φ‖_λ + γ)`; `None` when the ground state is degenerate.
    pub mu: Option<f64>,
    pub points: Vec<ClusteringPoint>,
    pub fit: Option<LogLinearFit>,
}

impl ClusteringCurve {
    /// Whether the fitted decay rate is at least `μ`.
    pub fn rate_exceeds_mu(&self) -> Option<bool> {
        Some(self.fit.as_ref()?.rate >= self.mu?)
    }
}

pub(crate) fn log_linear_fit(points: &[(f64, f64)]) -> Option<LogLinearFit> {
    let data: Vec<(f64, f64)> = points.iter().filter(|p| p.1.abs() > 0.0).map(|&(d, v)| (d, v.abs().ln())).collect();
    if data.len() < 2 {
        return None;
    }
    let n = data.len() as f64;
    let mx = data.iter().map(|p| p.0).sum::<f64>() / n;
    let my = data.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = data.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = data.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = data.iter().map(|p| (p.1 - my).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some(LogLinearFit { rate: -slope, intercept: my - slope * mx, r_squared, n_points: data.len() })
}

/// Ground state, ground energy and the gap to the next level.
pub(crate) fn ground_state(h: &SparseHermitian, dense_cap: usize) -> Result<(CVec, f64, f64)> {
    let dim = h.dim();
    if dim <= dense_cap {
        let e = eigh(&h.to_dense());
        let gap = if dim > 1 { e.values[1] - e.values[0] } else { f64::INFINITY };
        return Ok((e.vectors.column(0).into_owned(), e.values[0], gap));
    }
    let start = DVector::from_fn(dim, |i, _| Complex64::new(1.0 + ((i * 2654435761) % 1000) as f64 / 1000.0, 0.0));
    let matvec = |v: &CVec| h.matrix().matvec(v);
    let first = lanczos_lowest(dim, matvec, start.clone(), &[], 1, 600, 1e-12)?;
    let omega = first.vectors[0].clone();
    let scale = h.matrix().row_sum_norm().max(1.0);
    if first.residuals[0] > 1e-8 * scale {
        return Err(Error::NoConvergence { residual: first.residuals[0], iterations: first.iterations });
    }
    let second = lanczos_lowest(dim, matvec, start, std::slice::from_ref(&omega), 1, 600, 1e-12)?;
    if second.residuals[0] > 1e-8 * scale {
        return Err(Error::NoConvergence { residual: second.residuals[0], iterations: second.iterations });
    }
    Ok((omega, first.values[0], second.values[0] - first.values[0]))
}

fn expectation(h: &SparseHermitian, op: &CMat, site: usize, v: &CVec) -> Complex64 {
    let m = local_operator(h.basis(), op, &[site]);
    v.dotc(&m.matvec(v))
}

/// Truncated ground-state correlations of `A` at a fixed site against
/// translates of `B`, with a log-linear fit away from the boundary.
pub fn clustering_measure(
    graph: &SpinGraph,
    model: &ModelSpec,
    a: &CMat,
    b: &CMat,
    opts: &ClusteringOptions,
) -> Result<ClusteringCurve> {
    let n = graph.n_sites();
    if opts.a_site >= n || opts.b_sites.iter().any(|&y| y >= n) {
        return Err(Error::InvalidParameter("clustering site outside the graph".into()));
    }
    let h = build_hamiltonian(graph, model)?;
    let (omega, e0, gamma) = ground_state(&h, opts.dense_cap)?;
    let degenerate = gamma <= 1e-8 * e0.abs().max(1.0);
    let phi = Interaction::from_model(graph, model)?;
    let phi_norm = interaction_norm(graph, &phi, opts.lambda, graph.max_local_dim())?;
    let mu = (!degenerate).then(|| gamma * opts.lambda / (4.0 * phi_norm + gamma));

    let basis = basis_of(graph);
    let a_op = local_operator(&basis, a, &[opts.a_site]);
    let a_omega = a_op.matvec(&omega);
    let mean_a = omega.dotc(&a_omega);
    let inside = |s: usize| s >= opts.boundary_margin && s + opts.boundary_margin < n;
    let mut points = Vec::with_capacity(opts.b_sites.len());
    for &y in &opts.b_sites {
        if b.nrows() != graph.spin(y).dim() {
            return Err(Error::DimensionMismatch(format!("B does not fit the spin at site {y}")));
        }
        let b_omega = local_operator(&basis, b, &[y]).matvec(&omega);
        let joint = a_omega.dotc(&b_omega);
        // ⟨Ω, A B Ω⟩ = ⟨A† Ω, B Ω⟩; A is Hermitian for the observables used here,
        // and the general case is handled by the adjoint below.
        let joint = if crate::linalg::hermiticity_residual(a) <= 1e-12 {
            joint
        } else {
            let a_dag = local_operator(&basis, &a.adjoint(), &[opts.a_site]).matvec(&omega);
            a_dag.dotc(&b_omega)
        };
        let mean_b = expectation(&h, b, y, &omega);
        let truncated = (joint - mean_a * mean_b).norm();
        points.push(ClusteringPoint {
            site: y,
            d: graph.distance(opts.a_site, y),
            truncated,
            in_fit: y != opts.a_site && inside(y) && inside(opts.a_site),
        });
    }
    let fit_data: Vec<(f64, f64)> = points.iter().filter(|p| p.in_fit).map(|p| (p.d, p.truncated)).collect();
    let fit = log_linear_fit(&fit_data);
    Ok(ClusteringCurve { ground_energy: e0, gamma, degenerate, lambda: opts.lambda, phi_norm, mu, points, fit })
}

#[derive(Debug, Clone, Serialize)]
pub struct ImaginaryTimePoint {
    pub b: f64,
    /// `|⟨Ω, A α_{ib}(B) Ω⟩|` with `B` made mean zero.
    pub value: f64,
    /// `‖A‖ ‖B‖ e^{−γb}`.
    pub bound: f64,
    /// Whether `0 ≤ γb ≤ 2μ d(x, y)`.
    pub in_window: bool,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ImaginaryTimeReport {
    pub gamma: f64,
    pub mu: f64,
    pub distance: f64,
    pub points: Vec<ImaginaryTimePoint>,
    pub all_hold: bool,
}

/// Checks `|⟨Ω, A e^{−bH} B e^{bH} Ω⟩| ≤ ‖A‖‖B‖e^{−γb}` on a grid of `b` by a
/// dense eigendecomposition (the ground state must be unique).
#[allow(clippy::too_many_arguments)]
pub fn imaginary_time_check(
    graph: &SpinGraph,
    model: &ModelSpec,
    a: &CMat,
    x: usize,
    b: &CMat,
    y: usize,
    bs: &[f64],
    lambda: f64,
    dense_cap: usize,
) -> Result<ImaginaryTimeReport> {
    let h = build_hamiltonian(graph, model)?;
    if h.dim() > dense_cap {
        return Err(Error::DimensionCap { dim: h.dim(), cap: dense_cap });
    }
    let e = eigh(&h.to_dense());
    let gamma = e.values[1] - e.values[0];
    if gamma <= 1e-8 * e.values[0].abs().max(1.0) {
        return Err(Error::InvalidParameter("ground state is degenerate; the imaginary-time bound needs a gap".into()));
    }
    let phi = Interaction::from_model(graph, model)?;
    let phi_norm = interaction_norm(graph, &phi, lambda, graph.max_local_dim())?;
    let mu = gamma * lambda / (4.0 * phi_norm + gamma);
    let distance = graph.distance(x, y);

    let omega = e.vectors.column(0).into_owned();
    let basis = h.basis().clone();
    let mean_b = expectation(&h, b, y, &omega);
    let b0 = b - identity(b.nrows()) * mean_b;
    let b_omega = local_operator(&basis, &b0, &[y]).matvec(&omega);
    let a_dag_omega = local_operator(&basis, &a.adjoint(), &[x]).matvec(&omega);
    // Coefficients in the eigenbasis.
    let coeff_b = e.vectors.adjoint() * &b_omega;
    let coeff_a = e.vectors.adjoint() * &a_dag_omega;
    let norm_a = op_norm(a);
    let norm_b = op_norm(&b0);
    let points: Vec<ImaginaryTimePoint> = bs
        .iter()
        .map(|&bt| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..e.values.len() {
                let w = (-(bt) * (e.values[k] - e.values[0])).exp();
                acc += coeff_a[k].conj() * coeff_b[k] * w;
            }
            let value = acc.norm();
            let bound = norm_a * norm_b * (-gamma * bt).exp();
            ImaginaryTimePoint {
                b: bt,
                value,
                bound,
                in_window: bt >= 0.0 && gamma * bt <= 2.0 * mu * distance,
                holds: value <= bound + 1e-12,
            }
        })
        .collect();
    let all_hold = points.iter().all(|p| p.holds);
    Ok(ImaginaryTimeReport { gamma, mu, distance, points, all_hold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::spin_matrices;

    #[test]
    fn capped_chain_has_unique_ground_state() {
        let (g, m) = capped_aklt_chain(3).unwrap();
        let h = build_hamiltonian(&g, &m).unwrap();
        let (_, e0, gap) = ground_state(&h, 4096).unwrap();
        assert!(e0.abs() < 1e-10);
        assert!(gap > 0.1);
    }

    #[test]
    fn capped_chain_decays_at_ln3() {
        let (g, m) = capped_aklt_chain(6).unwrap();
        let s = spin_matrices(SpinValue::ONE);
        let opts = ClusteringOptions::for_chain(g.n_sites(), 1.0);
        let curve = clustering_measure(&g, &m, &s.s3, &s.s3, &opts).unwrap();
        let fit = curve.fit.clone().unwrap();
        assert!((fit.rate - 3f64.ln()).abs() < 0.05 * 3f64.ln(), "rate {}", fit.rate);
        assert!(fit.r_squared >= 0.99);
        assert_eq!(curve.rate_exceeds_mu(), Some(true), "gamma {} e0 {}", curve.gamma, curve.ground_energy);
    }

    #[test]
    fn identity_observables_have_no_correlation() {
        let (g, m) = capped_aklt_chain(3).unwrap();
        let opts = ClusteringOptions::for_chain(g.n_sites(), 1.0);
        let curve = clustering_measure(&g, &m, &identity(3), &identity(3), &ClusteringOptions { b_sites: vec![1, 3], ..opts }).unwrap();
        assert!(curve.points.iter().all(|p| p.truncated < 1e-12));
    }

    #[test]
    fn imaginary_time_bound_holds() {
        let (g, m) = capped_aklt_chain(3).unwrap();
        let s = spin_matrices(SpinValue::ONE);
        let bs: Vec<f64> = (0..8).map(|k| 0.5 * k as f64).collect();
        let rep = imaginary_time_check(&g, &m, &s.s3, 1, &s.s3, 3, &bs, 1.0, 1024).unwrap();
        assert!(rep.all_hold);
        assert!(rep.mu > 0.0);
    }
}
