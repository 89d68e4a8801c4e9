use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{c, eigh, CMat};
use crate::spinops::sectors::sectors_of_basis;
use crate::spinops::sparse::{SparseHermitian, SparseMatrix};

pub const DEFAULT_DENSE_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SectorLabel {
    Full,
    M(HalfInteger),
}

impl std::fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SectorLabel::Full => write!(f, "full"),
            SectorLabel::M(m) => write!(f, "M={m}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Solver {
    Dense,
    Lanczos,
}

#[derive(Debug, Clone)]
pub struct SpectrumOptions {
    pub dense_cap: usize,
    /// Only the `k` lowest eigenvalues; allows Lanczos above the dense cap.
    pub lowest: Option<usize>,
    pub vectors: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        SpectrumOptions { dense_cap: DEFAULT_DENSE_CAP, lowest: None, vectors: false }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub sector: SectorLabel,
    pub dim: usize,
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Columns in sector coordinates (basis indices listed by the sector).
    pub eigenvectors: Option<CMat>,
    /// `‖Hv − λv‖` per returned pair.
    pub residuals: Vec<f64>,
    pub solver: Solver,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Basis indices of sector `m`, or all of them.
pub fn sector_indices(h: &SparseHermitian, sector: Option<HalfInteger>) -> Result<Vec<usize>> {
    match sector {
        None => Ok((0..h.dim()).collect()),
        Some(m) => sectors_of_basis(h.basis())
            .get(m)
            .map(|v| v.to_vec())
            .ok_or_else(|| Error::InvalidParameter(format!("no basis states with M = {m}"))),
    }
}

/// `H` restricted to `indices` as a sparse matrix on the sector.
fn sector_sparse(h: &SparseMatrix, indices: &[usize]) -> SparseMatrix {
    let mut pos = vec![usize::MAX; h.dim()];
    for (k, &i) in indices.iter().enumerate() {
        pos[i] = k;
    }
    let triplets = indices
        .iter()
        .enumerate()
        .flat_map(|(k, &r)| h.row(r).filter(|(c, _)| pos[*c] != usize::MAX).map(move |(c, v)| (k, c, v)))
        .map(|(k, c, v)| (k, pos[c], v))
        .collect();
    SparseMatrix::from_triplets(indices.len(), triplets)
}

pub fn eigen_spectrum(h: &SparseHermitian, sector: Option<HalfInteger>, opts: &SpectrumOptions) -> Result<SpectrumResult> {
    let residual = h.matrix().hermiticity_residual();
    if residual > SparseHermitian::HERMITIAN_TOL {
        return Err(Error::NotHermitian { residual });
    }
    let indices = sector_indices(h, sector)?;
    let label = sector.map_or(SectorLabel::Full, SectorLabel::M);
    let dim = indices.len();
    let scale = h.matrix().row_sum_norm().max(1e-300);

    if dim <= opts.dense_cap {
        let block = h.matrix().block(&indices);
        let e = eigh(&block);
        let keep = opts.lowest.map_or(dim, |k| k.min(dim));
        let vecs = e.vectors.columns(0, keep).into_owned();
        let values = e.values[..keep].to_vec();
        let residuals = column_residuals(&block, &vecs, &values);
        check_residuals(&residuals, scale)?;
        return Ok(SpectrumResult {
            sector: label,
            dim,
            eigenvalues: values,
            eigenvectors: opts.vectors.then_some(vecs),
            residuals,
            solver: Solver::Dense,
        });
    }

    let k = opts.lowest.ok_or(Error::DimensionCap { dim, cap: opts.dense_cap })?;
    let sub = sector_sparse(h.matrix(), &indices);
    // deterministic, generic start vector
    let start = DVector::from_fn(dim, |i, _| c(1.0 + ((i * 7919) % 104729) as f64 / 104729.0));
    let out = crate::linalg::lanczos_lowest(dim, |v| sub.matvec(v), start, &[], k, 600.min(dim), 1e-12)?;
    check_residuals(&out.residuals, scale)?;
    let vecs = opts.vectors.then(|| CMat::from_columns(&out.vectors));
    Ok(SpectrumResult {
        sector: label,
        dim,
        eigenvalues: out.values,
        eigenvectors: vecs,
        residuals: out.residuals,
        solver: Solver::Lanczos,
    })
}

fn column_residuals(m: &CMat, vecs: &CMat, values: &[f64]) -> Vec<f64> {
    let mv = m * vecs;
    values
        .iter()
        .enumerate()
        .map(|(j, &l)| (mv.column(j) - vecs.column(j) * Complex64::new(l, 0.0)).norm())
        .collect()
}

fn check_residuals(residuals: &[f64], scale: f64) -> Result<()> {
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > 1e-9 * scale.max(1.0) {
        return Err(Error::NoConvergence { residual: worst, iterations: 0 });
    }
    Ok(())
}

/// Full spectra of every magnetization sector, ascending in `M`.
pub fn spectrum_by_sector(h: &SparseHermitian, opts: &SpectrumOptions) -> Result<Vec<SpectrumResult>> {
    use rayon::prelude::*;
    let labels = sectors_of_basis(h.basis()).labels();
    labels.par_iter().map(|&m| eigen_spectrum(h, Some(m), opts)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::{build_hamiltonian, ModelSpec, SpinGraph, SpinValue, TensorBasis};

    #[test]
    fn zero_operator() {
        let h = SparseHermitian::zero(TensorBasis::uniform(2, 2));
        let r = eigen_spectrum(&h, None, &SpectrumOptions::default()).unwrap();
        assert_eq!(r.eigenvalues, vec![0.0; 4]);
    }

    #[test]
    fn singlet_triplet() {
        let g = SpinGraph::chain(2, SpinValue::HALF, 1.0).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
        let r = eigen_spectrum(&h, None, &SpectrumOptions::default()).unwrap();
        let expect = [-0.25, -0.25, -0.25, 0.75];
        for (a, b) in r.eigenvalues.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        let m0 = eigen_spectrum(&h, Some(HalfInteger::ZERO), &SpectrumOptions::default()).unwrap();
        assert_eq!(m0.dim, 2);
        assert!((m0.eigenvalues[0] + 0.25).abs() < 1e-14 && (m0.eigenvalues[1] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn sectors_union_to_full_spectrum() {
        let g = SpinGraph::ring(6, SpinValue::HALF, 0.8).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxz { delta: 1.7 }).unwrap();
        let opts = SpectrumOptions::default();
        let full = eigen_spectrum(&h, None, &opts).unwrap().eigenvalues;
        let mut joined: Vec<f64> =
            spectrum_by_sector(&h, &opts).unwrap().into_iter().flat_map(|r| r.eigenvalues).collect();
        joined.sort_by(f64::total_cmp);
        assert_eq!(joined.len(), full.len());
        for (a, b) in joined.iter().zip(&full) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn lanczos_above_cap() {
        let g = SpinGraph::chain(8, SpinValue::HALF, 1.0).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
        let m = HalfInteger::ZERO;
        let dense = eigen_spectrum(&h, Some(m), &SpectrumOptions::default()).unwrap();
        let opts = SpectrumOptions { dense_cap: 10, lowest: Some(1), vectors: true };
        let it = eigen_spectrum(&h, Some(m), &opts).unwrap();
        assert_eq!(it.solver, Solver::Lanczos);
        assert!((it.eigenvalues[0] - dense.eigenvalues[0]).abs() < 1e-10);
        assert!(matches!(
            eigen_spectrum(&h, Some(m), &SpectrumOptions { dense_cap: 10, ..Default::default() }),
            Err(Error::DimensionCap { .. })
        ));
    }
}
