use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{c, eigvalsh, CMat};
use crate::spectra::eigen::{eigen_spectrum, SpectrumOptions};
use crate::spinops::hamiltonian::{build_hamiltonian, local_operator, ModelSpec};
use crate::spinops::sparse::SparseHermitian;
use crate::spinops::{SpinGraph, SpinValue};

#[derive(Debug, Clone, Serialize)]
pub struct SectorGap {
    pub n: usize,
    pub m: HalfInteger,
    pub dim: usize,
    pub ground_energy: f64,
    /// `None` when every eigenvalue of the sector equals its ground energy.
    pub gap: Option<f64>,
}

/// `S_max` of a basis, reading spins off the local dimensions.
fn basis_s_max(h: &SparseHermitian) -> HalfInteger {
    HalfInteger(h.basis().local_dims.iter().map(|&d| d as i64 - 1).sum())
}

/// Gap above the ground energy of the sector `M = S_max − n`.
pub fn sector_gap(h: &SparseHermitian, n: usize) -> Result<SectorGap> {
    let s_max = basis_s_max(h);
    let m = s_max - HalfInteger::from_integer(n as i64);
    if m.twice() < -s_max.twice() {
        return Err(Error::InvalidParameter(format!("n = {n} exceeds 2 S_max = {}", s_max.twice())));
    }
    let spec = eigen_spectrum(h, Some(m), &SpectrumOptions::default())?;
    let e0 = spec.eigenvalues[0];
    let scale = spec.eigenvalues.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    let gap = spec.eigenvalues.iter().map(|v| v - e0).find(|&d| d > 1e-9 * scale);
    Ok(SectorGap { n, m, dim: spec.dim, ground_energy: e0, gap })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GapPoint {
    pub lambda: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct PerturbedGapScan {
    pub length: usize,
    /// Number of lowest levels treated as ground states (fixed at λ = 0).
    pub ground_multiplicity: usize,
    pub points: Vec<GapPoint>,
    /// Largest grid interval around λ = 0 on which the gap stays positive.
    pub positive_interval: Option<(f64, f64)>,
    /// Largest `|Δgap / Δλ|` between neighbouring grid points.
    pub max_step_slope: f64,
}

/// `H(λ) = H_AKLT + λ Σ_x Φ_x` on an open spin-1 chain, where `Φ_x` is `phi`
/// translated to act on sites `x, x+1, ..., x+r−1`.
pub fn perturbed_hamiltonian_parts(length: usize, phi: &CMat) -> Result<(CMat, CMat)> {
    let mut range = 0;
    let mut d = 1;
    while d < phi.nrows() {
        d *= 3;
        range += 1;
    }
    if d != phi.nrows() || phi.nrows() != phi.ncols() || range == 0 || range > length {
        return Err(Error::DimensionMismatch(format!(
            "perturbation must be a 3^r x 3^r matrix with 1 <= r <= {length}"
        )));
    }
    let graph = SpinGraph::chain(length, SpinValue::ONE, 1.0)?;
    let h0 = build_hamiltonian(&graph, &ModelSpec::Aklt)?;
    let sites: Vec<Vec<usize>> = (0..=length - range).map(|x| (x..x + range).collect()).collect();
    let mut v = CMat::zeros(h0.dim(), h0.dim());
    for s in &sites {
        v += local_operator(h0.basis(), phi, s).to_dense();
    }
    let v = (&v + v.adjoint()) * c(0.5);
    Ok((h0.to_dense(), v))
}

fn ground_multiplicity(values: &[f64]) -> usize {
    let scale = values.iter().fold(1.0_f64, |a, v| a.max(v.abs()));
    values.iter().take_while(|&&v| v - values[0] <= 1e-8 * scale).count()
}

fn gap_at(h0: &CMat, v: &CMat, lambda: f64, g: usize) -> f64 {
    let ev = eigvalsh(&(h0 + v * c(lambda)));
    ev[g] - ev[g - 1]
}

pub fn perturbed_gap_scan(length: usize, phi: &CMat, lambdas: &[f64]) -> Result<PerturbedGapScan> {
    if !lambdas.contains(&0.0) {
        return Err(Error::InvalidParameter("the lambda grid must contain 0".into()));
    }
    let (h0, v) = perturbed_hamiltonian_parts(length, phi)?;
    let g = ground_multiplicity(&eigvalsh(&h0));
    if g >= h0.nrows() {
        return Err(Error::InvalidParameter("unperturbed spectrum has no excited level".into()));
    }
    let mut grid = lambdas.to_vec();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let points: Vec<GapPoint> = grid.par_iter().map(|&l| GapPoint { lambda: l, gap: gap_at(&h0, &v, l, g) }).collect();

    let zero = points.iter().position(|p| p.lambda == 0.0).expect("grid contains 0");
    let positive = |p: &GapPoint| p.gap > 1e-9;
    let positive_interval = positive(&points[zero]).then(|| {
        let mut lo = zero;
        while lo > 0 && positive(&points[lo - 1]) {
            lo -= 1;
        }
        let mut hi = zero;
        while hi + 1 < points.len() && positive(&points[hi + 1]) {
            hi += 1;
        }
        (points[lo].lambda, points[hi].lambda)
    });
    let max_step_slope = points
        .windows(2)
        .map(|w| ((w[1].gap - w[0].gap) / (w[1].lambda - w[0].lambda)).abs())
        .fold(0.0, f64::max);
    Ok(PerturbedGapScan { length, ground_multiplicity: g, points, positive_interval, max_step_slope })
}

/// Symmetric difference quotient `(gap(h) − gap(−h)) / 2h` at λ = 0.
pub fn gap_slope_at_zero(length: usize, phi: &CMat, h: f64) -> Result<f64> {
    let (h0, v) = perturbed_hamiltonian_parts(length, phi)?;
    let g = ground_multiplicity(&eigvalsh(&h0));
    Ok((gap_at(&h0, &v, h, g) - gap_at(&h0, &v, -h, g)) / (2.0 * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::spin_matrices;

    #[test]
    fn fully_polarized_sector_has_no_gap() {
        let g = SpinGraph::chain(3, SpinValue::HALF, 1.0).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
        let r = sector_gap(&h, 0).unwrap();
        assert_eq!(r.dim, 1);
        assert!(r.gap.is_none());
    }

    #[test]
    fn path_one_particle_gap() {
        // J = 2 corresponds to unit exchange rates.
        let g = SpinGraph::chain(3, SpinValue::HALF, 2.0).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
        let a = sector_gap(&h, 1).unwrap().gap.unwrap();
        let b = sector_gap(&h, 2).unwrap().gap.unwrap();
        assert!((a - 1.0).abs() < 1e-12);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn scan_at_zero_matches_unperturbed_gap() {
        let s3 = spin_matrices(SpinValue::ONE).s3;
        let phi = s3.kronecker(&s3);
        let scan = perturbed_gap_scan(4, &phi, &[-0.1, 0.0, 0.1]).unwrap();
        assert_eq!(scan.ground_multiplicity, 4);
        let g = SpinGraph::chain(4, SpinValue::ONE, 1.0).unwrap();
        let ev = eigvalsh(&build_hamiltonian(&g, &ModelSpec::Aklt).unwrap().to_dense());
        assert_eq!(scan.points[1].gap, ev[4] - ev[3]);
    }
}
