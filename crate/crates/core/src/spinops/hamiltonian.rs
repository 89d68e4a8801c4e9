//! Finite-volume Hamiltonians on a [`SpinGraph`].
//!
//! Sign conventions, per edge `(x, y)` with coupling `J`:
//!
//! * XXX: `-J S_x·S_y`, so `J > 0` is ferromagnetic.
//! * XXZ: `-J [ (1/Δ)(S¹_x S¹_y + S²_x S²_y) + S³_x S³_y ]`, the overall minus
//!   sign sitting outside the bracket.
//! * AKLT: `J [ 1/3 + (1/2) S_x·S_y + (1/6)(S_x·S_y)² ]`; `J = 1` gives the
//!   projection onto total spin 2 of the pair.
//! * Custom: the supplied two-site matrix, unscaled.
//!
//! Each two-site term is embedded with identity factors on all other sites.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_residual, identity, CMat};
use crate::spinops::graph::SpinGraph;
use crate::spinops::sparse::{SparseHermitian, SparseMatrix, TensorBasis};
use crate::spinops::spin::{spin_dot, spin_matrices, SpinValue};

pub const DEFAULT_DIM_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelSpec {
    Xxx,
    Xxz { delta: f64 },
    Aklt,
    /// One Hermitian two-site matrix per edge, in edge order, acting on
    /// `C^{n_x} ⊗ C^{n_y}` for edge `(x, y)`.
    CustomTwoSite { terms: Vec<CMat> },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Xxx => "xxx",
            ModelSpec::Xxz { .. } => "xxz",
            ModelSpec::Aklt => "aklt",
            ModelSpec::CustomTwoSite { .. } => "custom",
        }
    }

    /// Whether the model commutes with all of `S_V` (not just `S³_V`).
    pub fn is_su2_symmetric(&self) -> bool {
        matches!(self, ModelSpec::Xxx | ModelSpec::Aklt)
    }

    pub fn validate(&self, graph: &SpinGraph) -> Result<()> {
        match self {
            ModelSpec::Xxx => Ok(()),
            ModelSpec::Xxz { delta } => {
                if *delta == 0.0 || !delta.is_finite() {
                    Err(Error::ModelMismatch("XXZ requires a finite, nonzero anisotropy".into()))
                } else {
                    Ok(())
                }
            }
            ModelSpec::Aklt => {
                if graph.sites().iter().all(|s| s.spin == SpinValue::ONE) {
                    Ok(())
                } else {
                    Err(Error::ModelMismatch("AKLT requires spin 1 on every site".into()))
                }
            }
            ModelSpec::CustomTwoSite { terms } => {
                if terms.len() != graph.edges().len() {
                    return Err(Error::ModelMismatch(format!(
                        "{} custom terms for {} edges",
                        terms.len(),
                        graph.edges().len()
                    )));
                }
                for (k, (t, e)) in terms.iter().zip(graph.edges()).enumerate() {
                    let d = graph.spin(e.x).dim() * graph.spin(e.y).dim();
                    if t.nrows() != d || t.ncols() != d {
                        return Err(Error::ModelMismatch(format!("custom term {k} must be {d}x{d}")));
                    }
                    let r = hermiticity_residual(t);
                    if r > 1e-12 {
                        return Err(Error::ModelMismatch(format!("custom term {k} is not Hermitian (residual {r:e})")));
                    }
                }
                Ok(())
            }
        }
    }
}

/// The dense two-site term for edge number `edge` of `graph`.
pub fn edge_term(graph: &SpinGraph, model: &ModelSpec, edge: usize) -> CMat {
    let e = graph.edges()[edge];
    let (a, b) = (graph.spin(e.x), graph.spin(e.y));
    match model {
        ModelSpec::Xxx => spin_dot(a, b) * c(-e.coupling),
        ModelSpec::Xxz { delta } => {
            let sa = spin_matrices(a);
            let sb = spin_matrices(b);
            let planar = sa.s1.kronecker(&sb.s1) + sa.s2.kronecker(&sb.s2);
            let axial = sa.s3.kronecker(&sb.s3);
            (planar * c(1.0 / delta) + axial) * c(-e.coupling)
        }
        ModelSpec::Aklt => aklt_term() * c(e.coupling),
        ModelSpec::CustomTwoSite { terms } => terms[edge].clone(),
    }
}

/// `1/3 + (1/2) S·S + (1/6) (S·S)²` on two spin-1 sites.
pub fn aklt_term() -> CMat {
    let ss = spin_dot(SpinValue::ONE, SpinValue::ONE);
    identity(9) * c(1.0 / 3.0) + &ss * c(0.5) + (&ss * &ss) * c(1.0 / 6.0)
}

pub fn basis_of(graph: &SpinGraph) -> TensorBasis {
    TensorBasis::new(graph.site_ids(), graph.local_dims())
}

fn check_cap(graph: &SpinGraph, cap: usize) -> Result<usize> {
    match graph.total_dim() {
        Some(d) if d <= cap => Ok(d),
        Some(d) => Err(Error::DimensionCap { dim: d, cap }),
        None => Err(Error::DimensionCap { dim: usize::MAX, cap }),
    }
}

/// Triplets of `op ⊗ 1` where `op` acts on `sites` (positions, in the order of
/// `op`'s tensor factors) and the identity on every other site.
pub fn embed_local(basis: &TensorBasis, op: &CMat, sites: &[usize]) -> Vec<(usize, usize, Complex64)> {
    let strides = basis.strides();
    let dims = &basis.local_dims;
    let local_dims: Vec<usize> = sites.iter().map(|&s| dims[s]).collect();
    let local_dim: usize = local_dims.iter().product();
    assert_eq!(op.nrows(), local_dim, "operator size does not match its support");

    let offset = |mut k: usize| {
        let mut off = 0;
        for i in (0..sites.len()).rev() {
            off += (k % local_dims[i]) * strides[sites[i]];
            k /= local_dims[i];
        }
        off
    };
    let scale = op.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let nonzero: Vec<(usize, usize, Complex64)> = (0..local_dim)
        .flat_map(|r| (0..local_dim).map(move |c| (r, c)))
        .filter(|&(r, c)| op[(r, c)].norm() > 1e-14 * scale)
        .map(|(r, c)| (offset(r), offset(c), op[(r, c)]))
        .collect();

    let others: Vec<usize> = (0..dims.len()).filter(|i| !sites.contains(i)).collect();
    let n_rest: usize = others.iter().map(|&i| dims[i]).product();
    let mut out = Vec::with_capacity(n_rest * nonzero.len());
    let mut digits = vec![0usize; others.len()];
    for _ in 0..n_rest {
        let base: usize = others.iter().zip(&digits).map(|(&s, &d)| d * strides[s]).sum();
        for &(r, c, v) in &nonzero {
            out.push((base + r, base + c, v));
        }
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            if digits[k] < dims[others[k]] {
                break;
            }
            digits[k] = 0;
        }
    }
    out
}

/// `op` on `sites`, identity elsewhere, as a sparse matrix on `basis`.
pub fn local_operator(basis: &TensorBasis, op: &CMat, sites: &[usize]) -> SparseMatrix {
    SparseMatrix::from_triplets(basis.dim(), embed_local(basis, op, sites))
}

pub fn build_hamiltonian(graph: &SpinGraph, model: &ModelSpec) -> Result<SparseHermitian> {
    build_hamiltonian_capped(graph, model, DEFAULT_DIM_CAP)
}

pub fn build_hamiltonian_capped(graph: &SpinGraph, model: &ModelSpec, cap: usize) -> Result<SparseHermitian> {
    model.validate(graph)?;
    check_cap(graph, cap)?;
    let basis = basis_of(graph);
    let triplets: Vec<(usize, usize, Complex64)> = (0..graph.edges().len())
        .into_par_iter()
        .map(|k| {
            let e = graph.edges()[k];
            embed_local(&basis, &edge_term(graph, model, k), &[e.x, e.y])
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect();
    SparseHermitian::from_triplets(basis, triplets)
}

/// `Σ_x S^i_x` for component `i ∈ {1, 2, 3}`.
pub fn total_spin_component(graph: &SpinGraph, component: usize) -> Result<SparseMatrix> {
    check_cap(graph, DEFAULT_DIM_CAP)?;
    let basis = basis_of(graph);
    let mut triplets = Vec::new();
    for x in 0..graph.n_sites() {
        let m = spin_matrices(graph.spin(x));
        let op = match component {
            1 => m.s1,
            2 => m.s2,
            3 => m.s3,
            _ => return Err(Error::InvalidParameter(format!("spin component {component} not in 1..=3"))),
        };
        triplets.extend(embed_local(&basis, &op, &[x]));
    }
    Ok(SparseMatrix::from_triplets(basis.dim(), triplets))
}

/// Casimir `C = S_V · S_V`.
pub fn casimir(graph: &SpinGraph) -> Result<SparseHermitian> {
    check_cap(graph, DEFAULT_DIM_CAP)?;
    let basis = basis_of(graph);
    let mut triplets = Vec::new();
    for x in 0..graph.n_sites() {
        let s = graph.spin(x).s();
        triplets.extend(embed_local(&basis, &(identity(graph.spin(x).dim()) * c(s * (s + 1.0))), &[x]));
        for y in (x + 1)..graph.n_sites() {
            let dot = spin_dot(graph.spin(x), graph.spin(y)) * c(2.0);
            triplets.extend(embed_local(&basis, &dot, &[x, y]));
        }
    }
    SparseHermitian::from_triplets(basis, triplets)
}
