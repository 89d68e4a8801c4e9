//! Dense linear-algebra helpers on top of `nalgebra`.
//!
//! Everything in the crate that is not a sparse Hamiltonian is a small dense
//! complex matrix. The helpers here fix the conventions used throughout:
//! eigenvalues are ascending, kernels and ranges come from SVDs with a
//! relative singular-value cutoff, and real symmetric input is routed to the
//! real solver.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type RMat = DMatrix<f64>;
pub type CVec = DVector<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Kronecker product of a list of factors, left to right.
pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a CMat>) -> CMat {
    factors
        .into_iter()
        .fold(CMat::identity(1, 1), |acc, f| acc.kronecker(f))
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(c)
}

/// Real part, if the imaginary part is negligible relative to the entries.
pub fn as_real(m: &CMat) -> Option<RMat> {
    let scale = max_abs(m).max(1.0);
    if m.iter().all(|z| z.im.abs() <= 1e-15 * scale) {
        Some(m.map(|z| z.re))
    } else {
        None
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn eigh(m: &CMat) -> HermitianEigen {
    let n = m.nrows();
    if n == 0 {
        return HermitianEigen { values: vec![], vectors: CMat::zeros(0, 0) };
    }
    let (values, vectors) = match as_real(m) {
        Some(r) => {
            let e = SymmetricEigen::new(r);
            (e.eigenvalues.iter().copied().collect::<Vec<_>>(), to_complex(&e.eigenvectors))
        }
        None => {
            let e = SymmetricEigen::new(m.clone());
            (e.eigenvalues.iter().copied().collect::<Vec<_>>(), e.eigenvectors)
        }
    };
    sort_eigen(values, vectors)
}

pub fn eigh_real(m: &RMat) -> (Vec<f64>, RMat) {
    let n = m.nrows();
    if n == 0 {
        return (vec![], RMat::zeros(0, 0));
    }
    let e = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| e.eigenvalues[i].total_cmp(&e.eigenvalues[j]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = RMat::from_fn(n, n, |r, k| e.eigenvectors[(r, order[k])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    let mut v: Vec<f64> = match as_real(m) {
        Some(r) => r.symmetric_eigenvalues().iter().copied().collect(),
        None => m.clone().symmetric_eigenvalues().iter().copied().collect(),
    };
    v.sort_by(f64::total_cmp);
    v
}

fn sort_eigen(values: Vec<f64>, vectors: CMat) -> HermitianEigen {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted = order.iter().map(|&i| values[i]).collect();
    let vecs = CMat::from_fn(vectors.nrows(), n, |r, k| vectors[(r, order[k])]);
    HermitianEigen { values: sorted, vectors: vecs }
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.is_empty() {
        return vec![];
    }
    let mut s: Vec<f64> = match as_real(m) {
        Some(r) => r.singular_values().iter().copied().collect(),
        None => m.singular_values().iter().copied().collect(),
    };
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Operator norm (largest singular value).
pub fn op_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Orthonormal basis of the column range, keeping singular values above
/// `rel_cutoff * sigma_max`.
pub fn orthonormal_range(m: &CMat, rel_cutoff: f64) -> CMat {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return CMat::zeros(m.nrows(), 0);
    }
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > rel_cutoff * smax)
        .collect();
    CMat::from_fn(m.nrows(), keep.len(), |r, k| u[(r, keep[k])])
}

/// Orthonormal basis of the kernel of `m`, treating singular values at or
/// below `rel_cutoff * sigma_max` as zero.
pub fn null_space(m: &CMat, rel_cutoff: f64) -> CMat {
    null_space_by(m, |s, smax| smax == 0.0 || s <= rel_cutoff * smax)
}

/// Kernel with an absolute threshold, for operators whose natural scale is
/// known (a relative cutoff misfires when the whole matrix is round-off).
pub fn null_space_abs(m: &CMat, tol: f64) -> CMat {
    null_space_by(m, |s, _| s <= tol)
}

fn null_space_by(m: &CMat, is_zero: impl Fn(f64, f64) -> bool) -> CMat {
    let n = m.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    // Pad to at least square so the SVD returns a full set of right vectors.
    let rows = m.nrows().max(n);
    let mut padded = CMat::zeros(rows, n);
    padded.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
    let svd = SVD::new(padded, false, true);
    let vt = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let keep: Vec<usize> =
        (0..svd.singular_values.len()).filter(|&i| is_zero(svd.singular_values[i], smax)).collect();
    CMat::from_fn(n, keep.len(), |r, k| vt[(keep[k], r)].conj())
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns of `q`, inside `C^n`.
pub fn orthogonal_complement(q: &CMat, rel_cutoff: f64) -> CMat {
    let n = q.nrows();
    if q.ncols() == 0 {
        return identity(n);
    }
    null_space(&q.adjoint(), rel_cutoff)
}

/// Projector onto the span of orthonormal columns.
pub fn projector(basis: &CMat) -> CMat {
    basis * basis.adjoint()
}

pub fn normalize(v: &CVec) -> CVec {
    let n = v.norm();
    if n == 0.0 {
        v.clone()
    } else {
        v / c(n)
    }
}

/// Result of a Lanczos run for the lowest eigenvalues.
#[derive(Debug, Clone)]
pub struct LanczosOutcome<T: ComplexField<RealField = f64>> {
    /// Lowest Ritz values, ascending. Degenerate eigenvalues appear once.
    pub values: Vec<f64>,
    pub vectors: Vec<DVector<T>>,
    /// `|| A v - theta v ||` for each returned pair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

/// Lanczos with full reorthogonalization for the `k` lowest eigenpairs of a
/// Hermitian operator given by its action. Vectors in `deflate` (orthonormal)
/// are projected out of the Krylov space, so the solver sees the operator
/// restricted to their orthogonal complement.
pub fn lanczos_lowest<T, F>(
    dim: usize,
    matvec: F,
    start: DVector<T>,
    deflate: &[DVector<T>],
    k: usize,
    max_iter: usize,
    tol: f64,
) -> Result<LanczosOutcome<T>>
where
    T: ComplexField<RealField = f64> + Copy,
    F: Fn(&DVector<T>) -> DVector<T>,
{
    let project = |w: &mut DVector<T>, basis: &[DVector<T>]| {
        for _ in 0..2 {
            for q in basis {
                let overlap = q.dotc(w);
                w.axpy(-overlap, q, T::one());
            }
        }
    };

    let mut q = start;
    project(&mut q, deflate);
    let n0 = q.norm();
    if n0 == 0.0 {
        return Err(Error::InvalidParameter("Lanczos start vector lies in the deflated space".into()));
    }
    q.unscale_mut(n0);

    let max_iter = max_iter.min(dim.saturating_sub(deflate.len())).max(1);
    let mut basis: Vec<DVector<T>> = vec![q];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut scale = 0.0_f64;
    let mut best: Option<(Vec<f64>, RMat, Vec<f64>)> = None;

    for j in 0..max_iter {
        let mut w = matvec(&basis[j]);
        project(&mut w, deflate);
        let alpha = basis[j].dotc(&w).real();
        alphas.push(alpha);
        project(&mut w, &basis);
        // Again after reorthogonalization: dividing by a small beta would
        // otherwise amplify round-off along the deflated directions.
        project(&mut w, deflate);
        let beta = w.norm();
        scale = scale.max(alpha.abs()).max(beta);

        let m = alphas.len();
        let tri = RMat::from_fn(m, m, |r, s| {
            if r == s {
                alphas[r]
            } else if r + 1 == s {
                betas[r]
            } else if s + 1 == r {
                betas[s]
            } else {
                0.0
            }
        });
        let (theta, s) = eigh_real(&tri);
        let wanted = k.min(m);
        let res: Vec<f64> = (0..wanted).map(|i| (beta * s[(m - 1, i)]).abs()).collect();
        let converged = res.iter().all(|&r| r <= tol * scale.max(1e-300));
        let exhausted = beta <= 1e-13 * scale.max(1e-300);
        best = Some((theta[..wanted].to_vec(), s.columns(0, wanted).into_owned(), res));
        if (converged && m >= k) || exhausted || j + 1 == max_iter {
            break;
        }
        betas.push(beta);
        w.unscale_mut(beta);
        basis.push(w);
    }

    let (values, s, _) = best.expect("at least one Lanczos step");
    let m = alphas.len();
    let mut vectors = Vec::with_capacity(values.len());
    let mut residuals = Vec::with_capacity(values.len());
    for (i, &theta) in values.iter().enumerate() {
        let mut v = DVector::<T>::zeros(dim);
        for (jj, b) in basis.iter().take(m).enumerate() {
            v.axpy(T::from_real(s[(jj, i)]), b, T::one());
        }
        let nv = v.norm();
        v.unscale_mut(nv);
        let mut r = matvec(&v);
        project(&mut r, deflate);
        r.axpy(T::from_real(-theta), &v, T::one());
        residuals.push(r.norm());
        vectors.push(v);
    }
    Ok(LanczosOutcome { values, vectors, residuals, iterations: m })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let m = CMat::from_row_slice(1, 3, &[c(1.0), c(1.0), c(0.0)]);
        let k = null_space(&m, 1e-10);
        assert_eq!(k.ncols(), 2);
        assert!(max_abs(&(&m * &k)) < 1e-14);
        assert!(max_abs(&(k.adjoint() * &k - identity(2))) < 1e-14);
    }

    #[test]
    fn range_and_complement_split_space() {
        let v = CMat::from_column_slice(3, 1, &[c(1.0), c(2.0), c(2.0)]);
        let r = orthonormal_range(&v, 1e-10);
        let q = orthogonal_complement(&r, 1e-10);
        assert_eq!(r.ncols(), 1);
        assert_eq!(q.ncols(), 2);
        let total = projector(&r) + projector(&q);
        assert!(max_abs(&(total - identity(3))) < 1e-14);
    }

    #[test]
    fn lanczos_matches_dense_on_path_laplacian() {
        let n = 40;
        let lap = RMat::from_fn(n, n, |i, j| {
            if i == j {
                if i == 0 || i == n - 1 { 1.0 } else { 2.0 }
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        let (dense, _) = eigh_real(&lap);
        let ones = DVector::from_element(n, 1.0 / (n as f64).sqrt());
        let start = DVector::from_fn(n, |i, _| 1.0 + 0.1 * i as f64 + 0.01 * (i * i) as f64);
        let out = lanczos_lowest(n, |v| &lap * v, start, &[ones], 2, 200, 1e-12).unwrap();
        assert!((out.values[0] - dense[1]).abs() < 1e-10);
        assert!((out.values[1] - dense[2]).abs() < 1e-10);
        assert!(out.residuals.iter().all(|&r| r < 1e-9));
    }
}
