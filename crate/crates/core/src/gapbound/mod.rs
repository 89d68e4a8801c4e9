//! Martingale-method lower bounds on the gap of frustration-free
//! nearest-neighbour chains `H_[1,L] = Σ_x h_{x,x+1}` with `h ≥ 0`.
//!
//! Sites are numbered from 1. `G_[a,b]` projects onto the joint kernel of the
//! terms inside `[a,b]`. Kernel bases are built recursively, one site at a
//! time, as the null space of the new term restricted to `K_[a,b] ⊗ C^d`.

mod resolution;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, eigh, eigvalsh, hermiticity_residual, identity, lanczos_lowest, null_space, orthogonal_complement, singular_values, CMat};
use crate::spinops::hamiltonian::{aklt_term, embed_local};
use crate::spinops::sparse::{SparseHermitian, TensorBasis};

pub use resolution::MartingaleResolution;

pub const DEFAULT_KERNEL_CUTOFF: f64 = 1e-8;
/// Exact `λ₁` switches from dense diagonalization to Lanczos above this dimension.
pub const DENSE_LAMBDA_CAP: usize = 1024;

/// Translation-invariant nearest-neighbour chain with local dimension `d`.
#[derive(Debug, Clone)]
pub struct NnChain {
    d: usize,
    h: CMat,
    cutoff: f64,
}

impl NnChain {
    pub fn new(d: usize, h: CMat) -> Result<Self> {
        Self::with_cutoff(d, h, DEFAULT_KERNEL_CUTOFF)
    }

    pub fn with_cutoff(d: usize, h: CMat, cutoff: f64) -> Result<Self> {
        if h.shape() != (d * d, d * d) {
            return Err(Error::DimensionMismatch(format!("two-site term must be {0}x{0}", d * d)));
        }
        let r = hermiticity_residual(&h);
        if r > 1e-12 {
            return Err(Error::NotHermitian { residual: r });
        }
        let min = eigvalsh(&h)[0];
        if min < -1e-12 {
            return Err(Error::InvalidParameter(format!("two-site term must be nonnegative (min eigenvalue {min:e})")));
        }
        if !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::InvalidParameter("kernel cutoff must lie in (0, 1)".into()));
        }
        Ok(NnChain { d, h, cutoff })
    }

    pub fn aklt() -> Self {
        NnChain::new(3, aklt_term()).expect("AKLT term is a projection")
    }

    pub fn local_dim(&self) -> usize {
        self.d
    }

    pub fn term(&self) -> &CMat {
        &self.h
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Smallest nonzero eigenvalue of `h_{1,2}`.
    pub fn gamma2(&self) -> Option<f64> {
        let ev = eigvalsh(&self.h);
        let scale = ev.last().copied().unwrap_or(0.0).abs();
        ev.into_iter().find(|&v| v > self.cutoff * scale.max(1e-300))
    }

    /// Orthonormal bases of `ker H_[1,ℓ]` for `ℓ = 1..=len` (index `ℓ − 1`).
    /// Once a kernel is empty all longer ones are too.
    pub fn kernel_bases(&self, len: usize) -> Vec<CMat> {
        let d = self.d;
        let mut out = vec![identity(d)];
        for l in 2..=len {
            let prev = &out[l - 2];
            if prev.ncols() == 0 {
                out.push(CMat::zeros(d.pow(l as u32), 0));
                continue;
            }
            let w = prev.kronecker(&identity(d));
            let hw = apply_local(&w, &self.h, l - 2, l, d);
            let coeffs = null_space(&hw, self.cutoff);
            out.push(&w * coeffs);
        }
        out
    }

    pub fn hamiltonian(&self, len: usize) -> Result<SparseHermitian> {
        let basis = TensorBasis::uniform(len, self.d);
        let triplets = (0..len.saturating_sub(1)).flat_map(|x| embed_local(&basis, &self.h, &[x, x + 1])).collect();
        SparseHermitian::from_triplets(basis, triplets)
    }
}

/// Applies `op` (acting on `r` consecutive sites starting at 0-based site
/// `start`) to every column of `x`, a matrix over `len` sites.
pub(crate) fn apply_local(x: &CMat, op: &CMat, start: usize, len: usize, d: usize) -> CMat {
    let mut r = 0;
    let mut block = 1;
    while block < op.nrows() {
        block *= d;
        r += 1;
    }
    assert_eq!(block, op.nrows());
    assert!(start + r <= len);
    let tail = d.pow((len - start - r) as u32);
    let head = d.pow(start as u32);
    let mut y = CMat::zeros(x.nrows(), x.ncols());
    let mut buf = vec![Complex64::new(0.0, 0.0); block];
    for col in 0..x.ncols() {
        for hi in 0..head {
            for lo in 0..tail {
                for (j, b) in buf.iter_mut().enumerate() {
                    *b = x[((hi * block + j) * tail + lo, col)];
                }
                for i in 0..block {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (j, b) in buf.iter().enumerate() {
                        acc += op[(i, j)] * b;
                    }
                    y[((hi * block + i) * tail + lo, col)] = acc;
                }
            }
        }
    }
    y
}

/// `G_[a,b]` for the chain, stored as an orthonormal basis of the kernel on
/// the `b − a + 1` sites of the interval.
#[derive(Debug, Clone)]
pub struct KernelProjector {
    pub a: usize,
    pub b: usize,
    pub basis: CMat,
    pub d: usize,
}

impl KernelProjector {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.ncols() == 0
    }

    /// Dense projector on `[1, len]`.
    pub fn embed(&self, len: usize) -> Result<CMat> {
        if self.b > len {
            return Err(Error::InvalidParameter(format!("interval [{},{}] exceeds [1,{len}]", self.a, self.b)));
        }
        let p = &self.basis * self.basis.adjoint();
        let left = identity(self.d.pow((self.a - 1) as u32));
        let right = identity(self.d.pow((len - self.b) as u32));
        Ok(left.kronecker(&p).kronecker(&right))
    }
}

pub fn kernel_projector(chain: &NnChain, a: usize, b: usize) -> Result<KernelProjector> {
    if a == 0 || b < a {
        return Err(Error::InvalidParameter(format!("invalid interval [{a},{b}]")));
    }
    let len = b - a + 1;
    let basis = chain.kernel_bases(len).pop().expect("len >= 1");
    Ok(KernelProjector { a, b, basis, d: chain.d })
}

/// `ran E_n` inside `n + 1` sites: the complement of `K_[1,n+1]` in `K_[1,n] ⊗ C^d`.
fn resolution_range(kernels: &[CMat], n: usize, d: usize, cutoff: f64) -> CMat {
    let w = kernels[n - 1].kronecker(&identity(d));
    let inner = w.adjoint() * &kernels[n];
    &w * orthogonal_complement_of(&inner, w.ncols(), cutoff)
}

/// Orthonormal complement of the columns of `q` in `C^dim` (handles `q` empty).
fn orthogonal_complement_of(q: &CMat, dim: usize, cutoff: f64) -> CMat {
    if q.ncols() == 0 {
        identity(dim)
    } else {
        orthogonal_complement(q, cutoff)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MartingaleEpsilon {
    pub length: usize,
    /// `‖G_[n,n+1] E_n‖` for `n = 1..L−1`.
    pub per_n: Vec<f64>,
    pub epsilon: f64,
    pub below_threshold: bool,
}

/// `ε = max_{1≤n≤L−1} ‖G_[n,n+1] E_n‖`.
pub fn martingale_epsilon(chain: &NnChain, len: usize) -> Result<MartingaleEpsilon> {
    if len < 2 {
        return Err(Error::InvalidParameter("need L >= 2".into()));
    }
    let d = chain.d;
    let kernels = chain.kernel_bases(len);
    if kernels[len - 1].ncols() == 0 {
        return Err(Error::InvalidParameter(format!("ker H_[1,{len}] is trivial")));
    }
    let p2 = &kernels[1] * kernels[1].adjoint();
    let per_n: Vec<f64> = (1..len)
        .map(|n| {
            if n == 1 {
                // G_[1,2](1 − G_[1,2]) = 0
                return 0.0;
            }
            let range = resolution_range(&kernels, n, d, chain.cutoff);
            if range.ncols() == 0 {
                return 0.0;
            }
            let g = apply_local(&range, &p2, n - 1, n + 1, d);
            singular_values(&g).first().copied().unwrap_or(0.0)
        })
        .collect();
    let epsilon = per_n.iter().copied().fold(0.0, f64::max);
    Ok(MartingaleEpsilon { length: len, per_n, epsilon, below_threshold: epsilon < std::f64::consts::FRAC_1_SQRT_2 })
}

/// `γ₂ (1 − √2 ε)²`, or `None` when `ε ≥ 1/√2`.
pub fn gap_bound_from_epsilon(gamma2: f64, epsilon: f64) -> Option<f64> {
    (0.0..std::f64::consts::FRAC_1_SQRT_2).contains(&epsilon)
        .then(|| gamma2 * (1.0 - std::f64::consts::SQRT_2 * epsilon).powi(2))
}

/// `λ₁(n+m) (1 − 2√(ε(1−ε)))`.
pub fn gap_bound_from_overlap(lambda1_nm: f64, eps_mn: f64) -> f64 {
    lambda1_nm * (1.0 - 2.0 * (eps_mn * (1.0 - eps_mn)).max(0.0).sqrt())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SpitzerStarrValue {
    pub m: usize,
    pub n: usize,
    pub value: f64,
    /// The constraint space was empty; `value` is 0 by convention.
    pub empty: bool,
}

/// `ε(m,n)` with `[−m,0] → [1,m+1]`, `[0,n] → [m+1,m+n+1]` on `m+n+1` sites:
/// the top eigenvalue of `G_[0,n]` compressed to
/// `ran G_[−m,0] ∩ (ran G_[−m,n])^⊥`.
pub fn spitzer_starr_epsilon(chain: &NnChain, m: usize, n: usize) -> Result<SpitzerStarrValue> {
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("m and n must be at least 1".into()));
    }
    let d = chain.d;
    let len = m + n + 1;
    let kernels = chain.kernel_bases(len);
    let w = kernels[m].kronecker(&identity(d.pow(n as u32)));
    let inner = w.adjoint() * &kernels[len - 1];
    let space = &w * orthogonal_complement_of(&inner, w.ncols(), chain.cutoff);
    if space.ncols() == 0 || w.ncols() == 0 {
        return Ok(SpitzerStarrValue { m, n, value: 0.0, empty: true });
    }
    let pn = &kernels[n] * kernels[n].adjoint();
    let g = apply_local(&space, &pn, m, len, d);
    let s = singular_values(&g).first().copied().unwrap_or(0.0);
    Ok(SpitzerStarrValue { m, n, value: (s * s).min(1.0), empty: false })
}

#[derive(Debug, Clone, Serialize)]
pub struct TruncatedSup {
    pub m: usize,
    pub n: usize,
    pub m_max: usize,
    pub values: Vec<SpitzerStarrValue>,
    pub sup: f64,
    /// Always true: `m′` only ranges up to `m_max`.
    pub truncated: bool,
}

/// `ε_{m,n} ≈ max_{m ≤ m′ ≤ m_max} ε(m′,n)`.
pub fn spitzer_starr_sup(chain: &NnChain, m: usize, n: usize, m_max: usize) -> Result<TruncatedSup> {
    if m_max < m {
        return Err(Error::InvalidParameter(format!("m_max = {m_max} is below m = {m}")));
    }
    let values = (m..=m_max).map(|mm| spitzer_starr_epsilon(chain, mm, n)).collect::<Result<Vec<_>>>()?;
    let sup = values.iter().map(|v| v.value).fold(0.0, f64::max);
    Ok(TruncatedSup { m, n, m_max, values, sup, truncated: true })
}

/// Smallest nonzero eigenvalue of `H_[1,len]`.
pub fn exact_lambda1(chain: &NnChain, len: usize) -> Result<f64> {
    let h = chain.hamiltonian(len)?;
    let kernel = chain.kernel_bases(len).pop().expect("len >= 1");
    let dim = h.dim();
    if dim <= DENSE_LAMBDA_CAP {
        let ev = eigh(&h.to_dense()).values;
        let scale = ev.last().copied().unwrap_or(0.0).abs().max(1.0);
        return ev
            .into_iter()
            .find(|&v| v > chain.cutoff * scale)
            .ok_or_else(|| Error::InvalidParameter("H has no nonzero eigenvalue".into()));
    }
    let deflate: Vec<DVector<Complex64>> = kernel.column_iter().map(|c| c.into_owned()).collect();
    let start = DVector::from_fn(dim, |i, _| c(1.0 + ((i * 7919) % 104729) as f64 / 104729.0));
    let out = lanczos_lowest(dim, |v| h.matrix().matvec(v), start, &deflate, 1, 800, 1e-12)?;
    let residual = out.residuals[0];
    if residual > 1e-8 {
        return Err(Error::NoConvergence { residual, iterations: out.iterations });
    }
    Ok(out.values[0])
}

#[derive(Debug, Clone, Serialize)]
pub struct Cutoffs {
    pub kernel_singular_value: f64,
    pub dense_lambda_cap: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapCertificate {
    #[serde(rename = "L")]
    pub length: usize,
    pub gamma2: f64,
    pub kernel_dim: usize,
    pub epsilon: f64,
    pub per_n: Vec<f64>,
    pub epsilon_below_threshold: bool,
    #[serde(rename = "bound73")]
    pub epsilon_bound: Option<f64>,
    pub m: usize,
    pub n: usize,
    pub eps_mn: f64,
    pub eps_mn_m_max: usize,
    pub eps_mn_truncated: bool,
    pub lambda1_nm: f64,
    #[serde(rename = "bound74")]
    pub overlap_bound: f64,
    pub exact_lambda1: f64,
    /// `min_{2≤ℓ≤L} λ₁(ℓ)` and `λ₁(L)`, the two finite-size gap surrogates.
    pub window_min_gap: f64,
    pub gap_at_length: f64,
    pub epsilon_bound_sound: Option<bool>,
    pub overlap_bound_sound: bool,
    pub cutoffs: Cutoffs,
}

#[derive(Debug, Clone)]
pub struct CertificateOptions {
    pub m: usize,
    pub n: usize,
    /// Defaults to `L − n − 1`.
    pub m_max: Option<usize>,
}

impl Default for CertificateOptions {
    fn default() -> Self {
        CertificateOptions { m: 1, n: 1, m_max: None }
    }
}

pub fn gap_certificate(chain: &NnChain, len: usize, opts: &CertificateOptions) -> Result<GapCertificate> {
    let gamma2 = chain.gamma2().ok_or_else(|| Error::InvalidParameter("two-site term vanishes".into()))?;
    let eps = martingale_epsilon(chain, len)?;
    let m_max = opts.m_max.unwrap_or(len.saturating_sub(opts.n + 1)).max(opts.m);
    let sup = spitzer_starr_sup(chain, opts.m, opts.n, m_max)?;
    let lambdas: Vec<f64> = (2..=len).map(|l| exact_lambda1(chain, l)).collect::<Result<_>>()?;
    let lambda_at = |l: usize| lambdas[l - 2];
    let lambda1_nm = if opts.n + opts.m <= len { lambda_at(opts.n + opts.m) } else { exact_lambda1(chain, opts.n + opts.m)? };
    let exact = lambda_at(len);
    let epsilon_bound = gap_bound_from_epsilon(gamma2, eps.epsilon);
    let overlap_bound = gap_bound_from_overlap(lambda1_nm, sup.sup);
    Ok(GapCertificate {
        length: len,
        gamma2,
        kernel_dim: chain.kernel_bases(len)[len - 1].ncols(),
        epsilon: eps.epsilon,
        per_n: eps.per_n,
        epsilon_below_threshold: eps.below_threshold,
        epsilon_bound,
        m: opts.m,
        n: opts.n,
        eps_mn: sup.sup,
        eps_mn_m_max: m_max,
        eps_mn_truncated: sup.truncated,
        lambda1_nm,
        overlap_bound,
        exact_lambda1: exact,
        window_min_gap: lambdas.iter().copied().fold(f64::INFINITY, f64::min),
        gap_at_length: exact,
        epsilon_bound_sound: epsilon_bound.map(|b| b <= exact + 1e-9),
        overlap_bound_sound: overlap_bound <= exact + 1e-9,
        cutoffs: Cutoffs { kernel_singular_value: chain.cutoff, dense_lambda_cap: DENSE_LAMBDA_CAP },
    })
}

/// Writes `L,bound73,bound74,exact` rows: the epsilon bound, the overlap bound and the exact gap.
pub fn write_curve_csv<W: std::io::Write>(certs: &[GapCertificate], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["L", "bound73", "bound74", "exact"])?;
    for c in certs {
        out.write_record([
            c.length.to_string(),
            c.epsilon_bound.map_or_else(|| "nan".to_string(), |b| format!("{b:?}")),
            format!("{:?}", c.overlap_bound),
            format!("{:?}", c.exact_lambda1),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aklt_kernel_dimensions() {
        let chain = NnChain::aklt();
        let k = chain.kernel_bases(6);
        let dims: Vec<usize> = k.iter().map(|q| q.ncols()).collect();
        assert_eq!(dims, vec![3, 4, 4, 4, 4, 4]);
        assert!((chain.gamma2().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn apply_local_matches_kronecker() {
        let d = 2;
        let op = CMat::from_fn(4, 4, |i, j| c((i * 4 + j) as f64));
        let x = CMat::from_fn(16, 2, |i, j| c((i + 3 * j) as f64 * 0.1));
        let full = identity(2).kronecker(&op).kronecker(&identity(2));
        let y = apply_local(&x, &op, 1, 4, d);
        assert!(crate::linalg::max_abs(&(full * &x - y)) < 1e-12);
    }

    #[test]
    fn bounds_at_boundaries() {
        assert_eq!(gap_bound_from_epsilon(2.0, 0.0), Some(2.0));
        assert!(gap_bound_from_epsilon(1.0, std::f64::consts::FRAC_1_SQRT_2).is_none());
        assert_eq!(gap_bound_from_overlap(0.7, 0.0), 0.7);
    }

    #[test]
    fn aklt_per_n_values() {
        let e = martingale_epsilon(&NnChain::aklt(), 5).unwrap();
        assert_eq!(e.per_n[0], 0.0);
        assert!((e.per_n[1] - 0.5).abs() < 1e-10);
        assert!((e.per_n[2] - 0.45425676257949793).abs() < 1e-10);
        assert!((e.per_n[3] - 0.41833001326703795).abs() < 1e-10);
    }

    #[test]
    fn negative_term_rejected() {
        assert!(NnChain::new(2, identity(4) * c(-1.0)).is_err());
    }
}
