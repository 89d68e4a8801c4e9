//! Finitely correlated states generated by pure completely positive maps.
//!
//! An isometry `V: C^k → C^n ⊗ C^k` is stored as an `(n·k) × k` matrix whose
//! row `p·k + q` is physical index `p`, auxiliary index `q`. Its Kraus
//! operators are `K_p[q, q'] = V[p·k + q, q']`, and the map is
//! `𝔼(A ⊗ B) = V†(A ⊗ B)V = Σ_{p,p'} A_{pp'} K_p† B K_{p'}`.

mod io;

use nalgebra::Schur;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, eigvalsh, hermiticity_residual, identity, max_abs, null_space_abs, CMat};
use crate::spinops::{spin_matrices, SpinValue};

pub use io::{read_isometry_csv, write_isometry_csv};

pub const ISOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryV {
    n: usize,
    k: usize,
    v: CMat,
}

impl IsometryV {
    pub fn new(n: usize, k: usize, v: CMat) -> Result<Self> {
        if n == 0 || k == 0 || v.nrows() != n * k || v.ncols() != k {
            return Err(Error::DimensionMismatch(format!(
                "isometry must be {}x{k}, got {}x{}",
                n * k,
                v.nrows(),
                v.ncols()
            )));
        }
        let residual = max_abs(&(v.adjoint() * &v - identity(k)));
        if residual > ISOMETRY_TOL {
            return Err(Error::NotIsometric { residual });
        }
        Ok(IsometryV { n, k, v })
    }

    pub fn physical_dim(&self) -> usize {
        self.n
    }

    pub fn aux_dim(&self) -> usize {
        self.k
    }

    pub fn matrix(&self) -> &CMat {
        &self.v
    }

    pub fn kraus(&self) -> Vec<CMat> {
        (0..self.n).map(|p| self.v.rows(p * self.k, self.k).into_owned()).collect()
    }
}

/// The spin-1/2 → spin-1 ⊗ spin-1/2 Clebsch-Gordan isometry, the unique (up
/// to phase) intertwiner `V D^{(1/2)} = (D^{(1)} ⊗ D^{(1/2)}) V`:
///
/// ```text
/// V|1/2>  = √(2/3)|1>⊗|-1/2> − √(1/3)|0>⊗|1/2>
/// V|-1/2> = √(1/3)|0>⊗|-1/2> − √(2/3)|-1>⊗|1/2>
/// ```
pub fn aklt_isometry() -> IsometryV {
    let (a, b) = ((2.0f64 / 3.0).sqrt(), (1.0f64 / 3.0).sqrt());
    let mut v = CMat::zeros(6, 2);
    // row p·2 + q: p over |1>,|0>,|-1>; q over |1/2>,|-1/2>
    v[(1, 0)] = c(a);
    v[(2, 0)] = c(-b);
    v[(3, 1)] = c(b);
    v[(4, 1)] = c(-a);
    IsometryV::new(3, 2, v).expect("Clebsch-Gordan columns are orthonormal")
}

/// `max_i ‖V S^i_{(1/2)} − (S^i_{(1)} ⊗ 1 + 1 ⊗ S^i_{(1/2)}) V‖_max`.
pub fn intertwiner_residual(v: &IsometryV, aux: SpinValue, phys: SpinValue) -> Result<f64> {
    if v.k != aux.dim() || v.n != phys.dim() {
        return Err(Error::DimensionMismatch("isometry dimensions do not match the spins".into()));
    }
    let a = spin_matrices(aux);
    let p = spin_matrices(phys);
    let ik = identity(v.k);
    let ip = identity(v.n);
    Ok(a.components()
        .iter()
        .zip(p.components())
        .map(|(sa, sp)| {
            let lifted = sp.kronecker(&ik) + ip.kronecker(*sa);
            max_abs(&(&v.v * *sa - lifted * &v.v))
        })
        .fold(0.0, f64::max))
}

/// A completely positive unital map in Kraus form.
#[derive(Debug, Clone)]
pub struct CpUnitalMap {
    n: usize,
    k: usize,
    kraus: Vec<CMat>,
}

/// `𝔼(A ⊗ B) = V†(A ⊗ B)V`.
pub fn make_pure_map(v: &IsometryV) -> CpUnitalMap {
    CpUnitalMap { n: v.n, k: v.k, kraus: v.kraus() }
}

impl CpUnitalMap {
    pub fn physical_dim(&self) -> usize {
        self.n
    }

    pub fn aux_dim(&self) -> usize {
        self.k
    }

    /// `𝔼(A ⊗ B)`.
    pub fn apply(&self, a: &CMat, b: &CMat) -> Result<CMat> {
        if a.shape() != (self.n, self.n) || b.shape() != (self.k, self.k) {
            return Err(Error::DimensionMismatch(format!(
                "expected {n}x{n} and {k}x{k} arguments",
                n = self.n,
                k = self.k
            )));
        }
        let mut out = CMat::zeros(self.k, self.k);
        for (p, kp) in self.kraus.iter().enumerate() {
            let left = kp.adjoint() * b;
            for (q, kq) in self.kraus.iter().enumerate() {
                let w = a[(p, q)];
                if w != Complex64::new(0.0, 0.0) {
                    out += &left * kq * w;
                }
            }
        }
        Ok(out)
    }

    /// `‖𝔼(1 ⊗ 1) − 1‖_max`.
    pub fn unitality_residual(&self) -> f64 {
        let e = self.apply(&identity(self.n), &identity(self.k)).expect("shapes match");
        max_abs(&(e - identity(self.k)))
    }

    /// `B ↦ 𝔼(1 ⊗ B)` as a `k² × k²` matrix on column-major `vec(B)`.
    pub fn transfer_matrix(&self) -> CMat {
        let kk = self.k * self.k;
        self.kraus.iter().fold(CMat::zeros(kk, kk), |acc, kp| acc + kp.transpose().kronecker(&kp.adjoint()))
    }

    /// The predual `ρ ↦ Σ_p K_p ρ K_p†` as a `k² × k²` matrix.
    pub fn adjoint_transfer_matrix(&self) -> CMat {
        let kk = self.k * self.k;
        self.kraus.iter().fold(CMat::zeros(kk, kk), |acc, kp| acc + kp.conjugate().kronecker(kp))
    }
}

fn unvec(v: &[Complex64], k: usize) -> CMat {
    CMat::from_column_slice(k, k, v)
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantState {
    #[serde(skip)]
    pub rho: CMat,
    /// `max_B |tr ρ 𝔼(1⊗B) − tr ρ B|` over matrix units `B`.
    pub invariance_residual: f64,
    pub min_eigenvalue: f64,
    /// Dimension of the fixed-point space of the predual.
    pub fixed_point_dim: usize,
    pub unique: bool,
}

/// Fixed point of the predual transfer operator. When the fixed-point space
/// is degenerate, the result is its spectral projection applied to `1/k`
/// and `unique` is false.
pub fn invariant_state(map: &CpUnitalMap) -> Result<InvariantState> {
    let k = map.k;
    let kk = k * k;
    let t_star = map.adjoint_transfer_matrix();
    let shifted = &t_star - identity(kk);
    // T* has spectral radius 1, so an absolute threshold is meaningful.
    let right = null_space_abs(&shifted, 1e-10);
    let d = right.ncols();
    if d == 0 {
        return Err(Error::NoConvergence { residual: f64::NAN, iterations: 0 });
    }
    let vec_rho = if d == 1 {
        right.column(0).into_owned()
    } else {
        // spectral projector R (L†R)⁻¹ L† applied to vec(1/k)
        let left = null_space_abs(&shifted.adjoint(), 1e-10);
        let g = (left.adjoint() * &right)
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("fixed-point space is not diagonalizable".into()))?;
        let start = identity(k) * c(1.0 / k as f64);
        let v0 = nalgebra::DVector::from_column_slice(start.as_slice());
        &right * (g * (left.adjoint() * v0))
    };
    let mut rho = unvec(vec_rho.as_slice(), k);
    rho = (&rho + rho.adjoint()) * c(0.5);
    let tr = rho.trace();
    if tr.norm() < 1e-14 {
        return Err(Error::InvalidParameter("fixed point has vanishing trace".into()));
    }
    rho /= tr;
    let rho = (&rho + rho.adjoint()) * c(0.5);

    let t = map.transfer_matrix();
    let mut residual: f64 = 0.0;
    for j in 0..kk {
        let mut e = vec![Complex64::new(0.0, 0.0); kk];
        e[j] = c(1.0);
        let b = unvec(&e, k);
        let tb = unvec((&t * nalgebra::DVector::from_vec(e)).as_slice(), k);
        residual = residual.max(((&rho * tb).trace() - (&rho * b).trace()).norm());
    }
    let min_eigenvalue = eigvalsh(&rho)[0];
    Ok(InvariantState { rho, invariance_residual: residual, min_eigenvalue, fixed_point_dim: d, unique: d == 1 })
}

/// A finitely correlated state `(M_k, 𝔼, ρ)`.
#[derive(Debug, Clone)]
pub struct FcsTriple {
    pub map: CpUnitalMap,
    pub rho: CMat,
}

impl FcsTriple {
    pub fn new(map: CpUnitalMap, rho: CMat) -> Result<Self> {
        if rho.shape() != (map.k, map.k) {
            return Err(Error::DimensionMismatch("rho must be k x k".into()));
        }
        if hermiticity_residual(&rho) > 1e-12 || (rho.trace() - c(1.0)).norm() > 1e-12 {
            return Err(Error::InvalidParameter("rho must be Hermitian with unit trace".into()));
        }
        Ok(FcsTriple { map, rho })
    }

    /// Triple with the invariant state of `map`.
    pub fn from_map(map: CpUnitalMap) -> Result<(Self, InvariantState)> {
        let inv = invariant_state(&map)?;
        Ok((FcsTriple { rho: inv.rho.clone(), map }, inv))
    }

    pub fn aklt() -> Self {
        let map = make_pure_map(&aklt_isometry());
        FcsTriple { map, rho: identity(2) * c(0.5) }
    }
}

/// `ω(A_1 ⊗ ... ⊗ A_N) = tr ρ 𝔼_{A_1} ∘ ... ∘ 𝔼_{A_N}(1)`.
pub fn fcs_expectation(triple: &FcsTriple, observables: &[CMat]) -> Result<Complex64> {
    let mut b = identity(triple.map.k);
    for a in observables.iter().rev() {
        b = triple.map.apply(a, &b)?;
    }
    Ok((&triple.rho * b).trace())
}

/// `ω(O)` for an operator `O` on `r` consecutive sites (`n^r × n^r`),
/// expanded in products of matrix units.
pub fn fcs_expectation_local(triple: &FcsTriple, op: &CMat, r: usize) -> Result<Complex64> {
    let n = triple.map.n;
    let dim = n.pow(r as u32);
    if op.shape() != (dim, dim) {
        return Err(Error::DimensionMismatch(format!("operator on {r} sites must be {dim}x{dim}")));
    }
    let digits = |mut i: usize| {
        let mut d = vec![0; r];
        for s in (0..r).rev() {
            d[s] = i % n;
            i /= n;
        }
        d
    };
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..dim {
        for j in 0..dim {
            let w = op[(i, j)];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (di, dj) = (digits(i), digits(j));
            let units: Vec<CMat> = (0..r)
                .map(|s| {
                    let mut e = CMat::zeros(n, n);
                    e[(di[s], dj[s])] = c(1.0);
                    e
                })
                .collect();
            total += w * fcs_expectation(triple, &units)?;
        }
    }
    Ok(total)
}

/// `(r, ω(A ⊗ 1^{⊗(r−1)} ⊗ B))` for `r = 1..=r_max`.
pub fn two_point_curve(triple: &FcsTriple, a: &CMat, b: &CMat, r_max: usize) -> Result<Vec<(usize, Complex64)>> {
    let one = identity(triple.map.n);
    (1..=r_max)
        .map(|r| {
            let mut ops = vec![a.clone()];
            ops.extend(std::iter::repeat_n(one.clone(), r - 1));
            ops.push(b.clone());
            Ok((r, fcs_expectation(triple, &ops)?))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationLength {
    /// Transfer eigenvalues sorted by decreasing modulus, as `(re, im)`.
    pub eigenvalues: Vec<(f64, f64)>,
    pub subleading: Option<(f64, f64)>,
    pub subleading_modulus: f64,
    /// `−1 / ln |λ₂|`; 0 when there is no subleading eigenvalue.
    pub xi: f64,
    /// More than one eigenvalue of modulus 1.
    pub degenerate_dominant: bool,
}

pub fn transfer_eigenvalues(map: &CpUnitalMap) -> Vec<Complex64> {
    let t = map.transfer_matrix();
    let schur = Schur::new(t);
    let (_, tri) = schur.unpack();
    let mut ev: Vec<Complex64> = (0..tri.nrows()).map(|i| tri[(i, i)]).collect();
    ev.sort_by(|a, b| b.norm().total_cmp(&a.norm()).then(b.re.total_cmp(&a.re)));
    ev
}

pub fn correlation_length(map: &CpUnitalMap) -> CorrelationLength {
    let ev = transfer_eigenvalues(map);
    let dominant = ev.iter().filter(|z| (z.norm() - 1.0).abs() <= 1e-10).count();
    let sub = ev.get(1).copied();
    let modulus = sub.map_or(0.0, |z| z.norm());
    let xi = if modulus > 0.0 && modulus < 1.0 { -1.0 / modulus.ln() } else if modulus >= 1.0 { f64::INFINITY } else { 0.0 };
    CorrelationLength {
        eigenvalues: ev.iter().map(|z| (z.re, z.im)).collect(),
        subleading: sub.map(|z| (z.re, z.im)),
        subleading_modulus: modulus,
        xi,
        degenerate_dominant: dominant > 1,
    }
}

/// A Haar-like random isometry from the QR factor of a Gaussian matrix.
pub fn random_isometry<R: rand::Rng>(n: usize, k: usize, rng: &mut R) -> IsometryV {
    use rand_distr::{Distribution, StandardNormal};
    let g = CMat::from_fn(n * k, k, |_, _| {
        Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
    });
    let q = g.qr().q();
    IsometryV::new(n, k, q).expect("QR factor is isometric")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::aklt_term;
    use rand::SeedableRng;

    #[test]
    fn trivial_physical_space() {
        let v = IsometryV::new(1, 3, identity(3)).unwrap();
        let m = make_pure_map(&v);
        let b = CMat::from_fn(3, 3, |i, j| c((i * 3 + j) as f64));
        assert_eq!(m.apply(&identity(1), &b).unwrap(), b);
        let inv = invariant_state(&m).unwrap();
        assert!(!inv.unique);
        assert!(max_abs(&(inv.rho - identity(3) * c(1.0 / 3.0))) < 1e-12);
    }

    #[test]
    fn one_dimensional_auxiliary_space() {
        // Product states: T* is the 1x1 identity up to round-off.
        for seed in [39, 40, 41] {
            let v = random_isometry(2, 1, &mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let inv = invariant_state(&make_pure_map(&v)).unwrap();
            assert!(inv.unique);
            assert!((inv.rho[(0, 0)] - c(1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn aklt_isometry_properties() {
        let v = aklt_isometry();
        assert_eq!(v.matrix().adjoint() * v.matrix(), identity(2));
        assert!(intertwiner_residual(&v, SpinValue::HALF, SpinValue::ONE).unwrap() < 1e-12);
        let m = make_pure_map(&v);
        assert!(m.unitality_residual() < 1e-15);
        let inv = invariant_state(&m).unwrap();
        assert!(inv.unique);
        assert!(max_abs(&(inv.rho - identity(2) * c(0.5))) < 1e-12);
    }

    #[test]
    fn aklt_zero_energy_and_decay() {
        let t = FcsTriple::aklt();
        let e = fcs_expectation_local(&t, &aklt_term(), 2).unwrap();
        assert!(e.norm() < 1e-12);
        let cl = correlation_length(&t.map);
        let (re, im) = cl.subleading.unwrap();
        assert!((re + 1.0 / 3.0).abs() < 1e-12 && im.abs() < 1e-12);
        assert!((cl.xi - 1.0 / 3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn non_isometry_rejected() {
        let v = CMat::from_element(2, 1, c(1.0));
        assert!(matches!(IsometryV::new(2, 1, v), Err(Error::NotIsometric { .. })));
    }

    #[test]
    fn product_state_has_no_subleading_eigenvalue() {
        let mut v = CMat::zeros(2, 1);
        v[(0, 0)] = c(1.0);
        let cl = correlation_length(&make_pure_map(&IsometryV::new(2, 1, v).unwrap()));
        assert!(cl.subleading.is_none());
        assert_eq!(cl.xi, 0.0);
    }

    #[test]
    fn random_pure_map_fixed_point() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let v = random_isometry(3, 2, &mut rng);
        let m = make_pure_map(&v);
        assert!(m.unitality_residual() < 1e-12);
        let inv = invariant_state(&m).unwrap();
        assert!(inv.invariance_residual < 1e-10);
        assert!(inv.min_eigenvalue > -1e-12);
    }
}
