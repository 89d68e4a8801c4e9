use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{c, CMat, I};

/// A spin magnitude `s`, stored as `2s` so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SpinValue {
    twice_s: u32,
}

impl SpinValue {
    pub const HALF: SpinValue = SpinValue { twice_s: 1 };
    pub const ONE: SpinValue = SpinValue { twice_s: 2 };

    pub fn new(twice_s: u32) -> Result<Self> {
        if twice_s == 0 {
            return Err(Error::InvalidParameter("spin magnitude must be positive (twice_s >= 1)".into()));
        }
        Ok(SpinValue { twice_s })
    }

    pub fn twice_s(self) -> u32 {
        self.twice_s
    }

    pub fn s(self) -> f64 {
        self.twice_s as f64 / 2.0
    }

    pub fn as_half_integer(self) -> HalfInteger {
        HalfInteger(self.twice_s as i64)
    }

    /// Local dimension `2s + 1`.
    pub fn dim(self) -> usize {
        self.twice_s as usize + 1
    }

    /// `m` of basis state `index`; the basis is ordered `s, s-1, ..., -s`.
    pub fn m_of(self, index: usize) -> HalfInteger {
        HalfInteger(self.twice_s as i64 - 2 * index as i64)
    }
}

impl TryFrom<u32> for SpinValue {
    type Error = Error;
    fn try_from(v: u32) -> Result<Self> {
        SpinValue::new(v)
    }
}

impl From<SpinValue> for u32 {
    fn from(s: SpinValue) -> u32 {
        s.twice_s
    }
}

/// The three spin components in the `S³` eigenbasis, `m` descending.
#[derive(Debug, Clone)]
pub struct SpinMatrices {
    pub s1: CMat,
    pub s2: CMat,
    pub s3: CMat,
}

impl SpinMatrices {
    pub fn components(&self) -> [&CMat; 3] {
        [&self.s1, &self.s2, &self.s3]
    }

    pub fn raising(&self) -> CMat {
        &self.s1 + &self.s2 * I
    }

    pub fn lowering(&self) -> CMat {
        &self.s1 - &self.s2 * I
    }

    pub fn casimir(&self) -> CMat {
        &self.s1 * &self.s1 + &self.s2 * &self.s2 + &self.s3 * &self.s3
    }
}

pub fn spin_matrices(spin: SpinValue) -> SpinMatrices {
    let n = spin.dim();
    let s = spin.s();
    let mut raise = CMat::zeros(n, n);
    for i in 1..n {
        let m = spin.m_of(i).value();
        raise[(i - 1, i)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt());
    }
    let lower = raise.adjoint();
    let s1 = (&raise + &lower) * c(0.5);
    // (S+ - S-) / 2i
    let s2 = (&raise - &lower) * Complex64::new(0.0, -0.5);
    let s3 = CMat::from_diagonal(&nalgebra::DVector::from_fn(n, |i, _| c(spin.m_of(i).value())));
    SpinMatrices { s1, s2, s3 }
}

/// `S_x · S_y` on `C^{n_x} ⊗ C^{n_y}`.
pub fn spin_dot(a: SpinValue, b: SpinValue) -> CMat {
    let sa = spin_matrices(a);
    let sb = spin_matrices(b);
    sa.components()
        .iter()
        .zip(sb.components())
        .map(|(x, y)| x.kronecker(y))
        .fold(CMat::zeros(a.dim() * b.dim(), a.dim() * b.dim()), |acc, t| acc + t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{commutator, identity, max_abs};

    #[test]
    fn spin_half_s3_is_diag() {
        let m = spin_matrices(SpinValue::HALF);
        assert_eq!(m.s3[(0, 0)], c(0.5));
        assert_eq!(m.s3[(1, 1)], c(-0.5));
    }

    #[test]
    fn spin_one_casimir() {
        let m = spin_matrices(SpinValue::ONE);
        assert_eq!(m.s3[(0, 0)].re, 1.0);
        assert_eq!(m.s3[(1, 1)].re, 0.0);
        assert_eq!(m.s3[(2, 2)].re, -1.0);
        assert!(max_abs(&(m.casimir() - identity(3) * c(2.0))) < 1e-14);
    }

    #[test]
    fn su2_relations_all_spins() {
        for twice in 1..=7 {
            let sv = SpinValue::new(twice).unwrap();
            let m = spin_matrices(sv);
            let s = sv.s();
            let r12 = commutator(&m.s1, &m.s2) - &m.s3 * I;
            let r23 = commutator(&m.s2, &m.s3) - &m.s1 * I;
            let r31 = commutator(&m.s3, &m.s1) - &m.s2 * I;
            assert!(max_abs(&r12) < 1e-14, "twice_s={twice}");
            assert!(max_abs(&r23) < 1e-14);
            assert!(max_abs(&r31) < 1e-14);
            let cas = m.casimir() - identity(sv.dim()) * c(s * (s + 1.0));
            assert!(max_abs(&cas) < 1e-13);
        }
    }

    #[test]
    fn zero_spin_rejected() {
        assert!(SpinValue::new(0).is_err());
    }
}
