use serde::Serialize;

use crate::error::{Error, Result};
use crate::gapbound::{kernel_projector, NnChain};
use crate::linalg::{c, eigvalsh, identity, max_abs, op_norm, CMat};

/// Dense `E_1, ..., E_L` on `[1, L]`:
/// `E_1 = 1 − G_[1,2]`, `E_n = G_[1,n] − G_[1,n+1]`, `E_L = G_[1,L]`.
#[derive(Debug, Clone)]
pub struct MartingaleResolution {
    pub length: usize,
    pub e: Vec<CMat>,
    /// `G_[n,n+1]` embedded in `[1, L]`, index `n − 1`.
    pub g_pairs: Vec<CMat>,
    /// `G_[1,n]` for `n = 1..=L`, index `n − 1`.
    pub g_prefix: Vec<CMat>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResolutionChecks {
    pub hermiticity: f64,
    pub orthogonality: f64,
    pub completeness: f64,
    /// `max ‖E_m G_[n,n+1] E_n‖_max` over `m ≤ n−2` or `m ≥ n+1`.
    pub locality: f64,
    /// `max_n ‖[G_[n,n+1], G_[1,n]]‖`.
    pub commutator: f64,
    /// `min spec(h − γ₂(1 − G_[1,2]))`.
    pub local_gap_positivity: f64,
    /// `‖G_[1,3] G_[1,2] − G_[1,3]‖_max` (0 when `L < 3`).
    pub nesting: f64,
}

pub const RESOLUTION_DIM_CAP: usize = 729;

impl MartingaleResolution {
    pub fn new(chain: &NnChain, len: usize) -> Result<Self> {
        let dim = chain.local_dim().pow(len as u32);
        if dim > RESOLUTION_DIM_CAP {
            return Err(Error::DimensionCap { dim, cap: RESOLUTION_DIM_CAP });
        }
        if len < 2 {
            return Err(Error::InvalidParameter("need L >= 2".into()));
        }
        let g_prefix: Vec<CMat> =
            (1..=len).map(|n| kernel_projector(chain, 1, n)?.embed(len)).collect::<Result<_>>()?;
        let g_pairs: Vec<CMat> =
            (1..len).map(|n| kernel_projector(chain, n, n + 1)?.embed(len)).collect::<Result<_>>()?;
        let mut e = Vec::with_capacity(len);
        e.push(identity(dim) - &g_prefix[1]);
        for n in 2..len {
            e.push(&g_prefix[n - 1] - &g_prefix[n]);
        }
        e.push(g_prefix[len - 1].clone());
        Ok(MartingaleResolution { length: len, e, g_pairs, g_prefix })
    }

    pub fn checks(&self, chain: &NnChain) -> ResolutionChecks {
        let dim = self.e[0].nrows();
        let len = self.length;
        let mut hermiticity: f64 = 0.0;
        let mut orthogonality: f64 = 0.0;
        let mut sum = CMat::zeros(dim, dim);
        for (i, ei) in self.e.iter().enumerate() {
            hermiticity = hermiticity.max(max_abs(&(ei - ei.adjoint())));
            sum += ei;
            for (j, ej) in self.e.iter().enumerate() {
                let prod = ei * ej;
                let target = if i == j { max_abs(&(prod - ei)) } else { max_abs(&prod) };
                orthogonality = orthogonality.max(target);
            }
        }
        let completeness = max_abs(&(sum - identity(dim)));

        let mut locality: f64 = 0.0;
        let mut commutator: f64 = 0.0;
        for n in 1..len {
            let g = &self.g_pairs[n - 1];
            let gen = g * &self.e[n - 1];
            for m in 1..len {
                if m + 2 <= n || m > n {
                    locality = locality.max(max_abs(&(&self.e[m - 1] * &gen)));
                }
            }
            let pre = &self.g_prefix[n - 1];
            commutator = commutator.max(op_norm(&(g * pre - pre * g)));
        }

        let gamma2 = chain.gamma2().unwrap_or(0.0);
        let d2 = chain.local_dim().pow(2);
        let g12 = kernel_projector(chain, 1, 2).expect("valid interval").embed(2).expect("fits");
        let local_gap_positivity = eigvalsh(&(chain.term() - (identity(d2) - g12) * c(gamma2)))[0];

        let nesting = if len >= 3 { max_abs(&(&self.g_prefix[2] * &self.g_prefix[1] - &self.g_prefix[2])) } else { 0.0 };
        ResolutionChecks { hermiticity, orthogonality, completeness, locality, commutator, local_gap_positivity, nesting }
    }

    /// `‖G_[n,n+1] E_n‖` from the dense operators.
    pub fn pair_norm(&self, n: usize) -> f64 {
        op_norm(&(&self.g_pairs[n - 1] * &self.e[n - 1]))
    }
}
