use std::collections::BTreeMap;

use crate::halfint::HalfInteger;
use crate::spinops::graph::SpinGraph;
use crate::spinops::sparse::TensorBasis;

/// Partition of the tensor basis into eigenspaces of `Σ_x S³_x`.
#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationSectors {
    sectors: BTreeMap<HalfInteger, Vec<usize>>,
}

impl MagnetizationSectors {
    pub fn get(&self, m: HalfInteger) -> Option<&[usize]> {
        self.sectors.get(&m).map(|v| v.as_slice())
    }

    /// Sectors in ascending `M`.
    pub fn iter(&self) -> impl Iterator<Item = (HalfInteger, &[usize])> {
        self.sectors.iter().map(|(m, v)| (*m, v.as_slice()))
    }

    pub fn labels(&self) -> Vec<HalfInteger> {
        self.sectors.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.sectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }

    pub fn total_dim(&self) -> usize {
        self.sectors.values().map(Vec::len).sum()
    }

    /// `M` of basis index `i`.
    pub fn label_of(&self, i: usize) -> Option<HalfInteger> {
        self.sectors.iter().find(|(_, v)| v.binary_search(&i).is_ok()).map(|(m, _)| *m)
    }

    /// The sector with the smallest `|M|` (0 or 1/2); every SU(2) multiplet
    /// has exactly one state there.
    pub fn lowest_abs(&self) -> HalfInteger {
        *self.sectors.keys().min_by_key(|m| (m.abs(), -m.twice())).expect("nonempty")
    }
}

/// Groups basis indices by total magnetization. Indices within a sector are
/// ascending.
pub fn magnetization_sectors(graph: &SpinGraph) -> MagnetizationSectors {
    sectors_of_basis(&TensorBasis::new(graph.site_ids(), graph.local_dims()))
}

/// Same as [`magnetization_sectors`]; a site of local dimension `n` carries
/// spin `(n-1)/2`.
pub fn sectors_of_basis(basis: &TensorBasis) -> MagnetizationSectors {
    let dims = &basis.local_dims;
    let twice: Vec<i64> = dims.iter().map(|&d| d as i64 - 1).collect();
    let total: usize = dims.iter().product();
    let mut digits = vec![0usize; dims.len()];
    let mut m: i64 = twice.iter().sum();
    let mut sectors: BTreeMap<HalfInteger, Vec<usize>> = BTreeMap::new();
    for i in 0..total {
        sectors.entry(HalfInteger(m)).or_default().push(i);
        // advance the mixed-radix counter, tracking 2M incrementally
        for k in (0..digits.len()).rev() {
            digits[k] += 1;
            m -= 2;
            if digits[k] < dims[k] {
                break;
            }
            m += 2 * dims[k] as i64;
            digits[k] = 0;
        }
    }
    MagnetizationSectors { sectors }
}
