use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::linalg::{eigh, CMat};
use crate::spectra::eigen::{eigen_spectrum, SpectrumOptions};
use crate::spinops::hamiltonian::{build_hamiltonian, casimir, total_spin_component, ModelSpec};
use crate::spinops::sectors::magnetization_sectors;
use crate::spinops::sparse::SparseHermitian;
use crate::spinops::SpinGraph;

pub const COMMUTATOR_TOL: f64 = 1e-10;
pub const CASIMIR_TOL: f64 = 1e-6;
pub const DEGENERACY_TOL: f64 = 1e-9;
pub const MARGIN_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LevelMethod {
    /// Simultaneous diagonalization of `H` and the Casimir in one sector.
    Casimir,
    /// Sector spectra at `M = S` minus those at `M = S + 1`.
    HighestWeight,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelEntry {
    pub s: HalfInteger,
    /// `E(H, S)`.
    pub e_min: f64,
    pub e_max: f64,
    /// One energy per `(2S+1)`-fold multiplet, ascending.
    pub energies: Vec<f64>,
}

impl LevelEntry {
    pub fn multiplets(&self) -> usize {
        self.energies.len()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SpinLevelTable {
    pub s_min: HalfInteger,
    pub s_max: HalfInteger,
    /// Ascending in `S`; only spins that occur.
    pub entries: Vec<LevelEntry>,
    pub method: LevelMethod,
    /// `max |[H, S³]|` and `max |[H, C]|` (the latter `None` for highest-weight tables).
    pub commutator_residuals: (f64, Option<f64>),
}

impl SpinLevelTable {
    pub fn get(&self, s: HalfInteger) -> Option<&LevelEntry> {
        self.entries.iter().find(|e| e.s == s)
    }

    /// `E(H, S)`.
    pub fn energy(&self, s: HalfInteger) -> Option<f64> {
        self.get(s).map(|e| e.e_min)
    }

    /// Spin label of the lowest `E(H, S)`; ties resolve to the larger `S`.
    pub fn ground_spin(&self) -> HalfInteger {
        self.entries
            .iter()
            .min_by(|a, b| a.e_min.total_cmp(&b.e_min).then(b.s.cmp(&a.s)))
            .expect("nonempty table")
            .s
    }

    pub fn ground_energy(&self) -> f64 {
        self.entries.iter().map(|e| e.e_min).fold(f64::INFINITY, f64::min)
    }

    /// `Σ_S (2S+1) · multiplets(S)`.
    pub fn total_states(&self) -> usize {
        self.entries.iter().map(|e| (e.s.twice() as usize + 1) * e.multiplets()).sum()
    }
}

fn check_graph_matches(h: &SparseHermitian, graph: &SpinGraph) -> Result<()> {
    if h.basis().local_dims != graph.local_dims() {
        return Err(Error::DimensionMismatch("Hamiltonian basis does not match the graph's spins".into()));
    }
    Ok(())
}

/// Max entry of `[H, S³_total]`.
pub fn s3_commutator_residual(h: &SparseHermitian, graph: &SpinGraph) -> Result<f64> {
    let s3 = total_spin_component(graph, 3)?;
    Ok(h.matrix().commutator(&s3).max_abs())
}

/// Max entry of `[H, C]`.
pub fn casimir_commutator_residual(h: &SparseHermitian, graph: &SpinGraph) -> Result<f64> {
    let cas = casimir(graph)?;
    Ok(h.matrix().commutator(cas.matrix()).max_abs())
}

fn spin_of_casimir(value: f64) -> Result<HalfInteger> {
    let s = (-1.0 + (1.0 + 4.0 * value.max(0.0)).sqrt()) / 2.0;
    let label = HalfInteger((2.0 * s).round() as i64);
    let residual = (label.casimir() - value).abs();
    if residual > CASIMIR_TOL {
        return Err(Error::SymmetryBroken { what: "the Casimir (eigenvalue not of the form S(S+1))", residual });
    }
    Ok(label)
}

/// Groups ascending values whose neighbours differ by at most `tol`.
pub(crate) fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn build_table(
    levels: BTreeMap<HalfInteger, Vec<f64>>,
    graph: &SpinGraph,
    method: LevelMethod,
    residuals: (f64, Option<f64>),
) -> SpinLevelTable {
    let entries: Vec<LevelEntry> = levels
        .into_iter()
        .filter(|(_, v)| !v.is_empty())
        .map(|(s, mut energies)| {
            energies.sort_by(f64::total_cmp);
            LevelEntry { s, e_min: energies[0], e_max: *energies.last().unwrap(), energies }
        })
        .collect();
    SpinLevelTable {
        s_min: entries.first().map(|e| e.s).unwrap_or(graph.s_max()),
        s_max: graph.s_max(),
        entries,
        method,
        commutator_residuals: residuals,
    }
}

/// Multiplet counts implied by sector dimensions: `dim(M=S) − dim(M=S+1)`.
fn multiplet_counts(graph: &SpinGraph) -> BTreeMap<HalfInteger, usize> {
    let sectors = magnetization_sectors(graph);
    let mut out = BTreeMap::new();
    for (m, idx) in sectors.iter() {
        if m.twice() < 0 {
            continue;
        }
        let above = sectors.get(m + HalfInteger(2)).map_or(0, |v| v.len());
        out.insert(m, idx.len() - above);
    }
    out
}

/// `E(H, S)` for every total spin `S`, by diagonalizing the Casimir inside
/// each degenerate eigenspace of `H` in the sector of smallest `|M|`.
///
/// Refuses Hamiltonians that do not commute with `S³` and `C`.
pub fn spin_level_table(h: &SparseHermitian, graph: &SpinGraph) -> Result<SpinLevelTable> {
    check_graph_matches(h, graph)?;
    let r3 = s3_commutator_residual(h, graph)?;
    if r3 > COMMUTATOR_TOL {
        return Err(Error::SymmetryBroken { what: "total S3", residual: r3 });
    }
    let rc = casimir_commutator_residual(h, graph)?;
    if rc > COMMUTATOR_TOL {
        return Err(Error::SymmetryBroken {
            what: "the total-spin Casimir (use the highest-weight table instead)",
            residual: rc,
        });
    }

    let sectors = magnetization_sectors(graph);
    let m0 = sectors.lowest_abs();
    let idx = sectors.get(m0).expect("sector exists");
    let opts = SpectrumOptions { vectors: true, ..Default::default() };
    let spec = eigen_spectrum(h, Some(m0), &opts)?;
    let vecs = spec.eigenvectors.as_ref().expect("requested vectors");
    let cas = casimir(graph)?.matrix().block(idx);
    let hb = h.matrix().block(idx);

    let values = &spec.eigenvalues;
    let width = values.last().unwrap() - values[0];
    let mut levels: BTreeMap<HalfInteger, Vec<f64>> = BTreeMap::new();
    for range in clusters(values, DEGENERACY_TOL * width) {
        let q: CMat = vecs.columns(range.start, range.len()).into_owned();
        let cq = q.adjoint() * &cas * &q;
        let e = eigh(&((&cq + cq.adjoint()) * crate::linalg::c(0.5)));
        let rotated = &q * &e.vectors;
        let hq = rotated.adjoint() * &hb * &rotated;
        for (k, &cval) in e.values.iter().enumerate() {
            levels.entry(spin_of_casimir(cval)?).or_default().push(hq[(k, k)].re);
        }
    }

    let expected = multiplet_counts(graph);
    for (s, count) in &expected {
        let got = levels.get(s).map_or(0, Vec::len);
        if got != *count {
            return Err(Error::SymmetryBroken {
                what: "multiplet counting (Casimir labels disagree with sector dimensions)",
                residual: (got as f64 - *count as f64).abs(),
            });
        }
    }
    Ok(build_table(levels, graph, LevelMethod::Casimir, (r3, Some(rc))))
}

/// Removes from `a` (ascending) one value within `tol` of each entry of `b`.
fn multiset_difference(a: &[f64], b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let mut used = vec![false; a.len()];
    for &x in b {
        let hit = (0..a.len())
            .filter(|&i| !used[i] && (a[i] - x).abs() <= tol)
            .min_by(|&i, &j| (a[i] - x).abs().total_cmp(&(a[j] - x).abs()));
        match hit {
            Some(i) => used[i] = true,
            None => {
                return Err(Error::SymmetryBroken {
                    what: "SU(2) (an M = S+1 level has no partner at M = S)",
                    residual: x,
                })
            }
        }
    }
    Ok(a.iter().zip(used).filter(|(_, u)| !u).map(|(v, _)| *v).collect())
}

/// Highest-weight construction: the `S` levels are the `M = S` sector
/// spectrum with the `M = S + 1` spectrum removed. Needs only `[H, S³] = 0`;
/// meaningful when `H` is SU(2) symmetric.
pub fn spin_level_table_highest_weight(h: &SparseHermitian, graph: &SpinGraph) -> Result<SpinLevelTable> {
    check_graph_matches(h, graph)?;
    let r3 = s3_commutator_residual(h, graph)?;
    if r3 > COMMUTATOR_TOL {
        return Err(Error::SymmetryBroken { what: "total S3", residual: r3 });
    }
    let sectors = magnetization_sectors(graph);
    let labels: Vec<HalfInteger> = sectors.labels().into_iter().filter(|m| m.twice() >= 0).collect();
    let opts = SpectrumOptions::default();
    let spectra: BTreeMap<HalfInteger, Vec<f64>> = labels
        .par_iter()
        .map(|&m| eigen_spectrum(h, Some(m), &opts).map(|r| (m, r.eigenvalues)))
        .collect::<Result<_>>()?;
    let all: Vec<f64> = spectra.values().flatten().copied().collect();
    let width = all.iter().copied().fold(f64::NEG_INFINITY, f64::max) - all.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = (DEGENERACY_TOL * width).max(1e-12);
    let mut levels = BTreeMap::new();
    for (&m, spec) in &spectra {
        let above = spectra.get(&(m + HalfInteger(2))).map_or(&[][..], |v| v.as_slice());
        levels.insert(m, multiset_difference(spec, above, tol)?);
    }
    Ok(build_table(levels, graph, LevelMethod::HighestWeight, (r3, None)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Ordered,
    /// Some margin lies in `[0, 1e-9]`.
    Inconclusive,
    Violated,
}

fn verdict_of(margins: &[(HalfInteger, f64)]) -> Verdict {
    if margins.iter().any(|(_, m)| *m < 0.0) {
        Verdict::Violated
    } else if margins.iter().any(|(_, m)| *m <= MARGIN_TOL) {
        Verdict::Inconclusive
    } else {
        Verdict::Ordered
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FoelReport {
    pub table: SpinLevelTable,
    pub ordered: bool,
    pub verdict: Verdict,
    /// `(S, E(H, S−1) − E(H, S))` for `S` from `S_max` down.
    pub margins: Vec<(HalfInteger, f64)>,
}

/// Checks `E(H, S) < E(H, S′)` whenever `S′ < S`.
pub fn foel_check(table: &SpinLevelTable) -> FoelReport {
    let margins: Vec<(HalfInteger, f64)> = table
        .entries
        .windows(2)
        .rev()
        .map(|w| (w[1].s, w[0].e_min - w[1].e_min))
        .collect();
    let verdict = verdict_of(&margins);
    FoelReport { table: table.clone(), ordered: verdict == Verdict::Ordered, verdict, margins }
}

#[derive(Debug, Clone, Serialize)]
pub struct LiebMattisReport {
    pub table: SpinLevelTable,
    pub s_a: HalfInteger,
    pub s_b: HalfInteger,
    pub expected_ground_spin: HalfInteger,
    pub ground_spin: HalfInteger,
    pub ground_energy: f64,
    /// `(S, E(H, S+1) − E(H, S))` for `S ≥ |S_A − S_B|`.
    pub margins: Vec<(HalfInteger, f64)>,
    pub verdict: Verdict,
    pub passed: bool,
}

/// `H = −H_V + H_A + H_B`: the XXX model on `graph` with the sign flipped on
/// every edge between `a` and `b`. All couplings must be positive.
pub fn lieb_mattis_hamiltonian(graph: &SpinGraph, a: &[usize], b: &[usize]) -> Result<(SpinGraph, SparseHermitian)> {
    let n = graph.n_sites();
    let mut side = vec![None; n];
    for (&x, label) in a.iter().map(|x| (x, 0)).chain(b.iter().map(|x| (x, 1))) {
        if x >= n {
            return Err(Error::InvalidGraph(format!("bipartition names unknown site position {x}")));
        }
        if side[x].replace(label).is_some() {
            return Err(Error::InvalidGraph(format!("site position {x} listed twice in the bipartition")));
        }
    }
    if side.iter().any(Option::is_none) {
        return Err(Error::InvalidGraph("bipartition must cover every site".into()));
    }
    if let Some(e) = graph.edges().iter().find(|e| !(e.coupling > 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "couplings must be positive (edge {}-{} has {})",
            e.x, e.y, e.coupling
        )));
    }
    let signed = graph.map_couplings(|e| if side[e.x] != side[e.y] { -e.coupling } else { e.coupling });
    let h = build_hamiltonian(&signed, &ModelSpec::Xxx)?;
    Ok((signed, h))
}

pub fn lieb_mattis_check(graph: &SpinGraph, a: &[usize], b: &[usize]) -> Result<LiebMattisReport> {
    let (signed, h) = lieb_mattis_hamiltonian(graph, a, b)?;
    let table = spin_level_table(&h, &signed)?;
    let total = |set: &[usize]| HalfInteger(set.iter().map(|&x| graph.spin(x).twice_s() as i64).sum());
    let (s_a, s_b) = (total(a), total(b));
    let expected = (s_a - s_b).abs();
    let margins: Vec<(HalfInteger, f64)> = table
        .entries
        .windows(2)
        .filter(|w| w[0].s >= expected)
        .map(|w| (w[0].s, w[1].e_min - w[0].e_min))
        .collect();
    let verdict = verdict_of(&margins);
    let e_expected = table.energy(expected).unwrap_or(f64::INFINITY);
    let ground_energy = table.ground_energy();
    let ground_ok = (e_expected - ground_energy).abs() <= DEGENERACY_TOL * ground_energy.abs().max(1.0);
    Ok(LiebMattisReport {
        ground_spin: table.ground_spin(),
        ground_energy,
        s_a,
        s_b,
        expected_ground_spin: expected,
        passed: ground_ok && verdict == Verdict::Ordered,
        margins,
        verdict,
        table,
    })
}

/// Sanity check on the basis: the table covers the whole Hilbert space.
pub fn table_is_complete(table: &SpinLevelTable, graph: &SpinGraph) -> bool {
    Some(table.total_states()) == graph.total_dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinops::SpinValue;

    fn half(n: i64) -> HalfInteger {
        HalfInteger::from_integer(n)
    }

    #[test]
    fn single_edge_table() {
        let g = SpinGraph::chain(2, SpinValue::HALF, 1.0).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
        let t = spin_level_table(&h, &g).unwrap();
        assert!((t.energy(half(1)).unwrap() + 0.25).abs() < 1e-14);
        assert!((t.energy(half(0)).unwrap() - 0.75).abs() < 1e-14);
        let r = foel_check(&t);
        assert!(r.ordered);
        assert!((r.margins[0].1 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn xxz_is_refused_but_highest_weight_runs() {
        let g = SpinGraph::chain(3, SpinValue::HALF, 1.0).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxz { delta: 2.0 }).unwrap();
        assert!(matches!(spin_level_table(&h, &g), Err(Error::SymmetryBroken { .. })));
    }

    #[test]
    fn both_methods_agree_on_mixed_spins() {
        let spins = [SpinValue::HALF, SpinValue::ONE, SpinValue::new(3).unwrap(), SpinValue::HALF];
        let g = SpinGraph::chain_with_couplings(&spins, &[0.7, 1.3, 0.4]).unwrap();
        let h = build_hamiltonian(&g, &ModelSpec::Xxx).unwrap();
        let a = spin_level_table(&h, &g).unwrap();
        let b = spin_level_table_highest_weight(&h, &g).unwrap();
        assert_eq!(a.entries.len(), b.entries.len());
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.s, y.s);
            assert_eq!(x.multiplets(), y.multiplets());
            for (p, q) in x.energies.iter().zip(&y.energies) {
                assert!((p - q).abs() < 1e-9);
            }
        }
        assert!(table_is_complete(&a, &g));
    }

    #[test]
    fn two_site_lieb_mattis() {
        let g = SpinGraph::chain(2, SpinValue::HALF, 1.0).unwrap();
        let r = lieb_mattis_check(&g, &[0], &[1]).unwrap();
        assert_eq!(r.ground_spin, half(0));
        assert!(r.passed);
    }

    #[test]
    fn bad_bipartition() {
        let g = SpinGraph::chain(3, SpinValue::HALF, 1.0).unwrap();
        assert!(lieb_mattis_check(&g, &[0], &[1]).is_err());
        assert!(lieb_mattis_check(&g, &[0, 1], &[1, 2]).is_err());
    }
}
