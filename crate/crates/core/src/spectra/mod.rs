//! Exact diagonalization by magnetization sector, total-spin level tables and
//! the ordering checks built on them.

pub mod eigen;
pub mod gaps;
pub mod levels;

pub use eigen::{
    eigen_spectrum, sector_indices, spectrum_by_sector, SectorLabel, Solver, SpectrumOptions, SpectrumResult,
    DEFAULT_DENSE_CAP,
};
pub use gaps::{gap_slope_at_zero, perturbed_gap_scan, sector_gap, GapPoint, PerturbedGapScan, SectorGap};
pub use levels::{
    foel_check, lieb_mattis_check, lieb_mattis_hamiltonian, spin_level_table, spin_level_table_highest_weight,
    table_is_complete, FoelReport, LevelEntry, LevelMethod, LiebMattisReport, SpinLevelTable, Verdict,
};
