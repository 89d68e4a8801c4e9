//! The `spinlab` driver: one JSON config per run, outputs held in memory
//! until every computation has succeeded, then written together with a
//! [`RunRecord`].
//!
//! Config shape, shared by all subcommands:
//!
//! ```json
//! {"model": {...}, "params": {...}, "seed": 0}
//! ```
//!
//! `model` is a model document (see [`ModelDocument`]) except for `ssep`,
//! where it is a rate graph `{"vertices": [...], "edges": [{"x", "y", "rate"}]}`.
//! `params` depends on the subcommand. Unknown keys are rejected everywhere.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::climit::{sandwich_check, QuadratureSpec, NORMALIZATION};
use crate::error::{Error, Result};
use crate::fcs::{
    aklt_isometry, correlation_length, fcs_expectation_local, invariant_state, make_pure_map, random_isometry,
    read_isometry_csv, two_point_curve, write_isometry_csv, FcsTriple, IsometryV,
};
use crate::gapbound::{gap_certificate, write_curve_csv, CertificateOptions, NnChain};
use crate::halfint::HalfInteger;
use crate::linalg::CMat;
use crate::locality::{
    capped_aklt_chain, clustering_measure, commutator_profile, compare_with_bound, level_set_velocity,
    ClusteringOptions, ProfileOptions,
};
use crate::spectra::{
    eigen_spectrum, foel_check, lieb_mattis_check, spectrum_by_sector, spin_level_table,
    spin_level_table_highest_weight, SpectrumOptions, SpinLevelTable, DEFAULT_DENSE_CAP,
};
use crate::spinops::{build_hamiltonian, edge_term, spin_matrices, Interaction, ModelDocument, SpinValue};
use crate::ssep::{aldous_scan, heisenberg_equivalence_check, semigroup_check, ssep_generator, RateGraph};

pub const SUBCOMMANDS: [&str; 9] = ["spectrum", "foel", "lieb-mattis", "gap-cert", "fcs", "lr", "cluster", "ssep", "climit"];

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;

pub const RUN_RECORD_FILE: &str = "run_record.json";

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub model: Option<serde_json::Value>,
    #[serde(default)]
    pub params: Option<serde_json::Value>,
    #[serde(default)]
    pub seed: u64,
}

impl Config {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    fn params<T: DeserializeOwned + Default>(&self) -> Result<T> {
        match &self.params {
            None => Ok(T::default()),
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("params: {e}"))),
        }
    }

    fn model_as<T: DeserializeOwned>(&self) -> Result<Option<T>> {
        match &self.model {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone()).map(Some).map_err(|e| Error::Config(format!("model: {e}"))),
        }
    }

    fn model_doc(&self) -> Result<ModelDocument> {
        self.model_as()?.ok_or_else(|| Error::Config("this subcommand needs a \"model\" block".into()))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub subcommand: String,
    /// SHA-256 of the canonical JSON of the parsed model block (empty input hashes `null`).
    pub model_sha256: String,
    pub seed: u64,
    pub passed: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub residuals: BTreeMap<String, f64>,
    pub summary: serde_json::Value,
    pub wall_time_seconds: f64,
    /// Every numeric output of the run; the record itself is not listed.
    pub manifest: Vec<ManifestEntry>,
}

/// Files and verdicts of one subcommand, before anything touches the disk.
#[derive(Debug, Default)]
pub struct Artifacts {
    pub files: Vec<(String, Vec<u8>)>,
    pub passed: bool,
    pub tolerances: BTreeMap<String, f64>,
    pub residuals: BTreeMap<String, f64>,
    pub summary: serde_json::Value,
    pub model_sha256: String,
}

impl Artifacts {
    fn new(model_sha256: String) -> Self {
        Artifacts { passed: true, model_sha256, ..Default::default() }
    }

    fn file(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.file(name, bytes);
        Ok(())
    }

    fn tol(&mut self, name: &str, v: f64) {
        self.tolerances.insert(name.to_string(), v);
    }

    fn residual(&mut self, name: &str, v: f64) {
        self.residuals.insert(name.to_string(), v);
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub exit_code: i32,
    pub record: Option<RunRecord>,
    pub error: Option<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn hash_of<T: Serialize>(value: &T) -> Result<String> {
    Ok(sha256_hex(&serde_json::to_vec(value)?))
}

fn f(v: f64) -> String {
    format!("{v:?}")
}

fn opt_f(v: Option<f64>) -> String {
    v.map_or_else(String::new, f)
}

/// Rows of strings to CSV bytes.
fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn spin_component(spin: SpinValue, name: &str) -> Result<CMat> {
    let s = spin_matrices(spin);
    match name {
        "s1" => Ok(s.s1),
        "s2" => Ok(s.s2),
        "s3" => Ok(s.s3),
        other => Err(Error::Config(format!("unknown observable \"{other}\" (use s1, s2 or s3)"))),
    }
}

/// Runs `subcommand` with the config at `config_path` and writes into `out`.
/// Nothing is written unless the config parses and every computation succeeds.
pub fn run(subcommand: &str, config_path: &Path, out: &Path, seed_override: Option<u64>) -> Outcome {
    let start = Instant::now();
    let fail = |e: Error| Outcome { exit_code: EXIT_INPUT_ERROR, record: None, error: Some(e.to_string()) };
    let text = match std::fs::read_to_string(config_path) {
        Ok(t) => t,
        Err(e) => return fail(Error::Io(e)),
    };
    let mut config = match Config::from_json(&text) {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(s) = seed_override {
        config.seed = s;
    }
    let artifacts = match execute(subcommand, &config) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    match write_outputs(subcommand, &config, artifacts, out, start) {
        Ok(record) => Outcome {
            exit_code: if record.passed { EXIT_OK } else { EXIT_CHECK_FAILED },
            record: Some(record),
            error: None,
        },
        Err(e) => fail(e),
    }
}

fn write_outputs(subcommand: &str, config: &Config, a: Artifacts, out: &Path, start: Instant) -> Result<RunRecord> {
    std::fs::create_dir_all(out)?;
    let mut manifest = Vec::with_capacity(a.files.len());
    for (name, bytes) in &a.files {
        std::fs::write(out.join(name), bytes)?;
        manifest.push(ManifestEntry { file: name.clone(), bytes: bytes.len(), sha256: sha256_hex(bytes) });
    }
    let record = RunRecord {
        subcommand: subcommand.to_string(),
        model_sha256: a.model_sha256,
        seed: config.seed,
        passed: a.passed,
        tolerances: a.tolerances,
        residuals: a.residuals,
        summary: a.summary,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        manifest,
    };
    let mut bytes = serde_json::to_vec_pretty(&record)?;
    bytes.push(b'\n');
    std::fs::write(out.join(RUN_RECORD_FILE), bytes)?;
    Ok(record)
}

/// Computes all outputs of a subcommand without touching the filesystem
/// (except reading an isometry CSV named in `fcs` params).
pub fn execute(subcommand: &str, config: &Config) -> Result<Artifacts> {
    match subcommand {
        "spectrum" => run_spectrum(config),
        "foel" => run_foel(config),
        "lieb-mattis" => run_lieb_mattis(config),
        "gap-cert" => run_gap_cert(config),
        "fcs" => run_fcs(config),
        "lr" => run_lr(config),
        "cluster" => run_cluster(config),
        "ssep" => run_ssep(config),
        "climit" => run_climit(config),
        other => Err(Error::Config(format!("unknown subcommand \"{other}\" (expected one of {})", SUBCOMMANDS.join(", ")))),
    }
}

// ---- spectrum ----

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SpectrumParams {
    /// `2M` of a single sector; all sectors when absent.
    twice_m: Option<i64>,
    dense_cap: Option<usize>,
    lowest: Option<usize>,
    /// Also export `H` as coordinate triplets.
    export_operator: bool,
}

const RESIDUAL_TOL: f64 = 1e-8;

fn run_spectrum(config: &Config) -> Result<Artifacts> {
    let p: SpectrumParams = config.params()?;
    let doc = config.model_doc()?;
    let (graph, model) = doc.resolve()?;
    let mut a = Artifacts::new(hash_of(&doc)?);
    let h = build_hamiltonian(&graph, &model)?;
    let opts = SpectrumOptions { dense_cap: p.dense_cap.unwrap_or(DEFAULT_DENSE_CAP), lowest: p.lowest, vectors: false };
    let results = match p.twice_m {
        Some(t) => vec![eigen_spectrum(&h, Some(HalfInteger::from_twice(t)), &opts)?],
        None => spectrum_by_sector(&h, &opts)?,
    };
    let mut rows = Vec::new();
    for r in &results {
        let m = match r.sector {
            crate::spectra::SectorLabel::M(m) => f(m.value()),
            crate::spectra::SectorLabel::Full => "full".into(),
        };
        rows.extend(r.eigenvalues.iter().map(|&e| vec![m.clone(), f(e)]));
    }
    a.file("spectrum.csv", csv_bytes(&["M", "eigenvalue"], rows)?);
    if p.export_operator {
        let mut buf = Vec::new();
        h.write_csv(&mut buf)?;
        a.file("hamiltonian.csv", buf);
    }
    let worst = results.iter().map(|r| r.max_residual()).fold(0.0, f64::max);
    a.tol("eigen_residual", RESIDUAL_TOL);
    a.residual("eigen_residual", worst);
    a.passed = worst <= RESIDUAL_TOL;
    a.summary = serde_json::json!({
        "model": model.name(),
        "dim": h.dim(),
        "sectors": results.iter().map(|r| serde_json::json!({
            "sector": r.sector.to_string(), "dim": r.dim, "solver": r.solver,
            "ground_energy": r.eigenvalues.first(), "max_residual": r.max_residual(),
        })).collect::<Vec<_>>(),
    });
    Ok(a)
}

// ---- foel / lieb-mattis ----

fn levels_csv(table: &SpinLevelTable, margins: &[(HalfInteger, f64)]) -> Result<Vec<u8>> {
    let rows = table.entries.iter().map(|e| {
        let margin = margins.iter().find(|(s, _)| *s == e.s).map(|m| m.1);
        vec![f(e.s.value()), f(e.e_min), opt_f(margin)]
    });
    csv_bytes(&["S", "E", "margin"], rows)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FoelParams {
    /// `casimir` (default) or `highest_weight`.
    method: Option<String>,
}

fn table_for(h: &crate::spinops::SparseHermitian, graph: &crate::spinops::SpinGraph, method: Option<&str>) -> Result<SpinLevelTable> {
    match method.unwrap_or("casimir") {
        "casimir" => spin_level_table(h, graph),
        "highest_weight" => spin_level_table_highest_weight(h, graph),
        other => Err(Error::Config(format!("unknown level method \"{other}\""))),
    }
}

fn scatter_csv(h: &crate::spinops::SparseHermitian) -> Result<Vec<u8>> {
    let results = spectrum_by_sector(h, &SpectrumOptions::default())?;
    let rows = results.iter().flat_map(|r| {
        let m = match r.sector {
            crate::spectra::SectorLabel::M(m) => m.value(),
            crate::spectra::SectorLabel::Full => f64::NAN,
        };
        r.eigenvalues.iter().map(move |&e| vec![f(m), f(e)])
    });
    csv_bytes(&["M", "eigenvalue"], rows.collect::<Vec<_>>())
}

fn run_foel(config: &Config) -> Result<Artifacts> {
    let p: FoelParams = config.params()?;
    let doc = config.model_doc()?;
    let (graph, model) = doc.resolve()?;
    let mut a = Artifacts::new(hash_of(&doc)?);
    let h = build_hamiltonian(&graph, &model)?;
    let table = table_for(&h, &graph, p.method.as_deref())?;
    let report = foel_check(&table);
    a.file("levels.csv", levels_csv(&table, &report.margins)?);
    a.file("scatter.csv", scatter_csv(&h)?);
    a.json("foel.json", &report)?;
    a.tol("margin", crate::spectra::levels::MARGIN_TOL);
    a.tol("commutator", crate::spectra::levels::COMMUTATOR_TOL);
    a.residual("s3_commutator", table.commutator_residuals.0);
    if let Some(r) = table.commutator_residuals.1 {
        a.residual("casimir_commutator", r);
    }
    a.passed = report.ordered;
    a.summary = serde_json::json!({ "ordered": report.ordered, "verdict": report.verdict, "ground_spin": table.ground_spin().to_string() });
    Ok(a)
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LiebMattisParams {
    /// Site ids of the two halves of the bipartition.
    a: Vec<usize>,
    b: Vec<usize>,
}

fn run_lieb_mattis(config: &Config) -> Result<Artifacts> {
    let p: LiebMattisParams = config.params()?;
    let doc = config.model_doc()?;
    let (graph, _) = doc.resolve()?;
    if !doc.model.kind.eq_ignore_ascii_case("xxx") {
        return Err(Error::Config("lieb-mattis needs an xxx model".into()));
    }
    let pos = |ids: &[usize]| -> Result<Vec<usize>> {
        ids.iter()
            .map(|&id| graph.position_of(id).ok_or_else(|| Error::Config(format!("unknown site id {id}"))))
            .collect()
    };
    let (pa, pb) = (pos(&p.a)?, pos(&p.b)?);
    let mut a = Artifacts::new(hash_of(&doc)?);
    let report = lieb_mattis_check(&graph, &pa, &pb)?;
    a.file("levels.csv", levels_csv(&report.table, &report.margins)?);
    a.json("lieb_mattis.json", &report)?;
    a.tol("margin", crate::spectra::levels::MARGIN_TOL);
    a.residual("s3_commutator", report.table.commutator_residuals.0);
    if let Some(r) = report.table.commutator_residuals.1 {
        a.residual("casimir_commutator", r);
    }
    a.passed = report.passed;
    a.summary = serde_json::json!({
        "passed": report.passed, "verdict": report.verdict,
        "expected_ground_spin": report.expected_ground_spin.to_string(),
        "ground_spin": report.ground_spin.to_string(),
    });
    Ok(a)
}

// ---- gap-cert ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct GapCertParams {
    lengths: Vec<usize>,
    m: usize,
    n: usize,
    m_max: Option<usize>,
}

impl Default for GapCertParams {
    fn default() -> Self {
        GapCertParams { lengths: (4..=8).collect(), m: 1, n: 1, m_max: None }
    }
}

/// A translation-invariant chain read off a model document: uniform spin and
/// the same two-site term on every edge.
fn nn_chain_of(doc: &ModelDocument) -> Result<NnChain> {
    let (graph, model) = doc.resolve()?;
    if graph.edges().is_empty() {
        return Err(Error::Config("gap-cert needs at least one edge".into()));
    }
    let d = graph.spin(0).dim();
    if graph.local_dims().iter().any(|&x| x != d) {
        return Err(Error::Config("gap-cert needs a uniform spin".into()));
    }
    let term = edge_term(&graph, &model, 0);
    for k in 1..graph.edges().len() {
        if crate::linalg::max_abs(&(edge_term(&graph, &model, k) - &term)) > 1e-12 {
            return Err(Error::Config("gap-cert needs the same term on every edge".into()));
        }
    }
    NnChain::new(d, term)
}

fn run_gap_cert(config: &Config) -> Result<Artifacts> {
    let p: GapCertParams = config.params()?;
    let doc = config.model_doc()?;
    let chain = nn_chain_of(&doc)?;
    if p.lengths.is_empty() || p.lengths.iter().any(|&l| l < 3) {
        return Err(Error::Config("lengths must be nonempty and at least 3".into()));
    }
    let mut a = Artifacts::new(hash_of(&doc)?);
    let opts = CertificateOptions { m: p.m, n: p.n, m_max: p.m_max };
    let certs = p.lengths.iter().map(|&l| gap_certificate(&chain, l, &opts)).collect::<Result<Vec<_>>>()?;
    let mut curve = Vec::new();
    write_curve_csv(&certs, &mut curve)?;
    a.file("gap_curve.csv", curve);
    a.json("certificates.json", &certs)?;
    a.tol("soundness", 1e-9);
    a.tol("kernel_cutoff", chain.cutoff());
    let sound = certs.iter().all(|c| c.overlap_bound_sound && c.epsilon_bound_sound.unwrap_or(true));
    a.passed = sound;
    a.summary = serde_json::json!({
        "sound": sound,
        "epsilon_below_threshold": certs.iter().all(|c| c.epsilon_below_threshold),
    });
    Ok(a)
}

// ---- fcs ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct FcsParams {
    /// `aklt`, `random` or `csv`.
    isometry: String,
    /// Path of an isometry CSV for `isometry = "csv"`.
    path: Option<PathBuf>,
    /// Physical and auxiliary dimensions for `isometry = "random"`.
    n: Option<usize>,
    k: Option<usize>,
    r_max: usize,
    observable: String,
}

impl Default for FcsParams {
    fn default() -> Self {
        FcsParams { isometry: "aklt".into(), path: None, n: None, k: None, r_max: 8, observable: "s3".into() }
    }
}

const FCS_TOL: f64 = 1e-12;

fn run_fcs(config: &Config) -> Result<Artifacts> {
    let p: FcsParams = config.params()?;
    let doc: Option<ModelDocument> = config.model_as()?;
    let v: IsometryV = match p.isometry.as_str() {
        "aklt" => aklt_isometry(),
        "random" => {
            let (n, k) = p.n.zip(p.k).ok_or_else(|| Error::Config("random isometry needs n and k".into()))?;
            if n == 0 || k == 0 {
                return Err(Error::Config("n and k must be positive".into()));
            }
            random_isometry(n, k, &mut ChaCha8Rng::seed_from_u64(config.seed))
        }
        "csv" => {
            let path = p.path.as_ref().ok_or_else(|| Error::Config("csv isometry needs a path".into()))?;
            read_isometry_csv(std::fs::File::open(path)?)?
        }
        other => return Err(Error::Config(format!("unknown isometry \"{other}\""))),
    };
    let n = v.physical_dim();
    if n < 2 {
        return Err(Error::Config("physical dimension must be at least 2".into()));
    }
    // The physical site is read as spin (n−1)/2.
    let obs = spin_component(SpinValue::new(n as u32 - 1)?, &p.observable)?;
    let hash = match &doc {
        Some(d) => hash_of(d)?,
        None => hash_of(&serde_json::Value::Null)?,
    };
    let mut a = Artifacts::new(hash);
    let map = make_pure_map(&v);
    let inv = invariant_state(&map)?;
    let triple = FcsTriple { map: map.clone(), rho: inv.rho.clone() };
    let mean = crate::fcs::fcs_expectation(&triple, std::slice::from_ref(&obs))?;
    let centred = &obs - crate::linalg::identity(n) * mean;
    let curve = two_point_curve(&triple, &centred, &centred, p.r_max)?;
    a.file("correlation.csv", csv_bytes(&["r", "value"], curve.iter().map(|(r, z)| vec![r.to_string(), f(z.re)]))?);
    let mut iso = Vec::new();
    write_isometry_csv(&v, &mut iso)?;
    a.file("isometry.csv", iso);
    let xi = correlation_length(&map);

    // Edge terms of the model, if given, must annihilate the state.
    let mut edge_values = Vec::new();
    if let Some(d) = &doc {
        let (graph, model) = d.resolve()?;
        for k in 0..graph.edges().len() {
            let term = edge_term(&graph, &model, k);
            edge_values.push(fcs_expectation_local(&triple, &term, 2)?.norm());
        }
    }
    let worst_edge = edge_values.iter().copied().fold(0.0, f64::max);
    let imag = curve.iter().map(|(_, z)| z.im.abs()).fold(0.0, f64::max);
    a.tol("fcs", FCS_TOL);
    a.residual("unitality", map.unitality_residual());
    a.residual("invariant_state", inv.invariance_residual);
    a.residual("edge_expectation", worst_edge);
    a.residual("correlation_imaginary_part", imag);
    a.passed = map.unitality_residual() <= FCS_TOL && inv.invariance_residual <= FCS_TOL && worst_edge <= FCS_TOL;
    a.summary = serde_json::json!({
        "n": n, "k": v.aux_dim(),
        "correlation_length": xi,
        "edge_expectations": edge_values,
    });
    a.json("fcs.json", &a.summary.clone())?;
    Ok(a)
}

// ---- lr ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct LrParams {
    /// Site id of `B`.
    y: usize,
    /// Site ids of `A`; every site when absent.
    xs: Option<Vec<usize>>,
    ts: Vec<f64>,
    lambdas: Vec<f64>,
    observable: String,
    grid_points: usize,
    refine_starts: usize,
    refine_iters: usize,
    /// Level for the front velocity.
    threshold: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        let d = ProfileOptions::default();
        LrParams {
            y: 0,
            xs: None,
            ts: (0..=6).map(|k| 0.5 * k as f64).collect(),
            lambdas: vec![0.5, 1.0, 2.0],
            observable: "s3".into(),
            grid_points: d.grid_points,
            refine_starts: d.refine_starts,
            refine_iters: d.refine_iters,
            threshold: 0.1,
        }
    }
}

fn run_lr(config: &Config) -> Result<Artifacts> {
    let p: LrParams = config.params()?;
    let doc = config.model_doc()?;
    let (graph, model) = doc.resolve()?;
    if p.lambdas.is_empty() || p.lambdas.iter().any(|&l| !(l > 0.0)) || p.ts.is_empty() {
        return Err(Error::Config("lr needs positive lambdas and at least one t".into()));
    }
    let pos = |id: usize| graph.position_of(id).ok_or_else(|| Error::Config(format!("unknown site id {id}")));
    let y = pos(p.y)?;
    let xs: Vec<usize> = match &p.xs {
        Some(ids) => ids.iter().map(|&id| pos(id)).collect::<Result<_>>()?,
        None => (0..graph.n_sites()).collect(),
    };
    let b = spin_component(graph.spin(y), &p.observable)?;
    let opts = ProfileOptions {
        grid_points: p.grid_points,
        refine_starts: p.refine_starts,
        refine_iters: p.refine_iters,
        seed: config.seed,
    };
    let mut a = Artifacts::new(hash_of(&doc)?);
    let profile = commutator_profile(&graph, &model, &b, y, &xs, &p.ts, &opts)?;
    let phi = Interaction::from_model(&graph, &model)?;
    let cmp = compare_with_bound(&graph, &phi, &profile, &b, &p.lambdas)?;
    let pairs: Vec<(f64, f64)> = cmp.lambdas.iter().copied().zip(cmp.phi_norms.iter().copied()).collect();
    let velocity = level_set_velocity(&graph, &profile, p.threshold, &pairs);
    let ids = graph.site_ids();
    a.file(
        "lr_profile.csv",
        csv_bytes(
            &["x", "t", "lambda", "measured", "bound"],
            cmp.rows.iter().map(|r| vec![ids[r.x].to_string(), f(r.t), f(r.lambda), f(r.measured), f(r.bound)]),
        )?,
    );
    a.tol("soundness_relative", 1e-10);
    a.residual("worst_excess", cmp.worst_excess);
    a.passed = cmp.sound;
    a.summary = serde_json::json!({
        "sound": cmp.sound,
        "lambdas": cmp.lambdas,
        "phi_norms": cmp.phi_norms,
        "tightest_lambda": cmp.tightest_lambda,
        "velocity": velocity,
        "sup_over": "Hermitian A at x, identity component removed; a lower estimate of the full supremum",
    });
    a.json("lr.json", &a.summary.clone())?;
    Ok(a)
}

// ---- cluster ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ClusterParams {
    /// Bulk length of the capped AKLT chain used when no model is given.
    bulk: usize,
    lambda: f64,
    observable: String,
    /// Site ids; defaults follow [`ClusteringOptions::for_chain`].
    a_site: Option<usize>,
    b_sites: Option<Vec<usize>>,
    boundary_margin: Option<usize>,
    dense_cap: Option<usize>,
    /// If set, the fitted rate must lie within `rate_tol` (relative) of it.
    expected_rate: Option<f64>,
    rate_tol: f64,
}

impl Default for ClusterParams {
    fn default() -> Self {
        ClusterParams {
            bulk: 6,
            lambda: 1.0,
            observable: "s3".into(),
            a_site: None,
            b_sites: None,
            boundary_margin: None,
            dense_cap: None,
            expected_rate: None,
            rate_tol: 0.05,
        }
    }
}

fn run_cluster(config: &Config) -> Result<Artifacts> {
    let p: ClusterParams = config.params()?;
    let doc: Option<ModelDocument> = config.model_as()?;
    let (graph, model, hash) = match &doc {
        Some(d) => {
            let (g, m) = d.resolve()?;
            (g, m, hash_of(d)?)
        }
        None => {
            let (g, m) = capped_aklt_chain(p.bulk)?;
            (g, m, hash_of(&serde_json::json!({ "capped_aklt_bulk": p.bulk }))?)
        }
    };
    if !(p.lambda > 0.0) {
        return Err(Error::Config("lambda must be positive".into()));
    }
    let pos = |id: usize| graph.position_of(id).ok_or_else(|| Error::Config(format!("unknown site id {id}")));
    let mut opts = ClusteringOptions::for_chain(graph.n_sites(), p.lambda);
    if let Some(x) = p.a_site {
        opts.a_site = pos(x)?;
    }
    if let Some(ys) = &p.b_sites {
        opts.b_sites = ys.iter().map(|&y| pos(y)).collect::<Result<_>>()?;
    }
    if let Some(m) = p.boundary_margin {
        opts.boundary_margin = m;
    }
    if let Some(c) = p.dense_cap {
        opts.dense_cap = c;
    }
    let obs = spin_component(graph.spin(opts.a_site), &p.observable)?;
    let b_spin = opts.b_sites.first().map_or(graph.spin(opts.a_site), |&y| graph.spin(y));
    let b = spin_component(b_spin, &p.observable)?;
    let mut a = Artifacts::new(hash);
    let curve = clustering_measure(&graph, &model, &obs, &b, &opts)?;
    let fitted = |d: f64| curve.fit.as_ref().map(|fit| (fit.intercept - fit.rate * d).exp());
    a.file(
        "clustering.csv",
        csv_bytes(
            &["d", "truncated_correlation", "fit"],
            curve.points.iter().map(|pt| vec![f(pt.d), f(pt.truncated), opt_f(fitted(pt.d).filter(|_| pt.in_fit))]),
        )?,
    );
    let rate_ok = match (p.expected_rate, curve.fit.as_ref()) {
        (Some(r), Some(fit)) => Some((fit.rate - r).abs() <= p.rate_tol * r.abs()),
        (Some(_), None) => Some(false),
        (None, _) => None,
    };
    let mu_ok = curve.rate_exceeds_mu();
    a.tol("rate_relative", p.rate_tol);
    if let Some(fit) = &curve.fit {
        a.residual("fit_one_minus_r_squared", 1.0 - fit.r_squared);
    }
    a.passed = mu_ok.unwrap_or(false) && rate_ok.unwrap_or(true);
    a.summary = serde_json::json!({
        "lambda": curve.lambda,
        "phi_norm": curve.phi_norm,
        "gamma": curve.gamma,
        "mu": curve.mu,
        "ground_energy": curve.ground_energy,
        "degenerate": curve.degenerate,
        "fit": curve.fit,
        "rate_exceeds_mu": mu_ok,
        "rate_matches_expected": rate_ok,
    });
    a.json("clustering.json", &a.summary.clone())?;
    Ok(a)
}

// ---- ssep ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SsepParams {
    /// Times at which `e^{−tL}` is checked for stochasticity.
    semigroup_times: Vec<f64>,
    /// Skip the entrywise comparison with the spin Hamiltonian.
    skip_equivalence: bool,
}

impl Default for SsepParams {
    fn default() -> Self {
        SsepParams { semigroup_times: vec![0.1, 1.0, 10.0], skip_equivalence: false }
    }
}

fn run_ssep(config: &Config) -> Result<Artifacts> {
    let p: SsepParams = config.params()?;
    let graph: RateGraph =
        config.model_as()?.ok_or_else(|| Error::Config("ssep needs a rate graph in the \"model\" block".into()))?;
    graph.validate()?;
    let mut a = Artifacts::new(hash_of(&graph)?);
    let report = aldous_scan(&graph)?;
    let mut rows = Vec::new();
    for (c, scan) in report.components.iter().enumerate() {
        for r in &scan.rows {
            rows.push(vec![c.to_string(), r.n.to_string(), f(r.lambda)]);
        }
    }
    a.file("aldous.csv", csv_bytes(&["component", "n", "lambda_n"], rows)?);
    let mut stochastic = true;
    let mut worst_stoch: f64 = 0.0;
    if !p.semigroup_times.is_empty() && graph.n_vertices() >= 2 {
        let gen = ssep_generator(&graph, graph.n_vertices() / 2)?;
        for s in semigroup_check(&gen, &p.semigroup_times) {
            stochastic &= s.stochastic;
            worst_stoch = worst_stoch.max(s.row_sum_residual).max(-s.min_entry);
        }
    }
    let equivalence = if p.skip_equivalence { None } else { Some(heisenberg_equivalence_check(&graph)?) };
    a.tol("aldous", crate::ssep::GAP_TOL);
    a.tol("equivalence", 1e-12);
    a.tol("stochasticity", 1e-10);
    a.residual("aldous_max_deviation", report.components.iter().map(|c| c.max_deviation).fold(0.0, f64::max));
    a.residual("semigroup", worst_stoch);
    if let Some(e) = &equivalence {
        a.residual("equivalence", e.sectors.iter().map(|s| s.max_difference).fold(0.0, f64::max));
    }
    a.passed = report.holds && stochastic && equivalence.as_ref().is_none_or(|e| e.equivalent);
    a.summary = serde_json::json!({
        "aldous_holds": report.holds,
        "connected": report.connected,
        "warning": report.warning,
        "stochastic": stochastic,
        "equivalent": equivalence.as_ref().map(|e| e.equivalent),
    });
    a.json("ssep.json", &serde_json::json!({ "aldous": report, "equivalence": equivalence }))?;
    Ok(a)
}

// ---- climit ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct ClimitParams {
    /// `2S` values.
    twice_s: Vec<u32>,
    betas: Vec<f64>,
    c_max: f64,
    initial_nodes: usize,
    max_nodes: usize,
    tol: f64,
    mc_samples: usize,
}

impl Default for ClimitParams {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        ClimitParams {
            twice_s: (1..=5).collect(),
            betas: vec![0.5, 1.0, 2.0, 4.0],
            c_max: 10.0,
            initial_nodes: q.initial_nodes,
            max_nodes: q.max_nodes,
            tol: q.tol,
            mc_samples: q.mc_samples,
        }
    }
}

fn run_climit(config: &Config) -> Result<Artifacts> {
    let p: ClimitParams = config.params()?;
    let doc = config.model_doc()?;
    let (graph, model) = doc.resolve()?;
    let spins = p.twice_s.iter().map(|&t| SpinValue::new(t)).collect::<Result<Vec<_>>>()?;
    let spec = QuadratureSpec {
        initial_nodes: p.initial_nodes,
        max_nodes: p.max_nodes,
        tol: p.tol,
        mc_samples: p.mc_samples,
        seed: config.seed,
    };
    let mut a = Artifacts::new(hash_of(&doc)?);
    let report = sandwich_check(&graph, &model, &spins, &p.betas, &spec, p.c_max)?;
    let mut header = vec!["beta".to_string(), "Z_C".into(), "Z_C_error".into()];
    header.extend(report.spins.iter().map(|t| format!("Z_Q_S={}", HalfInteger::from_twice(*t as i64))));
    let rows = report.rows.iter().map(|r| {
        let mut row = vec![f(r.beta), f(r.z_c), f(r.z_c_error)];
        row.extend(r.z_q.iter().map(|&z| f(z)));
        row
    });
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    a.file("partition.csv", csv_bytes(&header_refs, rows.collect::<Vec<_>>())?);
    a.file(
        "fitted_c.csv",
        csv_bytes(
            &["S", "fitted_c", "free_energy_gap", "lower_holds"],
            report.summaries.iter().map(|s| {
                vec![
                    f(s.twice_s as f64 / 2.0),
                    opt_f(s.fitted_c),
                    f(s.free_energy_gap),
                    s.lower_holds.to_string(),
                ]
            }),
        )?,
    );
    a.tol("quadrature", spec.tol);
    a.residual("z_c_error", report.rows.iter().map(|r| r.z_c_error).fold(0.0, f64::max));
    a.passed = report.lower_holds && report.c_bounded;
    a.summary = serde_json::json!({
        "normalization": NORMALIZATION,
        "quadrature": report.quadrature,
        "nodes": report.nodes,
        "lower_holds": report.lower_holds,
        "c_bounded": report.c_bounded,
        "free_energy_monotone": report.free_energy_monotone,
    });
    a.json("climit.json", &report)?;
    Ok(a)
}

/// Human-readable one-line summary for the terminal.
pub fn describe(outcome: &Outcome) -> String {
    let mut s = String::new();
    match (&outcome.record, &outcome.error) {
        (_, Some(e)) => {
            let _ = write!(s, "error: {e}");
        }
        (Some(r), None) => {
            let _ = write!(
                s,
                "{}: {} ({} files, {:.3} s)",
                r.subcommand,
                if r.passed { "passed" } else { "CHECK FAILED" },
                r.manifest.len(),
                r.wall_time_seconds
            );
        }
        (None, None) => {}
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain_model(n: usize, twice_s: u32, kind: &str) -> serde_json::Value {
        serde_json::json!({
            "sites": (0..n).map(|i| serde_json::json!({"id": i, "twice_s": twice_s})).collect::<Vec<_>>(),
            "edges": (0..n - 1).map(|i| serde_json::json!({"x": i, "y": i + 1, "J": 1.0})).collect::<Vec<_>>(),
            "model": {"kind": kind},
        })
    }

    #[test]
    fn unknown_top_level_key_is_rejected() {
        assert!(Config::from_json(r#"{"model": null, "extra": 1}"#).is_err());
    }

    #[test]
    fn unknown_param_is_rejected() {
        let c = Config { model: Some(chain_model(2, 1, "xxx")), params: Some(serde_json::json!({"bogus": 1})), seed: 0 };
        assert!(matches!(execute("foel", &c), Err(Error::Config(_))));
    }

    #[test]
    fn unknown_subcommand() {
        let c = Config { model: None, params: None, seed: 0 };
        assert!(execute("dance", &c).is_err());
    }

    #[test]
    fn foel_on_small_chain_passes() {
        let c = Config { model: Some(chain_model(3, 2, "xxx")), params: None, seed: 0 };
        let a = execute("foel", &c).unwrap();
        assert!(a.passed);
        let levels = String::from_utf8(a.files[0].1.clone()).unwrap();
        assert!(levels.starts_with("S,E,margin\n"));
        assert_eq!(levels.lines().count(), 1 + 4);
    }

    #[test]
    fn ssep_path_has_equal_gaps() {
        let c = Config {
            model: Some(serde_json::json!({"vertices": [0, 1, 2], "edges": [{"x": 0, "y": 1, "rate": 1.0}, {"x": 1, "y": 2, "rate": 1.0}]})),
            params: None,
            seed: 0,
        };
        let a = execute("ssep", &c).unwrap();
        assert!(a.passed);
        let csv = String::from_utf8(a.files[0].1.clone()).unwrap();
        let gaps: Vec<f64> = csv.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse().unwrap()).collect();
        assert_eq!(gaps.len(), 2);
        assert!((gaps[0] - 1.0).abs() < 1e-10 && (gaps[1] - 1.0).abs() < 1e-10);
    }
}
