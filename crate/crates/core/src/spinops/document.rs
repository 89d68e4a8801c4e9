//! JSON model documents:
//!
//! ```json
//! {"sites": [{"id": 0, "twice_s": 1}, {"id": 1, "twice_s": 1}],
//!  "edges": [{"x": 0, "y": 1, "J": 1.0}],
//!  "model": {"kind": "xxx"}}
//! ```
//!
//! `kind` is one of `xxx`, `xxz` (with `delta`), `aklt`, `custom` (with one
//! `terms` entry per edge, each a square matrix of `[re, im]` pairs). An
//! optional `metric` table overrides graph distance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::spinops::graph::{Site, SpinGraph};
use crate::spinops::hamiltonian::ModelSpec;
use crate::spinops::spin::SpinValue;
use num_complex::Complex64;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SiteDoc {
    pub id: usize,
    pub twice_s: u32,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub x: usize,
    pub y: usize,
    #[serde(rename = "J")]
    pub j: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelKindDoc {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub terms: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ModelDocument {
    pub sites: Vec<SiteDoc>,
    pub edges: Vec<EdgeDoc>,
    pub model: ModelKindDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<f64>>>,
}

fn matrix_from_pairs(rows: &[Vec<[f64; 2]>]) -> Result<CMat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::Config("custom term must be a square matrix".into()));
    }
    Ok(CMat::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

impl ModelDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn graph(&self) -> Result<SpinGraph> {
        let sites = self
            .sites
            .iter()
            .map(|s| Ok(Site { id: s.id, spin: SpinValue::new(s.twice_s)? }))
            .collect::<Result<Vec<_>>>()?;
        let edges = self.edges.iter().map(|e| (e.x, e.y, e.j)).collect();
        let g = SpinGraph::new(sites, edges)?;
        match &self.metric {
            Some(m) => g.with_metric(m.clone()),
            None => Ok(g),
        }
    }

    pub fn model(&self) -> Result<ModelSpec> {
        let m = &self.model;
        let spec = match m.kind.to_ascii_lowercase().as_str() {
            "xxx" => ModelSpec::Xxx,
            "xxz" => ModelSpec::Xxz {
                delta: m.delta.ok_or_else(|| Error::Config("xxz model needs \"delta\"".into()))?,
            },
            "aklt" => ModelSpec::Aklt,
            "custom" => {
                let terms = m.terms.as_ref().ok_or_else(|| Error::Config("custom model needs \"terms\"".into()))?;
                ModelSpec::CustomTwoSite {
                    terms: terms.iter().map(|t| matrix_from_pairs(t)).collect::<Result<_>>()?,
                }
            }
            other => return Err(Error::Config(format!("unknown model kind \"{other}\""))),
        };
        if !matches!(spec, ModelSpec::Xxz { .. }) && m.delta.is_some() {
            return Err(Error::Config("\"delta\" only applies to xxz".into()));
        }
        Ok(spec)
    }

    /// Parses and cross-validates graph and model.
    pub fn resolve(&self) -> Result<(SpinGraph, ModelSpec)> {
        let g = self.graph()?;
        let m = self.model()?;
        m.validate(&g)?;
        Ok((g, m))
    }
}
