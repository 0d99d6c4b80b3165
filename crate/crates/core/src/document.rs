//! Input chain documents and output result documents.
//!
//! Chains are read from TOML (or JSON, by file extension):
//!
//! ```toml
//! states = ["1", "2", "3"]
//! transition_matrix = [
//!     [0, "1/2", "1/2"],
//!     ["2/3", 0, "1/3"],
//!     ["2/3", "1/3", 0],
//! ]
//!
//! [metadata]
//! name = "three-state example"
//! ```
//!
//! Matrix entries are numbers or strings holding a decimal or a `p/q`
//! rational. An `initial_distribution` is accepted but plays no role in any
//! computed quantity.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::chain::{Admissibility, MarkovChain};
use crate::kemeny::{Analysis, Diagnostics, GeometryReport};
use crate::mc::McEstimate;
use crate::simplex::coords_to_point;
use crate::tolerance::Tolerances;

#[derive(Debug, thiserror::Error)]
pub enum DocumentError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad matrix entry {text:?} at ({row}, {col})")]
    BadEntry { row: usize, col: usize, text: String },
}

/// A matrix entry: a plain number or a `"p/q"` / decimal string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

impl Entry {
    pub fn value(&self) -> Option<f64> {
        match self {
            Entry::Number(v) => Some(*v),
            Entry::Text(s) => parse_rational(s),
        }
    }
}

/// Parses `"p/q"` or a plain decimal.
pub fn parse_rational(text: &str) -> Option<f64> {
    let text = text.trim();
    let value = match text.split_once('/') {
        Some((num, den)) => {
            let num: f64 = num.trim().parse().ok()?;
            let den: f64 = den.trim().parse().ok()?;
            if den == 0.0 {
                return None;
            }
            num / den
        }
        None => text.parse().ok()?,
    };
    value.is_finite().then_some(value)
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument {
    pub states: Vec<String>,
    pub transition_matrix: Vec<Vec<Entry>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_distribution: Option<Vec<Entry>>,
    #[serde(default)]
    pub metadata: Metadata,
}

impl ChainDocument {
    pub fn from_toml_str(text: &str) -> Result<Self, DocumentError> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json_str(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads a `.json` file as JSON and anything else as TOML.
    pub fn load(path: &Path) -> Result<Self, DocumentError> {
        let text = std::fs::read_to_string(path).map_err(|source| DocumentError::Io {
            path: path.display().to_string(),
            source,
        })?;
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Self::from_json_str(&text),
            _ => Self::from_toml_str(&text),
        }
    }

    /// Numeric transition matrix. Ragged rows are padded with NaN so that
    /// the shape error is reported by chain validation.
    pub fn matrix(&self) -> Result<DMatrix<f64>, DocumentError> {
        let rows = self.transition_matrix.len();
        let cols = self.transition_matrix.iter().map(Vec::len).max().unwrap_or(0);
        let mut m = DMatrix::from_element(rows, cols, f64::NAN);
        for (i, row) in self.transition_matrix.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                m[(i, j)] = entry.value().ok_or_else(|| DocumentError::BadEntry {
                    row: i,
                    col: j,
                    text: match entry {
                        Entry::Number(v) => v.to_string(),
                        Entry::Text(s) => s.clone(),
                    },
                })?;
            }
        }
        Ok(m)
    }

    /// Warnings about accepted-but-unused content.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.initial_distribution.is_some() {
            out.push("initial_distribution does not affect any computed quantity and is ignored".into());
        }
        out
    }

    pub fn ragged(&self) -> bool {
        let n = self.transition_matrix.len();
        self.transition_matrix.iter().any(|r| r.len() != n)
    }

    pub fn to_chain(&self) -> Result<crate::Result<MarkovChain>, DocumentError> {
        let m = self.matrix()?;
        if self.ragged() {
            return Ok(Err(crate::Error::DimensionMismatch(
                "transition matrix rows have unequal lengths".into(),
            )));
        }
        Ok(MarkovChain::new(self.states.clone(), m))
    }
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn columns(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.column_iter().map(|c| c.iter().copied().collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KemenyBlock {
    pub per_state: Vec<f64>,
    pub commute: f64,
    pub geometric: f64,
    pub spectral: f64,
    pub spread: f64,
    pub agreement: f64,
    /// `|K_geometric − K_commute|`.
    pub geometric_deviation: f64,
    /// `|K_spectral − K_commute|`.
    pub spectral_deviation: f64,
    pub spectrum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingBlock {
    /// One coordinate vector per state, in state order.
    pub vertices: Vec<Vec<f64>>,
    pub circumcenter: Vec<f64>,
    pub lemoine: Vec<f64>,
    pub l_dagger_eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McBlock {
    pub estimate: McEstimate,
    pub seed: u64,
    pub exact: f64,
    /// `|estimate − exact| / stderr`.
    pub z_score: f64,
}

/// Machine-readable result of one run. Every identity is stored together
/// with its deviation so the document can be re-checked on its own.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub states: Vec<String>,
    pub tolerances: Tolerances,
    pub admissibility: Admissibility,
    pub pi: Vec<f64>,
    pub hitting_times: Vec<Vec<f64>>,
    pub commute_times: Vec<Vec<f64>>,
    pub kemeny: KemenyBlock,
    pub geometry: GeometryReport,
    pub diagnostics: Diagnostics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<EmbeddingBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mc: Option<McBlock>,
}

/// Pass/fail flags recomputed from a document's stored numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub admissible: bool,
    pub constancy: bool,
    pub route_agreement: bool,
    pub geometric_identity: bool,
    pub spectral_identity: bool,
    pub embedding: bool,
    pub radius_bound: bool,
    pub circumcenter_inside: bool,
    pub mc_within_4_stderr: Option<bool>,
}

impl ResultDocument {
    pub fn from_analysis(analysis: &Analysis, name: Option<String>, emit_embedding: bool) -> Self {
        let k = &analysis.kemeny;
        let embedding = emit_embedding.then(|| {
            let v = &analysis.embedding.v;
            EmbeddingBlock {
                vertices: columns(v),
                circumcenter: coords_to_point(v, &analysis.circumcenter.gamma_hat)
                    .expect("same dimension")
                    .iter()
                    .copied()
                    .collect(),
                lemoine: coords_to_point(v, &analysis.lemoine.ell_hat)
                    .expect("same dimension")
                    .iter()
                    .copied()
                    .collect(),
                l_dagger_eigenvalues: analysis.embedding.eigen.eigenvalues.clone(),
            }
        });
        ResultDocument {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            name,
            states: analysis.chain.states().to_vec(),
            tolerances: analysis.tolerances,
            admissibility: analysis.admissibility,
            pi: analysis.pi.to_vec(),
            hitting_times: rows(analysis.hitting.matrix()),
            commute_times: rows(analysis.commute.matrix()),
            kemeny: KemenyBlock {
                per_state: k.per_state.clone(),
                commute: k.commute,
                geometric: k.geometric,
                spectral: k.spectral,
                spread: k.spread,
                agreement: k.agreement,
                geometric_deviation: analysis.diagnostics.geometric_deviation,
                spectral_deviation: analysis.diagnostics.spectral_deviation,
                spectrum: analysis.spectral.eigenvalues.clone(),
            },
            geometry: analysis.geometry.clone(),
            diagnostics: analysis.diagnostics,
            embedding,
            mc: None,
        }
    }

    pub fn with_mc(mut self, estimate: McEstimate, seed: u64) -> Self {
        let exact = self.kemeny.commute;
        let z_score = if estimate.stderr > 0.0 {
            (estimate.mean - exact).abs() / estimate.stderr
        } else if estimate.mean == exact {
            0.0
        } else {
            f64::INFINITY
        };
        self.mc = Some(McBlock {
            estimate,
            seed,
            exact,
            z_score,
        });
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result document serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, DocumentError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn verdicts(&self) -> Verdicts {
        let tol = self.tolerances.cross;
        let a = &self.admissibility;
        let k = &self.kemeny;
        let (lo, hi) = k
            .per_state
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        let all = k.per_state.iter().copied().chain([k.commute, k.geometric, k.spectral]);
        let (alo, ahi) = all.fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), v| (l.min(v), h.max(v)));
        Verdicts {
            admissible: a.irreducible && a.aperiodic && a.reversible && a.loop_free,
            constancy: hi - lo < tol,
            route_agreement: ahi - alo < tol,
            geometric_identity: (k.geometric - k.commute).abs() < tol,
            spectral_identity: (k.spectral - k.commute).abs() < tol,
            embedding: self.diagnostics.embedding_deviation < tol,
            radius_bound: self.geometry.r_squared - k.commute >= -tol,
            circumcenter_inside: self.geometry.gamma_hat.iter().all(|&g| g >= 0.0),
            mc_within_4_stderr: self.mc.as_ref().map(|m| m.z_score <= 4.0),
        }
    }
}
