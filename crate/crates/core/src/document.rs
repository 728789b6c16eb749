//! Machine-readable solver output.
//!
//! Documents carry no timestamps or thread counts, so identical inputs give
//! byte-identical files. `schema/solution-document.schema.json` describes
//! the layout.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Configuration, Solution, Spectrum};
use crate::textfmt;

pub const SCHEMA_VERSION: &str = "cbo-solutions/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Anneal,
}

/// One spectrum entry. Rank 0 is the ground state and rank `r` the `r`-th
/// excited state, labelled `CBO: r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedSolution {
    pub rank: usize,
    pub label: String,
    pub removed: Vec<usize>,
    pub energy: f64,
}

impl RankedSolution {
    pub fn new(rank: usize, sol: &Solution) -> Self {
        RankedSolution {
            rank,
            label: format!("CBO: {rank}"),
            removed: sol.config.removed().to_vec(),
            energy: sol.energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hessian_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradients_path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tool_version: String,
}

impl Provenance {
    pub fn for_hessian(path: &Path, seed: Option<u64>) -> Self {
        Provenance {
            hessian_path: Some(path.display().to_string()),
            gradients_path: None,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDocument {
    pub schema_version: String,
    pub n: usize,
    pub m: usize,
    pub method: Method,
    pub degeneracy_tol: f64,
    pub solutions: Vec<RankedSolution>,
    pub provenance: Provenance,
}

impl SolutionDocument {
    pub fn from_spectrum(
        n: usize,
        m: usize,
        method: Method,
        spectrum: &Spectrum,
        provenance: Provenance,
    ) -> Self {
        SolutionDocument {
            schema_version: SCHEMA_VERSION.to_string(),
            n,
            m,
            method,
            degeneracy_tol: spectrum.degeneracy_tol(),
            solutions: spectrum
                .solutions()
                .iter()
                .enumerate()
                .map(|(r, s)| RankedSolution::new(r, s))
                .collect(),
            provenance,
        }
    }

    /// Rebuilds the spectrum, checking ranks, cardinalities and ordering.
    pub fn to_spectrum(&self) -> Result<Spectrum> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::InvalidArgument(format!(
                "unsupported schema version `{}`, expected `{SCHEMA_VERSION}`",
                self.schema_version
            )));
        }
        let mut sols = Vec::with_capacity(self.solutions.len());
        for (i, s) in self.solutions.iter().enumerate() {
            if s.rank != i {
                return Err(Error::InvalidArgument(format!(
                    "solution {i} carries rank {}",
                    s.rank
                )));
            }
            if s.removed.len() != self.m {
                return Err(Error::InvalidArgument(format!(
                    "solution {i} removes {} blocks, document says M = {}",
                    s.removed.len(),
                    self.m
                )));
            }
            if !s.energy.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "solution {i} has a non-finite energy"
                )));
            }
            sols.push(Solution {
                config: Configuration::new(self.n, s.removed.clone())?,
                energy: s.energy,
            });
        }
        Spectrum::from_ordered(sols, self.degeneracy_tol)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(path: &Path, text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::parse(path, e.line(), e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Self::from_json(path, &textfmt::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        textfmt::write_string(path.as_ref(), &self.to_json())
    }
}
