//! JSON manifold specs:
//!
//! ```json
//! { "b1": 3, "xi": [2, 0, 0], "cup3": [[1, 2, 3, 1]], "ring": "Z", "truncation_power": 4 }
//! ```
//!
//! `ring` is `"Z"`, `"Q"` or `"Zmod:<m>"`; `cup3` entries are `[i, j, k, value]`
//! with `1 <= i < j < k <= b1`; `truncation_power` is optional.

use serde::{Deserialize, Serialize};

use crate::complex::ManifoldSpec;
use crate::error::{Error, Result};
use crate::ring::CoeffRing;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub b1: usize,
    pub xi: Vec<i64>,
    #[serde(default)]
    pub cup3: Vec<[i64; 4]>,
    pub ring: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation_power: Option<u32>,
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<SpecFile> {
        serde_json::from_str(text).map_err(|e| Error::InvalidSpec(format!("spec file: {e}")))
    }

    pub fn ring(&self) -> Result<CoeffRing> {
        self.ring.parse()
    }

    /// Validates and builds the manifold data.
    pub fn to_spec(&self) -> Result<ManifoldSpec> {
        let ring = self.ring()?;
        if self.xi.len() != self.b1 {
            return Err(Error::InvalidSpec(format!("xi has {} entries but b1 = {}", self.xi.len(), self.b1)));
        }
        if self.truncation_power == Some(0) {
            return Err(Error::InvalidSpec("truncation_power must be positive".into()));
        }
        let mut cup3 = Vec::with_capacity(self.cup3.len());
        for &[i, j, k, v] in &self.cup3 {
            let idx = [i, j, k];
            if idx.iter().any(|&x| x < 1 || x > self.b1 as i64) {
                return Err(Error::InvalidSpec(format!("cup3 entry {idx:?} has an index outside 1..{}", self.b1)));
            }
            cup3.push(([i as usize, j as usize, k as usize], v));
        }
        ManifoldSpec::new(self.b1, self.xi.clone(), cup3, ring)
    }
}

impl From<&ManifoldSpec> for SpecFile {
    fn from(s: &ManifoldSpec) -> SpecFile {
        SpecFile {
            b1: s.b1,
            xi: s.xi.clone(),
            cup3: s.cup3.iter().map(|(k, &v)| [k[0] as i64, k[1] as i64, k[2] as i64, v]).collect(),
            ring: s.ring.to_string(),
            truncation_power: None,
        }
    }
}
