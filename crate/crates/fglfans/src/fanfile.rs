//! Fan files: `{"rank": n, "rays": [[..]], "cones": [[..]]}` with the
//! maximal cones listed by ray index.
//!
//! The canonical form sorts rays lexicographically and each cone's index
//! list ascending, and lists cones in ascending order. Two files describing
//! the same fan serialize to the same bytes.

use std::path::Path;

use fglfans_core::fan::{Fan, FanError};
use fglfans_core::intlin::IntVector;
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FanFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed fan file: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("coordinate {0} does not fit in 64 bits")]
    Overflow(BigInt),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanFile {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

impl FanFile {
    pub fn to_fan(&self) -> Result<Fan, FanFileError> {
        let rays: Vec<IntVector> = self.rays.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        Ok(Fan::new(self.rank, rays, self.cones.clone())?)
    }

    /// The canonical description of `fan`: its sorted rays and maximal cones.
    pub fn from_fan(fan: &Fan) -> Result<Self, FanFileError> {
        let rays = fan
            .rays()
            .iter()
            .map(|r| r.iter().map(|x| i64::try_from(x).map_err(|_| FanFileError::Overflow(x.clone()))).collect())
            .collect::<Result<_, _>>()?;
        let mut cones = fan.maximal_ray_sets();
        cones.sort();
        Ok(FanFile { rank: fan.rank(), rays, cones })
    }
}

pub fn parse_fan(text: &str) -> Result<Fan, FanFileError> {
    serde_json::from_str::<FanFile>(text)?.to_fan()
}

pub fn load_fan(path: &Path) -> Result<Fan, FanFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| FanFileError::Io { path: path.display().to_string(), source })?;
    parse_fan(&text)
}

/// Canonical single-line JSON for `fan`.
pub fn to_json(fan: &Fan) -> Result<String, FanFileError> {
    Ok(serde_json::to_string(&FanFile::from_fan(fan)?)?)
}
