//! The bundled fans and their expected-rank fixtures.
//!
//! Fans and fixtures are compiled into the binary. `selftest --bless`
//! rewrites the fixture files in [`corpus_dir`].

use std::path::{Path, PathBuf};
use std::sync::Arc;

use fglfans_core::fan::Fan;
use serde::{Deserialize, Serialize};

use crate::config::SCHEMA_VERSION;
use crate::fanfile::{parse_fan, FanFileError};

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: String,
    pub fan_json: String,
    /// Empty when no fixture exists.
    pub fixture_json: String,
}

impl Entry {
    pub fn fan(&self) -> Result<Arc<Fan>, FanFileError> {
        parse_fan(&self.fan_json).map(Arc::new)
    }

    pub fn fixture(&self) -> Option<Fixture> {
        serde_json::from_str(&self.fixture_json).ok()
    }
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        [$((
            $name,
            include_str!(concat!("../corpus/", $name, ".json")),
            include_str!(concat!("../corpus/", $name, ".ranks.json")),
        )),*]
    };
}

const BUNDLED: [(&str, &str, &str); 10] =
    bundled!("a1", "a2", "blowup_p2", "conifold", "p1", "p123", "p1xp1", "p2", "quadric", "square");

/// The compiled-in corpus, sorted by name.
pub fn bundled() -> Vec<Entry> {
    BUNDLED
        .iter()
        .map(|&(name, fan, fixture)| Entry { name: name.into(), fan_json: fan.into(), fixture_json: fixture.into() })
        .collect()
}

pub fn bundled_fan(name: &str) -> Option<Arc<Fan>> {
    bundled().into_iter().find(|e| e.name == name).and_then(|e| e.fan().ok())
}

/// Source directory of the bundled corpus.
pub fn corpus_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus"))
}

/// Fans `NAME.json` in `dir` with their fixtures `NAME.ranks.json`, sorted
/// by name.
pub fn load_dir(dir: &Path) -> std::io::Result<Vec<Entry>> {
    let mut names: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().into_string().ok())
        .filter(|n| n.ends_with(".json") && !n.ends_with(".ranks.json"))
        .map(|n| n.trim_end_matches(".json").to_string())
        .collect();
    names.sort();
    names
        .into_iter()
        .map(|name| {
            let fan_json = std::fs::read_to_string(dir.join(format!("{name}.json")))?;
            let fixture_json = std::fs::read_to_string(dir.join(format!("{name}.ranks.json"))).unwrap_or_default();
            Ok(Entry { name, fan_json, fixture_json })
        })
        .collect()
}

/// Expected ranks of global sections, per coefficient ring, for the degrees
/// `0..=trunc`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fixture {
    pub schema_version: u32,
    pub fan: String,
    pub trunc: usize,
    pub degrees: Vec<i64>,
    pub universal: Vec<usize>,
    pub additive: Vec<usize>,
    pub multiplicative: Vec<usize>,
}

impl Fixture {
    pub fn new(fan: &str, trunc: usize, ranks: [Vec<usize>; 3]) -> Self {
        let [universal, additive, multiplicative] = ranks;
        Fixture {
            schema_version: SCHEMA_VERSION,
            fan: fan.into(),
            trunc,
            degrees: (0..=trunc as i64).collect(),
            universal,
            additive,
            multiplicative,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("fixtures serialize");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_fans_are_valid_and_canonical() {
        let entries = bundled();
        assert_eq!(entries.len(), 10);
        for e in &entries {
            let fan = e.fan().unwrap_or_else(|err| panic!("{}: {err}", e.name));
            assert_eq!(crate::fanfile::to_json(&fan).unwrap(), e.fan_json.trim_end(), "{}", e.name);
        }
    }

    #[test]
    fn directory_matches_bundle() {
        let from_dir = load_dir(&corpus_dir()).unwrap();
        let names: Vec<String> = from_dir.iter().map(|e| e.name.clone()).collect();
        let bundled: Vec<String> = bundled().iter().map(|e| e.name.clone()).collect();
        assert_eq!(names, bundled);
    }
}
