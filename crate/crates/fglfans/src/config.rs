//! Job configuration shared by the commands.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use clap::ValueEnum;
use fglfans_core::fgl::GradedRing;
use fglfans_core::lazard::build_lazard;

use crate::CliError;

/// Version of every JSON document the tools emit.
pub const SCHEMA_VERSION: u32 = 1;

pub const DEFAULT_TRUNC: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Coeff {
    Universal,
    Additive,
    Multiplicative,
}

impl Coeff {
    pub const ALL: [Coeff; 3] = [Coeff::Universal, Coeff::Additive, Coeff::Multiplicative];

    pub fn name(self) -> &'static str {
        match self {
            Coeff::Universal => "universal",
            Coeff::Additive => "additive",
            Coeff::Multiplicative => "multiplicative",
        }
    }

    /// The coefficient ring truncated above weight `trunc`.
    pub fn ring(self, trunc: usize) -> Result<Arc<GradedRing>, CliError> {
        Ok(match self {
            Coeff::Universal => build_lazard(trunc).map_err(|e| CliError::config(e.to_string()))?.ring().clone(),
            Coeff::Additive => Arc::new(GradedRing::additive(trunc)),
            Coeff::Multiplicative => Arc::new(GradedRing::multiplicative(trunc)),
        })
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

/// An inclusive range of degrees, written `a..b` or as a single degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeRange {
    pub first: i64,
    pub last: i64,
}

impl DegreeRange {
    pub fn iter(self) -> impl Iterator<Item = i64> {
        self.first..=self.last
    }
}

impl FromStr for DegreeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| format!("bad degree `{t}`"));
        let (first, last) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let d = parse(s)?;
                (d, d)
            }
        };
        if first > last {
            return Err(format!("empty degree range {s}"));
        }
        Ok(DegreeRange { first, last })
    }
}

impl fmt::Display for DegreeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.first, self.last)
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub fan: PathBuf,
    pub degrees: DegreeRange,
    pub trunc: usize,
    pub coeff: Coeff,
    pub format: Format,
}

impl JobConfig {
    /// Every requested degree must be at most the truncation bound.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.degrees.last > self.trunc as i64 {
            return Err(CliError::config(format!(
                "degree {} exceeds the truncation bound {}; raise --trunc",
                self.degrees.last, self.trunc
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_ranges() {
        assert_eq!("0..2".parse::<DegreeRange>().unwrap(), DegreeRange { first: 0, last: 2 });
        assert_eq!("-1..=1".parse::<DegreeRange>().unwrap(), DegreeRange { first: -1, last: 1 });
        assert_eq!("3".parse::<DegreeRange>().unwrap().iter().collect::<Vec<_>>(), vec![3]);
        assert!("2..1".parse::<DegreeRange>().is_err());
        assert!("x".parse::<DegreeRange>().is_err());
    }
}
