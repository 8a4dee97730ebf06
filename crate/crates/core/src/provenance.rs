use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// How far a claim can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    /// Exhaustive search, or absence backed by the proven search ceiling.
    Certified,
    /// Search ceiling applied outside the hypotheses it was proven under (`j` = 5, 6).
    HypothesisExtended,
    /// Bounded search only, or a conjectural ceiling.
    Empirical,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Certified => "certified",
            Provenance::HypothesisExtended => "hypothesis-extended",
            Provenance::Empirical => "empirical",
        }
    }

    /// The weaker of two provenances.
    pub fn weakest(self, other: Provenance) -> Provenance {
        self.max(other)
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "certified" => Ok(Provenance::Certified),
            "hypothesis-extended" => Ok(Provenance::HypothesisExtended),
            "empirical" => Ok(Provenance::Empirical),
            other => Err(Error::Config(format!("unknown provenance `{other}`"))),
        }
    }
}
