//! Tail certificates and their line-oriented text form.
//!
//! A certificate records the searches it rests on and every inequality it
//! checked, so an auditor can replay it with any independent counter.
//!
//! ```text
//! tail-certificate v1
//! kind nonexistence
//! k 2
//! m 3
//! j-start 10
//! j-final 12
//! threshold 50
//! bound 3844
//! provenance certified
//! searched 10 2916 absent
//! check exact-hits-below-bound 0 = 0
//! end
//! ```

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::provenance::Provenance;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Lt,
    Le,
    Eq,
    Ge,
}

impl Relation {
    pub fn holds(self, lhs: u64, rhs: u64) -> bool {
        match self {
            Relation::Lt => lhs < rhs,
            Relation::Le => lhs <= rhs,
            Relation::Eq => lhs == rhs,
            Relation::Ge => lhs >= rhs,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Lt => "<",
            Relation::Le => "<=",
            Relation::Eq => "=",
            Relation::Ge => ">=",
        }
    }

    fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "<" => Relation::Lt,
            "<=" => Relation::Le,
            "=" => Relation::Eq,
            ">=" => Relation::Ge,
            _ => return Err(Error::Config(format!("unknown relation `{s}`"))),
        })
    }
}

/// One verified inequality `lhs relation rhs`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub label: String,
    pub lhs: u64,
    pub relation: Relation,
    pub rhs: u64,
}

impl Check {
    pub fn new(label: &str, lhs: u64, relation: Relation, rhs: u64) -> Self {
        Check {
            label: label.to_string(),
            lhs,
            relation,
            rhs,
        }
    }

    pub fn holds(&self) -> bool {
        self.relation.holds(self.lhs, self.rhs)
    }
}

/// A column search a certificate relies on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchedColumn {
    pub j: u64,
    pub bound: u64,
    /// First hit, when the column has one.
    pub found: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailKind {
    /// Taxicab(k, j, m) = n0 + (j - j0) for every `j >= j0`.
    Increment { j0: u64, n0: u64 },
    /// No `n` has exactly `m` representations for any `j >= j_start`.
    Nonexistence {
        j_start: u64,
        j_final: u64,
        threshold: u64,
        bound: u64,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TailCertificate {
    pub k: u32,
    pub m: u64,
    pub kind: TailKind,
    pub provenance: Provenance,
    pub searched: Vec<SearchedColumn>,
    pub checks: Vec<Check>,
}

impl TailCertificate {
    /// All recorded checks hold.
    pub fn is_consistent(&self) -> bool {
        self.checks.iter().all(Check::holds)
    }

    /// Smallest `j` the certificate speaks for.
    pub fn onset(&self) -> u64 {
        match self.kind {
            TailKind::Increment { j0, .. } => j0,
            TailKind::Nonexistence { j_start, .. } => j_start,
        }
    }

    pub fn to_text(&self) -> String {
        self.to_string()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        text.parse()
    }
}

impl fmt::Display for TailCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::from("tail-certificate v1\n");
        match self.kind {
            TailKind::Increment { j0, n0 } => {
                let _ = writeln!(s, "kind increment\nk {}\nm {}\nj0 {j0}\nn0 {n0}", self.k, self.m);
            }
            TailKind::Nonexistence {
                j_start,
                j_final,
                threshold,
                bound,
            } => {
                let _ = writeln!(
                    s,
                    "kind nonexistence\nk {}\nm {}\nj-start {j_start}\nj-final {j_final}\nthreshold {threshold}\nbound {bound}",
                    self.k, self.m
                );
            }
        }
        let _ = writeln!(s, "provenance {}", self.provenance);
        for c in &self.searched {
            match c.found {
                Some(n) => writeln!(s, "searched {} {} found {n}", c.j, c.bound),
                None => writeln!(s, "searched {} {} absent", c.j, c.bound),
            }?;
        }
        for c in &self.checks {
            writeln!(s, "check {} {} {} {}", c.label, c.lhs, c.relation.symbol(), c.rhs)?;
        }
        s.push_str("end\n");
        f.write_str(&s)
    }
}

impl FromStr for TailCertificate {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |msg: String| Error::Config(format!("malformed certificate: {msg}"));
        let num = |s: Option<&str>, what: &str| -> Result<u64> {
            s.ok_or_else(|| bad(format!("missing {what}")))?
                .parse()
                .map_err(|_| bad(format!("bad number for {what}")))
        };
        let mut lines = text.lines();
        if lines.next() != Some("tail-certificate v1") {
            return Err(bad("missing header".into()));
        }
        let mut fields = std::collections::HashMap::new();
        let mut kind = None;
        let mut provenance = None;
        let mut searched = Vec::new();
        let mut checks = Vec::new();
        let mut ended = false;
        for line in lines {
            let mut parts = line.split_whitespace();
            match parts.next() {
                Some("end") => {
                    ended = true;
                    break;
                }
                Some("kind") => kind = parts.next().map(str::to_string),
                Some("provenance") => {
                    provenance = Some(parts.next().ok_or_else(|| bad("provenance".into()))?.parse()?)
                }
                Some("searched") => {
                    let j = num(parts.next(), "searched j")?;
                    let bound = num(parts.next(), "searched bound")?;
                    let found = match parts.next() {
                        Some("found") => Some(num(parts.next(), "searched hit")?),
                        Some("absent") => None,
                        _ => return Err(bad("searched status".into())),
                    };
                    searched.push(SearchedColumn { j, bound, found });
                }
                Some("check") => {
                    let label = parts.next().ok_or_else(|| bad("check label".into()))?;
                    let lhs = num(parts.next(), "check lhs")?;
                    let rel = Relation::parse(parts.next().unwrap_or(""))?;
                    let rhs = num(parts.next(), "check rhs")?;
                    checks.push(Check::new(label, lhs, rel, rhs));
                }
                Some(key) => {
                    fields.insert(key.to_string(), num(parts.next(), key)?);
                }
                None => {}
            }
        }
        if !ended {
            return Err(bad("missing end".into()));
        }
        let get = |key: &str| fields.get(key).copied().ok_or_else(|| bad(format!("missing {key}")));
        let kind = match kind.as_deref() {
            Some("increment") => TailKind::Increment {
                j0: get("j0")?,
                n0: get("n0")?,
            },
            Some("nonexistence") => TailKind::Nonexistence {
                j_start: get("j-start")?,
                j_final: get("j-final")?,
                threshold: get("threshold")?,
                bound: get("bound")?,
            },
            _ => return Err(bad("unknown kind".into())),
        };
        Ok(TailCertificate {
            k: u32::try_from(get("k")?).map_err(|_| bad("k".into()))?,
            m: get("m")?,
            kind,
            provenance: provenance.ok_or_else(|| bad("missing provenance".into()))?,
            searched,
            checks,
        })
    }
}
