//! Tail certificates and end-behavior classification of columns.
//!
//! For fixed `m` a column Taxicab(k, ·, m) eventually either increments by
//! one per step of `j` or stops existing. Both endings are certified from
//! the shift identity p^k(n, j) = p^k(n - 1, j - 1), valid for `n < 2^k j`.
//!
//! Increment: if n0 = Taxicab(k, j0, m) and n0 + 1 < 2^k (j0 + 1), every
//! `n' <= n0 + d` lies in the equality region at level `j0 + d`, so the hit
//! and the absence of earlier hits both shift up by one per level.
//!
//! Nonexistence: let J be a column with no hit up to its ceiling and
//! p^k(n, J) >= m + 1 for every `n >= t`. For `j > J` and `n' = n - j + J`,
//! the chain down to level J stays in the equality region whenever
//! `n' < 2^k (J + 1) - 1`. So if `t <= 2^k (J + 1) - 1`, each `n` either
//! maps to some `n' < t` (count unchanged, not `m`) or dominates a count
//! `>= m + 1`.

use rayon::prelude::*;

use crate::certificate::{Check, Relation, SearchedColumn, TailCertificate, TailKind};
use crate::error::{Error, Result};
use crate::provenance::Provenance;
use crate::solver::{BoundPolicy, Solver, Status};
use crate::squares::search_bound_squares;

/// How many levels past the starting column a nonexistence search may go.
pub const DEFAULT_TAIL_SPAN: u64 = 16;

/// Why a certificate was not issued.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refusal {
    /// n0 + 1 is not below 2^k (j0 + 1); try a larger j0.
    OutsideEqualityRegion { n0: u64, limit: u64 },
    /// A column at or after the start has a hit, so absence cannot hold.
    ColumnExists { j: u64, n: u64 },
    /// The policy has no ceiling for this column.
    NoBound { j: u64 },
    /// No level within the span satisfied the threshold condition.
    SpanExhausted { last_j: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Certification {
    Issued(TailCertificate),
    Refused(Refusal),
}

impl Certification {
    pub fn certificate(&self) -> Option<&TailCertificate> {
        match self {
            Certification::Issued(c) => Some(c),
            Certification::Refused(_) => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    EventualIncrement(u64),
    EventualAbsence(u64),
    /// Nothing certified up to the scanned `j`.
    Undetermined(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColumnClassification {
    pub k: u32,
    pub m: u64,
    pub verdict: Verdict,
    pub provenance: Provenance,
    pub certificate: Option<TailCertificate>,
}

impl ColumnClassification {
    /// The onset `J`, when the column is classified.
    pub fn onset(&self) -> Option<u64> {
        match self.verdict {
            Verdict::EventualIncrement(j) | Verdict::EventualAbsence(j) => Some(j),
            Verdict::Undetermined(_) => None,
        }
    }
}

/// The values of `m` split by column end behavior.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiSequence {
    pub members: Vec<u64>,
    pub complement: Vec<u64>,
    pub undetermined: Vec<u64>,
    pub columns: Vec<ColumnClassification>,
}

fn equality_limit(k: u32, j: u64) -> u64 {
    (1u64 << k) * j
}

impl Solver {
    /// Issues an increment certificate for n0 = Taxicab(k, j0, m) when
    /// `n0 + 1 < 2^k (j0 + 1)`. Errors if `n0` is not the first hit.
    pub fn certify_tail_increment(&self, k: u32, j0: u64, m: u64, n0: u64) -> Result<Certification> {
        if k == 0 || j0 == 0 || m == 0 || n0 < j0 {
            return Err(Error::Domain(format!(
                "increment certificate needs a hit (k={k}, j0={j0}, m={m}, n0={n0})"
            )));
        }
        let table = self.cache().get(k, j0 as usize, n0 as usize, m + 1)?;
        let at = table.cell(n0 as usize, j0 as usize);
        let first = table
            .first_in_row(j0 as usize, j0 as usize, n0 as usize, |v| v == m)
            .map(|n| n as u64);
        if at != m || first != Some(n0) {
            return Err(Error::Certification(format!(
                "{n0} is not Taxicab({k},{j0},{m})"
            )));
        }
        let limit = equality_limit(k, j0 + 1);
        if n0 + 1 >= limit {
            return Ok(Certification::Refused(Refusal::OutsideEqualityRegion { n0, limit }));
        }
        Ok(Certification::Issued(TailCertificate {
            k,
            m,
            kind: TailKind::Increment { j0, n0 },
            provenance: Provenance::Certified,
            searched: vec![SearchedColumn {
                j: j0,
                bound: n0,
                found: Some(n0),
            }],
            checks: vec![
                Check::new("count-at-n0", at, Relation::Eq, m),
                Check::new("first-hit", first.unwrap_or(0), Relation::Eq, n0),
                Check::new("next-in-equality-region", n0 + 1, Relation::Lt, limit),
            ],
        }))
    }

    /// Certifies that Taxicab(2, j, m) does not exist for any `j >= j_start`.
    pub fn certify_tail_nonexistence(&self, m: u64, j_start: u64) -> Result<Certification> {
        if m < 2 || j_start < 5 {
            return Err(Error::Domain(format!(
                "square nonexistence certificates need m >= 2 and j >= 5 (m={m}, j={j_start})"
            )));
        }
        self.certify_tail_nonexistence_with(2, m, j_start, BoundPolicy::Certified, DEFAULT_TAIL_SPAN)
    }

    /// Nonexistence certificate under an arbitrary ceiling policy; the
    /// certificate inherits the weakest provenance of the ceilings it used.
    pub fn certify_tail_nonexistence_with(
        &self,
        k: u32,
        m: u64,
        j_start: u64,
        policy: BoundPolicy,
        span: u64,
    ) -> Result<Certification> {
        if k == 0 || m == 0 || j_start == 0 {
            return Err(Error::Domain("k, m and j_start must be positive".into()));
        }
        let mut searched = Vec::new();
        let mut provenance = Provenance::Certified;
        for j in j_start..=j_start + span {
            let Some((bound, bound_provenance)) = policy.bound(k, j, m) else {
                return Ok(Certification::Refused(Refusal::NoBound { j }));
            };
            provenance = provenance.weakest(bound_provenance);
            let table = self.cache().get(k, j as usize, bound as usize, m + 1)?;
            let (ju, bu) = (j as usize, bound as usize);
            if let Some(n) = table.first_in_row(ju, ju, bu, |v| v == m) {
                return Ok(Certification::Refused(Refusal::ColumnExists { j, n: n as u64 }));
            }
            searched.push(SearchedColumn {
                j,
                bound,
                found: None,
            });
            let threshold = table
                .last_in_row(ju, 0, bu, |v| v <= m)
                .map_or(0, |n| n as u64 + 1);
            let region = equality_limit(k, j + 1) - 1;
            if threshold > region || threshold > bound {
                continue;
            }
            let least = table.min_in_row(ju, threshold as usize, bu).unwrap_or(0);
            let checks = vec![
                Check::new("exact-hits-to-bound", 0, Relation::Eq, 0),
                Check::new("least-count-from-threshold", least, Relation::Ge, m + 1),
                Check::new("threshold-in-equality-region", threshold, Relation::Le, region),
            ];
            let cert = TailCertificate {
                k,
                m,
                kind: TailKind::Nonexistence {
                    j_start,
                    j_final: j,
                    threshold,
                    bound,
                },
                provenance,
                searched,
                checks,
            };
            if !cert.is_consistent() {
                return Err(Error::Certification(format!(
                    "inconsistent nonexistence certificate for m={m} at j={j}"
                )));
            }
            return Ok(Certification::Issued(cert));
        }
        Ok(Certification::Refused(Refusal::SpanExhausted {
            last_j: j_start + span,
        }))
    }

    /// Scans `j = 1..=j_limit` for the first certified end behavior of column `m`.
    pub fn classify_column(
        &self,
        k: u32,
        m: u64,
        j_limit: u64,
        policy: BoundPolicy,
    ) -> Result<ColumnClassification> {
        if k == 0 || m == 0 {
            return Err(Error::Domain("k and m must be positive".into()));
        }
        if j_limit < 2 {
            return Err(Error::Domain(format!("j_limit must be at least 2, got {j_limit}")));
        }
        let empirical_only = k != 2 || !matches!(policy, BoundPolicy::Certified);
        let finish = |verdict, provenance: Provenance, certificate| ColumnClassification {
            k,
            m,
            verdict,
            provenance: if k == 2 { provenance } else { Provenance::Empirical },
            certificate,
        };

        let mut run_start: Option<u64> = None;
        let mut j = 1;
        while j <= j_limit {
            // an increment certificate needs the first hit below 2^k (j + 1) - 1
            let window = equality_limit(k, j + 1) - 2;
            let table = self.cache().get(k, j as usize, window as usize, m + 1)?;
            if let Some(n0) = table.first_in_row(j as usize, j as usize, window as usize, |v| v == m) {
                if let Certification::Issued(cert) =
                    self.certify_tail_increment(k, j, m, n0 as u64)?
                {
                    return Ok(finish(Verdict::EventualIncrement(j), cert.provenance, Some(cert)));
                }
            }

            let Some((bound, _)) = policy.bound(k, j, m) else {
                run_start = None;
                j += 1;
                continue;
            };
            let outcome = self.taxicab(k, j, m, bound.max(j))?;
            if let Status::Found(_) = outcome.status {
                run_start = None;
                j += 1;
                continue;
            }
            let start = *run_start.get_or_insert(j);
            let span = DEFAULT_TAIL_SPAN.max(j_limit.saturating_sub(j));
            let tail = if k == 2 && !empirical_only && m >= 2 && j >= 5 {
                self.certify_tail_nonexistence(m, j)?
            } else {
                self.certify_tail_nonexistence_with(k, m, j, policy, span)?
            };
            match tail {
                Certification::Issued(cert) => {
                    let provenance = if empirical_only {
                        Provenance::Empirical
                    } else {
                        cert.provenance.weakest(outcome.provenance)
                    };
                    return Ok(finish(Verdict::EventualAbsence(start), provenance, Some(cert)));
                }
                Certification::Refused(Refusal::ColumnExists { j: hit, .. }) => {
                    run_start = None;
                    j = hit;
                }
                Certification::Refused(_) => j += 1,
            }
        }
        Ok(finish(Verdict::Undetermined(j_limit), Provenance::Empirical, None))
    }

    /// Recomputes everything a certificate claims with this solver's tables.
    /// Returns one check per claim; the certificate stands only if all hold.
    /// Run it on a fresh solver to get an independent replay.
    pub fn audit_certificate(&self, cert: &TailCertificate) -> Result<Vec<Check>> {
        let (k, m) = (cert.k, cert.m);
        let mut out = Vec::new();
        for c in &cert.searched {
            let o = self.taxicab(k, c.j, m, c.bound.max(c.j))?;
            out.push(Check::new(
                &format!("replay-column-{}", c.j),
                o.status.found().unwrap_or(0),
                Relation::Eq,
                c.found.unwrap_or(0),
            ));
        }
        match cert.kind {
            TailKind::Increment { j0, n0 } => {
                let table = self.cache().get(k, j0 as usize, n0 as usize, m + 1)?;
                let first = table
                    .first_in_row(j0 as usize, j0 as usize, n0 as usize, |v| v == m)
                    .map_or(0, |n| n as u64);
                out.push(Check::new("first-hit", first, Relation::Eq, n0));
                out.push(Check::new(
                    "next-in-equality-region",
                    n0 + 1,
                    Relation::Lt,
                    equality_limit(k, j0 + 1),
                ));
            }
            TailKind::Nonexistence {
                j_start,
                j_final,
                threshold,
                bound,
            } => {
                for j in j_start..=j_final {
                    let ceiling = if k == 2 {
                        search_bound_squares(m, j).map(|b| b.value).unwrap_or(u64::MAX)
                    } else {
                        j
                    };
                    let covered = cert
                        .searched
                        .iter()
                        .any(|c| c.j == j && c.found.is_none() && c.bound >= ceiling);
                    out.push(Check::new(&format!("column-{j}-searched"), covered as u64, Relation::Eq, 1));
                }
                let (ju, bu) = (j_final as usize, bound as usize);
                let table = self.cache().get(k, ju, bu, m + 1)?;
                let t = table
                    .last_in_row(ju, 0, bu, |v| v <= m)
                    .map_or(0, |n| n as u64 + 1);
                out.push(Check::new("threshold-recomputed", t, Relation::Eq, threshold));
                let least = table.min_in_row(ju, (threshold as usize).min(bu), bu).unwrap_or(0);
                out.push(Check::new("least-count-from-threshold", least, Relation::Ge, m + 1));
                out.push(Check::new(
                    "threshold-in-equality-region",
                    threshold,
                    Relation::Le,
                    equality_limit(k, j_final + 1) - 1,
                ));
            }
        }
        Ok(out)
    }

    /// Classifies every `m` in `1..=m_limit`; columns run in parallel and
    /// share this solver's table cache.
    pub fn mi_sequence(
        &self,
        k: u32,
        m_limit: u64,
        j_limit: u64,
        policy: BoundPolicy,
    ) -> Result<MiSequence> {
        self.cache().raise_cap_floor(m_limit + 1);
        let columns: Vec<ColumnClassification> = (1..=m_limit)
            .into_par_iter()
            .map(|m| self.classify_column(k, m, j_limit, policy))
            .collect::<Result<_>>()?;
        let mut seq = MiSequence {
            members: Vec::new(),
            complement: Vec::new(),
            undetermined: Vec::new(),
            columns: Vec::new(),
        };
        for c in &columns {
            match c.verdict {
                Verdict::EventualIncrement(_) => seq.members.push(c.m),
                Verdict::EventualAbsence(_) => seq.complement.push(c.m),
                Verdict::Undetermined(_) => seq.undetermined.push(c.m),
            }
        }
        seq.columns = columns;
        Ok(seq)
    }
}
