use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use serde::Serialize;
use taxicab_core::cachefile::{self, Expected};
use taxicab_core::grid::UndeterminedRender;
use taxicab_core::{
    build_grid, count_row, extract_boundary, BoundPolicy, Check, ColumnClassification, CountMode,
    CountTable, Counter, FitFamily, PartitionQuery, SearchTable, TailCertificate, TailKind,
    TaxicabOutcome, Verdict,
};

use crate::config::{conjectural_constant, ensure_parent, BoundChoice, Failure, Outcome, RunConfig};
use crate::{
    AuditArgs, BoundArgs, CacheAction, ClassifyArgs, CountArgs, DecideArgs, FamilyFlag, FitArgs,
    GridArgs, SequenceArgs, TaxicabArgs, UndeterminedFlag,
};

/// Prints one JSON-lines record.
pub fn emit<T: Serialize>(record: &T) {
    println!("{}", serde_json::to_string(record).expect("records serialize"));
}

#[derive(Serialize)]
struct CountRecord {
    k: u32,
    n: u64,
    j: u64,
    mu: Option<u64>,
    count: u64,
}

pub fn count(_cfg: &RunConfig, a: CountArgs) -> Outcome<()> {
    let mut query = PartitionQuery::new(a.k, a.n, a.j);
    if let Some(mu) = a.max_part {
        query = query.with_max_part(mu);
    }
    let mut counter = Counter::<u64>::new(a.k, CountMode::Exact)?;
    let c = counter.count(&query)?;
    emit(&CountRecord {
        k: a.k,
        n: a.n,
        j: a.j,
        mu: a.max_part,
        count: c.value,
    });
    Ok(())
}

#[derive(Serialize)]
pub struct TaxicabRecord {
    pub k: u32,
    pub j: u64,
    pub m: u64,
    pub variant: &'static str,
    pub status: &'static str,
    pub n: Option<u64>,
    pub bound_used: u64,
    pub provenance: String,
}

impl TaxicabRecord {
    pub fn new(o: &TaxicabOutcome, variant: &'static str, bound_used: u64) -> Self {
        TaxicabRecord {
            k: o.k,
            j: o.j,
            m: o.m,
            variant,
            status: o.status.label(),
            n: o.status.found(),
            bound_used,
            provenance: o.provenance.to_string(),
        }
    }
}

/// Ceiling for a single search under the `--bound` flags.
fn single_bound(k: u32, j: u64, m: u64, b: &BoundArgs) -> Outcome<u64> {
    match b.bound {
        BoundChoice::Fixed(n) => Ok(n),
        BoundChoice::Auto => {
            if let Some((n, _)) = BoundPolicy::Certified.bound(k, j, m) {
                return Ok(n);
            }
            let constant = conjectural_constant(b.conjectural_constant, k);
            BoundPolicy::Conjectural { constant }
                .bound(k, j, m)
                .map(|(n, _)| n)
                .ok_or_else(|| Failure::usage("conjectural ceiling overflows 64 bits; pass --bound"))
        }
    }
}

/// Ceiling policy for multi-cell runs under the `--bound` flags.
fn policy(k: u32, b: &BoundArgs) -> BoundPolicy {
    match b.bound {
        BoundChoice::Fixed(n) => BoundPolicy::Fixed(n),
        BoundChoice::Auto if k == 2 && b.conjectural_constant.is_none() => BoundPolicy::Certified,
        BoundChoice::Auto => BoundPolicy::Conjectural {
            constant: conjectural_constant(b.conjectural_constant, k),
        },
    }
}

pub fn taxicab(cfg: &RunConfig, a: TaxicabArgs) -> Outcome<()> {
    let bound = single_bound(a.k, a.j, a.m, &a.bound)?.max(a.j);
    let solver = cfg.solver(a.k, cfg.cap_for(a.m)?);
    let outcome = if a.at_least {
        solver.taxicab_at_least(a.k, a.j, a.m, bound)?
    } else {
        solver.taxicab(a.k, a.j, a.m, bound)?
    };
    cfg.persist(&solver, a.k)?;
    let variant = if a.at_least { "at-least" } else { "exact" };
    emit(&TaxicabRecord::new(&outcome, variant, bound));
    Ok(())
}

pub fn decide(cfg: &RunConfig, a: DecideArgs) -> Outcome<()> {
    let solver = cfg.solver(2, cfg.cap_for(a.m)?);
    let outcome = solver.decide_squares(a.j, a.m)?;
    cfg.persist(&solver, 2)?;
    let bound = match outcome.status {
        taxicab_core::Status::ProvedAbsent { bound } | taxicab_core::Status::AbsentUpTo { bound } => bound,
        taxicab_core::Status::Found(_) => taxicab_core::search_bound_squares(a.m, a.j)?.value,
    };
    emit(&TaxicabRecord::new(&outcome, "exact", bound));
    Ok(())
}

#[derive(Serialize)]
pub struct ClassifyRecord {
    pub k: u32,
    pub m: u64,
    pub verdict: &'static str,
    #[serde(rename = "J")]
    pub onset: Option<u64>,
    pub j_limit: u64,
    pub provenance: String,
    pub certified_by: Option<&'static str>,
}

impl ClassifyRecord {
    fn new(c: &ColumnClassification, j_limit: u64) -> Self {
        let verdict = match c.verdict {
            Verdict::EventualIncrement(_) => "increment",
            Verdict::EventualAbsence(_) => "absence",
            Verdict::Undetermined(_) => "undetermined",
        };
        ClassifyRecord {
            k: c.k,
            m: c.m,
            verdict,
            onset: c.onset(),
            j_limit,
            provenance: c.provenance.to_string(),
            certified_by: c.certificate.as_ref().map(|cert| match cert.kind {
                TailKind::Increment { .. } => "increment-certificate",
                TailKind::Nonexistence { .. } => "nonexistence-certificate",
            }),
        }
    }
}

pub fn classify(cfg: &RunConfig, a: ClassifyArgs) -> Outcome<()> {
    let policy = policy(a.k, &a.bound);
    let solver = cfg.solver(a.k, cfg.cap_for(a.m)?);
    let c = solver.classify_column(a.k, a.m, a.j_limit, policy)?;
    cfg.persist(&solver, a.k)?;
    if let (Some(path), Some(cert)) = (&a.certificate_out, &c.certificate) {
        ensure_parent(path)?;
        fs::write(path, cert.to_text())?;
    }
    emit(&ClassifyRecord::new(&c, a.j_limit));
    Ok(())
}

#[derive(Serialize)]
struct CheckRecord {
    label: String,
    lhs: u64,
    rhs: u64,
    holds: bool,
}

#[derive(Serialize)]
struct AuditRecord {
    certificate: String,
    k: u32,
    m: u64,
    recorded_checks_hold: bool,
    replay: Vec<CheckRecord>,
    valid: bool,
}

pub fn audit(cfg: &RunConfig, a: AuditArgs) -> Outcome<()> {
    let text = fs::read_to_string(&a.certificate)?;
    let cert = TailCertificate::parse_text(&text)?;
    // a fresh solver: nothing is shared with whatever produced the file
    let solver = taxicab_core::Solver::new(cfg.budget);
    let checks = solver.audit_certificate(&cert)?;
    let recorded = cert.is_consistent();
    let valid = recorded && checks.iter().all(Check::holds);
    emit(&AuditRecord {
        certificate: a.certificate.display().to_string(),
        k: cert.k,
        m: cert.m,
        recorded_checks_hold: recorded,
        replay: checks
            .iter()
            .map(|c| CheckRecord {
                label: c.label.clone(),
                lhs: c.lhs,
                rhs: c.rhs,
                holds: c.holds(),
            })
            .collect(),
        valid,
    });
    if valid {
        Ok(())
    } else {
        Err(Failure::verification("certificate does not replay"))
    }
}

#[derive(Serialize)]
struct ArtifactRecord {
    artifact: &'static str,
    path: String,
    records: usize,
}

#[derive(Serialize)]
struct GridRecord {
    k: u32,
    j: [u64; 2],
    m: [u64; 2],
    cells: usize,
    undetermined: usize,
    complement_at_edge: Vec<u64>,
}

fn write_with<F>(path: &Path, f: F) -> Outcome<()>
where
    F: FnOnce(&mut BufWriter<fs::File>) -> taxicab_core::Result<()>,
{
    ensure_parent(path)?;
    let mut out = BufWriter::new(fs::File::create(path)?);
    f(&mut out)?;
    std::io::Write::flush(&mut out)?;
    Ok(())
}

fn artifact(kind: &'static str, path: &Path, records: usize) {
    emit(&ArtifactRecord {
        artifact: kind,
        path: path.display().to_string(),
        records,
    });
}

pub fn grid(cfg: &RunConfig, a: GridArgs) -> Outcome<()> {
    if a.j.is_empty() || a.m.is_empty() {
        return Err(Failure::usage("--j and --m must be nonempty ranges"));
    }
    let policy = policy(a.k, &a.bound);
    let solver = cfg.solver(a.k, cfg.cap_for(*a.m.end())?);
    let grid = build_grid(&solver, a.k, a.j.clone(), a.m.clone(), policy)?;
    let render = match a.undetermined {
        None => UndeterminedRender::Reject,
        Some(UndeterminedFlag::Exists) => UndeterminedRender::AsExists,
        Some(UndeterminedFlag::Absent) => UndeterminedRender::AsAbsent,
    };
    // render before writing anything so a refusal leaves no partial output
    let pbm = match &a.out_pbm {
        Some(_) => Some(grid.to_pbm(render).map_err(|e| {
            Failure::usage(format!("{e} (pass --undetermined exists|absent)"))
        })?),
        None => None,
    };
    let classifications = match &a.out_boundary {
        Some(_) => Some(classify_range(&solver, a.k, &a.m, *a.j.end(), policy)?),
        None => None,
    };
    cfg.persist(&solver, a.k)?;

    emit(&GridRecord {
        k: a.k,
        j: [*a.j.start(), *a.j.end()],
        m: [*a.m.start(), *a.m.end()],
        cells: grid.cells.len(),
        undetermined: grid.undetermined_count(),
        complement_at_edge: grid.complement_at_edge(),
    });
    if let (Some(path), Some(text)) = (&a.out_pbm, pbm) {
        ensure_parent(path)?;
        fs::write(path, text)?;
        artifact("pbm", path, grid.height());
    }
    if let Some(path) = &a.out_csv {
        write_with(path, |w| grid.emit_csv(w))?;
        artifact("grid-csv", path, grid.cells.len());
    }
    if let (Some(path), Some(cls)) = (&a.out_boundary, classifications) {
        let boundary = extract_boundary(&grid, &cls);
        write_with(path, |w| boundary.emit_csv(w))?;
        artifact("boundary-csv", path, boundary.points.len());
    }
    Ok(())
}

fn classify_range(
    solver: &taxicab_core::Solver,
    k: u32,
    m: &std::ops::RangeInclusive<u64>,
    j_limit: u64,
    policy: BoundPolicy,
) -> Outcome<Vec<ColumnClassification>> {
    use rayon::prelude::*;
    let out = m
        .clone()
        .into_par_iter()
        .map(|m| solver.classify_column(k, m, j_limit.max(2), policy))
        .collect::<taxicab_core::Result<Vec<_>>>()?;
    Ok(out)
}

#[derive(Serialize)]
struct SequenceRecord {
    k: u32,
    m_limit: u64,
    j_limit: u64,
    members: Vec<u64>,
    complement: Vec<u64>,
    undetermined: Vec<u64>,
}

pub fn sequence(cfg: &RunConfig, a: SequenceArgs) -> Outcome<()> {
    if a.m_limit == 0 {
        return Err(Failure::usage("--m-limit must be positive"));
    }
    let policy = policy(a.k, &a.bound);
    let solver = cfg.solver(a.k, cfg.cap_for(a.m_limit)?);
    let seq = solver.mi_sequence(a.k, a.m_limit, a.j_limit, policy)?;
    cfg.persist(&solver, a.k)?;
    emit(&SequenceRecord {
        k: a.k,
        m_limit: a.m_limit,
        j_limit: a.j_limit,
        members: seq.members.clone(),
        complement: seq.complement.clone(),
        undetermined: seq.undetermined.clone(),
    });
    if let Some(path) = &a.out_csv {
        write_with(path, |w| seq.emit_csv(w))?;
        artifact("sequence-csv", path, seq.columns.len());
    }
    Ok(())
}

#[derive(Serialize)]
struct FitRecord {
    family: &'static str,
    root: Option<f64>,
    a: f64,
    b: f64,
    residual: f64,
    points: usize,
}

fn column_index(headers: &csv::StringRecord, name: Option<&str>, default: usize) -> Outcome<usize> {
    match name {
        None if default < headers.len() => Ok(default),
        None => Err(Failure::usage(format!("input has fewer than {} columns", default + 1))),
        Some(n) => headers
            .iter()
            .position(|h| h.trim() == n)
            .ok_or_else(|| Failure::usage(format!("no column named `{n}`"))),
    }
}

pub fn read_points(path: &Path, x: Option<&str>, y: Option<&str>) -> Outcome<Vec<(f64, f64)>> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    let headers = rdr
        .headers()
        .map_err(|e| Failure::usage(e.to_string()))?
        .clone();
    let (xi, yi) = (column_index(&headers, x, 0)?, column_index(&headers, y, 1)?);
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Failure::usage(e.to_string()))?;
        let field = |i: usize| -> Outcome<f64> {
            let raw = rec.get(i).unwrap_or("").trim();
            raw.parse()
                .map_err(|_| Failure::usage(format!("record {}: `{raw}` is not a number", line + 1)))
        };
        points.push((field(xi)?, field(yi)?));
    }
    Ok(points)
}

pub fn fit(a: FitArgs) -> Outcome<()> {
    let family = match (a.family, a.root) {
        (FamilyFlag::Exp, _) => FitFamily::Exponential,
        (FamilyFlag::Root, Some(root)) => FitFamily::RootAffine { root },
        (FamilyFlag::Root, None) => return Err(Failure::usage("--family root needs --root")),
    };
    let points = read_points(&a.input, a.x.as_deref(), a.y.as_deref())?;
    let f = taxicab_core::fit(&points, family)?;
    emit(&FitRecord {
        family: match a.family {
            FamilyFlag::Exp => "exp",
            FamilyFlag::Root => "root",
        },
        root: a.root.filter(|_| a.family == FamilyFlag::Root),
        a: f.a,
        b: f.b,
        residual: f.residual,
        points: points.len(),
    });
    Ok(())
}

#[derive(Serialize)]
struct CacheRecord {
    path: String,
    k: u32,
    j_max: u64,
    n_max: u64,
    mode: &'static str,
    cap: Option<u64>,
    width: u8,
    checksum: String,
    matches_rebuild: Option<bool>,
}

impl CacheRecord {
    fn new(path: &Path, h: &cachefile::CacheHeader, matches_rebuild: Option<bool>) -> Self {
        CacheRecord {
            path: path.display().to_string(),
            k: h.k,
            j_max: h.j_max,
            n_max: h.n_max,
            mode: match h.mode {
                CountMode::Exact => "exact",
                CountMode::Saturating { .. } => "saturating",
            },
            cap: h.mode.cap(),
            width: h.width,
            checksum: format!("{:016x}", h.checksum),
            matches_rebuild,
        }
    }
}

/// A table loaded from disk, whatever its width.
enum Loaded {
    Exact(CountTable<u64>),
    Search(SearchTable),
}

fn load_any(path: &Path, expected: Option<Expected>) -> taxicab_core::Result<(cachefile::CacheHeader, Loaded)> {
    let bytes = fs::read(path)?;
    let h = cachefile::read_header(&bytes)?;
    let table = match h.mode {
        CountMode::Exact => Loaded::Exact(cachefile::decode(&bytes, expected)?),
        CountMode::Saturating { .. } => Loaded::Search(cachefile::load_search(path, expected)?),
    };
    Ok((h, table))
}

pub fn cache(cfg: &RunConfig, action: CacheAction) -> Outcome<()> {
    match action {
        CacheAction::Store {
            k,
            j_max,
            n_max,
            exact,
            out,
        } => {
            let name = match (exact, cfg.cap) {
                (true, Some(_)) => return Err(Failure::usage("--exact and --cap are exclusive")),
                (true, None) => format!("taxicab-k{k}-exact.txcb"),
                (false, Some(cap)) => cachefile::search_file_name(k, cap),
                (false, None) => return Err(Failure::usage("cache store needs --cap or --exact")),
            };
            let path: PathBuf = match (out, &cfg.cache_dir) {
                (Some(p), _) => p,
                (None, Some(dir)) => dir.join(name),
                (None, None) => {
                    return Err(Failure::usage("give --out or a cache directory"));
                }
            };
            ensure_parent(&path)?;
            match cfg.cap {
                None => {
                    let t: CountTable<u64> = count_row(k, j_max, n_max, CountMode::Exact, &cfg.budget)?;
                    cachefile::store(&path, &t)?;
                }
                Some(cap) => {
                    let t = SearchTable::build(k, j_max, n_max, cap, &cfg.budget)?;
                    cachefile::store_search(&path, &t)?;
                }
            }
            let h = cachefile::read_header(&fs::read(&path)?)?;
            emit(&CacheRecord::new(&path, &h, None));
            Ok(())
        }
        CacheAction::Check { path, k, rebuild } => {
            let expected = match (k, cfg.cap) {
                (Some(k), Some(cap)) => Some(Expected {
                    k,
                    mode: CountMode::Saturating { cap },
                }),
                (Some(_), None) | (None, Some(_)) => {
                    return Err(Failure::usage("identity checks need both --k and --cap"));
                }
                (None, None) => None,
            };
            let (h, table) = load_any(&path, expected)
                .map_err(|e| Failure::verification(format!("{}: {e}", path.display())))?;
            let same = if rebuild {
                let (j, n) = (h.j_max as usize, h.n_max as usize);
                Some(match (&table, h.mode) {
                    (Loaded::Exact(t), _) => *t == count_row(h.k, j, n, CountMode::Exact, &cfg.budget)?,
                    (Loaded::Search(t), CountMode::Saturating { cap }) => {
                        *t == SearchTable::build(h.k, j, n, cap, &cfg.budget)?
                    }
                    (Loaded::Search(_), CountMode::Exact) => unreachable!("search tables saturate"),
                })
            } else {
                None
            };
            emit(&CacheRecord::new(&path, &h, same));
            if same == Some(false) {
                return Err(Failure::verification("cached table differs from a fresh build"));
            }
            Ok(())
        }
    }
}
