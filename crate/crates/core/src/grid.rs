//! Existence grids over `(j, m)`, their PBM and CSV renderings, and
//! boundary extraction.
//!
//! A grid is built from one saturating table shared by every column. Each
//! column scans its row once and reads off the first hit for every `m` at
//! the same time.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::classify::{ColumnClassification, MiSequence, Verdict};
use crate::error::{Error, Result};
use crate::provenance::Provenance;
use crate::solver::{BoundPolicy, Solver};
use crate::squares::search_bound_squares;

/// Scan limit for square columns the policy leaves unbounded (`j < 5`).
/// Hits found below it are exact; misses stay undetermined.
fn fallback_limit(j: u64, m_max: u64) -> u64 {
    let r = m_max * j + j + 14;
    r * r
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CellStatus {
    Exists(u64),
    Absent,
    Undetermined,
}

impl CellStatus {
    pub fn label(&self) -> &'static str {
        match self {
            CellStatus::Exists(_) => "exists",
            CellStatus::Absent => "absent",
            CellStatus::Undetermined => "undetermined",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GridCell {
    pub status: CellStatus,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExistenceGrid {
    pub k: u32,
    pub j_range: RangeInclusive<u64>,
    pub m_range: RangeInclusive<u64>,
    /// j-major: all `m` of the first column, then the next column.
    pub cells: Vec<GridCell>,
}

/// How to draw undetermined cells in a bitmap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UndeterminedRender {
    Reject,
    AsExists,
    AsAbsent,
}

impl UndeterminedRender {
    pub fn as_str(self) -> &'static str {
        match self {
            UndeterminedRender::Reject => "reject",
            UndeterminedRender::AsExists => "exists",
            UndeterminedRender::AsAbsent => "absent",
        }
    }
}

fn span(r: &RangeInclusive<u64>) -> usize {
    if r.is_empty() {
        0
    } else {
        (r.end() - r.start() + 1) as usize
    }
}

impl ExistenceGrid {
    pub fn width(&self) -> usize {
        span(&self.j_range)
    }

    pub fn height(&self) -> usize {
        span(&self.m_range)
    }

    pub fn cell(&self, j: u64, m: u64) -> Option<&GridCell> {
        if !self.j_range.contains(&j) || !self.m_range.contains(&m) {
            return None;
        }
        let col = (j - self.j_range.start()) as usize;
        let row = (m - self.m_range.start()) as usize;
        self.cells.get(col * self.height() + row)
    }

    pub fn undetermined_count(&self) -> usize {
        self.cells
            .iter()
            .filter(|c| c.status == CellStatus::Undetermined)
            .count()
    }

    /// The `m` whose last column is `Absent`: the complement members visible
    /// at the grid's right edge.
    pub fn complement_at_edge(&self) -> Vec<u64> {
        let j = *self.j_range.end();
        self.m_range
            .clone()
            .filter(|&m| matches!(self.cell(j, m), Some(c) if c.status == CellStatus::Absent))
            .collect()
    }

    /// Plain PBM: `j` across, `m` down, 0 = exists, 1 = absent.
    pub fn to_pbm(&self, undetermined: UndeterminedRender) -> Result<String> {
        let pending = self.undetermined_count();
        if pending > 0 && undetermined == UndeterminedRender::Reject {
            return Err(Error::Config(format!(
                "{pending} undetermined cells; choose how to render them"
            )));
        }
        let mut out = String::from("P1\n");
        if pending > 0 {
            let _ = writeln!(out, "# undetermined={}", undetermined.as_str());
        }
        let _ = writeln!(out, "{} {}", self.width(), self.height());
        for m in self.m_range.clone() {
            let row: Vec<&str> = self
                .j_range
                .clone()
                .map(|j| match self.cell(j, m).map(|c| c.status) {
                    Some(CellStatus::Exists(_)) => "0",
                    Some(CellStatus::Absent) => "1",
                    _ if undetermined == UndeterminedRender::AsAbsent => "1",
                    _ => "0",
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        Ok(out)
    }

    pub fn emit_pbm<W: Write>(&self, out: &mut W, undetermined: UndeterminedRender) -> Result<()> {
        out.write_all(self.to_pbm(undetermined)?.as_bytes())?;
        Ok(())
    }

    /// CSV `k,j,m,status,n,provenance`, j-major; `n` is empty unless the cell exists.
    pub fn emit_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "k,j,m,status,n,provenance")?;
        for j in self.j_range.clone() {
            for m in self.m_range.clone() {
                let c = self.cell(j, m).expect("cell inside the ranges");
                let n = match c.status {
                    CellStatus::Exists(n) => n.to_string(),
                    _ => String::new(),
                };
                writeln!(out, "{},{j},{m},{},{n},{}", self.k, c.status.label(), c.provenance)?;
            }
        }
        Ok(())
    }
}

/// A parsed plain PBM raster; `true` is a black (absent) pixel.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    pub bits: Vec<bool>,
    pub comments: Vec<String>,
}

impl Bitmap {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }
}

pub fn parse_pbm(text: &str) -> Result<Bitmap> {
    let bad = |msg: &str| Error::Config(format!("malformed PBM: {msg}"));
    let mut comments = Vec::new();
    let mut tokens = Vec::new();
    for line in text.lines() {
        let (body, comment) = match line.find('#') {
            Some(i) => (&line[..i], Some(line[i + 1..].trim())),
            None => (line, None),
        };
        if let Some(c) = comment {
            comments.push(c.to_string());
        }
        tokens.extend(body.split_whitespace());
    }
    let mut tokens = tokens.into_iter();
    if tokens.next() != Some("P1") {
        return Err(bad("expected P1"));
    }
    let mut dim = || -> Result<usize> {
        tokens
            .next()
            .ok_or_else(|| bad("missing dimension"))?
            .parse()
            .map_err(|_| bad("bad dimension"))
    };
    let (width, height) = (dim()?, dim()?);
    // plain PBM allows pixels with or without separating whitespace
    let bits = tokens
        .flat_map(str::chars)
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(bad("pixel must be 0 or 1")),
        })
        .collect::<Result<Vec<_>>>()?;
    if bits.len() != width * height {
        return Err(bad("pixel count does not match dimensions"));
    }
    Ok(Bitmap {
        width,
        height,
        bits,
        comments,
    })
}

/// Fills an existence grid. Square cells with a proven ceiling are decided;
/// every other miss stays `Undetermined`.
pub fn build_grid(
    solver: &Solver,
    k: u32,
    j_range: RangeInclusive<u64>,
    m_range: RangeInclusive<u64>,
    policy: BoundPolicy,
) -> Result<ExistenceGrid> {
    if k == 0 || (!j_range.is_empty() && *j_range.start() == 0) || (!m_range.is_empty() && *m_range.start() == 0) {
        return Err(Error::Domain("k, j and m must be positive".into()));
    }
    if j_range.is_empty() || m_range.is_empty() {
        return Ok(ExistenceGrid {
            k,
            j_range,
            m_range,
            cells: Vec::new(),
        });
    }
    let (j_lo, j_hi) = (*j_range.start(), *j_range.end());
    let (m_lo, m_hi) = (*m_range.start(), *m_range.end());

    // per column: scan to the largest ceiling any m in range needs
    let limits: Vec<u64> = (j_lo..=j_hi)
        .map(|j| {
            (m_lo..=m_hi)
                .filter_map(|m| policy.bound(k, j, m).map(|b| b.0))
                .max()
                .unwrap_or_else(|| if k == 2 { fallback_limit(j, m_hi) } else { 0 })
                .max(j)
        })
        .collect();
    let (widest, n_max) = limits
        .iter()
        .enumerate()
        .max_by_key(|&(_, &l)| l)
        .map(|(i, &l)| (j_lo + i as u64, l))
        .expect("nonempty j range");
    solver.cache().budget().check(
        format!("grid column j={widest} (bound {n_max})"),
        (n_max + 1).saturating_mul(j_hi + 1),
    )?;
    let table = solver.cache().get(k, j_hi as usize, n_max as usize, m_hi + 1)?;

    let columns: Vec<Vec<GridCell>> = limits
        .par_iter()
        .enumerate()
        .map(|(i, &limit)| {
            let j = j_lo + i as u64;
            let firsts = table.first_occurrences(j as usize, j as usize, limit as usize);
            (m_lo..=m_hi)
                .map(|m| match firsts[m as usize] {
                    // first hits are exact whatever ceiling applies
                    Some(n) => GridCell {
                        status: CellStatus::Exists(n as u64),
                        provenance: Provenance::Certified,
                    },
                    None => absent_or_open(k, j, m, limit),
                })
                .collect()
        })
        .collect();

    Ok(ExistenceGrid {
        k,
        j_range,
        m_range,
        cells: columns.into_iter().flatten().collect(),
    })
}

fn absent_or_open(k: u32, j: u64, m: u64, searched: u64) -> GridCell {
    // a single part is a perfect power in at most one way
    if j == 1 && m >= 2 {
        return GridCell {
            status: CellStatus::Absent,
            provenance: Provenance::Certified,
        };
    }
    if k == 2 {
        if let Ok(b) = search_bound_squares(m, j) {
            if searched >= b.value {
                return GridCell {
                    status: CellStatus::Absent,
                    provenance: b.provenance,
                };
            }
        }
    }
    GridCell {
        status: CellStatus::Undetermined,
        provenance: Provenance::Empirical,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BoundaryPoint {
    pub m: u64,
    pub j: u64,
    /// `Empirical` when read off the grid rather than a certificate.
    pub provenance: Provenance,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryFunction {
    pub k: u32,
    pub points: Vec<BoundaryPoint>,
}

impl BoundaryFunction {
    /// CSV `m,J,provenance`, ascending `m`.
    pub fn emit_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "m,J,provenance")?;
        for p in &self.points {
            writeln!(out, "{},{},{}", p.m, p.j, p.provenance)?;
        }
        Ok(())
    }
}

/// Smallest `J` in the grid from which the column either increments by one
/// or is absent through the last column.
fn observed_onset(grid: &ExistenceGrid, m: u64) -> Option<u64> {
    let (lo, hi) = (*grid.j_range.start(), *grid.j_range.end());
    let status = |j| grid.cell(j, m).map(|c| c.status);
    let mut onset = hi;
    match status(hi)? {
        CellStatus::Absent => {
            while onset > lo && status(onset - 1) == Some(CellStatus::Absent) {
                onset -= 1;
            }
        }
        CellStatus::Exists(_) => {
            while onset > lo {
                match (status(onset - 1), status(onset)) {
                    (Some(CellStatus::Exists(a)), Some(CellStatus::Exists(b))) if a + 1 == b => onset -= 1,
                    _ => break,
                }
            }
        }
        CellStatus::Undetermined => return None,
    }
    Some(onset)
}

/// Per `m`, the certified onset when a classification carries a
/// certificate, otherwise the onset observed in the grid (flagged empirical).
/// Columns with neither are left out.
pub fn extract_boundary(grid: &ExistenceGrid, classifications: &[ColumnClassification]) -> BoundaryFunction {
    let points = grid
        .m_range
        .clone()
        .filter_map(|m| {
            let certified = classifications
                .iter()
                .find(|c| c.m == m && c.k == grid.k && c.certificate.is_some())
                .and_then(|c| c.onset().map(|j| (j, c.provenance)));
            let (j, provenance) =
                certified.or_else(|| observed_onset(grid, m).map(|j| (j, Provenance::Empirical)))?;
            Some(BoundaryPoint { m, j, provenance })
        })
        .collect();
    BoundaryFunction { k: grid.k, points }
}

impl MiSequence {
    /// CSV `m,classification,J`; `J` is empty for undetermined columns.
    pub fn emit_csv<W: Write>(&self, out: &mut W) -> Result<()> {
        writeln!(out, "m,classification,J")?;
        for c in &self.columns {
            let (label, j) = match c.verdict {
                Verdict::EventualIncrement(j) => ("increment", j.to_string()),
                Verdict::EventualAbsence(j) => ("absence", j.to_string()),
                Verdict::Undetermined(_) => ("undetermined", String::new()),
            };
            writeln!(out, "{},{label},{j}", c.m)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny(statuses: &[CellStatus]) -> ExistenceGrid {
        ExistenceGrid {
            k: 2,
            j_range: 1..=statuses.len() as u64,
            m_range: 1..=1,
            cells: statuses
                .iter()
                .map(|&status| GridCell {
                    status,
                    provenance: Provenance::Certified,
                })
                .collect(),
        }
    }

    #[test]
    fn pbm_format() {
        let g = tiny(&[CellStatus::Exists(1)]);
        assert_eq!(g.to_pbm(UndeterminedRender::Reject).unwrap(), "P1\n1 1\n0\n");
        let g = tiny(&[CellStatus::Exists(1), CellStatus::Absent]);
        assert_eq!(g.to_pbm(UndeterminedRender::Reject).unwrap(), "P1\n2 1\n0 1\n");
    }

    #[test]
    fn undetermined_needs_a_choice() {
        let g = tiny(&[CellStatus::Undetermined, CellStatus::Absent]);
        assert!(g.to_pbm(UndeterminedRender::Reject).is_err());
        let text = g.to_pbm(UndeterminedRender::AsExists).unwrap();
        assert_eq!(text, "P1\n# undetermined=exists\n2 1\n0 1\n");
        let bmp = parse_pbm(&text).unwrap();
        assert_eq!(bmp.comments, vec!["undetermined=exists"]);
        assert_eq!(bmp.bits, vec![false, true]);
        assert_eq!(parse_pbm("P1 2 2 0110").unwrap().bits, vec![false, true, true, false]);
    }

    #[test]
    fn square_cells() {
        let s = Solver::default();
        let g = build_grid(&s, 2, 5..=10, 2..=3, BoundPolicy::Certified).unwrap();
        assert_eq!(g.cell(10, 3).unwrap().status, CellStatus::Absent);
        assert_eq!(g.cell(10, 3).unwrap().provenance, Provenance::Certified);
        assert_eq!(g.cell(9, 3).unwrap().status, CellStatus::Exists(49));
        assert_eq!(g.cell(5, 2).unwrap().status, CellStatus::Exists(20));
        assert_eq!(g.cell(5, 2).unwrap().provenance, Provenance::Certified);
        let mut csv = Vec::new();
        g.emit_csv(&mut csv).unwrap();
        let csv = String::from_utf8(csv).unwrap();
        assert!(csv.starts_with("k,j,m,status,n,provenance\n"));
        assert!(csv.lines().any(|l| l == "2,9,3,exists,49,certified"));
        assert!(csv.lines().any(|l| l == "2,10,3,absent,,certified"));
    }

    #[test]
    fn small_columns_without_ceiling() {
        let s = Solver::default();
        let g = build_grid(&s, 2, 1..=2, 1..=2, BoundPolicy::Certified).unwrap();
        assert_eq!(g.cell(1, 1).unwrap().status, CellStatus::Exists(1));
        assert_eq!(g.cell(1, 2).unwrap().status, CellStatus::Absent);
        assert_eq!(g.cell(2, 2).unwrap().status, CellStatus::Exists(50));
    }

    #[test]
    fn empty_ranges() {
        let s = Solver::default();
        #[allow(clippy::reversed_empty_ranges)]
        let g = build_grid(&s, 2, 5..=4, 1..=3, BoundPolicy::Certified).unwrap();
        assert!(g.cells.is_empty());
        let mut csv = Vec::new();
        g.emit_csv(&mut csv).unwrap();
        assert_eq!(csv, b"k,j,m,status,n,provenance\n");
    }

    #[test]
    fn observed_onsets() {
        let g = tiny(&[CellStatus::Exists(9), CellStatus::Exists(5), CellStatus::Exists(6)]);
        assert_eq!(observed_onset(&g, 1), Some(2));
        let g = tiny(&[CellStatus::Exists(9), CellStatus::Absent, CellStatus::Absent]);
        assert_eq!(observed_onset(&g, 1), Some(2));
        let g = tiny(&[CellStatus::Absent, CellStatus::Undetermined]);
        assert_eq!(observed_onset(&g, 1), None);
    }
}
